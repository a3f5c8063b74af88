use rand::Rng;

use qficoe::dynamics::{canonical_frame_damping, evolve_open_grid, EvolveConfig, NoiseSpec};
use qficoe::hamiltonian::{build_matrix, canonicalize, CouplingMatrix};
use qficoe::linalg::Mat3;
use qficoe::states::{random_pure_state, rng_from_seed, Basis, DensityMatrix};

#[test]
fn lab_and_canonical_frames_agree_under_damping() {
    let mut rng = rng_from_seed(21);
    let times: Vec<f64> = (1..=8).map(|i| 0.4 * i as f64).collect();
    let cfg = EvolveConfig::expm();
    for k in 0..10u64 {
        let eta: Mat3 =
            std::array::from_fn(|_| std::array::from_fn(|_| rng.random_range(-1.0..1.0)));
        let cm = CouplingMatrix::new(eta, 0.8).unwrap();
        let ch = canonicalize(&cm).unwrap();
        let kk = ch.local_unitary();
        let rho_lab = random_pure_state(300 + k).to_computational().density();
        let rho_can = DensityMatrix::new(
            kk.matmul(rho_lab.matrix()).matmul(&kk.adjoint()),
            Basis::Computational,
        )
        .unwrap();

        let lab = evolve_open_grid(
            &rho_lab,
            &build_matrix(&cm),
            &NoiseSpec::amplitude_damping(0.5).unwrap(),
            &times,
            &cfg,
        )
        .unwrap();
        let noise = canonical_frame_damping(0.5, &ch).unwrap();
        let can = evolve_open_grid(&rho_can, &ch.matrix(cm.g), &noise, &times, &cfg).unwrap();
        for (a, b) in lab.iter().zip(&can) {
            let mapped = kk.matmul(a.matrix()).matmul(&kk.adjoint());
            assert!(mapped.max_abs_diff(b.matrix()) < 1e-10);
        }
    }
}
