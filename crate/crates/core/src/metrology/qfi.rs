//! Quantum Fisher information and the symmetric logarithmic derivative.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{bell_eigensystem, CanonicalHamiltonian};
use crate::linalg::{hermitian_eig, ComplexMatrix, HermitianEigenSystem};
use crate::states::{concurrence_pure, Basis, DensityMatrix, PureState};
use crate::tol;

/// `4 t^2 Var(h)` with the variance taken over the Bell weights `|beta_ab|^2`.
pub fn qfi_pure(s0: &PureState, ch: &CanonicalHamiltonian, t: f64) -> f64 {
    let w = bell_eigensystem(ch).omegas;
    let b = s0.to_bell();
    let p: Vec<f64> = b.amplitudes().iter().map(|a| a.norm_sqr()).collect();
    let mean: f64 = p.iter().zip(&w).map(|(p, w)| p * w).sum();
    let var: f64 = p.iter().zip(&w).map(|(p, w)| p * (w - mean).powi(2)).sum();
    4.0 * t * t * var.max(0.0)
}

/// Hermitian `L` with `d rho = (L rho + rho L) / 2` on the support of `rho`.
#[derive(Clone, Debug)]
pub struct SLDOperator {
    pub matrix: ComplexMatrix,
    pub eigen: HermitianEigenSystem,
    /// Number of ordered eigenvalue pairs `(a, b)` with `l_a + l_b` above the threshold.
    pub support_dim: usize,
    /// `2 sum |<a|d rho|b>|^2 / (l_a + l_b)` over the support.
    pub qfi: f64,
}

/// Support threshold `SUPPORT * Tr rho`.
fn support_threshold(rho: &ComplexMatrix) -> f64 {
    tol::SUPPORT * rho.trace().re.abs()
}

pub fn sld(rho: &DensityMatrix, drho: &ComplexMatrix) -> Result<SLDOperator> {
    sld_with_threshold(rho, drho, None)
}

/// As [`sld`] with an explicit absolute support threshold.
pub fn sld_with_threshold(
    rho: &DensityMatrix,
    drho: &ComplexMatrix,
    threshold: Option<f64>,
) -> Result<SLDOperator> {
    if rho.basis() != Basis::Computational {
        return sld_with_threshold(&rho.to_computational(), drho, threshold);
    }
    let r = rho.matrix();
    if drho.rows() != r.rows() || drho.cols() != r.cols() {
        return Err(Error::DimensionMismatch(
            "rho and d rho differ in shape".into(),
        ));
    }
    let eps = threshold.unwrap_or_else(|| support_threshold(r));
    let sys = hermitian_eig(r)?;
    let v = &sys.eigenvectors;
    let d = v.adjoint().matmul(&drho.hermitian_part()).matmul(v);
    let n = sys.dim();
    let mut l_eig = ComplexMatrix::zeros(n, n);
    let mut qfi = 0.0;
    let mut support_dim = 0;
    for a in 0..n {
        for b in 0..n {
            let s = sys.eigenvalues[a] + sys.eigenvalues[b];
            if s > eps {
                support_dim += 1;
                l_eig[(a, b)] = d[(a, b)] * (2.0 / s);
                qfi += 2.0 * d[(a, b)].norm_sqr() / s;
            }
        }
    }
    let matrix = v.matmul(&l_eig).matmul(&v.adjoint()).hermitian_part();
    let eigen = hermitian_eig(&matrix)?;
    Ok(SLDOperator {
        matrix,
        eigen,
        support_dim,
        qfi,
    })
}

/// `2 sum_{l_a + l_b > eps} |<a|d rho|b>|^2 / (l_a + l_b)`; zero when nothing is supported.
pub fn qfi_mixed(rho: &DensityMatrix, drho: &ComplexMatrix) -> Result<f64> {
    Ok(sld(rho, drho)?.qfi)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SldEigen {
    pub eigenvalue: f64,
    pub concurrence: f64,
    /// Member of a degenerate cluster; the individual vector is basis dependent.
    pub degenerate: bool,
}

/// Concurrence of each SLD eigenvector, eigenvalues ascending.
pub fn sld_eigen_concurrences(l: &SLDOperator) -> Vec<SldEigen> {
    let sys = &l.eigen;
    let mut out = Vec::with_capacity(sys.dim());
    for cluster in sys.clusters(tol::DEGENERACY_GAP) {
        let degenerate = cluster.len() > 1;
        for k in cluster {
            let v = sys.vector(k);
            let s = PureState::normalized([v[0], v[1], v[2], v[3]], Basis::Computational)
                .expect("eigenvectors are normalized");
            out.push(SldEigen {
                eigenvalue: sys.eigenvalues[k],
                concurrence: concurrence_pure(&s),
                degenerate,
            });
        }
    }
    out
}

/// Concurrences of eigenvectors with `|eigenvalue| > SLD_NONZERO`, ascending by eigenvalue.
pub fn nonzero_sld_concurrences(l: &SLDOperator) -> Vec<f64> {
    sld_eigen_concurrences(l)
        .into_iter()
        .filter(|e| e.eigenvalue.abs() > tol::SLD_NONZERO)
        .map(|e| e.concurrence)
        .collect()
}

/// `Tr(rho L)`, zero for a valid SLD.
pub fn sld_mean(rho: &DensityMatrix, l: &SLDOperator) -> C64 {
    rho.to_computational().matrix().matmul(&l.matrix).trace()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrology::probe::{AnalyticOpenProbe, ClosedProbe, Probe};
    use crate::metrology::DerivativeConfig;
    use crate::states::{named_state, random_pure_state, NamedState};

    fn flip_flop() -> CanonicalHamiltonian {
        CanonicalHamiltonian::flip_flop(1.0, 1.0)
    }

    #[test]
    fn pure_qfi_reference_values() {
        let ch = flip_flop();
        assert!(
            (qfi_pure(&named_state(NamedState::PsiOpt).unwrap(), &ch, 1.0) - 4.0).abs() < 1e-14
        );
        assert!(
            (qfi_pure(&named_state(NamedState::PsiAlpha(0.3)).unwrap(), &ch, 1.0) - 1.3104).abs()
                < 1e-14
        );
        let bell = PureState::new(
            [
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
            ],
            Basis::Bell,
        )
        .unwrap();
        assert_eq!(qfi_pure(&bell, &ch, 3.0), 0.0);
    }

    #[test]
    fn zero_derivative_gives_zero() {
        let rho = random_pure_state(2).density();
        assert_eq!(qfi_mixed(&rho, &ComplexMatrix::zeros(4, 4)).unwrap(), 0.0);
    }

    #[test]
    fn open_reference_values() {
        let cfg = DerivativeConfig::default();
        let p = AnalyticOpenProbe::separable(0.5).unwrap();
        let f = qfi_mixed(
            &p.density(1.0, 1.0).unwrap(),
            &p.drho(1.0, 1.0, &cfg).unwrap(),
        )
        .unwrap();
        assert!((f - 4.0 * (-0.5f64).exp()).abs() < 1e-8, "{f}");
        let p = AnalyticOpenProbe::entangled(0.25, 0.5).unwrap();
        let t = 1.3;
        let f = qfi_mixed(&p.density(1.0, t).unwrap(), &p.drho(1.0, t, &cfg).unwrap()).unwrap();
        let expected = 4.0 * t * t * (-0.5 * t).exp() * 0.765625;
        assert!((f - expected).abs() < 1e-8 * expected);
    }

    #[test]
    fn psi_opt_sld_matrix() {
        // Exact: L = 2 d rho, whose central block is
        // [[-2t sin 2gt, 2it cos 2gt], [-2it cos 2gt, 2t sin 2gt]] with eta_xy = 1.
        let p = ClosedProbe::new(flip_flop(), named_state(NamedState::PsiOpt).unwrap());
        let (g, t) = (1.0, 0.9);
        let l = sld(
            &p.density(g, t).unwrap(),
            &p.drho(g, t, &DerivativeConfig::default()).unwrap(),
        )
        .unwrap();
        let (s, c) = (2.0 * g * t).sin_cos();
        let mut expected = ComplexMatrix::zeros(4, 4);
        expected[(1, 1)] = C64::new(-2.0 * t * s, 0.0);
        expected[(2, 2)] = C64::new(2.0 * t * s, 0.0);
        expected[(1, 2)] = C64::new(0.0, 2.0 * t * c);
        expected[(2, 1)] = C64::new(0.0, -2.0 * t * c);
        assert!(l.matrix.max_abs_diff(&expected) < 1e-12);

        // Diagonal where sin(2gt) = 1.
        let t = std::f64::consts::FRAC_PI_4;
        let l = sld(
            &p.density(g, t).unwrap(),
            &p.drho(g, t, &DerivativeConfig::default()).unwrap(),
        )
        .unwrap();
        assert!(l.matrix[(1, 2)].norm() < 1e-12);
        assert!(nonzero_sld_concurrences(&l).iter().all(|&c| c < 1e-12));
    }

    #[test]
    fn psi_alpha_sld_is_rescaled_psi_opt_sld() {
        let (g, t, alpha) = (1.0, 1.4, 0.3);
        let cfg = DerivativeConfig::default();
        let a = ClosedProbe::new(
            flip_flop(),
            named_state(NamedState::PsiAlpha(alpha)).unwrap(),
        );
        let o = ClosedProbe::new(flip_flop(), named_state(NamedState::PsiOpt).unwrap());
        let la = sld(&a.density(g, t).unwrap(), &a.drho(g, t, &cfg).unwrap()).unwrap();
        let lo = sld(&o.density(g, t).unwrap(), &o.drho(g, t, &cfg).unwrap()).unwrap();
        let k = 2.0 * alpha * (1.0 - alpha * alpha).sqrt();
        assert!(la.matrix.max_abs_diff(&lo.matrix.scale_real(k)) < 1e-12);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(100))]

            #[test]
            fn mixed_matches_pure_and_sld_consistent(seed in any::<u64>(), t in 0.1f64..4.0, g in 0.2f64..2.0) {
                let ch = CanonicalHamiltonian::diagonal(0.8, 0.35, -0.5, g);
                let s0 = random_pure_state(seed);
                let p = ClosedProbe::new(ch.clone(), s0.clone());
                let rho = p.density(g, t).unwrap();
                let d = p.drho(g, t, &DerivativeConfig::default()).unwrap();
                let l = sld(&rho, &d).unwrap();
                let fp = qfi_pure(&s0, &ch, t);
                prop_assert!((l.qfi - fp).abs() <= 1e-6 * fp.max(1e-12) + 1e-12);
                let tr_rl2 = rho.matrix().matmul(&l.matrix).matmul(&l.matrix).trace().re;
                prop_assert!((tr_rl2 - l.qfi).abs() <= 1e-6 * l.qfi.max(1.0));
                prop_assert!(sld_mean(&rho, &l).norm() < 1e-7);
                let anti = &l.matrix.matmul(rho.matrix()) + &rho.matrix().matmul(&l.matrix);
                prop_assert!(anti.scale_real(0.5).max_abs_diff(&d) < 1e-7);
            }
        }
    }
}
