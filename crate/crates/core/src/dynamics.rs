//! Closed evolution in the Bell basis and amplitude-damped GKSL evolution.
//!
//! Superoperators use column stacking, `vec(A X B) = (B^T (x) A) vec(X)`:
//!
//! `L = -i (I (x) H - H^T (x) I) + kappa sum_j [conj(L_j) (x) L_j - (I (x) L_j^dag L_j + (L_j^dag L_j)^T (x) I) / 2]`

use std::fmt::Write as _;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::hamiltonian::{bell_eigensystem, sigma_minus, CanonicalHamiltonian};
use crate::linalg::{expm, kron, propagate_linear_grid, ComplexMatrix};
use crate::states::{Basis, DensityMatrix, PureState};
use crate::tol;

/// Equal-rate dissipation on a list of jump operators.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseSpec {
    pub kappa: f64,
    pub jump_ops: Vec<ComplexMatrix>,
}

impl NoiseSpec {
    /// `sigma_- (x) I` and `I (x) sigma_-` at rate `kappa`.
    pub fn amplitude_damping(kappa: f64) -> Result<Self> {
        Self::new(kappa, default_jumps())
    }

    pub fn new(kappa: f64, jump_ops: Vec<ComplexMatrix>) -> Result<Self> {
        if !kappa.is_finite() || kappa < 0.0 {
            return Err(invalid(
                "kappa",
                format!("must be finite and non-negative, got {kappa}"),
            ));
        }
        if jump_ops.iter().any(|l| l.rows() != 4 || l.cols() != 4) {
            return Err(Error::DimensionMismatch(
                "jump operators must be 4x4".into(),
            ));
        }
        Ok(Self { kappa, jump_ops })
    }
}

pub fn default_jumps() -> Vec<ComplexMatrix> {
    let id = ComplexMatrix::identity(2);
    vec![
        kron(&sigma_minus(), &id).expect("4x4"),
        kron(&id, &sigma_minus()).expect("4x4"),
    ]
}

/// 16x16 generator acting on column-stacked density matrices.
pub fn liouvillian(h: &ComplexMatrix, noise: &NoiseSpec) -> ComplexMatrix {
    let n = h.rows();
    let id = ComplexMatrix::identity(n);
    let mi = C64::new(0.0, -1.0);
    let mut l =
        (&kron(&id, h).expect("16x16") - &kron(&h.transpose(), &id).expect("16x16")).scale(mi);
    if noise.kappa > 0.0 {
        for j in &noise.jump_ops {
            let ldl = j.adjoint().matmul(j);
            let d = &(&kron(&j.conj(), j).expect("16x16")
                - &kron(&id, &ldl).expect("16x16").scale_real(0.5))
                - &kron(&ldl.transpose(), &id).expect("16x16").scale_real(0.5);
            l = &l + &d.scale_real(noise.kappa);
        }
    }
    l
}

/// `e^{-i g omega_ab t}` applied to the Bell amplitudes; the result keeps the input's basis tag.
pub fn evolve_closed(s0: &PureState, ch: &CanonicalHamiltonian, g: f64, t: f64) -> PureState {
    let omegas = bell_eigensystem(ch).omegas;
    let b = s0.to_bell();
    let mut a = *b.amplitudes();
    for (x, w) in a.iter_mut().zip(omegas) {
        *x *= C64::from_polar(1.0, -g * w * t);
    }
    let out = PureState::normalized(a, Basis::Bell).expect("unitary evolution keeps the norm");
    match s0.basis() {
        Basis::Bell => out,
        Basis::Computational => out.to_computational(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Dormand-Prince 5(4) with local error control.
    Adaptive,
    /// Matrix exponential of the generator; smooth in the parameters.
    Expm,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolveConfig {
    pub tol: f64,
    pub method: Method,
}

impl Default for EvolveConfig {
    fn default() -> Self {
        Self {
            tol: tol::INTEGRATOR,
            method: Method::Adaptive,
        }
    }
}

impl EvolveConfig {
    pub fn expm() -> Self {
        Self {
            method: Method::Expm,
            ..Self::default()
        }
    }
}

/// Open evolution under the canonical Hamiltonian `g sum eta_k sigma_k sigma_k`.
pub fn evolve_open(
    rho0: &DensityMatrix,
    ch: &CanonicalHamiltonian,
    noise: &NoiseSpec,
    g: f64,
    t: f64,
    cfg: &EvolveConfig,
) -> Result<DensityMatrix> {
    let mut v = evolve_open_grid(rho0, &ch.matrix(g), noise, &[t], cfg)?;
    Ok(v.pop().expect("one time point"))
}

/// Open evolution under an explicit 4x4 Hamiltonian in the computational
/// basis, sampled on an ascending time grid.
pub fn evolve_open_grid(
    rho0: &DensityMatrix,
    h: &ComplexMatrix,
    noise: &NoiseSpec,
    times: &[f64],
    cfg: &EvolveConfig,
) -> Result<Vec<DensityMatrix>> {
    if !h.is_hermitian(tol::HERMITIAN_TAG * h.max_abs().max(1.0)) {
        return Err(Error::NotHermitian {
            deviation: h.hermiticity_deviation(),
            tolerance: tol::HERMITIAN_TAG,
        });
    }
    let l = liouvillian(h, noise);
    let v0 = rho0.to_computational().matrix().vectorize();
    let raw = match cfg.method {
        Method::Adaptive => propagate_linear_grid(&l, &v0, times, cfg.tol)?,
        Method::Expm => {
            if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
                return Err(invalid("t", "times must be finite and non-negative"));
            }
            times
                .iter()
                .map(|&t| expm(&l.scale_real(t)).matvec(&v0))
                .collect()
        }
    };
    raw.into_iter()
        .map(|v| {
            let m = ComplexMatrix::unvectorize(&v, 4, 4)?;
            Ok(DensityMatrix::from_raw(m, Basis::Computational))
        })
        .collect()
}

/// `e rho_pure(t) + (1 - e) |11><11|` with `e = exp(-kappa t)` and
/// `rho_pure` the flip-flop evolution (`eta_xy = 1`) of `a |01> + b |10>`.
fn damped_single_excitation(a: f64, b: f64, g: f64, kappa: f64, t: f64) -> DensityMatrix {
    let e = (-kappa * t).exp();
    let (s, c) = (g * t).sin_cos();
    let p01 = C64::new(a * c, -b * s);
    let p10 = C64::new(b * c, -a * s);
    let mut rho = ComplexMatrix::zeros(4, 4);
    rho[(1, 1)] = C64::new(e * p01.norm_sqr(), 0.0);
    rho[(2, 2)] = C64::new(e * p10.norm_sqr(), 0.0);
    rho[(1, 2)] = p01 * p10.conj() * e;
    rho[(2, 1)] = rho[(1, 2)].conj();
    rho[(3, 3)] = C64::new(1.0 - e, 0.0);
    DensityMatrix::from_raw(rho, Basis::Computational)
}

/// Flip-flop (`eta_xy = 1`) amplitude-damped evolution of `|01><01|`:
/// `rho_01,01 = e cos^2(gt)`, `rho_10,10 = e sin^2(gt)`,
/// `rho_01,10 = i e sin(2gt) / 2`, `rho_11,11 = 1 - e`.
pub fn analytic_open_separable(g: f64, kappa: f64, t: f64) -> DensityMatrix {
    damped_single_excitation(1.0, 0.0, g, kappa, t)
}

/// Same dynamics for `alpha |01> + sqrt(1 - alpha^2) |10>`:
/// `rho_01,01 = (e/2)[1 - (1 - 2 alpha^2) cos 2gt]`,
/// `rho_10,10 = (e/2)[1 + (1 - 2 alpha^2) cos 2gt]`,
/// `rho_01,10 = (e/2)[2 alpha beta + i (2 alpha^2 - 1) sin 2gt]`, `rho_11,11 = 1 - e`.
pub fn analytic_open_entangled(alpha: f64, g: f64, kappa: f64, t: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(invalid("alpha", format!("must lie in [0, 1], got {alpha}")));
    }
    Ok(damped_single_excitation(
        alpha,
        (1.0 - alpha * alpha).sqrt(),
        g,
        kappa,
        t,
    ))
}

/// `L' = (u1 (x) u2)^dag L (u1 (x) u2)`: jump operators of the canonical frame
/// expressed in the original frame.
pub fn rotate_jump_operators(
    u1: &ComplexMatrix,
    u2: &ComplexMatrix,
    jumps: &[ComplexMatrix],
) -> Result<Vec<ComplexMatrix>> {
    let k = kron(u1, u2)?;
    let kd = k.adjoint();
    Ok(jumps.iter().map(|l| kd.matmul(l).matmul(&k)).collect())
}

/// Amplitude damping of the original qubits, written in the canonical frame
/// of `ch`: `L' = K L K^dag` with `K = u1 (x) u2`.
pub fn canonical_frame_damping(kappa: f64, ch: &CanonicalHamiltonian) -> Result<NoiseSpec> {
    let jumps = rotate_jump_operators(&ch.u1.adjoint(), &ch.u2.adjoint(), &default_jumps())?;
    NoiseSpec::new(kappa, jumps)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ClosedAnalytic,
    OpenIntegrated,
    OpenAnalytic,
}

#[derive(Clone, Debug, PartialEq)]
pub enum TrajectoryState {
    Pure(PureState),
    Mixed(DensityMatrix),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub g: f64,
    pub states: Vec<TrajectoryState>,
    pub provenance: Provenance,
}

impl Trajectory {
    pub fn new(
        times: Vec<f64>,
        g: f64,
        states: Vec<TrajectoryState>,
        provenance: Provenance,
    ) -> Result<Self> {
        if times.len() != states.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} times for {} states",
                times.len(),
                states.len()
            )));
        }
        if times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("t", "time grid must be strictly increasing"));
        }
        Ok(Self {
            times,
            g,
            states,
            provenance,
        })
    }

    pub fn closed(
        s0: &PureState,
        ch: &CanonicalHamiltonian,
        g: f64,
        times: Vec<f64>,
    ) -> Result<Self> {
        let states = times
            .iter()
            .map(|&t| TrajectoryState::Pure(evolve_closed(s0, ch, g, t)))
            .collect();
        Self::new(times, g, states, Provenance::ClosedAnalytic)
    }

    pub fn open(
        rho0: &DensityMatrix,
        ch: &CanonicalHamiltonian,
        noise: &NoiseSpec,
        g: f64,
        times: Vec<f64>,
        cfg: &EvolveConfig,
    ) -> Result<Self> {
        let states = evolve_open_grid(rho0, &ch.matrix(g), noise, &times, cfg)?
            .into_iter()
            .map(TrajectoryState::Mixed)
            .collect();
        Self::new(times, g, states, Provenance::OpenIntegrated)
    }

    /// Columns `t, g`, then interleaved real/imaginary parts of the state
    /// (4 amplitudes, or 16 row-major matrix entries) in the computational basis.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,g");
        let mixed = matches!(self.states.first(), Some(TrajectoryState::Mixed(_)));
        if mixed {
            for i in 0..4 {
                for j in 0..4 {
                    let _ = write!(out, ",rho{i}{j}_re,rho{i}{j}_im");
                }
            }
        } else {
            for k in 0..4 {
                let _ = write!(out, ",a{k}_re,a{k}_im");
            }
        }
        out.push('\n');
        for (t, s) in self.times.iter().zip(&self.states) {
            let _ = write!(out, "{t},{}", self.g);
            let payload: Vec<C64> = match s {
                TrajectoryState::Pure(p) => p.to_computational().amplitudes().to_vec(),
                TrajectoryState::Mixed(d) => d.to_computational().matrix().as_slice().to_vec(),
            };
            for z in payload {
                let _ = write!(out, ",{},{}", z.re, z.im);
            }
            out.push('\n');
        }
        out
    }
}
