//! Two-qubit states, concurrence, fidelity and random sampling.
//!
//! Computational basis order is `|00>, |01>, |10>, |11>` (index `2m + n`).
//! Bell basis order is `beta_00, beta_01, beta_10, beta_11`.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::hamiltonian::{bell_matrix, sigma_y};
use crate::linalg::{clamp_floor, hermitian_eig, kron, psd_sqrt, ComplexMatrix};
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    Computational,
    Bell,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: [C64; 4],
    basis: Basis,
}

impl PureState {
    pub fn new(amplitudes: [C64; 4], basis: Basis) -> Result<Self> {
        let n: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !n.is_finite() || (n - 1.0).abs() > tol::STATE_NORM {
            return Err(Error::InvalidState(format!("norm {n} differs from 1")));
        }
        Ok(Self { amplitudes, basis })
    }

    /// Normalizes `amplitudes` first; fails only on a zero or non-finite vector.
    pub fn normalized(amplitudes: [C64; 4], basis: Basis) -> Result<Self> {
        let n: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        Ok(Self {
            amplitudes: amplitudes.map(|a| a / n),
            basis,
        })
    }

    pub fn computational(index: usize) -> Self {
        let mut a = [C64::new(0.0, 0.0); 4];
        a[index] = C64::new(1.0, 0.0);
        Self {
            amplitudes: a,
            basis: Basis::Computational,
        }
    }

    pub fn amplitudes(&self) -> &[C64; 4] {
        &self.amplitudes
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn to_bell(&self) -> Self {
        match self.basis {
            Basis::Bell => self.clone(),
            Basis::Computational => Self {
                amplitudes: to_array(&bell_matrix().adjoint().matvec(&self.amplitudes)),
                basis: Basis::Bell,
            },
        }
    }

    pub fn to_computational(&self) -> Self {
        match self.basis {
            Basis::Computational => self.clone(),
            Basis::Bell => Self {
                amplitudes: to_array(&bell_matrix().matvec(&self.amplitudes)),
                basis: Basis::Computational,
            },
        }
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix {
            rho: ComplexMatrix::outer(&self.amplitudes, &self.amplitudes),
            basis: self.basis,
        }
    }

    /// `|<self|other>|^2`, comparing in the computational basis.
    pub fn overlap_sqr(&self, other: &PureState) -> f64 {
        let a = self.to_computational();
        let b = other.to_computational();
        crate::linalg::inner(&a.amplitudes, &b.amplitudes).norm_sqr()
    }
}

fn to_array(v: &[C64]) -> [C64; 4] {
    [v[0], v[1], v[2], v[3]]
}

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    rho: ComplexMatrix,
    basis: Basis,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and the eigenvalue floor. Eigenvalues
    /// in `[DENSITY_MIN_EIGENVALUE, 0)` are clamped to zero; see [`Self::repair`].
    pub fn new(rho: ComplexMatrix, basis: Basis) -> Result<Self> {
        Self::repair(rho, basis).map(|(d, _)| d)
    }

    /// Like [`Self::new`] but also returns the total magnitude of clamped
    /// negative eigenvalues.
    pub fn repair(rho: ComplexMatrix, basis: Basis) -> Result<(Self, f64)> {
        if rho.rows() != 4 || rho.cols() != 4 {
            return Err(Error::DimensionMismatch(format!(
                "density matrix must be 4x4, got {}x{}",
                rho.rows(),
                rho.cols()
            )));
        }
        let dev = rho.hermiticity_deviation();
        if dev > tol::DENSITY_STRUCTURE {
            return Err(Error::InvalidState(format!(
                "not Hermitian, deviation {dev:.3e}"
            )));
        }
        let tr = rho.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > tol::DENSITY_STRUCTURE {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let rho = rho.hermitian_part();
        let sys = hermitian_eig(&rho)?;
        let min = sys.eigenvalues[0];
        if min < tol::DENSITY_MIN_EIGENVALUE {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        if min >= 0.0 {
            return Ok((Self { rho, basis }, 0.0));
        }
        let clamped: f64 = sys
            .eigenvalues
            .iter()
            .filter(|&&x| x < 0.0)
            .map(|x| -x)
            .sum();
        let total: f64 = sys.eigenvalues.iter().map(|&x| x.max(0.0)).sum();
        let fixed = sys.apply(|x| x.max(0.0) / total);
        Ok((Self { rho: fixed, basis }, clamped))
    }

    /// Wraps a matrix without validation, only Hermitian symmetrization.
    pub(crate) fn from_raw(rho: ComplexMatrix, basis: Basis) -> Self {
        Self {
            rho: rho.hermitian_part(),
            basis,
        }
    }

    pub fn maximally_mixed() -> Self {
        Self {
            rho: ComplexMatrix::identity(4).scale_real(0.25),
            basis: Basis::Computational,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.rho
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn purity(&self) -> f64 {
        self.rho.matmul(&self.rho).trace().re
    }

    pub fn to_bell(&self) -> Self {
        match self.basis {
            Basis::Bell => self.clone(),
            Basis::Computational => {
                let b = bell_matrix();
                Self {
                    rho: b.adjoint().matmul(&self.rho).matmul(&b),
                    basis: Basis::Bell,
                }
            }
        }
    }

    pub fn to_computational(&self) -> Self {
        match self.basis {
            Basis::Computational => self.clone(),
            Basis::Bell => {
                let b = bell_matrix();
                Self {
                    rho: b.matmul(&self.rho).matmul(&b.adjoint()),
                    basis: Basis::Computational,
                }
            }
        }
    }
}

/// `2 |a00 a11 - a01 a10|`.
pub fn concurrence_pure(s: &PureState) -> f64 {
    let a = s.to_computational().amplitudes;
    (2.0 * (a[0] * a[3] - a[1] * a[2]).norm()).min(1.0)
}

/// Wootters concurrence `max(0, l1 - l2 - l3 - l4)`, with `l_i` the
/// eigenvalues of `sqrt(sqrt(rho) rho~ sqrt(rho))`, descending.
pub fn concurrence_mixed(d: &DensityMatrix) -> f64 {
    let rho = d.to_computational().rho;
    let yy = kron(&sigma_y(), &sigma_y()).expect("4x4");
    let tilde = yy.matmul(&rho.conj()).matmul(&yy);
    let Ok(s) = psd_sqrt(&rho) else { return 0.0 };
    let inner = s.matmul(&tilde).matmul(&s).hermitian_part();
    let Ok(sys) = hermitian_eig(&inner) else {
        return 0.0;
    };
    let floor = clamp_floor(&sys.eigenvalues);
    let mut l: Vec<f64> = sys
        .eigenvalues
        .iter()
        .map(|&x| if x > floor { x.sqrt() } else { 0.0 })
        .collect();
    l.sort_by(|a, b| b.total_cmp(a));
    (l[0] - l[1] - l[2] - l[3]).clamp(0.0, 1.0)
}

/// `[Tr sqrt(sqrt(sigma) chi sqrt(sigma))]^2`.
pub fn uhlmann_fidelity(sigma: &DensityMatrix, chi: &DensityMatrix) -> f64 {
    let a = sigma.to_computational().rho;
    let b = chi.to_computational().rho;
    let Ok(s) = psd_sqrt(&a) else { return 0.0 };
    let inner = s.matmul(&b).matmul(&s).hermitian_part();
    let Ok(sys) = hermitian_eig(&inner) else {
        return 0.0;
    };
    let floor = clamp_floor(&sys.eigenvalues);
    let tr: f64 = sys
        .eigenvalues
        .iter()
        .map(|&x| if x > floor { x.sqrt() } else { 0.0 })
        .sum();
    (tr * tr).min(1.0)
}

/// `sqrt(2 (1 - sqrt(F_U)))`.
pub fn bures_distance(sigma: &DensityMatrix, chi: &DensityMatrix) -> f64 {
    (2.0 * (1.0 - uhlmann_fidelity(sigma, chi).sqrt()))
        .max(0.0)
        .sqrt()
}

/// Initial-state families used throughout.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "alpha", rename_all = "snake_case")]
pub enum NamedState {
    /// `|01>`.
    PsiOpt,
    /// `alpha |beta_01> + sqrt(1 - alpha^2) |beta_11>`.
    PsiAlpha(f64),
    /// `(alpha |0> + sqrt(1 - alpha^2) |1>) (x) |1>`.
    PhiAlpha(f64),
    /// `alpha |01> + sqrt(1 - alpha^2) |10>`.
    PsiEAlpha(f64),
}

impl NamedState {
    pub fn parse(family: &str, alpha: Option<f64>) -> Result<Self> {
        let need =
            |a: Option<f64>| a.ok_or_else(|| invalid("alpha", format!("required by `{family}`")));
        match family {
            "psi_opt" => Ok(Self::PsiOpt),
            "psi_alpha" => Ok(Self::PsiAlpha(need(alpha)?)),
            "phi_alpha" => Ok(Self::PhiAlpha(need(alpha)?)),
            "psi_e_alpha" => Ok(Self::PsiEAlpha(need(alpha)?)),
            other => Err(Error::UnknownFamily(other.to_string())),
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match *self {
            Self::PsiOpt => None,
            Self::PsiAlpha(a) | Self::PhiAlpha(a) | Self::PsiEAlpha(a) => Some(a),
        }
    }
}

pub fn named_state(family: NamedState) -> Result<PureState> {
    if let Some(a) = family.alpha() {
        if !(0.0..=1.0).contains(&a) {
            return Err(invalid("alpha", format!("must lie in [0, 1], got {a}")));
        }
    }
    let c = |x: f64| C64::new(x, 0.0);
    let z = c(0.0);
    let s = PureState {
        amplitudes: match family {
            NamedState::PsiOpt => [z, c(1.0), z, z],
            NamedState::PsiAlpha(a) => {
                let b = (1.0 - a * a).sqrt();
                return Ok(PureState {
                    amplitudes: [z, c(a), z, c(b)],
                    basis: Basis::Bell,
                });
            }
            NamedState::PhiAlpha(a) => [z, c(a), z, c((1.0 - a * a).sqrt())],
            NamedState::PsiEAlpha(a) => [z, c(a), c((1.0 - a * a).sqrt()), z],
        },
        basis: Basis::Computational,
    };
    Ok(s)
}

/// SplitMix64 step; used to derive independent stream seeds.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for sub-stream `index` of `seed`.
pub fn split_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index.wrapping_add(0x5851_F42D_4C95_7F2D)))
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_vector<R: Rng>(rng: &mut R, n: usize) -> Vec<C64> {
    (0..n)
        .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect()
}

/// Haar-random pure state drawn with `rng`.
pub fn random_pure_state_with<R: Rng>(rng: &mut R, basis: Basis) -> PureState {
    loop {
        let v = gaussian_vector(rng, 4);
        if let Ok(s) = PureState::normalized(to_array(&v), basis) {
            return s;
        }
    }
}

pub fn random_pure_state(seed: u64) -> PureState {
    random_pure_state_with(&mut rng_from_seed(seed), Basis::Computational)
}

/// Reduced state of a Haar-random vector on `C^4 (x) C^rank`.
pub fn random_density_matrix(seed: u64, rank: usize) -> Result<DensityMatrix> {
    if !(1..=4).contains(&rank) {
        return Err(invalid("rank", format!("must be in 1..=4, got {rank}")));
    }
    let mut rng = rng_from_seed(seed);
    let v = gaussian_vector(&mut rng, 4 * rank);
    let n = crate::linalg::norm(&v);
    let mut rho = ComplexMatrix::zeros(4, 4);
    for i in 0..4 {
        for j in 0..4 {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..rank {
                acc += v[i * rank + k] * v[j * rank + k].conj();
            }
            rho[(i, j)] = acc / (n * n);
        }
    }
    DensityMatrix::new(rho, Basis::Computational)
}

/// Haar-random 2x2 unitary with unit determinant.
pub fn random_su2<R: Rng>(rng: &mut R) -> ComplexMatrix {
    let q: Vec<f64> = (0..4).map(|_| rng.sample(StandardNormal)).collect();
    let n = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    let (w, x, y, z) = (q[0] / n, q[1] / n, q[2] / n, q[3] / n);
    ComplexMatrix::from_rows([
        [C64::new(w, -z), C64::new(-y, -x)],
        [C64::new(y, -x), C64::new(w, z)],
    ])
}

#[derive(Serialize, Deserialize)]
struct StateRecord {
    basis: Basis,
    kind: String,
    data: Vec<f64>,
}

fn interleave(z: &[C64]) -> Vec<f64> {
    z.iter().flat_map(|c| [c.re, c.im]).collect()
}

fn deinterleave(x: &[f64]) -> Vec<C64> {
    x.chunks(2).map(|p| C64::new(p[0], p[1])).collect()
}

impl PureState {
    /// One-line JSON: basis tag and 8 interleaved reals.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(&StateRecord {
            basis: self.basis,
            kind: "pure".into(),
            data: interleave(&self.amplitudes),
        })
        .expect("serializable")
    }

    pub fn from_json_line(line: &str) -> Result<Self> {
        let r: StateRecord =
            serde_json::from_str(line).map_err(|e| Error::InvalidState(e.to_string()))?;
        if r.kind != "pure" || r.data.len() != 8 {
            return Err(Error::InvalidState(
                "expected a pure state with 8 reals".into(),
            ));
        }
        Self::new(to_array(&deinterleave(&r.data)), r.basis)
    }
}

impl DensityMatrix {
    /// One-line JSON: basis tag and 32 interleaved reals, row-major.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(&StateRecord {
            basis: self.basis,
            kind: "mixed".into(),
            data: interleave(self.rho.as_slice()),
        })
        .expect("serializable")
    }

    pub fn from_json_line(line: &str) -> Result<Self> {
        let r: StateRecord =
            serde_json::from_str(line).map_err(|e| Error::InvalidState(e.to_string()))?;
        if r.kind != "mixed" || r.data.len() != 32 {
            return Err(Error::InvalidState(
                "expected a mixed state with 32 reals".into(),
            ));
        }
        Self::new(
            ComplexMatrix::from_vec(4, 4, deinterleave(&r.data))?,
            r.basis,
        )
    }
}
