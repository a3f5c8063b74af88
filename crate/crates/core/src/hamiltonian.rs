//! Two-qubit interaction Hamiltonians and their anisotropic-Heisenberg form.
//!
//! A generic interaction `g * sum_jk eta_jk sigma_j (x) sigma_k` is reduced by
//! a signed SVD of `eta` to `g * sum_k eta_k sigma_k (x) sigma_k`. The two
//! rotation factors are lifted to local SU(2) unitaries `u1`, `u2` such that
//! `(u1 (x) u2) H (u1 (x) u2)^dagger` is the canonical form. Its eigenvectors
//! are the Bell states with frequencies `omega_ab`.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::{det3, kron, mat3_mul, svd3, transpose3, ComplexMatrix, Mat3, IDENTITY3};
use crate::tol;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

pub fn sigma_x() -> ComplexMatrix {
    ComplexMatrix::from_rows([[ZERO, ONE], [ONE, ZERO]])
}

pub fn sigma_y() -> ComplexMatrix {
    ComplexMatrix::from_rows([[ZERO, -I], [I, ZERO]])
}

pub fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::from_rows([[ONE, ZERO], [ZERO, -ONE]])
}

/// `(sigma_x - i sigma_y) / 2 = |1><0|`; drives a qubit to its ground state `|1>`.
pub fn sigma_minus() -> ComplexMatrix {
    ComplexMatrix::from_rows([[ZERO, ZERO], [ONE, ZERO]])
}

/// `(sigma_x + i sigma_y) / 2 = |0><1|`.
pub fn sigma_plus() -> ComplexMatrix {
    ComplexMatrix::from_rows([[ZERO, ONE], [ZERO, ZERO]])
}

pub fn paulis() -> [ComplexMatrix; 3] {
    [sigma_x(), sigma_y(), sigma_z()]
}

/// Real 3x3 coupling coefficients and the scalar coupling `g`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplingMatrix {
    pub eta: Mat3,
    pub g: f64,
}

impl CouplingMatrix {
    pub fn new(eta: Mat3, g: f64) -> Result<Self> {
        if !eta.iter().flatten().all(|x| x.is_finite()) {
            return Err(invalid("eta", "entries must be finite"));
        }
        if !g.is_finite() {
            return Err(invalid("g", "must be finite"));
        }
        Ok(Self { eta, g })
    }

    /// `g * eta_xy (s+ s- + s- s+)`, i.e. `eta = diag(eta_xy/2, eta_xy/2, 0)`.
    pub fn flip_flop(eta_xy: f64, g: f64) -> Result<Self> {
        Self::heisenberg(eta_xy / 2.0, eta_xy / 2.0, 0.0, g)
    }

    pub fn heisenberg(eta_x: f64, eta_y: f64, eta_z: f64, g: f64) -> Result<Self> {
        Self::new([[eta_x, 0.0, 0.0], [0.0, eta_y, 0.0], [0.0, 0.0, eta_z]], g)
    }

    /// `g (eta_xy sx sy + eta_yz sy sz + eta_zx sz sx)`.
    pub fn permutation(eta_xy: f64, eta_yz: f64, eta_zx: f64, g: f64) -> Result<Self> {
        Self::new(
            [[0.0, eta_xy, 0.0], [0.0, 0.0, eta_yz], [eta_zx, 0.0, 0.0]],
            g,
        )
    }
}

/// Nine reals, row-major, separated by whitespace and/or commas.
pub fn parse_eta(text: &str) -> Result<Mat3> {
    let vals: Vec<f64> = text
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| invalid("eta", format!("`{t}` is not a number")))
        })
        .collect::<Result<_>>()?;
    if vals.len() != 9 {
        return Err(invalid(
            "eta",
            format!("expected 9 entries, got {}", vals.len()),
        ));
    }
    Ok([
        [vals[0], vals[1], vals[2]],
        [vals[3], vals[4], vals[5]],
        [vals[6], vals[7], vals[8]],
    ])
}

/// `g * sum_jk eta_jk sigma_j (x) sigma_k` as a 4x4 Hermitian matrix.
pub fn build_matrix(cm: &CouplingMatrix) -> ComplexMatrix {
    let p = paulis();
    let mut h = ComplexMatrix::zeros(4, 4);
    for j in 0..3 {
        for k in 0..3 {
            let c = cm.eta[j][k] * cm.g;
            if c != 0.0 {
                h = &h + &kron(&p[j], &p[k]).expect("4x4").scale_real(c);
            }
        }
    }
    h
}

/// Anisotropic-Heisenberg form with the local unitaries that produce it.
#[derive(Clone, Debug, PartialEq)]
pub struct CanonicalHamiltonian {
    /// `(eta_x, eta_y, eta_z)`, descending.
    pub eta: [f64; 3],
    pub u1: ComplexMatrix,
    pub u2: ComplexMatrix,
    pub g: f64,
}

impl CanonicalHamiltonian {
    /// Canonical form given directly, with identity frame.
    pub fn diagonal(eta_x: f64, eta_y: f64, eta_z: f64, g: f64) -> Self {
        Self {
            eta: [eta_x, eta_y, eta_z],
            u1: ComplexMatrix::identity(2),
            u2: ComplexMatrix::identity(2),
            g,
        }
    }

    pub fn flip_flop(eta_xy: f64, g: f64) -> Self {
        Self::diagonal(eta_xy / 2.0, eta_xy / 2.0, 0.0, g)
    }

    /// `sum_k eta_k sigma_k (x) sigma_k`, the generator per unit `g`.
    pub fn generator(&self) -> ComplexMatrix {
        build_matrix(&CouplingMatrix {
            eta: [
                [self.eta[0], 0.0, 0.0],
                [0.0, self.eta[1], 0.0],
                [0.0, 0.0, self.eta[2]],
            ],
            g: 1.0,
        })
    }

    /// `g * generator()`.
    pub fn matrix(&self, g: f64) -> ComplexMatrix {
        self.generator().scale_real(g)
    }

    /// `K = u1 (x) u2`.
    pub fn local_unitary(&self) -> ComplexMatrix {
        kron(&self.u1, &self.u2).expect("4x4")
    }

    /// Max entrywise residual of `K H K^dagger - g sum eta_k sigma_k sigma_k`.
    pub fn conjugation_residual(&self, cm: &CouplingMatrix) -> f64 {
        let k = self.local_unitary();
        let rotated = k.matmul(&build_matrix(cm)).matmul(&k.adjoint());
        rotated.max_abs_diff(&self.matrix(cm.g))
    }
}

/// Reduces a coupling matrix to the anisotropic-Heisenberg form.
pub fn canonicalize(cm: &CouplingMatrix) -> Result<CanonicalHamiltonian> {
    let s = svd3(&cm.eta);

    // Descending signed order; an odd permutation gets one column negated in
    // both factors so they stay proper.
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| s.d[b].total_cmp(&s.d[a]));
    let mut p = [[0.0; 3]; 3];
    for (col, &k) in order.iter().enumerate() {
        p[k][col] = 1.0;
    }
    if det3(&p) < 0.0 {
        for row in p.iter_mut() {
            row[2] = -row[2];
        }
    }
    let u = mat3_mul(&s.u, &p);
    let v = mat3_mul(&s.v, &p);
    let eta = [s.d[order[0]], s.d[order[1]], s.d[order[2]]];

    let u1 = su2_from_so3(&u)?;
    let u2 = su2_from_so3(&v)?;
    Ok(CanonicalHamiltonian {
        eta,
        u1,
        u2,
        g: cm.g,
    })
}

/// Lifts a proper rotation `R` to `u` in SU(2) with
/// `u sigma_k u^dagger = sum_l R[k][l] sigma_l`.
///
/// The sign of `u` is fixed so its trace is real and non-negative; for
/// half-turns (zero trace) the largest axis component is made positive.
pub fn su2_from_so3(r: &Mat3) -> Result<ComplexMatrix> {
    let rtr = mat3_mul(&transpose3(r), r);
    let orthogonality = (0..3)
        .flat_map(|i| (0..3).map(move |j| (i, j)))
        .map(|(i, j)| (rtr[i][j] - IDENTITY3[i][j]).abs())
        .fold(0.0, f64::max);
    let det = det3(r);
    if orthogonality > tol::ROTATION || (det - 1.0).abs() > tol::ROTATION {
        return Err(Error::ImproperRotation { orthogonality, det });
    }

    // The contract means sigma.a -> sigma.(R^T a), so the active rotation is Q = R^T.
    let q = transpose3(r);
    let tr = q[0][0] + q[1][1] + q[2][2];
    let candidates = [
        1.0 + tr,
        1.0 + 2.0 * q[0][0] - tr,
        1.0 + 2.0 * q[1][1] - tr,
        1.0 + 2.0 * q[2][2] - tr,
    ];
    let pick = (0..4)
        .max_by(|&a, &b| candidates[a].total_cmp(&candidates[b]))
        .unwrap_or(0);
    // Quaternion (w, x, y, z) of Q; pick = 0 is the axis-angle branch, the
    // others extract the axis from the dominant column of Q + I near a half-turn.
    let (mut w, mut x, mut y, mut z);
    match pick {
        0 => {
            w = 0.5 * candidates[0].sqrt();
            x = (q[2][1] - q[1][2]) / (4.0 * w);
            y = (q[0][2] - q[2][0]) / (4.0 * w);
            z = (q[1][0] - q[0][1]) / (4.0 * w);
        }
        1 => {
            x = 0.5 * candidates[1].sqrt();
            w = (q[2][1] - q[1][2]) / (4.0 * x);
            y = (q[0][1] + q[1][0]) / (4.0 * x);
            z = (q[0][2] + q[2][0]) / (4.0 * x);
        }
        2 => {
            y = 0.5 * candidates[2].sqrt();
            w = (q[0][2] - q[2][0]) / (4.0 * y);
            x = (q[0][1] + q[1][0]) / (4.0 * y);
            z = (q[1][2] + q[2][1]) / (4.0 * y);
        }
        _ => {
            z = 0.5 * candidates[3].sqrt();
            w = (q[1][0] - q[0][1]) / (4.0 * z);
            x = (q[0][2] + q[2][0]) / (4.0 * z);
            y = (q[1][2] + q[2][1]) / (4.0 * z);
        }
    }
    let nrm = (w * w + x * x + y * y + z * z).sqrt();
    w /= nrm;
    x /= nrm;
    y /= nrm;
    z /= nrm;
    let flip = if w.abs() > 1e-14 {
        w < 0.0
    } else {
        let axis = [x, y, z];
        let k = (0..3)
            .max_by(|&a, &b| axis[a].abs().total_cmp(&axis[b].abs()))
            .unwrap_or(0);
        axis[k] < 0.0
    };
    if flip {
        w = -w;
        x = -x;
        y = -y;
        z = -z;
    }
    // u = w I - i (x sx + y sy + z sz)
    let u = ComplexMatrix::from_rows([
        [C64::new(w, -z), C64::new(-y, -x)],
        [C64::new(y, -x), C64::new(w, z)],
    ]);

    let residual = adjoint_action_residual(&u, r);
    if residual > 1e-8 {
        return Err(Error::LiftFailure { residual });
    }
    Ok(u)
}

/// `max_k || u sigma_k u^dagger - sum_l R[k][l] sigma_l ||_max`.
pub fn adjoint_action_residual(u: &ComplexMatrix, r: &Mat3) -> f64 {
    let p = paulis();
    let mut worst = 0.0f64;
    for k in 0..3 {
        let lhs = u.matmul(&p[k]).matmul(&u.adjoint());
        let mut rhs = ComplexMatrix::zeros(2, 2);
        for l in 0..3 {
            rhs = &rhs + &p[l].scale_real(r[k][l]);
        }
        worst = worst.max(lhs.max_abs_diff(&rhs));
    }
    worst
}

/// Bell-state index `(a, b)` in the order 00, 01, 10, 11.
pub const BELL_LABELS: [(u8, u8); 4] = [(0, 0), (0, 1), (1, 0), (1, 1)];

/// `|beta_ab> = (|0,b> + (-1)^a |1,b'>) / sqrt 2` in the computational basis
/// ordered `|00>, |01>, |10>, |11>`.
pub fn bell_vector(a: u8, b: u8) -> [C64; 4] {
    let mut v = [ZERO; 4];
    let sign = if a == 0 { 1.0 } else { -1.0 };
    let b = b as usize;
    v[b] = C64::new(FRAC_1_SQRT_2, 0.0);
    v[2 + (1 - b)] = C64::new(sign * FRAC_1_SQRT_2, 0.0);
    v
}

/// Unitary whose columns are the Bell vectors in 00, 01, 10, 11 order.
pub fn bell_matrix() -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(4, 4);
    for (k, &(a, b)) in BELL_LABELS.iter().enumerate() {
        m.set_column(k, &bell_vector(a, b));
    }
    m
}

/// `omega_ab = (-1)^a eta_x - (-1)^(a+b) eta_y + (-1)^b eta_z`.
pub fn omega(eta: &[f64; 3], a: u8, b: u8) -> f64 {
    let s = |n: u8| if n % 2 == 0 { 1.0 } else { -1.0 };
    s(a) * eta[0] - s(a + b) * eta[1] + s(b) * eta[2]
}

#[derive(Clone, Debug, PartialEq)]
pub struct BellEigensystem {
    /// `omega_00, omega_01, omega_10, omega_11`.
    pub omegas: [f64; 4],
    pub bell_vectors: [[C64; 4]; 4],
}

pub fn bell_eigensystem(ch: &CanonicalHamiltonian) -> BellEigensystem {
    let mut omegas = [0.0; 4];
    let mut bell_vectors = [[ZERO; 4]; 4];
    for (k, &(a, b)) in BELL_LABELS.iter().enumerate() {
        omegas[k] = omega(&ch.eta, a, b);
        bell_vectors[k] = bell_vector(a, b);
    }
    BellEigensystem {
        omegas,
        bell_vectors,
    }
}
