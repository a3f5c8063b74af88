//! Cyclic Jacobi eigensolver for small Hermitian matrices.

use num_complex::Complex64 as C64;

use super::matrix::{inner, ComplexMatrix};
use crate::error::{Error, Result};
use crate::tol;

/// Eigenvalues in ascending order with orthonormal eigenvectors stored as columns.
///
/// Each eigenvector is normalized so that its largest-magnitude entry is real
/// and non-negative. Within a degenerate cluster (gap below
/// [`tol::DEGENERACY_GAP`]) the vectors are re-orthonormalized and their
/// individual identities carry no meaning.
#[derive(Clone, Debug)]
pub struct HermitianEigenSystem {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigenSystem {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.eigenvectors.column(k)
    }

    /// `V f(diag(lambda)) V^dagger`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.dim();
        let mut m = ComplexMatrix::zeros(n, n);
        for k in 0..n {
            let w = f(self.eigenvalues[k]);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = self.eigenvectors[(i, k)] * w;
                for j in 0..n {
                    m[(i, j)] += vik * self.eigenvectors[(j, k)].conj();
                }
            }
        }
        m
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.apply(|x| x)
    }

    /// Index ranges of eigenvalue clusters separated by more than `gap`.
    pub fn clusters(&self, gap: f64) -> Vec<std::ops::Range<usize>> {
        let mut out = Vec::new();
        let mut start = 0;
        for k in 1..=self.dim() {
            if k == self.dim() || self.eigenvalues[k] - self.eigenvalues[k - 1] >= gap {
                out.push(start..k);
                start = k;
            }
        }
        out
    }
}

/// Eigendecomposition of a Hermitian matrix, rejecting inputs whose
/// anti-Hermitian part exceeds `1e-10 * max(1, ||A||)`.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<HermitianEigenSystem> {
    let tolerance = tol::HERMITIAN_INPUT * a.frobenius_norm().max(1.0);
    hermitian_eig_with_tol(a, tolerance)
}

pub fn hermitian_eig_with_tol(a: &ComplexMatrix, tolerance: f64) -> Result<HermitianEigenSystem> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigendecomposition of a {}x{} matrix",
            a.rows(),
            a.cols()
        )));
    }
    let deviation = a.hermiticity_deviation();
    if deviation > tolerance {
        return Err(Error::NotHermitian {
            deviation,
            tolerance,
        });
    }
    let n = a.rows();
    let mut w = a.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = w.frobenius_norm();

    if scale > 0.0 {
        for _ in 0..tol::JACOBI_MAX_SWEEPS {
            if off_diagonal_norm(&w) <= tol::JACOBI_OFF_DIAGONAL * scale {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    rotate(&mut w, &mut v, p, q);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| w[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));

    let eigenvalues: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let mut vectors: Vec<Vec<C64>> = order.iter().map(|&i| v.column(i)).collect();

    let mut sys = HermitianEigenSystem {
        eigenvalues,
        eigenvectors: ComplexMatrix::identity(n),
    };
    for cluster in sys.clusters(tol::DEGENERACY_GAP) {
        if cluster.len() > 1 {
            orthonormalize(&mut vectors[cluster]);
        }
    }
    for (k, vec) in vectors.iter_mut().enumerate() {
        fix_phase(vec);
        sys.eigenvectors.set_column(k, vec);
    }
    Ok(sys)
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// One complex Jacobi rotation annihilating `a[p][q]`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let b = apq.norm();
    if b == 0.0 {
        return;
    }
    let phase = apq / b;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = (aqq - app) / (2.0 * b);
    let t = if theta == 0.0 {
        1.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    // U = diag(1, conj(phase)) * [[c, s], [-s, c]]
    let u_pp = C64::new(c, 0.0);
    let u_pq = C64::new(s, 0.0);
    let u_qp = -phase.conj() * s;
    let u_qq = phase.conj() * c;

    let n = a.rows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * u_pp + akq * u_qp;
        a[(k, q)] = akp * u_pq + akq * u_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = u_pp.conj() * apk + u_qp.conj() * aqk;
        a[(q, k)] = u_pq.conj() * apk + u_qq.conj() * aqk;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)] = C64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = C64::new(a[(q, q)].re, 0.0);
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * u_pp + vkq * u_qp;
        v[(k, q)] = vkp * u_pq + vkq * u_qq;
    }
}

/// Modified Gram-Schmidt, two passes.
pub(crate) fn orthonormalize(vs: &mut [Vec<C64>]) {
    for _ in 0..2 {
        for k in 0..vs.len() {
            for j in 0..k {
                let proj = inner(&vs[j], &vs[k]);
                let (head, tail) = vs.split_at_mut(k);
                for (x, y) in tail[0].iter_mut().zip(&head[j]) {
                    *x -= proj * y;
                }
            }
            let nrm = super::matrix::norm(&vs[k]);
            if nrm > 0.0 {
                vs[k].iter_mut().for_each(|x| *x /= nrm);
            }
        }
    }
}

/// Rotates the global phase so the largest-magnitude entry is real and
/// non-negative. Ties go to the lowest index.
pub(crate) fn fix_phase(v: &mut [C64]) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let pivot = v
        .iter()
        .position(|z| z.norm() >= max * (1.0 - 1e-12))
        .unwrap_or(0);
    let phase = v[pivot].conj() / v[pivot].norm();
    v.iter_mut().for_each(|z| *z *= phase);
    v[pivot] = C64::new(v[pivot].re, 0.0);
}

/// Square root of a positive semidefinite Hermitian matrix; eigenvalues below
/// `SQRT_CLAMP_RELATIVE` times the largest are set to zero.
pub fn psd_sqrt(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let sys = hermitian_eig(a)?;
    let floor = clamp_floor(&sys.eigenvalues);
    Ok(sys.apply(|x| if x > floor { x.sqrt() } else { 0.0 }))
}

/// Threshold under which eigenvalues of a PSD matrix are treated as zero.
pub(crate) fn clamp_floor(eigenvalues: &[f64]) -> f64 {
    let top = eigenvalues.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    tol::SQRT_CLAMP_RELATIVE * top
}
