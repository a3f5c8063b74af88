//! 3x3 real SVD with both factors forced to be proper rotations.

use num_complex::Complex64 as C64;

use super::eig::hermitian_eig;
use super::matrix::ComplexMatrix;

pub type Mat3 = [[f64; 3]; 3];

pub const IDENTITY3: Mat3 = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];

/// `M = U diag(d) V^T` with `det U = det V = +1` and `|d|` descending.
/// The entry paired with the smallest `|d|` carries any sign needed to keep
/// both factors proper.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Svd3 {
    pub u: Mat3,
    pub d: [f64; 3],
    pub v: Mat3,
}

impl Svd3 {
    pub fn reconstruct(&self) -> Mat3 {
        let mut ud = self.u;
        for row in ud.iter_mut() {
            for (x, &s) in row.iter_mut().zip(&self.d) {
                *x *= s;
            }
        }
        mat3_mul(&ud, &transpose3(&self.v))
    }
}

pub fn svd3(m: &Mat3) -> Svd3 {
    let mtm = mat3_mul(&transpose3(m), m);
    let data: Vec<C64> = mtm.iter().flatten().map(|&x| C64::new(x, 0.0)).collect();
    let sys = hermitian_eig(&ComplexMatrix::from_vec(3, 3, data).expect("3x3"))
        .expect("M^T M is symmetric");

    // Descending eigenvalue order; the sort is stable so ties keep the solver's order.
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| sys.eigenvalues[b].total_cmp(&sys.eigenvalues[a]));
    let mut v = [[0.0; 3]; 3];
    for (col, &k) in order.iter().enumerate() {
        for (row, vr) in v.iter_mut().enumerate() {
            vr[col] = sys.eigenvectors[(row, k)].re;
        }
    }

    // B = M V, then one-sided Jacobi to make the columns of B orthogonal to
    // working precision; the eigenvectors of M^T M lose accuracy in small
    // singular directions.
    let mut b = mat3_mul(m, &v);
    for _ in 0..12 {
        let mut rotated = false;
        for i in 0..3 {
            for j in i + 1..3 {
                let alpha: f64 = (0..3).map(|r| b[r][i] * b[r][i]).sum();
                let beta: f64 = (0..3).map(|r| b[r][j] * b[r][j]).sum();
                let gamma: f64 = (0..3).map(|r| b[r][i] * b[r][j]).sum();
                if gamma.abs() <= 1e-15 * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for mat in [&mut b, &mut v] {
                    for row in mat.iter_mut() {
                        let (x, y) = (row[i], row[j]);
                        row[i] = c * x - s * y;
                        row[j] = s * x + c * y;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = (0..3)
        .map(|j| (0..3).map(|r| b[r][j] * b[r][j]).sum::<f64>().sqrt())
        .collect();
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &bb| norms[bb].total_cmp(&norms[a]));
    let b = permute_columns(&b, &order);
    let mut v = permute_columns(&v, &order);
    let mut d = [norms[order[0]], norms[order[1]], norms[order[2]]];

    let floor = d[0] * 1e-15;
    let mut cols: [Option<[f64; 3]>; 3] = [None; 3];
    for j in 0..3 {
        if d[j] > floor && d[j] > 0.0 {
            cols[j] = Some([b[0][j] / d[j], b[1][j] / d[j], b[2][j] / d[j]]);
        } else {
            d[j] = 0.0;
        }
    }
    let u1 = cols[0].unwrap_or([1.0, 0.0, 0.0]);
    let u2 = cols[1].unwrap_or_else(|| orthogonal_unit(&u1));
    let u3 = cols[2].unwrap_or_else(|| cross(&u1, &u2));
    let mut u = [[0.0; 3]; 3];
    for r in 0..3 {
        u[r] = [u1[r], u2[r], u3[r]];
    }

    if det3(&u) < 0.0 {
        for row in u.iter_mut() {
            row[2] = -row[2];
        }
        d[2] = -d[2];
    }
    if det3(&v) < 0.0 {
        for row in v.iter_mut() {
            row[2] = -row[2];
        }
        d[2] = -d[2];
    }
    Svd3 { u, d, v }
}

fn permute_columns(m: &Mat3, order: &[usize; 3]) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for r in 0..3 {
        for (c, &k) in order.iter().enumerate() {
            out[r][c] = m[r][k];
        }
    }
    out
}

fn orthogonal_unit(a: &[f64; 3]) -> [f64; 3] {
    let k = (0..3)
        .min_by(|&i, &j| a[i].abs().total_cmp(&a[j].abs()))
        .unwrap_or(0);
    let mut e = [0.0; 3];
    e[k] = 1.0;
    let dot: f64 = (0..3).map(|i| a[i] * e[i]).sum();
    let mut w = [e[0] - dot * a[0], e[1] - dot * a[1], e[2] - dot * a[2]];
    let n = (w[0] * w[0] + w[1] * w[1] + w[2] * w[2]).sqrt();
    w.iter_mut().for_each(|x| *x /= n);
    w
}

pub fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn det3(m: &Mat3) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

pub fn mat3_mul(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    out
}

pub fn transpose3(a: &Mat3) -> Mat3 {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] = a[j][i];
        }
    }
    out
}

pub fn frobenius3(a: &Mat3) -> f64 {
    a.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn sub3(a: &Mat3, b: &Mat3) -> Mat3 {
    let mut out = *a;
    for i in 0..3 {
        for j in 0..3 {
            out[i][j] -= b[i][j];
        }
    }
    out
}
