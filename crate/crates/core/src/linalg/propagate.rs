//! Propagation of linear systems `dv/dt = L v` with constant `L`.
//!
//! Two routes: an adaptive Dormand-Prince 5(4) integrator with local error
//! control, and a scaling-and-squaring matrix exponential. The exponential is
//! smooth in the entries of `L`, which matters when results are finite-differenced
//! with respect to a parameter of `L`.

use num_complex::Complex64 as C64;

use super::matrix::ComplexMatrix;
use crate::error::{invalid, Error, Result};

// Dormand-Prince tableau; the generator is autonomous so the nodes are not needed.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Statistics of an adaptive run.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
}

/// Integrates `dv/dt = L v` from 0 to `t` with relative and absolute local
/// error tolerance `tol`.
pub fn propagate_linear(l: &ComplexMatrix, v0: &[C64], t: f64, tol: f64) -> Result<Vec<C64>> {
    let out = propagate_linear_grid(l, v0, &[t], tol)?;
    Ok(out.into_iter().next().expect("one output"))
}

/// Same as [`propagate_linear`] but records the state at every time of an
/// ascending, non-negative grid in a single sweep.
pub fn propagate_linear_grid(
    l: &ComplexMatrix,
    v0: &[C64],
    times: &[f64],
    tol: f64,
) -> Result<Vec<Vec<C64>>> {
    propagate_linear_grid_stats(l, v0, times, tol).map(|(v, _)| v)
}

pub fn propagate_linear_grid_stats(
    l: &ComplexMatrix,
    v0: &[C64],
    times: &[f64],
    tol: f64,
) -> Result<(Vec<Vec<C64>>, StepStats)> {
    check_system(l, v0)?;
    if !(tol > 0.0) {
        return Err(invalid("tol", format!("must be positive, got {tol}")));
    }
    if times.iter().any(|t| !t.is_finite() || *t < 0.0) {
        return Err(invalid("t", "times must be finite and non-negative"));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(invalid("t", "time grid must be ascending"));
    }

    let n = v0.len();
    let scale = l.frobenius_norm();
    let mut stats = StepStats::default();
    let mut out = Vec::with_capacity(times.len());
    let mut y = v0.to_vec();
    let mut t = 0.0;
    let mut h = if scale > 0.0 {
        0.1 / scale
    } else {
        f64::INFINITY
    };
    let mut k: Vec<Vec<C64>> = vec![vec![C64::new(0.0, 0.0); n]; 7];
    let mut stage = vec![C64::new(0.0, 0.0); n];

    for &target in times {
        while t < target {
            if scale == 0.0 {
                t = target;
                break;
            }
            let last = h >= target - t;
            let step = if last { target - t } else { h };
            if step < 1e-14 * t.abs().max(1.0) && !last {
                return Err(Error::IntegrationFailure { t, step });
            }

            k[0] = l.matvec(&y);
            for s in 1..7 {
                for i in 0..n {
                    let mut acc = y[i];
                    for (j, kj) in k.iter().enumerate().take(s) {
                        if A[s][j] != 0.0 {
                            acc += kj[i] * (step * A[s][j]);
                        }
                    }
                    stage[i] = acc;
                }
                k[s] = l.matvec(&stage);
            }
            let mut err_sq = 0.0;
            let mut y_new = vec![C64::new(0.0, 0.0); n];
            for i in 0..n {
                let mut hi = y[i];
                let mut e = C64::new(0.0, 0.0);
                for s in 0..7 {
                    hi += k[s][i] * (step * B5[s]);
                    e += k[s][i] * (step * (B5[s] - B4[s]));
                }
                let sc = tol + tol * y[i].norm().max(hi.norm());
                err_sq += (e.norm() / sc).powi(2);
                y_new[i] = hi;
            }
            let err = (err_sq / n as f64).sqrt();
            if err <= 1.0 {
                stats.accepted += 1;
                y = y_new;
                t = if last { target } else { t + step };
            } else {
                stats.rejected += 1;
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if !(last && err <= 1.0) {
                h = step * factor;
            } else {
                h = h.max(step * factor);
            }
            if h < 1e-14 * t.abs().max(1.0) {
                return Err(Error::IntegrationFailure { t, step: h });
            }
        }
        out.push(y.clone());
    }
    Ok((out, stats))
}

/// `exp(A)` by scaling and squaring of a Taylor series.
pub fn expm(a: &ComplexMatrix) -> ComplexMatrix {
    assert!(a.is_square(), "expm of a non-square matrix");
    let n = a.rows();
    let norm1 = (0..n)
        .map(|j| (0..n).map(|i| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm1 > 0.5 {
        (norm1 / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let b = a.scale_real(0.5f64.powi(squarings));

    let mut sum = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for k in 1..40 {
        term = term.matmul(&b).scale_real(1.0 / k as f64);
        sum = &sum + &term;
        if term.max_abs() <= 1e-18 * sum.max_abs() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum.matmul(&sum);
    }
    sum
}

/// `exp(L t) v0`.
pub fn propagate_expm(l: &ComplexMatrix, v0: &[C64], t: f64) -> Result<Vec<C64>> {
    check_system(l, v0)?;
    Ok(expm(&l.scale_real(t)).matvec(v0))
}

fn check_system(l: &ComplexMatrix, v0: &[C64]) -> Result<()> {
    if !l.is_square() || l.rows() != v0.len() {
        return Err(Error::DimensionMismatch(format!(
            "generator {}x{} acting on a vector of length {}",
            l.rows(),
            l.cols(),
            v0.len()
        )));
    }
    Ok(())
}
