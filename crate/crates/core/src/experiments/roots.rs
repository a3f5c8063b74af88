//! Roots of the transcendental equations fixing the CoE time-extrema.
//!
//! Both are solved in a pole-free normalized form. With `x = g eta t`,
//! `tan(2x) = -x` is `sin(2x + atan x) = 0`. With `y = 2gt`,
//! `tan(y) = y / (kappa t - 2)` is `sin(y - atan2(y, kappa t - 2)) = 0`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RootKind {
    /// `tan(2 g eta t) = -g eta t`.
    Closed { g: f64, eta: f64 },
    /// `tan(2 g t) = 2 g t / (kappa t - 2)`.
    Open { g: f64, kappa: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub n: usize,
    pub t: f64,
    /// Normalized residual at `t`.
    pub residual: f64,
}

impl RootKind {
    fn validate(&self) -> Result<()> {
        match *self {
            RootKind::Closed { g, eta } => {
                if !(g * eta).is_finite() || g * eta == 0.0 {
                    return Err(invalid("g", "g * eta must be finite and nonzero"));
                }
            }
            RootKind::Open { g, kappa } => {
                if !g.is_finite() || g == 0.0 {
                    return Err(invalid("g", "must be finite and nonzero"));
                }
                if !kappa.is_finite() || kappa < 0.0 {
                    return Err(invalid("kappa", "must be finite and non-negative"));
                }
            }
        }
        Ok(())
    }

    /// Angular rate of the phase in `t`, used to size the scan step.
    fn rate(&self) -> f64 {
        match *self {
            RootKind::Closed { g, eta } => 2.0 * (g * eta).abs(),
            RootKind::Open { g, .. } => 2.0 * g.abs(),
        }
    }

    pub fn residual(&self, t: f64) -> f64 {
        match *self {
            RootKind::Closed { g, eta } => {
                let x = g * eta * t;
                (2.0 * x + x.atan()).sin()
            }
            RootKind::Open { g, kappa } => {
                let y = 2.0 * g * t;
                (y - y.atan2(kappa * t - 2.0)).sin()
            }
        }
    }
}

/// First `count` positive roots in increasing order, excluding `t = 0`.
pub fn transcendental_roots(kind: RootKind, count: usize) -> Result<Vec<Root>> {
    kind.validate()?;
    let step = (PI / 64.0) / kind.rate();
    let f = |t: f64| kind.residual(t);
    let max_steps = 256 * (count + 2) * 64;
    let mut roots = Vec::with_capacity(count);
    let mut a = step / 2.0;
    let mut fa = f(a);
    for _ in 0..max_steps {
        if roots.len() == count {
            break;
        }
        let b = a + step;
        let fb = f(b);
        if fa == 0.0 || fa.signum() != fb.signum() {
            let t = if fa == 0.0 { a } else { bisect(&f, a, b, fa) };
            let residual = f(t);
            if residual.abs() >= tol::ROOT_RESIDUAL {
                return Err(Error::EmptyBracket(format!(
                    "residual {residual:.3e} at t = {t}"
                )));
            }
            roots.push(Root {
                n: roots.len(),
                t,
                residual,
            });
        }
        a = b;
        fa = fb;
    }
    if roots.len() < count {
        return Err(Error::EmptyBracket(format!(
            "found {} of {count} roots",
            roots.len()
        )));
    }
    Ok(roots)
}

fn bisect(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64, mut fa: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fm == 0.0 {
            return m;
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}
