//! Finite-difference derivatives in the coupling `g`.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::linalg::ComplexMatrix;
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    Central3,
    Central5,
    /// Two five-point estimates at `h` and `h/2` combined to cancel the `h^4` term.
    Richardson,
}

impl Scheme {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "central-3pt" => Ok(Self::Central3),
            "central-5pt" => Ok(Self::Central5),
            "richardson" => Ok(Self::Richardson),
            other => Err(invalid("scheme", format!("unknown scheme `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivativeConfig {
    /// Base step relative to `max(1, |g|)`.
    pub step: f64,
    pub scheme: Scheme,
    /// CoE is undefined when any stencil concurrence falls below this.
    pub kink_tolerance: f64,
}

impl Default for DerivativeConfig {
    fn default() -> Self {
        Self {
            step: tol::FD_STEP,
            scheme: Scheme::Central5,
            kink_tolerance: tol::KINK_CONCURRENCE,
        }
    }
}

impl DerivativeConfig {
    /// Actual step at `g`, rounded so that `g + h` is exact.
    pub fn step_at(&self, g: f64) -> Result<f64> {
        if !(self.step > 0.0) || !self.step.is_finite() {
            return Err(invalid(
                "step",
                format!("must be positive, got {}", self.step),
            ));
        }
        let base = self.step * g.abs().max(1.0);
        Ok((g + base) - g)
    }
}

fn first(
    f: &dyn Fn(f64) -> Result<ComplexMatrix>,
    g: f64,
    h: f64,
    five: bool,
) -> Result<ComplexMatrix> {
    if five {
        let a = &f(g - 2.0 * h)? - &f(g + 2.0 * h)?;
        let b = &f(g + h)? - &f(g - h)?;
        Ok((&a + &b.scale_real(8.0)).scale_real(1.0 / (12.0 * h)))
    } else {
        Ok((&f(g + h)? - &f(g - h)?).scale_real(1.0 / (2.0 * h)))
    }
}

/// `d rho / d g` of a matrix-valued source; the result is symmetrized.
pub fn drho_dg(
    source: &dyn Fn(f64) -> Result<ComplexMatrix>,
    g: f64,
    cfg: &DerivativeConfig,
) -> Result<ComplexMatrix> {
    let h = cfg.step_at(g)?;
    let d = match cfg.scheme {
        Scheme::Central3 => first(source, g, h, false)?,
        Scheme::Central5 => first(source, g, h, true)?,
        Scheme::Richardson => {
            let coarse = first(source, g, h, true)?;
            let fine = first(source, g, h / 2.0, true)?;
            (&fine.scale_real(16.0) - &coarse).scale_real(1.0 / 15.0)
        }
    };
    Ok(d.hermitian_part())
}

/// Three- and five-point estimates of `f''` with the sampled values.
pub(crate) struct SecondDifference {
    pub three: f64,
    pub five: f64,
    pub min_value: f64,
}

pub(crate) fn second_difference(
    f: &dyn Fn(f64) -> Result<f64>,
    g: f64,
    h: f64,
) -> Result<SecondDifference> {
    let (m2, m1, c0, p1, p2) = (
        f(g - 2.0 * h)?,
        f(g - h)?,
        f(g)?,
        f(g + h)?,
        f(g + 2.0 * h)?,
    );
    Ok(SecondDifference {
        three: (p1 - 2.0 * c0 + m1) / (h * h),
        five: (-p2 + 16.0 * p1 - 30.0 * c0 + 16.0 * m1 - m2) / (12.0 * h * h),
        min_value: [m2, m1, c0, p1, p2]
            .into_iter()
            .fold(f64::INFINITY, f64::min),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoeEstimate {
    /// `None` where the concurrence is not twice differentiable.
    pub value: Option<f64>,
    pub three_point: f64,
    pub five_point: f64,
}

/// `-d^2 C / d g^2` with kink detection.
///
/// Undefined when a stencil value drops below `kink_tolerance`, or when the
/// three- and five-point estimates disagree beyond
/// `KINK_STENCIL_RELATIVE * max(|e3|, |e5|) + KINK_STENCIL_ABSOLUTE`.
pub fn coe(
    c_of_g: &dyn Fn(f64) -> Result<f64>,
    g: f64,
    cfg: &DerivativeConfig,
) -> Result<CoeEstimate> {
    let h = cfg.step_at(g)?;
    let sd = second_difference(c_of_g, g, h)?;
    let (e3, e5) = (-sd.three, -sd.five);
    let mut min_value = sd.min_value;
    let value = match cfg.scheme {
        Scheme::Central3 => e3,
        Scheme::Central5 => e5,
        Scheme::Richardson => {
            let fine = second_difference(c_of_g, g, h / 2.0)?;
            min_value = min_value.min(fine.min_value);
            -(16.0 * fine.five - sd.five) / 15.0
        }
    };
    let disagree = (e3 - e5).abs()
        > tol::KINK_STENCIL_RELATIVE * e3.abs().max(e5.abs()) + tol::KINK_STENCIL_ABSOLUTE;
    let defined = min_value >= cfg.kink_tolerance && !disagree && value.is_finite();
    Ok(CoeEstimate {
        value: defined.then_some(value),
        three_point: e3,
        five_point: e5,
    })
}
