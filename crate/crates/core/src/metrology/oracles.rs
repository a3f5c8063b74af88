//! Closed-form QFI, concurrence, CoE and SLD concurrence for the standard
//! probe families, and the fidelity relation at concurrence maxima.

use serde::{Deserialize, Serialize};

use super::probe::Probe;
use crate::error::{invalid, Result};
use crate::states::uhlmann_fidelity;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `|01>` under flip-flop coupling `eta_xy`.
    PsiOpt { eta_xy: f64 },
    /// `alpha |beta_01> + sqrt(1 - alpha^2) |beta_11>` under flip-flop coupling.
    PsiAlpha { alpha: f64, eta_xy: f64 },
    /// `(alpha |0> + sqrt(1 - alpha^2) |1>) |1>` under flip-flop coupling `eta`.
    PhiAlpha { alpha: f64, eta: f64 },
    /// Damped `|01>`, flip-flop with `eta_xy = 1`.
    OpenSeparable { kappa: f64 },
    /// Damped `alpha |01> + sqrt(1 - alpha^2) |10>`, flip-flop with `eta_xy = 1`.
    OpenEntangled { alpha: f64, kappa: f64 },
    /// Equal superposition of two Bell states with frequencies `omega_1`,
    /// `omega_2`; `same_parity` when `a + b` has equal parity for both.
    BellPair {
        omega_1: f64,
        omega_2: f64,
        same_parity: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedForm {
    pub f: f64,
    pub c: f64,
    /// `None` at concurrence kinks.
    pub coe: Option<f64>,
    /// Common concurrence of the SLD eigenvectors with nonzero eigenvalue, where known.
    pub c_sld: Option<f64>,
}

/// `G(c) = (1 - 2c^2 + a c^4) / (1 - a c^2)^{3/2}`, the CoE/QFI ratio of
/// `C = sqrt(1 - a cos^2 x)`.
pub fn curvature_ratio(a: f64, c: f64) -> f64 {
    (1.0 - 2.0 * c * c + a * c.powi(4)) / (1.0 - a * c * c).powf(1.5)
}

fn check_alpha(alpha: f64) -> Result<()> {
    if (0.0..=1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(invalid("alpha", format!("must lie in [0, 1], got {alpha}")))
    }
}

fn kinked(f: f64, s: f64) -> Option<f64> {
    (s != 0.0).then_some(f * s.abs())
}

pub fn closed_form_suite(family: Family, g: f64, t: f64) -> Result<ClosedForm> {
    Ok(match family {
        Family::PsiOpt { eta_xy } => {
            let f = 4.0 * t * t * eta_xy * eta_xy;
            let (s, c) = (2.0 * g * eta_xy * t).sin_cos();
            ClosedForm {
                f,
                c: s.abs(),
                coe: kinked(f, s),
                c_sld: Some(c.abs()),
            }
        }
        Family::PsiAlpha { alpha, eta_xy } => {
            check_alpha(alpha)?;
            let a = 4.0 * alpha * alpha * (1.0 - alpha * alpha);
            let f = 4.0 * a * t * t * eta_xy * eta_xy;
            let c = (2.0 * g * eta_xy * t).cos();
            let conc = (1.0 - a * c * c).max(0.0).sqrt();
            let coe = (conc > 0.0).then(|| f * curvature_ratio(a, c));
            ClosedForm {
                f,
                c: conc,
                coe,
                c_sld: Some(c.abs()),
            }
        }
        Family::PhiAlpha { alpha, eta } => {
            check_alpha(alpha)?;
            let f = 4.0 * alpha * alpha * t * t * eta * eta;
            let s = (2.0 * g * eta * t).sin();
            ClosedForm {
                f,
                c: alpha * alpha * s.abs(),
                coe: kinked(f, s),
                c_sld: None,
            }
        }
        Family::OpenSeparable { kappa } => {
            let e = (-kappa * t).exp();
            let f = 4.0 * t * t * e;
            let (s, c) = (2.0 * g * t).sin_cos();
            ClosedForm {
                f,
                c: e * s.abs(),
                coe: kinked(f, s),
                c_sld: Some(c.abs()),
            }
        }
        Family::OpenEntangled { alpha, kappa } => {
            check_alpha(alpha)?;
            let e = (-kappa * t).exp();
            let b = (1.0 - 2.0 * alpha * alpha).powi(2);
            let f = 4.0 * t * t * e * b;
            let c = (2.0 * g * t).cos();
            let conc = e * (1.0 - b * c * c).max(0.0).sqrt();
            let coe = (conc > 0.0).then(|| f * curvature_ratio(b, c));
            ClosedForm {
                f,
                c: conc,
                coe,
                c_sld: Some(c.abs()),
            }
        }
        Family::BellPair {
            omega_1,
            omega_2,
            same_parity,
        } => {
            let eta = (omega_1 - omega_2) / 2.0;
            let f = 4.0 * eta * eta * t * t;
            let (s, c) = (2.0 * g * eta * t).sin_cos();
            let x = if same_parity { c } else { s };
            ClosedForm {
                f,
                c: x.abs(),
                coe: kinked(f, x),
                c_sld: None,
            }
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FidelityRelation {
    /// `[C(g) - C(g + dg)] - 4 [1 - sqrt(F_U)]`.
    pub residual: f64,
    /// `8 [1 - sqrt(F_U)] / dg^2`.
    pub qfi_estimate: f64,
    pub fidelity: f64,
}

/// Compares the loss of concurrence with the fidelity between neighbouring
/// states. Meaningful at a concurrence maximum in `g`, which the caller asserts.
pub fn fidelity_relation_check(
    probe: &dyn Probe,
    g: f64,
    t: f64,
    delta_g: f64,
) -> Result<FidelityRelation> {
    if !(delta_g != 0.0 && delta_g.is_finite()) {
        return Err(invalid(
            "delta_g",
            format!("must be finite and nonzero, got {delta_g}"),
        ));
    }
    let a = probe.density(g, t)?;
    let b = probe.density(g + delta_g, t)?;
    let fidelity = uhlmann_fidelity(&b, &a);
    let loss = 1.0 - fidelity.sqrt();
    let dc = probe.concurrence(g, t)? - probe.concurrence(g + delta_g, t)?;
    Ok(FidelityRelation {
        residual: dc - 4.0 * loss,
        qfi_estimate: 8.0 * loss / (delta_g * delta_g),
        fidelity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{bell_eigensystem, CanonicalHamiltonian};
    use crate::metrology::probe::ClosedProbe;
    use crate::metrology::{coe, DerivativeConfig};
    use crate::states::{named_state, Basis, NamedState, PureState};
    use num_complex::Complex64 as C64;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn open_separable_without_decay_is_psi_opt() {
        for t in [0.1, 0.7, 2.2] {
            let a = closed_form_suite(Family::OpenSeparable { kappa: 0.0 }, 1.0, t).unwrap();
            let b = closed_form_suite(Family::PsiOpt { eta_xy: 1.0 }, 1.0, t).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn phi_alpha_concurrence_bounded() {
        for k in 0..200 {
            let t = k as f64 * 0.037;
            let r = closed_form_suite(
                Family::PhiAlpha {
                    alpha: 0.3,
                    eta: 1.0,
                },
                1.0,
                t,
            )
            .unwrap();
            assert!(r.c <= 0.09 + 1e-15);
        }
    }

    #[test]
    fn ratio_is_one_where_cosine_vanishes() {
        assert_eq!(curvature_ratio(0.7, 0.0), 1.0);
        let r = closed_form_suite(
            Family::OpenEntangled {
                alpha: 0.25,
                kappa: 0.5,
            },
            1.0,
            FRAC_PI_4,
        )
        .unwrap();
        assert!((r.coe.unwrap() - r.f).abs() < 1e-12 * r.f);
    }

    #[test]
    fn bell_pair_matches_numerics() {
        let ch = CanonicalHamiltonian::diagonal(0.9, 0.4, -0.3, 1.0);
        let om = bell_eigensystem(&ch).omegas;
        let labels = [(0u8, 0u8), (0, 1), (1, 0), (1, 1)];
        let (g, t) = (1.1, 0.83);
        for i in 0..4 {
            for j in i + 1..4 {
                let mut a = [C64::new(0.0, 0.0); 4];
                a[i] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                a[j] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                let p = ClosedProbe::new(ch.clone(), PureState::new(a, Basis::Bell).unwrap());
                let parity = |(x, y): (u8, u8)| (x + y) % 2;
                let same = parity(labels[i]) == parity(labels[j]);
                let r = closed_form_suite(
                    Family::BellPair {
                        omega_1: om[i],
                        omega_2: om[j],
                        same_parity: same,
                    },
                    g,
                    t,
                )
                .unwrap();
                assert!((p.concurrence(g, t).unwrap() - r.c).abs() < 1e-12, "{i}{j}");
                let fd = coe(&|x| p.concurrence(x, t), g, &DerivativeConfig::default()).unwrap();
                assert!((fd.value.unwrap() - r.coe.unwrap()).abs() < 1e-5 * r.f.max(1.0));
            }
        }
    }

    #[test]
    fn g_independent_state_has_zero_residual() {
        let ch = CanonicalHamiltonian::flip_flop(1.0, 1.0);
        let bell = PureState::new(
            [
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
            ],
            Basis::Bell,
        )
        .unwrap();
        // beta_00 has omega = 0 for flip-flop coupling, so it never moves.
        let p = ClosedProbe::new(ch, bell);
        let r = fidelity_relation_check(&p, 1.0, 2.0, 0.1).unwrap();
        assert!(r.residual.abs() < 1e-12 && r.qfi_estimate.abs() < 1e-9);
    }

    #[test]
    fn fidelity_estimate_approaches_qfi() {
        let p = ClosedProbe::new(
            CanonicalHamiltonian::flip_flop(1.0, 1.0),
            named_state(NamedState::PsiOpt).unwrap(),
        );
        let r = fidelity_relation_check(&p, 1.0, FRAC_PI_4, 1e-3).unwrap();
        let f = 4.0 * FRAC_PI_4 * FRAC_PI_4;
        assert!((r.qfi_estimate - f).abs() < 1e-3 * f);
    }
}
