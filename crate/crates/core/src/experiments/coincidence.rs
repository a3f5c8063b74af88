//! Locating the points where CoE touches the QFI.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::metrology::{sample, CoincidenceConfig, DerivativeConfig, MetrologySample, Probe};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoincidenceEvent {
    /// Index of the grid sample closest to the event.
    pub index: usize,
    /// Refined sample.
    pub sample: MetrologySample,
    /// `(F - CoE) / F` at the refined time.
    pub gap: f64,
}

fn gap(s: &MetrologySample) -> Option<f64> {
    match s.coe {
        Some(k) if s.f > 0.0 => Some((s.f - k) / s.f),
        _ => None,
    }
}

/// Local minima of `(F - CoE) / F` below `ratio_tol`, refined by a parabola
/// through the neighbouring samples and re-evaluated there.
pub fn find_coincidences(
    probe: &dyn Probe,
    samples: &[MetrologySample],
    dcfg: &DerivativeConfig,
    ccfg: &CoincidenceConfig,
) -> Result<Vec<CoincidenceEvent>> {
    let gaps: Vec<Option<f64>> = samples.iter().map(gap).collect();
    let mut events = Vec::new();
    for i in 1..samples.len().saturating_sub(1) {
        let (Some(m), Some(c), Some(p)) = (gaps[i - 1], gaps[i], gaps[i + 1]) else {
            continue;
        };
        if !(c.abs() < ccfg.ratio_tol && c <= m && c < p) {
            continue;
        }
        let (t0, t1, t2) = (samples[i - 1].t, samples[i].t, samples[i + 1].t);
        let curv = m + p - 2.0 * c;
        let mut t = t1;
        if curv > 0.0 {
            let h = 0.5 * (t2 - t0);
            let offset = 0.5 * (m - p) / curv;
            t = t1 + offset.clamp(-1.0, 1.0) * h;
        }
        let refined = sample(probe, samples[i].g, t, dcfg, ccfg)?;
        let g_ref = gap(&refined);
        let (sample, gap) = match g_ref {
            Some(x) if x.abs() <= c.abs() => (refined, x),
            _ => (samples[i].clone(), c),
        };
        events.push(CoincidenceEvent {
            index: i,
            sample,
            gap,
        });
    }
    Ok(events)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::CanonicalHamiltonian;
    use crate::metrology::{sample_series, ClosedProbe};
    use crate::states::{named_state, NamedState};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    #[test]
    fn psi_opt_events_on_quarter_periods() {
        let p = ClosedProbe::new(
            CanonicalHamiltonian::flip_flop(1.0, 1.0),
            named_state(NamedState::PsiOpt).unwrap(),
        );
        let times: Vec<f64> = (0..=400).map(|k| 2.0 * PI * k as f64 / 400.0).collect();
        let (d, c) = (DerivativeConfig::default(), CoincidenceConfig::default());
        let s = sample_series(&p, 1.0, &times, &d, &c).unwrap();
        let ev = find_coincidences(&p, &s, &d, &c).unwrap();
        assert_eq!(ev.len(), 4);
        for (n, e) in ev.iter().enumerate() {
            let expected = FRAC_PI_4 + n as f64 * FRAC_PI_2;
            assert!((e.sample.t - expected).abs() < 2.0 * PI / 400.0);
            assert_eq!(e.sample.flags, [true; 4]);
        }
    }
}
