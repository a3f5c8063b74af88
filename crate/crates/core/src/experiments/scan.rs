//! Randomized search for violations of `F >= CoE`.

use std::time::{Duration, Instant};

use num_complex::Complex64 as C64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::hamiltonian::{
    bell_eigensystem, canonicalize, CanonicalHamiltonian, CouplingMatrix, BELL_LABELS,
};
use crate::metrology::{coe, qfi_pure, sld_with_threshold, ClosedProbe, DerivativeConfig, Probe};
use crate::states::{rng_from_seed, split_seed, Basis, PureState};
use crate::tol;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub seed: u64,
    pub n_hamiltonians: usize,
    pub n_states: usize,
    /// `(min, max, points)` in units of `g t`, inclusive.
    pub gt_grid: (f64, f64, usize),
    /// A violation is `F - CoE < -tolerance * max(1, F)`.
    pub tolerance: f64,
    /// Worker threads; `None` uses the global pool.
    #[serde(default)]
    pub workers: Option<usize>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            n_hamiltonians: 1000,
            n_states: 10,
            gt_grid: (0.1, 10.0, 10),
            tolerance: tol::SCAN_VIOLATION,
            workers: None,
        }
    }
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_hamiltonians == 0 {
            return Err(invalid("n_hamiltonians", "must be positive"));
        }
        if self.n_states == 0 {
            return Err(invalid("n_states", "must be positive"));
        }
        let (a, b, n) = self.gt_grid;
        if n == 0 || !a.is_finite() || !b.is_finite() || a < 0.0 || b < a || (n > 1 && b == a) {
            return Err(invalid("gt_grid", format!("invalid grid ({a}, {b}, {n})")));
        }
        if !(self.tolerance >= 0.0) {
            return Err(invalid("tolerance", "must be non-negative"));
        }
        if self.workers == Some(0) {
            return Err(invalid("workers", "must be positive"));
        }
        Ok(())
    }

    pub fn gt_values(&self) -> Vec<f64> {
        let (a, b, n) = self.gt_grid;
        if n == 1 {
            return vec![a];
        }
        (0..n)
            .map(|k| a + (b - a) * k as f64 / (n - 1) as f64)
            .collect()
    }

    pub fn instances(&self) -> usize {
        self.n_hamiltonians * self.n_states * self.gt_grid.2
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InstanceId {
    pub hamiltonian: usize,
    pub state: usize,
    pub gt: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub id: InstanceId,
    pub eta: [f64; 3],
    pub bell_amplitudes: [[f64; 2]; 4],
    pub f: f64,
    pub coe: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorstMargin {
    pub id: InstanceId,
    /// `F - CoE`.
    pub margin: f64,
    pub f: f64,
    pub coe: f64,
}

/// Deterministic part of a scan; identical configs give identical outcomes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanOutcome {
    pub config: ScanConfig,
    pub distributions: String,
    pub instances: usize,
    pub worst: Option<WorstMargin>,
    pub violations: Vec<Violation>,
    pub undefined_coe: usize,
    /// `(threshold, max |F_sld - F| / max(1, F))` on one sample per Hamiltonian.
    pub support_sensitivity: Vec<(f64, f64)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    #[serde(flatten)]
    pub outcome: ScanOutcome,
    pub wall_time_s: f64,
}

impl ScanReport {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}

/// `|sum_ab (-1)^{a+b} beta_ab^2 e^{-2 i g omega_ab t}|`.
pub fn bell_concurrence(beta: &[C64; 4], omegas: &[f64; 4], g: f64, t: f64) -> f64 {
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..4 {
        let (a, b) = BELL_LABELS[k];
        let sign = if (a + b) % 2 == 0 { 1.0 } else { -1.0 };
        acc += beta[k] * beta[k] * C64::from_polar(sign, -2.0 * g * omegas[k] * t);
    }
    acc.norm().min(1.0)
}

/// `(F, CoE)` of one instance at `g = 1`.
pub fn evaluate_instance(
    ch: &CanonicalHamiltonian,
    beta: &[C64; 4],
    t: f64,
) -> Result<(f64, Option<f64>)> {
    let omegas = bell_eigensystem(ch).omegas;
    let s = PureState::new(*beta, Basis::Bell)?;
    let f = qfi_pure(&s, ch, t);
    let c = |g: f64| Ok(bell_concurrence(beta, &omegas, g, t));
    let k = coe(&c, 1.0, &DerivativeConfig::default())?.value;
    Ok((f, k))
}

const SUPPORT_THRESHOLDS: [f64; 4] = [1e-14, 1e-12, 1e-10, 1e-8];

struct Partial {
    worst: Option<WorstMargin>,
    violations: Vec<Violation>,
    undefined: usize,
    sensitivity: [f64; 4],
}

fn random_hamiltonian(seed: u64, h: usize) -> Result<CanonicalHamiltonian> {
    let mut rng = rng_from_seed(split_seed(seed, 2 * h as u64));
    let mut eta = [[0.0; 3]; 3];
    for row in eta.iter_mut() {
        for x in row.iter_mut() {
            *x = rng.random_range(-1.0..=1.0);
        }
    }
    canonicalize(&CouplingMatrix::new(eta, 1.0)?)
}

fn random_bell_state(seed: u64, h: usize, s: usize) -> [C64; 4] {
    let mut rng = rng_from_seed(split_seed(split_seed(seed, 2 * h as u64 + 1), s as u64));
    *crate::states::random_pure_state_with(&mut rng, Basis::Bell).amplitudes()
}

fn scan_hamiltonian(cfg: &ScanConfig, gts: &[f64], h: usize) -> Result<Partial> {
    let ch = random_hamiltonian(cfg.seed, h)?;
    let mut part = Partial {
        worst: None,
        violations: Vec::new(),
        undefined: 0,
        sensitivity: [0.0; 4],
    };
    for s in 0..cfg.n_states {
        let beta = random_bell_state(cfg.seed, h, s);
        for &gt in gts {
            let (f, k) = evaluate_instance(&ch, &beta, gt)?;
            let id = InstanceId {
                hamiltonian: h,
                state: s,
                gt,
            };
            let Some(k) = k else {
                part.undefined += 1;
                continue;
            };
            let margin = f - k;
            if part.worst.as_ref().is_none_or(|w| margin < w.margin) {
                part.worst = Some(WorstMargin {
                    id,
                    margin,
                    f,
                    coe: k,
                });
            }
            if margin < -cfg.tolerance * f.max(1.0) {
                part.violations.push(Violation {
                    id,
                    eta: ch.eta,
                    bell_amplitudes: beta.map(|z| [z.re, z.im]),
                    f,
                    coe: k,
                });
            }
        }
    }

    // Mixed-state QFI on the first state at the middle time, at several support thresholds.
    let beta = random_bell_state(cfg.seed, h, 0);
    let t = gts[gts.len() / 2];
    let probe = ClosedProbe::new(ch.clone(), PureState::new(beta, Basis::Bell)?);
    let rho = probe.density(1.0, t)?;
    let drho = probe.drho(1.0, t, &DerivativeConfig::default())?;
    let f = qfi_pure(&PureState::new(beta, Basis::Bell)?, &ch, t);
    for (slot, &thr) in part.sensitivity.iter_mut().zip(&SUPPORT_THRESHOLDS) {
        let l = sld_with_threshold(&rho, &drho, Some(thr))?;
        *slot = (l.qfi - f).abs() / f.max(1.0);
    }
    Ok(part)
}

/// Runs the scan; the returned outcome does not depend on the worker count.
pub fn inequality_scan(cfg: &ScanConfig) -> Result<ScanReport> {
    cfg.validate()?;
    let start = Instant::now();
    let gts = cfg.gt_values();
    let run = || -> Result<Vec<Partial>> {
        (0..cfg.n_hamiltonians)
            .into_par_iter()
            .map(|h| scan_hamiltonian(cfg, &gts, h))
            .collect()
    };
    let parts = match cfg.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::InvalidParameter {
                name: "workers",
                reason: e.to_string(),
            })?
            .install(run)?,
        None => run()?,
    };

    let mut worst: Option<WorstMargin> = None;
    let mut violations = Vec::new();
    let mut undefined = 0;
    let mut sens = [0.0f64; 4];
    for p in parts {
        if let Some(w) = p.worst {
            if worst.as_ref().is_none_or(|cur| w.margin < cur.margin) {
                worst = Some(w);
            }
        }
        violations.extend(p.violations);
        undefined += p.undefined;
        for (a, b) in sens.iter_mut().zip(p.sensitivity) {
            *a = a.max(b);
        }
    }
    let elapsed: Duration = start.elapsed();
    Ok(ScanReport {
        outcome: ScanOutcome {
            config: cfg.clone(),
            distributions: "eta entries iid uniform on [-1, 1], canonicalized; Bell amplitudes Haar (iid complex normal, normalized); g = 1".into(),
            instances: cfg.instances(),
            worst,
            violations,
            undefined_coe: undefined,
            support_sensitivity: SUPPORT_THRESHOLDS.iter().copied().zip(sens).collect(),
        },
        wall_time_s: elapsed.as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ScanConfig {
        ScanConfig {
            seed: 7,
            n_hamiltonians: 20,
            n_states: 4,
            gt_grid: (0.1, 5.0, 6),
            ..ScanConfig::default()
        }
    }

    #[test]
    fn deterministic_and_worker_independent() {
        let a = inequality_scan(&small()).unwrap();
        let b = inequality_scan(&ScanConfig {
            workers: Some(1),
            ..small()
        })
        .unwrap();
        let mut c_cfg = small();
        c_cfg.workers = Some(1);
        let mut a_out = a.outcome.clone();
        a_out.config.workers = Some(1);
        assert_eq!(a_out, b.outcome);
        assert_eq!(b.outcome, inequality_scan(&c_cfg).unwrap().outcome);
        assert_eq!(a.outcome.instances, 480);
        assert!(a.outcome.violations.is_empty());
    }

    #[test]
    fn bell_eigenstate_is_stationary() {
        let ch = CanonicalHamiltonian::diagonal(0.8, 0.3, -0.1, 1.0);
        let mut beta = [C64::new(0.0, 0.0); 4];
        beta[2] = C64::new(1.0, 0.0);
        let (f, k) = evaluate_instance(&ch, &beta, 2.5).unwrap();
        assert_eq!(f, 0.0);
        assert_eq!(k, Some(0.0));
    }

    #[test]
    fn bell_concurrence_matches_state() {
        let ch = CanonicalHamiltonian::diagonal(0.8, 0.3, -0.1, 1.0);
        let s = crate::states::random_pure_state(9).to_bell();
        let p = ClosedProbe::new(ch.clone(), s.clone());
        let om = bell_eigensystem(&ch).omegas;
        for t in [0.0, 0.4, 3.3] {
            let a = bell_concurrence(s.amplitudes(), &om, 1.3, t);
            assert!((a - p.concurrence(1.3, t).unwrap()).abs() < 1e-13);
        }
    }

    #[test]
    fn rejects_empty_config() {
        assert!(inequality_scan(&ScanConfig {
            n_states: 0,
            ..small()
        })
        .is_err());
        assert!(inequality_scan(&ScanConfig {
            gt_grid: (1.0, 0.0, 3),
            ..small()
        })
        .is_err());
    }
}
