//! Per-time-point metrology summaries and their CSV form.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::derivative::{coe, DerivativeConfig};
use super::probe::Probe;
use super::qfi::{sld, sld_eigen_concurrences, SldEigen};
use crate::error::Result;
use crate::tol;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoincidenceConfig {
    /// Flag 3 holds when `|CoE / F - 1|` is below this.
    pub ratio_tol: f64,
    /// Flag 4 holds when every nonzero-eigenvalue SLD concurrence is below this.
    pub sld_tol: f64,
    /// g-grid spacing for the maximum tests is `phase_step / t`.
    pub phase_step: f64,
}

impl Default for CoincidenceConfig {
    fn default() -> Self {
        Self {
            ratio_tol: tol::COINCIDENCE_RATIO,
            sld_tol: tol::COINCIDENCE_SLD,
            phase_step: PI / 64.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetrologySample {
    pub t: f64,
    pub g: f64,
    pub f: f64,
    pub coe: Option<f64>,
    pub c: f64,
    /// Concurrences of SLD eigenvectors with nonzero eigenvalue.
    pub c_sld: Vec<f64>,
    pub sld_eigen: Vec<SldEigen>,
    /// C maximal in g, CoE maximal in g, CoE = F, all `c_sld` zero.
    pub flags: [bool; 4],
}

impl MetrologySample {
    pub fn flag_string(&self) -> String {
        self.flags
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect()
    }

    pub fn margin(&self) -> Option<f64> {
        self.coe.map(|c| self.f - c)
    }
}

/// True when the parabola through `(-d, y_m), (0, y_0), (d, y_p)` opens
/// downward with its vertex within half a spacing of the centre.
pub(crate) fn parabola_peak(y_m: f64, y_0: f64, y_p: f64) -> bool {
    let curv = y_p + y_m - 2.0 * y_0;
    if !(curv < 0.0) {
        return false;
    }
    let offset = (y_m - y_p) / (2.0 * curv);
    offset.abs() <= 0.5
}

pub fn sample(
    probe: &dyn Probe,
    g: f64,
    t: f64,
    dcfg: &DerivativeConfig,
    ccfg: &CoincidenceConfig,
) -> Result<MetrologySample> {
    let rho = probe.density(g, t)?;
    let drho = probe.drho(g, t, dcfg)?;
    let l = sld(&rho, &drho)?;
    let sld_eigen = sld_eigen_concurrences(&l);
    let c_sld: Vec<f64> = sld_eigen
        .iter()
        .filter(|e| e.eigenvalue.abs() > tol::SLD_NONZERO)
        .map(|e| e.concurrence)
        .collect();
    let c = probe.concurrence(g, t)?;
    let c_of_g = |x: f64| probe.concurrence(x, t);
    let coe_value = coe(&c_of_g, g, dcfg)?.value;
    let f = l.qfi;

    let mut flags = [false; 4];
    if t > 0.0 {
        let d = ccfg.phase_step / t;
        flags[0] = parabola_peak(c_of_g(g - d)?, c, c_of_g(g + d)?);
        if let Some(k0) = coe_value {
            let km = coe(&c_of_g, g - d, dcfg)?.value;
            let kp = coe(&c_of_g, g + d, dcfg)?.value;
            if let (Some(km), Some(kp)) = (km, kp) {
                flags[1] = parabola_peak(km, k0, kp);
            }
        }
    }
    if let Some(k) = coe_value {
        flags[2] = f > 0.0 && (k / f - 1.0).abs() < ccfg.ratio_tol;
    }
    flags[3] = !c_sld.is_empty() && c_sld.iter().all(|&x| x < ccfg.sld_tol);

    Ok(MetrologySample {
        t,
        g,
        f,
        coe: coe_value,
        c,
        c_sld,
        sld_eigen,
        flags,
    })
}

/// Samples a time series in parallel; output order follows `times`.
pub fn sample_series(
    probe: &dyn Probe,
    g: f64,
    times: &[f64],
    dcfg: &DerivativeConfig,
    ccfg: &CoincidenceConfig,
) -> Result<Vec<MetrologySample>> {
    times
        .par_iter()
        .map(|&t| sample(probe, g, t, dcfg, ccfg))
        .collect()
}

pub const CSV_HEADER: &str = "t,gt,g2F,g2CoE,C,C_SLD_1,C_SLD_2,C_SLD_3,flags";

/// One CSV row; an undefined CoE and missing SLD concurrences leave empty cells.
pub fn csv_row(s: &MetrologySample) -> String {
    let g2 = s.g * s.g;
    let mut row = format!("{},{},{},", s.t, s.g * s.t, g2 * s.f);
    if let Some(k) = s.coe {
        let _ = write!(row, "{}", g2 * k);
    }
    let _ = write!(row, ",{}", s.c);
    for k in 0..3 {
        row.push(',');
        if let Some(x) = s.c_sld.get(k) {
            let _ = write!(row, "{x}");
        }
    }
    let _ = write!(row, ",{}", s.flag_string());
    row
}

pub fn to_csv(samples: &[MetrologySample]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for s in samples {
        out.push_str(&csv_row(s));
        out.push('\n');
    }
    out
}
