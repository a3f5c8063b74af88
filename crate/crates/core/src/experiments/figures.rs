//! CSV data and plotting scripts for the four time-profile figures.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::hamiltonian::CanonicalHamiltonian;
use crate::metrology::{
    sample_series, to_csv, AnalyticOpenProbe, ClosedProbe, CoincidenceConfig, DerivativeConfig,
    MetrologySample, Probe,
};
use crate::states::{named_state, NamedState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Figure {
    /// `psi_alpha` under flip-flop coupling.
    Fig1,
    /// `phi_alpha` under flip-flop coupling.
    Fig2,
    /// Damped `|01>`.
    Fig3,
    /// Damped `alpha |01> + sqrt(1 - alpha^2) |10>`.
    Fig4,
}

impl Figure {
    pub const ALL: [Figure; 4] = [Figure::Fig1, Figure::Fig2, Figure::Fig3, Figure::Fig4];

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "fig1" => Ok(Self::Fig1),
            "fig2" => Ok(Self::Fig2),
            "fig3" => Ok(Self::Fig3),
            "fig4" => Ok(Self::Fig4),
            other => Err(invalid("figure", format!("unknown figure `{other}`"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Fig1 => "fig1",
            Self::Fig2 => "fig2",
            Self::Fig3 => "fig3",
            Self::Fig4 => "fig4",
        }
    }

    pub fn defaults(&self) -> FigureParams {
        let base = FigureParams {
            g: 1.0,
            gt_max: 2.0 * PI,
            points: 801,
            alpha: 0.3,
            eta: 1.0,
            kappa_over_g: 0.5,
        };
        match self {
            Self::Fig1 | Self::Fig2 => base,
            Self::Fig3 => FigureParams { alpha: 1.0, ..base },
            Self::Fig4 => FigureParams {
                alpha: 0.25,
                ..base
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FigureParams {
    pub g: f64,
    pub gt_max: f64,
    /// Grid points including both ends.
    pub points: usize,
    pub alpha: f64,
    /// Flip-flop coupling for the closed figures.
    pub eta: f64,
    pub kappa_over_g: f64,
}

impl FigureParams {
    pub fn times(&self) -> Vec<f64> {
        let n = self.points - 1;
        (0..=n)
            .map(|k| self.gt_max * k as f64 / n as f64 / self.g)
            .collect()
    }

    fn validate(&self) -> Result<()> {
        if !(self.g > 0.0) || !self.g.is_finite() {
            return Err(invalid("g", "must be positive"));
        }
        if !(self.gt_max > 0.0) || !self.gt_max.is_finite() {
            return Err(invalid("gt_max", "must be positive"));
        }
        if self.points < 2 {
            return Err(invalid("points", "need at least 2"));
        }
        Ok(())
    }
}

fn probe_for(which: Figure, p: &FigureParams) -> Result<Box<dyn Probe>> {
    Ok(match which {
        Figure::Fig1 => Box::new(ClosedProbe::new(
            CanonicalHamiltonian::flip_flop(p.eta, p.g),
            named_state(NamedState::PsiAlpha(p.alpha))?,
        )),
        Figure::Fig2 => Box::new(ClosedProbe::new(
            CanonicalHamiltonian::flip_flop(p.eta, p.g),
            named_state(NamedState::PhiAlpha(p.alpha))?,
        )),
        Figure::Fig3 => Box::new(AnalyticOpenProbe::separable(p.kappa_over_g * p.g)?),
        Figure::Fig4 => Box::new(AnalyticOpenProbe::entangled(p.alpha, p.kappa_over_g * p.g)?),
    })
}

/// Samples the figure's time profile.
pub fn figure_samples(which: Figure, p: &FigureParams) -> Result<Vec<MetrologySample>> {
    p.validate()?;
    let probe = probe_for(which, p)?;
    sample_series(
        probe.as_ref(),
        p.g,
        &p.times(),
        &DerivativeConfig::default(),
        &CoincidenceConfig::default(),
    )
}

#[derive(Clone, Debug, PartialEq)]
pub struct FigureOutput {
    pub csv: PathBuf,
    pub script: PathBuf,
    pub samples: Vec<MetrologySample>,
}

/// Writes `<name>.csv` and `<name>.py` into `out_dir`. Each line of `header`
/// is written to the CSV as a `#` comment.
pub fn emit_figure(
    which: Figure,
    p: &FigureParams,
    out_dir: &Path,
    header: &str,
) -> Result<FigureOutput> {
    let samples = figure_samples(which, p)?;
    fs::create_dir_all(out_dir)?;
    let csv = out_dir.join(format!("{}.csv", which.name()));
    let script = out_dir.join(format!("{}.py", which.name()));
    let mut body = String::new();
    for line in header.lines() {
        body.push_str("# ");
        body.push_str(line);
        body.push('\n');
    }
    body.push_str(&to_csv(&samples));
    fs::write(&csv, body).map_err(Error::from)?;
    fs::write(&script, plot_script(which)).map_err(Error::from)?;
    Ok(FigureOutput {
        csv,
        script,
        samples,
    })
}

fn plot_script(which: Figure) -> String {
    let name = which.name();
    format!(
        r##"import csv
import matplotlib.pyplot as plt


def column(rows, key):
    return [float(r[key]) if r[key] != "" else float("nan") for r in rows]


with open("{name}.csv") as fh:
    rows = list(csv.DictReader(line for line in fh if not line.startswith("#")))

gt = column(rows, "gt")
fig, (top, bottom) = plt.subplots(2, 1, sharex=True, figsize=(6, 6))
top.plot(gt, column(rows, "g2F"), "b--", label="g^2 F")
top.plot(gt, column(rows, "g2CoE"), "r-", label="g^2 CoE")
top.legend()
bottom.plot(gt, column(rows, "C"), "g--", label="C")
for k in (1, 2, 3):
    ys = column(rows, f"C_SLD_{{k}}")
    if any(y == y for y in ys):
        bottom.plot(gt, ys, label=f"C_SLD {{k}}")
bottom.set_xlabel("gt")
bottom.legend()
fig.tight_layout()
fig.savefig("{name}.png", dpi=150)
"##
    )
}
