use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;

use super::config::{config_error, RunConfig};
use super::CliError;
use crate::dynamics::{canonical_frame_damping, EvolveConfig, Method, Trajectory};
use crate::experiments::{
    emit_figure, find_coincidences, inequality_scan, transcendental_roots, Figure, RootKind,
    ScanConfig,
};
use crate::hamiltonian::{canonicalize, parse_eta, CanonicalHamiltonian, CouplingMatrix};
use crate::linalg::ComplexMatrix;
use crate::metrology::{
    sample_series, to_csv, ClosedProbe, CoincidenceConfig, DerivativeConfig, OpenProbe, Probe,
    Scheme,
};
use crate::states::{named_state, Basis, NamedState, PureState};

type CliResult<T> = Result<T, CliError>;

pub(super) fn execute(
    name: &str,
    target: Option<&str>,
    cfg: &RunConfig,
    out: &mut dyn Write,
) -> CliResult<()> {
    if target.is_some() && !matches!(name, "roots" | "figures") {
        return Err(CliError::Usage(format!(
            "`{name}` takes no positional argument"
        )));
    }
    match name {
        "canonicalize" => canonicalize_cmd(cfg, out),
        "evolve" => evolve_cmd(cfg, out),
        "sweep" => sweep_cmd(cfg, out),
        "scan" => scan_cmd(cfg, out),
        "roots" => roots_cmd(target.unwrap_or("closed"), cfg, out),
        "figures" => figures_cmd(target.unwrap_or("all"), cfg, out),
        other => Err(CliError::Usage(format!("unknown subcommand `{other}`"))),
    }
}

/// Comment block carrying the version and every resolved setting.
fn header(name: &str, cfg: &RunConfig) -> String {
    let mut h = format!(
        "qficoe {}\nsubcommand = {name}\n",
        env!("CARGO_PKG_VERSION")
    );
    for line in cfg.resolved_lines() {
        h.push_str(&line);
        h.push('\n');
    }
    h
}

fn commented(header: &str) -> String {
    header.lines().map(|l| format!("# {l}\n")).collect()
}

fn out_dir(cfg: &RunConfig) -> PathBuf {
    PathBuf::from(cfg.string("out_dir", "out"))
}

fn write_artifact(dir: &Path, file: &str, header: &str, body: &str) -> CliResult<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(file);
    fs::write(&path, format!("{}{body}", commented(header)))?;
    Ok(path)
}

fn reals(key: &str, text: &str) -> CliResult<Vec<f64>> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| config_error(key, format!("cannot parse `{s}`")).into())
        })
        .collect()
}

/// `flipflop(x)`, `heisenberg(x, y, z)` or `permutation(xy, yz, zx)`.
fn named_hamiltonian(text: &str, g: f64) -> CliResult<CouplingMatrix> {
    let bad = || config_error("hamiltonian", format!("cannot parse `{text}`"));
    let (name, rest) = text.split_once('(').ok_or_else(bad)?;
    let args = rest.trim().strip_suffix(')').ok_or_else(bad)?;
    let v = reals("hamiltonian", args)?;
    let cm = match (name.trim(), v.as_slice()) {
        ("flipflop", &[x]) => CouplingMatrix::flip_flop(x, g),
        ("heisenberg", &[x, y, z]) => CouplingMatrix::heisenberg(x, y, z, g),
        ("permutation", &[xy, yz, zx]) => CouplingMatrix::permutation(xy, yz, zx, g),
        _ => return Err(bad().into()),
    };
    Ok(cm?)
}

fn coupling(cfg: &RunConfig) -> CliResult<CouplingMatrix> {
    let g = cfg.f64("g", 1.0)?;
    match (cfg.optional_string("eta"), cfg.contains("hamiltonian")) {
        (Some(_), true) => {
            Err(config_error("eta", "give either `eta` or `hamiltonian`, not both").into())
        }
        (Some(text), false) => Ok(CouplingMatrix::new(parse_eta(&text)?, g)?),
        (None, _) => named_hamiltonian(&cfg.string("hamiltonian", "flipflop(1)"), g),
    }
}

fn canonical(cfg: &RunConfig) -> CliResult<CanonicalHamiltonian> {
    Ok(canonicalize(&coupling(cfg)?)?)
}

/// Named family or raw computational amplitudes (4 reals, or 8 as re/im pairs).
fn initial_state(cfg: &RunConfig) -> CliResult<PureState> {
    if let Some(text) = cfg.optional_string("amplitudes") {
        if cfg.contains("state") {
            return Err(config_error(
                "amplitudes",
                "give either `amplitudes` or `state`, not both",
            )
            .into());
        }
        let v = reals("amplitudes", &text)?;
        let amps: Vec<C64> = match v.len() {
            4 => v.iter().map(|&x| C64::new(x, 0.0)).collect(),
            8 => v.chunks(2).map(|p| C64::new(p[0], p[1])).collect(),
            n => {
                return Err(
                    config_error("amplitudes", format!("expected 4 or 8 reals, got {n}")).into(),
                )
            }
        };
        return Ok(PureState::new(
            [amps[0], amps[1], amps[2], amps[3]],
            Basis::Computational,
        )?);
    }
    let family = cfg.string("state", "psi_opt");
    let alpha = cfg.optional_f64("alpha")?;
    Ok(named_state(NamedState::parse(&family, alpha)?)?)
}

fn positive(cfg: &RunConfig, key: &'static str, default: f64) -> CliResult<f64> {
    let v = cfg.f64(key, default)?;
    if v <= 0.0 {
        return Err(config_error(key, format!("must be positive, got {v}")).into());
    }
    Ok(v)
}

fn kappa(cfg: &RunConfig) -> CliResult<f64> {
    let k = cfg.f64("kappa", 0.0)?;
    if k < 0.0 {
        return Err(config_error("kappa", format!("must be non-negative, got {k}")).into());
    }
    Ok(k)
}

/// Times `gt / g` on an inclusive grid.
fn time_grid(cfg: &RunConfig, g: f64) -> CliResult<Vec<f64>> {
    let lo = cfg.f64("gt_min", 0.0)?;
    let hi = cfg.f64("gt_max", 2.0 * PI)?;
    let n = cfg.usize("points", 201)?;
    if n < 2 {
        return Err(config_error("points", "need at least 2").into());
    }
    if lo < 0.0 || hi <= lo {
        return Err(config_error(
            "gt_max",
            format!("need 0 <= gt_min < gt_max, got [{lo}, {hi}]"),
        )
        .into());
    }
    Ok((0..n)
        .map(|k| (lo + (hi - lo) * k as f64 / (n - 1) as f64) / g)
        .collect())
}

fn evolve_config(cfg: &RunConfig) -> CliResult<EvolveConfig> {
    let method = match cfg.string("method", "adaptive").as_str() {
        "adaptive" => Method::Adaptive,
        "expm" => Method::Expm,
        other => {
            return Err(config_error(
                "method",
                format!("expected adaptive or expm, got `{other}`"),
            )
            .into())
        }
    };
    Ok(EvolveConfig {
        tol: positive(cfg, "tol", crate::tol::INTEGRATOR)?,
        method,
    })
}

fn derivative_config(cfg: &RunConfig) -> CliResult<DerivativeConfig> {
    let d = DerivativeConfig::default();
    Ok(DerivativeConfig {
        step: positive(cfg, "step", d.step)?,
        scheme: Scheme::parse(&cfg.string("scheme", "central-5pt"))?,
        ..d
    })
}

fn fmt_complex(z: C64) -> String {
    format!("{:+.12}{:+.12}i", z.re, z.im)
}

fn fmt_matrix(m: &ComplexMatrix) -> String {
    let rows: Vec<String> = (0..m.rows())
        .map(|i| {
            let cells: Vec<String> = (0..m.cols()).map(|j| fmt_complex(m[(i, j)])).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

fn canonicalize_cmd(cfg: &RunConfig, out: &mut dyn Write) -> CliResult<()> {
    let cm = coupling(cfg)?;
    let ch = canonicalize(&cm)?;
    let mut text = commented(&header("canonicalize", cfg));
    let _ = writeln!(
        text,
        "eta_tilde = {:.12}, {:.12}, {:.12}",
        ch.eta[0], ch.eta[1], ch.eta[2]
    );
    let _ = writeln!(text, "u1 = {}", fmt_matrix(&ch.u1));
    let _ = writeln!(text, "u2 = {}", fmt_matrix(&ch.u2));
    let _ = writeln!(text, "residual = {:.3e}", ch.conjugation_residual(&cm));
    out.write_all(text.as_bytes())?;
    Ok(())
}

/// States and output live in the canonical frame; damping acts on the
/// original qubits.
fn evolve_cmd(cfg: &RunConfig, out: &mut dyn Write) -> CliResult<()> {
    let ch = canonical(cfg)?;
    let g = ch.g;
    let s0 = initial_state(cfg)?;
    let times = time_grid(cfg, g)?;
    let kappa = kappa(cfg)?;
    let traj = if kappa == 0.0 {
        Trajectory::closed(&s0, &ch, g, times)?
    } else {
        let noise = canonical_frame_damping(kappa, &ch)?;
        Trajectory::open(&s0.density(), &ch, &noise, g, times, &evolve_config(cfg)?)?
    };
    let dir = out_dir(cfg);
    let path = write_artifact(&dir, "evolve.csv", &header("evolve", cfg), &traj.to_csv())?;
    writeln!(out, "wrote {}", path.display())?;
    Ok(())
}

fn sweep_cmd(cfg: &RunConfig, out: &mut dyn Write) -> CliResult<()> {
    let ch = canonical(cfg)?;
    let g = ch.g;
    let s0 = initial_state(cfg)?;
    let times = time_grid(cfg, g)?;
    let kappa = kappa(cfg)?;
    let dcfg = derivative_config(cfg)?;
    let ccfg = CoincidenceConfig::default();
    let probe: Box<dyn Probe> = if kappa == 0.0 {
        Box::new(ClosedProbe::new(ch, s0))
    } else {
        let noise = canonical_frame_damping(kappa, &ch)?;
        Box::new(OpenProbe::new(ch, s0.density(), noise))
    };
    let samples = sample_series(probe.as_ref(), g, &times, &dcfg, &ccfg)?;
    let events = find_coincidences(probe.as_ref(), &samples, &dcfg, &ccfg)?;
    let head = header("sweep", cfg);
    let dir = out_dir(cfg);
    let csv = write_artifact(&dir, "sweep.csv", &head, &to_csv(&samples))?;
    let mut ev = String::from("index,t,gt,gap,flags\n");
    for e in &events {
        let _ = writeln!(
            ev,
            "{},{},{},{},{}",
            e.index,
            e.sample.t,
            e.sample.g * e.sample.t,
            e.gap,
            e.sample.flag_string()
        );
    }
    let ev_path = write_artifact(&dir, "sweep_events.csv", &head, &ev)?;
    writeln!(out, "wrote {} ({} samples)", csv.display(), samples.len())?;
    writeln!(
        out,
        "wrote {} ({} coincidence events)",
        ev_path.display(),
        events.len()
    )?;
    Ok(())
}

fn scan_cmd(cfg: &RunConfig, out: &mut dyn Write) -> CliResult<()> {
    let d = ScanConfig::default();
    let workers = match cfg.raw("workers") {
        Some(_) => Some(cfg.usize("workers", 1)?),
        None => None,
    };
    let sc = ScanConfig {
        seed: cfg.u64("seed", d.seed)?,
        n_hamiltonians: cfg.usize("n", d.n_hamiltonians)?,
        n_states: cfg.usize("n_states", d.n_states)?,
        gt_grid: (
            cfg.f64("gt_min", d.gt_grid.0)?,
            cfg.f64("gt_max", d.gt_grid.1)?,
            cfg.usize("points", d.gt_grid.2)?,
        ),
        tolerance: cfg.f64("tolerance", d.tolerance)?,
        workers,
    };
    let report = inequality_scan(&sc)?;
    let line = report.to_json_line();
    let path = write_artifact(
        &out_dir(cfg),
        "scan.jsonl",
        &header("scan", cfg),
        &format!("{line}\n"),
    )?;
    writeln!(out, "{line}")?;
    writeln!(out, "wrote {}", path.display())?;
    Ok(())
}

fn roots_cmd(kind: &str, cfg: &RunConfig, out: &mut dyn Write) -> CliResult<()> {
    let g = cfg.f64("g", 1.0)?;
    let rk = match kind {
        "closed" => RootKind::Closed {
            g,
            eta: cfg.f64("eta_xy", 1.0)?,
        },
        "open" => RootKind::Open {
            g,
            kappa: kappa(cfg)?,
        },
        other => {
            return Err(CliError::Usage(format!(
                "roots target must be `closed` or `open`, got `{other}`"
            )))
        }
    };
    let count = cfg.usize("count", 20)?;
    let roots = transcendental_roots(rk, count)?;
    let mut body = String::from("n,t,gt,residual\n");
    for r in &roots {
        let _ = writeln!(body, "{},{},{},{:e}", r.n, r.t, g * r.t, r.residual);
    }
    let head = format!("{}kind = {kind}\n", header("roots", cfg));
    let path = write_artifact(&out_dir(cfg), &format!("roots_{kind}.csv"), &head, &body)?;
    out.write_all(body.as_bytes())?;
    writeln!(out, "wrote {}", path.display())?;
    Ok(())
}

fn figures_cmd(which: &str, cfg: &RunConfig, out: &mut dyn Write) -> CliResult<()> {
    let figs: Vec<Figure> = if which == "all" {
        Figure::ALL.to_vec()
    } else {
        vec![Figure::parse(which)?]
    };
    let dir = out_dir(cfg);
    for fig in figs {
        let d = fig.defaults();
        let g = cfg.f64("g", d.g)?;
        let mut p = d;
        p.g = g;
        p.gt_max = cfg.f64("gt_max", d.gt_max)?;
        p.points = cfg.usize("points", d.points)?;
        if let Some(a) = cfg.optional_f64("alpha")? {
            p.alpha = a;
        }
        p.eta = cfg.f64("eta_xy", d.eta)?;
        if let Some(k) = cfg.optional_f64("kappa")? {
            p.kappa_over_g = k / g;
        }
        let head = format!(
            "{}figure = {}\nalpha = {}\nkappa_over_g = {}\n",
            header("figures", cfg),
            fig.name(),
            p.alpha,
            p.kappa_over_g
        );
        let o = emit_figure(fig, &p, &dir, &head)?;
        writeln!(out, "wrote {} and {}", o.csv.display(), o.script.display())?;
    }
    Ok(())
}
