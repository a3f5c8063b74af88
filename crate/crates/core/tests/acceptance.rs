//! Acceptance criteria, one test per criterion. Each prints a single
//! `PASS` / `FAIL` line to stderr (uncaptured) before asserting. Run with
//! `--test-threads 1` for meaningful timings.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::io::Write;
use std::time::{Duration, Instant};

use rand::Rng;

use qficoe::dynamics::{
    analytic_open_entangled, analytic_open_separable, default_jumps, evolve_open_grid,
    rotate_jump_operators, EvolveConfig, Method, NoiseSpec,
};
use qficoe::experiments::{
    find_coincidences, inequality_scan, transcendental_roots, Figure, FigureParams, RootKind,
    ScanConfig,
};
use qficoe::hamiltonian::{
    adjoint_action_residual, build_matrix, canonicalize, su2_from_so3, CanonicalHamiltonian,
    CouplingMatrix,
};
use qficoe::linalg::{det3, hermitian_eig, mat3_mul, svd3, transpose3, ComplexMatrix, Mat3};
use qficoe::metrology::{
    closed_form_suite, curvature_ratio, fidelity_relation_check, qfi_mixed, sample, sample_series,
    AnalyticOpenProbe, ClosedProbe, CoincidenceConfig, DerivativeConfig, Family, MetrologySample,
    Probe,
};
use qficoe::states::{
    named_state, random_pure_state, rng_from_seed, Basis, DensityMatrix, NamedState,
};

fn report(id: &str, ok: bool, elapsed: Duration, detail: &str) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    let _ = writeln!(
        std::io::stderr(),
        "\n{verdict} criterion {id} [{:.2} s]: {detail}",
        elapsed.as_secs_f64()
    );
}

fn grid(points: usize, gt_max: f64) -> Vec<f64> {
    (0..points)
        .map(|k| gt_max * k as f64 / (points - 1) as f64)
        .collect()
}

fn rel(x: f64, reference: f64, floor: f64) -> f64 {
    (x - reference).abs() / reference.abs().max(floor)
}

fn closed_probe(state: NamedState, eta_xy: f64) -> ClosedProbe {
    ClosedProbe::new(
        CanonicalHamiltonian::flip_flop(eta_xy, 1.0),
        named_state(state).unwrap(),
    )
}

fn series(probe: &dyn Probe, times: &[f64]) -> Vec<MetrologySample> {
    sample_series(
        probe,
        1.0,
        times,
        &DerivativeConfig::default(),
        &CoincidenceConfig::default(),
    )
    .unwrap()
}

/// Indices of strict interior local maxima.
fn local_maxima(y: &[f64]) -> Vec<usize> {
    (1..y.len() - 1)
        .filter(|&i| y[i] > y[i - 1] && y[i] >= y[i + 1])
        .collect()
}

#[test]
fn criterion_01_psi_opt_closed_forms() {
    let start = Instant::now();
    let eta = 1.0;
    let probe = closed_probe(NamedState::PsiOpt, eta);
    let samples = series(&probe, &grid(801, 2.0 * PI));
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for s in &samples {
        let t = s.t;
        let sin = (2.0 * eta * t).sin();
        if t == 0.0 || sin.abs() < 0.05 {
            continue;
        }
        checked += 1;
        let f = 4.0 * t * t * eta * eta;
        let c = sin.abs();
        let cos = (2.0 * eta * t).cos().abs();
        worst = worst.max(rel(s.f, f, 1e-2));
        worst = worst.max(rel(s.c, c, 1e-2));
        worst = worst.max(s.coe.map_or(f64::INFINITY, |k| rel(k, f * c, 1e-2)));
        if s.c_sld.is_empty() {
            worst = f64::INFINITY;
        }
        for &x in &s.c_sld {
            worst = worst.max(rel(x, cos, 1e-2));
        }
    }
    let elapsed = start.elapsed();
    let ok = worst < 1e-4 && elapsed.as_secs_f64() < 5.0 && checked > 600;
    report(
        "1",
        ok,
        elapsed,
        &format!("psi_opt max relative error {worst:.2e} over {checked} points (< 1e-4, < 5 s)"),
    );
    assert!(ok);
}

#[test]
fn criterion_02_figure_one() {
    let start = Instant::now();
    let p = Figure::Fig1.defaults();
    let probe = closed_probe(NamedState::PsiAlpha(p.alpha), p.eta);
    let (d, c) = (DerivativeConfig::default(), CoincidenceConfig::default());
    let mut worst_ratio: f64 = 0.0;
    for n in 0..4 {
        let t = FRAC_PI_4 + n as f64 * FRAC_PI_2;
        let s = sample(&probe, 1.0, t, &d, &c).unwrap();
        worst_ratio = worst_ratio.max(s.coe.map_or(f64::INFINITY, |k| (k / s.f - 1.0).abs()));
    }
    let samples = series(&probe, &p.times());
    let conc: Vec<f64> = samples.iter().map(|s| s.c).collect();
    let neg_sld: Vec<f64> = samples
        .iter()
        .map(|s| -s.c_sld.iter().cloned().fold(0.0, f64::max))
        .collect();
    let c_max = local_maxima(&conc);
    let sld_zero = local_maxima(&neg_sld);
    let collocated = c_max.len() == 4
        && c_max.len() == sld_zero.len()
        && c_max
            .iter()
            .zip(&sld_zero)
            .all(|(a, b)| a.abs_diff(*b) <= 1);
    let elapsed = start.elapsed();
    let ok = worst_ratio < 1e-6 && collocated && elapsed.as_secs_f64() < 10.0;
    report(
        "2",
        ok,
        elapsed,
        &format!(
            "fig1 max |CoE/F - 1| at gt = pi/4 + n pi/2: {worst_ratio:.2e} (< 1e-6); C maxima {c_max:?}, C_SLD zeros {sld_zero:?}"
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_03_figure_two() {
    let start = Instant::now();
    let p = Figure::Fig2.defaults();
    let probe = closed_probe(NamedState::PhiAlpha(p.alpha), p.eta);
    let samples = series(&probe, &p.times());
    let a2 = p.alpha * p.alpha;
    let f_err = samples
        .iter()
        .filter(|s| s.t > 0.0)
        .map(|s| rel(s.f, 4.0 * a2 * s.t * s.t * p.eta * p.eta, 0.0))
        .fold(0.0, f64::max);
    let c_bound = samples.iter().all(|s| s.c <= a2 + 1e-12);
    let events = find_coincidences(
        &probe,
        &samples,
        &DerivativeConfig::default(),
        &CoincidenceConfig::default(),
    )
    .unwrap();
    let flags_ok = !events.is_empty()
        && events
            .iter()
            .all(|e| e.sample.flags == [true, true, true, false]);
    let elapsed = start.elapsed();
    let ok = f_err < 1e-6 && c_bound && flags_ok && elapsed.as_secs_f64() < 10.0;
    let flags: Vec<String> = events.iter().map(|e| e.sample.flag_string()).collect();
    report(
        "3",
        ok,
        elapsed,
        &format!(
            "fig2 F relative error {f_err:.2e}, C <= alpha^2: {c_bound}, {} events with flags {flags:?} (want 1110)",
            events.len()
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_04_open_oracles() {
    let start = Instant::now();
    let (g, kappa, alpha) = (1.0, 0.5, 0.25);
    let times: Vec<f64> = grid(201, 2.0 * PI)[1..].to_vec();
    let h = CanonicalHamiltonian::flip_flop(1.0, g).matrix(g);
    let noise = NoiseSpec::amplitude_damping(kappa).unwrap();
    let cfg = EvolveConfig {
        tol: 1e-11,
        method: Method::Adaptive,
    };
    let mut worst: f64 = 0.0;
    let sep0 = named_state(NamedState::PsiOpt).unwrap().density();
    let ent0 = named_state(NamedState::PsiEAlpha(alpha)).unwrap().density();
    let sep = evolve_open_grid(&sep0, &h, &noise, &times, &cfg).unwrap();
    let ent = evolve_open_grid(&ent0, &h, &noise, &times, &cfg).unwrap();
    for (k, &t) in times.iter().enumerate() {
        let a = analytic_open_separable(g, kappa, t);
        let b = analytic_open_entangled(alpha, g, kappa, t).unwrap();
        worst = worst.max(sep[k].matrix().max_abs_diff(a.matrix()));
        worst = worst.max(ent[k].matrix().max_abs_diff(b.matrix()));
    }
    let elapsed = start.elapsed();
    let ok = worst < 1e-7 && elapsed.as_secs_f64() < 30.0;
    report(
        "4",
        ok,
        elapsed,
        &format!(
            "integrated vs analytic, 200 points x 2 states: max entry error {worst:.2e} (< 1e-7)"
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_05_figures_three_and_four() {
    let start = Instant::now();
    let mut failures = Vec::new();

    let p3: FigureParams = Figure::Fig3.defaults();
    let kappa = p3.kappa_over_g * p3.g;
    let probe3 = AnalyticOpenProbe::separable(kappa).unwrap();
    let s3 = series(&probe3, &p3.times());
    let p4: FigureParams = Figure::Fig4.defaults();
    let probe4 = AnalyticOpenProbe::entangled(p4.alpha, kappa).unwrap();
    let s4 = series(&probe4, &p4.times());
    let b = (1.0 - 2.0 * p4.alpha * p4.alpha).powi(2);

    let mut f_err: f64 = 0.0;
    let mut sld_err: f64 = 0.0;
    for (samples, factor) in [(&s3, 1.0), (&s4, b)] {
        for s in samples.iter() {
            let t = s.t;
            f_err = f_err.max((s.f - 4.0 * t * t * (-kappa * t).exp() * factor).abs());
            let cos = (2.0 * t).cos().abs();
            for &x in &s.c_sld {
                sld_err = sld_err.max((x - cos).abs());
            }
        }
    }
    // Independent check of the sampled QFI against a direct qfi_mixed call.
    for &t in &[0.3, 1.7, 4.0] {
        let rho = probe4.density(1.0, t).unwrap();
        let drho = probe4.drho(1.0, t, &DerivativeConfig::default()).unwrap();
        let f = qfi_mixed(&rho, &drho).unwrap();
        f_err = f_err.max((f - 4.0 * t * t * (-kappa * t).exp() * b).abs());
    }
    if f_err >= 1e-6 {
        failures.push(format!("F error {f_err:.2e}"));
    }
    if sld_err >= 1e-6 {
        failures.push(format!("C_SLD error {sld_err:.2e}"));
    }

    // Fig. 3: CoE undefined exactly where sin(2gt) vanishes.
    let mismatched: Vec<f64> = s3
        .iter()
        .filter(|s| s.coe.is_none() != ((2.0 * s.t).sin().abs() < 1e-9))
        .map(|s| s.t)
        .collect();
    if !mismatched.is_empty() {
        failures.push(format!("fig3 CoE definedness wrong at t = {mismatched:?}"));
    }

    // Fig. 4: CoE defined everywhere and equal to F G(gt).
    let mut g_err: f64 = 0.0;
    let mut undefined = 0;
    for s in &s4 {
        match s.coe {
            None => undefined += 1,
            Some(k) => {
                let expect = s.f * curvature_ratio(b, (2.0 * s.t).cos());
                g_err = g_err.max((k - expect).abs() / expect.abs().max(1e-3));
            }
        }
    }
    let mut unit_err = (curvature_ratio(b, 0.0) - 1.0).abs();
    for n in 0..4 {
        let t = FRAC_PI_4 + n as f64 * FRAC_PI_2;
        let s = sample(
            &probe4,
            1.0,
            t,
            &DerivativeConfig::default(),
            &CoincidenceConfig::default(),
        )
        .unwrap();
        unit_err = unit_err.max(s.coe.map_or(f64::INFINITY, |k| (k / s.f - 1.0).abs()));
    }
    if undefined > 0 || g_err >= 1e-4 || unit_err >= 1e-4 {
        failures.push(format!(
            "fig4 undefined {undefined}, CoE vs F G error {g_err:.2e}, G = 1 error {unit_err:.2e}"
        ));
    }
    let elapsed = start.elapsed();
    let ok = failures.is_empty() && elapsed.as_secs_f64() < 60.0;
    report(
        "5",
        ok,
        elapsed,
        &format!(
            "fig3/fig4 F error {f_err:.2e}, C_SLD error {sld_err:.2e}, CoE = F G error {g_err:.2e}, G(0) - 1 {unit_err:.2e} {failures:?}"
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_06_conjecture_scan() {
    let base = ScanConfig {
        seed: 20240607,
        n_hamiltonians: 1000,
        n_states: 10,
        gt_grid: (0.1, 10.0, 10),
        tolerance: 1e-6,
        workers: Some(1),
    };
    let start = Instant::now();
    let single = inequality_scan(&base).unwrap();
    let t1 = start.elapsed();
    let mut parallel = inequality_scan(&ScanConfig {
        workers: Some(4),
        ..base.clone()
    })
    .unwrap();
    // The echoed worker count is the only field allowed to differ.
    parallel.outcome.config.workers = base.workers;
    let t4 = parallel.wall_time_s;
    let speedup = single.wall_time_s / t4;
    let o = &single.outcome;
    let worst = o.worst.as_ref().map(|w| w.margin);
    let same = single.outcome == parallel.outcome;
    let cpus = std::thread::available_parallelism().map_or(1, |n| n.get());
    let ok = o.instances == 100_000
        && o.violations.is_empty()
        && worst.is_some()
        && t1.as_secs_f64() < 600.0
        && same
        && speedup >= 3.0;
    report(
        "6",
        ok,
        t1,
        &format!(
            "{} instances, {} violations, worst margin {worst:?}, {} undefined CoE; single-threaded {:.1} s (< 600 s); 4 workers {t4:.1} s, speedup {speedup:.2}x (>= 3x) on {cpus} CPU(s); outcomes identical: {same}",
            o.instances,
            o.violations.len(),
            o.undefined_coe,
            single.wall_time_s
        ),
    );
    assert!(ok);
}

fn orthogonality(r: &Mat3) -> f64 {
    let p = mat3_mul(&transpose3(r), r);
    let mut m: f64 = 0.0;
    for (i, row) in p.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            m = m.max((x - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    m
}

fn sorted_spectrum(h: &ComplexMatrix) -> Vec<f64> {
    let mut e = hermitian_eig(h).unwrap().eigenvalues;
    e.sort_by(f64::total_cmp);
    e
}

#[test]
fn criterion_07_canonicalization() {
    let start = Instant::now();
    let mut rng = rng_from_seed(7);
    let (mut svd_err, mut orth, mut lift, mut spectrum, mut conj): (f64, f64, f64, f64, f64) =
        (0.0, 0.0, 0.0, 0.0, 0.0);
    let mut improper = 0;
    for _ in 0..10_000 {
        let eta: Mat3 =
            std::array::from_fn(|_| std::array::from_fn(|_| rng.random_range(-1.0..1.0)));
        let s = svd3(&eta);
        let r = s.reconstruct();
        for i in 0..3 {
            for j in 0..3 {
                svd_err = svd_err.max((r[i][j] - eta[i][j]).abs());
            }
        }
        orth = orth.max(orthogonality(&s.u)).max(orthogonality(&s.v));
        if det3(&s.u) <= 0.0 || det3(&s.v) <= 0.0 {
            improper += 1;
        }
        let u1 = su2_from_so3(&s.u).unwrap();
        let u2 = su2_from_so3(&s.v).unwrap();
        lift = lift
            .max(adjoint_action_residual(&u1, &s.u))
            .max(adjoint_action_residual(&u2, &s.v));
        let cm = CouplingMatrix::new(eta, 1.0).unwrap();
        let ch = canonicalize(&cm).unwrap();
        conj = conj.max(ch.conjugation_residual(&cm));
        let a = sorted_spectrum(&build_matrix(&cm));
        let b = sorted_spectrum(&ch.matrix(1.0));
        for (x, y) in a.iter().zip(&b) {
            spectrum = spectrum.max((x - y).abs());
        }
    }
    // Permutation coupling: eta_tilde = (eta_yz, eta_xy, eta_zx).
    let (xy, yz, zx) = (0.7, 1.3, 0.4);
    let cm = CouplingMatrix::permutation(xy, yz, zx, 1.0).unwrap();
    let ch = canonicalize(&cm).unwrap();
    let perm_ok = ch.eta == [yz, xy, zx] && ch.conjugation_residual(&cm) < 1e-12;
    let elapsed = start.elapsed();
    let ok = svd_err < 1e-12
        && orth < 1e-12
        && improper == 0
        && lift < 1e-10
        && spectrum < 1e-10
        && conj < 1e-10
        && perm_ok
        && elapsed.as_secs_f64() < 60.0;
    report(
        "7",
        ok,
        elapsed,
        &format!(
            "10^4 couplings: svd {svd_err:.1e}, orthogonality {orth:.1e}, improper {improper}, lift {lift:.1e}, spectrum {spectrum:.1e}, conjugation {conj:.1e}; permutation eta_tilde {:?}",
            ch.eta
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_08_frame_equivalence() {
    let start = Instant::now();
    let mut rng = rng_from_seed(8);
    let times: Vec<f64> = (1..=5).map(|i| 0.6 * i as f64).collect();
    let cfg = EvolveConfig::expm();
    let kappa = 0.5;
    let mut worst: f64 = 0.0;
    for k in 0..100u64 {
        let eta: Mat3 =
            std::array::from_fn(|_| std::array::from_fn(|_| rng.random_range(-1.0..1.0)));
        let cm = CouplingMatrix::new(eta, 1.0).unwrap();
        let ch = canonicalize(&cm).unwrap();
        let kk = ch.local_unitary();
        let rho_can = random_pure_state(800 + k).to_computational().density();
        let rho_orig = DensityMatrix::new(
            kk.adjoint().matmul(rho_can.matrix()).matmul(&kk),
            Basis::Computational,
        )
        .unwrap();
        let canonical = evolve_open_grid(
            &rho_can,
            &ch.matrix(1.0),
            &NoiseSpec::amplitude_damping(kappa).unwrap(),
            &times,
            &cfg,
        )
        .unwrap();
        let jumps = rotate_jump_operators(&ch.u1, &ch.u2, &default_jumps()).unwrap();
        let original = evolve_open_grid(
            &rho_orig,
            &build_matrix(&cm),
            &NoiseSpec::new(kappa, jumps).unwrap(),
            &times,
            &cfg,
        )
        .unwrap();
        for (a, b) in original.iter().zip(&canonical) {
            let mapped = kk.matmul(a.matrix()).matmul(&kk.adjoint());
            worst = worst.max(mapped.max_abs_diff(b.matrix()));
        }
    }
    let elapsed = start.elapsed();
    let ok = worst < 1e-6 && elapsed.as_secs_f64() < 60.0;
    report(
        "8",
        ok,
        elapsed,
        &format!("100 random states, rotated jumps vs canonical damping: max entry error {worst:.2e} (< 1e-6)"),
    );
    assert!(ok);
}

#[test]
fn criterion_09_fidelity_relation() {
    let start = Instant::now();
    let probe = closed_probe(NamedState::PsiOpt, 1.0);
    let deltas = [0.2, 0.1, 0.05, 0.025];
    let mut orders = Vec::new();
    let mut qfi_err: f64 = 0.0;
    for n in 0..3 {
        let t = FRAC_PI_4 + n as f64 * FRAC_PI_2;
        let r: Vec<f64> = deltas
            .iter()
            .map(|&d| {
                fidelity_relation_check(&probe, 1.0, t, d)
                    .unwrap()
                    .residual
                    .abs()
            })
            .collect();
        for w in r.windows(2) {
            orders.push((w[0] / w[1]).log2());
        }
        let est = fidelity_relation_check(&probe, 1.0, t, 1e-3)
            .unwrap()
            .qfi_estimate;
        let exact = closed_form_suite(Family::PsiOpt { eta_xy: 1.0 }, 1.0, t)
            .unwrap()
            .f;
        qfi_err = qfi_err.max(rel(est, exact, 0.0));
    }
    let min_order = orders.iter().cloned().fold(f64::INFINITY, f64::min);
    let elapsed = start.elapsed();
    let ok = min_order >= 2.5 && qfi_err < 1e-3;
    report(
        "9",
        ok,
        elapsed,
        &format!(
            "psi_opt at 3 coincidences: minimum observed residual order {min_order:.3} (>= 2.5), QFI estimate error at dg = 1e-3 {qfi_err:.2e} (< 1e-3)"
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_10_transcendental_roots() {
    let start = Instant::now();
    let (g, eta) = (1.0, 1.0);
    let roots = transcendental_roots(RootKind::Closed { g, eta }, 21).unwrap();
    let gaps: Vec<f64> = roots
        .iter()
        .map(|r| (r.t * g * eta - (2 * r.n + 1) as f64 * FRAC_PI_4).abs())
        .collect();
    let decreasing = gaps[5..=20].windows(2).all(|w| w[1] < w[0]);
    let max_residual = roots.iter().map(|r| r.residual.abs()).fold(0.0, f64::max);
    let elapsed = start.elapsed();
    let ok = decreasing && max_residual < 1e-10;
    report(
        "10",
        ok,
        elapsed,
        &format!(
            "closed roots: gaps decreasing for n = 5..20: {decreasing} ({:.2e} -> {:.2e}), max residual {max_residual:.1e} (< 1e-10)",
            gaps[5], gaps[20]
        ),
    );
    assert!(ok);
}
