//! Acceptance suite. Every criterion prints one `PASS`/`FAIL` line with the
//! numbers behind it; the process fails when any criterion fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::Instant;

use magnomech::adiabatic::{effective_params, EffectiveParams};
use magnomech::covariance::{
    analytic_nbs, build_effective, evolve, stability, steady_state, CovarianceState, EvolveMethod,
};
use magnomech::fockdyn::{
    evolve_density, fidelity_trajectory, DensityMatrix, EvolveOptions, FockSpace, Lindbladian, Truncation,
};
use magnomech::model::{DecayConvention, LinearModel, Mode};
use magnomech::params::{steady_state_amplitudes, SystemParams, GYROMAGNETIC_RATIO};
use magnomech::presets::Preset;
use magnomech::spectrum::{cooling_rates, detuning_sweep, field_sweep, linspace, self_energy_damping};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CONV: DecayConvention = DecayConvention::MasterEquation;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn red_sideband(g: f64, kappa_eff: f64, n_th: f64) -> EffectiveParams {
    EffectiveParams {
        delta_eff: -1.0,
        kappa_eff,
        g: Complex64::new(g, 0.0),
        omega_b: 1.0,
        gamma_b: 1e-5,
        n_th,
    }
}

fn fig3_effective() -> EffectiveParams {
    let p = Preset::Fig3.system();
    effective_params(&p, steady_state_amplitudes(&p).unwrap().g).normalized()
}

fn phonon_steady(e: &EffectiveParams) -> f64 {
    let dd = build_effective(e, CONV);
    steady_state(&dd).unwrap().occupation(dd.index_of(Mode::B).unwrap())
}

fn c1_analytic() -> Outcome {
    let n = analytic_nbs(0.4, 0.3, 1e-5, 1.0, 1000.0).unwrap();
    let reps = 10_000;
    let start = Instant::now();
    let mut acc = 0.0;
    for i in 0..reps {
        acc += analytic_nbs(0.4 + i as f64 * 1e-12, 0.3, 1e-5, 1.0, 1000.0).unwrap();
    }
    let per_call = start.elapsed().as_secs_f64() / reps as f64;
    assert!(acc.is_finite());
    ensure(
        (n - 0.257).abs() <= 0.002 && per_call < 1e-3,
        format!("N_bs = {n:.5} (target 0.257 +- 0.002), {:.2e} s per call", per_call),
    )
}

fn c2_lyapunov() -> Outcome {
    let closed = analytic_nbs(0.4, 0.3, 1e-5, 1.0, 1000.0).unwrap();
    let lyap = phonon_steady(&red_sideband(0.4, 0.3, 1000.0));
    let rel = (lyap - closed).abs() / closed;
    ensure(
        (0.25..=0.29).contains(&lyap) && rel < 0.10,
        format!("Lyapunov N_bs = {lyap:.5}, closed form {closed:.5}, relative gap {rel:.3}"),
    )
}

fn c3_fixed_point() -> Outcome {
    let e = red_sideband(0.4, 0.3, 1000.0);
    let dd = build_effective(&e, CONV);
    let rate = dd.slowest_rate();
    let t_end = 10.0 / rate;
    let vss = steady_state(&dd).unwrap();
    let v0 = CovarianceState::thermal(&[0.0, e.n_th]);
    let grid = linspace(0.0, t_end, 2001);
    let states = evolve(&dd, &v0, &grid, EvolveMethod::Propagator).unwrap();
    let dist = |v: &CovarianceState| (&v.v - &vss.v).norm();
    let abs = dist(states.last().unwrap());
    let rel = abs / dist(&v0);
    let later = evolve(&dd, &v0, &[0.0, 2.0 * t_end], EvolveMethod::Propagator).unwrap();
    let abs_later = dist(&later[1]);

    let b = dd.index_of(Mode::B).unwrap();
    let n_b: Vec<f64> = states.iter().map(|s| s.occupation(b)).collect();
    let variance = |xs: &[f64]| {
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64
    };
    let tenth = n_b.len() / 10;
    let (early, late) = (variance(&n_b[..tenth]), variance(&n_b[n_b.len() - tenth..]));
    let oscillates = n_b[..tenth].windows(3).any(|w| w[1] > w[0] && w[1] > w[2]);
    ensure(
        rel < 1e-8 && abs_later < 1e-8 && late < 1e-4 * early && oscillates,
        format!(
            "gamma_eff = {rate:.4}, at t = 10/gamma_eff relative distance {rel:.2e} (absolute {abs:.2e}), \
             at 20/gamma_eff absolute {abs_later:.2e}; late/early variance {:.2e}",
            late / early
        ),
    )
}

fn c4_spectrum_extremum() -> Outcome {
    let e = fig3_effective();
    let mut details = Vec::new();
    let mut ok = true;
    for (g, bound) in [(0.15, 1e-1), (0.075, 3e-1)] {
        let sweep = detuning_sweep(&e, Complex64::new(g, 0.0), -3.0, 3.0, 601).unwrap();
        let peak = sweep.rows[sweep.argmax_damping].delta_eff;
        let i = sweep.argmin_n_f.expect("a valid n_f");
        let (at, n_f) = (sweep.rows[i].delta_eff, sweep.rows[i].cooling.n_f);
        ok &= (peak + 1.0).abs() < 0.005 && (at + 1.0).abs() < 0.005 && n_f < bound;
        details.push(format!("G = {g}: max damping at {peak:.3}, min n_f = {n_f:.4} at {at:.3}"));
    }
    ensure(ok, details.join("; "))
}

fn c5_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut worst_damping, mut worst_split) = (0.0f64, 0.0f64);
    for _ in 0..10_000 {
        let e = EffectiveParams {
            delta_eff: rng.gen_range(-3.0..3.0),
            kappa_eff: rng.gen_range(0.01..1.0),
            g: Complex64::from_polar(rng.gen_range(0.0..0.6), rng.gen_range(0.0..std::f64::consts::TAU)),
            omega_b: 1.0,
            gamma_b: 10f64.powf(rng.gen_range(-6.0..-1.0)),
            n_th: rng.gen_range(0.0..1000.0),
        };
        let r = cooling_rates(&e).unwrap();
        let scale = r.a_minus.max(r.a_plus).max(f64::MIN_POSITIVE);
        let via_sigma = self_energy_damping(&e).unwrap();
        worst_damping = worst_damping
            .max((r.gamma_md - (r.a_minus - r.a_plus)).abs() / scale)
            .max((r.gamma_md - via_sigma).abs() / scale);
        let parts = r.quantum_part() + r.classical_part();
        worst_split = worst_split.max((parts - r.n_f).abs() / r.n_f.abs().max(f64::MIN_POSITIVE));
    }
    ensure(
        worst_damping <= 1e-12 && worst_split <= 4.0 * f64::EPSILON,
        format!("10^4 draws: worst damping mismatch {worst_damping:.2e}, worst decomposition mismatch {worst_split:.2e}"),
    )
}

fn eigen_boundary(kappa: f64) -> f64 {
    let unstable = |g: f64| !stability(&red_sideband(g, kappa, 0.0), Complex64::new(g, 0.0), CONV).stable();
    let (mut lo, mut hi) = (0.3, 1.0);
    assert!(!unstable(lo) && unstable(hi));
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if unstable(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn c6_stability_boundary() -> Outcome {
    let mut worst = 0.0f64;
    for kappa in linspace(0.05, 0.5, 20) {
        let analytic = (0.25 + kappa * kappa / 16.0).sqrt();
        worst = worst.max((eigen_boundary(kappa) - analytic).abs());
    }
    ensure(worst < 1e-4, format!("20 kappa_eff values: worst |G_eig - G_analytic| = {worst:.2e} omega_b"))
}

fn c7_cross_formalism() -> Outcome {
    let mut details = Vec::new();
    let mut ok = true;
    for n_th in [0.0, 10.0, 1000.0] {
        let e = red_sideband(0.1, 0.19, n_th);
        let spectrum = cooling_rates(&e).unwrap().n_f;
        let lyap = phonon_steady(&e);
        let rel = (spectrum - lyap).abs() / lyap;
        ok &= rel < 0.15;
        details.push(format!(
            "n_th = {n_th}: spectrum {spectrum:.5}, covariance {lyap:.5}, gap {:.1}%",
            100.0 * rel
        ));
    }
    ensure(ok, details.join("; "))
}

fn c8_gaussian_exactness() -> Outcome {
    let mut e = fig3_effective().with_coupling(Complex64::new(0.1, 0.0));
    e.n_th = 0.5;
    let model = LinearModel::effective(&e, CONV);
    let space = FockSpace::new(&[Mode::M, Mode::B], &[6, 8]).unwrap();
    let l = Lindbladian::from_model(&space, &model).unwrap();
    let grid = linspace(0.0, 50.0, 101);
    let traj =
        evolve_density(&DensityMatrix::vacuum(&space), &grid, &l, &EvolveOptions::default(), |_, _| {})
            .unwrap();
    let dd = build_effective(&e, CONV);
    let cov = evolve(&dd, &CovarianceState::vacuum(2), &grid, EvolveMethod::Propagator).unwrap();
    let b = dd.index_of(Mode::B).unwrap();
    let worst = traj
        .occupations
        .iter()
        .zip(&cov)
        .map(|(occ, c)| (occ[1] - c.occupation(b)).abs())
        .fold(0.0, f64::max);
    ensure(
        worst < 1e-3 && traj.max_trace_drift < 1e-8,
        format!("max |<b+b>_fock - <b+b>_cov| = {worst:.2e}, trace drift {:.2e}", traj.max_trace_drift),
    )
}

fn c9_fidelity() -> Outcome {
    let mut p = Preset::Fig3.system();
    p.n_th = 0.2;
    let g = steady_state_amplitudes(&p).unwrap().g;
    let grid = linspace(0.0, 30.0, 61);
    let pts =
        fidelity_trajectory(&p, g, CONV, Truncation::default(), &grid, &EvolveOptions::default()).unwrap();
    let f0 = pts[0].fidelity;
    let min = pts.iter().map(|x| x.fidelity).fold(f64::INFINITY, f64::min);
    let end = pts.last().unwrap().fidelity;
    ensure(
        (f0 - 1.0).abs() <= 1e-9 && min > 0.95 && end > 0.99,
        format!("F(0) = {f0:.12}, min F = {min:.5}, F(30) = {end:.5} (n_th = 0.2, dims a5 m6 b8)"),
    )
}

fn c10_validity() -> Outcome {
    use magnomech::validate::{check_regimes, Status, Thresholds};
    let p = Preset::Physical.system();
    let amp = steady_state_amplitudes(&p).unwrap();
    let e = effective_params(&p, amp.g);
    let r = check_regimes(&p, &amp, &e, CONV, &Thresholds::default());
    let close = |x: f64, want: f64| (x - want).abs() <= 0.02 * want;
    let low = r.get("low_lying").unwrap();
    let kerr = r.get("kerr").unwrap();
    let (n, five_n, k, eps) = (low.lhs.unwrap(), low.rhs.unwrap(), kerr.lhs.unwrap(), kerr.rhs.unwrap());
    ensure(
        close(n, 1.6e15)
            && close(five_n, 1.1e19)
            && close(k, 6.4e12)
            && close(eps, 4e14)
            && r.overall == Status::Pass,
        format!(
            "<m+m> = {n:.4e}, 5N = {five_n:.4e}, K|m|^3 = {k:.4e} Hz, eps_d = {eps:.4e} Hz, overall {}",
            r.overall.label()
        ),
    )
}

fn window(p: &SystemParams, g: f64, fields: &[f64]) -> (f64, f64) {
    let sweep = field_sweep(p, Complex64::new(g * p.omega_b, 0.0), fields, None).unwrap();
    assert!(sweep.window_contiguous, "n_f < 1 region split for G = {g}");
    sweep.window_fields().expect("a ground-state window")
}

fn c11_field_window() -> Outcome {
    let p = Preset::Fig3.system();
    let h0 = p.h_bias.unwrap();
    let half = 3.0 * p.omega_b / GYROMAGNETIC_RATIO;
    let fields = linspace(h0 - half, h0 + half, 2001);
    let (lo10, hi10) = window(&p, 0.1, &fields);
    let (lo15, hi15) = window(&p, 0.15, &fields);
    ensure(
        lo15 < lo10 && hi10 < hi15,
        format!("G = 0.1: [{lo10:.6}, {hi10:.6}] T, G = 0.15: [{lo15:.6}, {hi15:.6}] T"),
    )
}

fn run_cli(args: &[&str], jobs: &str) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_magnomech"))
        .args(args)
        .args(["--jobs", jobs])
        .env_remove("MAGNOMECH_JOBS")
        .output()
        .expect("binary runs");
    assert!(out.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

fn c12_determinism() -> Outcome {
    let runs: [&[&str]; 7] = [
        &["derive", "--preset", "physical"],
        &["sweep-detuning", "--preset", "fig3"],
        &["sweep-field", "--preset", "physical"],
        &["steady", "--preset", "fig3", "--format", "json"],
        &["evolve", "--preset", "fig3", "--model", "full"],
        &["fidelity", "--preset", "fig3", "--t-end", "2", "--points", "5"],
        &["validate", "--preset", "physical"],
    ];
    let mut differing = Vec::new();
    for args in runs {
        let one = run_cli(args, "1");
        if one != run_cli(args, "8") || one != run_cli(args, "1") {
            differing.push(args[0]);
        }
    }
    ensure(
        differing.is_empty(),
        format!("{} commands compared at --jobs 1 and 8; differing: {differing:?}", runs.len()),
    )
}

fn main() {
    let criteria: [Criterion; 12] = [
        ("analytic N_bs", c1_analytic),
        ("Lyapunov vs analytic", c2_lyapunov),
        ("evolution fixed point", c3_fixed_point),
        ("cooling spectrum extremum", c4_spectrum_extremum),
        ("identity suite", c5_identities),
        ("stability boundary", c6_stability_boundary),
        ("cross-formalism weak coupling", c7_cross_formalism),
        ("Gaussian exactness", c8_gaussian_exactness),
        ("fidelity profile", c9_fidelity),
        ("validity report", c10_validity),
        ("field-sweep window", c11_field_window),
        ("determinism", c12_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|e| Err(format!("panicked: {}", panic_text(&e))));
        let secs = start.elapsed().as_secs_f64();
        let (label, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {label} {name} [{secs:.2} s]: {detail}", i + 1);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn panic_text(e: &Box<dyn std::any::Any + Send>) -> String {
    e.downcast_ref::<String>()
        .cloned()
        .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
        .unwrap_or_else(|| "unknown panic".into())
}
