//! Table builders behind each subcommand.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde_json::{json, Value};

use super::config::ConfigFile;
use super::table::{round_sig, Cell, ResultTable};
use super::{Command, Common, Coupling, EvolveMethod, Initial, ModelKind, SteadyMethod};
use crate::adiabatic::{adiabatic_regime_ok, effective_params, EffectiveParams};
use crate::covariance::{self, analytic_nbs, stability, steady_state, CovarianceState, DriftDiffusion};
use crate::error::{Error, Result};
use crate::fockdyn::{
    evolve_density, fidelity_trajectory, DensityMatrix, EvolveOptions, FockSpace, Lindbladian, Truncation,
};
use crate::model::{DecayConvention, LinearModel, Mode};
use crate::params::{
    bias_field_for, steady_state_amplitudes, SteadyAmplitudes, SystemParams, GYROMAGNETIC_RATIO,
};
use crate::spectrum::{cooling_rates, detuning_sweep, field_sweep, linspace};
use crate::validate::{check_regimes, Thresholds};

/// Bath occupation of the fidelity run when `--n-th` is absent.
const FIDELITY_N_TH: f64 = 0.2;
/// Half-width of the default field window, in units of ω_b/γ_g.
const FIELD_HALF_WIDTH: f64 = 3.0;

/// Parameters with the command-line overrides applied, plus the coupling
/// in rad/s and the amplitudes that carry it.
struct Resolved {
    p: SystemParams,
    amp: SteadyAmplitudes,
    g: Complex64,
    kappa_eff: Option<f64>,
}

impl Resolved {
    fn new(common: &Common, c: &Coupling, default_n_th: Option<f64>) -> Result<Self> {
        let mut p = common.params()?;
        if let Some(n) = c.n_th.or(default_n_th) {
            if !(n >= 0.0) || !n.is_finite() {
                return Err(Error::Config(format!("--n-th must be a non-negative number, got {n}")));
            }
            p.n_th = n;
            p.t_env = None;
        }
        let w = p.omega_b;
        let amp = match c.g {
            Some(g) if !g.is_finite() => return Err(Error::Config(format!("--g must be finite, got {g}"))),
            Some(g) => SteadyAmplitudes::for_coupling(&p, Complex64::new(g * w, 0.0))?,
            None => steady_state_amplitudes(&p)?,
        };
        let kappa_eff = match c.kappa_eff {
            Some(k) if !(k > 0.0) || !k.is_finite() => {
                return Err(Error::Config(format!("--kappa-eff must be positive, got {k}")))
            }
            other => other.map(|k| k * w),
        };
        Ok(Resolved { g: amp.g, amp, p, kappa_eff })
    }

    /// Effective parameters in rad/s.
    fn effective(&self) -> EffectiveParams {
        let mut e = effective_params(&self.p, self.g);
        if let Some(k) = self.kappa_eff {
            e.kappa_eff = k;
        }
        e
    }

    fn w(&self) -> f64 {
        self.p.omega_b
    }
}

fn num(x: f64) -> Value {
    json!(round_sig(x))
}

fn coupling_json(c: &Coupling) -> Value {
    json!({ "g": c.g, "kappa_eff": c.kappa_eff, "n_th": c.n_th })
}

fn header(
    table: &mut ResultTable,
    command: &Command,
    conv: DecayConvention,
    options: Value,
    p: &SystemParams,
) {
    table.meta("tool", json!(format!("magnomech {}", env!("CARGO_PKG_VERSION"))));
    table.meta("command", json!(command.name()));
    table.meta("convention", json!(conv.name()));
    table.meta("options", options);
    table.meta("params", ConfigFile::from_params(p).to_json());
}

pub(super) fn build_table(command: &Command) -> Result<ResultTable> {
    match command {
        Command::Derive { common, coupling } => derive(command, common, coupling),
        Command::SweepDetuning { common, coupling, from, to, points } => {
            sweep_detuning(command, common, coupling, *from, *to, *points)
        }
        Command::SweepField { common, coupling, from, to, points } => {
            sweep_field(command, common, coupling, *from, *to, *points)
        }
        Command::Evolve { common, coupling, method, model, initial, dims, t_end, points } => {
            let opts = EvolveArgs {
                method: *method,
                model: *model,
                initial: *initial,
                dims: *dims,
                t_end: *t_end,
                points: *points,
            };
            evolve(command, common, coupling, &opts)
        }
        Command::Steady { common, coupling, method } => steady(command, common, coupling, *method),
        Command::Fidelity { common, coupling, dims, t_end, points } => {
            fidelity(command, common, coupling, *dims, *t_end, *points)
        }
        Command::Validate { common, coupling, kerr_hz } => validate(command, common, coupling, *kerr_hz),
    }
}

fn derive(command: &Command, common: &Common, c: &Coupling) -> Result<ResultTable> {
    let r = Resolved::new(common, c, None)?;
    let w = r.w();
    let e = r.effective();
    let verdict = stability(&e, r.g, common.convention);
    let mut t = ResultTable::new(&[("quantity", "-"), ("value", "-"), ("unit", "-")]);
    header(&mut t, command, common.convention, coupling_json(c), &r.p);
    let mut row = |name: &str, value: f64, unit: &str| t.push(vec![name.into(), value.into(), unit.into()]);
    row("delta_a", r.p.delta_a() / w, "omega_b");
    row("delta_m", r.p.delta_m() / w, "omega_b");
    row("eps_d_re", r.p.eps_d.re / w, "omega_b");
    row("eps_d_im", r.p.eps_d.im / w, "omega_b");
    row("eta_re", r.amp.eta.re, "1");
    row("eta_im", r.amp.eta.im, "1");
    row("eta_abs", r.amp.eta.norm(), "1");
    row("magnon_number", r.amp.eta.norm_sqr(), "1");
    row("beta_re", r.amp.beta.re, "1");
    row("beta_im", r.amp.beta.im, "1");
    row("g_re", r.g.re / w, "omega_b");
    row("g_im", r.g.im / w, "omega_b");
    row("g_abs", r.g.norm() / w, "omega_b");
    row("g_abs_hz", r.g.norm() / TAU, "Hz");
    row("delta_m_tilde", r.amp.delta_m_tilde / w, "omega_b");
    row("mean_field_shift", r.amp.mean_field_shift / w, "omega_b");
    row("delta_eff", e.delta_eff / w, "omega_b");
    row("kappa_eff", e.kappa_eff / w, "omega_b");
    row("gamma_b", e.gamma_b / w, "omega_b");
    row("n_th", e.n_th, "1");
    row("adiabatic_ok", f64::from(u8::from(adiabatic_regime_ok(&r.p, r.g))), "bool");
    row("stability_threshold", verdict.analytic_threshold / w, "omega_b");
    row("max_re_lambda", verdict.max_real_part / w, "omega_b");
    row("stable", f64::from(u8::from(verdict.eigen_stable)), "bool");
    if let Some(h) = r.p.h_bias {
        row("h_bias", h, "T");
    }
    Ok(t)
}

fn sweep_detuning(
    command: &Command,
    common: &Common,
    c: &Coupling,
    from: f64,
    to: f64,
    points: usize,
) -> Result<ResultTable> {
    if !(from.is_finite() && to.is_finite() && from < to) {
        return Err(Error::Config(format!("need finite --from < --to, got {from}..{to}")));
    }
    let r = Resolved::new(common, c, None)?;
    let w = r.w();
    let e = r.effective().normalized();
    let sweep = detuning_sweep(&e, e.g, from, to, points)?;
    let mut t = ResultTable::new(&[
        ("delta_eff", "omega_b"),
        ("a_minus", "omega_b"),
        ("a_plus", "omega_b"),
        ("gamma_md", "omega_b"),
        ("delta_omega_b", "omega_b"),
        ("n_f", "1"),
        ("gamma_md_si", "rad/s"),
        ("delta_omega_b_si", "rad/s"),
        ("status", "-"),
    ]);
    let options = json!({ "coupling": coupling_json(c), "from": from, "to": to, "points": points });
    header(&mut t, command, common.convention, options, &r.p);
    let best = &sweep.rows[sweep.argmax_damping];
    t.meta("max_damping_at", num(best.delta_eff));
    if let Some(i) = sweep.argmin_n_f {
        t.meta("min_n_f_at", num(sweep.rows[i].delta_eff));
    }
    for row in &sweep.rows {
        let k = &row.cooling;
        t.push(vec![
            row.delta_eff.into(),
            k.a_minus.into(),
            k.a_plus.into(),
            k.gamma_md.into(),
            k.delta_omega_b.into(),
            k.n_f.into(),
            (k.gamma_md * w).into(),
            (k.delta_omega_b * w).into(),
            status_label(k.status).into(),
        ]);
    }
    Ok(t)
}

fn status_label(s: crate::spectrum::CoolingStatus) -> &'static str {
    use crate::spectrum::CoolingStatus::*;
    match s {
        Cooling => "cooling",
        Heating => "heating",
        Gain => "gain",
    }
}

/// Bias field at which the eliminated detuning sits on the red sideband.
pub fn red_sideband_field(p: &SystemParams) -> Result<f64> {
    let da = p.delta_a();
    let pull = p.g_ma.norm_sqr() / (da * da + p.kappa_a * p.kappa_a);
    let delta_m = -p.omega_b + pull * da;
    bias_field_for(p.omega_d - delta_m)
}

fn sweep_field(
    command: &Command,
    common: &Common,
    c: &Coupling,
    from: Option<f64>,
    to: Option<f64>,
    points: usize,
) -> Result<ResultTable> {
    let r = Resolved::new(common, c, None)?;
    let w = r.w();
    let h0 = red_sideband_field(&r.p)?;
    let half = FIELD_HALF_WIDTH * w / GYROMAGNETIC_RATIO;
    let (lo, hi) = (from.unwrap_or(h0 - half), to.unwrap_or(h0 + half));
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Config(format!("need finite --from < --to, got {lo}..{hi}")));
    }
    let fields = linspace(lo, hi, points);
    let sweep = field_sweep(&r.p, r.g, &fields, r.kappa_eff)?;
    let mut t = ResultTable::new(&[
        ("h", "T"),
        ("delta_eff", "omega_b"),
        ("gamma_md", "omega_b"),
        ("n_f", "1"),
        ("delta_eff_si", "rad/s"),
        ("gamma_md_si", "rad/s"),
        ("status", "-"),
    ]);
    let options = json!({ "coupling": coupling_json(c), "from": lo, "to": hi, "points": points });
    header(&mut t, command, common.convention, options, &r.p);
    t.meta("red_sideband_field", num(h0));
    if let Some(i) = sweep.argmin_n_f {
        t.meta("min_n_f", num(sweep.rows[i].cooling.n_f));
        t.meta("min_n_f_at", num(sweep.rows[i].h));
    }
    if let Some((a, b)) = sweep.window_fields() {
        t.meta("ground_state_window", json!([num(a), num(b)]));
    }
    for row in &sweep.rows {
        t.push(vec![
            row.h.into(),
            (row.delta_eff / w).into(),
            (row.cooling.gamma_md / w).into(),
            row.cooling.n_f.into(),
            row.delta_eff.into(),
            row.cooling.gamma_md.into(),
            status_label(row.cooling.status).into(),
        ]);
    }
    Ok(t)
}

struct EvolveArgs {
    method: EvolveMethod,
    model: ModelKind,
    initial: Initial,
    dims: Truncation,
    t_end: f64,
    points: usize,
}

fn evolve(command: &Command, common: &Common, c: &Coupling, a: &EvolveArgs) -> Result<ResultTable> {
    if !(a.t_end > 0.0 && a.t_end.is_finite()) || a.points < 2 {
        return Err(Error::Config("need --t-end > 0 and --points >= 2".into()));
    }
    let r = Resolved::new(common, c, None)?;
    let conv = common.convention;
    let model = match a.model {
        ModelKind::Effective => LinearModel::effective(&r.effective(), conv),
        ModelKind::Full => {
            if r.kappa_eff.is_some() {
                return Err(Error::Config("--kappa-eff only applies to the effective model".into()));
            }
            LinearModel::full(&r.p, r.g, r.p.delta_m(), conv)
        }
    }
    .rescaled(r.w());
    let occupations: Vec<f64> = model
        .modes
        .iter()
        .map(|&m| if m == Mode::B && a.initial == Initial::Thermal { r.p.n_th } else { 0.0 })
        .collect();
    let grid = linspace(0.0, a.t_end, a.points);

    let labels: Vec<String> = model.modes.iter().map(|m| format!("n_{}", m.label())).collect();
    let mut columns: Vec<(&str, &str)> = vec![("t", "1/omega_b")];
    columns.extend(labels.iter().map(|l| (l.as_str(), "1")));
    let mut t = ResultTable::new(&columns);
    let options = json!({
        "coupling": coupling_json(c),
        "method": format!("{:?}", a.method).to_lowercase(),
        "model": format!("{:?}", a.model).to_lowercase(),
        "initial": format!("{:?}", a.initial).to_lowercase(),
        "dims": a.dims,
        "t_end": a.t_end,
        "points": a.points,
    });
    header(&mut t, command, conv, options, &r.p);

    let rows: Vec<Vec<f64>> = match a.method {
        EvolveMethod::Covariance => {
            let dd = DriftDiffusion::from_model(&model);
            let v0 = CovarianceState::thermal(&occupations);
            let states = covariance::evolve(&dd, &v0, &grid, covariance::EvolveMethod::Propagator)?;
            t.meta("slowest_rate", num(dd.slowest_rate()));
            t.meta("stable", json!(dd.is_stable()));
            states.iter().map(|s| (0..dd.n_modes()).map(|i| s.occupation(i)).collect()).collect()
        }
        EvolveMethod::Fock => {
            let dims: Vec<usize> = model
                .modes
                .iter()
                .map(|m| match m {
                    Mode::A => a.dims.a,
                    Mode::M => a.dims.m,
                    Mode::B => a.dims.b,
                })
                .collect();
            let space = FockSpace::new(&model.modes, &dims)?;
            let l = Lindbladian::from_model(&space, &model)?;
            let rho0 = DensityMatrix::thermal(&space, &occupations)?;
            let traj = evolve_density(&rho0, &grid, &l, &EvolveOptions::default(), |_, _| {})?;
            t.meta("step", num(traj.dt));
            traj.occupations
        }
    };
    for (time, occ) in grid.iter().zip(rows) {
        let mut row: Vec<Cell> = vec![(*time).into()];
        row.extend(occ.into_iter().map(Cell::from));
        t.push(row);
    }
    Ok(t)
}

fn steady(command: &Command, common: &Common, c: &Coupling, method: SteadyMethod) -> Result<ResultTable> {
    let r = Resolved::new(common, c, None)?;
    let conv = common.convention;
    let e = r.effective().normalized();
    let verdict = stability(&e, e.g, conv);
    let mut t = ResultTable::new(&[("method", "-"), ("n_b", "1")]);
    let options = json!({ "coupling": coupling_json(c), "method": format!("{method:?}").to_lowercase() });
    header(&mut t, command, conv, options, &r.p);
    t.meta("g", num(e.g.norm()));
    t.meta("delta_eff", num(e.delta_eff));
    t.meta("kappa_eff", num(e.kappa_eff));
    t.meta("stability_threshold", num(verdict.analytic_threshold));
    t.meta("stable", json!(verdict.eigen_stable));
    if !verdict.eigen_stable {
        return Err(Error::Unstable(format!(
            "|G| = {:.6} omega_b: drift eigenvalue with real part {:.3e}",
            e.g.norm(),
            verdict.max_real_part
        )));
    }
    let want = |m: SteadyMethod| method == SteadyMethod::All || method == m;
    if want(SteadyMethod::Analytic) {
        let n = analytic_nbs(e.g.norm(), e.kappa_eff, e.gamma_b, e.omega_b, e.n_th)?;
        t.push(vec!["analytic".into(), n.into()]);
    }
    if want(SteadyMethod::Spectrum) {
        t.push(vec!["spectrum".into(), cooling_rates(&e)?.n_f.into()]);
    }
    if want(SteadyMethod::Lyapunov) {
        let dd = covariance::build_effective(&e, conv);
        let ss = steady_state(&dd)?;
        let b = dd.index_of(Mode::B).expect("effective model has a phonon");
        t.push(vec!["lyapunov".into(), ss.occupation(b).into()]);
    }
    if want(SteadyMethod::Full3mode) {
        if r.kappa_eff.is_some() {
            if method == SteadyMethod::Full3mode {
                return Err(Error::Config("--kappa-eff has no meaning for the three-mode model".into()));
            }
            t.meta("full3mode", json!("skipped: kappa_eff overridden"));
        } else {
            let model = LinearModel::full(&r.p, r.g, r.p.delta_m(), conv).rescaled(r.w());
            let dd = DriftDiffusion::from_model(&model);
            let ss = steady_state(&dd)?;
            let b = dd.index_of(Mode::B).expect("three-mode model has a phonon");
            t.push(vec!["full3mode".into(), ss.occupation(b).into()]);
        }
    }
    Ok(t)
}

fn fidelity(
    command: &Command,
    common: &Common,
    c: &Coupling,
    dims: Truncation,
    t_end: f64,
    points: usize,
) -> Result<ResultTable> {
    if c.kappa_eff.is_some() {
        return Err(Error::Config(
            "fidelity compares against the derived kappa_eff; drop --kappa-eff".into(),
        ));
    }
    if !(t_end > 0.0 && t_end.is_finite()) || points < 2 {
        return Err(Error::Config("need --t-end > 0 and --points >= 2".into()));
    }
    let r = Resolved::new(common, c, Some(FIDELITY_N_TH))?;
    let grid = linspace(0.0, t_end, points);
    let pts = fidelity_trajectory(&r.p, r.g, common.convention, dims, &grid, &EvolveOptions::default())?;
    let mut t =
        ResultTable::new(&[("t", "1/omega_b"), ("fidelity", "1"), ("n_b_full", "1"), ("n_b_eff", "1")]);
    let options = json!({ "coupling": coupling_json(c), "dims": dims, "t_end": t_end, "points": points });
    header(&mut t, command, common.convention, options, &r.p);
    let min = pts.iter().map(|x| x.fidelity).fold(f64::INFINITY, f64::min);
    t.meta("min_fidelity", num(min));
    for x in &pts {
        t.push(vec![x.t.into(), x.fidelity.into(), x.n_b_full.into(), x.n_b_eff.into()]);
    }
    Ok(t)
}

fn validate(command: &Command, common: &Common, c: &Coupling, kerr_hz: f64) -> Result<ResultTable> {
    if !(kerr_hz >= 0.0) || !kerr_hz.is_finite() {
        return Err(Error::Config(format!("--kerr-hz must be non-negative, got {kerr_hz}")));
    }
    let r = Resolved::new(common, c, None)?;
    let th = Thresholds { kerr_coefficient: TAU * kerr_hz, ..Thresholds::default() };
    let report = check_regimes(&r.p, &r.amp, &r.effective(), common.convention, &th);
    eprintln!("{report}");
    let mut t = ResultTable::new(&[
        ("check", "-"),
        ("lhs", "-"),
        ("rhs", "-"),
        ("ratio", "1"),
        ("status", "-"),
        ("note", "-"),
    ]);
    let options = json!({ "coupling": coupling_json(c), "kerr_hz": kerr_hz });
    header(&mut t, command, common.convention, options, &r.p);
    t.meta("thresholds", serde_json::to_value(th)?);
    t.meta("overall", json!(report.overall.label()));
    let opt = |x: Option<f64>| x.map_or_else(|| Cell::from("-"), Cell::from);
    for ch in &report.checks {
        t.push(vec![
            ch.name.as_str().into(),
            opt(ch.lhs),
            opt(ch.rhs),
            opt(ch.ratio),
            ch.status.label().into(),
            ch.note.as_str().into(),
        ]);
    }
    Ok(t)
}
