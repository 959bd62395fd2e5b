//! Regime checks behind the linearized, adiabatically eliminated model.
//!
//! Every check compares a dimensionless ratio against a pass and a warn
//! bound. Nothing here stops a computation; callers decide what to do with
//! a failing report.

use std::f64::consts::TAU;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::adiabatic::EffectiveParams;
use crate::covariance::stability;
use crate::model::DecayConvention;
use crate::params::{spin_count, SteadyAmplitudes, SystemParams};

/// Magnon Kerr coefficient 𝒦 (rad/s) of a 1 mm YIG sphere.
pub const DEFAULT_KERR: f64 = TAU * 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    /// Not evaluated, e.g. no sample volume is known.
    Skipped,
    Pass,
    Warn,
    Fail,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Skipped => "skipped",
            Status::Pass => "pass",
            Status::Warn => "warn",
            Status::Fail => "fail",
        }
    }
}

/// Ratio bounds: pass when `ratio <= pass`, warn when `ratio <= warn`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Band {
    pub pass: f64,
    pub warn: f64,
}

impl Band {
    pub fn classify(self, ratio: f64) -> Status {
        if ratio <= self.pass {
            Status::Pass
        } else if ratio <= self.warn {
            Status::Warn
        } else {
            Status::Fail
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// κ_m / ω_b.
    pub sideband: Band,
    /// ⟨m†m⟩ / 5N.
    pub low_lying: Band,
    /// 𝒦|⟨m⟩|³ / |ε_d|.
    pub kerr: Band,
    /// max(|g_ma|, |G|, κ_m) / κ_a.
    pub adiabatic: Band,
    pub kerr_coefficient: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            sideband: Band { pass: 1.0, warn: 1.0 },
            low_lying: Band { pass: 1e-2, warn: 1e-1 },
            kerr: Band { pass: 1e-1, warn: 1.0 },
            adiabatic: Band { pass: 0.2, warn: 1.0 },
            kerr_coefficient: DEFAULT_KERR,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub lhs: Option<f64>,
    pub rhs: Option<f64>,
    pub ratio: Option<f64>,
    pub status: Status,
    pub note: String,
}

impl Check {
    fn ratio(name: &str, lhs: f64, rhs: f64, band: Band, note: String) -> Check {
        let ratio = lhs / rhs;
        let status = if ratio.is_finite() { band.classify(ratio) } else { Status::Fail };
        Check { name: name.into(), lhs: Some(lhs), rhs: Some(rhs), ratio: Some(ratio), status, note }
    }

    fn skipped(name: &str, note: &str) -> Check {
        Check {
            name: name.into(),
            lhs: None,
            rhs: None,
            ratio: None,
            status: Status::Skipped,
            note: note.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub checks: Vec<Check>,
    pub overall: Status,
}

impl ValidityReport {
    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for ValidityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |x: Option<f64>| x.map_or_else(|| "-".to_string(), |v| format!("{v:.4e}"));
        writeln!(f, "{:<20} {:>12} {:>12} {:>12}  {:<7} note", "check", "lhs", "rhs", "ratio", "status")?;
        for c in &self.checks {
            writeln!(
                f,
                "{:<20} {:>12} {:>12} {:>12}  {:<7} {}",
                c.name,
                opt(c.lhs),
                opt(c.rhs),
                opt(c.ratio),
                c.status.label(),
                c.note
            )?;
        }
        write!(f, "overall: {}", self.overall.label())
    }
}

/// Evaluates the five regime conditions for one operating point. The
/// stability verdict comes from the drift-matrix eigenvalues; its ratio
/// is |G| over the closed-form red-sideband bound.
pub fn check_regimes(
    p: &SystemParams,
    amp: &SteadyAmplitudes,
    e: &EffectiveParams,
    conv: DecayConvention,
    th: &Thresholds,
) -> ValidityReport {
    let mut checks = Vec::with_capacity(5);

    checks.push(Check::ratio(
        "resolved_sideband",
        p.kappa_m,
        p.omega_b,
        th.sideband,
        "kappa_m vs omega_b".into(),
    ));

    let n_magnons = amp.eta.norm_sqr();
    checks.push(match p.volume {
        Some(v) => Check::ratio(
            "low_lying",
            n_magnons,
            5.0 * spin_count(v),
            th.low_lying,
            "<m+m> = |eta|^2 vs 2Ns = 5N".into(),
        ),
        None => Check::skipped("low_lying", "sample volume unknown"),
    });

    checks.push(Check::ratio(
        "kerr",
        th.kerr_coefficient * amp.eta.norm().powi(3) / TAU,
        p.eps_d.norm() / TAU,
        th.kerr,
        "K|eta|^3 vs eps_d, both in Hz".into(),
    ));

    let slow = p.g_ma.norm().max(e.g.norm()).max(p.kappa_m);
    checks.push(Check::ratio(
        "adiabatic",
        slow,
        p.kappa_a,
        th.adiabatic,
        "max(g_ma, |G|, kappa_m) vs kappa_a".into(),
    ));

    let verdict = stability(e, e.g, conv);
    let mut st = Check::ratio(
        "stability",
        e.g.norm(),
        verdict.analytic_threshold,
        Band { pass: 1.0, warn: 1.0 },
        format!("max Re(lambda) = {:.4e}", verdict.max_real_part),
    );
    st.status = if verdict.eigen_stable { Status::Pass } else { Status::Fail };
    checks.push(st);

    let overall = checks.iter().map(|c| c.status).max().unwrap_or(Status::Skipped);
    ValidityReport { checks, overall }
}
