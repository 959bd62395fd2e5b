//! JSON parameter files.
//!
//! ```json
//! {
//!   "units": "si",
//!   "freqs_hz": { "omega_b": 10e6, "kappa_a": 1e9, "g_ma": [20e6, 0] },
//!   "freqs":    { "omega_a": 6.346e10, ... },
//!   "n_th": 1000,
//!   "volume": 5.236e-10
//! }
//! ```
//!
//! `units` is mandatory. With `"si"` every entry of `freqs_hz` is in Hz and
//! multiplied by 2π on load, every entry of `freqs` is already in rad/s.
//! With `"omega_b"` the numbers are dimensionless multiples of the
//! mechanical frequency, only `freqs` is accepted and the SI-only fields
//! (`h_bias`, `b0`, `volume`, `t_env`) are rejected. Each rate key must be
//! given exactly once; complex couplings are `[re, im]` pairs or plain
//! numbers. `eps_d` may be left out when `b0` and `volume` are present, and
//! `n_th` when `t_env` is. If both forms of the drive are given the direct
//! `eps_d` wins and a disagreement is logged.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::params::{drive_amplitude, thermal_occupation, SystemParams};

pub const RATE_KEYS: [&str; 10] =
    ["omega_a", "omega_m", "omega_b", "omega_d", "kappa_a", "kappa_m", "gamma_b", "g_ma", "g_mb", "eps_d"];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Units {
    Si,
    OmegaB,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Rate {
    Real(f64),
    Complex([f64; 2]),
}

impl Rate {
    fn value(self) -> Complex64 {
        match self {
            Rate::Real(x) => Complex64::new(x, 0.0),
            Rate::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub units: Units,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub freqs_hz: BTreeMap<String, Rate>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub freqs: BTreeMap<String, Rate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_th: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_bias: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub volume: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_env: Option<f64>,
}

impl ConfigFile {
    /// Exact description of `p` with every rate in rad/s.
    pub fn from_params(p: &SystemParams) -> Self {
        let c = |z: Complex64| if z.im == 0.0 { Rate::Real(z.re) } else { Rate::Complex([z.re, z.im]) };
        let r = Rate::Real;
        let freqs = BTreeMap::from([
            ("omega_a".to_string(), r(p.omega_a)),
            ("omega_m".to_string(), r(p.omega_m)),
            ("omega_b".to_string(), r(p.omega_b)),
            ("omega_d".to_string(), r(p.omega_d)),
            ("kappa_a".to_string(), r(p.kappa_a)),
            ("kappa_m".to_string(), r(p.kappa_m)),
            ("gamma_b".to_string(), r(p.gamma_b)),
            ("g_ma".to_string(), c(p.g_ma)),
            ("g_mb".to_string(), r(p.g_mb)),
            ("eps_d".to_string(), c(p.eps_d)),
        ]);
        ConfigFile {
            units: Units::Si,
            freqs_hz: BTreeMap::new(),
            freqs,
            n_th: Some(p.n_th),
            h_bias: p.h_bias,
            b0: p.b0,
            volume: p.volume,
            t_env: p.t_env,
        }
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("config is plain data")
    }

    pub fn resolve(&self) -> Result<SystemParams> {
        if self.units == Units::OmegaB {
            if !self.freqs_hz.is_empty() {
                return Err(Error::Config("freqs_hz needs units \"si\"".into()));
            }
            if self.h_bias.is_some() || self.b0.is_some() || self.volume.is_some() || self.t_env.is_some() {
                return Err(Error::Config("h_bias, b0, volume and t_env need units \"si\"".into()));
            }
        }
        let mut values: BTreeMap<&str, Complex64> = BTreeMap::new();
        for (block, scale) in [(&self.freqs_hz, TAU), (&self.freqs, 1.0)] {
            for (k, v) in block {
                let key = RATE_KEYS
                    .iter()
                    .find(|&&r| r == k)
                    .ok_or_else(|| Error::Config(format!("unknown rate key '{k}'")))?;
                if values.insert(key, v.value() * scale).is_some() {
                    return Err(Error::Config(format!("rate '{k}' given twice")));
                }
            }
        }
        if let (Some(b0), Some(v)) = (self.b0, self.volume) {
            let from_field = drive_amplitude(b0, v)?;
            match values.get("eps_d") {
                None => {
                    values.insert("eps_d", Complex64::new(from_field, 0.0));
                }
                Some(direct) if (direct.norm() - from_field).abs() > 1e-9 * from_field => log::warn!(
                    "eps_d = {direct} rad/s given directly, b0 and volume imply {from_field:.6e}; using eps_d"
                ),
                Some(_) => {}
            }
        }
        let missing: Vec<&str> = RATE_KEYS.iter().copied().filter(|k| !values.contains_key(k)).collect();
        if !missing.is_empty() {
            return Err(Error::Config(format!("missing rates: {}", missing.join(", "))));
        }
        let real = |k: &str| -> Result<f64> {
            let z = values[k];
            if z.im != 0.0 {
                return Err(Error::Config(format!("rate '{k}' must be real")));
            }
            Ok(z.re)
        };
        let n_th = match (self.n_th, self.t_env) {
            (Some(n), _) => n,
            (None, Some(t)) => thermal_occupation(t, real("omega_b")?)?,
            (None, None) => return Err(Error::Config("give n_th or t_env".into())),
        };
        let p = SystemParams {
            omega_a: real("omega_a")?,
            omega_m: real("omega_m")?,
            omega_b: real("omega_b")?,
            omega_d: real("omega_d")?,
            kappa_a: real("kappa_a")?,
            kappa_m: real("kappa_m")?,
            gamma_b: real("gamma_b")?,
            g_ma: values["g_ma"],
            g_mb: real("g_mb")?,
            eps_d: values["eps_d"],
            n_th,
            h_bias: self.h_bias,
            b0: self.b0,
            volume: self.volume,
            t_env: self.t_env,
        };
        p.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(p)
    }
}

pub fn load(path: &Path) -> Result<SystemParams> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<SystemParams> {
    let cfg: ConfigFile =
        serde_json::from_str(text).map_err(|e| Error::Config(format!("bad config: {e}")))?;
    cfg.resolve()
}
