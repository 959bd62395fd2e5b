//! Named parameter sets.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::params::{bias_field_for, drive_field_for, drive_for_amplitude, sphere_volume, SystemParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// Laboratory values in SI units: 10.1 GHz cavity and Kittel mode,
    /// 10 MHz mechanics, 1 mm YIG sphere, drive tuned to the red sideband.
    Physical,
    /// Sideband-cooling set in units of ω_b: κ_m = 0.15, κ_a = 100,
    /// g_ma = 2, Δ_a = 1, γ_b = 1e-5, n_th = 1000, magnon detuning chosen so
    /// that Δ_eff = −ω_b.
    Fig3,
}

impl Preset {
    pub const ALL: [Preset; 2] = [Preset::Physical, Preset::Fig3];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Physical => "physical",
            Preset::Fig3 => "fig3",
        }
    }

    pub fn system(self) -> SystemParams {
        match self {
            Preset::Physical => physical(),
            Preset::Fig3 => fig3(),
        }
    }

    /// Coupling G (rad/s) used when the caller does not fix one. `None`
    /// means G follows from the drive through the steady-state amplitude.
    pub fn default_coupling(self) -> Option<Complex64> {
        match self {
            Preset::Physical => None,
            Preset::Fig3 => Some(Complex64::new(0.15 * MECHANICAL_FREQ, 0.0)),
        }
    }
}

impl std::str::FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown preset '{s}' (expected physical or fig3)"))
    }
}

const MECHANICAL_FREQ: f64 = TAU * 10e6;
const KITTEL_FREQ: f64 = TAU * 10.1e9;

fn physical() -> SystemParams {
    let volume = sphere_volume(1e-3);
    let eps_d = TAU * 4e14;
    let omega_m = KITTEL_FREQ;
    SystemParams {
        omega_a: KITTEL_FREQ,
        omega_m,
        omega_b: MECHANICAL_FREQ,
        omega_d: omega_m - MECHANICAL_FREQ,
        kappa_a: TAU * 1e9,
        kappa_m: TAU * 0.15e6,
        gamma_b: TAU * 100.0,
        g_ma: Complex64::new(TAU * 20e6, 0.0),
        g_mb: TAU * 0.1,
        eps_d: Complex64::new(eps_d, 0.0),
        n_th: 1000.0,
        h_bias: bias_field_for(omega_m).ok(),
        b0: drive_field_for(eps_d, volume).ok(),
        volume: Some(volume),
        t_env: None,
    }
}

fn fig3() -> SystemParams {
    let wb = MECHANICAL_FREQ;
    let (kappa_a, g_ma, delta_a) = (100.0 * wb, 2.0 * wb, wb);
    let pull = g_ma * g_ma / (delta_a * delta_a + kappa_a * kappa_a);
    let delta_m = -wb + pull * delta_a;
    let omega_a = KITTEL_FREQ;
    let omega_d = omega_a + delta_a;
    let omega_m = omega_d - delta_m;
    let mut p = SystemParams {
        omega_a,
        omega_m,
        omega_b: wb,
        omega_d,
        kappa_a,
        kappa_m: 0.15 * wb,
        gamma_b: 1e-5 * wb,
        g_ma: Complex64::new(g_ma, 0.0),
        g_mb: TAU * 0.1,
        eps_d: Complex64::new(0.0, 0.0),
        n_th: 1000.0,
        h_bias: bias_field_for(omega_m).ok(),
        b0: None,
        volume: None,
        t_env: None,
    };
    let eta = Preset::Fig3.default_coupling().unwrap() / p.g_mb;
    p.eps_d = drive_for_amplitude(&p, eta).expect("fig3 amplitude denominator is nonzero");
    p
}
