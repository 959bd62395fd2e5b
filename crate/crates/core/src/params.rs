//! Physical inputs of the driven cavity–magnon–phonon system and the
//! classical steady-state amplitudes around which the dynamics is linearized.
//!
//! Every frequency and rate stored here is an angular frequency in rad/s.
//! Detunings are derived from the drive frequency on demand and never stored.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gyromagnetic ratio of the Kittel mode, γ_g = 2π × 28 GHz/T, in rad/(s·T).
pub const GYROMAGNETIC_RATIO: f64 = TAU * 28.0e9;

/// Spin density of YIG in m⁻³.
pub const SPIN_DENSITY: f64 = 4.22e27;

/// Reduced Planck constant in J·s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Boltzmann constant in J/K.
pub const K_B: f64 = 1.380_649e-23;

/// Relative tolerance used when both a temperature and an occupation are given.
pub const BATH_CONSISTENCY_RTOL: f64 = 1e-9;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Full physical parameter set of the driven three-mode system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Cavity resonance (rad/s).
    pub omega_a: f64,
    /// Kittel-mode magnon frequency (rad/s).
    pub omega_m: f64,
    /// Mechanical frequency (rad/s).
    pub omega_b: f64,
    /// Drive frequency (rad/s).
    pub omega_d: f64,
    /// Cavity amplitude decay rate (rad/s).
    pub kappa_a: f64,
    /// Magnon amplitude decay rate (rad/s).
    pub kappa_m: f64,
    /// Mechanical amplitude decay rate (rad/s).
    pub gamma_b: f64,
    /// Magnon–photon coupling (rad/s).
    pub g_ma: Complex64,
    /// Bare magnomechanical coupling (rad/s).
    pub g_mb: f64,
    /// Magnon drive (Rabi) amplitude (rad/s).
    pub eps_d: Complex64,
    /// Thermal phonon occupation of the mechanical bath.
    pub n_th: f64,
    /// Bias field in tesla, when the magnon frequency was set from it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_bias: Option<f64>,
    /// Drive field amplitude in tesla.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b0: Option<f64>,
    /// Sphere volume in m³.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub volume: Option<f64>,
    /// Bath temperature in kelvin.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_env: Option<f64>,
}

impl SystemParams {
    /// Cavity detuning Δ_a = ω_d − ω_a.
    pub fn delta_a(&self) -> f64 {
        self.omega_d - self.omega_a
    }

    /// Magnon detuning Δ_m = ω_d − ω_m.
    pub fn delta_m(&self) -> f64 {
        self.omega_d - self.omega_m
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("omega_a", self.omega_a),
            ("omega_m", self.omega_m),
            ("omega_b", self.omega_b),
            ("omega_d", self.omega_d),
            ("kappa_a", self.kappa_a),
            ("kappa_m", self.kappa_m),
            ("gamma_b", self.gamma_b),
            ("g_mb", self.g_mb),
            ("n_th", self.n_th),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::Domain(format!("{name} is not finite ({v})")));
            }
        }
        for (name, v) in [("kappa_a", self.kappa_a), ("kappa_m", self.kappa_m), ("gamma_b", self.gamma_b)] {
            if v < 0.0 {
                return Err(Error::Domain(format!("decay rate {name} = {v} is negative")));
            }
        }
        if self.omega_b <= 0.0 {
            return Err(Error::Domain(format!("omega_b = {} must be positive", self.omega_b)));
        }
        if self.n_th < 0.0 {
            return Err(Error::Domain(format!("n_th = {} is negative", self.n_th)));
        }
        if let Some(t) = self.t_env {
            let n = thermal_occupation(t, self.omega_b)?;
            let scale = n.abs().max(self.n_th.abs()).max(f64::MIN_POSITIVE);
            if (n - self.n_th).abs() > BATH_CONSISTENCY_RTOL * scale {
                return Err(Error::Domain(format!(
                    "t_env = {t} K implies n_th = {n}, inconsistent with n_th = {}",
                    self.n_th
                )));
            }
        }
        Ok(())
    }

    /// Sets the magnon frequency from a bias field.
    pub fn with_bias_field(mut self, h: f64) -> Result<Self> {
        self.omega_m = magnon_frequency(h)?;
        self.h_bias = Some(h);
        Ok(self)
    }

    /// Sets the bath from a temperature, overwriting `n_th`.
    pub fn with_temperature(mut self, t: f64) -> Result<Self> {
        self.n_th = thermal_occupation(t, self.omega_b)?;
        self.t_env = Some(t);
        Ok(self)
    }
}

/// Kittel-mode frequency ω_m = γ_g H for a bias field in tesla.
pub fn magnon_frequency(h_bias: f64) -> Result<f64> {
    if !(h_bias >= 0.0) {
        return Err(Error::Domain(format!("bias field must be non-negative, got {h_bias} T")));
    }
    if h_bias > 1.0 {
        log::warn!("bias field {h_bias} T lies outside the 0–1 T range of the model");
    }
    Ok(GYROMAGNETIC_RATIO * h_bias)
}

/// Inverse of [`magnon_frequency`].
pub fn bias_field_for(omega_m: f64) -> Result<f64> {
    if !(omega_m >= 0.0) {
        return Err(Error::Domain(format!("magnon frequency must be non-negative, got {omega_m} rad/s")));
    }
    Ok(omega_m / GYROMAGNETIC_RATIO)
}

/// Bose–Einstein occupation 1/(exp(ħω/k_B T) − 1).
pub fn thermal_occupation(t: f64, omega_b: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("temperature must be non-negative, got {t} K")));
    }
    if !(omega_b > 0.0) {
        return Err(Error::Domain(format!("mode frequency must be positive, got {omega_b} rad/s")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let x = HBAR * omega_b / (K_B * t);
    Ok(1.0 / x.exp_m1())
}

/// Temperature at which a mode of frequency `omega_b` holds `n_th` quanta.
pub fn temperature_for(n_th: f64, omega_b: f64) -> Result<f64> {
    if !(n_th >= 0.0) {
        return Err(Error::Domain(format!("occupation must be non-negative, got {n_th}")));
    }
    if !(omega_b > 0.0) {
        return Err(Error::Domain(format!("mode frequency must be positive, got {omega_b} rad/s")));
    }
    if n_th == 0.0 {
        return Ok(0.0);
    }
    // x = ln(1 + 1/n), written to stay accurate for large n.
    let x = (1.0 / n_th).ln_1p();
    Ok(HBAR * omega_b / (K_B * x))
}

/// Total number of spins N = ρV in a sphere of volume `volume` (m³).
pub fn spin_count(volume: f64) -> f64 {
    SPIN_DENSITY * volume
}

/// Volume of a sphere of the given diameter (m).
pub fn sphere_volume(diameter: f64) -> f64 {
    let r = 0.5 * diameter;
    4.0 / 3.0 * PI * r * r * r
}

fn drive_prefactor(volume: f64) -> Result<f64> {
    if !(volume > 0.0) {
        return Err(Error::Domain(format!("volume must be positive, got {volume} m^3")));
    }
    Ok(5f64.sqrt() / 4.0 * GYROMAGNETIC_RATIO * spin_count(volume).sqrt())
}

/// Rabi frequency ε_d = (√5/4) γ_g √(ρV) B₀ of the magnon drive, in rad/s.
pub fn drive_amplitude(b0: f64, volume: f64) -> Result<f64> {
    if !(b0 >= 0.0) {
        return Err(Error::Domain(format!("drive field must be non-negative, got {b0} T")));
    }
    Ok(drive_prefactor(volume)? * b0)
}

/// Drive field B₀ (tesla) producing the Rabi frequency `eps_d` (rad/s).
pub fn drive_field_for(eps_d: f64, volume: f64) -> Result<f64> {
    if !(eps_d >= 0.0) {
        return Err(Error::Domain(format!("drive amplitude must be non-negative, got {eps_d}")));
    }
    Ok(eps_d / drive_prefactor(volume)?)
}

/// Classical steady-state amplitudes of the driven system.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SteadyAmplitudes {
    /// Magnon amplitude ⟨m⟩.
    pub eta: Complex64,
    /// Phonon amplitude ⟨b⟩.
    pub beta: Complex64,
    /// Drive-enhanced magnomechanical coupling G = η g_mb (rad/s).
    pub g: Complex64,
    /// Magnon detuning including the static mechanical shift (rad/s).
    pub delta_m_tilde: f64,
    /// |g_mb (β + β*)|, the size of that shift (rad/s).
    pub mean_field_shift: f64,
}

impl SteadyAmplitudes {
    /// Builds the amplitudes for a given magnon amplitude η.
    pub fn from_eta(p: &SystemParams, eta: Complex64) -> Self {
        let beta = phonon_amplitude(p, eta);
        let shift = p.g_mb * 2.0 * beta.re;
        SteadyAmplitudes {
            eta,
            beta,
            g: eta * p.g_mb,
            delta_m_tilde: p.delta_m() - shift,
            mean_field_shift: shift.abs(),
        }
    }

    /// Amplitudes that realize a prescribed enhanced coupling G.
    pub fn for_coupling(p: &SystemParams, g: Complex64) -> Result<Self> {
        if p.g_mb == 0.0 {
            if g == Complex64::new(0.0, 0.0) {
                return Ok(Self::from_eta(p, Complex64::new(0.0, 0.0)));
            }
            return Err(Error::Singular("g_mb = 0: no magnon amplitude produces a nonzero coupling".into()));
        }
        let mut amp = Self::from_eta(p, g / p.g_mb);
        amp.g = g;
        Ok(amp)
    }
}

/// β = −i g_mb |η|² / (iω_b + γ_b).
fn phonon_amplitude(p: &SystemParams, eta: Complex64) -> Complex64 {
    -I * p.g_mb * eta.norm_sqr() / (I * p.omega_b + p.gamma_b)
}

fn amplitude_denominator(p: &SystemParams, delta_m: f64) -> Result<(Complex64, Complex64)> {
    let cavity = Complex64::new(p.kappa_a, -p.delta_a());
    let magnon = Complex64::new(p.kappa_m, -delta_m);
    let den = p.g_ma.norm_sqr() + magnon * cavity;
    let scale = p.g_ma.norm_sqr() + magnon.norm() * cavity.norm();
    if den.norm() <= f64::EPSILON * scale || den.norm() == 0.0 {
        return Err(Error::Singular(format!(
            "|g_ma|^2 + (kappa_m - i delta_m)(kappa_a - i delta_a) vanishes \
             (g_ma = {}, delta_m = {delta_m}, kappa_m = {}, delta_a = {}, kappa_a = {})",
            p.g_ma,
            p.kappa_m,
            p.delta_a(),
            p.kappa_a
        )));
    }
    Ok((cavity, den))
}

fn eta_for(p: &SystemParams, delta_m: f64) -> Result<Complex64> {
    let (cavity, den) = amplitude_denominator(p, delta_m)?;
    Ok(p.eps_d * cavity / den)
}

/// Steady-state amplitudes evaluated with the bare magnon detuning.
pub fn steady_state_amplitudes(p: &SystemParams) -> Result<SteadyAmplitudes> {
    let eta = eta_for(p, p.delta_m())?;
    Ok(SteadyAmplitudes::from_eta(p, eta))
}

/// Self-consistent amplitudes: iterates η with the shifted detuning Δ̃_m
/// until the relative change in Δ̃_m drops below `rtol`.
pub fn steady_state_amplitudes_refined(
    p: &SystemParams,
    max_iter: usize,
    rtol: f64,
) -> Result<SteadyAmplitudes> {
    let mut amp = steady_state_amplitudes(p)?;
    for _ in 0..max_iter {
        let eta = eta_for(p, amp.delta_m_tilde)?;
        let next = SteadyAmplitudes::from_eta(p, eta);
        let scale = next.delta_m_tilde.abs().max(p.omega_b);
        let done = (next.delta_m_tilde - amp.delta_m_tilde).abs() <= rtol * scale;
        amp = next;
        if done {
            return Ok(amp);
        }
    }
    Err(Error::Singular(format!("detuning refinement did not converge in {max_iter} iterations")))
}

/// Drive amplitude ε_d that produces the magnon amplitude `eta`.
pub fn drive_for_amplitude(p: &SystemParams, eta: Complex64) -> Result<Complex64> {
    let (cavity, den) = amplitude_denominator(p, p.delta_m())?;
    Ok(eta * den / cavity)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    pub(crate) fn sample() -> SystemParams {
        SystemParams {
            omega_a: TAU * 10.1e9,
            omega_m: TAU * 10.1e9,
            omega_b: TAU * 10e6,
            omega_d: TAU * 10.1e9 - TAU * 10e6,
            kappa_a: TAU * 1e9,
            kappa_m: TAU * 0.15e6,
            gamma_b: TAU * 100.0,
            g_ma: Complex64::new(TAU * 20e6, 0.0),
            g_mb: TAU * 0.1,
            eps_d: Complex64::new(TAU * 4e14, 0.0),
            n_th: 1000.0,
            h_bias: None,
            b0: None,
            volume: None,
            t_env: None,
        }
    }

    #[test]
    fn magnon_frequency_points() {
        assert_eq!(magnon_frequency(0.0).unwrap(), 0.0);
        assert_relative_eq!(magnon_frequency(1.0).unwrap() / TAU, 28e9, max_relative = 1e-15);
        let h = bias_field_for(TAU * 10.1e9).unwrap();
        assert_relative_eq!(h, 0.360_714_285_714, max_relative = 1e-9);
        assert!(magnon_frequency(-0.1).is_err());
    }

    #[test]
    fn bose_occupation() {
        let wb = TAU * 10e6;
        assert_eq!(thermal_occupation(0.0, wb).unwrap(), 0.0);
        let t = HBAR * wb / (K_B * 2f64.ln());
        assert_relative_eq!(thermal_occupation(t, wb).unwrap(), 1.0, max_relative = 1e-12);
        let t1000 = temperature_for(1000.0, wb).unwrap();
        assert!((t1000 - 0.48).abs() < 0.005, "T = {t1000}");
        assert!(thermal_occupation(-1.0, wb).is_err());
    }

    #[test]
    fn drive_from_field() {
        let v = sphere_volume(1e-3);
        assert_relative_eq!(spin_count(v), 2.2e18, max_relative = 0.01);
        assert_eq!(drive_amplitude(0.0, v).unwrap(), 0.0);
        assert!(drive_amplitude(1e-6, 0.0).is_err());
        let b0 = drive_field_for(TAU * 4e14, v).unwrap();
        assert_relative_eq!(drive_amplitude(b0, v).unwrap(), TAU * 4e14, max_relative = 1e-14);
    }

    #[test]
    fn undriven_is_zero() {
        let mut p = sample();
        p.eps_d = Complex64::new(0.0, 0.0);
        let a = steady_state_amplitudes(&p).unwrap();
        assert_eq!(a.eta.norm(), 0.0);
        assert_eq!(a.beta.norm(), 0.0);
        assert_eq!(a.g.norm(), 0.0);
    }

    #[test]
    fn resonant_amplitude_is_real() {
        let mut p = sample();
        p.omega_d = p.omega_a;
        p.omega_m = p.omega_a;
        let a = steady_state_amplitudes(&p).unwrap();
        let expect = p.eps_d.re * p.kappa_a / (p.g_ma.norm_sqr() + p.kappa_m * p.kappa_a);
        assert_relative_eq!(a.eta.re, expect, max_relative = 1e-14);
        assert_eq!(a.eta.im, 0.0);
    }

    #[test]
    fn laboratory_scenario_amplitude() {
        let p = sample();
        let a = steady_state_amplitudes(&p).unwrap();
        assert_relative_eq!(a.eta.norm(), 4e7, max_relative = 0.02);
        assert_eq!(a.g, a.eta * p.g_mb);
        let fixed = SteadyAmplitudes::for_coupling(&p, Complex64::new(TAU * 4e6, 0.0)).unwrap();
        assert_relative_eq!(fixed.eta.norm(), 4e7, max_relative = 1e-12);
    }

    #[test]
    fn singular_denominator_reported() {
        let mut p = sample();
        p.kappa_m = 0.0;
        p.kappa_a = 0.0;
        p.g_ma = Complex64::new(0.0, 0.0);
        p.omega_d = p.omega_m;
        let err = steady_state_amplitudes(&p).unwrap_err();
        assert!(matches!(err, Error::Singular(_)));
    }

    #[test]
    fn refinement_converges() {
        let mut p = sample();
        p.eps_d = Complex64::new(TAU * 1e13, 0.0);
        let bare = steady_state_amplitudes(&p).unwrap();
        let refined = steady_state_amplitudes_refined(&p, 100, 1e-12).unwrap();
        assert!(refined.mean_field_shift < 1e-3 * p.delta_m().abs());
        assert_relative_eq!(refined.eta.norm(), bare.eta.norm(), max_relative = 1e-3);
    }

    #[test]
    fn drive_back_solve() {
        let p = sample();
        let a = steady_state_amplitudes(&p).unwrap();
        let eps = drive_for_amplitude(&p, a.eta).unwrap();
        assert_relative_eq!(eps.re, p.eps_d.re, max_relative = 1e-12);
        assert!(eps.im.abs() < 1e-6 * p.eps_d.re);
    }

    #[test]
    fn inconsistent_bath_rejected() {
        let mut p = sample();
        p.t_env = Some(0.1);
        assert!(p.validate().is_err());
        let p = sample().with_temperature(0.48).unwrap();
        p.validate().unwrap();
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn bose_round_trip(log_n in -3.0f64..6.0) {
                let n = 10f64.powf(log_n);
                let wb = TAU * 10e6;
                let t = temperature_for(n, wb).unwrap();
                let back = thermal_occupation(t, wb).unwrap();
                prop_assert!(((back - n) / n).abs() < 1e-9);
            }

            #[test]
            fn amplitude_linear_in_drive(scale in 0.01f64..100.0) {
                let p = sample();
                let mut q = p.clone();
                q.eps_d *= scale;
                let a = steady_state_amplitudes(&p).unwrap();
                let b = steady_state_amplitudes(&q).unwrap();
                prop_assert!((b.eta - a.eta * scale).norm() <= 1e-12 * b.eta.norm());
                prop_assert!(b.beta.norm() <= q.g_mb * b.eta.norm_sqr() / q.omega_b * (1.0 + 1e-12));
            }

            #[test]
            fn magnon_frequency_linear(h in 0.0f64..1.0, k in 0.0f64..1.0) {
                let lhs = magnon_frequency(h * k).unwrap();
                let rhs = k * magnon_frequency(h).unwrap();
                prop_assert!((lhs - rhs).abs() <= 1e-15 * rhs.abs().max(1.0));
            }
        }
    }
}
