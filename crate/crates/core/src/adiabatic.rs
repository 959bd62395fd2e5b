//! Elimination of the strongly damped cavity mode.
//!
//! For κ_a much larger than every other rate the cavity follows the magnon
//! instantaneously, `a ≈ (i g*_ma m + √(2κ_a) a_in) / (iΔ_a − κ_a)`.
//! Substituting back leaves a magnon with a pulled detuning, an extra decay
//! channel and a mixed input noise, while the magnon–phonon coupling G is
//! untouched. The effective two-mode Hamiltonian is
//! `H_eff = −Δ_eff m†m + ω_b b†b + (G m† + G* m)(b + b†)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::params::SystemParams;

/// Ratio κ_a / max(|g_ma|, |G|, κ_m) below which the elimination is flagged.
pub const ADIABATIC_FACTOR: f64 = 5.0;

/// Parameters of the reduced magnon–phonon model. Rates are amplitude decay
/// rates in rad/s.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EffectiveParams {
    pub delta_eff: f64,
    pub kappa_eff: f64,
    pub g: Complex64,
    pub omega_b: f64,
    pub gamma_b: f64,
    pub n_th: f64,
}

impl EffectiveParams {
    /// Copy with every rate divided by ω_b, so that ω_b = 1.
    pub fn normalized(&self) -> EffectiveParams {
        let w = self.omega_b;
        EffectiveParams {
            delta_eff: self.delta_eff / w,
            kappa_eff: self.kappa_eff / w,
            g: self.g / w,
            omega_b: 1.0,
            gamma_b: self.gamma_b / w,
            n_th: self.n_th,
        }
    }

    pub fn with_coupling(mut self, g: Complex64) -> Self {
        self.g = g;
        self
    }
}

fn cavity_lorentzian(p: &SystemParams) -> f64 {
    let da = p.delta_a();
    let den = da * da + p.kappa_a * p.kappa_a;
    if den == 0.0 {
        0.0
    } else {
        p.g_ma.norm_sqr() / den
    }
}

/// Whether κ_a dominates the other rates by at least [`ADIABATIC_FACTOR`].
pub fn adiabatic_regime_ok(p: &SystemParams, g: Complex64) -> bool {
    let slow = p.g_ma.norm().max(g.norm()).max(p.kappa_m);
    p.kappa_a >= ADIABATIC_FACTOR * slow
}

/// Effective detuning, decay and bath data after eliminating the cavity.
pub fn effective_params(p: &SystemParams, g: Complex64) -> EffectiveParams {
    if !adiabatic_regime_ok(p, g) {
        log::warn!(
            "kappa_a = {:.4e} is not much larger than g_ma, |G|, kappa_m; \
             adiabatic elimination may be inaccurate",
            p.kappa_a
        );
    }
    let l = cavity_lorentzian(p);
    EffectiveParams {
        delta_eff: p.delta_m() - l * p.delta_a(),
        kappa_eff: p.kappa_m + l * p.kappa_a,
        g,
        omega_b: p.omega_b,
        gamma_b: p.gamma_b,
        n_th: p.n_th,
    }
}

/// Weights of the two vacuum noise channels feeding the effective magnon:
/// `(cavity, intrinsic) = (2κ_a|g_ma|²/(Δ_a²+κ_a²), 2κ_m)`. Half their sum
/// is κ_eff.
pub fn effective_noise_weight(p: &SystemParams) -> (f64, f64) {
    (2.0 * p.kappa_a * cavity_lorentzian(p), 2.0 * p.kappa_m)
}
