//! Weak-coupling cooling analytics from the magnon force-noise spectrum.
//!
//! All rates are reported already multiplied by x²_ZPF, so the mechanical
//! mass and zero-point amplitude never appear: the cooling (phonon
//! absorption) and heating (emission) rates are
//! `A∓ = 2κ_eff |G|² |χ(±ω_b)|²` with `χ(ω) = 1/(κ_eff − i(ω + Δ_eff))`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adiabatic::{effective_params, EffectiveParams};
use crate::error::{Error, Result};
use crate::params::{magnon_frequency, SystemParams};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Magnon response χ(ω) = 1 / (−i(ω + Δ_eff) + κ_eff).
pub fn susceptibility(omega: f64, e: &EffectiveParams) -> Result<Complex64> {
    let den = Complex64::new(e.kappa_eff, -(omega + e.delta_eff));
    if den.norm() == 0.0 {
        return Err(Error::Singular(format!(
            "magnon susceptibility pole at omega = {omega} (kappa_eff = 0, omega = -delta_eff)"
        )));
    }
    Ok(den.inv())
}

/// Force noise spectrum S_FF(ω)·x²_ZPF = 2κ_eff |G χ(ω)|².
pub fn force_spectrum(omega: f64, e: &EffectiveParams) -> Result<f64> {
    let chi = susceptibility(omega, e)?;
    Ok(2.0 * e.kappa_eff * e.g.norm_sqr() * chi.norm_sqr())
}

/// Mechanical self-energy Σ(ω) = −i|G|² [χ(ω) − χ*(−ω)].
pub fn self_energy(omega: f64, e: &EffectiveParams) -> Result<Complex64> {
    let chi_p = susceptibility(omega, e)?;
    let chi_m = susceptibility(-omega, e)?;
    Ok(-I * e.g.norm_sqr() * (chi_p - chi_m.conj()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoolingStatus {
    /// n_f below the bath occupation.
    Cooling,
    /// Net damping positive but n_f at or above n_th.
    Heating,
    /// Γ_md + γ_b ≤ 0: the magnons pump the resonator and n_f is meaningless.
    Gain,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoolingResult {
    /// Heating rate A₊ (rad/s).
    pub a_plus: f64,
    /// Cooling rate A₋ (rad/s).
    pub a_minus: f64,
    /// Magnetic damping Γ_md = A₋ − A₊ (rad/s).
    pub gamma_md: f64,
    /// Mechanical frequency shift Re Σ(ω_b) (rad/s).
    pub delta_omega_b: f64,
    /// Final phonon number (A₊ + γ_b n_th)/(Γ_md + γ_b).
    pub n_f: f64,
    pub status: CoolingStatus,
    gamma_b: f64,
    n_th: f64,
}

impl CoolingResult {
    pub fn n_f_valid(&self) -> bool {
        self.status != CoolingStatus::Gain
    }

    /// Backaction part A₊/(Γ_md + γ_b).
    pub fn quantum_part(&self) -> f64 {
        self.a_plus / (self.gamma_md + self.gamma_b)
    }

    /// Bath part γ_b n_th/(Γ_md + γ_b).
    pub fn classical_part(&self) -> f64 {
        self.gamma_b * self.n_th / (self.gamma_md + self.gamma_b)
    }
}

/// Damping from the self-energy, −2 Im Σ(ω_b). Equal to A₋ − A₊.
pub fn self_energy_damping(e: &EffectiveParams) -> Result<f64> {
    Ok(-2.0 * self_energy(e.omega_b, e)?.im)
}

pub fn cooling_rates(e: &EffectiveParams) -> Result<CoolingResult> {
    let a_minus = force_spectrum(e.omega_b, e)?;
    let a_plus = force_spectrum(-e.omega_b, e)?;
    let gamma_md = a_minus - a_plus;
    let sigma = self_energy(e.omega_b, e)?;
    let via_sigma = -2.0 * sigma.im;
    let scale = a_minus.max(a_plus);
    debug_assert!(
        (gamma_md - via_sigma).abs() <= 1e-12 * scale + f64::MIN_POSITIVE,
        "damping identity violated: {gamma_md} vs {via_sigma}"
    );

    let total = gamma_md + e.gamma_b;
    let n_f = (a_plus + e.gamma_b * e.n_th) / total;
    let status = if total <= 0.0 {
        log::warn!("net mechanical damping {total:.4e} <= 0: dynamical gain, n_f invalid");
        CoolingStatus::Gain
    } else if n_f >= e.n_th {
        CoolingStatus::Heating
    } else {
        CoolingStatus::Cooling
    };
    Ok(CoolingResult {
        a_plus,
        a_minus,
        gamma_md,
        delta_omega_b: sigma.re,
        n_f,
        status,
        gamma_b: e.gamma_b,
        n_th: e.n_th,
    })
}

/// `n` evenly spaced points on `[from, to]`, endpoints included.
pub fn linspace(from: f64, to: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![from],
        _ => {
            let step = (to - from) / (n - 1) as f64;
            (0..n).map(|i| if i + 1 == n { to } else { from + step * i as f64 }).collect()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetuningRow {
    pub delta_eff: f64,
    pub cooling: CoolingResult,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetuningSweep {
    pub rows: Vec<DetuningRow>,
    /// Row index of the largest Γ_md.
    pub argmax_damping: usize,
    /// Row index of the smallest valid n_f, if any row is valid.
    pub argmin_n_f: Option<usize>,
}

/// Γ_md and n_f over a grid of effective detunings; every other parameter
/// is taken from `template`, with the coupling replaced by `g`.
pub fn detuning_sweep(
    template: &EffectiveParams,
    g: Complex64,
    from: f64,
    to: f64,
    n_points: usize,
) -> Result<DetuningSweep> {
    if n_points < 2 {
        return Err(Error::Domain(format!("sweep needs at least 2 points, got {n_points}")));
    }
    let rows = linspace(from, to, n_points)
        .into_par_iter()
        .map(|delta_eff| {
            let e = EffectiveParams { delta_eff, g, ..*template };
            cooling_rates(&e).map(|cooling| DetuningRow { delta_eff, cooling })
        })
        .collect::<Result<Vec<_>>>()?;
    let argmax_damping = argmax_by(&rows, |r| r.cooling.gamma_md).unwrap_or(0);
    let argmin_n_f =
        argmax_by(&rows, |r| if r.cooling.n_f_valid() { -r.cooling.n_f } else { f64::NEG_INFINITY })
            .filter(|&i| rows[i].cooling.n_f_valid());
    Ok(DetuningSweep { rows, argmax_damping, argmin_n_f })
}

fn argmax_by<T>(items: &[T], key: impl Fn(&T) -> f64) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, item) in items.iter().enumerate() {
        let k = key(item);
        if best.is_none_or(|(_, b)| k > b) {
            best = Some((i, k));
        }
    }
    best.map(|(i, _)| i)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldRow {
    /// Bias field (tesla).
    pub h: f64,
    pub delta_eff: f64,
    pub cooling: CoolingResult,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldSweep {
    pub rows: Vec<FieldRow>,
    pub argmin_n_f: Option<usize>,
    /// Inclusive index range of the contiguous n_f < 1 window that contains
    /// the minimum.
    pub window: Option<(usize, usize)>,
    /// True when every row with n_f < 1 lies inside `window`.
    pub window_contiguous: bool,
}

impl FieldSweep {
    /// Field range (tesla) of the ground-state-cooling window.
    pub fn window_fields(&self) -> Option<(f64, f64)> {
        self.window.map(|(lo, hi)| (self.rows[lo].h, self.rows[hi].h))
    }
}

/// n_f versus bias field at fixed drive frequency and fixed coupling G.
/// `kappa_eff` overrides the eliminated decay rate when given.
pub fn field_sweep(
    p: &SystemParams,
    g: Complex64,
    fields: &[f64],
    kappa_eff: Option<f64>,
) -> Result<FieldSweep> {
    if fields.len() < 2 {
        return Err(Error::Domain(format!("sweep needs at least 2 points, got {}", fields.len())));
    }
    let rows = fields
        .par_iter()
        .map(|&h| {
            let q = SystemParams { omega_m: magnon_frequency(h)?, h_bias: Some(h), ..p.clone() };
            let mut e = effective_params(&q, g);
            if let Some(k) = kappa_eff {
                e.kappa_eff = k;
            }
            Ok(FieldRow { h, delta_eff: e.delta_eff, cooling: cooling_rates(&e)? })
        })
        .collect::<Result<Vec<_>>>()?;

    let cooled = |r: &FieldRow| r.cooling.n_f_valid() && r.cooling.n_f < 1.0;
    let argmin_n_f =
        argmax_by(&rows, |r| if r.cooling.n_f_valid() { -r.cooling.n_f } else { f64::NEG_INFINITY })
            .filter(|&i| rows[i].cooling.n_f_valid());
    let window = argmin_n_f.filter(|&i| cooled(&rows[i])).map(|i| {
        let mut lo = i;
        while lo > 0 && cooled(&rows[lo - 1]) {
            lo -= 1;
        }
        let mut hi = i;
        while hi + 1 < rows.len() && cooled(&rows[hi + 1]) {
            hi += 1;
        }
        (lo, hi)
    });
    let inside = window.map_or(0, |(lo, hi)| hi - lo + 1);
    let window_contiguous = rows.iter().filter(|r| cooled(r)).count() == inside;
    Ok(FieldSweep { rows, argmin_n_f, window, window_contiguous })
}
