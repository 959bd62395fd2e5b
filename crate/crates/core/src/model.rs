//! Quadratic bosonic models shared by the covariance and Fock-space solvers.
//!
//! A [`LinearModel`] holds a quadratic Hamiltonian together with one loss
//! and one gain Lindblad rate per mode. The Gaussian solver turns it into a
//! drift/diffusion pair, the Fock solver into truncated operators.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::adiabatic::EffectiveParams;
use crate::params::SystemParams;

/// How a decay constant κ of the Langevin equations maps onto the rate of
/// the Lindblad dissipator κ'𝒟[o].
///
/// With `Langevin`, κ is an amplitude decay rate, `ȯ = −κ o − √(2κ) o_in`,
/// and the dissipator carries 2κ. With `MasterEquation`, κ is used directly
/// as the dissipator rate, so the amplitude decays at κ/2.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayConvention {
    Langevin,
    #[default]
    MasterEquation,
}

impl DecayConvention {
    pub fn lindblad_rate(self, kappa: f64) -> f64 {
        match self {
            DecayConvention::Langevin => 2.0 * kappa,
            DecayConvention::MasterEquation => kappa,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DecayConvention::Langevin => "langevin",
            DecayConvention::MasterEquation => "master_equation",
        }
    }
}

impl std::str::FromStr for DecayConvention {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "langevin" => Ok(DecayConvention::Langevin),
            "master_equation" | "master-equation" | "me" => Ok(DecayConvention::MasterEquation),
            other => Err(format!("unknown decay convention '{other}'")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    A,
    M,
    B,
}

impl Mode {
    pub fn label(self) -> &'static str {
        match self {
            Mode::A => "a",
            Mode::M => "m",
            Mode::B => "b",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "a" => Ok(Mode::A),
            "m" => Ok(Mode::M),
            "b" => Ok(Mode::B),
            other => Err(format!("unknown mode '{other}' (expected a, m or b)")),
        }
    }
}

/// `c o_i† o_j + c* o_j† o_i`
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BeamSplitter {
    pub i: usize,
    pub j: usize,
    pub c: Complex64,
}

/// `c o_i o_j + c* o_i† o_j†`
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Squeeze {
    pub i: usize,
    pub j: usize,
    pub c: Complex64,
}

/// Lindblad rates of one mode: `loss 𝒟[o] + gain 𝒟[o†]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Channel {
    pub loss: f64,
    pub gain: f64,
}

impl Channel {
    /// Bath at occupation `n` with total Lindblad rate `rate`.
    pub fn thermal(rate: f64, n: f64) -> Self {
        Channel { loss: rate * (n + 1.0), gain: rate * n }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearModel {
    pub modes: Vec<Mode>,
    /// Coefficient of o†o for each mode.
    pub freqs: Vec<f64>,
    pub beam_splitters: Vec<BeamSplitter>,
    pub squeezes: Vec<Squeeze>,
    pub channels: Vec<Channel>,
}

impl LinearModel {
    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn index_of(&self, mode: Mode) -> Option<usize> {
        self.modes.iter().position(|&m| m == mode)
    }

    /// Magnon–phonon model `−Δ_eff m†m + ω_b b†b + (G m† + G* m)(b + b†)`,
    /// vacuum input on the magnon and a thermal bath on the phonon.
    pub fn effective(e: &EffectiveParams, conv: DecayConvention) -> Self {
        let (m, b) = (0, 1);
        LinearModel {
            modes: vec![Mode::M, Mode::B],
            freqs: vec![-e.delta_eff, e.omega_b],
            // G m† b + G* m b†  and  G* m b + G m† b†
            beam_splitters: vec![BeamSplitter { i: m, j: b, c: e.g }],
            squeezes: vec![Squeeze { i: m, j: b, c: e.g.conj() }],
            channels: vec![
                Channel::thermal(conv.lindblad_rate(e.kappa_eff), 0.0),
                Channel::thermal(conv.lindblad_rate(e.gamma_b), e.n_th),
            ],
        }
    }

    /// Full linearized cavity–magnon–phonon model with magnon detuning
    /// `delta_m` (the bare Δ_m unless a refined Δ̃_m is supplied).
    pub fn full(p: &SystemParams, g: Complex64, delta_m: f64, conv: DecayConvention) -> Self {
        let (a, m, b) = (0, 1, 2);
        LinearModel {
            modes: vec![Mode::A, Mode::M, Mode::B],
            freqs: vec![-p.delta_a(), -delta_m, p.omega_b],
            // g m† a + g* m a†  and  G m† b + G* m b†
            beam_splitters: vec![BeamSplitter { i: m, j: a, c: p.g_ma }, BeamSplitter { i: m, j: b, c: g }],
            squeezes: vec![Squeeze { i: m, j: b, c: g.conj() }],
            channels: vec![
                Channel::thermal(conv.lindblad_rate(p.kappa_a), 0.0),
                Channel::thermal(conv.lindblad_rate(p.kappa_m), 0.0),
                Channel::thermal(conv.lindblad_rate(p.gamma_b), p.n_th),
            ],
        }
    }

    /// Same model with every frequency, coupling and rate divided by `unit`.
    pub fn rescaled(&self, unit: f64) -> Self {
        let c = |z: Complex64| z / unit;
        LinearModel {
            modes: self.modes.clone(),
            freqs: self.freqs.iter().map(|w| w / unit).collect(),
            beam_splitters: self.beam_splitters.iter().map(|b| BeamSplitter { c: c(b.c), ..*b }).collect(),
            squeezes: self.squeezes.iter().map(|q| Squeeze { c: c(q.c), ..*q }).collect(),
            channels: self
                .channels
                .iter()
                .map(|ch| Channel { loss: ch.loss / unit, gain: ch.gain / unit })
                .collect(),
        }
    }

    /// Same model with every coupling removed.
    pub fn uncoupled(&self) -> Self {
        LinearModel { beam_splitters: Vec::new(), squeezes: Vec::new(), ..self.clone() }
    }
}
