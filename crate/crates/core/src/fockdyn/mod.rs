//! Truncated Fock-space master-equation dynamics of the linearized models.

mod hermitian;
mod lindblad;
mod space;
mod state;

pub use hermitian::HermitianEigen;
pub use lindblad::{
    dissipators, evolve_density, lindblad_rhs, Dissipator, EvolveOptions, Lindbladian, Trajectory,
};
pub use space::{build_hamiltonian, max_abs, CMatrix, FockSpace, DEFAULT_DIM_CAP};
pub use state::{fidelity, partial_trace, thermal_populations, DensityMatrix, PSD_TOL};

use num_complex::Complex64;
use serde::Serialize;

use crate::adiabatic::effective_params;
use crate::error::{Error, Result};
use crate::model::{DecayConvention, LinearModel, Mode};
use crate::params::SystemParams;

/// Truncations (a, m, b) for the three-mode run; the two-mode run reuses m and b.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Truncation {
    pub a: usize,
    pub m: usize,
    pub b: usize,
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation { a: 5, m: 6, b: 8 }
    }
}

impl std::str::FromStr for Truncation {
    type Err = String;

    /// Parses `a=5,m=6,b=8`; omitted modes keep their default.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let mut t = Truncation::default();
        for part in s.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) = part.split_once('=').ok_or_else(|| format!("expected mode=dim, got '{part}'"))?;
            let v: usize = v.trim().parse().map_err(|_| format!("bad dimension '{v}'"))?;
            match k.trim().parse::<Mode>()? {
                Mode::A => t.a = v,
                Mode::M => t.m = v,
                Mode::B => t.b = v,
            }
        }
        Ok(t)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FidelityPoint {
    /// Time in units of 1/ω_b.
    pub t: f64,
    pub fidelity: f64,
    pub n_b_full: f64,
    pub n_b_eff: f64,
}

/// Evolves the three-mode model and its two-mode effective counterpart from
/// the same initial state (vacuum cavity and magnon, thermal phonon at
/// `p.n_th`) and returns the fidelity between the reduced magnon–phonon
/// state and the effective state. `t_grid` is in units of 1/ω_b.
pub fn fidelity_trajectory(
    p: &SystemParams,
    g: Complex64,
    conv: DecayConvention,
    dims: Truncation,
    t_grid: &[f64],
    opts: &EvolveOptions,
) -> Result<Vec<FidelityPoint>> {
    let w = p.omega_b;
    let full_model = LinearModel::full(p, g, p.delta_m(), conv).rescaled(w);
    let eff_model = LinearModel::effective(&effective_params(p, g), conv).rescaled(w);
    let full_space = FockSpace::new(&[Mode::A, Mode::M, Mode::B], &[dims.a, dims.m, dims.b])?;
    let eff_space = FockSpace::new(&[Mode::M, Mode::B], &[dims.m, dims.b])?;
    let l_full = Lindbladian::from_model(&full_space, &full_model)?;
    let l_eff = Lindbladian::from_model(&eff_space, &eff_model)?;
    let rho_full = DensityMatrix::thermal(&full_space, &[0.0, 0.0, p.n_th])?;
    let rho_eff = DensityMatrix::thermal(&eff_space, &[0.0, p.n_th])?;

    let run = |rho0: &DensityMatrix, l: &Lindbladian, reduce: bool| -> Result<Vec<DensityMatrix>> {
        let mut states = Vec::with_capacity(t_grid.len());
        let mut failure = None;
        evolve_density(rho0, t_grid, l, opts, |_, rho| {
            if failure.is_some() {
                return;
            }
            if reduce {
                match partial_trace(rho, &[Mode::M, Mode::B]) {
                    Ok(r) => states.push(r),
                    Err(e) => failure = Some(e),
                }
            } else {
                states.push(rho.clone());
            }
        })?;
        match failure {
            Some(e) => Err(e),
            None => Ok(states),
        }
    };
    let (full, eff) = rayon::join(|| run(&rho_full, &l_full, true), || run(&rho_eff, &l_eff, false));
    let (full, eff) = (full?, eff?);
    if full.len() != eff.len() {
        return Err(Error::Integration { t: 0.0, reason: "trajectories of unequal length".into() });
    }
    t_grid
        .iter()
        .zip(full.iter().zip(&eff))
        .map(|(&t, (rf, re))| {
            Ok(FidelityPoint {
                t,
                fidelity: fidelity(rf, re)?,
                n_b_full: rf.occupation(Mode::B).unwrap_or(0.0),
                n_b_eff: re.occupation(Mode::B).unwrap_or(0.0),
            })
        })
        .collect()
}
