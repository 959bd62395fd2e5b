//! Fidelity between the reduced three-mode state and the effective
//! two-mode state in truncated Fock space.
//!
//! ```text
//! cargo run --release --example fidelity -- 10
//! ```
//! The optional argument is the end time in units of 1/ω_b.

use magnomech::fockdyn::{fidelity_trajectory, EvolveOptions, Truncation};
use magnomech::model::DecayConvention;
use magnomech::params::steady_state_amplitudes;
use magnomech::presets::Preset;
use magnomech::spectrum::linspace;

fn main() -> magnomech::Result<()> {
    let t_end: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(10.0);
    let mut p = Preset::Fig3.system();
    p.n_th = 0.2;
    let g = steady_state_amplitudes(&p)?.g;
    let grid = linspace(0.0, t_end, (2.0 * t_end) as usize + 1);
    let pts = fidelity_trajectory(
        &p,
        g,
        DecayConvention::default(),
        Truncation::default(),
        &grid,
        &EvolveOptions::default(),
    )?;
    for x in &pts {
        println!(
            "t = {:>5.1}   F = {:.6}   n_b full = {:.4}   n_b eff = {:.4}",
            x.t, x.fidelity, x.n_b_full, x.n_b_eff
        );
    }
    Ok(())
}
