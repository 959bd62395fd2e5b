//! Steady-state amplitudes and effective magnon–phonon parameters of the
//! laboratory parameter set.
//!
//! ```text
//! cargo run --release --example derive_parameters
//! ```

use std::f64::consts::TAU;

use magnomech::adiabatic::effective_params;
use magnomech::params::{spin_count, steady_state_amplitudes};
use magnomech::presets::Preset;

fn main() -> magnomech::Result<()> {
    let p = Preset::Physical.system();
    let amp = steady_state_amplitudes(&p)?;
    let e = effective_params(&p, amp.g).normalized();

    println!("|<m>|            = {:.4e}", amp.eta.norm());
    println!("<m+m> / 5N       = {:.3e}", amp.eta.norm_sqr() / (5.0 * spin_count(p.volume.unwrap())));
    println!("|G| / 2pi        = {:.4} MHz", amp.g.norm() / TAU / 1e6);
    println!("static shift     = {:.4} omega_b", amp.mean_field_shift / p.omega_b);
    println!("Delta_eff        = {:.6} omega_b", e.delta_eff);
    println!("kappa_eff        = {:.6} omega_b", e.kappa_eff);
    println!("|G|              = {:.6} omega_b", e.g.norm());
    Ok(())
}
