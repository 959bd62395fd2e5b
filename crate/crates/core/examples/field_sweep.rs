//! Final phonon number against the bias field with the drive frequency and
//! the coupling held fixed. Prints the field window with n_f < 1.
//!
//! ```text
//! cargo run --release --example field_sweep
//! ```

use magnomech::params::{steady_state_amplitudes, GYROMAGNETIC_RATIO};
use magnomech::presets::Preset;
use magnomech::spectrum::{field_sweep, linspace};

fn main() -> magnomech::Result<()> {
    let p = Preset::Fig3.system();
    let g = steady_state_amplitudes(&p)?.g;
    let h0 = p.h_bias.expect("preset sets the field");
    let half = 3.0 * p.omega_b / GYROMAGNETIC_RATIO;
    let sweep = field_sweep(&p, g, &linspace(h0 - half, h0 + half, 601), None)?;

    for row in sweep.rows.iter().step_by(60) {
        println!(
            "H = {:.6} T   delta_eff = {:+.3}   n_f = {:.4e}",
            row.h,
            row.delta_eff / p.omega_b,
            row.cooling.n_f
        );
    }
    match sweep.window_fields() {
        Some((lo, hi)) => println!("n_f < 1 for {lo:.6} T <= H <= {hi:.6} T"),
        None => println!("no ground-state window"),
    }
    Ok(())
}
