//! Magnetic damping and final phonon number against the effective magnon
//! detuning. Damping peaks on the red sideband Δ_eff = −ω_b.
//!
//! ```text
//! cargo run --release --example detuning_sweep
//! ```

use magnomech::adiabatic::EffectiveParams;
use magnomech::spectrum::detuning_sweep;
use num_complex::Complex64;

fn main() -> magnomech::Result<()> {
    let template = EffectiveParams {
        delta_eff: -1.0,
        kappa_eff: 0.2,
        g: Complex64::new(0.05, 0.0),
        omega_b: 1.0,
        gamma_b: 1e-5,
        n_th: 1000.0,
    };
    let sweep = detuning_sweep(&template, template.g, -3.0, 3.0, 601)?;

    println!("{:>10} {:>14} {:>14}", "delta_eff", "gamma_md", "n_f");
    for row in sweep.rows.iter().step_by(50) {
        println!("{:>10.3} {:>14.6e} {:>14.6e}", row.delta_eff, row.cooling.gamma_md, row.cooling.n_f);
    }
    let best = &sweep.rows[sweep.argmax_damping];
    println!("largest damping at delta_eff = {:.3}", best.delta_eff);
    if let Some(i) = sweep.argmin_n_f {
        println!(
            "lowest n_f = {:.4} at delta_eff = {:.3}",
            sweep.rows[i].cooling.n_f, sweep.rows[i].delta_eff
        );
    }
    Ok(())
}
