//! Steady phonon number on the red sideband as the coupling approaches the
//! stability bound: closed form, Lyapunov solution and weak-coupling theory.
//!
//! ```text
//! cargo run --release --example strong_coupling
//! ```

use magnomech::adiabatic::EffectiveParams;
use magnomech::covariance::{analytic_nbs, build_effective, stability, steady_state};
use magnomech::model::{DecayConvention, Mode};
use magnomech::spectrum::cooling_rates;
use num_complex::Complex64;

fn main() -> magnomech::Result<()> {
    let conv = DecayConvention::default();
    let base = EffectiveParams {
        delta_eff: -1.0,
        kappa_eff: 0.19,
        g: Complex64::new(0.0, 0.0),
        omega_b: 1.0,
        gamma_b: 1e-5,
        n_th: 1000.0,
    };
    let bound = stability(&base, base.g, conv).analytic_threshold;
    println!("stability bound |G| < {bound:.6} omega_b ({})", conv.name());
    println!("{:>6} {:>12} {:>12} {:>12}", "G", "closed", "lyapunov", "weak");
    for g in [0.05, 0.1, 0.2, 0.3, 0.4, 0.45, 0.5] {
        let e = base.with_coupling(Complex64::new(g, 0.0));
        if !stability(&e, e.g, conv).stable() {
            println!("{g:>6.2} unstable");
            continue;
        }
        let dd = build_effective(&e, conv);
        let lyap = steady_state(&dd)?.occupation(dd.index_of(Mode::B).unwrap());
        let closed = analytic_nbs(g, e.kappa_eff, e.gamma_b, e.omega_b, e.n_th)?;
        let weak = cooling_rates(&e)?.n_f;
        println!("{g:>6.2} {closed:>12.5} {lyap:>12.5} {weak:>12.5}");
    }
    Ok(())
}
