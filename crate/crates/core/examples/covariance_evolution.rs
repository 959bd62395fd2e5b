//! Cooling of a thermal phonon through the Gaussian covariance dynamics of
//! the effective model, relaxing onto the Lyapunov steady state.
//!
//! ```text
//! cargo run --release --example covariance_evolution
//! ```

use magnomech::adiabatic::EffectiveParams;
use magnomech::covariance::{build_effective, evolve, steady_state, CovarianceState, EvolveMethod};
use magnomech::model::DecayConvention;
use magnomech::spectrum::linspace;
use num_complex::Complex64;

fn main() -> magnomech::Result<()> {
    let e = EffectiveParams {
        delta_eff: -1.0,
        kappa_eff: 0.19,
        g: Complex64::new(0.15, 0.0),
        omega_b: 1.0,
        gamma_b: 1e-5,
        n_th: 1000.0,
    };
    let dd = build_effective(&e, DecayConvention::default());
    let v0 = CovarianceState::thermal(&[0.0, e.n_th]);
    let grid = linspace(0.0, 200.0, 21);
    let states = evolve(&dd, &v0, &grid, EvolveMethod::Propagator)?;
    for s in &states {
        println!("t = {:>6.1}   n_m = {:>10.4}   n_b = {:>10.4}", s.t, s.occupation(0), s.occupation(1));
    }
    println!("steady n_b = {:.6}", steady_state(&dd)?.occupation(1));
    Ok(())
}
