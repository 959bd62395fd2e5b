//! Regime checks for both presets: resolved sideband, low-lying magnon
//! excitation, negligible Kerr term, adiabatic elimination and stability.
//!
//! ```text
//! cargo run --release --example validate_regimes
//! ```

use magnomech::adiabatic::effective_params;
use magnomech::model::DecayConvention;
use magnomech::params::steady_state_amplitudes;
use magnomech::presets::Preset;
use magnomech::validate::{check_regimes, Thresholds};

fn main() -> magnomech::Result<()> {
    for preset in Preset::ALL {
        let p = preset.system();
        let amp = steady_state_amplitudes(&p)?;
        let e = effective_params(&p, amp.g);
        let report = check_regimes(&p, &amp, &e, DecayConvention::default(), &Thresholds::default());
        println!("[{}]\n{report}\n", preset.name());
    }
    Ok(())
}
