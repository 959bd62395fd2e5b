//! Writes a parameter file in Hz, then runs the command-line front end on it
//! exactly as the binary would.
//!
//! ```text
//! cargo run --release --example config_file
//! ```

use magnomech::cli;

const CONFIG: &str = r#"{
  "units": "si",
  "freqs_hz": {
    "omega_a": 10.1e9, "omega_m": 10.1e9, "omega_b": 10e6, "omega_d": 10.09e9,
    "kappa_a": 1e9, "kappa_m": 0.15e6, "gamma_b": 100,
    "g_ma": 20e6, "g_mb": 0.1, "eps_d": 4e14
  },
  "n_th": 1000
}"#;

fn main() -> std::io::Result<()> {
    let path = std::env::temp_dir().join("magnomech_example.json");
    std::fs::write(&path, CONFIG)?;
    let code = cli::run(["magnomech", "steady", "--config", path.to_str().unwrap()]);
    std::process::exit(code);
}
