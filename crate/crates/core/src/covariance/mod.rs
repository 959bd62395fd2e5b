//! Gaussian second-moment dynamics of the linearized models.
//!
//! States are covariance matrices over the quadratures
//! `x = (o + o†)/√2`, `p = (o − o†)/(i√2)` ordered mode by mode, with
//! `V_jk = ⟨{ΔR_j, ΔR_k}⟩/2`. A quadratic Hamiltonian `½ Rᵀ M R` and the
//! per-mode Lindblad channels give `dV/dt = A V + V Aᵀ + D`.

mod lyapunov;

pub use lyapunov::{integrate_rk45, lyapunov_residual, solve_continuous_lyapunov, symmetrize, Propagator};

use std::collections::HashMap;

use nalgebra::{Complex, DMatrix};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::adiabatic::EffectiveParams;
use crate::error::{Error, Result};
use crate::fockdyn::HermitianEigen;
use crate::model::{DecayConvention, LinearModel, Mode};
use crate::params::SystemParams;

/// Tolerance on the smallest eigenvalue of V + iΩ/2.
pub const UNCERTAINTY_TOL: f64 = 1e-9;

/// Drift and diffusion of a linear Gaussian model.
#[derive(Clone, Debug, PartialEq)]
pub struct DriftDiffusion {
    pub a: DMatrix<f64>,
    pub d: DMatrix<f64>,
    pub modes: Vec<Mode>,
}

/// Quadratic form M of `H = ½ Rᵀ M R` (constant terms dropped).
pub fn hamiltonian_matrix(model: &LinearModel) -> DMatrix<f64> {
    let n = 2 * model.n_modes();
    let mut m = DMatrix::<f64>::zeros(n, n);
    let x = |i: usize| 2 * i;
    let p = |i: usize| 2 * i + 1;
    let mut add = |r: usize, c: usize, v: f64| {
        m[(r, c)] += v;
        if r != c {
            m[(c, r)] += v;
        }
    };
    for (i, &w) in model.freqs.iter().enumerate() {
        add(x(i), x(i), w);
        add(p(i), p(i), w);
    }
    // c o_i† o_j + h.c. = Re c (x_i x_j + p_i p_j) − Im c (x_i p_j − p_i x_j)
    for bs in &model.beam_splitters {
        let (i, j, c) = (bs.i, bs.j, bs.c);
        add(x(i), x(j), c.re);
        add(p(i), p(j), c.re);
        add(x(i), p(j), -c.im);
        add(p(i), x(j), c.im);
    }
    // c o_i o_j + h.c. = Re c (x_i x_j − p_i p_j) − Im c (x_i p_j + p_i x_j)
    for sq in &model.squeezes {
        let (i, j, c) = (sq.i, sq.j, sq.c);
        add(x(i), x(j), c.re);
        add(p(i), p(j), -c.re);
        add(x(i), p(j), -c.im);
        add(p(i), x(j), -c.im);
    }
    m
}

/// Symplectic form Ω = ⊕ [[0, 1], [−1, 0]].
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for i in 0..n_modes {
        omega[(2 * i, 2 * i + 1)] = 1.0;
        omega[(2 * i + 1, 2 * i)] = -1.0;
    }
    omega
}

impl DriftDiffusion {
    pub fn from_model(model: &LinearModel) -> Self {
        let n = model.n_modes();
        let mut a = symplectic_form(n) * hamiltonian_matrix(model);
        let mut d = DMatrix::zeros(2 * n, 2 * n);
        for (i, ch) in model.channels.iter().enumerate() {
            let damp = 0.5 * (ch.loss - ch.gain);
            let diff = 0.5 * (ch.loss + ch.gain);
            for k in [2 * i, 2 * i + 1] {
                a[(k, k)] -= damp;
                d[(k, k)] = diff;
            }
        }
        DriftDiffusion { a, d, modes: model.modes.clone() }
    }

    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn index_of(&self, mode: Mode) -> Option<usize> {
        self.modes.iter().position(|&m| m == mode)
    }

    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.a.complex_eigenvalues().iter().map(|z| Complex64::new(z.re, z.im)).collect()
    }

    /// Largest real part of the drift spectrum.
    pub fn max_real_part(&self) -> f64 {
        self.eigenvalues().iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Slowest relaxation rate, min |Re λ(A)|.
    pub fn slowest_rate(&self) -> f64 {
        self.eigenvalues().iter().map(|z| z.re.abs()).fold(f64::INFINITY, f64::min)
    }

    pub fn is_stable(&self) -> bool {
        self.max_real_part() < 0.0
    }
}

/// Drift/diffusion of the effective magnon–phonon model.
pub fn build_effective(e: &EffectiveParams, conv: DecayConvention) -> DriftDiffusion {
    DriftDiffusion::from_model(&LinearModel::effective(e, conv))
}

/// Drift/diffusion of the three-mode cavity–magnon–phonon model with the
/// bare magnon detuning.
pub fn build_full(p: &SystemParams, g: Complex64, conv: DecayConvention) -> DriftDiffusion {
    DriftDiffusion::from_model(&LinearModel::full(p, g, p.delta_m(), conv))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceState {
    pub v: DMatrix<f64>,
    pub t: f64,
}

impl CovarianceState {
    /// Product of thermal states with the given occupations.
    pub fn thermal(occupations: &[f64]) -> Self {
        let diag: Vec<f64> = occupations.iter().flat_map(|&n| [n + 0.5, n + 0.5]).collect();
        CovarianceState { v: DMatrix::from_diagonal(&diag.into()), t: 0.0 }
    }

    pub fn vacuum(n_modes: usize) -> Self {
        Self::thermal(&vec![0.0; n_modes])
    }

    pub fn n_modes(&self) -> usize {
        self.v.nrows() / 2
    }

    /// ⟨o_i† o_i⟩ = (V_xx + V_pp − 1)/2.
    pub fn occupation(&self, i: usize) -> f64 {
        0.5 * (self.v[(2 * i, 2 * i)] + self.v[(2 * i + 1, 2 * i + 1)] - 1.0)
    }

    /// ⟨o_i† o_j⟩.
    pub fn number_moment(&self, i: usize, j: usize) -> Complex64 {
        let v = &self.v;
        let (xi, pi, xj, pj) = (2 * i, 2 * i + 1, 2 * j, 2 * j + 1);
        let re = 0.5 * (v[(xi, xj)] + v[(pi, pj)]) - if i == j { 0.5 } else { 0.0 };
        let im = 0.5 * (v[(xi, pj)] - v[(pi, xj)]);
        Complex64::new(re, im)
    }

    /// ⟨o_i o_j⟩.
    pub fn pair_moment(&self, i: usize, j: usize) -> Complex64 {
        let v = &self.v;
        let (xi, pi, xj, pj) = (2 * i, 2 * i + 1, 2 * j, 2 * j + 1);
        Complex64::new(0.5 * (v[(xi, xj)] - v[(pi, pj)]), 0.5 * (v[(xi, pj)] + v[(pi, xj)]))
    }

    /// Smallest eigenvalue of the Hermitian matrix V + iΩ/2; non-negative for
    /// physical states.
    pub fn uncertainty_margin(&self) -> f64 {
        let n = self.v.nrows();
        let omega = symplectic_form(n / 2);
        let h =
            DMatrix::<Complex<f64>>::from_fn(n, n, |r, c| Complex::new(self.v[(r, c)], 0.5 * omega[(r, c)]));
        HermitianEigen::new(&h).values.min()
    }

    pub fn is_physical(&self) -> bool {
        let sym = (&self.v - self.v.transpose()).amax() <= 1e-12 * self.v.amax().max(1.0);
        sym && self.uncertainty_margin() >= -UNCERTAINTY_TOL
    }
}

/// Steady state of a stable model, `A V + V Aᵀ + D = 0`.
pub fn steady_state(dd: &DriftDiffusion) -> Result<CovarianceState> {
    let max_re = dd.max_real_part();
    if max_re >= 0.0 {
        return Err(Error::Unstable(format!(
            "drift matrix has an eigenvalue with real part {max_re:.6e} >= 0"
        )));
    }
    let v = solve_continuous_lyapunov(&dd.a, &dd.d)?;
    let res = lyapunov_residual(&dd.a, &v, &dd.d);
    if res > 1e-10 * dd.d.norm().max(f64::MIN_POSITIVE) {
        return Err(Error::Singular(format!(
            "Lyapunov residual {res:.3e} exceeds tolerance (ill-conditioned drift)"
        )));
    }
    Ok(CovarianceState { v, t: f64::INFINITY })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvolveMethod {
    /// Exact matrix-exponential steps between grid points.
    #[default]
    Propagator,
    /// Adaptive Dormand–Prince with tolerance 1e-10.
    Rk45,
}

/// Covariance at every time of `t_grid` starting from `v0` at `t_grid[0]`.
pub fn evolve(
    dd: &DriftDiffusion,
    v0: &CovarianceState,
    t_grid: &[f64],
    method: EvolveMethod,
) -> Result<Vec<CovarianceState>> {
    if v0.v.shape() != dd.a.shape() {
        return Err(Error::Domain(format!(
            "initial covariance {:?} does not match drift {:?}",
            v0.v.shape(),
            dd.a.shape()
        )));
    }
    if t_grid.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::Domain("time grid must be ascending".into()));
    }
    let mut out = Vec::with_capacity(t_grid.len());
    let Some(&t0) = t_grid.first() else {
        return Ok(out);
    };
    let mut v = symmetrize(&v0.v);
    out.push(CovarianceState { v: v.clone(), t: t0 });
    let mut cache: HashMap<u64, Propagator> = HashMap::new();
    for w in t_grid.windows(2) {
        let h = w[1] - w[0];
        v = match method {
            EvolveMethod::Propagator => {
                cache.entry(h.to_bits()).or_insert_with(|| Propagator::new(&dd.a, &dd.d, h)).apply(&v)
            }
            EvolveMethod::Rk45 => integrate_rk45(&dd.a, &dd.d, &v, h, 1e-10).map_err(|e| match e {
                Error::Integration { t, reason } => Error::Integration { t: w[0] + t, reason },
                other => other,
            })?,
        };
        if !v.iter().all(|x| x.is_finite()) {
            return Err(Error::Integration { t: w[1], reason: "covariance diverged".into() });
        }
        out.push(CovarianceState { v: v.clone(), t: w[1] });
    }
    Ok(out)
}

/// Closed-form strong-coupling phonon number at Δ_eff = −ω_b:
///
/// ```text
/// N = (4|G|² + κ²) γ n_th / (4|G|² (γ + κ))
///   + [4ω²(κ² + 8|G|²) + κ²(κ² − 8|G|²)] / [16ω² (4ω² + κ² − 16|G|²)]
/// ```
pub fn analytic_nbs(g: f64, kappa_eff: f64, gamma_b: f64, omega_b: f64, n_th: f64) -> Result<f64> {
    let g2 = g * g;
    let k2 = kappa_eff * kappa_eff;
    let w2 = omega_b * omega_b;
    let pole = 4.0 * w2 + k2 - 16.0 * g2;
    if pole.abs() <= 1e-12 * (4.0 * w2 + k2) {
        return Err(Error::Singular(format!(
            "16|G|^2 = 4 omega_b^2 + kappa_eff^2 (|G| = {g}): closed form diverges"
        )));
    }
    if g2 == 0.0 {
        return Err(Error::Singular("closed form requires G != 0".into()));
    }
    if gamma_b > 0.0 && kappa_eff > 0.0 && 4.0 * g2 / (gamma_b * kappa_eff) < 100.0 {
        log::warn!(
            "4|G|^2/(gamma_b kappa_eff) = {:.3e} is not >> 1; closed form outside its regime",
            4.0 * g2 / (gamma_b * kappa_eff)
        );
    }
    let thermal = (4.0 * g2 + k2) / (4.0 * g2 * (gamma_b + kappa_eff)) * gamma_b * n_th;
    let quantum = (4.0 * w2 * (k2 + 8.0 * g2) + k2 * (k2 - 8.0 * g2)) / (16.0 * w2 * pole);
    Ok(thermal + quantum)
}

/// Magnon–phonon coupling at which the closed-form stability bound is
/// saturated, for a magnon channel of Lindblad rate `rate`:
/// `|G|² = ω_b²/4 + rate²/16`.
pub fn analytic_threshold(omega_b: f64, rate: f64) -> f64 {
    (0.25 * omega_b * omega_b + rate * rate / 16.0).sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityVerdict {
    /// Closed-form verdict; only defined on the red sideband Δ_eff = −ω_b.
    pub analytic: Option<bool>,
    /// |G| at the closed-form boundary.
    pub analytic_threshold: f64,
    /// All drift eigenvalues in the left half plane.
    pub eigen_stable: bool,
    pub max_real_part: f64,
}

impl StabilityVerdict {
    pub fn stable(&self) -> bool {
        self.eigen_stable
    }

    /// Both checks agree wherever the closed form applies.
    pub fn consistent(&self) -> bool {
        self.analytic.is_none_or(|a| a == self.eigen_stable)
    }
}

/// Routh–Hurwitz style closed-form check next to the eigenvalue test on the
/// effective drift matrix. The coupling used is `g`, replacing `e.g`.
pub fn stability(e: &EffectiveParams, g: Complex64, conv: DecayConvention) -> StabilityVerdict {
    let e = e.with_coupling(g);
    let dd = build_effective(&e, conv);
    let max_real_part = dd.max_real_part();
    let threshold = analytic_threshold(e.omega_b, conv.lindblad_rate(e.kappa_eff));
    let red_sideband = (e.delta_eff + e.omega_b).abs() <= 1e-9 * e.omega_b;
    StabilityVerdict {
        analytic: red_sideband.then(|| g.norm() < threshold),
        analytic_threshold: threshold,
        eigen_stable: max_real_part < 0.0,
        max_real_part,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const CONVS: [DecayConvention; 2] = [DecayConvention::Langevin, DecayConvention::MasterEquation];

    fn eff(g: f64, kappa: f64, n_th: f64) -> EffectiveParams {
        EffectiveParams {
            delta_eff: -1.0,
            kappa_eff: kappa,
            g: Complex64::new(g, 0.0),
            omega_b: 1.0,
            gamma_b: 1e-5,
            n_th,
        }
    }

    #[test]
    fn uncoupled_steady_state_is_bath() {
        for conv in CONVS {
            let dd = build_effective(&eff(0.0, 0.19, 7.5), conv);
            let ss = steady_state(&dd).unwrap();
            assert_relative_eq!(ss.occupation(1), 7.5, max_relative = 1e-9);
            assert!(ss.occupation(0).abs() < 1e-12);
        }
    }

    #[test]
    fn uncoupled_spectrum() {
        let dd = build_effective(&eff(0.0, 0.19, 1.0), DecayConvention::Langevin);
        let mut eig = dd.eigenvalues();
        eig.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        assert_relative_eq!(eig[0].re, -0.19, max_relative = 1e-12);
        assert_relative_eq!(eig[0].im.abs(), 1.0, max_relative = 1e-12);
        assert_relative_eq!(eig[3].re, -1e-5, max_relative = 1e-9);
        assert_relative_eq!(eig[3].im.abs(), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn drift_reproduces_langevin_equations() {
        // ṁ = (iΔ − κ) m − iG(b + b†) for real G, read off in quadratures.
        let mut e = eff(0.3, 0.2, 0.0);
        e.delta_eff = -0.7;
        let dd = build_effective(&e, DecayConvention::Langevin);
        let a = &dd.a;
        assert_relative_eq!(a[(0, 0)], -0.2);
        assert_relative_eq!(a[(0, 1)], 0.7);
        assert_relative_eq!(a[(1, 0)], -0.7);
        assert_relative_eq!(a[(1, 2)], -0.6);
        assert_relative_eq!(a[(3, 0)], -0.6);
        assert_relative_eq!(a[(2, 3)], 1.0);
        assert_relative_eq!(a[(3, 2)], -1.0);
    }

    #[test]
    fn uncoupled_full_model_is_block_diagonal() {
        let p = crate::presets::Preset::Fig3.system();
        let mut q = p.clone();
        q.g_ma = Complex64::new(0.0, 0.0);
        let dd = build_full(&q, Complex64::new(0.0, 0.0), DecayConvention::Langevin);
        for r in 0..6 {
            for c in 0..6 {
                if r / 2 != c / 2 {
                    assert_eq!(dd.a[(r, c)], 0.0);
                }
            }
        }
        let ss = steady_state(&dd).unwrap();
        assert!(ss.occupation(0).abs() < 1e-12);
        assert_relative_eq!(ss.occupation(2), p.n_th, max_relative = 1e-9);
    }

    #[test]
    fn moments_of_thermal_state() {
        let s = CovarianceState::thermal(&[0.3, 2.0]);
        assert_relative_eq!(s.number_moment(1, 1).re, 2.0, max_relative = 1e-15);
        assert_eq!(s.number_moment(0, 1), Complex64::new(0.0, 0.0));
        assert_eq!(s.pair_moment(0, 0), Complex64::new(0.0, 0.0));
        assert_relative_eq!(s.uncertainty_margin(), 0.3, max_relative = 1e-12);
        assert!(s.is_physical());
        let mut bad = CovarianceState::vacuum(1);
        bad.v *= 0.5;
        assert!(!bad.is_physical());
    }

    #[test]
    fn closed_form_values() {
        let n = analytic_nbs(0.4, 0.3, 1e-5, 1.0, 1000.0).unwrap();
        assert_relative_eq!(n, 0.2575, max_relative = 1e-3);
        let n = analytic_nbs(0.15, 0.3, 1e-5, 1.0, 1000.0).unwrap();
        assert_relative_eq!(n, 0.0846, max_relative = 1e-3);
        let g_pole = ((4.0 + 0.09) / 16.0f64).sqrt();
        assert!(matches!(analytic_nbs(g_pole, 0.3, 1e-5, 1.0, 1000.0), Err(Error::Singular(_))));
    }

    #[test]
    fn stability_examples() {
        let conv = DecayConvention::MasterEquation;
        let e = eff(0.0, 0.3, 1000.0);
        let v = stability(&e, Complex64::new(0.0, 0.0), conv);
        assert_eq!(v.analytic, Some(true));
        assert!(v.eigen_stable);
        assert_relative_eq!(v.analytic_threshold, 0.505_59, max_relative = 1e-5);
        let v = stability(&e, Complex64::new(0.4, 0.0), conv);
        assert!(v.eigen_stable && v.consistent());
        let v = stability(&e, Complex64::new(0.6, 0.0), conv);
        assert_eq!(v.analytic, Some(false));
        assert!(!v.eigen_stable);
        let mut off = e;
        off.delta_eff = -0.5;
        assert_eq!(stability(&off, Complex64::new(0.1, 0.0), conv).analytic, None);
    }

    #[test]
    fn unstable_has_no_steady_state() {
        let dd = build_effective(&eff(0.6, 0.3, 1000.0), DecayConvention::MasterEquation);
        assert!(matches!(steady_state(&dd), Err(Error::Unstable(_))));
    }

    #[test]
    fn evolution_settles_on_lyapunov_solution() {
        for conv in CONVS {
            let dd = build_effective(&eff(0.4, 0.3, 1000.0), conv);
            let ss = steady_state(&dd).unwrap();
            let v0 = CovarianceState::thermal(&[0.0, 1000.0]);
            let traj = evolve(&dd, &v0, &[0.0, 0.0, 1e4], EvolveMethod::Propagator).unwrap();
            assert_eq!(traj[1].v, v0.v);
            assert!((&traj[2].v - &ss.v).norm() < 1e-8);
            let again = evolve(&dd, &ss, &[0.0, 10.0, 1e3], EvolveMethod::Propagator).unwrap();
            for s in &again {
                assert!((&s.v - &ss.v).norm() < 1e-10 * ss.v.norm());
            }
        }
    }

    #[test]
    fn propagator_and_rk45_agree() {
        let dd = build_effective(&eff(0.2, 0.19, 3.0), DecayConvention::Langevin);
        let v0 = CovarianceState::thermal(&[0.0, 3.0]);
        let grid: Vec<f64> = (0..=20).map(|i| i as f64 * 0.5).collect();
        let a = evolve(&dd, &v0, &grid, EvolveMethod::Propagator).unwrap();
        let b = evolve(&dd, &v0, &grid, EvolveMethod::Rk45).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((&x.v - &y.v).norm() < 1e-7, "t = {}", x.t);
            assert!(x.is_physical());
        }
    }

    #[test]
    fn descending_grid_rejected() {
        let dd = build_effective(&eff(0.2, 0.19, 3.0), DecayConvention::Langevin);
        let v0 = CovarianceState::vacuum(2);
        assert!(evolve(&dd, &v0, &[0.0, 2.0, 1.0], EvolveMethod::Propagator).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn uncertainty_preserved_along_evolution(
            g_re in -0.4f64..0.4,
            g_im in -0.4f64..0.4,
            delta in -2.0f64..0.0,
            kappa in 0.05f64..1.0,
            n_th in 0.0f64..20.0,
        ) {
            let e = EffectiveParams {
                delta_eff: delta,
                kappa_eff: kappa,
                g: Complex64::new(g_re, g_im),
                omega_b: 1.0,
                gamma_b: 1e-3,
                n_th,
            };
            let dd = build_effective(&e, DecayConvention::Langevin);
            let v0 = CovarianceState::thermal(&[0.0, n_th]);
            let grid: Vec<f64> = (0..=10).map(|i| i as f64).collect();
            let traj = evolve(&dd, &v0, &grid, EvolveMethod::Propagator).unwrap();
            for s in &traj {
                let scale = s.v.amax().max(1.0);
                prop_assert!(s.uncertainty_margin() >= -UNCERTAINTY_TOL * scale);
            }
        }

        #[test]
        fn complex_coupling_phase_is_irrelevant_for_occupations(phase in 0.0f64..std::f64::consts::TAU, g in 0.0f64..0.4) {
            let base = eff(g, 0.3, 10.0);
            let rot = base.with_coupling(Complex64::from_polar(g, phase));
            let a = steady_state(&build_effective(&base, DecayConvention::Langevin)).unwrap();
            let b = steady_state(&build_effective(&rot, DecayConvention::Langevin)).unwrap();
            prop_assert!((a.occupation(1) - b.occupation(1)).abs() < 1e-8 * a.occupation(1).max(1.0));
        }
    }
}
