use nalgebra_sparse::{CooMatrix, CsrMatrix};
use num_complex::Complex64;

use super::space::{build_hamiltonian, max_abs, CMatrix, FockSpace};
use super::state::DensityMatrix;
use crate::error::{Error, Result};
use crate::model::LinearModel;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Jump operator `op` with Lindblad rate `rate`: `rate·(oρo† − ½{o†o, ρ})`.
#[derive(Clone, Debug)]
pub struct Dissipator {
    pub op: CMatrix,
    pub rate: f64,
}

/// Loss and gain dissipators of every channel with a nonzero rate.
pub fn dissipators(space: &FockSpace, model: &LinearModel) -> Result<Vec<Dissipator>> {
    space.check_model(model)?;
    let mut out = Vec::new();
    for (k, ch) in model.channels.iter().enumerate() {
        let a = space.annihilation(k);
        if ch.gain > 0.0 {
            out.push(Dissipator { op: a.adjoint(), rate: ch.gain });
        }
        if ch.loss > 0.0 {
            out.push(Dissipator { op: a, rate: ch.loss });
        }
    }
    Ok(out)
}

/// Dense reference right-hand side `i[ρ, H] + Σ γ 𝒟[o]ρ`.
pub fn lindblad_rhs(rho: &CMatrix, h: &CMatrix, dissipators: &[Dissipator]) -> CMatrix {
    let mut out = (rho * h - h * rho) * I;
    for d in dissipators {
        let o = &d.op;
        let od = o.adjoint();
        let n = &od * o;
        let term = o * rho * &od - (&n * rho + rho * &n) * Complex64::new(0.5, 0.0);
        out += term * Complex64::new(d.rate, 0.0);
    }
    out
}

fn to_csr(m: &CMatrix) -> CsrMatrix<Complex64> {
    let mut coo = CooMatrix::new(m.nrows(), m.ncols());
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            let v = m[(r, c)];
            if v != Complex64::new(0.0, 0.0) {
                coo.push(r, c, v);
            }
        }
    }
    CsrMatrix::from(&coo)
}

/// `a · b` for sparse `a` and column-major dense `b`, one column at a time.
fn spmm(a: &CsrMatrix<Complex64>, b: &CMatrix) -> CMatrix {
    let (m, n) = (a.nrows(), b.ncols());
    let (offsets, cols, vals) = (a.row_offsets(), a.col_indices(), a.values());
    let mut out = CMatrix::zeros(m, n);
    let src = b.as_slice();
    let k = b.nrows();
    for (j, dst) in out.as_mut_slice().chunks_exact_mut(m).enumerate() {
        let col = &src[j * k..(j + 1) * k];
        for (i, d) in dst.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for p in offsets[i]..offsets[i + 1] {
                acc += vals[p] * col[cols[p]];
            }
            *d = acc;
        }
    }
    out
}

/// Lindbladian specialised to Hermitian states. With the non-Hermitian
/// `K = H − (i/2) Σ γ o†o` and `X = Kρ` the generator is
/// `−i(X − X†) + Σ γ oρo†`, and `oρo† = o(oρ)†`, so every product is a
/// sparse operator times a dense state.
#[derive(Clone, Debug)]
pub struct Lindbladian {
    dim: usize,
    k: CsrMatrix<Complex64>,
    jumps: Vec<(CsrMatrix<Complex64>, f64)>,
    norm_bound: f64,
}

impl Lindbladian {
    pub fn new(h: &CMatrix, dissipators: &[Dissipator]) -> Result<Self> {
        let dim = h.nrows();
        if h.ncols() != dim || dissipators.iter().any(|d| d.op.shape() != (dim, dim)) {
            return Err(Error::Domain("operator shapes do not match".into()));
        }
        let mut gamma = CMatrix::zeros(dim, dim);
        for d in dissipators {
            gamma += d.op.adjoint() * &d.op * Complex64::new(d.rate, 0.0);
        }
        // coherent part rotates at most at 2‖H‖, coherences decay at most at max Γ
        let row_sum = h.row_iter().map(|r| r.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max);
        let decay = gamma.row_iter().map(|r| r.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max);
        let k = h - gamma * Complex64::new(0.0, 0.5);
        let jumps = dissipators.iter().map(|d| (to_csr(&d.op), d.rate)).collect();
        Ok(Lindbladian { dim, k: to_csr(&k), jumps, norm_bound: (2.0 * row_sum).hypot(decay) })
    }

    pub fn from_model(space: &FockSpace, model: &LinearModel) -> Result<Self> {
        Self::new(&build_hamiltonian(space, model)?, &dissipators(space, model)?)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Rough size of the generator's spectrum, used to pick the step.
    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let n = self.dim;
        let x = spmm(&self.k, rho);
        let mut out = CMatrix::from_fn(n, n, |i, j| -I * (x[(i, j)] - x[(j, i)].conj()));
        // (oρo†)_ij = Σ o_ip ρ_pq conj(o_jq), summed straight from the rows of o
        for (o, rate) in &self.jumps {
            let (offsets, cols, vals) = (o.row_offsets(), o.col_indices(), o.values());
            for j in 0..n {
                for q in offsets[j]..offsets[j + 1] {
                    let right = vals[q].conj() * *rate;
                    let rho_col = rho.column(cols[q]);
                    let mut dst = out.column_mut(j);
                    for i in 0..n {
                        for p in offsets[i]..offsets[i + 1] {
                            dst[i] += vals[p] * rho_col[cols[p]] * right;
                        }
                    }
                }
            }
        }
        out
    }

    fn rk4_step(&self, rho: &CMatrix, dt: f64) -> CMatrix {
        let h = Complex64::new(dt, 0.0);
        let half = Complex64::new(0.5 * dt, 0.0);
        let k1 = self.apply(rho);
        let k2 = self.apply(&(rho + &k1 * half));
        let k3 = self.apply(&(rho + &k2 * half));
        let k4 = self.apply(&(rho + &k3 * h));
        rho + (k1 + (k2 + k3) * Complex64::new(2.0, 0.0) + k4) * Complex64::new(dt / 6.0, 0.0)
    }
}

#[derive(Clone, Debug)]
pub struct EvolveOptions {
    /// Fixed step; chosen from the generator norm when `None`.
    pub dt: Option<f64>,
    /// Upper bound on the automatic step, in the generator's time unit.
    pub max_dt: f64,
    /// Allowed trace and Hermiticity drift over the run.
    pub drift_tol: f64,
    /// Top-level Fock population above which the run is rejected.
    pub leak_tol: f64,
    pub snapshots: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions { dt: None, max_dt: 0.01, drift_tol: 1e-8, leak_tol: 1e-4, snapshots: false }
    }
}

/// The automatic step is `min(max_dt, RK4_SAFETY / bound)`; RK4 is stable
/// up to |λ dt| ≈ 2.8 on the negative real axis.
const RK4_SAFETY: f64 = 2.5;

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// `occupations[i][k]` is ⟨o_k†o_k⟩ at `times[i]`.
    pub occupations: Vec<Vec<f64>>,
    pub snapshots: Vec<DensityMatrix>,
    pub dt: f64,
    pub max_trace_drift: f64,
    pub max_hermiticity_drift: f64,
}

/// Fixed-step RK4 integration from `rho0` at `t_grid[0]`, reporting at
/// every grid point.
/// `observer` sees each reported state. The step is halved and the
/// interval repeated whenever the trace or Hermiticity drifts beyond
/// `drift_tol`.
pub fn evolve_density<F>(
    rho0: &DensityMatrix,
    t_grid: &[f64],
    l: &Lindbladian,
    opts: &EvolveOptions,
    mut observer: F,
) -> Result<Trajectory>
where
    F: FnMut(f64, &DensityMatrix),
{
    if rho0.space.dim() != l.dim() {
        return Err(Error::Domain("state and generator dimensions differ".into()));
    }
    if t_grid.is_empty() || t_grid.windows(2).any(|w| !(w[1] >= w[0])) {
        return Err(Error::Domain("time grid must be non-empty and ascending".into()));
    }
    rho0.check_valid(1e-9)?;
    let mut dt = opts.dt.unwrap_or_else(|| opts.max_dt.min(RK4_SAFETY / l.norm_bound().max(1e-300)));
    if !(dt > 0.0) {
        return Err(Error::Domain(format!("step must be positive, got {dt}")));
    }

    let space = &rho0.space;
    let n_modes = space.modes().len();
    let mut traj = Trajectory {
        times: Vec::with_capacity(t_grid.len()),
        occupations: Vec::with_capacity(t_grid.len()),
        snapshots: Vec::new(),
        dt,
        max_trace_drift: 0.0,
        max_hermiticity_drift: 0.0,
    };
    let trace0 = rho0.trace();
    let mut rho = rho0.rho.clone();
    let mut t = t_grid[0];

    for &target in t_grid {
        let mut halvings = 0;
        loop {
            let mut trial = rho.clone();
            let mut tt = t;
            while tt < target {
                let h = dt.min(target - tt);
                trial = l.rk4_step(&trial, h);
                tt = if target - tt <= dt { target } else { tt + h };
            }
            let trace_drift = (trial.trace() - trace0).norm();
            let herm = max_abs(&(&trial - trial.adjoint()));
            if !trace_drift.is_finite() || !herm.is_finite() {
                if halvings < 20 {
                    dt *= 0.5;
                    halvings += 1;
                    continue;
                }
                return Err(Error::Integration { t, reason: "state became non-finite".into() });
            }
            if trace_drift > opts.drift_tol || herm > opts.drift_tol {
                if halvings < 20 {
                    log::debug!("drift {trace_drift:.2e}/{herm:.2e} at t = {t}, halving dt");
                    dt *= 0.5;
                    halvings += 1;
                    continue;
                }
                return Err(Error::Integration {
                    t,
                    reason: format!("trace drift {trace_drift:.2e}, Hermiticity drift {herm:.2e}"),
                });
            }
            traj.max_trace_drift = traj.max_trace_drift.max(trace_drift);
            traj.max_hermiticity_drift = traj.max_hermiticity_drift.max(herm);
            rho = (&trial + trial.adjoint()) * Complex64::new(0.5, 0.0);
            t = target;
            break;
        }

        let state = DensityMatrix { space: space.clone(), rho: rho.clone() };
        for &mode in space.modes() {
            let top = state.top_level_population(mode).unwrap_or(0.0);
            if top > opts.leak_tol {
                return Err(Error::TruncationLeak { mode: mode.label().to_string(), population: top, t });
            }
        }
        traj.times.push(t);
        traj.occupations
            .push(space.modes().iter().map(|&m| state.occupation(m).unwrap_or(0.0)).collect::<Vec<_>>());
        debug_assert_eq!(traj.occupations.last().map(Vec::len), Some(n_modes));
        observer(t, &state);
        if opts.snapshots {
            traj.snapshots.push(state);
        }
    }
    traj.dt = dt;
    Ok(traj)
}
