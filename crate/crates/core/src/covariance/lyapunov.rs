//! Dense solvers for small continuous-time linear systems.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Solves `A X + X Aᵀ + Q = 0` through the Kronecker form
/// `(I ⊗ A + A ⊗ I) vec(X) = −vec(Q)`, followed by one step of iterative
/// refinement. Intended for the n ≤ 6 systems of this crate.
pub fn solve_continuous_lyapunov(a: &DMatrix<f64>, q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if a.ncols() != n || q.shape() != (n, n) {
        return Err(Error::Domain(format!("Lyapunov shapes mismatch: A {:?}, Q {:?}", a.shape(), q.shape())));
    }
    let id = DMatrix::<f64>::identity(n, n);
    let k = id.kronecker(a) + a.kronecker(&id);
    let lu = k.clone().lu();
    let rhs = -DVector::from_column_slice(q.as_slice());
    let mut x = lu.solve(&rhs).ok_or_else(|| {
        Error::Singular("Lyapunov operator is singular (A has eigenvalues λ_i + λ_j = 0)".into())
    })?;
    // residual correction
    let r = &k * &x - &rhs;
    if let Some(dx) = lu.solve(&r) {
        x -= dx;
    }
    let x = DMatrix::from_column_slice(n, n, x.as_slice());
    Ok(symmetrize(&x))
}

pub fn lyapunov_residual(a: &DMatrix<f64>, x: &DMatrix<f64>, q: &DMatrix<f64>) -> f64 {
    (a * x + x * a.transpose() + q).norm()
}

pub fn symmetrize(x: &DMatrix<f64>) -> DMatrix<f64> {
    (x + x.transpose()) * 0.5
}

/// Exact one-step map of `dV/dt = A V + V Aᵀ + D` over a step `h`:
/// `V(t+h) = E V(t) Eᵀ + Q` with `E = e^{Ah}` and `Q = ∫₀ʰ e^{As} D e^{Aᵀs} ds`.
#[derive(Clone, Debug)]
pub struct Propagator {
    pub e: DMatrix<f64>,
    pub q: DMatrix<f64>,
}

impl Propagator {
    /// Van Loan block exponential on a short sub-step, then repeated
    /// doubling `E₂ = E E`, `Q₂ = E Q Eᵀ + Q` to reach `h`. The sub-step is
    /// kept below ‖A‖h ≈ 1/2 so the exp(−Ah) block never grows large.
    pub fn new(a: &DMatrix<f64>, d: &DMatrix<f64>, h: f64) -> Self {
        let n = a.nrows();
        if h == 0.0 {
            return Propagator { e: DMatrix::identity(n, n), q: DMatrix::zeros(n, n) };
        }
        let norm = a.abs().row_sum().max() * h.abs();
        let mut doublings = 0u32;
        if norm > 0.5 {
            doublings = (norm / 0.5).log2().ceil() as u32;
        }
        let sub = h / 2f64.powi(doublings as i32);

        let mut block = DMatrix::<f64>::zeros(2 * n, 2 * n);
        block.view_mut((0, 0), (n, n)).copy_from(&(-a * sub));
        block.view_mut((0, n), (n, n)).copy_from(&(d * sub));
        block.view_mut((n, n), (n, n)).copy_from(&(a.transpose() * sub));
        let f = block.exp();
        let f12 = f.view((0, n), (n, n)).clone_owned();
        let e = f.view((n, n), (n, n)).transpose();
        let q = symmetrize(&(&e * f12));

        let mut step = Propagator { e, q };
        for _ in 0..doublings {
            let q = symmetrize(&(&step.e * &step.q * step.e.transpose() + &step.q));
            let e = &step.e * &step.e;
            step = Propagator { e, q };
        }
        step
    }

    pub fn apply(&self, v: &DMatrix<f64>) -> DMatrix<f64> {
        symmetrize(&(&self.e * v * self.e.transpose() + &self.q))
    }
}

/// Dormand–Prince 5(4) integration of `dV/dt = A V + V Aᵀ + D` from `v0`
/// over `[0, h]` with mixed absolute/relative tolerance `tol`.
pub fn integrate_rk45(
    a: &DMatrix<f64>,
    d: &DMatrix<f64>,
    v0: &DMatrix<f64>,
    h: f64,
    tol: f64,
) -> Result<DMatrix<f64>> {
    const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
        [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
    ];
    const B5: [f64; 7] =
        [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];
    let rhs = |v: &DMatrix<f64>| a * v + v * a.transpose() + d;

    let mut t = 0.0;
    let mut v = v0.clone();
    let mut dt = (h / 100.0).min(0.1 / a.abs().row_sum().max().max(1e-300));
    let mut steps = 0usize;
    while t < h {
        if steps > 10_000_000 {
            return Err(Error::Integration { t, reason: "step budget exhausted".into() });
        }
        steps += 1;
        dt = dt.min(h - t);
        let mut k: Vec<DMatrix<f64>> = Vec::with_capacity(7);
        for row in &A {
            let mut y = v.clone();
            for (j, kj) in k.iter().enumerate() {
                if row[j] != 0.0 {
                    y += kj * (row[j] * dt);
                }
            }
            k.push(rhs(&y));
        }
        let mut y5 = v.clone();
        let mut err = DMatrix::<f64>::zeros(v.nrows(), v.ncols());
        for s in 0..7 {
            y5 += &k[s] * (B5[s] * dt);
            err += &k[s] * ((B5[s] - B4[s]) * dt);
        }
        let scale = tol * (1.0 + y5.amax());
        let ratio = err.amax() / scale;
        if !ratio.is_finite() {
            return Err(Error::Integration { t, reason: "non-finite error estimate".into() });
        }
        if ratio <= 1.0 {
            t += dt;
            v = symmetrize(&y5);
        }
        let factor = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
        dt *= factor;
        if dt < 1e-14 * h.max(1.0) {
            return Err(Error::Integration { t, reason: format!("step size underflow ({dt:e})") });
        }
    }
    Ok(v)
}
