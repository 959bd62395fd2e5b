//! Cyclic Jacobi eigensolver for small dense Hermitian matrices.
//!
//! The implicit-QR solver in nalgebra loses accuracy on the clustered and
//! degenerate spectra typical of low-temperature density matrices; Jacobi
//! rotations are slower but converge to working precision regardless.

use nalgebra::DVector;
use num_complex::Complex64;

use super::space::CMatrix;

const MAX_SWEEPS: usize = 60;

pub struct HermitianEigen {
    pub values: DVector<f64>,
    /// Eigenvectors as columns.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    /// Decomposes the Hermitian part of `m`.
    pub fn new(m: &CMatrix) -> Self {
        let n = m.nrows();
        let mut a = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
        let mut v = CMatrix::identity(n, n);
        let scale: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let tol = f64::EPSILON * f64::EPSILON * scale * scale;

        for _ in 0..MAX_SWEEPS {
            let mut off = 0.0;
            for q in 1..n {
                for p in 0..q {
                    off += a[(p, q)].norm_sqr();
                }
            }
            if off <= tol {
                break;
            }
            for q in 1..n {
                for p in 0..q {
                    let apq = a[(p, q)];
                    let r = apq.norm();
                    if r == 0.0 || r * r <= tol / (n * n) as f64 {
                        continue;
                    }
                    // phase e makes the pivot real, then a real rotation kills it
                    let e = apq / r;
                    let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * r);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    let ec = e.conj();
                    for k in 0..n {
                        let (akp, akq) = (a[(k, p)], a[(k, q)]);
                        a[(k, p)] = akp * c - akq * ec * s;
                        a[(k, q)] = akp * s + akq * ec * c;
                    }
                    for k in 0..n {
                        let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                        a[(p, k)] = apk * c - aqk * e * s;
                        a[(q, k)] = apk * s + aqk * e * c;
                    }
                    a[(p, q)] = Complex64::new(0.0, 0.0);
                    a[(q, p)] = Complex64::new(0.0, 0.0);
                    for k in 0..n {
                        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                        v[(k, p)] = vkp * c - vkq * ec * s;
                        v[(k, q)] = vkp * s + vkq * ec * c;
                    }
                }
            }
        }
        let values = DVector::from_fn(n, |i, _| a[(i, i)].re);
        HermitianEigen { values, vectors: v }
    }

    /// `f` applied through the spectral decomposition.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.values.len();
        let mut scaled = self.vectors.clone();
        for j in 0..n {
            let fj = Complex64::new(f(self.values[j]), 0.0);
            scaled.column_mut(j).iter_mut().for_each(|z| *z *= fj);
        }
        scaled * self.vectors.adjoint()
    }
}
