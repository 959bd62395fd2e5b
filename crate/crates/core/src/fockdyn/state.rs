use num_complex::Complex64;

use super::hermitian::HermitianEigen;
use super::space::{max_abs, CMatrix, FockSpace};
use crate::error::{Error, Result};
use crate::model::Mode;

/// Tolerance on negative eigenvalues of density matrices.
pub const PSD_TOL: f64 = 1e-9;

/// Dense density matrix on a truncated Fock space.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    pub space: FockSpace,
    pub rho: CMatrix,
}

/// Thermal distribution over `dim` levels with mean `n` before truncation,
/// renormalized.
pub fn thermal_populations(n: f64, dim: usize) -> Vec<f64> {
    let mut p: Vec<f64> = if n == 0.0 {
        (0..dim).map(|k| if k == 0 { 1.0 } else { 0.0 }).collect()
    } else {
        let r = n / (n + 1.0);
        (0..dim).map(|k| r.powi(k as i32)).collect()
    };
    let sum: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= sum);
    p
}

impl DensityMatrix {
    pub fn new(space: FockSpace, rho: CMatrix) -> Result<Self> {
        if rho.shape() != (space.dim(), space.dim()) {
            return Err(Error::Domain(format!(
                "matrix {:?} does not fit a space of dimension {}",
                rho.shape(),
                space.dim()
            )));
        }
        Ok(DensityMatrix { space, rho })
    }

    /// Product of diagonal single-mode states with the given populations.
    pub fn product_diagonal(space: &FockSpace, populations: &[Vec<f64>]) -> Result<Self> {
        if populations.len() != space.dims().len()
            || populations.iter().zip(space.dims()).any(|(p, &d)| p.len() != d)
        {
            return Err(Error::Domain("populations do not match the truncations".into()));
        }
        let n = space.dim();
        let mut rho = CMatrix::zeros(n, n);
        for i in 0..n {
            let occ = space.occupations(i);
            let p: f64 = occ.iter().zip(populations).map(|(&k, pk)| pk[k]).product();
            rho[(i, i)] = Complex64::new(p, 0.0);
        }
        Ok(DensityMatrix { space: space.clone(), rho })
    }

    /// Product of (truncated) thermal states with the given mean occupations.
    pub fn thermal(space: &FockSpace, occupations: &[f64]) -> Result<Self> {
        let pops: Vec<Vec<f64>> =
            occupations.iter().zip(space.dims()).map(|(&n, &d)| thermal_populations(n, d)).collect();
        Self::product_diagonal(space, &pops)
    }

    pub fn vacuum(space: &FockSpace) -> Self {
        let zeros = vec![0.0; space.dims().len()];
        Self::thermal(space, &zeros).expect("one occupation per mode")
    }

    /// Pure state |ψ⟩⟨ψ| (ψ is normalized here).
    pub fn pure(space: &FockSpace, psi: &[Complex64]) -> Result<Self> {
        if psi.len() != space.dim() {
            return Err(Error::Domain("state vector length does not match space".into()));
        }
        let v = nalgebra::DVector::from_column_slice(psi);
        let norm = v.norm();
        if norm == 0.0 {
            return Err(Error::Domain("zero state vector".into()));
        }
        let v = v / Complex64::new(norm, 0.0);
        Ok(DensityMatrix { space: space.clone(), rho: &v * v.adjoint() })
    }

    pub fn trace(&self) -> Complex64 {
        self.rho.trace()
    }

    pub fn hermiticity_error(&self) -> f64 {
        max_abs(&(&self.rho - self.rho.adjoint()))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        HermitianEigen::new(&self.rho).values.min()
    }

    pub fn expect(&self, op: &CMatrix) -> Complex64 {
        (&self.rho * op).trace()
    }

    /// Mean occupation of the given mode, read from the diagonal.
    pub fn occupation(&self, mode: Mode) -> Option<f64> {
        let k = self.space.index_of(mode)?;
        let n = self.space.dim();
        Some((0..n).map(|i| self.space.occupations(i)[k] as f64 * self.rho[(i, i)].re).sum())
    }

    /// Population of the highest retained Fock level of `mode`.
    pub fn top_level_population(&self, mode: Mode) -> Option<f64> {
        let k = self.space.index_of(mode)?;
        let top = self.space.dims()[k] - 1;
        let n = self.space.dim();
        Some((0..n).filter(|&i| self.space.occupations(i)[k] == top).map(|i| self.rho[(i, i)].re).sum())
    }

    pub fn check_valid(&self, tol: f64) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > 1e-12_f64.max(tol) {
            return Err(Error::Domain(format!("density matrix not Hermitian ({herm:.2e})")));
        }
        let tr = self.trace();
        if (tr - 1.0).norm() > tol {
            return Err(Error::Domain(format!("density matrix trace {tr} != 1")));
        }
        let min = self.min_eigenvalue();
        if min < -tol {
            return Err(Error::Domain(format!("density matrix has eigenvalue {min:.3e} < 0")));
        }
        Ok(())
    }
}

/// Reduced state on `keep` (kept in the order they appear in the space).
pub fn partial_trace(rho: &DensityMatrix, keep: &[Mode]) -> Result<DensityMatrix> {
    if keep.is_empty() {
        return Err(Error::Domain("partial trace must keep at least one mode".into()));
    }
    let space = &rho.space;
    for m in keep {
        if space.index_of(*m).is_none() {
            return Err(Error::Domain(format!("mode {} not in the space", m.label())));
        }
    }
    let kept: Vec<usize> = (0..space.modes().len()).filter(|&k| keep.contains(&space.modes()[k])).collect();
    let modes: Vec<Mode> = kept.iter().map(|&k| space.modes()[k]).collect();
    let dims: Vec<usize> = kept.iter().map(|&k| space.dims()[k]).collect();
    let reduced = FockSpace::with_cap(&modes, &dims, usize::MAX)?;
    if kept.len() == space.modes().len() {
        return Ok(DensityMatrix { space: reduced, rho: rho.rho.clone() });
    }

    let n = space.dim();
    let occ: Vec<Vec<usize>> = (0..n).map(|i| space.occupations(i)).collect();
    let split = |o: &Vec<usize>| -> (usize, Vec<usize>) {
        let keep_occ: Vec<usize> = kept.iter().map(|&k| o[k]).collect();
        let traced: Vec<usize> = (0..o.len()).filter(|k| !kept.contains(k)).map(|k| o[k]).collect();
        (reduced.basis_index(&keep_occ), traced)
    };
    let parts: Vec<(usize, Vec<usize>)> = occ.iter().map(split).collect();
    let m = reduced.dim();
    let mut out = CMatrix::zeros(m, m);
    for c in 0..n {
        for r in 0..n {
            if parts[r].1 == parts[c].1 {
                out[(parts[r].0, parts[c].0)] += rho.rho[(r, c)];
            }
        }
    }
    Ok(DensityMatrix { space: reduced, rho: out })
}

fn rounding_floor(n: usize, scale: f64) -> f64 {
    n as f64 * f64::EPSILON * scale
}

fn psd_sqrt(m: &CMatrix, what: &str) -> Result<CMatrix> {
    let eig = HermitianEigen::new(m);
    let vals = &eig.values;
    let scale = vals.amax().max(1.0);
    if vals.min() < -PSD_TOL * scale {
        return Err(Error::Domain(format!(
            "{what} is not positive semidefinite (eigenvalue {:.3e})",
            vals.min()
        )));
    }
    // eigenvalues at rounding level are zero; their square roots would not be
    let floor = rounding_floor(vals.len(), scale);
    Ok(eig.map(|x| if x > floor { x.sqrt() } else { 0.0 }))
}

/// Uhlmann fidelity (Tr √(√ρ σ √ρ))², evaluated as the squared trace norm
/// of √ρ √σ. Clamped to [0, 1].
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.space != sigma.space {
        return Err(Error::Domain("fidelity needs states on the same space".into()));
    }
    let a = psd_sqrt(&rho.rho, "first state")?;
    let b = psd_sqrt(&sigma.rho, "second state")?;
    // trace norm of M = √ρ √σ from the spectrum of M†M
    let m = a * b;
    let eig = HermitianEigen::new(&(m.adjoint() * &m));
    let floor = rounding_floor(eig.values.len(), eig.values.amax());
    let tr: f64 = eig.values.iter().filter(|&&x| x > floor).map(|x| x.sqrt()).sum();
    Ok((tr * tr).clamp(0.0, 1.0))
}
