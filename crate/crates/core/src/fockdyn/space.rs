use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{LinearModel, Mode};

/// Default cap on the product dimension.
pub const DEFAULT_DIM_CAP: usize = 4096;

pub type CMatrix = DMatrix<Complex64>;

/// Truncated product Fock space. Basis states are ordered with the last
/// mode varying fastest.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FockSpace {
    modes: Vec<Mode>,
    dims: Vec<usize>,
}

impl FockSpace {
    pub fn new(modes: &[Mode], dims: &[usize]) -> Result<Self> {
        Self::with_cap(modes, dims, DEFAULT_DIM_CAP)
    }

    pub fn with_cap(modes: &[Mode], dims: &[usize], cap: usize) -> Result<Self> {
        if modes.is_empty() || modes.len() != dims.len() {
            return Err(Error::Domain(format!(
                "need one truncation per mode, got {} modes and {} dims",
                modes.len(),
                dims.len()
            )));
        }
        for (i, m) in modes.iter().enumerate() {
            if modes[..i].contains(m) {
                return Err(Error::Domain(format!("mode {} listed twice", m.label())));
            }
        }
        if let Some(&d) = dims.iter().find(|&&d| d < 2) {
            return Err(Error::Domain(format!("each truncation must be >= 2, got {d}")));
        }
        let dim = dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d));
        match dim {
            Some(dim) if dim <= cap => Ok(FockSpace { modes: modes.to_vec(), dims: dims.to_vec() }),
            Some(dim) => Err(Error::DimensionCap { dim, cap }),
            None => Err(Error::DimensionCap { dim: usize::MAX, cap }),
        }
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn index_of(&self, mode: Mode) -> Option<usize> {
        self.modes.iter().position(|&m| m == mode)
    }

    pub fn truncation(&self, mode: Mode) -> Option<usize> {
        self.index_of(mode).map(|i| self.dims[i])
    }

    fn stride(&self, k: usize) -> usize {
        self.dims[k + 1..].iter().product()
    }

    /// Occupation numbers of basis state `idx`.
    pub fn occupations(&self, mut idx: usize) -> Vec<usize> {
        let mut n = vec![0; self.dims.len()];
        for k in (0..self.dims.len()).rev() {
            n[k] = idx % self.dims[k];
            idx /= self.dims[k];
        }
        n
    }

    pub fn basis_index(&self, occupations: &[usize]) -> usize {
        occupations.iter().zip(&self.dims).fold(0, |acc, (&n, &d)| acc * d + n)
    }

    /// Annihilation operator of the `k`-th mode on the full space.
    pub fn annihilation(&self, k: usize) -> CMatrix {
        let n = self.dim();
        let stride = self.stride(k);
        let mut op = CMatrix::zeros(n, n);
        for col in 0..n {
            let occ = (col / stride) % self.dims[k];
            if occ > 0 {
                op[(col - stride, col)] = Complex64::new((occ as f64).sqrt(), 0.0);
            }
        }
        op
    }

    pub fn number(&self, k: usize) -> CMatrix {
        let n = self.dim();
        let stride = self.stride(k);
        CMatrix::from_fn(n, n, |r, c| {
            if r == c {
                Complex64::new(((r / stride) % self.dims[k]) as f64, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// Checks that the model's modes are exactly those of the space.
    pub fn check_model(&self, model: &LinearModel) -> Result<()> {
        if model.modes != self.modes {
            return Err(Error::Domain(format!(
                "model modes {:?} do not match space modes {:?}",
                model.modes, self.modes
            )));
        }
        Ok(())
    }
}

/// Largest entry modulus.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Hermitian Hamiltonian of a quadratic model on the truncated space.
pub fn build_hamiltonian(space: &FockSpace, model: &LinearModel) -> Result<CMatrix> {
    space.check_model(model)?;
    let n = space.dim();
    let ops: Vec<CMatrix> = (0..space.modes.len()).map(|k| space.annihilation(k)).collect();
    let mut h = CMatrix::zeros(n, n);
    for (k, &w) in model.freqs.iter().enumerate() {
        h += space.number(k) * Complex64::new(w, 0.0);
    }
    for bs in &model.beam_splitters {
        let term = ops[bs.i].adjoint() * &ops[bs.j] * bs.c;
        h += &term + term.adjoint();
    }
    for sq in &model.squeezes {
        let term = &ops[sq.i] * &ops[sq.j] * sq.c;
        h += &term + term.adjoint();
    }
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BeamSplitter, Channel, Squeeze};

    fn three_mode() -> FockSpace {
        FockSpace::new(&[Mode::A, Mode::M, Mode::B], &[3, 3, 4]).unwrap()
    }

    fn model(g_ma: Complex64, g: Complex64) -> LinearModel {
        LinearModel {
            modes: vec![Mode::A, Mode::M, Mode::B],
            freqs: vec![-1.0, 0.5, 1.0],
            beam_splitters: vec![BeamSplitter { i: 1, j: 0, c: g_ma }, BeamSplitter { i: 1, j: 2, c: g }],
            squeezes: vec![Squeeze { i: 1, j: 2, c: g.conj() }],
            channels: vec![Channel::thermal(1.0, 0.0); 3],
        }
    }

    #[test]
    fn index_round_trip() {
        let s = three_mode();
        for i in 0..s.dim() {
            assert_eq!(s.basis_index(&s.occupations(i)), i);
        }
        assert_eq!(s.occupations(1), vec![0, 0, 1]);
    }

    #[test]
    fn rejects_bad_spaces() {
        assert!(FockSpace::new(&[Mode::A], &[1]).is_err());
        assert!(FockSpace::new(&[Mode::A, Mode::A], &[2, 2]).is_err());
        assert!(matches!(
            FockSpace::with_cap(&[Mode::A, Mode::B], &[100, 100], 4096),
            Err(Error::DimensionCap { dim: 10000, .. })
        ));
    }

    #[test]
    fn uncoupled_is_diagonal() {
        let s = three_mode();
        let h = build_hamiltonian(&s, &model(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))).unwrap();
        for r in 0..s.dim() {
            for c in 0..s.dim() {
                if r != c {
                    assert_eq!(h[(r, c)], Complex64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn hermitian_for_complex_couplings() {
        let s = three_mode();
        let h = build_hamiltonian(&s, &model(Complex64::new(0.3, -0.7), Complex64::new(-0.2, 0.45))).unwrap();
        assert_eq!(max_abs(&(&h - h.adjoint())), 0.0);
    }

    #[test]
    fn single_excitation_block() {
        let s = three_mode();
        let (g_ma, g) = (Complex64::new(0.3, -0.7), Complex64::new(-0.2, 0.45));
        let h = build_hamiltonian(&s, &model(g_ma, g)).unwrap();
        let a1 = s.basis_index(&[1, 0, 0]);
        let m1 = s.basis_index(&[0, 1, 0]);
        let b1 = s.basis_index(&[0, 0, 1]);
        assert_eq!(h[(a1, a1)].re, -1.0);
        assert_eq!(h[(m1, m1)].re, 0.5);
        assert_eq!(h[(b1, b1)].re, 1.0);
        assert_eq!(h[(m1, a1)], g_ma);
        assert_eq!(h[(a1, m1)], g_ma.conj());
        assert_eq!(h[(m1, b1)], g);
        assert_eq!(h[(b1, m1)], g.conj());
        assert_eq!(h[(a1, b1)], Complex64::new(0.0, 0.0));
        // counter-rotating term couples vacuum to |0,1,1⟩
        let vac = s.basis_index(&[0, 0, 0]);
        let mb = s.basis_index(&[0, 1, 1]);
        assert_eq!(h[(mb, vac)], g);
    }

    #[test]
    fn mode_mismatch_rejected() {
        let s = FockSpace::new(&[Mode::M, Mode::B], &[2, 2]).unwrap();
        assert!(build_hamiltonian(&s, &model(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))).is_err());
    }
}
