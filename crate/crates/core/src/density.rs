//! Dense density matrices over a named register.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::register::Register;

#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    register: Register,
    dim: usize,
    // row-major, dim * dim
    data: Vec<C64>,
}

impl DensityMatrix {
    pub fn from_parts(register: Register, data: Vec<C64>) -> Result<Self> {
        let dim = 1usize << register.n_qubits();
        if data.len() != dim * dim {
            return Err(Error::InvalidArgument(format!(
                "{} entries for a {dim}x{dim} matrix",
                data.len()
            )));
        }
        Ok(Self {
            register,
            dim,
            data,
        })
    }

    /// `|ψ><ψ|` for raw amplitudes.
    pub fn from_amplitudes(register: Register, amps: &[C64]) -> Result<Self> {
        let data = amps
            .iter()
            .flat_map(|a| amps.iter().map(move |b| a * b.conj()))
            .collect();
        Self::from_parts(register, data)
    }

    pub fn register(&self) -> &Register {
        &self.register
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim + col]
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (0..self.dim).all(|i| (i..self.dim).all(|j| (self.get(i, j) - self.get(j, i).conj()).norm() <= tol))
    }

    /// `<v|ρ|v>` (real part; the imaginary part vanishes for Hermitian ρ).
    pub fn expectation(&self, v: &[C64]) -> f64 {
        assert_eq!(v.len(), self.dim, "vector dimension");
        let mut acc = C64::new(0.0, 0.0);
        for (i, vi) in v.iter().enumerate() {
            if vi.norm_sqr() == 0.0 {
                continue;
            }
            let row = &self.data[i * self.dim..(i + 1) * self.dim];
            let rv: C64 = row.iter().zip(v).map(|(r, vj)| r * vj).sum();
            acc += vi.conj() * rv;
        }
        acc.re
    }

    pub fn scale(&mut self, factor: f64) {
        for x in &mut self.data {
            *x *= factor;
        }
    }

    pub fn add_assign(&mut self, other: &DensityMatrix) -> Result<()> {
        if self.register != other.register {
            return Err(Error::RegisterMismatch(format!(
                "{} vs {}",
                self.register, other.register
            )));
        }
        for (x, y) in self.data.iter_mut().zip(&other.data) {
            *x += y;
        }
        Ok(())
    }

    /// `ρ ⊗ σ` on the concatenated register.
    pub fn kron(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        let register = self.register.concat(&other.register)?;
        let (d1, d2) = (self.dim, other.dim);
        let dim = d1 * d2;
        let mut data = vec![C64::new(0.0, 0.0); dim * dim];
        for i1 in 0..d1 {
            for j1 in 0..d1 {
                let a = self.get(i1, j1);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for i2 in 0..d2 {
                    let row = (i1 * d2 + i2) * dim + j1 * d2;
                    for j2 in 0..d2 {
                        data[row + j2] = a * other.get(i2, j2);
                    }
                }
            }
        }
        DensityMatrix::from_parts(register, data)
    }

    /// Largest entrywise `|ρ - σ|`.
    pub fn max_abs_diff(&self, other: &DensityMatrix) -> Result<f64> {
        if self.register != other.register {
            return Err(Error::RegisterMismatch(format!(
                "{} vs {}",
                self.register, other.register
            )));
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}
