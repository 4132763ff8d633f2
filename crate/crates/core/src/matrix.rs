//! Dense square matrices of residues mod N. Indices are 0-based.

use std::fmt;

use crate::modmath::{mod_add, mod_mul};

#[derive(Clone, PartialEq, Eq)]
pub struct ResidueMatrix {
    dim: usize,
    data: Vec<u64>,
}

impl ResidueMatrix {
    pub fn zeros(dim: usize) -> Self {
        ResidueMatrix {
            dim,
            data: vec![0; dim * dim],
        }
    }

    pub fn identity(dim: usize, n: u64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, 1 % n);
        }
        m
    }

    /// Builds a matrix from `entry(row, col)`.
    pub fn from_fn(dim: usize, mut entry: impl FnMut(usize, usize) -> u64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.data[i * dim + j] = entry(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, v: u64) {
        self.data[row * self.dim + col] = v;
    }

    pub fn row(&self, row: usize) -> &[u64] {
        &self.data[row * self.dim..(row + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[u64]> {
        self.data.chunks(self.dim.max(1)).take(self.dim)
    }

    /// Leading `k x k` submatrix.
    pub fn leading(&self, k: usize) -> Self {
        Self::from_fn(k, |i, j| self.get(i, j))
    }

    pub fn mul(&self, other: &Self, n: u64) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let dim = self.dim;
        let mut out = Self::zeros(dim);
        for i in 0..dim {
            for k in 0..dim {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..dim {
                    let idx = i * dim + j;
                    out.data[idx] = mod_add(out.data[idx], mod_mul(a, other.get(k, j), n), n);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[u64], n: u64) -> Vec<u64> {
        assert_eq!(self.dim, v.len(), "dimension mismatch");
        self.rows()
            .map(|row| {
                row.iter()
                    .zip(v)
                    .fold(0, |acc, (&a, &b)| mod_add(acc, mod_mul(a, b, n), n))
            })
            .collect()
    }

    pub fn is_unit_upper_triangular(&self) -> bool {
        (0..self.dim).all(|i| {
            (0..self.dim).all(|j| match i.cmp(&j) {
                std::cmp::Ordering::Equal => self.get(i, j) == 1,
                std::cmp::Ordering::Greater => self.get(i, j) == 0,
                std::cmp::Ordering::Less => true,
            })
        })
    }

    pub fn to_rows(&self) -> Vec<Vec<u64>> {
        self.rows().map(<[u64]>::to_vec).collect()
    }
}

impl fmt::Debug for ResidueMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}
