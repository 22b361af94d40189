//! Dense linear algebra over the prime field F_p.
//!
//! Scalars are plain `u32` residues in `[0, p)`; the modulus lives in the
//! [`PrimeField`] carried by each matrix.

use std::fmt;

use thiserror::Error;

use crate::perm::is_prime;

/// A column vector of residues mod p.
pub type CoordVector = Vec<u32>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FpError {
    #[error("{0} is not a prime modulus")]
    NotPrime(u32),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("moduli differ: {0} vs {1}")]
    Modulus(u32, u32),
}

/// Arithmetic in F_p. For `p < 256` inverses come from a table; otherwise
/// from Fermat's little theorem.
#[derive(Clone, PartialEq, Eq)]
pub struct PrimeField {
    p: u32,
    inverses: Vec<u32>,
}

impl fmt::Debug for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.p)
    }
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self, FpError> {
        if !is_prime(p) {
            return Err(FpError::NotPrime(p));
        }
        let mut field = PrimeField {
            p,
            inverses: Vec::new(),
        };
        if p < 256 {
            field.inverses = (0..p)
                .map(|x| if x == 0 { 0 } else { field.pow(x, p - 2) })
                .collect();
        }
        Ok(field)
    }

    #[inline]
    pub fn modulus(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        ((a as u64 + b as u64) % self.p as u64) as u32
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        ((a as u64 + self.p as u64 - b as u64) % self.p as u64) as u32
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn pow(&self, a: u32, mut e: u32) -> u32 {
        let mut base = a % self.p;
        let mut acc = 1 % self.p;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; `inv(0)` is 0.
    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        if self.inverses.is_empty() {
            if a == 0 {
                0
            } else {
                self.pow(a, self.p - 2)
            }
        } else {
            self.inverses[a as usize]
        }
    }

    pub fn reduce(&self, a: i64) -> u32 {
        a.rem_euclid(self.p as i64) as u32
    }

    /// `x + y` componentwise.
    pub fn add_vec(&self, x: &[u32], y: &[u32]) -> CoordVector {
        x.iter().zip(y).map(|(&a, &b)| self.add(a, b)).collect()
    }

    /// `x - y` componentwise.
    pub fn sub_vec(&self, x: &[u32], y: &[u32]) -> CoordVector {
        x.iter().zip(y).map(|(&a, &b)| self.sub(a, b)).collect()
    }

    /// `x += c * y` componentwise.
    pub fn axpy(&self, x: &mut [u32], c: u32, y: &[u32]) {
        if c == 0 {
            return;
        }
        for (a, &b) in x.iter_mut().zip(y) {
            *a = self.add(*a, self.mul(c, b));
        }
    }
}

/// Dense row-major matrix over F_p.
#[derive(Clone, PartialEq, Eq)]
pub struct FpMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:?} {}x{}", self.field, self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        Ok(())
    }
}

/// Result of Gauss-Jordan reduction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub matrix: FpMatrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

impl FpMatrix {
    pub fn zeros(field: &PrimeField, rows: usize, cols: usize) -> Self {
        FpMatrix {
            field: field.clone(),
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: &PrimeField, size: usize) -> Self {
        let mut m = FpMatrix::zeros(field, size, size);
        for i in 0..size {
            m.set(i, i, 1);
        }
        m
    }

    /// Builds a matrix from rows, reducing every entry mod p.
    pub fn from_rows(field: &PrimeField, cols: usize, rows: &[Vec<u32>]) -> Result<Self, FpError> {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(FpError::Dimension {
                    expected: cols,
                    got: row.len(),
                });
            }
            data.extend(row.iter().map(|&x| x % field.p));
        }
        Ok(FpMatrix {
            field: field.clone(),
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(
        field: &PrimeField,
        rows: usize,
        columns: &[Vec<u32>],
    ) -> Result<Self, FpError> {
        let mut m = FpMatrix::zeros(field, rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(FpError::Dimension {
                    expected: rows,
                    got: col.len(),
                });
            }
            for (i, &x) in col.iter().enumerate() {
                m.set(i, j, x % field.p);
            }
        }
        Ok(m)
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u32 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u32) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[u32] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn transpose(&self) -> FpMatrix {
        let mut t = FpMatrix::zeros(&self.field, self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.set(c, r, self.get(r, c));
            }
        }
        t
    }

    pub fn mul(&self, other: &FpMatrix) -> Result<FpMatrix, FpError> {
        if self.field.p != other.field.p {
            return Err(FpError::Modulus(self.field.p, other.field.p));
        }
        if self.cols != other.rows {
            return Err(FpError::Dimension {
                expected: self.cols,
                got: other.rows,
            });
        }
        let mut out = FpMatrix::zeros(&self.field, self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == 0 {
                    continue;
                }
                for c in 0..other.cols {
                    let v = self
                        .field
                        .add(out.get(r, c), self.field.mul(a, other.get(k, c)));
                    out.set(r, c, v);
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &[u32]) -> Result<CoordVector, FpError> {
        if x.len() != self.cols {
            return Err(FpError::Dimension {
                expected: self.cols,
                got: x.len(),
            });
        }
        let p = self.field.p as u64;
        Ok((0..self.rows)
            .map(|r| {
                let acc = self
                    .row(r)
                    .iter()
                    .zip(x)
                    .fold(0u64, |acc, (&a, &b)| (acc + a as u64 * b as u64) % p);
                acc as u32
            })
            .collect())
    }

    /// Stacks `other` below `self`.
    pub fn vstack(&self, other: &FpMatrix) -> Result<FpMatrix, FpError> {
        if self.cols != other.cols {
            return Err(FpError::Dimension {
                expected: self.cols,
                got: other.cols,
            });
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(FpMatrix {
            field: self.field.clone(),
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        })
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.data.swap(a * self.cols + c, b * self.cols + c);
        }
    }

    /// Reduces rows in place, restricted to the first `limit` columns for
    /// pivot selection. Returns the pivot columns.
    fn reduce_in_place(&mut self, limit: usize) -> Vec<usize> {
        let f = self.field.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..limit {
            if row == self.rows {
                break;
            }
            let Some(pr) = (row..self.rows).find(|&r| self.get(r, col) != 0) else {
                continue;
            };
            self.swap_rows(row, pr);
            let scale = f.inv(self.get(row, col));
            for c in col..self.cols {
                let v = f.mul(self.get(row, c), scale);
                self.set(row, c, v);
            }
            for r in 0..self.rows {
                if r == row {
                    continue;
                }
                let factor = self.get(r, col);
                if factor == 0 {
                    continue;
                }
                for c in col..self.cols {
                    let v = f.sub(self.get(r, c), f.mul(factor, self.get(row, c)));
                    self.set(r, c, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        pivots
    }

    /// Reduced row-echelon form. Pivots are chosen top-down as the first
    /// row with a nonzero entry in the current column.
    pub fn rref(&self) -> Rref {
        let mut m = self.clone();
        let pivots = m.reduce_in_place(m.cols);
        Rref {
            matrix: m,
            rank: pivots.len(),
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// One solution of `self * x = b` with free variables set to zero, or
    /// `None` if the system is inconsistent.
    pub fn solve(&self, b: &[u32]) -> Result<Option<CoordVector>, FpError> {
        if b.len() != self.rows {
            return Err(FpError::Dimension {
                expected: self.rows,
                got: b.len(),
            });
        }
        let mut aug = FpMatrix::zeros(&self.field, self.rows, self.cols + 1);
        for (r, &br) in b.iter().enumerate() {
            for c in 0..self.cols {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, self.cols, br % self.field.p);
        }
        let pivots = aug.reduce_in_place(self.cols);
        let rank = pivots.len();
        // A nonzero right-hand side on a zero row is the certificate 0 = c.
        if (rank..self.rows).any(|r| aug.get(r, self.cols) != 0) {
            return Ok(None);
        }
        let mut x = vec![0; self.cols];
        for (r, &c) in pivots.iter().enumerate() {
            x[c] = aug.get(r, self.cols);
        }
        Ok(Some(x))
    }

    /// Basis of the right nullspace `{x : self * x = 0}`.
    pub fn nullspace(&self) -> Vec<CoordVector> {
        let Rref { matrix, pivots, .. } = self.rref();
        let f = &self.field;
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut x = vec![0; self.cols];
                x[free] = 1;
                for (r, &c) in pivots.iter().enumerate() {
                    x[c] = f.neg(matrix.get(r, free));
                }
                x
            })
            .collect()
    }

    /// Gauss-Jordan inversion.
    pub fn invert(&self) -> Result<FpMatrix, FpError> {
        if self.rows != self.cols {
            return Err(FpError::Dimension {
                expected: self.rows,
                got: self.cols,
            });
        }
        let n = self.rows;
        let mut aug = FpMatrix::zeros(&self.field, n, 2 * n);
        for r in 0..n {
            for c in 0..n {
                aug.set(r, c, self.get(r, c));
            }
            aug.set(r, n + r, 1);
        }
        if aug.reduce_in_place(n).len() < n {
            return Err(FpError::Singular);
        }
        let mut inv = FpMatrix::zeros(&self.field, n, n);
        for r in 0..n {
            for c in 0..n {
                inv.set(r, c, aug.get(r, n + c));
            }
        }
        Ok(inv)
    }
}

/// Incrementally maintained echelon basis, used to test whether a new
/// vector is independent of those accepted so far.
#[derive(Debug, Clone)]
pub struct EchelonBasis {
    field: PrimeField,
    dim: usize,
    /// Reduced rows, each normalized to 1 at its pivot.
    rows: Vec<(usize, CoordVector)>,
}

impl EchelonBasis {
    pub fn new(field: &PrimeField, dim: usize) -> Self {
        EchelonBasis {
            field: field.clone(),
            dim,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, v: &[u32]) -> CoordVector {
        let mut v = v.to_vec();
        for (pivot, row) in &self.rows {
            let c = v[*pivot];
            if c != 0 {
                self.field.axpy(&mut v, self.field.neg(c), row);
            }
        }
        v
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    /// Adds `v` if it is independent; returns whether it was added.
    pub fn insert(&mut self, v: &[u32]) -> bool {
        assert_eq!(
            v.len(),
            self.dim,
            "vector length must match the ambient dimension"
        );
        let mut r = self.reduce(v);
        let Some(pivot) = r.iter().position(|&x| x != 0) else {
            return false;
        };
        let scale = self.field.inv(r[pivot]);
        for x in r.iter_mut() {
            *x = self.field.mul(*x, scale);
        }
        // Keep earlier rows reduced at the new pivot.
        for (_, row) in self.rows.iter_mut() {
            let c = row[pivot];
            if c != 0 {
                self.field.axpy(row, self.field.neg(c), &r);
            }
        }
        self.rows.push((pivot, r));
        true
    }
}
