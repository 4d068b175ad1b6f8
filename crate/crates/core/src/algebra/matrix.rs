use std::fmt;

use num_bigint::BigUint;

use super::PrimeField;
use crate::error::{Error, Result};

/// Dense row-major matrix over F_p.
#[derive(Clone, PartialEq, Eq)]
pub struct FpMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

/// Solution set of an affine system `A x = b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolutionSet {
    Inconsistent,
    /// The solutions form `particular + kernel`, with `p^nullity` elements.
    Solutions {
        particular: Vec<u32>,
        nullity: usize,
    },
}

impl SolutionSet {
    pub fn is_consistent(&self) -> bool {
        matches!(self, SolutionSet::Solutions { .. })
    }

    pub fn count(&self, p: u32) -> BigUint {
        match self {
            SolutionSet::Inconsistent => BigUint::from(0u32),
            SolutionSet::Solutions { nullity, .. } => BigUint::from(p).pow(*nullity as u32),
        }
    }
}

impl FpMatrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        FpMatrix {
            field,
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = FpMatrix::zeros(field, n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(field: PrimeField, rows: &[Vec<u32>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        let data = rows
            .iter()
            .flat_map(|r| r.iter().map(|&x| x % field.p()))
            .collect();
        Ok(FpMatrix {
            field,
            rows: rows.len(),
            cols,
            data,
        })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v % self.field.p();
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// The first `k` rows.
    pub fn top_rows(&self, k: usize) -> FpMatrix {
        let k = k.min(self.rows);
        FpMatrix {
            field: self.field,
            rows: k,
            cols: self.cols,
            data: self.data[..k * self.cols].to_vec(),
        }
    }

    /// Columns `start..end`.
    pub fn column_range(&self, start: usize, end: usize) -> FpMatrix {
        let mut out = FpMatrix::zeros(self.field, self.rows, end - start);
        for i in 0..self.rows {
            out.data[i * (end - start)..(i + 1) * (end - start)]
                .copy_from_slice(&self.row(i)[start..end]);
        }
        out
    }

    /// Vertical concatenation; all blocks must share the column count.
    pub fn vstack(field: PrimeField, cols: usize, blocks: &[&FpMatrix]) -> Result<FpMatrix> {
        let mut data = Vec::new();
        let mut rows = 0;
        for b in blocks {
            if b.cols != cols || b.field != field {
                return Err(Error::DimensionMismatch(format!(
                    "cannot stack a {}-column block onto {cols} columns",
                    b.cols
                )));
            }
            data.extend_from_slice(&b.data);
            rows += b.rows;
        }
        Ok(FpMatrix {
            field,
            rows,
            cols,
            data,
        })
    }

    pub fn mul_vec(&self, v: &[u32]) -> Vec<u32> {
        assert_eq!(v.len(), self.cols, "vector length must equal column count");
        let p = self.field.p() as u64;
        (0..self.rows)
            .map(|i| {
                let acc = self
                    .row(i)
                    .iter()
                    .zip(v)
                    .fold(0u64, |acc, (&a, &x)| (acc + a as u64 * x as u64) % p);
                acc as u32
            })
            .collect()
    }

    pub fn rank(&self) -> usize {
        let mut work: Vec<Vec<u32>> = (0..self.rows).map(|i| self.row(i).to_vec()).collect();
        forward_eliminate(self.field, &mut work, self.cols).len()
    }

    pub fn is_regular(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    /// Solves `A x = b`. Free variables of the particular solution are zero;
    /// pivots are taken as the first nonzero entry in column order, so the
    /// witness is reproducible.
    pub fn solve_affine(&self, b: &[u32]) -> Result<SolutionSet> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side has {} entries, matrix has {} rows",
                b.len(),
                self.rows
            )));
        }
        let f = self.field;
        let mut work: Vec<Vec<u32>> = (0..self.rows)
            .map(|i| {
                let mut r = self.row(i).to_vec();
                r.push(b[i] % f.p());
                r
            })
            .collect();
        let pivots = forward_eliminate(f, &mut work, self.cols);
        let rank = pivots.len();
        if work[rank..].iter().any(|r| r[self.cols] != 0) {
            return Ok(SolutionSet::Inconsistent);
        }
        let mut x = vec![0u32; self.cols];
        for (r, &c) in pivots.iter().enumerate().rev() {
            // pivot entries are normalized to 1
            let row = &work[r];
            let mut acc = row[self.cols];
            for k in c + 1..self.cols {
                if row[k] != 0 && x[k] != 0 {
                    acc = f.sub(acc, f.mul(row[k], x[k]));
                }
            }
            x[c] = acc;
        }
        Ok(SolutionSet::Solutions {
            particular: x,
            nullity: self.cols - rank,
        })
    }
}

/// Row-echelon form in place over the first `cols` columns (extra trailing
/// columns are carried along). Returns pivot columns; pivot rows come first
/// and are scaled to a leading 1.
fn forward_eliminate(f: PrimeField, rows: &mut [Vec<u32>], cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows.len() {
            break;
        }
        let Some(found) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, found);
        let inv = f.inv(rows[r][c]).expect("nonzero pivot");
        if inv != 1 {
            for v in rows[r][c..].iter_mut() {
                *v = f.mul(*v, inv);
            }
        }
        let (head, tail) = rows.split_at_mut(r + 1);
        let pivot_row = &head[r];
        for row in tail.iter_mut() {
            let factor = row[c];
            f.sub_scaled(&mut row[c..], factor, &pivot_row[c..]);
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

impl fmt::Debug for FpMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "FpMatrix {}x{} over {}",
            self.rows, self.cols, self.field
        )?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        Ok(())
    }
}
