use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sparse matrix over `Z/2`, stored as the sorted row indices of the ones in each column.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Z2Raw", into = "Z2Raw")]
pub struct Z2Matrix {
    rows: usize,
    cols: Vec<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct Z2Raw {
    rows: usize,
    cols: usize,
    /// `[row, col]` pairs of the nonzero entries.
    entries: Vec<[usize; 2]>,
}

impl TryFrom<Z2Raw> for Z2Matrix {
    type Error = Error;
    fn try_from(r: Z2Raw) -> Result<Self> {
        Z2Matrix::from_entries(r.rows, r.cols, r.entries.iter().map(|e| (e[0], e[1])))
    }
}

impl From<Z2Matrix> for Z2Raw {
    fn from(m: Z2Matrix) -> Self {
        Z2Raw { rows: m.rows, cols: m.ncols(), entries: m.entries().map(|(i, j)| [i, j]).collect() }
    }
}

impl fmt::Debug for Z2Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Z2Matrix({}x{}, {:?})", self.rows, self.ncols(), self.entries().collect::<Vec<_>>())
    }
}

/// Symmetric difference of two sorted lists.
fn xor_sorted(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

impl Z2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols: vec![Vec::new(); cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self { rows: n, cols: (0..n).map(|i| vec![i]).collect() }
    }

    /// Entries listed twice cancel.
    pub fn from_entries(rows: usize, cols: usize, entries: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut m = Self::zeros(rows, cols);
        for (i, j) in entries {
            if i >= rows || j >= cols {
                return Err(Error::Shape(format!("entry ({i}, {j}) outside a {rows}x{cols} matrix")));
            }
            m.toggle(i, j);
        }
        Ok(m)
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.cols[j].binary_search(&i).is_ok()
    }

    pub fn toggle(&mut self, i: usize, j: usize) {
        let col = &mut self.cols[j];
        match col.binary_search(&i) {
            Ok(p) => {
                col.remove(p);
            }
            Err(p) => col.insert(p, i),
        }
    }

    pub fn set(&mut self, i: usize, j: usize, v: bool) {
        if self.get(i, j) != v {
            self.toggle(i, j);
        }
    }

    pub fn column(&self, j: usize) -> &[usize] {
        &self.cols[j]
    }

    /// Nonzero entries as `(row, col)`, column by column.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.cols.iter().enumerate().flat_map(|(j, c)| c.iter().map(move |&i| (i, j)))
    }

    pub fn nnz(&self) -> usize {
        self.cols.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vec::is_empty)
    }

    pub fn mul(&self, rhs: &Z2Matrix) -> Result<Z2Matrix> {
        if self.ncols() != rhs.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows,
                self.ncols(),
                rhs.rows,
                rhs.ncols()
            )));
        }
        let cols =
            rhs.cols.iter().map(|c| c.iter().fold(Vec::new(), |acc, &k| xor_sorted(&acc, &self.cols[k]))).collect();
        Ok(Z2Matrix { rows: self.rows, cols })
    }

    pub fn add(&self, rhs: &Z2Matrix) -> Result<Z2Matrix> {
        if self.rows != rhs.rows || self.ncols() != rhs.ncols() {
            return Err(Error::Shape("cannot add matrices of different shapes".into()));
        }
        Ok(Z2Matrix { rows: self.rows, cols: self.cols.iter().zip(&rhs.cols).map(|(a, b)| xor_sorted(a, b)).collect() })
    }

    pub fn transpose(&self) -> Z2Matrix {
        let mut cols = vec![Vec::new(); self.rows];
        for (i, j) in self.entries() {
            cols[i].push(j);
        }
        Z2Matrix { rows: self.ncols(), cols }
    }

    /// The submatrix on the given rows and columns, in the given order.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Z2Matrix {
        let mut pos = vec![usize::MAX; self.rows];
        for (p, &r) in rows.iter().enumerate() {
            pos[r] = p;
        }
        let cols = cols
            .iter()
            .map(|&j| {
                let mut c: Vec<usize> =
                    self.cols[j].iter().filter_map(|&i| (pos[i] != usize::MAX).then_some(pos[i])).collect();
                c.sort_unstable();
                c
            })
            .collect();
        Z2Matrix { rows: rows.len(), cols }
    }

    pub fn rank(&self) -> usize {
        let words = self.rows.div_ceil(64);
        let mut pivots: Vec<Option<Vec<u64>>> = vec![None; self.rows];
        let mut rank = 0;
        for c in &self.cols {
            let mut v = vec![0u64; words];
            for &i in c {
                v[i / 64] |= 1 << (i % 64);
            }
            while let Some(lead) =
                v.iter().enumerate().find(|(_, w)| **w != 0).map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
            {
                match &pivots[lead] {
                    Some(p) => v.iter_mut().zip(p).for_each(|(a, b)| *a ^= b),
                    None => {
                        pivots[lead] = Some(v);
                        rank += 1;
                        break;
                    }
                }
            }
        }
        rank
    }

    /// `M^k` for a square matrix.
    pub fn pow(&self, k: u32) -> Result<Z2Matrix> {
        if self.rows != self.ncols() {
            return Err(Error::Shape("power of a non-square matrix".into()));
        }
        let mut out = Z2Matrix::identity(self.rows);
        for _ in 0..k {
            out = self.mul(&out)?;
        }
        Ok(out)
    }

    pub fn block_diag(a: &Z2Matrix, b: &Z2Matrix) -> Z2Matrix {
        let mut cols = a.cols.clone();
        cols.extend(b.cols.iter().map(|c| c.iter().map(|i| i + a.rows).collect()));
        Z2Matrix { rows: a.rows + b.rows, cols }
    }
}
