use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};

use super::BigRational;
use crate::error::{Error, Result};

/// Sparse rational matrix in coordinate form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrixQ {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, BigRational)>,
}

impl SparseMatrixQ {
    /// Zero entries are dropped; out-of-range or repeated positions are rejected.
    pub fn new(rows: usize, cols: usize, entries: Vec<(usize, usize, BigRational)>) -> Result<Self> {
        let mut seen = std::collections::HashSet::with_capacity(entries.len());
        let mut kept = Vec::with_capacity(entries.len());
        for (r, c, v) in entries {
            if r >= rows || c >= cols {
                return Err(Error::InvalidArgument(format!(
                    "entry ({r}, {c}) outside {rows}x{cols} matrix"
                )));
            }
            if !seen.insert((r, c)) {
                return Err(Error::InvalidArgument(format!("duplicate entry at ({r}, {c})")));
            }
            if !v.is_zero() {
                kept.push((r, c, v));
            }
        }
        kept.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        Ok(SparseMatrixQ {
            rows,
            cols,
            entries: kept,
        })
    }

    pub fn identity(n: usize) -> Self {
        let entries = (0..n).map(|i| (i, i, BigRational::one())).collect();
        Self::new(n, n, entries).expect("identity is well formed")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Entries sorted by (row, column).
    pub fn entries(&self) -> &[(usize, usize, BigRational)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn mul_vec(&self, v: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(v.len(), self.cols);
        let mut out = vec![BigRational::zero(); self.rows];
        for (r, c, a) in &self.entries {
            if !v[*c].is_zero() {
                out[*r] += a * &v[*c];
            }
        }
        out
    }

    /// Stack matrices with equal column counts on top of each other.
    pub fn vstack(blocks: &[SparseMatrixQ]) -> Result<SparseMatrixQ> {
        let cols = blocks.first().map_or(0, |b| b.cols);
        let mut entries = Vec::new();
        let mut offset = 0;
        for b in blocks {
            if b.cols != cols {
                return Err(Error::InvalidArgument("vstack: column counts differ".into()));
            }
            entries.extend(b.entries.iter().map(|(r, c, v)| (r + offset, *c, v.clone())));
            offset += b.rows;
        }
        Ok(SparseMatrixQ {
            rows: offset,
            cols,
            entries,
        })
    }

    fn sparse_rows(&self) -> Vec<Vec<(usize, BigRational)>> {
        let mut rows = vec![Vec::new(); self.rows];
        for (r, c, v) in &self.entries {
            rows[*r].push((*c, v.clone()));
        }
        rows
    }
}

/// Row echelon form with unit pivots; each stored row's pivot is its
/// smallest column.
struct Echelon {
    pivots: HashMap<usize, Vec<(usize, BigRational)>>,
}

impl Echelon {
    fn insert(&mut self, row: Vec<(usize, BigRational)>) {
        let mut work: BTreeMap<usize, BigRational> = row.into_iter().collect();
        let mut cursor = 0usize;
        loop {
            let hit = work
                .range(cursor..)
                .find(|(c, _)| self.pivots.contains_key(c))
                .map(|(c, v)| (*c, v.clone()));
            let Some((col, factor)) = hit else { break };
            for (c, v) in &self.pivots[&col] {
                let e = work.entry(*c).or_insert_with(BigRational::zero);
                *e -= &factor * v;
                if e.is_zero() {
                    work.remove(c);
                }
            }
            cursor = col + 1;
        }
        let Some((&pivot, lead)) = work.iter().next() else {
            return;
        };
        let inv = lead.recip();
        let normalized = work.into_iter().map(|(c, v)| (c, v * &inv)).collect();
        self.pivots.insert(pivot, normalized);
    }
}

/// Exact basis of the right null space.
///
/// Gaussian elimination over the rationals with the pivot of each row at its
/// smallest column. The returned basis is the reduced-echelon one: vector `k`
/// has a 1 in the `k`-th free column and 0 in every other free column, so the
/// output does not depend on the order in which rows are eliminated. Rows are
/// processed sparsest first.
pub fn kernel_basis(m: &SparseMatrixQ) -> Vec<Vec<BigRational>> {
    let mut rows: Vec<(usize, Vec<(usize, BigRational)>)> = m.sparse_rows().into_iter().enumerate().collect();
    rows.retain(|(_, r)| !r.is_empty());
    rows.sort_by_key(|(i, r)| (r.len(), *i));

    let mut ech = Echelon {
        pivots: HashMap::new(),
    };
    for (_, row) in rows {
        ech.insert(row);
    }

    let mut pivot_cols: Vec<usize> = ech.pivots.keys().copied().collect();
    pivot_cols.sort_unstable();
    let free: Vec<usize> = (0..m.cols).filter(|c| !ech.pivots.contains_key(c)).collect();

    free.iter()
        .map(|&f| {
            let mut x = vec![BigRational::zero(); m.cols];
            x[f] = BigRational::one();
            for &p in pivot_cols.iter().rev() {
                let mut acc = BigRational::zero();
                for (c, v) in &ech.pivots[&p] {
                    if *c != p && !x[*c].is_zero() {
                        acc -= v * &x[*c];
                    }
                }
                x[p] = acc;
            }
            x
        })
        .collect()
}

/// Rank of a dense list of exact vectors.
pub fn rank(vectors: &[Vec<BigRational>]) -> usize {
    let mut ech = Echelon {
        pivots: HashMap::new(),
    };
    for v in vectors {
        let row = v
            .iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(i, x)| (i, x.clone()))
            .collect();
        ech.insert(row);
    }
    ech.pivots.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    #[test]
    fn identity_has_trivial_kernel() {
        assert!(kernel_basis(&SparseMatrixQ::identity(3)).is_empty());
    }

    #[test]
    fn single_row_kernel() {
        let m = SparseMatrixQ::new(1, 2, vec![(0, 0, q(1)), (0, 1, q(-1))]).unwrap();
        assert_eq!(kernel_basis(&m), vec![vec![q(1), q(1)]]);
    }

    #[test]
    fn rejects_bad_entries() {
        assert!(SparseMatrixQ::new(1, 1, vec![(0, 1, q(1))]).is_err());
        assert!(SparseMatrixQ::new(1, 1, vec![(0, 0, q(1)), (0, 0, q(2))]).is_err());
    }

    proptest! {
        #[test]
        fn kernel_vectors_are_annihilated_and_independent(
            rows in 1usize..6,
            cols in 1usize..7,
            seed in proptest::collection::vec(-3i64..4, 42),
        ) {
            let mut entries = Vec::new();
            for r in 0..rows {
                for c in 0..cols {
                    let v = seed[(r * 7 + c) % seed.len()];
                    if v != 0 && (r + c) % 2 == 0 || v.abs() == 3 {
                        entries.push((r, c, q(v)));
                    }
                }
            }
            let m = SparseMatrixQ::new(rows, cols, entries).unwrap();
            let basis = kernel_basis(&m);
            for v in &basis {
                prop_assert!(m.mul_vec(v).iter().all(|x| x.is_zero()));
            }
            prop_assert_eq!(rank(&basis), basis.len());
            // rank-nullity against an independent rank computation of the rows
            let dense_rows: Vec<Vec<BigRational>> = (0..rows)
                .map(|r| {
                    let mut row = vec![BigRational::zero(); cols];
                    for (rr, c, v) in m.entries() {
                        if *rr == r { row[*c] = v.clone(); }
                    }
                    row
                })
                .collect();
            prop_assert_eq!(rank(&dense_rows) + basis.len(), cols);
        }
    }
}
