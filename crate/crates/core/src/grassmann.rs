//! Maximal minors of n x 2n matrices, the cross-ratio generators f_ij and the
//! gauge-fixing map onto the canonical slice.

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::{complex_json, parse_complex};

pub const MAX_N: usize = 6;

/// A complex n x 2n matrix, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterMatrix {
    n: usize,
    entries: Vec<Complex64>,
}

impl ParameterMatrix {
    pub fn new(n: usize, entries: Vec<Complex64>) -> Result<Self> {
        if !(2..=MAX_N).contains(&n) {
            return Err(Error::InvalidArgument(format!("n must lie in 2..={MAX_N}, got {n}")));
        }
        if entries.len() != 2 * n * n {
            return Err(Error::InvalidArgument(format!(
                "expected {} entries for a {n}x{} matrix, got {}",
                2 * n * n,
                2 * n,
                entries.len()
            )));
        }
        if entries.iter().any(|z| !z.is_finite()) {
            return Err(Error::InvalidArgument("matrix has non-finite entries".into()));
        }
        Ok(ParameterMatrix { n, entries })
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let entries = rows.iter().flat_map(|r| r.iter().map(|&x| Complex64::new(x, 0.0))).collect();
        Self::new(n, entries)
    }

    /// `[I | 1 | R]` where the first row of `R` is all ones and rows `2..n`
    /// hold the grid (row-major, `(n-1) x (n-1)`).
    pub fn canonical(n: usize, grid: &[Complex64]) -> Result<Self> {
        if grid.len() != (n - 1) * (n - 1) {
            return Err(Error::InvalidArgument("grid size must be (n-1)^2".into()));
        }
        let one = Complex64::new(1.0, 0.0);
        let mut e = vec![Complex64::new(0.0, 0.0); 2 * n * n];
        for i in 0..n {
            e[i * 2 * n + i] = one;
            e[i * 2 * n + n] = one;
            for j in n + 1..2 * n {
                e[i * 2 * n + j] = if i == 0 { one } else { grid[(i - 1) * (n - 1) + (j - n - 1)] };
            }
        }
        Self::new(n, e)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Entry at 0-based row `i`, column `j`.
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * 2 * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.entries[i * 2 * self.n + j] = v;
    }

    pub fn max_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Scale the 1-based column `col`.
    pub fn scale_column(&self, col: usize, c: Complex64) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            out.set(i, col - 1, self.get(i, col - 1) * c);
        }
        out
    }

    /// `g Z` for an n x n matrix `g` given row-major.
    pub fn left_multiply(&self, g: &[Complex64]) -> Result<Self> {
        let n = self.n;
        if g.len() != n * n {
            return Err(Error::InvalidArgument("left factor must be n x n".into()));
        }
        let mut e = vec![Complex64::new(0.0, 0.0); 2 * n * n];
        for i in 0..n {
            for j in 0..2 * n {
                e[i * 2 * n + j] = (0..n).map(|k| g[i * n + k] * self.get(k, j)).sum();
            }
        }
        Self::new(n, e)
    }

    /// Threshold below which a minor counts as vanishing.
    pub fn genericity_threshold(&self) -> f64 {
        1e-12 * self.max_norm().powi(self.n as i32)
    }

    /// Column sets (1-based, lexicographic) whose minor vanishes.
    pub fn vanishing_minors(&self) -> Vec<Vec<usize>> {
        let eps = self.genericity_threshold();
        column_subsets(2 * self.n, self.n)
            .into_iter()
            .filter(|cols| minor(self, cols).map_or(true, |d| d.norm() <= eps))
            .collect()
    }

    pub fn is_generic(&self) -> bool {
        self.vanishing_minors().is_empty()
    }

    pub fn to_json(&self) -> Value {
        json!({ "n": self.n, "entries": self.entries.iter().map(|z| complex_json(*z)).collect::<Vec<_>>() })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let n = v
            .get("n")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::Parse("matrix JSON needs an integer \"n\"".into()))? as usize;
        let entries = v
            .get("entries")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Parse("matrix JSON needs an \"entries\" array".into()))?
            .iter()
            .map(parse_complex)
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, entries)
    }
}

/// All k-subsets of `{1..m}` in lexicographic order.
pub fn column_subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = Vec::with_capacity(k);
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for c in start..=m {
            if m - c + 1 < k - cur.len() {
                break;
            }
            cur.push(c);
            rec(c + 1, m, k, cur, out);
            cur.pop();
        }
    }
    rec(1, m, k, &mut cur, &mut out);
    out
}

/// Determinant of the columns `cols` (1-based, in the given order, so
/// permuting them changes the sign accordingly).
pub fn minor(z: &ParameterMatrix, cols: &[usize]) -> Result<Complex64> {
    let n = z.n;
    let malformed = cols.len() != n
        || cols.iter().any(|&c| c == 0 || c > 2 * n)
        || (1..cols.len()).any(|i| cols[..i].contains(&cols[i]));
    if malformed {
        return Err(Error::MalformedColumns(cols.to_vec()));
    }
    let a = |i: usize, j: usize| z.get(i, cols[j] - 1);
    Ok(match n {
        2 => a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0),
        3 => {
            a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
                + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0))
        }
        _ => {
            let mut m: Vec<Complex64> = (0..n * n).map(|k| a(k / n, k % n)).collect();
            lu_determinant(&mut m, n)
        }
    })
}

fn lu_determinant(m: &mut [Complex64], n: usize) -> Complex64 {
    let mut det = Complex64::new(1.0, 0.0);
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| m[i * n + k].norm().total_cmp(&m[j * n + k].norm()))
            .expect("nonempty range");
        if m[p * n + k] == Complex64::new(0.0, 0.0) {
            return Complex64::new(0.0, 0.0);
        }
        if p != k {
            for c in 0..n {
                m.swap(p * n + c, k * n + c);
            }
            det = -det;
        }
        let pivot = m[k * n + k];
        det *= pivot;
        for r in k + 1..n {
            let f = m[r * n + k] / pivot;
            for c in k..n {
                let v = m[k * n + c];
                m[r * n + c] -= f * v;
            }
        }
    }
    det
}

/// The (n-1) x (n-1) grid of cross-ratios, row `i` in 2..=n, column `j` in n+2..=2n.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossRatioGrid {
    pub n: usize,
    pub values: Vec<Complex64>,
}

impl CrossRatioGrid {
    pub fn new(n: usize, values: Vec<Complex64>) -> Result<Self> {
        if n < 2 || values.len() != (n - 1) * (n - 1) {
            return Err(Error::InvalidArgument("grid size must be (n-1)^2".into()));
        }
        Ok(CrossRatioGrid { n, values })
    }

    /// `f_ij` with the 1-based row `i` and column `j`.
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.values[(i - 2) * (self.n - 1) + (j - self.n - 2)]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .values
            .chunks(self.n - 1)
            .map(|r| Value::Array(r.iter().map(|z| complex_json(*z)).collect()))
            .collect();
        Value::Array(rows)
    }
}

fn checked_minor(z: &ParameterMatrix, cols: &[usize]) -> Result<Complex64> {
    let d = minor(z, cols)?;
    let eps = z.genericity_threshold();
    if d.norm() <= eps {
        return Err(Error::NonGeneric {
            columns: cols.to_vec(),
            modulus: d.norm(),
        });
    }
    Ok(d)
}

/// Only the denominator minors must be nonzero; a vanishing numerator is a
/// legitimate zero cross-ratio.
///
/// `f_ij = D(1..^i..n, j) D(2..n, n+1) / (D(2..n, j) D(1..^i..n, n+1))`.
pub fn cross_ratios(z: &ParameterMatrix) -> Result<CrossRatioGrid> {
    let n = z.n;
    let tail: Vec<usize> = (2..=n).collect();
    let with = |base: &[usize], c: usize| -> Vec<usize> {
        let mut v = base.to_vec();
        v.push(c);
        v
    };
    let d_tail_np1 = checked_minor(z, &with(&tail, n + 1))?;
    let mut values = Vec::with_capacity((n - 1) * (n - 1));
    for i in 2..=n {
        let hat: Vec<usize> = (1..=n).filter(|&k| k != i).collect();
        let d_hat_np1 = checked_minor(z, &with(&hat, n + 1))?;
        for j in n + 2..=2 * n {
            let num = minor(z, &with(&hat, j))?;
            let den = checked_minor(z, &with(&tail, j))?;
            values.push(num * d_tail_np1 / (den * d_hat_np1));
        }
    }
    CrossRatioGrid::new(n, values)
}

/// Representative of the orbit of `z` on the canonical slice.
pub fn gauge_fix(z: &ParameterMatrix) -> Result<ParameterMatrix> {
    if let Some(cols) = z.vanishing_minors().into_iter().next() {
        let modulus = minor(z, &cols)?.norm();
        return Err(Error::NonGeneric { columns: cols, modulus });
    }
    let grid = cross_ratios(z)?;
    ParameterMatrix::canonical(z.n, &grid.values)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn legendre(lambda: f64) -> ParameterMatrix {
        ParameterMatrix::from_real_rows(&[&[1.0, 0.0, 1.0, 1.0], &[0.0, 1.0, 1.0, lambda]]).unwrap()
    }

    #[test]
    fn minors_on_legendre_slice() {
        let z = legendre(0.3);
        assert_eq!(minor(&z, &[1, 2]).unwrap(), c(1.0));
        assert_eq!(minor(&z, &[2, 4]).unwrap(), c(-1.0));
        assert_eq!(minor(&z, &[4, 2]).unwrap(), c(1.0));
        assert!(matches!(minor(&z, &[2, 2]), Err(Error::MalformedColumns(_))));
        assert!(matches!(minor(&z, &[1, 5]), Err(Error::MalformedColumns(_))));
    }

    #[test]
    fn cross_ratio_is_lambda() {
        let g = cross_ratios(&legendre(0.3)).unwrap();
        assert!((g.get(2, 4) - c(0.3)).norm() < 1e-15);
    }

    #[test]
    fn gauge_fix_removes_column_scale() {
        let z = ParameterMatrix::from_real_rows(&[&[2.0, 0.0, 2.0, 2.0], &[0.0, 1.0, 1.0, 0.7]]).unwrap();
        let fixed = gauge_fix(&z).unwrap();
        for (a, b) in fixed.entries().iter().zip(legendre(0.7).entries()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn canonical_slice_reads_back_its_grid() {
        let grid = vec![Complex64::new(0.2, 0.1), c(-0.3), c(0.15), Complex64::new(0.0, 0.4)];
        let z = ParameterMatrix::canonical(3, &grid).unwrap();
        let f = cross_ratios(&z).unwrap();
        for (a, b) in f.values.iter().zip(&grid) {
            assert!((a - b).norm() < 1e-14);
        }
        assert_eq!(gauge_fix(&z).unwrap(), ParameterMatrix::canonical(3, &f.values).unwrap());
    }

    #[test]
    fn lu_agrees_with_cofactor() {
        let grid: Vec<Complex64> = (0..9).map(|k| Complex64::new(0.1 * k as f64, 0.05 * (k % 3) as f64)).collect();
        let z = ParameterMatrix::canonical(4, &grid).unwrap();
        // Columns 1..4 form the identity block.
        assert!((minor(&z, &[1, 2, 3, 4]).unwrap() - c(1.0)).norm() < 1e-15);
        assert!((minor(&z, &[2, 1, 3, 4]).unwrap() + c(1.0)).norm() < 1e-15);
    }

    #[test]
    fn non_generic_is_reported() {
        // Only the minor on columns 3, 4 vanishes, and the cross-ratio never uses it.
        let z = ParameterMatrix::from_real_rows(&[&[1.0, 0.0, 1.0, 1.0], &[0.0, 1.0, 1.0, 1.0]]).unwrap();
        assert_eq!(z.vanishing_minors(), vec![vec![3, 4]]);
        assert!(matches!(gauge_fix(&z), Err(Error::NonGeneric { columns, .. }) if columns == vec![3, 4]));
        let z = ParameterMatrix::from_real_rows(&[&[1.0, 0.0, 1.0, 0.0], &[0.0, 1.0, 1.0, 0.0]]).unwrap();
        assert!(matches!(cross_ratios(&z), Err(Error::NonGeneric { columns, .. }) if columns == vec![2, 4]));
    }

    #[test]
    fn subsets_count() {
        assert_eq!(column_subsets(6, 3).len(), 20);
        assert_eq!(column_subsets(4, 2)[0], vec![1, 2]);
    }
}
