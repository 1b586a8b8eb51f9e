//! Multi-index hypergeometric series for double covers of P^{n-1}.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::grassmann::CrossRatioGrid;
use crate::rational_poly::{rational_to_f64, BigRational, Monomial};

/// Rising factorial `a (a+1) ... (a+k-1)`.
pub fn pochhammer(a: &BigRational, k: u32) -> BigRational {
    let mut acc = BigRational::one();
    let mut x = a.clone();
    for _ in 0..k {
        acc *= &x;
        x += BigRational::one();
    }
    acc
}

fn half(k: i64) -> BigRational {
    BigRational::new(BigInt::from(k), BigInt::from(2))
}

/// Exponents `l_ij` for `i` in 2..=n and `j` in n+2..=2n, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    n: usize,
    entries: Vec<u32>,
}

impl MultiIndex {
    pub fn new(n: usize, entries: Vec<u32>) -> Result<Self> {
        if n < 2 || entries.len() != (n - 1) * (n - 1) {
            return Err(Error::InvalidArgument("multi-index must have (n-1)^2 entries".into()));
        }
        Ok(MultiIndex { n, entries })
    }

    pub fn zero(n: usize) -> Self {
        MultiIndex {
            n,
            entries: vec![0; (n - 1) * (n - 1)],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[u32] {
        &self.entries
    }

    /// `l_ij` with 1-based `i` in 2..=n, `j` in n+2..=2n.
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.entries[(i - 2) * (self.n - 1) + (j - self.n - 2)]
    }

    pub fn total(&self) -> u32 {
        self.entries.iter().sum()
    }

    pub fn row_sums(&self) -> Vec<u32> {
        self.entries.chunks(self.n - 1).map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<u32> {
        let m = self.n - 1;
        (0..m).map(|j| (0..m).map(|i| self.entries[i * m + j]).sum()).collect()
    }

    /// All multi-indices of total degree `d`, in ascending graded-lex order.
    pub fn all_of_degree(n: usize, d: u32) -> Vec<MultiIndex> {
        Monomial::all_of_degree((n - 1) * (n - 1), d)
            .into_iter()
            .map(|m| MultiIndex {
                n,
                entries: m.exponents().to_vec(),
            })
            .collect()
    }
}

/// `A(l) = prod_j (1/2, c_j) prod_i (1/2, r_i) / ((n/2, |l|) prod l_ij!)`.
#[allow(non_snake_case)]
pub fn coefficient_A(l: &MultiIndex) -> BigRational {
    let h = half(1);
    let mut num = BigRational::one();
    for c in l.col_sums() {
        num *= pochhammer(&h, c);
    }
    for r in l.row_sums() {
        num *= pochhammer(&h, r);
    }
    let mut den = pochhammer(&half(l.n as i64), l.total());
    for &e in &l.entries {
        den *= pochhammer(&BigRational::one(), e);
    }
    num / den
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesConfig {
    pub max_total_degree: u32,
    pub tail_tolerance: f64,
    pub domain_radius: f64,
}

impl Default for SeriesConfig {
    fn default() -> Self {
        SeriesConfig {
            max_total_degree: 40,
            tail_tolerance: 1e-12,
            domain_radius: 0.5,
        }
    }
}

impl SeriesConfig {
    pub fn with_max_degree(mut self, d: u32) -> Self {
        self.max_total_degree = d;
        self
    }

    pub fn with_radius(mut self, r: f64) -> Self {
        self.domain_radius = r;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.max_total_degree < 1 {
            return Err(Error::InvalidArgument("max_total_degree must be at least 1".into()));
        }
        if !(self.tail_tolerance > 0.0 && self.domain_radius > 0.0) {
            return Err(Error::InvalidArgument("tolerance and radius must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    pub tail_bound: f64,
    /// Whether `tail_bound <= tail_tolerance * |value|`.
    pub converged: bool,
    /// Sum of `|A(l) x^l|` over the last computed shell.
    pub last_shell: f64,
}

/// Coefficients as floats, each with the index of its predecessor `l - e_var`
/// so monomials are built with one multiplication apiece.
struct Table {
    terms: Vec<(usize, usize, f64)>,
    shell_ends: Vec<usize>,
}

fn build_table(n: usize, max_degree: u32) -> Table {
    let m = (n - 1) * (n - 1);
    let mut terms = vec![(0usize, 0usize, 1.0)];
    let mut shell_ends = vec![1usize];
    let mut prev: HashMap<Vec<u32>, (usize, BigRational)> = HashMap::new();
    prev.insert(vec![0; m], (0, BigRational::one()));
    let h = half(1);
    let n_half = half(n as i64);
    for d in 1..=max_degree {
        let mut cur = HashMap::new();
        for l in MultiIndex::all_of_degree(n, d) {
            let var = l.entries.iter().position(|&e| e > 0).expect("positive degree");
            let mut p = l.clone();
            p.entries[var] -= 1;
            let (pidx, pa) = &prev[&p.entries];
            // A(p + e_ij) / A(p) = (1/2 + c_j)(1/2 + r_i) / ((n/2 + |p|)(p_ij + 1))
            let (i, j) = (var / (n - 1), var % (n - 1));
            let r = BigInt::from(p.row_sums()[i]);
            let c = BigInt::from(p.col_sums()[j]);
            let num = (&h + BigRational::from_integer(r)) * (&h + BigRational::from_integer(c));
            let den = (&n_half + BigRational::from_integer(BigInt::from(p.total())))
                * BigRational::from_integer(BigInt::from(p.entries[var] + 1));
            let a = pa * num / den;
            terms.push((*pidx, var, rational_to_f64(&a)));
            cur.insert(l.entries, (terms.len() - 1, a));
        }
        shell_ends.push(terms.len());
        prev = cur;
    }
    Table { terms, shell_ends }
}

fn table(n: usize, max_degree: u32) -> Arc<Table> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u32), Arc<Table>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(t) = cache.lock().expect("series cache").get(&(n, max_degree)) {
        return t.clone();
    }
    let t = Arc::new(build_table(n, max_degree));
    cache.lock().expect("series cache").entry((n, max_degree)).or_insert(t).clone()
}

/// Partial sum of `sum_l A(l) x^l` over `|l| <= max_total_degree`, in graded-lex
/// order of `l`, with a geometric tail estimate from the last two shells.
pub fn series_phi(x: &CrossRatioGrid, cfg: &SeriesConfig) -> Result<SeriesValue> {
    cfg.validate()?;
    let max_abs = x.max_abs();
    if !(max_abs < cfg.domain_radius) {
        return Err(Error::OutsideDomain {
            max_abs,
            radius: cfg.domain_radius,
        });
    }
    let t = table(x.n, cfg.max_total_degree);
    let mut powers = Vec::with_capacity(t.terms.len());
    powers.push(Complex64::one());
    let mut value = Complex64::one();
    let mut shells = vec![1.0f64];
    for w in t.shell_ends.windows(2) {
        let mut shell_sum = Complex64::zero();
        let mut shell_abs = 0.0;
        for &(pred, var, a) in &t.terms[w[0]..w[1]] {
            let p = powers[pred] * x.values[var];
            powers.push(p);
            let term = p * a;
            shell_sum += term;
            shell_abs += term.norm();
        }
        value += shell_sum;
        shells.push(shell_abs);
    }
    let d = shells.len() - 1;
    let (last, previous) = (shells[d], shells[d - 1]);
    let tail_bound = if last == 0.0 {
        0.0
    } else if last >= previous {
        return Err(Error::NotConverging {
            degree: d,
            last,
            previous,
        });
    } else {
        let r = last / previous;
        last * r / (1.0 - r)
    };
    Ok(SeriesValue {
        value,
        tail_bound,
        converged: tail_bound <= cfg.tail_tolerance * value.norm(),
        last_shell: last,
    })
}

/// `2F1(1/2, 1/2; 1; l)` through the n = 2 series.
pub fn gauss_2f1_half(lambda: Complex64, cfg: &SeriesConfig) -> Result<SeriesValue> {
    series_phi(&CrossRatioGrid::new(2, vec![lambda])?, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn pochhammer_values() {
        assert_eq!(pochhammer(&q(1, 2), 0), q(1, 1));
        assert_eq!(pochhammer(&q(1, 2), 2), q(3, 4));
        assert_eq!(pochhammer(&q(3, 2), 3), q(105, 8));
    }

    #[test]
    fn coefficient_examples() {
        assert_eq!(coefficient_A(&MultiIndex::zero(3)), q(1, 1));
        assert_eq!(coefficient_A(&MultiIndex::new(2, vec![1]).unwrap()), q(1, 4));
        assert_eq!(coefficient_A(&MultiIndex::new(3, vec![1, 0, 0, 0]).unwrap()), q(1, 6));
    }

    #[test]
    fn legendre_coefficients_are_squared_ratios() {
        for m in 0..=50u32 {
            let direct = pochhammer(&q(1, 2), m) / pochhammer(&q(1, 1), m);
            assert_eq!(coefficient_A(&MultiIndex::new(2, vec![m]).unwrap()), &direct * &direct);
        }
    }

    #[test]
    fn symmetric_under_row_and_column_swaps() {
        let l = MultiIndex::new(3, vec![2, 0, 1, 3]).unwrap();
        let rows = MultiIndex::new(3, vec![1, 3, 2, 0]).unwrap();
        let cols = MultiIndex::new(3, vec![0, 2, 3, 1]).unwrap();
        assert_eq!(coefficient_A(&l), coefficient_A(&rows));
        assert_eq!(coefficient_A(&l), coefficient_A(&cols));
    }

    #[test]
    fn table_matches_direct_coefficients() {
        let t = build_table(3, 6);
        let mut k = 0;
        for d in 0..=6 {
            for l in MultiIndex::all_of_degree(3, d) {
                assert_eq!(t.terms[k].2, rational_to_f64(&coefficient_A(&l)));
                k += 1;
            }
        }
    }

    #[test]
    fn zero_point() {
        let x = CrossRatioGrid::new(3, vec![Complex64::zero(); 4]).unwrap();
        let v = series_phi(&x, &SeriesConfig::default()).unwrap();
        assert_eq!(v.value, Complex64::one());
        assert_eq!(v.tail_bound, 0.0);
    }

    #[test]
    fn domain_and_shell_checks() {
        let x = CrossRatioGrid::new(2, vec![Complex64::new(0.6, 0.0)]).unwrap();
        assert!(matches!(series_phi(&x, &SeriesConfig::default()), Err(Error::OutsideDomain { .. })));
        let cfg = SeriesConfig::default().with_radius(10.0);
        let x = CrossRatioGrid::new(2, vec![Complex64::new(1.5, 0.0)]).unwrap();
        assert!(matches!(series_phi(&x, &cfg), Err(Error::NotConverging { .. })));
    }

    #[test]
    fn k3_shells_settle() {
        let x = CrossRatioGrid::new(3, vec![Complex64::new(0.05, 0.0); 4]).unwrap();
        let a = series_phi(&x, &SeriesConfig::default().with_max_degree(10)).unwrap();
        let b = series_phi(&x, &SeriesConfig::default().with_max_degree(12)).unwrap();
        assert!((a.value - b.value).norm() < 1e-10);
    }
}
