//! Univariate gcd, squarefree part and Sylvester resultants.

use std::collections::HashMap;

use num_traits::{One, Zero};

use super::monomial::Monomial;
use super::{BigRational, SparsePolynomial};
use crate::error::{Error, Result};

/// Dense univariate polynomial over Q, coefficients in ascending degree.
/// Empty vector is the zero polynomial; otherwise the last entry is nonzero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DensePoly(Vec<BigRational>);

impl DensePoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        DensePoly(coeffs)
    }

    pub fn zero() -> Self {
        DensePoly(Vec::new())
    }

    pub fn one() -> Self {
        DensePoly(vec![BigRational::one()])
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigRational::from_integer(c.into())).collect())
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigRational> {
        self.0.last()
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(lc) => {
                let inv = lc.recip();
                DensePoly(self.0.iter().map(|c| c * &inv).collect())
            }
        }
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(i.into()))
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        Self::new(
            (0..n)
                .map(|i| {
                    let a = self.0.get(i).cloned().unwrap_or_else(BigRational::zero);
                    let b = other.0.get(i).cloned().unwrap_or_else(BigRational::zero);
                    a + b
                })
                .collect(),
        )
    }

    pub fn neg(&self) -> Self {
        DensePoly(self.0.iter().map(|c| -c.clone()).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigRational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.0.iter().map(|a| a * c).collect())
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> (Self, Self) {
        let dd = divisor.degree().expect("division by zero polynomial");
        let lc_inv = divisor.0[dd].recip();
        let mut rem = self.0.clone();
        if rem.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut quot = vec![BigRational::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dd] * &lc_inv;
            if c.is_zero() {
                continue;
            }
            for (j, d) in divisor.0.iter().enumerate() {
                rem[k + j] -= &c * d;
            }
            quot[k] = c;
        }
        rem.truncate(dd);
        (Self::new(quot), Self::new(rem))
    }

    pub fn divides(&self, other: &Self) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        other.div_rem(self).1.is_zero()
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.0.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Embed as a polynomial in variable `var` of a ring with `arity` variables.
    pub fn to_sparse(&self, arity: usize, var: usize) -> SparsePolynomial {
        let mut p = SparsePolynomial::zero(arity);
        for (i, c) in self.0.iter().enumerate() {
            p.add_term(Monomial::var(arity, var).with_exponent(var, i as u32), c.clone());
        }
        p
    }

    /// Read a polynomial that involves at most the variable `var`.
    pub fn from_sparse(p: &SparsePolynomial, var: usize) -> Result<Self> {
        if p.variables_used().iter().any(|&v| v != var) {
            return Err(Error::NotUnivariate("dense conversion"));
        }
        let deg = p.degree_in(var).unwrap_or(0) as usize;
        let mut coeffs = vec![BigRational::zero(); deg + 1];
        for (m, c) in p.terms() {
            coeffs[m.exponent(var) as usize] = c.clone();
        }
        Ok(Self::new(coeffs))
    }
}

/// The single variable shared by univariate inputs (0 if all are constant).
fn common_variable(op: &'static str, polys: &[&SparsePolynomial]) -> Result<usize> {
    let mut var = None;
    for p in polys {
        for v in p.variables_used() {
            match var {
                None => var = Some(v),
                Some(w) if w == v => {}
                Some(_) => return Err(Error::NotUnivariate(op)),
            }
        }
    }
    Ok(var.unwrap_or(0))
}

/// Monic gcd over Q of two univariate polynomials in the same variable.
pub fn gcd_univariate(a: &SparsePolynomial, b: &SparsePolynomial) -> Result<SparsePolynomial> {
    a.checked_sub(b)?;
    let var = common_variable("gcd_univariate", &[a, b])?;
    let g = DensePoly::from_sparse(a, var)?.gcd(&DensePoly::from_sparse(b, var)?);
    Ok(g.to_sparse(a.arity(), var))
}

/// `p / gcd(p, p')`, monic.
pub fn squarefree_part(p: &SparsePolynomial) -> Result<SparsePolynomial> {
    if p.is_zero() {
        return Err(Error::ZeroPolynomial("squarefree_part"));
    }
    let var = common_variable("squarefree_part", &[p])?;
    let d = DensePoly::from_sparse(p, var)?;
    Ok(dense_squarefree(&d).to_sparse(p.arity(), var))
}

pub(crate) fn dense_squarefree(d: &DensePoly) -> DensePoly {
    let g = d.gcd(&d.derivative());
    if g.is_zero() {
        return d.monic();
    }
    d.div_rem(&g).0.monic()
}

/// Sylvester resultant of `a` and `b` with respect to variable `var`.
pub fn resultant(a: &SparsePolynomial, b: &SparsePolynomial, var: usize) -> Result<SparsePolynomial> {
    a.checked_sub(b)?;
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroPolynomial("resultant"));
    }
    if var >= a.arity() {
        return Err(Error::InvalidArgument(format!("variable {var} out of range")));
    }
    let ca = a.coefficients_in(var);
    let cb = b.coefficients_in(var);
    let m = ca.len() - 1;
    let n = cb.len() - 1;
    let size = m + n;
    let arity = a.arity();
    // Row i < n holds a's coefficients (highest first) shifted by i; rows
    // n.. hold b's coefficients shifted likewise.
    let mut matrix = vec![vec![SparsePolynomial::zero(arity); size]; size];
    for i in 0..n {
        for (k, c) in ca.iter().rev().enumerate() {
            matrix[i][i + k] = c.clone();
        }
    }
    for i in 0..m {
        for (k, c) in cb.iter().rev().enumerate() {
            matrix[n + i][i + k] = c.clone();
        }
    }
    Ok(determinant(&matrix, arity))
}

/// Resultant with respect to the second variable (`y`).
pub fn resultant_y(a: &SparsePolynomial, b: &SparsePolynomial) -> Result<SparsePolynomial> {
    if a.arity() < 2 {
        return Err(Error::InvalidArgument("resultant_y needs at least two variables".into()));
    }
    resultant(a, b, 1)
}

/// Laplace expansion along rows with memoization over used column sets.
fn determinant(matrix: &[Vec<SparsePolynomial>], arity: usize) -> SparsePolynomial {
    let size = matrix.len();
    assert!(size < 24, "determinant too large for subset expansion");
    let mut memo: HashMap<u32, SparsePolynomial> = HashMap::new();
    memo.insert(0, SparsePolynomial::one(arity));
    // Process masks by popcount so that all sub-masks are ready.
    let mut by_count: Vec<Vec<u32>> = vec![Vec::new(); size + 1];
    for mask in 0u32..(1u32 << size) {
        by_count[mask.count_ones() as usize].push(mask);
    }
    for count in 1..=size {
        let row = count - 1;
        for &mask in &by_count[count] {
            let mut acc = SparsePolynomial::zero(arity);
            let mut pos = 0usize;
            for c in 0..size {
                if mask & (1 << c) == 0 {
                    continue;
                }
                let entry = &matrix[row][c];
                if !entry.is_zero() {
                    if let Some(minor) = memo.get(&(mask & !(1 << c))) {
                        if !minor.is_zero() {
                            let term = entry * minor;
                            acc = if (row + pos) % 2 == 0 { &acc + &term } else { &acc - &term };
                        }
                    }
                }
                pos += 1;
            }
            memo.insert(mask, acc);
        }
        // Masks of size count-1 are no longer needed.
        for &mask in &by_count[count - 1] {
            memo.remove(&mask);
        }
    }
    memo.remove(&((1u32 << size) - 1)).unwrap_or_else(|| SparsePolynomial::one(arity))
}
