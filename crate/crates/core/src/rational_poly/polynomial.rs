use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::Value;

use super::monomial::Monomial;
use super::BigRational;
use crate::error::{Error, Result};

/// Exact multivariate polynomial over the rationals.
///
/// Terms are kept in a `BTreeMap` keyed by graded-lex monomials, so iteration
/// order (and therefore serialization and float evaluation) is deterministic.
/// No stored coefficient is zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparsePolynomial {
    arity: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

/// Exact `a op b`; fails on ring arity mismatch.
pub fn poly_arith(a: &SparsePolynomial, b: &SparsePolynomial, op: ArithOp) -> Result<SparsePolynomial> {
    match op {
        ArithOp::Add => a.checked_add(b),
        ArithOp::Sub => a.checked_sub(b),
        ArithOp::Mul => a.checked_mul(b),
    }
}

/// Evaluate at a complex point; see [`SparsePolynomial::eval`].
pub fn poly_eval(p: &SparsePolynomial, point: &[Complex64]) -> Result<Complex64> {
    p.eval(point)
}

impl SparsePolynomial {
    pub fn zero(arity: usize) -> Self {
        SparsePolynomial {
            arity,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(arity: usize, c: BigRational) -> Self {
        let mut p = Self::zero(arity);
        p.add_term(Monomial::one(arity), c);
        p
    }

    pub fn one(arity: usize) -> Self {
        Self::constant(arity, BigRational::one())
    }

    pub fn var(arity: usize, index: usize) -> Self {
        let mut p = Self::zero(arity);
        p.add_term(Monomial::var(arity, index), BigRational::one());
        p
    }

    /// Build from `(exponents, coefficient)` pairs; repeated monomials are summed.
    pub fn from_terms<I>(arity: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, BigRational)>,
    {
        let mut p = Self::zero(arity);
        for (exps, c) in terms {
            if exps.len() != arity {
                return Err(Error::ArityMismatch {
                    left: arity,
                    right: exps.len(),
                });
            }
            p.add_term(Monomial::new(exps), c);
        }
        Ok(p)
    }

    /// Convenience constructor from integer coefficients.
    pub fn from_int_terms(arity: usize, terms: &[(&[u32], i64)]) -> Self {
        let mut p = Self::zero(arity);
        for (exps, c) in terms {
            assert_eq!(exps.len(), arity, "exponent vector length");
            p.add_term(Monomial::new(exps.to_vec()), BigRational::from_integer(BigInt::from(*c)));
        }
        p
    }

    pub(crate) fn add_term(&mut self, m: Monomial, c: BigRational) {
        debug_assert_eq!(m.arity(), self.arity);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, m: &Monomial) -> BigRational {
        self.terms.get(m).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Constant term value if the polynomial is constant.
    pub fn as_constant(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                (m.total_degree() == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::total_degree).max()
    }

    pub fn degree_in(&self, var: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.exponent(var)).max()
    }

    /// Indices of variables that occur with positive exponent.
    pub fn variables_used(&self) -> Vec<usize> {
        (0..self.arity)
            .filter(|&v| self.terms.keys().any(|m| m.exponent(v) > 0))
            .collect()
    }

    fn check_arity(&self, other: &Self) -> Result<()> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch {
                left: self.arity,
                right: other.arity,
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_arity(other)?;
        let mut out = Self::zero(self.arity);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.arity);
        }
        SparsePolynomial {
            arity: self.arity,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.arity);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero(self.arity);
        for (m, c) in &self.terms {
            let e = m.exponent(var);
            if e > 0 {
                out.add_term(m.with_exponent(var, e - 1), c * BigRational::from_integer(e.into()));
            }
        }
        out
    }

    /// Coefficients with respect to `var`: entry `k` is the coefficient of
    /// `var^k`, itself a polynomial of the same arity not involving `var`.
    pub fn coefficients_in(&self, var: usize) -> Vec<SparsePolynomial> {
        let deg = self.degree_in(var).unwrap_or(0) as usize;
        let mut out = vec![Self::zero(self.arity); deg + 1];
        for (m, c) in &self.terms {
            let e = m.exponent(var) as usize;
            out[e].add_term(m.with_exponent(var, 0), c.clone());
        }
        out
    }

    /// Substitute polynomial `images[i]` (all of a common arity) for variable `i`.
    pub fn substitute(&self, images: &[SparsePolynomial]) -> Result<SparsePolynomial> {
        if images.len() != self.arity {
            return Err(Error::ArityMismatch {
                left: self.arity,
                right: images.len(),
            });
        }
        let target = images.first().map_or(0, |p| p.arity);
        if let Some(bad) = images.iter().find(|p| p.arity != target) {
            return Err(Error::ArityMismatch {
                left: target,
                right: bad.arity,
            });
        }
        let mut power_cache: Vec<Vec<SparsePolynomial>> =
            images.iter().map(|p| vec![SparsePolynomial::one(p.arity), p.clone()]).collect();
        let mut out = Self::zero(target);
        for (m, c) in &self.terms {
            let mut term = Self::constant(target, c.clone());
            for (v, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let cache = &mut power_cache[v];
                while cache.len() <= e as usize {
                    let next = &cache[cache.len() - 1] * &images[v];
                    cache.push(next);
                }
                term = &term * &cache[e as usize];
            }
            for (tm, tc) in term.terms {
                out.add_term(tm, tc);
            }
        }
        Ok(out)
    }

    /// Re-embed into a ring of `arity` variables, sending variable `i` to
    /// variable `mapping[i]`.
    pub fn remap(&self, arity: usize, mapping: &[usize]) -> SparsePolynomial {
        assert_eq!(mapping.len(), self.arity);
        let mut out = Self::zero(arity);
        for (m, c) in &self.terms {
            let mut e = vec![0u32; arity];
            for (v, &k) in m.exponents().iter().enumerate() {
                e[mapping[v]] += k;
            }
            out.add_term(Monomial::new(e), c.clone());
        }
        out
    }

    /// Float evaluation at a complex point, accumulating terms in graded-lex order.
    pub fn eval(&self, point: &[Complex64]) -> Result<Complex64> {
        if point.len() != self.arity {
            return Err(Error::ArityMismatch {
                left: self.arity,
                right: point.len(),
            });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut t = Complex64::new(rational_to_f64(c), 0.0);
            for (v, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    t *= point[v].powu(e);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Exact evaluation at a rational point.
    pub fn eval_rational(&self, point: &[BigRational]) -> Result<BigRational> {
        if point.len() != self.arity {
            return Err(Error::ArityMismatch {
                left: self.arity,
                right: point.len(),
            });
        }
        let mut acc = BigRational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, &e) in m.exponents().iter().enumerate() {
                if e > 0 {
                    t *= num_traits::pow(point[v].clone(), e as usize);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Serialize as `[[exponents], "num", "den"]` triples in graded-lex order.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms
                .iter()
                .map(|(m, c)| {
                    serde_json::json!([m.exponents(), c.numer().to_string(), c.denom().to_string()])
                })
                .collect(),
        )
    }

    /// Inverse of [`to_json`](Self::to_json). `arity` is required for the
    /// zero polynomial (an empty array); otherwise it is checked.
    pub fn from_json(value: &Value, arity: Option<usize>) -> Result<Self> {
        let items = value
            .as_array()
            .ok_or_else(|| Error::Parse("polynomial must be a JSON array".into()))?;
        let mut terms = Vec::with_capacity(items.len());
        for item in items {
            let triple = item
                .as_array()
                .filter(|t| t.len() == 3)
                .ok_or_else(|| Error::Parse(format!("bad term {item}")))?;
            let exps = triple[0]
                .as_array()
                .ok_or_else(|| Error::Parse(format!("bad exponent vector {}", triple[0])))?
                .iter()
                .map(|e| {
                    e.as_u64()
                        .and_then(|e| u32::try_from(e).ok())
                        .ok_or_else(|| Error::Parse(format!("bad exponent {e}")))
                })
                .collect::<Result<Vec<u32>>>()?;
            let num = parse_bigint(&triple[1])?;
            let den = parse_bigint(&triple[2])?;
            if den.is_zero() {
                return Err(Error::Parse("zero denominator".into()));
            }
            terms.push((exps, BigRational::new(num, den)));
        }
        let arity = match (arity, terms.first()) {
            (Some(a), Some((e, _))) if a != e.len() => {
                return Err(Error::ArityMismatch { left: a, right: e.len() })
            }
            (Some(a), _) => a,
            (None, Some((e, _))) => e.len(),
            (None, None) => return Err(Error::Parse("cannot infer arity of empty polynomial".into())),
        };
        Self::from_terms(arity, terms)
    }

    /// Human-readable form, highest graded-lex term first, e.g. `x^2-2*x*y+1/2`.
    pub fn display_with(&self, names: &[&str]) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, (m, c)) in self.terms.iter().rev().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            if negative {
                s.push('-');
            } else if i > 0 {
                s.push('+');
            }
            let mut factors: Vec<String> = Vec::new();
            for (v, &e) in m.exponents().iter().enumerate() {
                let name = names.get(v).map_or_else(|| format!("v{v}"), |n| n.to_string());
                match e {
                    0 => {}
                    1 => factors.push(name),
                    _ => factors.push(format!("{name}^{e}")),
                }
            }
            if factors.is_empty() || !abs.is_one() {
                factors.insert(0, abs.to_string());
            }
            let _ = write!(s, "{}", factors.join("*"));
        }
        s
    }
}

fn parse_bigint(v: &Value) -> Result<BigInt> {
    match v {
        Value::String(s) => s.parse().map_err(|_| Error::Parse(format!("bad integer {s:?}"))),
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| Error::Parse(format!("bad integer {n}"))),
        other => Err(Error::Parse(format!("bad integer {other}"))),
    }
}

/// Correctly rounded conversion (falls back to a ratio of floats for huge values).
pub fn rational_to_f64(c: &BigRational) -> f64 {
    c.to_f64().unwrap_or_else(|| {
        let n = c.numer().to_f64().unwrap_or(f64::NAN);
        let d = c.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

impl Add for &SparsePolynomial {
    type Output = SparsePolynomial;
    fn add(self, rhs: Self) -> SparsePolynomial {
        self.checked_add(rhs).expect("arity mismatch in polynomial addition")
    }
}

impl Sub for &SparsePolynomial {
    type Output = SparsePolynomial;
    fn sub(self, rhs: Self) -> SparsePolynomial {
        self.checked_sub(rhs).expect("arity mismatch in polynomial subtraction")
    }
}

impl Mul for &SparsePolynomial {
    type Output = SparsePolynomial;
    fn mul(self, rhs: Self) -> SparsePolynomial {
        self.checked_mul(rhs).expect("arity mismatch in polynomial multiplication")
    }
}

impl Neg for &SparsePolynomial {
    type Output = SparsePolynomial;
    fn neg(self) -> SparsePolynomial {
        SparsePolynomial {
            arity: self.arity,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }
}
