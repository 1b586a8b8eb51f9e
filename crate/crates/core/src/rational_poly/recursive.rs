//! Polynomials in one main variable with coefficients in Q[x], enough for
//! gcds and squarefree decomposition over Q(x) via primitive remainder
//! sequences.

use super::univariate::DensePoly;
use super::{BigRational, SparsePolynomial};
use crate::error::{Error, Result};

/// `coeffs[k]` is the Q[x] coefficient of `z^k`; no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyOverQx(Vec<DensePoly>);

impl PolyOverQx {
    pub fn new(mut coeffs: Vec<DensePoly>) -> Self {
        while coeffs.last().is_some_and(DensePoly::is_zero) {
            coeffs.pop();
        }
        PolyOverQx(coeffs)
    }

    /// Read a two-variable polynomial with `x` = var 0 and main variable = var 1.
    pub fn from_sparse(p: &SparsePolynomial) -> Result<Self> {
        if p.arity() != 2 {
            return Err(Error::ArityMismatch { left: 2, right: p.arity() });
        }
        let mut coeffs = Vec::new();
        for c in p.coefficients_in(1) {
            coeffs.push(DensePoly::from_sparse(&c, 0)?);
        }
        Ok(Self::new(coeffs))
    }

    pub fn to_sparse(&self) -> SparsePolynomial {
        let mut out = SparsePolynomial::zero(2);
        for (k, c) in self.0.iter().enumerate() {
            for (i, a) in c.coeffs().iter().enumerate() {
                out.add_term(super::Monomial::new(vec![i as u32, k as u32]), a.clone());
            }
        }
        out
    }

    pub fn coeffs(&self) -> &[DensePoly] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    fn leading(&self) -> &DensePoly {
        self.0.last().expect("nonzero polynomial")
    }

    /// Monic gcd in Q[x] of all coefficients.
    pub fn content(&self) -> DensePoly {
        self.0.iter().fold(DensePoly::zero(), |g, c| g.gcd(c))
    }

    /// Divide out the content and make the leading coefficient's leading
    /// rational coefficient equal to 1.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let content = self.content();
        let mut coeffs: Vec<DensePoly> = self.0.iter().map(|c| c.div_rem(&content).0).collect();
        let lc = coeffs.last().and_then(|c| c.leading().cloned()).expect("nonzero");
        let inv = lc.recip();
        for c in &mut coeffs {
            *c = c.scale(&inv);
        }
        Self::new(coeffs)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.scale(&BigRational::from_integer(k.into())))
                .collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::new(Vec::new());
        }
        let mut out = vec![DensePoly::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        Self::new(out)
    }

    fn pseudo_rem(&self, divisor: &Self) -> Self {
        let dd = divisor.degree().expect("nonzero divisor");
        let lc = divisor.leading().clone();
        let mut rem = self.0.clone();
        while rem.len() > dd && !rem.is_empty() {
            let top = rem.len() - 1;
            let t = rem[top].clone();
            let shift = top - dd;
            for c in rem.iter_mut() {
                *c = c.mul(&lc);
            }
            for (j, d) in divisor.0.iter().enumerate() {
                rem[shift + j] = rem[shift + j].sub(&t.mul(d));
            }
            rem.pop();
            while rem.last().is_some_and(DensePoly::is_zero) {
                rem.pop();
            }
        }
        Self::new(rem)
    }

    /// Primitive gcd over Q(x) (normalized by [`primitive_part`](Self::primitive_part)).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.primitive_part(), other.primitive_part());
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b);
            a = b;
            b = r.primitive_part();
        }
        a.primitive_part()
    }

    /// Exact division in Q[x][z]; `None` if `divisor` does not divide `self`.
    pub fn exact_div(&self, divisor: &Self) -> Option<Self> {
        let dd = divisor.degree()?;
        let lc = divisor.leading();
        let mut rem = self.0.clone();
        if rem.len() <= dd {
            return rem.iter().all(DensePoly::is_zero).then(|| Self::new(Vec::new()));
        }
        let mut quot = vec![DensePoly::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let (q, r) = rem[k + dd].div_rem(lc);
            if !r.is_zero() {
                return None;
            }
            for (j, d) in divisor.0.iter().enumerate() {
                rem[k + j] = rem[k + j].sub(&q.mul(d));
            }
            quot[k] = q;
        }
        rem.iter().all(DensePoly::is_zero).then(|| Self::new(quot))
    }

    /// Yun's squarefree decomposition over Q(x): returns `(factor, multiplicity)`
    /// pairs with primitive, pairwise coprime factors of positive degree.
    pub fn squarefree_decomposition(&self) -> Vec<(Self, usize)> {
        let f = self.primitive_part();
        if f.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let df = f.derivative();
        let a = f.gcd(&df);
        // b and c must share one scale, so both are divided by the same gcd
        // and never renormalized separately.
        let mut b = f.exact_div(&a).expect("gcd divides f");
        let mut c = df.exact_div(&a).expect("gcd divides f'");
        let mut out = Vec::new();
        let mut k = 1;
        while b.degree().unwrap_or(0) > 0 {
            let d = c.sub(&b.derivative());
            let g = b.gcd(&d);
            if g.degree().unwrap_or(0) > 0 {
                out.push((g.clone(), k));
            }
            b = b.exact_div(&g).expect("gcd divides b");
            c = d.exact_div(&g).expect("gcd divides d");
            k += 1;
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        let zero = DensePoly::zero();
        Self::new(
            (0..n)
                .map(|i| self.0.get(i).unwrap_or(&zero).sub(other.0.get(i).unwrap_or(&zero)))
                .collect(),
        )
    }

    pub fn eval_at(&self, x: &BigRational) -> DensePoly {
        DensePoly::new(self.0.iter().map(|c| c.eval(x)).collect())
    }
}
