//! Membership of an algebraic element in the positive closure of Q[x].
//!
//! Over a one-dimensional base the geometric criterion reduces to a gcd
//! test on the coefficients of the minimal polynomial.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::rational_poly::dense_squarefree;
use crate::rational_poly::{rational_to_f64, resultant, BigRational, DensePoly, PolyOverQx, SparsePolynomial};

/// Variable names used for display: `x` is the base variable, `y` the fibre.
pub const NAMES: [&str; 2] = ["x", "y"];

/// A root of `m(x, y) = r_k(x) y^k + ... + r_0(x)`.
///
/// `root_index` selects an embedding: at any sample point `x0` the element is
/// the `root_index`-th root of `m(x0, y)` in ascending `(re, im)` order.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraicElement {
    minimal_polynomial: SparsePolynomial,
    root_index: usize,
}

impl AlgebraicElement {
    /// Normalizes `m` to its primitive part in Q[x][y].
    pub fn new(m: SparsePolynomial, root_index: usize) -> Result<Self> {
        if m.arity() != 2 {
            return Err(Error::UnsupportedBaseRing(format!(
                "expected a polynomial in (x, y), got {} variables",
                m.arity()
            )));
        }
        let p = PolyOverQx::from_sparse(&m)?;
        let k = p
            .degree()
            .filter(|&k| k >= 1)
            .ok_or_else(|| Error::InvalidArgument("minimal polynomial must have positive degree in y".into()))?;
        if root_index >= k {
            return Err(Error::InvalidArgument(format!("root index {root_index} out of range for degree {k}")));
        }
        Ok(AlgebraicElement {
            minimal_polynomial: p.primitive_part().to_sparse(),
            root_index,
        })
    }

    pub fn minimal_polynomial(&self) -> &SparsePolynomial {
        &self.minimal_polynomial
    }

    pub fn root_index(&self) -> usize {
        self.root_index
    }

    /// `[r_0, ..., r_k]` as polynomials in `x`.
    pub fn coefficients(&self) -> Vec<DensePoly> {
        PolyOverQx::from_sparse(&self.minimal_polynomial)
            .expect("arity checked on construction")
            .coeffs()
            .to_vec()
    }

    pub fn display(&self) -> String {
        self.minimal_polynomial.display_with(&NAMES)
    }

    /// Value of the element at the rational point `x0`.
    pub fn value_at(&self, x0: &BigRational) -> Result<Complex64> {
        let roots = sorted_roots(&PolyOverQx::from_sparse(&self.minimal_polynomial)?.eval_at(x0))?;
        roots
            .get(self.root_index)
            .copied()
            .ok_or_else(|| Error::InvalidArgument(format!("leading coefficient vanishes at x = {x0}")))
    }

    /// Reads `{"minimal_polynomial": <poly JSON>, "root_index": k}` or a bare
    /// polynomial (root index 0).
    pub fn from_json(v: &Value) -> Result<Self> {
        let (poly, idx) = match v.get("minimal_polynomial") {
            Some(p) => (p, v.get("root_index").and_then(Value::as_u64).unwrap_or(0) as usize),
            None => (v, 0),
        };
        let m = SparsePolynomial::from_json(poly, None)?;
        Self::new(m, idx)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "minimal_polynomial": self.minimal_polynomial.to_json(),
            "display": self.display(),
            "root_index": self.root_index,
        })
    }
}

fn x_poly(d: &DensePoly) -> String {
    d.to_sparse(1, 0).display_with(&["x"])
}

#[derive(Clone, Debug, PartialEq)]
pub struct PcVerdict {
    pub positively_closed: bool,
    /// `gcd(r_k, ..., r_1)`, monic.
    pub g: DensePoly,
    /// Squarefree part of `g`.
    pub radical: DensePoly,
    /// Product of the irreducible factors of `g` not dividing `r_0`, monic;
    /// `None` when the element is positively closed.
    pub certificate: Option<DensePoly>,
}

impl PcVerdict {
    pub fn certificate_string(&self) -> Option<String> {
        self.certificate.as_ref().map(x_poly)
    }

    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "positively_closed": self.positively_closed,
            "certificate": self.certificate_string(),
        });
        if self.positively_closed {
            v["chain"] = json!({
                "gcd_of_higher_coefficients": x_poly(&self.g),
                "radical": x_poly(&self.radical),
                "radical_divides_constant_coefficient": true,
            });
        }
        v
    }
}

/// The element lies in the positive closure iff the radical of
/// `gcd(r_k, ..., r_1)` divides `r_0`.
pub fn is_positively_closed(s: &AlgebraicElement) -> Result<PcVerdict> {
    let coeffs = s.coefficients();
    let g = coeffs[1..].iter().fold(DensePoly::zero(), |acc, c| acc.gcd(c));
    let radical = dense_squarefree(&g);
    let r0 = &coeffs[0];
    if radical.divides(r0) {
        return Ok(PcVerdict {
            positively_closed: true,
            g,
            radical,
            certificate: None,
        });
    }
    let shared = radical.gcd(r0);
    let d = radical.div_rem(&shared).0.monic();
    Ok(PcVerdict {
        positively_closed: false,
        g,
        radical,
        certificate: Some(d),
    })
}

/// Roots of a univariate polynomial with rational coefficients by the
/// Aberth iteration, in ascending `(re, im)` order.
pub fn sorted_roots(p: &DensePoly) -> Result<Vec<Complex64>> {
    let c: Vec<Complex64> = p.coeffs().iter().map(|a| Complex64::new(rational_to_f64(a), 0.0)).collect();
    let mut roots = aberth(&c)?;
    roots.sort_by(|a, b| {
        if (a.re - b.re).abs() <= 1e-9 * (1.0 + a.re.abs()) {
            a.im.total_cmp(&b.im)
        } else {
            a.re.total_cmp(&b.re)
        }
    });
    Ok(roots)
}

fn horner(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::zero();
    let mut dp = Complex64::zero();
    for a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

fn aberth(c: &[Complex64]) -> Result<Vec<Complex64>> {
    let deg = c.len().saturating_sub(1);
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = c[deg];
    let c: Vec<Complex64> = c.iter().map(|a| a / lead).collect();
    // Cauchy bound for the starting circle.
    let radius = 1.0 + c[..deg].iter().map(|a| a.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| Complex64::from_polar(radius, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / deg as f64))
        .collect();
    for _ in 0..500 {
        let mut moved: f64 = 0.0;
        for i in 0..deg {
            let (p, dp) = horner(&c, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..deg).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[i] -= step;
                moved = moved.max(step.norm() / (1.0 + z[i].norm()));
            }
        }
        if moved < 1e-15 {
            return Ok(z);
        }
    }
    // Multiple roots converge only linearly; accept if residuals are small.
    let scale: f64 = c.iter().map(|a| a.norm()).sum();
    if z.iter().all(|&r| horner(&c, r).0.norm() <= 1e-8 * scale * (1.0 + r.norm()).powi(deg as i32)) {
        Ok(z)
    } else {
        Err(Error::NonConvergence("root finder did not settle".into()))
    }
}

const SAMPLE_SEED: u64 = 0x5eed_0f_5a3;
const MATCH_TOL: f64 = 1e-8;

fn sample_points(avoid: &[DensePoly]) -> Vec<BigRational> {
    let mut rng = ChaCha8Rng::seed_from_u64(SAMPLE_SEED);
    let mut out = Vec::new();
    while out.len() < 3 {
        let x = BigRational::new(BigInt::from(rng.gen_range(-40i64..=40)), BigInt::from(rng.gen_range(1i64..=9)));
        if out.contains(&x) || avoid.iter().any(|p| p.eval(&x).is_zero()) {
            continue;
        }
        out.push(x);
    }
    out
}

fn vanishes_at(f: &PolyOverQx, x0: &BigRational, z: Complex64) -> bool {
    let c = f.eval_at(x0);
    let mut value = Complex64::zero();
    let mut scale = 0.0;
    for (k, a) in c.coeffs().iter().enumerate() {
        let t = z.powu(k as u32) * rational_to_f64(a);
        value += t;
        scale += t.norm();
    }
    value.norm() <= MATCH_TOL * scale.max(1e-300)
}

/// Minimal polynomial in `(x, z)` of `a + b`, written back in the variables
/// `(x, y)`. Candidates are the squarefree factors of
/// `Res_y(m_a(y), m_b(z - y))` over Q(x); the one vanishing at the intended sum
/// at three seeded rational points is kept.
pub fn minpoly_of_sum(a: &AlgebraicElement, b: &AlgebraicElement) -> Result<AlgebraicElement> {
    // Ring (x, y, z): m_a(x, y) and m_b(x, z - y).
    let ma = a.minimal_polynomial.remap(3, &[0, 1]);
    let x = SparsePolynomial::var(3, 0);
    let y = SparsePolynomial::var(3, 1);
    let z = SparsePolynomial::var(3, 2);
    let mb = b.minimal_polynomial.substitute(&[x, &z - &y])?;
    let res = resultant(&ma, &mb, 1)?;
    if res.is_zero() {
        return Err(Error::InvalidArgument("resultant vanishes identically".into()));
    }
    let res_xz = PolyOverQx::from_sparse(&res.remap(2, &[0, 1, 1]))?;
    let factors: Vec<PolyOverQx> = res_xz.squarefree_decomposition().into_iter().map(|(f, _)| f).collect();
    let mut avoid = a.coefficients().last().cloned().into_iter().collect::<Vec<_>>();
    avoid.extend(b.coefficients().last().cloned());
    avoid.extend(factors.iter().filter_map(|f| f.coeffs().last().cloned()));
    let points = sample_points(&avoid);
    let mut sums = Vec::with_capacity(points.len());
    for p in &points {
        sums.push(a.value_at(p)? + b.value_at(p)?);
    }
    let matching: Vec<&PolyOverQx> = factors
        .iter()
        .filter(|f| points.iter().zip(&sums).all(|(p, s)| vanishes_at(f, p, *s)))
        .collect();
    match matching.as_slice() {
        [f] => {
            let m = f.to_sparse();
            let roots = sorted_roots(&f.eval_at(&points[0]))?;
            let idx = roots
                .iter()
                .enumerate()
                .min_by(|(_, r), (_, s)| (*r - sums[0]).norm().total_cmp(&(*s - sums[0]).norm()))
                .map(|(i, _)| i)
                .unwrap_or(0);
            AlgebraicElement::new(m, idx)
        }
        [] => Err(Error::AmbiguousFactor(factors.iter().map(|f| f.to_sparse().display_with(&NAMES)).collect())),
        many => Err(Error::AmbiguousFactor(many.iter().map(|f| f.to_sparse().display_with(&NAMES)).collect())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn elem(terms: &[(&[u32], i64)], idx: usize) -> AlgebraicElement {
        AlgebraicElement::new(SparsePolynomial::from_int_terms(2, terms), idx).unwrap()
    }

    fn quadratic(idx: usize) -> AlgebraicElement {
        // (x+1) y^2 - x y + 1
        elem(&[(&[1, 2], 1), (&[0, 2], 1), (&[1, 1], -1), (&[0, 0], 1)], idx)
    }

    #[test]
    fn fixtures() {
        assert!(is_positively_closed(&quadratic(0)).unwrap().positively_closed);
        let sum = elem(&[(&[1, 1], 1), (&[0, 1], 1), (&[1, 0], -1)], 0);
        let v = is_positively_closed(&sum).unwrap();
        assert!(!v.positively_closed);
        assert_eq!(v.certificate_string().as_deref(), Some("x+1"));
        assert!(is_positively_closed(&elem(&[(&[0, 2], 1), (&[1, 0], -1)], 0)).unwrap().positively_closed);
    }

    #[test]
    fn verdict_ignores_rational_rescaling() {
        let a = elem(&[(&[1, 1], 3), (&[0, 1], 3), (&[1, 0], -3)], 0);
        let b = elem(&[(&[1, 1], -1), (&[0, 1], -1), (&[1, 0], 1)], 0);
        assert_eq!(a, b);
    }

    #[test]
    fn conjugate_sum_is_not_positively_closed() {
        let m = minpoly_of_sum(&quadratic(0), &quadratic(1)).unwrap();
        let expected = elem(&[(&[1, 1], 1), (&[0, 1], 1), (&[1, 0], -1)], 0);
        assert_eq!(m.minimal_polynomial(), expected.minimal_polynomial());
        let v = is_positively_closed(&m).unwrap();
        assert!(!v.positively_closed);
        assert_eq!(v.certificate_string().as_deref(), Some("x+1"));
    }

    #[test]
    fn explicit_sum() {
        let a = elem(&[(&[0, 1], 1), (&[0, 0], -1)], 0);
        let b = elem(&[(&[0, 1], 1), (&[1, 0], -1)], 0);
        let expected = elem(&[(&[0, 1], 1), (&[1, 0], -1), (&[0, 0], -1)], 0);
        assert_eq!(minpoly_of_sum(&a, &b).unwrap(), expected);
    }

    #[test]
    fn doubled_square_root() {
        let r = elem(&[(&[0, 2], 1), (&[1, 0], -1)], 1);
        let expected = elem(&[(&[0, 2], 1), (&[1, 0], -4)], 0);
        assert_eq!(minpoly_of_sum(&r, &r).unwrap().minimal_polynomial(), expected.minimal_polynomial());
    }

    #[test]
    fn multivariate_base_is_rejected() {
        let m = SparsePolynomial::from_int_terms(3, &[(&[0, 0, 1], 1), (&[1, 1, 0], -1)]);
        assert!(matches!(AlgebraicElement::new(m, 0), Err(Error::UnsupportedBaseRing(_))));
    }

    #[test]
    fn roots_of_cubic() {
        let r = sorted_roots(&DensePoly::from_ints(&[-6, 11, -6, 1])).unwrap();
        for (a, b) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
