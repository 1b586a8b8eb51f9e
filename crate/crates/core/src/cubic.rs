//! Plane cubics: the S, T, J pipeline, the six Legendre parameters in a
//! J-fibre, the degree -1 prefactor and the assembled period branches.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::aronhold::{eval_stj, CUBIC_EXPONENTS};
use crate::complex_json;
use crate::double_cover::BranchedValue;
use crate::error::{Error, Result};
use crate::hyperseries::{gauss_2f1_half, SeriesConfig};

/// Ten complex coefficients in the order z111, z112, ..., z333.
#[derive(Clone, Debug, PartialEq)]
pub struct TernaryCubic {
    coefficients: [Complex64; 10],
}

pub type Matrix3 = [[Complex64; 3]; 3];

impl TernaryCubic {
    pub fn new(coefficients: [Complex64; 10]) -> Result<Self> {
        if coefficients.iter().all(|c| *c == Complex64::new(0.0, 0.0)) {
            return Err(Error::InvalidArgument("cubic has all coefficients zero".into()));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("cubic has non-finite coefficients".into()));
        }
        Ok(TernaryCubic { coefficients })
    }

    /// `x1^3 - (1+l) x1^2 x3 + l x1 x3^2 - x2^2 x3`.
    pub fn legendre(lambda: Complex64) -> Self {
        let one = Complex64::new(1.0, 0.0);
        let mut c = [Complex64::new(0.0, 0.0); 10];
        c[0] = one;
        c[2] = -(lambda + one);
        c[5] = lambda;
        c[7] = -one;
        TernaryCubic { coefficients: c }
    }

    pub fn coefficients(&self) -> &[Complex64; 10] {
        &self.coefficients
    }

    pub fn scale(&self, k: Complex64) -> Self {
        TernaryCubic {
            coefficients: self.coefficients.map(|c| c * k),
        }
    }

    /// Coefficients of `x -> sigma(A x)`.
    pub fn substitute_linear(&self, a: &Matrix3) -> Self {
        let mut out = [Complex64::new(0.0, 0.0); 10];
        for (m, e) in CUBIC_EXPONENTS.iter().enumerate() {
            let z = self.coefficients[m];
            if z == Complex64::new(0.0, 0.0) {
                continue;
            }
            // Expand prod_i (sum_j a_ij x_j)^{e_i} as a dense cubic form.
            let mut form: Vec<([u32; 3], Complex64)> = vec![([0, 0, 0], z)];
            for (i, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    let mut next = Vec::with_capacity(form.len() * 3);
                    for (ex, c) in &form {
                        for j in 0..3 {
                            let mut ex2 = *ex;
                            ex2[j] += 1;
                            next.push((ex2, c * a[i][j]));
                        }
                    }
                    form = next;
                }
            }
            for (ex, c) in form {
                let idx = CUBIC_EXPONENTS.iter().position(|&x| x == ex).expect("cubic monomial");
                out[idx] += c;
            }
        }
        TernaryCubic { coefficients: out }
    }

    /// Transport under `x -> g^{-1} x`, i.e. the cubic `sigma(g^{-1} x)`.
    pub fn act(&self, g: &Matrix3) -> Result<Self> {
        Ok(self.substitute_linear(&invert3(g)?))
    }

    pub fn to_json(&self) -> Value {
        json!({ "coefficients": self.coefficients.iter().map(|c| [c.re, c.im]).collect::<Vec<_>>() })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let arr = v
            .get("coefficients")
            .and_then(Value::as_array)
            .filter(|a| a.len() == 10)
            .ok_or_else(|| Error::Parse("expected {\"coefficients\": [[re, im] x 10]}".into()))?;
        let mut c = [Complex64::new(0.0, 0.0); 10];
        for (slot, item) in c.iter_mut().zip(arr) {
            *slot = crate::parse_complex(item)?;
        }
        Self::new(c)
    }
}

pub fn det3(a: &Matrix3) -> Complex64 {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

pub fn invert3(a: &Matrix3) -> Result<Matrix3> {
    let d = det3(a);
    if d.norm() < 1e-300 {
        return Err(Error::InvalidArgument("singular 3x3 matrix".into()));
    }
    let mut inv = [[Complex64::new(0.0, 0.0); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
            let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
            inv[i][j] = (a[r0][c0] * a[r1][c1] - a[r0][c1] * a[r1][c0]) / d;
        }
    }
    Ok(inv)
}

/// Roots of the monic cubic `t^3 + b t^2 + c t + d` by Cardano's formula; root
/// `k` uses the `k`-th cube root of the principal one. Each root gets a few
/// Newton steps where the derivative is not tiny.
pub fn cardano(b: Complex64, c: Complex64, d: Complex64) -> [Complex64; 3] {
    let p = c - b * b / 3.0;
    let q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
    let disc = (q * q / 4.0 + p * p * p / 27.0).sqrt();
    let (plus, minus) = (-q / 2.0 + disc, -q / 2.0 - disc);
    let u3 = if plus.norm() >= minus.norm() { plus } else { minus };
    let shift = -b / 3.0;
    let omega = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0);
    let f = |t: Complex64| ((t + b) * t + c) * t + d;
    let df = |t: Complex64| (3.0 * t + 2.0 * b) * t + c;
    let mut roots = [shift; 3];
    if u3.norm() > 0.0 {
        let u0 = u3.cbrt();
        let mut u = u0;
        for root in roots.iter_mut() {
            *root = u - p / (3.0 * u) + shift;
            u *= omega;
        }
    }
    let scale = 1.0 + b.norm() + c.norm() + d.norm();
    for root in roots.iter_mut() {
        for _ in 0..3 {
            let slope = df(*root);
            if slope.norm() <= 1e-6 * scale * (1.0 + root.norm()).powi(2) {
                break;
            }
            let step = f(*root) / slope;
            if !step.is_finite() {
                break;
            }
            *root -= step;
        }
    }
    roots
}

/// `l^6 - 3 l^5 + (27J+6) l^4 - (54J+7) l^3 + (27J+6) l^2 - 3 l + 1` and the
/// sum of the moduli of its terms, for relative residuals.
pub fn sextic(lambda: Complex64, j: Complex64) -> (Complex64, f64) {
    let coeffs = [
        Complex64::new(1.0, 0.0),
        Complex64::new(-3.0, 0.0),
        27.0 * j + 6.0,
        -(54.0 * j + 7.0),
        27.0 * j + 6.0,
        Complex64::new(-3.0, 0.0),
        Complex64::new(1.0, 0.0),
    ];
    let mut value = Complex64::new(0.0, 0.0);
    let mut scale = 0.0;
    for (k, a) in coeffs.iter().enumerate() {
        let pw = lambda.powu(6 - k as u32);
        value += a * pw;
        scale += a.norm() * pw.norm();
    }
    (value, scale)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LambdaBranch {
    pub lambda: Complex64,
    /// `l (l - 1)`.
    pub alpha: Complex64,
    pub cube_branch: usize,
    /// `+1` or `-1` in `l = (1 +- sqrt(1 + 4 alpha)) / 2`.
    pub sign: i8,
}

/// Distinct Legendre parameters with the given `J`, ordered by cube-root
/// branch then sign.
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaBranchSet {
    pub j: Complex64,
    pub branches: Vec<LambdaBranch>,
}

impl LambdaBranchSet {
    pub fn lambdas(&self) -> Vec<Complex64> {
        self.branches.iter().map(|b| b.lambda).collect()
    }

    /// Distance from `z` to the nearest member.
    pub fn distance_to(&self, z: Complex64) -> f64 {
        self.branches.iter().map(|b| (b.lambda - z).norm()).fold(f64::INFINITY, f64::min)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "J": complex_json(self.j),
            "branches": self.branches.iter().map(|b| json!({
                "lambda": complex_json(b.lambda),
                "alpha": complex_json(b.alpha),
                "cube_branch": b.cube_branch,
                "sign": b.sign,
            })).collect::<Vec<_>>(),
        })
    }
}

const COLLISION_TOL: f64 = 1e-12;
const DEDUP_TOL: f64 = 1e-10;
const SEXTIC_TOL: f64 = 1e-9;

/// Solve `J = (alpha+1)^3 / (-27 alpha^2)` for `alpha = l(l-1)` and then the
/// quadratic for `l`. At `4J + 1 = 0` the repeated roots are merged.
pub fn lambda_branches(j: Complex64) -> Result<LambdaBranchSet> {
    if !j.is_finite() {
        return Err(Error::InvalidArgument("J must be finite".into()));
    }
    if j.norm() <= COLLISION_TOL {
        return Err(Error::BranchCollision { re: j.re, im: j.im });
    }
    let one = Complex64::new(1.0, 0.0);
    let alphas = cardano(3.0 + 27.0 * j, Complex64::new(3.0, 0.0), one);
    let mut branches: Vec<LambdaBranch> = Vec::with_capacity(6);
    for (k, alpha) in alphas.into_iter().enumerate() {
        let r = (one + 4.0 * alpha).sqrt();
        for sign in [1i8, -1] {
            let lambda = (one + f64::from(sign) * r) / 2.0;
            if branches.iter().any(|b| (b.lambda - lambda).norm() <= DEDUP_TOL * (1.0 + lambda.norm())) {
                continue;
            }
            let (res, scale) = sextic(lambda, j);
            if res.norm() > SEXTIC_TOL * scale {
                return Err(Error::RadicalInconsistency(format!(
                    "lambda {lambda} misses the sextic by {:.3e}",
                    res.norm() / scale
                )));
            }
            branches.push(LambdaBranch {
                lambda,
                alpha,
                cube_branch: k,
                sign,
            });
        }
    }
    Ok(LambdaBranchSet { j, branches })
}

/// `D P^12 + 27 S^2 P^8 - 54 S P^4 + 27` with `D = T^2 - 4 S^3`, divided by the
/// sum of the moduli of its terms.
pub fn prefactor_relation_residual(s: Complex64, t: Complex64, p: Complex64) -> f64 {
    let d = t * t - 4.0 * s * s * s;
    let p4 = p.powu(4);
    let terms = [d * p4.powu(3), 27.0 * s * s * p4 * p4, -54.0 * s * p4, Complex64::new(27.0, 0.0)];
    let sum: Complex64 = terms.iter().sum();
    sum.norm() / terms.iter().map(|z| z.norm()).sum::<f64>()
}

const RELATION_TOL: f64 = 1e-8;

/// Prefactor candidates: `u = P^{-4}` solves `u (u - S)^2 = -D/27`, and each
/// of its three roots gives the principal fourth root `P = u^{-1/4}`.
pub fn prefactor_branches(s: Complex64, t: Complex64) -> Result<Vec<BranchedValue>> {
    let d = t * t - 4.0 * s * s * s;
    if d.norm() <= 1e-12 * (t.norm_sqr() + 4.0 * s.norm().powi(3)) || !d.is_finite() {
        return Err(Error::DegenerateDiscriminant(d.norm()));
    }
    let us = cardano(-2.0 * s, s * s, d / 27.0);
    let mut out = Vec::new();
    for (k, u) in us.into_iter().enumerate() {
        let p = u.inv().powf(0.25);
        if !p.is_finite() || prefactor_relation_residual(s, t, p) > RELATION_TOL {
            continue;
        }
        let mut log = BTreeMap::new();
        log.insert("prefactor_cbrt".to_string(), k as i64);
        log.insert("prefactor_quartic".to_string(), 0);
        out.push(BranchedValue::exact(p, log));
    }
    if out.is_empty() {
        return Err(Error::RadicalInconsistency("no prefactor candidate satisfies the degree-12 relation".into()));
    }
    Ok(out)
}

/// One branch of the cubic period.
#[derive(Clone, Debug, PartialEq)]
pub struct CubicPeriodBranch {
    pub lambda: Complex64,
    pub prefactor: Complex64,
    pub period: BranchedValue,
}

impl CubicPeriodBranch {
    pub fn to_json(&self) -> Value {
        json!({
            "lambda": complex_json(self.lambda),
            "prefactor": complex_json(self.prefactor),
            "value": complex_json(self.period.value),
            "tail_bound": self.period.tail_bound,
            "branch_log": self.period.branch_log,
        })
    }
}

/// For each Legendre parameter inside the series domain, the prefactor
/// candidate with `P^4 = (l^2 - l + 1) / S` times `2F1(1/2, 1/2; 1; l)`.
pub fn cubic_period(c: &TernaryCubic, cfg: &SeriesConfig) -> Result<Vec<CubicPeriodBranch>> {
    let (s, t, j) = eval_stj(c)?;
    let set = lambda_branches(j)?;
    let candidates = prefactor_branches(s, t)?;
    let one = Complex64::new(1.0, 0.0);
    let mut out = Vec::new();
    for b in &set.branches {
        if b.lambda.norm() >= cfg.domain_radius {
            continue;
        }
        let target = (b.lambda * b.lambda - b.lambda + one) / s;
        let best = candidates
            .iter()
            .min_by(|x, y| {
                let dx = (x.value.powu(4) - target).norm();
                let dy = (y.value.powu(4) - target).norm();
                dx.total_cmp(&dy)
            })
            .expect("at least one candidate");
        let mismatch = (best.value.powu(4) - target).norm() / target.norm();
        if mismatch > 1e-6 {
            return Err(Error::RadicalInconsistency(format!(
                "no prefactor candidate pairs with lambda {} (closest relative gap {mismatch:.3e})",
                b.lambda
            )));
        }
        let series = gauss_2f1_half(b.lambda, cfg)?;
        let mut log = best.branch_log.clone();
        log.insert("lambda_cbrt".to_string(), b.cube_branch as i64);
        log.insert("lambda_sign".to_string(), i64::from(b.sign));
        out.push(CubicPeriodBranch {
            lambda: b.lambda,
            prefactor: best.value,
            period: BranchedValue {
                value: best.value * series.value,
                branch_log: log,
                tail_bound: best.value.norm() * series.tail_bound,
            },
        });
    }
    if out.is_empty() {
        return Err(Error::NoBranchInDomain);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn cardano_recovers_known_roots() {
        // (t-1)(t-2)(t+3) = t^3 - 7t + 6
        let mut r: Vec<f64> = cardano(c(0.0, 0.0), c(-7.0, 0.0), c(6.0, 0.0)).iter().map(|z| z.re).collect();
        r.sort_by(f64::total_cmp);
        for (a, b) in r.iter().zip([-3.0, 1.0, 2.0]) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn orbit_of_minus_one() {
        let set = lambda_branches(c(-0.25, 0.0)).unwrap();
        for target in [-1.0, 2.0, 0.5] {
            assert!(set.distance_to(c(target, 0.0)) < 1e-9, "{target}: {:?}", set.lambdas());
        }
        assert_eq!(set.branches.len(), 3);
    }

    #[test]
    fn round_trip_and_closure() {
        let l0 = c(0.3, 0.0);
        let (_, _, j) = eval_stj(&TernaryCubic::legendre(l0)).unwrap();
        let set = lambda_branches(j).unwrap();
        assert_eq!(set.branches.len(), 6);
        assert!(set.distance_to(l0) < 1e-9);
        for l in set.lambdas() {
            assert!(set.distance_to(1.0 - l) < 1e-8);
            assert!(set.distance_to(l.inv()) < 1e-8);
        }
    }

    #[test]
    fn zero_j_collides() {
        assert!(matches!(lambda_branches(c(0.0, 0.0)), Err(Error::BranchCollision { .. })));
    }

    #[test]
    fn legendre_prefactors() {
        let l = c(0.3, 0.0);
        let cubic = TernaryCubic::legendre(l);
        let (s, t, _) = eval_stj(&cubic).unwrap();
        let ps = prefactor_branches(s, t).unwrap();
        assert_eq!(ps.len(), 3);
        // P^{-4} runs over 1, l^2 and (1-l)^2 on the Legendre line.
        for target in [c(1.0, 0.0), l * l, (1.0 - l) * (1.0 - l)] {
            assert!(ps.iter().any(|p| (p.value.powu(4).inv() - target).norm() < 1e-10));
        }
    }

    #[test]
    fn prefactor_homogeneity() {
        let cubic = TernaryCubic::legendre(c(0.2, 0.1));
        let k: f64 = 1.7;
        let (s, t, _) = eval_stj(&cubic).unwrap();
        let a = prefactor_branches(s, t).unwrap();
        let b = prefactor_branches(s * k.powi(4), t * k.powi(6)).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((y.value * k - x.value).norm() < 1e-12);
        }
    }

    #[test]
    fn legendre_period_contains_the_series() {
        let cubic = TernaryCubic::legendre(c(0.2, 0.0));
        let branches = cubic_period(&cubic, &SeriesConfig::default()).unwrap();
        let f = gauss_2f1_half(c(0.2, 0.0), &SeriesConfig::default()).unwrap().value;
        let hit = branches.iter().find(|b| (b.lambda - c(0.2, 0.0)).norm() < 1e-9).unwrap();
        assert!((hit.period.value - f).norm() < 1e-12);
    }

    #[test]
    fn transport_inverts() {
        let g = [[c(1.0, 0.2), c(0.1, 0.0), c(0.0, -0.3)], [c(0.2, 0.0), c(0.9, 0.0), c(0.1, 0.1)], [c(0.0, 0.0), c(-0.2, 0.0), c(1.1, 0.0)]];
        let cubic = TernaryCubic::legendre(c(0.3, 0.0));
        let back = cubic.act(&g).unwrap().substitute_linear(&g);
        for (a, b) in back.coefficients().iter().zip(cubic.coefficients()) {
            assert!((a - b).norm() < 1e-13);
        }
    }
}
