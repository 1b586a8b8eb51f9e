//! Independent numerical checks: AGM, a tanh-sinh elliptic integral,
//! finite-difference residuals of the tautological operators and randomized
//! group probes. Nothing here calls into the series or minor code.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::grassmann::ParameterMatrix;

/// Arithmetic-geometric mean with the square root chosen closer to the
/// arithmetic mean. Also returns `|a_k - b_k|` after each step.
pub fn agm_trace(a: Complex64, b: Complex64) -> Result<(Complex64, Vec<f64>)> {
    if a.norm() == 0.0 || b.norm() == 0.0 {
        return Err(Error::InvalidArgument("agm needs nonzero arguments".into()));
    }
    let (mut a, mut b) = (a, b);
    let mut gaps = Vec::new();
    for _ in 0..64 {
        let gap = (a - b).norm();
        gaps.push(gap);
        if gap <= 1e-15 * a.norm() {
            return Ok((a, gaps));
        }
        let m = (a + b) / 2.0;
        let mut g = (a * b).sqrt();
        if (m - g).norm() > (m + g).norm() {
            g = -g;
        }
        a = m;
        b = g;
    }
    Err(Error::NonConvergence("agm did not settle within 64 iterations".into()))
}

pub fn agm(a: Complex64, b: Complex64) -> Result<Complex64> {
    agm_trace(a, b).map(|(m, _)| m)
}

/// `2F1(1/2, 1/2; 1; l) = 1 / agm(1, sqrt(1 - l))`.
pub fn gauss_2f1_agm(lambda: Complex64) -> Result<Complex64> {
    Ok(agm(Complex64::new(1.0, 0.0), (1.0 - lambda).sqrt())?.inv())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub error_estimate: f64,
    pub node_count: usize,
}

/// Tanh-sinh sum at step `2^-level` for `int_0^l dx / sqrt(x (1-x) (l-x))`,
/// with the distances to both endpoints computed directly.
fn tanh_sinh_level(lambda: f64, level: u32) -> (f64, usize) {
    let h = 0.5f64.powi(level as i32);
    let mut sum = 0.0;
    let mut nodes = 0;
    let mut k: i64 = 0;
    loop {
        let t = k as f64 * h;
        let u = PI / 2.0 * t.sinh();
        if u > 700.0 {
            break;
        }
        let cosh_u = u.cosh();
        let w = PI / 2.0 * t.cosh() / (cosh_u * cosh_u);
        let mut contribution = 0.0;
        for s in if k == 0 { &[1.0][..] } else { &[1.0, -1.0][..] } {
            let us = s * u;
            let left = lambda / (1.0 + (-2.0 * us).exp());
            let right = lambda / (1.0 + (2.0 * us).exp());
            if left <= 0.0 || right <= 0.0 {
                continue;
            }
            let f = 1.0 / (left * (1.0 - left) * right).sqrt();
            contribution += lambda / 2.0 * w * f;
            nodes += 1;
        }
        sum += contribution;
        if k > 0 && contribution.abs() < 1e-18 * sum.abs() {
            break;
        }
        k += 1;
    }
    (h * sum, nodes)
}

/// Quadrature up to a fixed level; the error estimate is the change from the
/// previous level.
pub fn legendre_period_quadrature_at(lambda: f64, level: u32) -> Result<QuadratureResult> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::InvalidArgument(format!("lambda must lie in (0, 1), got {lambda}")));
    }
    let (prev, _) = tanh_sinh_level(lambda, level.saturating_sub(1));
    let (value, node_count) = tanh_sinh_level(lambda, level);
    Ok(QuadratureResult {
        value: Complex64::new(value, 0.0),
        error_estimate: (value - prev).abs(),
        node_count,
    })
}

/// Refines until two levels agree to 1e-14 relative (at most level 10).
pub fn legendre_period_quadrature(lambda: f64) -> Result<QuadratureResult> {
    let mut last = legendre_period_quadrature_at(lambda, 2)?;
    for level in 3..=10 {
        last = legendre_period_quadrature_at(lambda, level)?;
        if last.error_estimate <= 1e-14 * last.value.norm() {
            break;
        }
    }
    Ok(last)
}

#[derive(Clone, Debug, PartialEq)]
pub struct OperatorResidualReport {
    pub operator_id: String,
    pub order: u8,
    pub test_point: Value,
    pub residual: f64,
    pub scale: f64,
    pub relative: f64,
    pub error: Option<String>,
}

impl OperatorResidualReport {
    pub fn to_json(&self) -> Value {
        json!({
            "operator_id": self.operator_id,
            "order": self.order,
            "test_point": self.test_point,
            "residual": self.residual,
            "scale": self.scale,
            "relative": self.relative,
            "error": self.error,
        })
    }
}

pub const FIRST_ORDER_STEP: f64 = 1e-5;
pub const SECOND_ORDER_STEP: f64 = 1e-4;

struct Stencil<'a> {
    f: &'a dyn Fn(&ParameterMatrix) -> Result<Complex64>,
    z: &'a ParameterMatrix,
}

impl Stencil<'_> {
    fn shifted(&self, moves: &[(usize, usize, f64)]) -> Result<Complex64> {
        let mut w = self.z.clone();
        for &(i, j, d) in moves {
            w.set(i, j, w.get(i, j) + d);
        }
        (self.f)(&w)
    }

    fn first(&self, i: usize, j: usize) -> Result<Complex64> {
        let h = FIRST_ORDER_STEP;
        Ok((self.shifted(&[(i, j, h)])? - self.shifted(&[(i, j, -h)])?) / (2.0 * h))
    }

    /// Mixed second derivative for two distinct entries.
    fn mixed(&self, a: (usize, usize), b: (usize, usize)) -> Result<Complex64> {
        let h = SECOND_ORDER_STEP;
        let at = |sa: f64, sb: f64| self.shifted(&[(a.0, a.1, sa * h), (b.0, b.1, sb * h)]);
        Ok((at(1.0, 1.0)? - at(1.0, -1.0)? - at(-1.0, 1.0)? + at(-1.0, -1.0)?) / (4.0 * h * h))
    }
}

/// Residuals of every operator of the three families at `z` (indices in ids
/// are 1-based): `gkz[i,j;p,q]`, `row[i,m]` and `euler[j]`.
pub fn check_annihilators(
    f: &dyn Fn(&ParameterMatrix) -> Result<Complex64>,
    z: &ParameterMatrix,
) -> Vec<OperatorResidualReport> {
    let n = z.n();
    let point = z.to_json();
    let st = Stencil { f, z };
    let report = |id: String, order: u8, value: Result<Complex64>, scale: f64| match value {
        Ok(v) => OperatorResidualReport {
            operator_id: id,
            order,
            test_point: point.clone(),
            residual: v.norm(),
            scale,
            relative: v.norm() / scale.max(1e-300),
            error: None,
        },
        Err(e) => OperatorResidualReport {
            operator_id: id,
            order,
            test_point: point.clone(),
            residual: f64::NAN,
            scale,
            relative: f64::NAN,
            error: Some(e.to_string()),
        },
    };
    let f0 = match f(z) {
        Ok(v) => v,
        Err(e) => {
            return vec![report("evaluate".into(), 0, Err(e), 0.0)];
        }
    };
    let scale = f0.norm();
    let grad: Vec<std::result::Result<Complex64, String>> = (0..2 * n * n)
        .map(|k| st.first(k / (2 * n), k % (2 * n)).map_err(|e| e.to_string()))
        .collect();
    let g = |i: usize, j: usize| grad[i * 2 * n + j].clone().map_err(Error::Evaluation);
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            for p in 0..2 * n {
                for q in p + 1..2 * n {
                    let v = st
                        .mixed((i, p), (j, q))
                        .and_then(|a| st.mixed((i, q), (j, p)).map(|b| a - b));
                    out.push(report(format!("gkz[{},{};{},{}]", i + 1, j + 1, p + 1, q + 1), 2, v, scale));
                }
            }
        }
    }
    for i in 0..n {
        for m in 0..n {
            let v = (0..2 * n).try_fold(Complex64::new(0.0, 0.0), |acc, j| Ok(acc + z.get(i, j) * g(m, j)?));
            let v = v.map(|s: Complex64| if i == m { s + f0 } else { s });
            out.push(report(format!("row[{},{}]", i + 1, m + 1), 1, v, scale));
        }
    }
    for j in 0..2 * n {
        let v = (0..n).try_fold(Complex64::new(0.0, 0.0), |acc, i| Ok(acc + z.get(i, j) * g(i, j)?));
        out.push(report(format!("euler[{}]", j + 1), 1, v.map(|s: Complex64| s + f0 / 2.0), scale));
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProbeKind {
    /// `g` with `||g - I|| <= 0.05` and `det g = 1`.
    SlNBall,
    /// One real column factor in `[0.9, 1.1]`; the column is random unless fixed (1-based).
    ColumnScale { column: Option<usize> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProbeReport {
    pub kind: ProbeKind,
    pub samples_used: usize,
    pub discarded: usize,
    /// Largest `|f(gZ) - f(Z)| / |f(Z)|` (group ball) or largest deviation of
    /// a sample from the fitted power law (column scaling).
    pub max_defect: f64,
    pub exponent: Option<f64>,
    pub exponent_stderr: Option<f64>,
}

impl ProbeReport {
    pub fn to_json(&self) -> Value {
        json!({
            "kind": match self.kind { ProbeKind::SlNBall => "sl_n_ball".to_string(), ProbeKind::ColumnScale { .. } => "column_scale".to_string() },
            "samples_used": self.samples_used,
            "discarded": self.discarded,
            "max_defect": self.max_defect,
            "exponent": self.exponent,
            "exponent_stderr": self.exponent_stderr,
        })
    }
}

pub const PROBE_SAMPLES: usize = 32;

/// Independent determinant by permutation expansion (small n only).
pub fn permutation_determinant(m: &[Complex64], n: usize) -> Complex64 {
    fn rec(m: &[Complex64], n: usize, row: usize, used: &mut Vec<bool>, sign: f64) -> Complex64 {
        if row == n {
            return Complex64::new(sign, 0.0);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        let mut s = sign;
        for c in 0..n {
            if used[c] {
                continue;
            }
            used[c] = true;
            acc += m[row * n + c] * rec(m, n, row + 1, used, s);
            used[c] = false;
            s = -s;
        }
        acc
    }
    rec(m, n, 0, &mut vec![false; n], 1.0)
}

/// A random element of SL_n within Frobenius distance `radius` of the identity.
pub fn random_sl_near_identity<R: Rng>(rng: &mut R, n: usize, radius: f64) -> Vec<Complex64> {
    loop {
        let mut e: Vec<Complex64> = (0..n * n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let norm = e.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let target = radius * 0.9 * rng.gen_range(0.1..1.0);
        for z in &mut e {
            *z *= target / norm;
        }
        for k in 0..n {
            e[k * n + k] += 1.0;
        }
        let d = permutation_determinant(&e, n);
        let root = d.powf(1.0 / n as f64);
        for z in &mut e {
            *z /= root;
        }
        let dist = (0..n * n)
            .map(|k| {
                let id = if k % (n + 1) == 0 { 1.0 } else { 0.0 };
                (e[k] - id).norm_sqr()
            })
            .sum::<f64>()
            .sqrt();
        if dist <= radius {
            return e;
        }
    }
}

/// True when `ratio` sits near a nontrivial fourth root of unity, the
/// signature of a square-root or fourth-root branch flip.
fn looks_like_branch_jump(ratio: Complex64) -> bool {
    [Complex64::new(-1.0, 0.0), Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0)]
        .iter()
        .any(|w| (ratio - w).norm() < 0.1)
}

/// Measure invariance under a small group ball, or fit the homogeneity
/// exponent under column scaling, from [`PROBE_SAMPLES`] samples.
pub fn random_group_probe<R: Rng>(
    f: &dyn Fn(&ParameterMatrix) -> Result<Complex64>,
    z: &ParameterMatrix,
    kind: ProbeKind,
    rng: &mut R,
) -> Result<ProbeReport> {
    let n = z.n();
    let f0 = f(z)?;
    if f0.norm() == 0.0 {
        return Err(Error::InvalidArgument("probe needs a nonzero base value".into()));
    }
    let mut discarded = 0;
    match kind {
        ProbeKind::SlNBall => {
            let mut max_defect: f64 = 0.0;
            let mut used = 0;
            for _ in 0..PROBE_SAMPLES {
                let g = random_sl_near_identity(rng, n, 0.05);
                let v = f(&z.left_multiply(&g)?)?;
                let ratio = v / f0;
                if looks_like_branch_jump(ratio) {
                    discarded += 1;
                    continue;
                }
                used += 1;
                max_defect = max_defect.max((v - f0).norm() / f0.norm());
            }
            Ok(ProbeReport {
                kind,
                samples_used: used,
                discarded,
                max_defect,
                exponent: None,
                exponent_stderr: None,
            })
        }
        ProbeKind::ColumnScale { column } => {
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for _ in 0..PROBE_SAMPLES {
                let col = column.unwrap_or_else(|| rng.gen_range(1..=2 * n));
                let mut c: f64 = rng.gen_range(0.9..1.1);
                if (c - 1.0).abs() < 1e-3 {
                    c = 1.0 + 1e-3f64.copysign(c - 1.0);
                }
                let v = f(&z.scale_column(col, Complex64::new(c, 0.0)))?;
                let log_ratio = (v / f0).ln();
                if log_ratio.im.abs() > PI / 4.0 {
                    discarded += 1;
                    continue;
                }
                xs.push(c.ln());
                ys.push(log_ratio);
            }
            if xs.len() < 2 {
                return Err(Error::NonConvergence("too few usable probe samples".into()));
            }
            let sxx: f64 = xs.iter().map(|x| x * x).sum();
            let slope = xs.iter().zip(&ys).map(|(x, y)| x * y.re).sum::<f64>() / sxx;
            let resid: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| (y - slope * x).norm()).collect();
            let dof = (xs.len() - 1) as f64;
            let sigma2 = resid.iter().map(|r| r * r).sum::<f64>() / dof;
            Ok(ProbeReport {
                kind,
                samples_used: xs.len(),
                discarded,
                max_defect: resid.iter().cloned().fold(0.0, f64::max),
                exponent: Some(slope),
                exponent_stderr: Some((sigma2 / sxx).sqrt()),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn agm_fixpoints() {
        assert_eq!(agm(c(1.0), c(1.0)).unwrap(), c(1.0));
        let a = Complex64::new(0.3, -2.0);
        assert!((agm(a, a).unwrap() - a).norm() < 1e-15);
        let (g, gaps) = agm_trace(c(2f64.sqrt()), c(1.0)).unwrap();
        assert!((g.re - 1.198_140_234_735_592_2).abs() < 1e-15);
        for w in gaps.windows(2).filter(|w| w[0] > 1e-7) {
            assert!(w[1] <= w[0] * w[0]);
        }
    }

    #[test]
    fn quadrature_refines() {
        let a = legendre_period_quadrature_at(0.3, 2).unwrap();
        let b = legendre_period_quadrature_at(0.3, 3).unwrap();
        assert!((a.value - b.value).norm() <= a.error_estimate);
        assert!(b.node_count > a.node_count);
        // Halving the step far more than halves the error.
        let first = legendre_period_quadrature_at(0.3, 1).unwrap();
        assert!(a.error_estimate < first.error_estimate.powf(1.5));
        assert!(legendre_period_quadrature(1.2).is_err());
    }

    #[test]
    fn quadrature_over_agm_is_pi() {
        for l in [0.1, 0.25, 0.5] {
            let q = legendre_period_quadrature(l).unwrap().value.re;
            assert!((q * agm(c(1.0), c((1.0 - l).sqrt())).unwrap().re - PI).abs() < 1e-12);
        }
    }

    fn z2() -> ParameterMatrix {
        ParameterMatrix::from_real_rows(&[&[1.1, 0.2, 0.9, 1.3], &[-0.3, 0.8, 1.2, 0.4]]).unwrap()
    }

    #[test]
    fn exact_fixtures() {
        let z = z2();
        let column_sums = |w: &ParameterMatrix| Ok((w.get(0, 0) + w.get(1, 0)) * (w.get(0, 1) + w.get(1, 1)));
        let r = check_annihilators(&column_sums, &z);
        let gkz = r.iter().find(|r| r.operator_id == "gkz[1,2;1,2]").unwrap();
        assert!(gkz.residual < 1e-10);
        let det12 = |w: &ParameterMatrix| Ok(w.get(0, 0) * w.get(1, 1) - w.get(0, 1) * w.get(1, 0));
        let r = check_annihilators(&det12, &z);
        let gkz = r.iter().find(|r| r.operator_id == "gkz[1,2;1,2]").unwrap();
        assert!((gkz.residual - 2.0).abs() < 1e-8);
        let constant = |_: &ParameterMatrix| Ok(Complex64::new(3.0, 4.0));
        for rep in check_annihilators(&constant, &z).iter().filter(|r| r.operator_id.starts_with("euler")) {
            assert!((rep.residual - 2.5).abs() < 1e-12);
        }
    }

    #[test]
    fn failing_function_is_reported_not_raised() {
        let bad = |_: &ParameterMatrix| -> Result<Complex64> { Err(Error::NoBranchInDomain) };
        let r = check_annihilators(&bad, &z2());
        assert_eq!(r.len(), 1);
        assert!(r[0].error.is_some());
    }

    #[test]
    fn minor_scaling_exponent_is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let d13 = |w: &ParameterMatrix| Ok(w.get(0, 0) * w.get(1, 2) - w.get(0, 2) * w.get(1, 0));
        let rep = random_group_probe(&d13, &z2(), ProbeKind::ColumnScale { column: Some(3) }, &mut rng).unwrap();
        assert!((rep.exponent.unwrap() - 1.0).abs() < 1e-9);
        let rep = random_group_probe(&d13, &z2(), ProbeKind::SlNBall, &mut rng).unwrap();
        assert!(rep.max_defect < 1e-12);
    }

    #[test]
    fn sl_samples_have_unit_determinant() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 2..=4 {
            let g = random_sl_near_identity(&mut rng, n, 0.05);
            assert!((permutation_determinant(&g, n) - 1.0).norm() < 1e-14);
        }
    }
}
