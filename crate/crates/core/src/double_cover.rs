//! Periods of double covers of P^{n-1} branched along 2n hyperplanes.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::complex_json;
use crate::error::{Error, Result};
use crate::grassmann::{column_subsets, cross_ratios, minor, CrossRatioGrid, ParameterMatrix};
use crate::hyperseries::{series_phi, SeriesConfig};

/// A value of a multivalued expression together with the root choices that
/// produced it. Each entry maps a radical factor to the branch index used
/// (0 is the principal branch).
#[derive(Clone, Debug, PartialEq)]
pub struct BranchedValue {
    pub value: Complex64,
    pub branch_log: BTreeMap<String, i64>,
    pub tail_bound: f64,
}

impl BranchedValue {
    pub fn exact(value: Complex64, branch_log: BTreeMap<String, i64>) -> Self {
        BranchedValue {
            value,
            branch_log,
            tail_bound: 0.0,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "value": complex_json(self.value),
            "branch_log": self.branch_log,
            "tail_bound": self.tail_bound,
        })
    }
}

fn generic_minor(z: &ParameterMatrix, cols: &[usize]) -> Result<Complex64> {
    let d = minor(z, cols)?;
    if d.norm() <= z.genericity_threshold() {
        return Err(Error::NonGeneric {
            columns: cols.to_vec(),
            modulus: d.norm(),
        });
    }
    Ok(d)
}

/// The quotient of minors under the square root of the prefactor.
pub fn prefactor_radicand(z: &ParameterMatrix) -> Result<Complex64> {
    let n = z.n();
    let tail: Vec<usize> = (2..=n).collect();
    let mut num = Complex64::new(1.0, 0.0);
    for i in n + 2..=2 * n {
        let mut cols = tail.clone();
        cols.push(i);
        num *= generic_minor(z, &cols)?;
    }
    for sub in column_subsets(n - 1, n - 2) {
        let mut cols = vec![1];
        cols.extend(sub.iter().map(|k| k + 1));
        cols.push(n + 1);
        num *= generic_minor(z, &cols)?;
    }
    let head: Vec<usize> = (1..=n).collect();
    let mut tail_np1 = tail;
    tail_np1.push(n + 1);
    let den = (generic_minor(z, &head)? * generic_minor(z, &tail_np1)?).powi(n as i32 - 2);
    Ok(num / den)
}

/// `radicand^{-1/2}` with one principal square root.
pub fn prefactor(z: &ParameterMatrix) -> Result<BranchedValue> {
    let q = prefactor_radicand(z)?;
    let mut log = BTreeMap::new();
    log.insert("prefactor_sqrt".to_string(), 0);
    Ok(BranchedValue::exact(q.sqrt().inv(), log))
}

#[derive(Clone, Debug, PartialEq)]
pub struct DoubleCoverPeriod {
    pub period: BranchedValue,
    pub cross_ratios: CrossRatioGrid,
}

impl DoubleCoverPeriod {
    pub fn to_json(&self) -> Value {
        json!({
            "value": complex_json(self.period.value),
            "tail_bound": self.period.tail_bound,
            "branch_log": self.period.branch_log,
            "cross_ratios": self.cross_ratios.to_json(),
        })
    }
}

/// `P(Z) phi(f(Z))`, refusing points whose cross-ratios leave the series domain.
pub fn period(z: &ParameterMatrix, cfg: &SeriesConfig) -> Result<DoubleCoverPeriod> {
    let p = prefactor(z)?;
    let f = cross_ratios(z)?;
    let s = series_phi(&f, cfg)?;
    Ok(DoubleCoverPeriod {
        period: BranchedValue {
            value: p.value * s.value,
            branch_log: p.branch_log,
            tail_bound: p.value.norm() * s.tail_bound,
        },
        cross_ratios: f,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn legendre(lambda: f64) -> ParameterMatrix {
        ParameterMatrix::from_real_rows(&[&[1.0, 0.0, 1.0, 1.0], &[0.0, 1.0, 1.0, lambda]]).unwrap()
    }

    #[test]
    fn legendre_prefactor_has_modulus_one() {
        let p = prefactor(&legendre(0.3)).unwrap();
        assert!((p.value.norm() - 1.0).abs() < 1e-15);
        assert!((prefactor_radicand(&legendre(0.3)).unwrap() + 1.0).norm() < 1e-15);
    }

    #[test]
    fn k3_slice_prefactor_has_modulus_one() {
        let grid = vec![
            Complex64::new(0.1, 0.2),
            Complex64::new(-0.2, 0.0),
            Complex64::new(0.3, -0.1),
            Complex64::new(0.05, 0.05),
        ];
        let z = ParameterMatrix::canonical(3, &grid).unwrap();
        assert!((prefactor(&z).unwrap().value.norm() - 1.0).abs() < 1e-14);
        let zero = ParameterMatrix::canonical(3, &[Complex64::new(0.0, 0.0); 4]).unwrap();
        let pi = period(&zero, &SeriesConfig::default()).unwrap();
        assert!((pi.period.value.norm() - 1.0).abs() < 1e-15);
        assert!((pi.period.value.powi(2).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn column_scaling_halves_the_period() {
        let z = legendre(0.2);
        let cfg = SeriesConfig::default();
        let a = period(&z, &cfg).unwrap().period.value;
        let b = period(&z.scale_column(4, Complex64::new(4.0, 0.0)), &cfg).unwrap().period.value;
        assert!((b - a * 0.5).norm() < 1e-14);
    }

    #[test]
    fn scaling_one_column_scales_modulus() {
        let z = legendre(0.2);
        let c = Complex64::new(0.0, 2.0);
        let a = prefactor(&z).unwrap().value.norm();
        let b = prefactor(&z.scale_column(3, c)).unwrap().value.norm();
        assert!((b - a / 2f64.sqrt()).abs() < 1e-15);
    }
}
