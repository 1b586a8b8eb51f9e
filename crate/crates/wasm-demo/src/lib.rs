use num_complex::Complex64;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use period_atlas::aronhold::legendre_j;
use period_atlas::cubic::lambda_branches;
use period_atlas::double_cover::period;
use period_atlas::grassmann::{cross_ratios, ParameterMatrix};
use period_atlas::hyperseries::{gauss_2f1_half, SeriesConfig};
use period_atlas::oracles::{gauss_2f1_agm, legendre_period_quadrature};
use period_atlas::{complex_json, Error, Result};

fn render(r: Result<Value>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": { "kind": e.kind(), "message": e.to_string() } }).to_string(),
    }
}

fn legendre(lambda: Complex64, max_degree: u32) -> Result<Value> {
    let cfg = SeriesConfig::default().with_max_degree(max_degree);
    let s = gauss_2f1_half(lambda, &cfg)?;
    let agm = gauss_2f1_agm(lambda)?;
    // The quadrature oracle only covers the real segment.
    let quad = if lambda.im == 0.0 && lambda.re > 0.0 && lambda.re < 1.0 {
        let q = legendre_period_quadrature(lambda.re)?;
        json!({ "value": complex_json(q.value), "ratio_to_pi": q.value.re / std::f64::consts::PI })
    } else {
        Value::Null
    };
    Ok(json!({
        "lambda": complex_json(lambda),
        "series": complex_json(s.value),
        "tail_bound": s.tail_bound,
        "converged": s.converged,
        "agm": complex_json(agm),
        "gap": (s.value - agm).norm(),
        "quadrature": quad,
    }))
}

fn branches(j: Complex64) -> Result<Value> {
    Ok(lambda_branches(j)?.to_json())
}

fn double_cover(matrix: &str) -> Result<Value> {
    let v: Value = serde_json::from_str(matrix).map_err(|e| Error::Parse(e.to_string()))?;
    let z = ParameterMatrix::from_json(&v)?;
    if z.n() != 2 {
        return Err(Error::InvalidArgument(format!("expected a 2x4 matrix, got n = {}", z.n())));
    }
    let p = period(&z, &SeriesConfig::default())?;
    Ok(json!({ "cross_ratios": cross_ratios(&z)?.to_json(), "period": p.to_json() }))
}

/// Series, AGM and (on the real segment) quadrature values of the Legendre period.
#[wasm_bindgen]
pub fn legendre_compare(re: f64, im: f64, max_degree: u32) -> String {
    render(legendre(Complex64::new(re, im), max_degree))
}

/// The six lambda values over a given J.
#[wasm_bindgen]
pub fn lambda_orbit(j_re: f64, j_im: f64) -> String {
    render(branches(Complex64::new(j_re, j_im)))
}

/// J of the Legendre cubic at lambda, with the orbit it determines.
#[wasm_bindgen]
pub fn lambda_orbit_of(re: f64, im: f64) -> String {
    render(branches(legendre_j(Complex64::new(re, im))))
}

/// Period of the double cover for a matrix given as `{"n": 2, "entries": [[re, im], ...]}`.
#[wasm_bindgen]
pub fn double_cover_period(matrix: &str) -> String {
    render(double_cover(matrix))
}
