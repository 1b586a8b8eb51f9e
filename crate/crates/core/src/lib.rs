pub mod aronhold;
pub mod cubic;
pub mod double_cover;
pub mod error;
pub mod grassmann;
pub mod hyperseries;
pub mod oracles;
pub mod positive_closure;
pub mod verify;
pub mod rational_poly;

use num_complex::Complex64;
use serde_json::Value;

pub use error::{Error, Result};

/// Parse a `[re, im]` pair (a bare number is read as real).
pub fn parse_complex(v: &Value) -> Result<Complex64> {
    if let Some(x) = v.as_f64() {
        return Ok(Complex64::new(x, 0.0));
    }
    match v.as_array().map(Vec::as_slice) {
        Some([re, im]) => match (re.as_f64(), im.as_f64()) {
            (Some(re), Some(im)) => Ok(Complex64::new(re, im)),
            _ => Err(Error::Parse(format!("bad complex number {v}"))),
        },
        _ => Err(Error::Parse(format!("bad complex number {v}"))),
    }
}

pub fn complex_json(z: Complex64) -> Value {
    serde_json::json!([z.re, z.im])
}
