//! The degree 4 and 6 invariants S, T of the ternary cubic, obtained as the
//! exact kernel of the infinitesimal sl3 action on coefficient polynomials.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{One, Zero};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::cubic::TernaryCubic;
use crate::error::{Error, Result};
use crate::rational_poly::{kernel_basis, BigRational, Monomial, SparseMatrixQ, SparsePolynomial};

/// Coefficient variables in the fixed order used everywhere.
pub const VARIABLES: [&str; 10] = [
    "z111", "z112", "z113", "z122", "z123", "z133", "z222", "z223", "z233", "z333",
];

/// Exponents in (x1, x2, x3) of the cubic monomial attached to each variable.
pub const CUBIC_EXPONENTS: [[u32; 3]; 10] = [
    [3, 0, 0],
    [2, 1, 0],
    [2, 0, 1],
    [1, 2, 0],
    [1, 1, 1],
    [1, 0, 2],
    [0, 3, 0],
    [0, 2, 1],
    [0, 1, 2],
    [0, 0, 3],
];

pub const S_FILE: &str = "aronhold_S.json";
pub const T_FILE: &str = "aronhold_T.json";
pub const MANIFEST_FILE: &str = "aronhold_manifest.json";

const SHIPPED_S: &str = include_str!("../data/aronhold_S.json");
const SHIPPED_T: &str = include_str!("../data/aronhold_T.json");
const SHIPPED_MANIFEST: &str = include_str!("../data/aronhold_manifest.json");

fn cubic_index(e: [u32; 3]) -> Option<usize> {
    CUBIC_EXPONENTS.iter().position(|&c| c == e)
}

/// One element of sl3 acting on the coefficient space: a linear vector field
/// `sum c * z_source * d/dz_target`, stored as `(target, source, c)`.
#[derive(Clone, Debug)]
pub struct Derivation {
    pub label: String,
    pub terms: Vec<(usize, usize, i64)>,
}

/// The eight basis derivations: the two traceless diagonal ones first, then
/// the six `x_b d/dx_a`.
pub fn sl3_vector_fields() -> Vec<Derivation> {
    let mut out = Vec::with_capacity(8);
    for (a, b) in [(0usize, 1usize), (1, 2)] {
        let terms = CUBIC_EXPONENTS
            .iter()
            .enumerate()
            .map(|(m, e)| (m, m, e[a] as i64 - e[b] as i64))
            .filter(|t| t.2 != 0)
            .collect();
        out.push(Derivation {
            label: format!("H{}{}", a + 1, b + 1),
            terms,
        });
    }
    for a in 0..3 {
        for b in 0..3 {
            if a == b {
                continue;
            }
            let mut terms = Vec::new();
            for (m, e) in CUBIC_EXPONENTS.iter().enumerate() {
                if e[a] == 0 {
                    continue;
                }
                let mut t = *e;
                t[a] -= 1;
                t[b] += 1;
                let target = cubic_index(t).expect("cubic monomials are closed under the action");
                terms.push((target, m, e[a] as i64));
            }
            out.push(Derivation {
                label: format!("E{}{}", a + 1, b + 1),
                terms,
            });
        }
    }
    out
}

/// Matrices of the eight derivations on degree-`degree` polynomials in the ten
/// coefficients, in the ascending graded-lex monomial basis.
pub fn sl3_derivations(degree: u32) -> Vec<SparseMatrixQ> {
    let basis = Monomial::all_of_degree(10, degree);
    let index: HashMap<&Monomial, usize> = basis.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let n = basis.len();
    sl3_vector_fields()
        .iter()
        .map(|d| {
            let mut acc: HashMap<(usize, usize), i64> = HashMap::new();
            for (col, mono) in basis.iter().enumerate() {
                for &(target, source, c) in &d.terms {
                    let e = mono.exponent(target);
                    if e == 0 {
                        continue;
                    }
                    let image = mono.with_exponent(target, e - 1);
                    let image = image.with_exponent(source, image.exponent(source) + 1);
                    *acc.entry((index[&image], col)).or_insert(0) += c * e as i64;
                }
            }
            let entries = acc
                .into_iter()
                .filter(|(_, v)| *v != 0)
                .map(|((r, c), v)| (r, c, BigRational::from_integer(BigInt::from(v))))
                .collect();
            SparseMatrixQ::new(n, n, entries).expect("derivation matrix is well formed")
        })
        .collect()
}

/// Apply a vector field to a polynomial in the ten coefficients.
pub fn apply_derivation(d: &Derivation, p: &SparsePolynomial) -> SparsePolynomial {
    let mut out = SparsePolynomial::zero(10);
    for &(target, source, c) in &d.terms {
        let term = &SparsePolynomial::var(10, source) * &p.derivative(target);
        out = &out + &term.scale(&BigRational::from_integer(BigInt::from(c)));
    }
    out
}

fn legendre_images() -> Vec<SparsePolynomial> {
    let lam = SparsePolynomial::var(1, 0);
    let one = SparsePolynomial::one(1);
    let mut images = vec![SparsePolynomial::zero(1); 10];
    images[0] = one.clone();
    images[2] = -&(&lam + &one);
    images[5] = lam;
    images[7] = -&one;
    images
}

/// Substitute the Legendre cubic `x1^3 - (1+l) x1^2 x3 + l x1 x3^2 - x2^2 x3`;
/// the result is a polynomial in the single variable `l`.
pub fn legendre_restriction(p: &SparsePolynomial) -> Result<SparsePolynomial> {
    p.substitute(&legendre_images())
}

pub fn legendre_target_s() -> SparsePolynomial {
    SparsePolynomial::from_int_terms(1, &[(&[2], 1), (&[1], -1), (&[0], 1)])
}

pub fn legendre_target_t() -> SparsePolynomial {
    SparsePolynomial::from_int_terms(1, &[(&[3], 2), (&[2], -3), (&[1], -3), (&[0], 2)])
}

/// Report from a fresh derivation.
#[derive(Clone, Debug)]
pub struct DerivationReport {
    pub degree: u32,
    pub basis_size: usize,
    pub kernel_dimension: usize,
}

fn derive_one(degree: u32, target: &SparsePolynomial) -> Result<(SparsePolynomial, DerivationReport)> {
    let blocks = sl3_derivations(degree);
    let stacked = SparseMatrixQ::vstack(&blocks)?;
    let kernel = kernel_basis(&stacked);
    let report = DerivationReport {
        degree,
        basis_size: stacked.cols(),
        kernel_dimension: kernel.len(),
    };
    if kernel.len() != 1 {
        return Err(Error::KernelDimension {
            degree: degree as usize,
            dimension: kernel.len(),
        });
    }
    let basis = Monomial::all_of_degree(10, degree);
    let poly = SparsePolynomial::from_terms(
        10,
        basis
            .into_iter()
            .zip(kernel.into_iter().next().unwrap())
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, c)| (m.exponents().to_vec(), c)),
    )?;
    let restricted = legendre_restriction(&poly)?;
    let (Some((_, lead_r)), Some((_, lead_t))) = (restricted.terms().next_back(), target.terms().next_back()) else {
        return Err(Error::RestrictionMismatch { degree: degree as usize });
    };
    let factor = lead_t / lead_r;
    let normalized = poly.scale(&factor);
    if legendre_restriction(&normalized)? != *target {
        return Err(Error::RestrictionMismatch { degree: degree as usize });
    }
    Ok((normalized, report))
}

/// The invariant pair together with float copies of the coefficients.
#[derive(Clone, Debug)]
pub struct InvariantPair {
    pub s: SparsePolynomial,
    pub t: SparsePolynomial,
    s_float: Vec<([u32; 10], f64)>,
    t_float: Vec<([u32; 10], f64)>,
}

fn float_terms(p: &SparsePolynomial) -> Vec<([u32; 10], f64)> {
    p.terms()
        .map(|(m, c)| {
            let mut e = [0u32; 10];
            e.copy_from_slice(m.exponents());
            (e, crate::rational_poly::rational_to_f64(c))
        })
        .collect()
}

fn eval_float(terms: &[([u32; 10], f64)], z: &[Complex64; 10]) -> Complex64 {
    let mut acc = Complex64::zero();
    for (e, c) in terms {
        let mut t = Complex64::new(*c, 0.0);
        for (v, &k) in e.iter().enumerate() {
            if k > 0 {
                t *= z[v].powu(k);
            }
        }
        acc += t;
    }
    acc
}

impl InvariantPair {
    pub fn new(s: SparsePolynomial, t: SparsePolynomial) -> Self {
        let s_float = float_terms(&s);
        let t_float = float_terms(&t);
        InvariantPair { s, t, s_float, t_float }
    }

    /// Run the kernel computation at degrees 4 and 6.
    pub fn derive() -> Result<(Self, Vec<DerivationReport>)> {
        let (s, rs) = derive_one(4, &legendre_target_s())?;
        let (t, rt) = derive_one(6, &legendre_target_t())?;
        Ok((Self::new(s, t), vec![rs, rt]))
    }

    /// Process-wide pair: the copy shipped with the crate when its manifest
    /// matches the current derivation construction, a fresh derivation otherwise.
    pub fn shared() -> &'static InvariantPair {
        static PAIR: OnceLock<InvariantPair> = OnceLock::new();
        PAIR.get_or_init(|| {
            Self::from_json_strs(SHIPPED_S, SHIPPED_T, SHIPPED_MANIFEST)
                .or_else(|_| Self::derive().map(|(p, _)| p))
                .expect("invariant derivation failed")
        })
    }

    fn from_json_strs(s: &str, t: &str, manifest: &str) -> Result<Self> {
        let manifest: Value = serde_json::from_str(manifest)?;
        if manifest.get("derivation_sha256").and_then(Value::as_str) != Some(derivation_fingerprint().as_str()) {
            return Err(Error::Cache("stale manifest".into()));
        }
        let s = SparsePolynomial::from_json(&serde_json::from_str(s)?, Some(10))?;
        let t = SparsePolynomial::from_json(&serde_json::from_str(t)?, Some(10))?;
        if legendre_restriction(&s)? != legendre_target_s() || legendre_restriction(&t)? != legendre_target_t() {
            return Err(Error::Cache("cached invariants fail the Legendre restriction".into()));
        }
        Ok(Self::new(s, t))
    }

    /// Load from `dir`, or derive and write there when the cache is missing,
    /// stale, or `force` is set. Returns whether a derivation was run.
    pub fn load_or_derive(dir: &Path, force: bool) -> Result<(Self, bool)> {
        if !force {
            let read = |f: &str| fs::read_to_string(dir.join(f));
            if let (Ok(s), Ok(t), Ok(m)) = (read(S_FILE), read(T_FILE), read(MANIFEST_FILE)) {
                if let Ok(pair) = Self::from_json_strs(&s, &t, &m) {
                    return Ok((pair, false));
                }
            }
        }
        let (pair, _) = Self::derive()?;
        pair.write(dir)?;
        Ok((pair, true))
    }

    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        fs::create_dir_all(dir)?;
        let files = [
            (S_FILE, one_term_per_line(&self.s)),
            (T_FILE, one_term_per_line(&self.t)),
            (
                MANIFEST_FILE,
                serde_json::to_string_pretty(&json!({
                    "derivation_sha256": derivation_fingerprint(),
                    "variables": VARIABLES,
                }))?,
            ),
        ];
        let mut written = Vec::new();
        for (name, body) in files {
            let path = dir.join(name);
            fs::write(&path, body + "\n")?;
            written.push(path);
        }
        Ok(written)
    }

    pub fn eval_s(&self, z: &[Complex64; 10]) -> Complex64 {
        eval_float(&self.s_float, z)
    }

    pub fn eval_t(&self, z: &[Complex64; 10]) -> Complex64 {
        eval_float(&self.t_float, z)
    }
}

fn one_term_per_line(p: &SparsePolynomial) -> String {
    let lines: Vec<String> = p
        .to_json()
        .as_array()
        .map(|a| a.iter().map(|t| format!("  {t}")).collect())
        .unwrap_or_default();
    if lines.is_empty() {
        "[]".into()
    } else {
        format!("[\n{}\n]", lines.join(",\n"))
    }
}

/// Hash of the derivation matrices at degrees 4 and 6 and of the normalization
/// targets; any change to the construction invalidates cached invariants.
pub fn derivation_fingerprint() -> String {
    static FP: OnceLock<String> = OnceLock::new();
    FP.get_or_init(|| {
        let mut h = Sha256::new();
        for d in [4u32, 6] {
            for (k, m) in sl3_derivations(d).iter().enumerate() {
                h.update(format!("deg {d} op {k} {}x{}\n", m.rows(), m.cols()));
                for (r, c, v) in m.entries() {
                    h.update(format!("{r} {c} {v}\n"));
                }
            }
        }
        h.update(legendre_target_s().to_json().to_string());
        h.update(legendre_target_t().to_json().to_string());
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    })
    .clone()
}

/// Numeric S, T and `J = S^3 / (T^2 - 4 S^3)`.
pub fn eval_stj(c: &TernaryCubic) -> Result<(Complex64, Complex64, Complex64)> {
    let pair = InvariantPair::shared();
    let s = pair.eval_s(c.coefficients());
    let t = pair.eval_t(c.coefficients());
    let s3 = s * s * s;
    let d = t * t - 4.0 * s3;
    let scale = t.norm_sqr() + 4.0 * s3.norm();
    if d.norm() <= 1e-12 * scale || scale == 0.0 {
        return Err(Error::DegenerateDiscriminant(d.norm()));
    }
    Ok((s, t, s3 / d))
}

/// `J` along the Legendre line as a closed rational function of `l`.
pub fn legendre_j(lambda: Complex64) -> Complex64 {
    let one = Complex64::one();
    let s = lambda * lambda - lambda + one;
    s * s * s / (-27.0 * lambda * lambda * (lambda - one) * (lambda - one))
}
