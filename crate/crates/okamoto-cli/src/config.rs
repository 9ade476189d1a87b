//! Plain-JSON experiment configuration.

use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_rational::BigRational;
use num_traits::Zero;
use okamoto::QC;
use serde::{Deserialize, Serialize};

use crate::CliError;

/// A real scalar given as a JSON number or as a string `"p/q"`, `"0.11"`, `"1e-3"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Num(serde_json::Number),
    Str(String),
}

impl Scalar {
    fn text(&self) -> String {
        match self {
            Scalar::Num(n) => n.to_string(),
            Scalar::Str(s) => s.trim().to_string(),
        }
    }

    pub fn rational(&self) -> Result<BigRational, CliError> {
        parse_rational(&self.text()).ok_or_else(|| CliError::Usage(format!("not a number: {:?}", self.text())))
    }

    pub fn float(&self) -> Result<f64, CliError> {
        let s = self.text();
        if let Ok(x) = s.parse::<f64>() {
            return Ok(x);
        }
        let r = self.rational()?;
        Ok(num_traits::ToPrimitive::to_f64(&r).unwrap_or(f64::NAN))
    }
}

/// Exact value of a decimal or fraction literal.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).ok()?;
        let d = BigInt::from_str(d.trim()).ok()?;
        return (!d.is_zero()).then(|| BigRational::new(n, d));
    }
    let (mant, exp) = match s.find(['e', 'E']) {
        Some(k) => (&s[..k], i64::from_str(&s[k + 1..]).ok()?),
        None => (s, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    if int.is_empty() && frac.is_empty() || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = BigInt::from_str(&format!("{int}{frac}")).ok()?;
    let shift = exp - frac.len() as i64;
    if shift.unsigned_abs() > 4096 {
        return None;
    }
    let ten = BigInt::from(10);
    let mut r = BigRational::from_integer(digits);
    if shift >= 0 {
        r *= BigRational::from_integer(num_traits::pow(ten, shift as usize));
    } else {
        r /= BigRational::from_integer(num_traits::pow(ten, (-shift) as usize));
    }
    Some(if neg { -r } else { r })
}

/// A complex scalar: a real scalar or a pair `[re, im]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CScalar {
    Real(Scalar),
    Pair([Scalar; 2]),
}

impl CScalar {
    pub fn c64(&self) -> Result<Complex64, CliError> {
        let v = match self {
            CScalar::Real(r) => Complex64::new(r.float()?, 0.0),
            CScalar::Pair([a, b]) => Complex64::new(a.float()?, b.float()?),
        };
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(CliError::Usage(format!("non-finite value {self:?}")));
        }
        Ok(v)
    }

    pub fn exact(&self) -> Result<QC, CliError> {
        Ok(match self {
            CScalar::Real(r) => Complex::new(r.rational()?, BigRational::zero()),
            CScalar::Pair([a, b]) => Complex::new(a.rational()?, b.rational()?),
        })
    }

    pub fn from_c64(z: Complex64) -> Self {
        let num = |x: f64| Scalar::Num(serde_json::Number::from_f64(x).expect("finite"));
        CScalar::Pair([num(z.re), num(z.im)])
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointConfig {
    pub q: CScalar,
    pub h1: CScalar,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightConfig {
    /// Eight increasing values in `[0, 1)`; default `k/100`.
    pub alpha_prime: Option<Vec<Scalar>>,
    pub beta: Option<(u32, u32)>,
    pub gamma: Option<i64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonodromyConfig {
    pub tol: Option<f64>,
    pub vertices: Option<usize>,
    pub radius_factor: Option<f64>,
    pub clearance_factor: Option<f64>,
    pub basepoint: Option<CScalar>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContinuationConfig {
    /// Polyline for `t3`, starting at the configured `t3`.
    pub path: Option<Vec<CScalar>>,
    pub steps: Option<usize>,
    pub newton_tol: Option<f64>,
    pub pvi_tolerance: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PviConfig {
    pub x: Option<CScalar>,
    pub y: Option<CScalar>,
    pub t0: Option<CScalar>,
    pub t1: Option<CScalar>,
    /// Uniform grid intervals for the finite-difference residual.
    pub intervals: Option<usize>,
    pub blowup: Option<f64>,
}

/// Pass/fail thresholds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Thresholds {
    pub trace: f64,
    pub relation: f64,
    pub det: f64,
    pub drift: f64,
    pub residual: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { trace: 1e-6, relation: 1e-8, det: 1e-8, drift: 1e-6, residual: 1e-6 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Expectation {
    #[default]
    Stable,
    Unstable,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// If present, must name the subcommand being run.
    pub command: Option<String>,
    pub t: Option<[CScalar; 4]>,
    pub lambda: Option<[CScalar; 4]>,
    pub point: Option<PointConfig>,
    pub coincidences: Option<[bool; 4]>,
    pub weight: Option<WeightConfig>,
    /// Replace `ω3` by zero before testing stability.
    pub omega3_zero: Option<bool>,
    pub expect: Option<Expectation>,
    pub monodromy: Option<MonodromyConfig>,
    pub continuation: Option<ContinuationConfig>,
    pub pvi: Option<PviConfig>,
    pub thresholds: Option<Thresholds>,
    pub seed: Option<u64>,
    pub output: Option<String>,
}

fn positive(name: &str, v: Option<f64>) -> Result<(), CliError> {
    match v {
        Some(x) if !(x > 0.0 && x.is_finite()) => Err(CliError::Usage(format!("{name} must be a positive number, got {x}"))),
        _ => Ok(()),
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if let Some(m) = &self.monodromy {
            positive("monodromy.tol", m.tol)?;
            positive("monodromy.radius_factor", m.radius_factor)?;
            positive("monodromy.clearance_factor", m.clearance_factor)?;
            if m.vertices.is_some_and(|v| v < 3) {
                return Err(CliError::Usage("monodromy.vertices must be at least 3".into()));
            }
        }
        if let Some(c) = &self.continuation {
            positive("continuation.newton_tol", c.newton_tol)?;
            positive("continuation.pvi_tolerance", c.pvi_tolerance)?;
            if c.steps == Some(0) {
                return Err(CliError::Usage("continuation.steps must be positive".into()));
            }
        }
        if let Some(p) = &self.pvi {
            positive("pvi.blowup", p.blowup)?;
            if p.intervals.is_some_and(|n| n < 4) {
                return Err(CliError::Usage("pvi.intervals must be at least 4".into()));
            }
        }
        if let Some(t) = &self.thresholds {
            for (n, v) in [("trace", t.trace), ("relation", t.relation), ("det", t.det), ("drift", t.drift), ("residual", t.residual)] {
                positive(&format!("thresholds.{n}"), Some(v))?;
            }
        }
        Ok(())
    }

    pub fn thresholds(&self) -> Thresholds {
        self.thresholds.clone().unwrap_or_default()
    }

    pub fn lambda(&self) -> Result<&[CScalar; 4], CliError> {
        self.lambda.as_ref().ok_or_else(|| CliError::Usage("missing field `lambda` (four local exponents)".into()))
    }

    pub fn t_c64(&self) -> Result<[Complex64; 4], CliError> {
        match &self.t {
            Some(t) => Ok([t[0].c64()?, t[1].c64()?, t[2].c64()?, t[3].c64()?]),
            None => Ok([0.0, 1.0, 2.0, 3.0].map(|x| Complex64::new(x, 0.0))),
        }
    }

    pub fn t_exact(&self) -> Result<[QC; 4], CliError> {
        match &self.t {
            Some(t) => Ok([t[0].exact()?, t[1].exact()?, t[2].exact()?, t[3].exact()?]),
            None => Ok([0, 1, 2, 3].map(|k| Complex::new(BigRational::from_integer(k.into()), BigRational::zero()))),
        }
    }

    pub fn weight(&self) -> Result<okamoto::parabolic::Weight, CliError> {
        let w = self.weight.clone().unwrap_or_default();
        let ap: Vec<BigRational> = match &w.alpha_prime {
            Some(v) => v.iter().map(|s| s.rational()).collect::<Result<_, _>>()?,
            None => (1..=8).map(|k| BigRational::new(k.into(), 100.into())).collect(),
        };
        let ap: [BigRational; 8] = ap.try_into().map_err(|v: Vec<_>| CliError::Usage(format!("weight.alpha_prime needs 8 values, got {}", v.len())))?;
        if ap.windows(2).any(|p| p[0] >= p[1]) {
            return Err(CliError::Usage("weight.alpha_prime must be strictly increasing".into()));
        }
        let gamma = w.gamma.unwrap_or(1000);
        if gamma < 1 {
            return Err(CliError::Usage("weight.gamma must be positive".into()));
        }
        okamoto::parabolic::Weight::new(ap, w.beta.unwrap_or((1, 1)), gamma.into()).map_err(|e| CliError::Usage(e.to_string()))
    }
}
