use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{PcfError, Result};

pub type BigReal = rug::Float;
pub type BigComplex = rug::Complex;

const LOG2_10: f64 = std::f64::consts::LOG2_10;

/// Working precision shared by every routine. Passed explicitly; there is no global state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PrecisionContext {
    digits: u32,
    quad_tol: f64,
}

impl Default for PrecisionContext {
    fn default() -> Self {
        Self::new(60).expect("60 digits is valid")
    }
}

impl PrecisionContext {
    pub const MIN_DIGITS: u32 = 30;

    pub fn new(digits: u32) -> Result<Self> {
        if digits < Self::MIN_DIGITS {
            return Err(PcfError::Precondition(format!(
                "digits must be at least {}, got {digits}",
                Self::MIN_DIGITS
            )));
        }
        if digits > 2000 {
            return Err(PcfError::Precondition(format!("digits {digits} is unreasonably large")));
        }
        Ok(Self { digits, quad_tol: 10f64.powi(8 - digits as i32) })
    }

    pub fn with_quad_tol(mut self, tol: f64) -> Result<Self> {
        if !(tol > 0.0 && tol <= 1e-8) {
            return Err(PcfError::Precondition(format!("quad_tol must lie in (0, 1e-8], got {tol}")));
        }
        self.quad_tol = tol;
        Ok(self)
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn quad_tol(&self) -> f64 {
        self.quad_tol
    }

    /// Binary precision matching `digits` plus a few guard bits.
    pub fn bits(&self) -> u32 {
        (self.digits as f64 * LOG2_10).ceil() as u32 + 8
    }

    /// Internal working precision with `extra` additional guard bits.
    pub fn guarded(&self, extra: u32) -> u32 {
        self.bits() + extra
    }

    pub fn real(&self, v: f64) -> Float {
        Float::with_val(self.bits(), v)
    }

    /// Parse a decimal string at working precision.
    pub fn parse(&self, s: &str) -> Result<Float> {
        Float::parse(s)
            .map(|p| Float::with_val(self.bits(), p))
            .map_err(|e| PcfError::Domain(format!("cannot parse {s:?}: {e}")))
    }

    /// Relative tolerance 10^(k - digits) as a float.
    pub fn eps(&self, k: i32) -> f64 {
        10f64.powi(k - self.digits as i32)
    }
}

/// Decimal rendering with `digits` significant digits.
pub fn to_decimal(x: &Float, digits: u32) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    x.to_string_radix(10, Some(digits as usize))
}

/// Fixed-point style rendering with the given number of significant digits,
/// e.g. 0.99999962523819834461 rather than 9.99...e-1.
pub fn to_plain_decimal(x: &Float, sig: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let (neg, digits, exp) = x.to_sign_string_exp(10, Some(sig));
    let exp = exp.unwrap_or(0);
    let body = if exp <= 0 {
        format!("0.{}{}", "0".repeat((-exp) as usize), digits)
    } else if exp as usize >= digits.len() {
        format!("{}{}", digits, "0".repeat(exp as usize - digits.len()))
    } else {
        let (int, frac) = digits.split_at(exp as usize);
        format!("{int}.{frac}")
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}
