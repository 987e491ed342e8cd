//! What every expansion evaluator returns.

use rug::{Complex, Float};
use serde::Serialize;

use crate::value::LogScaled;

/// Classification of a Whittaker-variable point for picking a variation bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RegionLabel {
    R1,
    R1Ext,
    R2,
    R2Ext,
    R4,
    Outside,
}

impl RegionLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegionLabel::R1 => "R1",
            RegionLabel::R1Ext => "R1ext",
            RegionLabel::R2 => "R2",
            RegionLabel::R2Ext => "R2ext",
            RegionLabel::R4 => "R4",
            RegionLabel::Outside => "outside",
        }
    }
}

impl std::fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// How V_P(t^{-n}) is bounded in the large-z expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum VariationMode {
    /// |z|^{-n}, χ(n)|z|^{-n}, [χ(n)+σv²n]vⁿ|z|^{-n} by region.
    Piecewise,
    /// The exact variation along the straight path, via ₂F₁.
    Hyp2f1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Method {
    Poincare(VariationMode),
    UniformPositiveZ,
    UniformNegativeZ,
    UniformNegativeA,
    IntegralByParts,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Poincare(VariationMode::Piecewise) => "poincare-piecewise",
            Method::Poincare(VariationMode::Hyp2f1) => "poincare-hyp2f1",
            Method::UniformPositiveZ => "uniform-pos-z",
            Method::UniformNegativeZ => "uniform-neg-z",
            Method::UniformNegativeA => "uniform-neg-a",
            Method::IntegralByParts => "integral-ibp",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An expansion value together with its remainder bound.
///
/// Everything except `prefactor` is in scaled units: the approximation is
/// `prefactor · partial_sum`, and the absolute remainder bound is
/// `|prefactor| · bound`. Scaled units keep e^{±z²/4}-sized factors out of the
/// comparison between bound and true remainder.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub method: Method,
    pub region: Option<RegionLabel>,
    pub n: u32,
    pub partial_sum: Complex,
    pub prefactor: LogScaled<Complex>,
    pub bound: Option<Float>,
    pub derivative_bound: Option<Float>,
    pub exact_remainder: Option<Float>,
    pub ratio: Option<Float>,
}

impl BoundReport {
    pub fn new(method: Method, n: u32, partial_sum: Complex, prefactor: LogScaled<Complex>) -> Self {
        BoundReport {
            method,
            region: None,
            n,
            partial_sum,
            prefactor,
            bound: None,
            derivative_bound: None,
            exact_remainder: None,
            ratio: None,
        }
    }

    /// prefactor · partial_sum.
    pub fn approximation(&self) -> LogScaled<Complex> {
        self.prefactor.scale(&self.partial_sum)
    }

    /// ln|prefactor|.
    pub fn prefactor_log(&self) -> Float {
        self.prefactor.ln_abs()
    }

    /// Record the scaled exact value; fills `exact_remainder` and `ratio`.
    pub fn set_exact_scaled(&mut self, exact: &Complex) {
        let p = self.partial_sum.prec().0;
        let r = Float::with_val(p, Complex::with_val(p, exact - &self.partial_sum).abs_ref());
        if let Some(b) = &self.bound {
            if !b.is_zero() {
                self.ratio = Some(Float::with_val(p, &r / b));
            }
        }
        self.exact_remainder = Some(r);
    }

    /// Record an absolute exact value, dividing out the prefactor.
    pub fn set_exact(&mut self, exact: &LogScaled<Complex>) {
        let p = self.partial_sum.prec().0;
        let m = Complex::with_val(p, &exact.mantissa / &self.prefactor.mantissa);
        let shift = Float::with_val(p, &exact.logscale - &self.prefactor.logscale).exp();
        self.set_exact_scaled(&(m * shift));
    }

    pub fn ratio_f64(&self) -> Option<f64> {
        self.ratio.as_ref().map(|r| r.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_follows_exact() {
        let p = 128;
        let pref = LogScaled::<Complex>::exact(Complex::with_val(p, (0, 2)));
        let mut r = BoundReport::new(Method::UniformPositiveZ, 3, Complex::with_val(p, 1), pref);
        r.bound = Some(Float::with_val(p, 0.5));
        // exact absolute value 2i·1.25 → scaled 1.25, remainder 0.25
        let exact = LogScaled::<Complex>::exact(Complex::with_val(p, (0, 2.5)));
        r.set_exact(&exact);
        assert!((r.ratio_f64().unwrap() - 0.5).abs() < 1e-30);
        assert!((r.approximation().value().imag().to_f64() - 2.0).abs() < 1e-30);
    }
}
