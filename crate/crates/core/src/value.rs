//! Values carried as mantissa·e^{logscale}.

use rug::{Complex, Float};

/// `mantissa · e^{logscale}`. The exponent range of MPFR is large enough for
/// every quantity here, but keeping the Gaussian factors e^{±z²/4} separate
/// makes reports readable and keeps products of huge and tiny factors exact.
#[derive(Debug, Clone, PartialEq)]
pub struct LogScaled<T> {
    pub mantissa: T,
    pub logscale: Float,
}

impl LogScaled<Float> {
    pub fn exact(v: Float) -> Self {
        let p = v.prec();
        Self { mantissa: v, logscale: Float::with_val(p, 0) }
    }

    pub fn value(&self) -> Float {
        let p = self.mantissa.prec();
        Float::with_val(p, &self.mantissa * Float::with_val(p, self.logscale.exp_ref()))
    }

    /// ln|value|.
    pub fn ln_abs(&self) -> Float {
        let p = self.mantissa.prec();
        Float::with_val(p, Float::with_val(p, self.mantissa.abs_ref()).ln() + &self.logscale)
    }

    /// Move the magnitude of the mantissa into the logscale, so |mantissa| = 1.
    pub fn normalized(&self) -> Self {
        if self.mantissa.is_zero() {
            return self.clone();
        }
        let p = self.mantissa.prec();
        let l = Float::with_val(p, self.mantissa.abs_ref()).ln();
        let m = Float::with_val(p, self.mantissa.signum_ref());
        Self { mantissa: m, logscale: Float::with_val(p, &self.logscale + l) }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let p = self.mantissa.prec();
        Self {
            mantissa: Float::with_val(p, &self.mantissa * &o.mantissa),
            logscale: Float::with_val(p, &self.logscale + &o.logscale),
        }
    }

    pub fn scale(&self, s: &Float) -> Self {
        let p = self.mantissa.prec();
        Self { mantissa: Float::with_val(p, &self.mantissa * s), logscale: self.logscale.clone() }
    }

    pub fn add(&self, o: &Self) -> Self {
        let p = self.mantissa.prec();
        let (big, small) = if self.logscale >= o.logscale { (self, o) } else { (o, self) };
        let shift = Float::with_val(p, &small.logscale - &big.logscale).exp();
        Self {
            mantissa: Float::with_val(p, &big.mantissa + Float::with_val(p, &small.mantissa * shift)),
            logscale: big.logscale.clone(),
        }
    }

    pub fn neg(&self) -> Self {
        Self { mantissa: Float::with_val(self.mantissa.prec(), -&self.mantissa), logscale: self.logscale.clone() }
    }

    pub fn to_complex(&self) -> LogScaled<Complex> {
        LogScaled {
            mantissa: Complex::with_val(self.mantissa.prec(), &self.mantissa),
            logscale: self.logscale.clone(),
        }
    }

    pub fn with_prec(&self, p: u32) -> Self {
        Self { mantissa: Float::with_val(p, &self.mantissa), logscale: Float::with_val(p, &self.logscale) }
    }
}

impl LogScaled<Complex> {
    pub fn exact(v: Complex) -> Self {
        let p = v.prec().0;
        Self { mantissa: v, logscale: Float::with_val(p, 0) }
    }

    pub fn value(&self) -> Complex {
        let p = self.mantissa.prec().0;
        Complex::with_val(p, &self.mantissa * Float::with_val(p, self.logscale.exp_ref()))
    }

    pub fn ln_abs(&self) -> Float {
        let p = self.mantissa.prec().0;
        Float::with_val(p, Float::with_val(p, self.mantissa.abs_ref()).ln() + &self.logscale)
    }

    pub fn abs(&self) -> LogScaled<Float> {
        let p = self.mantissa.prec().0;
        LogScaled { mantissa: Float::with_val(p, self.mantissa.abs_ref()), logscale: self.logscale.clone() }
    }

    pub fn normalized(&self) -> Self {
        if self.mantissa.is_zero() {
            return self.clone();
        }
        let p = self.mantissa.prec().0;
        let m = Float::with_val(p, self.mantissa.abs_ref());
        let l = Float::with_val(p, m.ln_ref());
        Self { mantissa: Complex::with_val(p, &self.mantissa / &m), logscale: Float::with_val(p, &self.logscale + l) }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let p = self.mantissa.prec().0;
        Self {
            mantissa: Complex::with_val(p, &self.mantissa * &o.mantissa),
            logscale: Float::with_val(p, &self.logscale + &o.logscale),
        }
    }

    pub fn scale(&self, s: &Complex) -> Self {
        let p = self.mantissa.prec().0;
        Self { mantissa: Complex::with_val(p, &self.mantissa * s), logscale: self.logscale.clone() }
    }

    pub fn add(&self, o: &Self) -> Self {
        let p = self.mantissa.prec().0;
        let (big, small) = if self.logscale >= o.logscale { (self, o) } else { (o, self) };
        let shift = Float::with_val(p, &small.logscale - &big.logscale).exp();
        Self {
            mantissa: Complex::with_val(p, &big.mantissa + Complex::with_val(p, &small.mantissa * shift)),
            logscale: big.logscale.clone(),
        }
    }

    pub fn neg(&self) -> Self {
        Self { mantissa: Complex::with_val(self.mantissa.prec().0, -&self.mantissa), logscale: self.logscale.clone() }
    }

    /// Real part, for values known to be real.
    pub fn re(&self) -> LogScaled<Float> {
        LogScaled { mantissa: self.mantissa.real().clone(), logscale: self.logscale.clone() }
    }

    pub fn with_prec(&self, p: u32) -> Self {
        Self { mantissa: Complex::with_val(p, &self.mantissa), logscale: Float::with_val(p, &self.logscale) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn add_aligns_scales() {
        let p = 128;
        let a = LogScaled { mantissa: Float::with_val(p, 2), logscale: Float::with_val(p, 1000) };
        let b = LogScaled { mantissa: Float::with_val(p, 3), logscale: Float::with_val(p, 999) };
        let s = a.add(&b).normalized();
        let expect = Float::with_val(p, 1000) + Float::with_val(p, 2 + 3 * Float::with_val(p, -1).exp()).ln();
        assert!((Float::with_val(p, &s.logscale - expect)).abs().to_f64() < 1e-30);
        assert_eq!(s.mantissa, 1);
    }

    #[test]
    fn complex_normalized_keeps_phase() {
        let p = 128;
        let a = LogScaled::<Complex>::exact(Complex::with_val(p, (3, 4)));
        let n = a.normalized();
        assert!((n.logscale.to_f64() - 5f64.ln()).abs() < 1e-15);
        assert!((n.mantissa.real().to_f64() - 0.6).abs() < 1e-15);
        let back = n.value();
        assert!((back.imag().to_f64() - 4.0).abs() < 1e-14);
    }
}
