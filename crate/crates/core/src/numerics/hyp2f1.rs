//! F(n/2, 1/2; n/2+1; x) on [0, 1].

use rug::Float;

use crate::error::{PcfError, Result};
use crate::numerics::quad::quad_semi_infinite;
use crate::precision::PrecisionContext;

/// F(n/2, 1/2; n/2+1; x): power series for x ≤ 3/4, otherwise the integral
/// n ∫_0^∞ du / (u² + 2√(1−x) u + 1)^{(n+1)/2}.
pub fn hyp2f1_half(n: u32, x: &Float, ctx: &PrecisionContext) -> Result<Float> {
    if n == 0 {
        return Err(PcfError::Domain("hyp2f1_half needs n ≥ 1".into()));
    }
    if *x < 0 || *x > 1 || x.is_nan() {
        return Err(PcfError::Domain(format!("hyp2f1_half argument {} outside [0,1]", x.to_f64())));
    }
    if *x <= 0.75 {
        Ok(Float::with_val(ctx.bits(), series(n, x, ctx.guarded(16))))
    } else {
        integral(n, x, ctx)
    }
}

fn series(n: u32, x: &Float, wp: u32) -> Float {
    let a = Float::with_val(wp, n) / 2u32;
    let b = Float::with_val(wp, 0.5);
    let c = Float::with_val(wp, &a + 1u32);
    let mut term = Float::with_val(wp, 1);
    let mut sum = Float::with_val(wp, 1);
    let tiny = Float::with_val(wp, Float::i_exp(1, -(wp as i32)));
    let mut k = 0u32;
    loop {
        let kf = Float::with_val(wp, k);
        term *= Float::with_val(wp, &a + &kf) * Float::with_val(wp, &b + &kf);
        term /= Float::with_val(wp, &c + &kf) * Float::with_val(wp, &kf + 1u32);
        term *= x;
        sum += &term;
        k += 1;
        if term.is_zero() || Float::with_val(wp, term.abs_ref()) < Float::with_val(wp, &sum * &tiny) {
            break;
        }
    }
    sum
}

fn integral(n: u32, x: &Float, ctx: &PrecisionContext) -> Result<Float> {
    let wp = ctx.guarded(32);
    let c = Float::with_val(wp, Float::with_val(wp, 1u32 - x).sqrt() * 2u32);
    let expo = Float::with_val(wp, -(Float::with_val(wp, n) + 1u32) / 2u32);
    let r = quad_semi_infinite(
        &|u: &Float| {
            let base = Float::with_val(wp, u.square_ref()) + Float::with_val(wp, &c * u) + 1u32;
            let lb = base.ln();
            Float::with_val(wp, lb * &expo).exp()
        },
        ctx,
    )?;
    Ok(Float::with_val(ctx.bits(), r.value * n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::gamma::chi;

    #[test]
    fn at_zero_is_one() {
        let c = PrecisionContext::default();
        for n in 1..6 {
            assert_eq!(hyp2f1_half(n, &c.real(0.0), &c).unwrap(), 1);
        }
    }

    #[test]
    fn at_one_is_chi() {
        let c = PrecisionContext::default();
        for n in [1, 2, 5, 10, 15] {
            let v = hyp2f1_half(n, &c.real(1.0), &c).unwrap();
            let x = chi(n, &c);
            assert!(((v - &x) / x).abs().to_f64() < c.eps(8), "n={n}");
        }
        let two = hyp2f1_half(2, &c.real(1.0), &c).unwrap();
        assert!((two - 2u32).abs().to_f64() < c.eps(8));
    }

    #[test]
    fn series_and_integral_agree_near_crossover() {
        let c = PrecisionContext::default();
        for n in [1, 3, 10] {
            let x = c.real(0.7);
            let s = series(n, &x, c.bits());
            let i = integral(n, &x, &c).unwrap();
            assert!(((s - &i) / i).abs().to_f64() < c.eps(8), "n={n}");
        }
    }

    #[test]
    fn n_two_closed_form() {
        // F(1,1/2;2;x) = 2(1 − √(1−x))/x
        let c = PrecisionContext::default();
        for x in [0.2, 0.5, 0.9] {
            let xf = c.real(x);
            let v = hyp2f1_half(2, &xf, &c).unwrap();
            let e = Float::with_val(c.bits(), 1u32 - Float::with_val(c.bits(), 1u32 - &xf).sqrt()) * 2u32 / &xf;
            assert!(((v - &e) / e).abs().to_f64() < c.eps(8));
        }
    }

    #[test]
    fn domain_checked() {
        let c = PrecisionContext::default();
        assert!(hyp2f1_half(3, &c.real(1.5), &c).is_err());
        assert!(hyp2f1_half(3, &c.real(-0.1), &c).is_err());
    }
}
