//! Complementary error function, real (MPFR) and complex (series / continued fraction).

use rug::float::Constant;
use rug::{Complex, Float};

use crate::error::{PcfError, Result};
use crate::precision::PrecisionContext;

/// erfc(x) for real x.
pub fn erfc_ref(x: &Float, ctx: &PrecisionContext) -> Float {
    Float::with_val(ctx.bits(), x.erfc_ref())
}

/// erfc(z) for complex z.
///
/// Maclaurin series of erf with enough guard bits to absorb the cancellation
/// (about 2·Re(z)²·log2(e) bits) when that is affordable, otherwise the Laplace
/// continued fraction, which converges quickly once Re z is large.
pub fn erfc_complex(z: &Complex, prec: u32) -> Result<Complex> {
    if z.real().is_sign_negative() && !z.real().is_zero() {
        let neg = Complex::with_val(prec + 8, -z);
        let e = erfc_complex(&neg, prec + 8)?;
        return Ok(Complex::with_val(prec, 2u32 - e));
    }
    let re = z.real().to_f64();
    let loss_bits = 2.0 * re * re * std::f64::consts::LOG2_E;
    if loss_bits <= 2.0 * prec as f64 {
        Ok(erfc_series(z, prec, loss_bits.ceil() as u32 + 32))
    } else {
        erfc_cfrac(z, prec)
    }
}

fn erfc_series(z: &Complex, prec: u32, guard: u32) -> Complex {
    let wp = prec + guard;
    let z = Complex::with_val(wp, z);
    let z2 = Complex::with_val(wp, z.square_ref());
    let r2 = Float::with_val(53, z2.abs_ref()).to_f64();
    // term_n = (−1)^n z^{2n+1}/n!
    let mut term = z.clone();
    let mut sum = z.clone();
    let tiny = Float::with_val(wp, Float::i_exp(1, -(wp as i32)));
    let mut n = 0u32;
    loop {
        n += 1;
        term *= &z2;
        term /= n;
        term = -term;
        let add = Complex::with_val(wp, &term / (2 * n + 1));
        sum += &add;
        if (n as f64) > r2 {
            let a = Float::with_val(wp, add.abs_ref());
            let s = Float::with_val(wp, sum.abs_ref());
            if a <= Float::with_val(wp, &s * &tiny) {
                break;
            }
        }
    }
    let two_over_sqrt_pi = Float::with_val(wp, Float::with_val(wp, Constant::Pi).sqrt().recip() * 2u32);
    let erf = sum * two_over_sqrt_pi;
    Complex::with_val(prec, 1u32 - erf)
}

fn erfc_cfrac(z: &Complex, prec: u32) -> Result<Complex> {
    let wp = prec + 32;
    let z = Complex::with_val(wp, z);
    let eval = |depth: u32| -> Complex {
        let mut t = z.clone();
        for k in (1..=depth).rev() {
            let num = Float::with_val(wp, k) / 2u32;
            t = Complex::with_val(wp, &z + Complex::with_val(wp, num / &t));
        }
        t.recip()
    };
    let mut depth = 64u32;
    let mut prev = eval(depth);
    let tol = Float::with_val(wp, Float::i_exp(1, -(prec as i32 + 8)));
    loop {
        depth *= 2;
        let cur = eval(depth);
        let diff = Float::with_val(wp, Complex::with_val(wp, &cur - &prev).abs_ref());
        let mag = Float::with_val(wp, cur.abs_ref());
        if diff <= Float::with_val(wp, &mag * &tol) {
            let pref = Complex::with_val(wp, -Complex::with_val(wp, z.square_ref())).exp()
                / Float::with_val(wp, Constant::Pi).sqrt();
            return Ok(Complex::with_val(prec, pref * cur));
        }
        if depth > 1 << 20 {
            return Err(PcfError::Convergence("erfc continued fraction".into()));
        }
        prev = cur;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quad::{quad_interval, quad_semi_infinite_from};

    #[test]
    fn erfc_basic_values() {
        let c = PrecisionContext::default();
        assert_eq!(erfc_ref(&c.real(0.0), &c), 1);
        let x = c.real(0.7);
        let s = erfc_ref(&x, &c) + erfc_ref(&Float::with_val(c.bits(), -&x), &c);
        assert!((s - 2u32).abs().to_f64() < c.eps(1));
    }

    #[test]
    fn erfc_one_matches_quadrature() {
        let c = PrecisionContext::new(30).unwrap();
        let p = c.bits();
        let q = quad_semi_infinite_from(
            &|t: &Float| Float::with_val(p + 32, -Float::with_val(p + 32, t.square_ref())).exp(),
            &c.real(1.0),
            &c,
        )
        .unwrap();
        let expect = q.value * 2u32 / Float::with_val(p, Constant::Pi).sqrt();
        let e = erfc_ref(&c.real(1.0), &c);
        assert!(((e - &expect) / expect).abs().to_f64() < 1e-28);
    }

    #[test]
    fn complex_matches_real_axis() {
        let p = 220;
        for x in [0.0, 0.3, 2.0, 7.5, 18.0, -1.5] {
            let z = Complex::with_val(p, (x, 0));
            let e = erfc_complex(&z, p).unwrap();
            let r = Float::with_val(p, Float::with_val(p, x).erfc());
            let rel = Float::with_val(p, (Float::with_val(p, e.real() - &r) / &r).abs()).to_f64();
            assert!(rel < 1e-60, "x={x} rel={rel}");
            assert!(e.imag().to_f64().abs() < 1e-60);
        }
    }

    #[test]
    fn series_and_cfrac_agree_off_axis() {
        let p = 220;
        let z = Complex::with_val(p, (9.0, 4.0));
        let a = erfc_series(&z, p, 300);
        let b = erfc_cfrac(&z, p).unwrap();
        let d = Complex::with_val(p, &a - &b).abs().real().to_f64();
        let m = Complex::with_val(p, b.abs_ref()).real().to_f64();
        assert!(d / m < 1e-60);
    }

    #[test]
    fn complex_matches_line_integral() {
        // erfc(z) = 1 − (2/√π)∫_0^1 z e^{−z²u²} du
        let c = PrecisionContext::new(40).unwrap();
        let p = c.bits();
        let z = Complex::with_val(p, (1.2, 2.1));
        let wp = p + 32;
        let zz = Complex::with_val(wp, &z);
        let re = quad_interval(
            &|u: &Float| {
                let zu = Complex::with_val(wp, &zz * u);
                let v = Complex::with_val(wp, -zu.square()).exp() * &zz;
                Float::with_val(wp, v.real())
            },
            &c.real(0.0),
            &c.real(1.0),
            &c,
        )
        .unwrap();
        let im = quad_interval(
            &|u: &Float| {
                let zu = Complex::with_val(wp, &zz * u);
                let v = Complex::with_val(wp, -zu.square()).exp() * &zz;
                Float::with_val(wp, v.imag())
            },
            &c.real(0.0),
            &c.real(1.0),
            &c,
        )
        .unwrap();
        let k = Float::with_val(p, Float::with_val(p, Constant::Pi).sqrt().recip() * 2u32);
        let expect = Complex::with_val(p, (1u32 - Float::with_val(p, &re.value * &k), -Float::with_val(p, &im.value * &k)));
        let got = erfc_complex(&z, p).unwrap();
        let d = Complex::with_val(p, &got - &expect).abs().real().to_f64();
        assert!(d < 1e-30, "d={d}");
    }
}
