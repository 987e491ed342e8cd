//! Γ for real and complex arguments, Pochhammer symbols and χ(n).

use rug::float::Constant;
use rug::{Complex, Float, Integer, Rational};

use crate::error::{PcfError, Result};
use crate::precision::PrecisionContext;

fn is_nonpositive_integer(x: &Float) -> bool {
    x.is_integer() && *x <= 0
}

/// Γ(x) for real x (MPFR).
pub fn gamma_fn(x: &Float, ctx: &PrecisionContext) -> Result<Float> {
    gamma_real(x, ctx.bits())
}

pub(crate) fn gamma_real(x: &Float, prec: u32) -> Result<Float> {
    if is_nonpositive_integer(x) {
        return Err(PcfError::Pole { function: "gamma", arg: x.to_string_radix(10, Some(12)) });
    }
    Ok(Float::with_val(prec, x.gamma_ref()))
}

/// ln|Γ(x)| and the sign of Γ(x).
pub(crate) fn ln_gamma_real(x: &Float, prec: u32) -> Result<(Float, std::cmp::Ordering)> {
    if is_nonpositive_integer(x) {
        return Err(PcfError::Pole { function: "lngamma", arg: x.to_string_radix(10, Some(12)) });
    }
    let (v, sign) = Float::with_val(prec, x).ln_abs_gamma();
    Ok((v, sign))
}

/// Γ(z) for complex z.
pub fn gamma_complex(z: &Complex, ctx: &PrecisionContext) -> Result<Complex> {
    let prec = ctx.bits();
    let lg = ln_gamma_complex(z, prec + 16)?;
    Ok(Complex::with_val(prec, lg.exp()))
}

/// A branch of ln Γ(z) (not necessarily the principal one); exp of it is Γ(z).
pub(crate) fn ln_gamma_complex(z: &Complex, prec: u32) -> Result<Complex> {
    if z.imag().is_zero() && is_nonpositive_integer(z.real()) {
        return Err(PcfError::Pole { function: "gamma", arg: z.real().to_string_radix(10, Some(12)) });
    }
    let wp = prec + 32;
    let z = Complex::with_val(wp, z);
    if *z.real() < 0.5 {
        // Γ(z) = π / (sin(πz) Γ(1−z))
        let pi = Float::with_val(wp, Constant::Pi);
        let one_minus = Complex::with_val(wp, 1 - &z);
        let lg = ln_gamma_complex(&one_minus, wp)?;
        let s = Complex::with_val(wp, &z * &pi).sin();
        let out = Complex::with_val(wp, pi.ln()) - Complex::with_val(wp, s.ln()) - lg;
        return Ok(Complex::with_val(prec, out));
    }
    let target = 0.25 * wp as f64 + 2.0;
    let mut shifted = z.clone();
    let mut log_prod = Complex::with_val(wp, 0);
    let mut prod = Complex::with_val(wp, 1);
    let mut count = 0;
    while Float::with_val(53, shifted.abs_ref()).to_f64() < target {
        prod *= &shifted;
        count += 1;
        if count % 16 == 0 {
            log_prod += Complex::with_val(wp, prod.ln_ref());
            prod = Complex::with_val(wp, 1);
        }
        shifted += 1;
    }
    log_prod += Complex::with_val(wp, prod.ln_ref());
    let terms = (target / 2.0).ceil() as usize + 2;
    let bern = bernoulli_even(terms);
    let half_ln_2pi = Float::with_val(wp, Float::with_val(wp, Constant::Pi) * 2u32).ln() / 2u32;
    let lnz = Complex::with_val(wp, shifted.ln_ref());
    let mut acc = Complex::with_val(wp, &shifted - Float::with_val(wp, 0.5)) * &lnz;
    acc -= &shifted;
    acc += &half_ln_2pi;
    let inv = Complex::with_val(wp, shifted.recip_ref());
    let inv2 = Complex::with_val(wp, inv.square_ref());
    let mut pw = inv.clone();
    for (k, b) in bern.iter().enumerate().skip(1) {
        let k = k as u32;
        let coeff = Rational::from(b / Integer::from(2 * k * (2 * k - 1)));
        acc += Complex::with_val(wp, &pw * Float::with_val(wp, &coeff));
        pw *= &inv2;
    }
    Ok(Complex::with_val(prec, acc - log_prod))
}

/// B_0, B_2, B_4, … B_{2(m-1)} as exact rationals (Akiyama–Tanigawa).
pub(crate) fn bernoulli_even(m: usize) -> Vec<Rational> {
    let n = 2 * m;
    let mut a: Vec<Rational> = Vec::with_capacity(n + 1);
    let mut out = Vec::with_capacity(m);
    for k in 0..=n {
        a.push(Rational::from((1, (k + 1) as u32)));
        for j in (1..=k).rev() {
            let diff = Rational::from(&a[j - 1] - &a[j]);
            a[j - 1] = diff * Integer::from(j as u32);
        }
        if k % 2 == 0 && out.len() < m {
            out.push(a[0].clone());
        }
    }
    // Akiyama–Tanigawa gives B_1 = +1/2, irrelevant for even indices.
    out
}

/// Rising factorial (x)_k.
pub fn pochhammer(x: &Float, k: u32, prec: u32) -> Float {
    let mut acc = Float::with_val(prec, 1);
    let mut t = Float::with_val(prec, x);
    for _ in 0..k {
        acc *= &t;
        t += 1;
    }
    acc
}

/// χ(n) = √π Γ(n/2+1)/Γ(n/2+1/2).
pub fn chi(n: u32, ctx: &PrecisionContext) -> Float {
    chi_prec(n, ctx.bits())
}

pub(crate) fn chi_prec(n: u32, prec: u32) -> Float {
    let wp = prec + 16;
    let half_n = Float::with_val(wp, n) / 2u32;
    let (g1, _) = Float::with_val(wp, &half_n + 1u32).ln_abs_gamma();
    let (g2, _) = Float::with_val(wp, &half_n + 0.5f64).ln_abs_gamma();
    let sqrt_pi = Float::with_val(wp, Constant::Pi).sqrt();
    Float::with_val(prec, (g1 - g2).exp() * sqrt_pi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn rel(a: &Float, b: &Float) -> f64 {
        let d = Float::with_val(a.prec(), a - b).abs();
        (d / Float::with_val(a.prec(), b.abs_ref())).to_f64()
    }

    #[test]
    fn gamma_half_is_sqrt_pi() {
        let c = ctx();
        let g = gamma_fn(&c.real(0.5), &c).unwrap();
        let sp = Float::with_val(c.bits(), Constant::Pi).sqrt();
        assert!(rel(&g, &sp) < c.eps(2));
        assert_eq!(gamma_fn(&c.real(1.0), &c).unwrap(), 1);
    }

    #[test]
    fn gamma_poles_rejected() {
        let c = ctx();
        assert!(matches!(gamma_fn(&c.real(0.0), &c), Err(PcfError::Pole { .. })));
        assert!(matches!(gamma_fn(&c.real(-3.0), &c), Err(PcfError::Pole { .. })));
        let z = Complex::with_val(c.bits(), (-2, 0));
        assert!(gamma_complex(&z, &c).is_err());
    }

    #[test]
    fn chi_one_from_gamma_ratio() {
        let c = ctx();
        let g32 = gamma_fn(&c.real(1.5), &c).unwrap();
        let g1 = gamma_fn(&c.real(1.0), &c).unwrap();
        let sp = Float::with_val(c.bits(), Constant::Pi).sqrt();
        let direct = Float::with_val(c.bits(), g32 / g1 * sp);
        let half_pi = Float::with_val(c.bits(), Constant::Pi) / 2u32;
        assert!(rel(&direct, &half_pi) < c.eps(2));
        assert!(rel(&chi(1, &c), &half_pi) < c.eps(2));
        assert!(rel(&chi(2, &c), &c.real(2.0)) < c.eps(2));
    }

    #[test]
    fn complex_gamma_matches_real_axis() {
        let c = ctx();
        for x in [0.3, 1.7, 4.25, -2.5, 12.0] {
            let z = Complex::with_val(c.bits(), (x, 0));
            let g = gamma_complex(&z, &c).unwrap();
            let r = gamma_fn(&c.real(x), &c).unwrap();
            assert!(rel(g.real(), &r) < c.eps(3), "x={x}");
        }
    }

    #[test]
    fn complex_gamma_reflection_and_recurrence() {
        let c = ctx();
        let p = c.bits();
        let z = Complex::with_val(p, (0.75, 1.3));
        let gz = gamma_complex(&z, &c).unwrap();
        let z1 = Complex::with_val(p, &z + 1u32);
        let gz1 = gamma_complex(&z1, &c).unwrap();
        let lhs = Complex::with_val(p, &gz * &z);
        let d = Complex::with_val(p, &lhs - &gz1).abs().real().to_f64();
        assert!(d / Complex::with_val(p, gz1.abs_ref()).real().to_f64() < c.eps(3));
        // |Γ(iy)|² = π/(y sinh πy)
        let y = 2.0f64;
        let iy = Complex::with_val(p, (0, y));
        let g = gamma_complex(&iy, &c).unwrap();
        let m2 = Float::with_val(p, g.norm_ref());
        let pi = Float::with_val(p, Constant::Pi);
        let expect = Float::with_val(p, &pi / (Float::with_val(p, &pi * y).sinh() * y));
        assert!(rel(&m2, &expect) < c.eps(3));
    }

    #[test]
    fn bernoulli_values() {
        let b = bernoulli_even(4);
        assert_eq!(b[0], Rational::from(1));
        assert_eq!(b[1], Rational::from((1, 6)));
        assert_eq!(b[2], Rational::from((-1, 30)));
        assert_eq!(b[3], Rational::from((1, 42)));
    }

    #[test]
    fn pochhammer_basic() {
        let x = Float::with_val(100, 0.5);
        assert_eq!(pochhammer(&x, 3, 100), Float::with_val(100, 0.5 * 1.5 * 2.5));
        assert_eq!(pochhammer(&Float::with_val(100, 0), 4, 100), 0);
    }
}
