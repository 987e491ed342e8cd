//! Exact-rational polynomials, Sturm-based real-root isolation and total variation.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::{Complex, Float, Integer, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RationalPoly {
    coeffs: Vec<Rational>,
}

impl RationalPoly {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: impl Into<Rational>) -> Self {
        Self::from_coeffs(vec![c.into()])
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    /// The monomial x.
    pub fn x() -> Self {
        Self::from_coeffs(vec![Rational::new(), Rational::from(1)])
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| *c == 0) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Self::from_coeffs(c.iter().map(|&v| Rational::from(v)).collect())
    }

    /// Coefficients given as (numerator, denominator) pairs, lowest degree first.
    pub fn from_ratios(c: &[(i64, i64)]) -> Self {
        Self::from_coeffs(c.iter().map(|&(n, d)| Rational::from((n, d))).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|c| Rational::from(c * s)).collect())
    }

    /// Multiply by x^k.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut c = vec![Rational::new(); k];
        c.extend(self.coeffs.iter().cloned());
        Self::from_coeffs(c)
    }

    pub fn derivative(&self) -> Self {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| Rational::from(c * Integer::from(i)))
                .collect(),
        )
    }

    /// Antiderivative vanishing at 0.
    pub fn antiderivative(&self) -> Self {
        let mut c = vec![Rational::new()];
        c.extend(self.coeffs.iter().enumerate().map(|(i, v)| Rational::from(v / Integer::from(i + 1))));
        Self::from_coeffs(c)
    }

    pub fn definite_integral(&self, lo: &Rational, hi: &Rational) -> Rational {
        let a = self.antiderivative();
        a.eval_rational(hi) - a.eval_rational(lo)
    }

    pub fn eval_rational(&self, x: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    pub fn eval(&self, x: &Float) -> Float {
        let p = x.prec();
        let mut acc = Float::with_val(p, 0);
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += Float::with_val(p, c);
        }
        acc
    }

    pub fn eval_complex(&self, x: &Complex) -> Complex {
        let p = x.prec().0;
        let mut acc = Complex::with_val(p, 0);
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += Float::with_val(p, c);
        }
        acc
    }

    /// Euclidean division: self = q·d + r with deg r < deg d.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.degree().unwrap();
        let lead = d.leading();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![Rational::new(); r.len() - dd];
        for i in (0..q.len()).rev() {
            let c = Rational::from(&r[i + dd] / &lead);
            if c != 0 {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[i + j] -= Rational::from(&c * dc);
                }
            }
            q[i] = c;
        }
        r.truncate(dd);
        (Self::from_coeffs(q), Self::from_coeffs(r))
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let l = self.leading().recip();
        self.scale(&l)
    }

    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Product of the distinct irreducible factors (same roots, all simple).
    pub fn square_free(&self) -> Self {
        if self.degree().unwrap_or(0) == 0 {
            return self.clone();
        }
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).0
    }

    pub fn to_string_in(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if *c == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{i}"),
            };
            let cs = if mono.is_empty() {
                c.to_string()
            } else if *c == 1 {
                String::new()
            } else if *c == -1 {
                "-".into()
            } else {
                format!("({c})*")
            };
            parts.push(format!("{cs}{mono}"));
        }
        parts.join(" + ").replace("+ -", "- ")
    }
}

impl fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_in("x"))
    }
}

impl Add for &RationalPoly {
    type Output = RationalPoly;
    fn add(self, o: &RationalPoly) -> RationalPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        RationalPoly::from_coeffs((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl Sub for &RationalPoly {
    type Output = RationalPoly;
    fn sub(self, o: &RationalPoly) -> RationalPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        RationalPoly::from_coeffs((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl Mul for &RationalPoly {
    type Output = RationalPoly;
    fn mul(self, o: &RationalPoly) -> RationalPoly {
        if self.is_zero() || o.is_zero() {
            return RationalPoly::zero();
        }
        let mut c = vec![Rational::new(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                c[i + j] += Rational::from(a * b);
            }
        }
        RationalPoly::from_coeffs(c)
    }
}

impl Neg for &RationalPoly {
    type Output = RationalPoly;
    fn neg(self) -> RationalPoly {
        RationalPoly::from_coeffs(self.coeffs.iter().map(|c| Rational::from(-c)).collect())
    }
}

macro_rules! owned_ops {
    ($tr:ident, $m:ident) => {
        impl $tr for RationalPoly {
            type Output = RationalPoly;
            fn $m(self, o: RationalPoly) -> RationalPoly {
                (&self).$m(&o)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

fn sturm_chain(p: &RationalPoly) -> Vec<RationalPoly> {
    let mut chain = vec![p.clone(), p.derivative()];
    loop {
        let n = chain.len();
        if chain[n - 1].is_zero() {
            chain.pop();
            break;
        }
        let (_, r) = chain[n - 2].div_rem(&chain[n - 1]);
        if r.is_zero() {
            break;
        }
        chain.push(-&r);
    }
    chain
}

fn sign_variations(chain: &[RationalPoly], x: &Rational) -> usize {
    let mut last = 0i32;
    let mut count = 0;
    for q in chain {
        let v = q.eval_rational(x);
        let s = v.cmp0() as i32;
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

/// Number of distinct real roots of `chain[0]` in (l, r].
fn count_roots(chain: &[RationalPoly], l: &Rational, r: &Rational) -> usize {
    sign_variations(chain, l).saturating_sub(sign_variations(chain, r))
}

fn refine_root(p: &RationalPoly, l: &Rational, r: &Rational, prec: u32) -> Float {
    let wp = prec + 32;
    let dp = p.derivative();
    let mut lo = Float::with_val(wp, l);
    let mut hi = Float::with_val(wp, r);
    let s_lo = p.eval(&lo).cmp0();
    let target = Float::with_val(wp, Float::i_exp(1, -(prec as i32)));
    let mut x = Float::with_val(wp, &lo + &hi) / 2u32;
    for _ in 0..(4 * wp) {
        let fx = p.eval(&x);
        if fx.is_zero() {
            break;
        }
        if fx.cmp0() == s_lo {
            lo = x.clone();
        } else {
            hi = x.clone();
        }
        let width = Float::with_val(wp, &hi - &lo);
        let scale = Float::with_val(wp, x.abs_ref()).max(&Float::with_val(wp, 1));
        if width <= Float::with_val(wp, &scale * &target) {
            break;
        }
        let d = dp.eval(&x);
        let newton = if d.is_zero() { None } else { Some(Float::with_val(wp, &x - Float::with_val(wp, &fx / &d))) };
        x = match newton {
            Some(n) if n > lo && n < hi => n,
            _ => Float::with_val(wp, &lo + &hi) / 2u32,
        };
    }
    Float::with_val(prec, x)
}

fn isolate(chain: &[RationalPoly], l: Rational, r: Rational, out: &mut Vec<(Rational, Rational)>) {
    let n = count_roots(chain, &l, &r);
    if n == 0 {
        return;
    }
    if n == 1 {
        out.push((l, r));
        return;
    }
    let p = &chain[0];
    let width = Rational::from(&r - &l);
    let mut m = Rational::from(&l + &r) / 2u32;
    let mut k = 1i32;
    while p.eval_rational(&m) == 0 {
        // nudge off an exact root so both halves have nonzero endpoint values
        m = Rational::from(&l + &r) / 2u32 + Rational::from(&width * Rational::from((k, 97)));
        k = -k - k.signum();
    }
    isolate(chain, l, m.clone(), out);
    isolate(chain, m, r, out);
}

/// All distinct real roots of p in [lo, hi], ascending, refined to `prec` bits.
pub fn poly_real_roots(p: &RationalPoly, lo: &Float, hi: &Float, prec: u32) -> Vec<Float> {
    assert!(!p.is_zero(), "poly_real_roots of the zero polynomial");
    if p.degree() == Some(0) || lo > hi {
        return Vec::new();
    }
    let sqf = p.square_free();
    let chain = sturm_chain(&sqf);
    let l = lo.to_rational().expect("finite endpoint");
    let r = hi.to_rational().expect("finite endpoint");
    let mut roots = Vec::new();
    if sqf.eval_rational(&l) == 0 {
        roots.push(Float::with_val(prec, &l));
    }
    if l == r {
        return roots;
    }
    let mut brackets = Vec::new();
    isolate(&chain, l, r, &mut brackets);
    for (a, b) in brackets {
        if sqf.eval_rational(&b) == 0 {
            roots.push(Float::with_val(prec, &b));
        } else {
            roots.push(refine_root(&sqf, &a, &b, prec));
        }
    }
    roots
}

/// ∫_lo^hi |p′(x)| dx, exactly as Σ|p(x_{i+1}) − p(x_i)| over the partition by roots of p′.
pub fn poly_variation(p: &RationalPoly, lo: &Float, hi: &Float, prec: u32) -> Float {
    assert!(lo <= hi, "poly_variation needs lo ≤ hi");
    let wp = prec + 32;
    let dp = p.derivative();
    let mut pts = vec![Float::with_val(wp, lo)];
    if !dp.is_zero() {
        for r in poly_real_roots(&dp, lo, hi, wp) {
            if r > *lo && r < *hi {
                pts.push(r);
            }
        }
    }
    pts.push(Float::with_val(wp, hi));
    let vals: Vec<Float> = pts.iter().map(|x| p.eval(x)).collect();
    let mut total = Float::with_val(wp, 0);
    for w in vals.windows(2) {
        total += Float::with_val(wp, &w[1] - &w[0]).abs();
    }
    Float::with_val(prec, total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(x: f64) -> Float {
        Float::with_val(200, x)
    }

    #[test]
    fn arithmetic_exact() {
        let p = RationalPoly::from_ints(&[1, 2, 3]);
        let q = RationalPoly::from_ratios(&[(1, 2), (-1, 3)]);
        let prod = &p * &q;
        let (qq, r) = prod.div_rem(&q);
        assert_eq!(qq, p);
        assert!(r.is_zero());
        assert_eq!(p.derivative(), RationalPoly::from_ints(&[2, 6]));
        assert_eq!(p.antiderivative().derivative(), p);
        assert_eq!(p.definite_integral(&Rational::from(0), &Rational::from(1)), Rational::from(3));
        assert!((&p - &p).is_zero());
    }

    #[test]
    fn square_free_removes_repeats() {
        // (x−1)²(x+2)
        let a = RationalPoly::from_ints(&[-1, 1]);
        let b = RationalPoly::from_ints(&[2, 1]);
        let p = &(&a * &a) * &b;
        let s = p.square_free();
        assert_eq!(s.degree(), Some(2));
        let roots = poly_real_roots(&p, &f(-5.0), &f(5.0), 200);
        assert_eq!(roots.len(), 2);
        assert!((roots[0].to_f64() + 2.0).abs() < 1e-50);
        assert!((roots[1].to_f64() - 1.0).abs() < 1e-50);
    }

    #[test]
    fn identity_root_excluded_when_hi_negative() {
        let p = RationalPoly::x();
        assert!(poly_real_roots(&p, &f(-1.0), &f(-0.5), 200).is_empty());
        assert_eq!(poly_real_roots(&p, &f(-1.0), &f(0.0), 200).len(), 1);
    }

    #[test]
    fn sqrt_two_to_full_precision() {
        let p = RationalPoly::from_ints(&[-2, 0, 1]);
        let r = poly_real_roots(&p, &f(0.0), &f(2.0), 300);
        assert_eq!(r.len(), 1);
        let e = Float::with_val(300, 2).sqrt();
        assert!(Float::with_val(300, &r[0] - &e).abs() < Float::with_val(300, Float::i_exp(1, -295)));
    }

    #[test]
    fn variation_basics() {
        let c = RationalPoly::constant(7);
        assert_eq!(poly_variation(&c, &f(-1.0), &f(3.0), 200), 0);
        // x² on [−1, 2]: 1 + 4
        let p = RationalPoly::from_ints(&[0, 0, 1]);
        let v = poly_variation(&p, &f(-1.0), &f(2.0), 200);
        assert!((v.to_f64() - 5.0).abs() < 1e-40);
    }

    #[test]
    fn close_roots_separated() {
        // (x − 1/1000)(x − 2/1000)(x + 1/3)
        let a = RationalPoly::from_ratios(&[(-1, 1000), (1, 1)]);
        let b = RationalPoly::from_ratios(&[(-2, 1000), (1, 1)]);
        let c = RationalPoly::from_ratios(&[(1, 3), (1, 1)]);
        let p = &(&a * &b) * &c;
        let r = poly_real_roots(&p, &f(-1.0), &f(1.0), 200);
        assert_eq!(r.len(), 3);
        assert!((r[1].to_f64() - 0.001).abs() < 1e-40);
        assert!((r[2].to_f64() - 0.002).abs() < 1e-40);
    }
}
