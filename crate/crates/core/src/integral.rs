//! Large-z expansion of U(a,z), uniform in a ≥ 0, from the saddle-point form
//! of its Laplace integral.
//!
//! With λ = a/z², the substitution φ(w) = w + w²/2 − λ ln w = s − λ ln s + A
//! maps the integral to ∫ s^{a−½}e^{−z²s} f(s) ds, and integrating by parts
//! gives U ~ prefactor · Σ f_k(λ)/z^{2k}. The f_k are computed as Cauchy
//! integrals of f against rational kernels Q_k, on contours in the s-plane
//! where w(s) is tracked by Newton continuation.

use std::collections::BTreeMap;

use rayon::prelude::*;
use rug::float::Constant;
use rug::ops::Pow;
use rug::{Assign, Complex, Float, Rational};
use serde::Serialize;

use crate::error::{PcfError, Result};
use crate::numerics::gamma::ln_gamma_real;
use crate::numerics::quad::quad_interval;
use crate::oracle::u_real;
use crate::precision::PrecisionContext;
use crate::report::{BoundReport, Method};
use crate::value::LogScaled;

mod fast;

const MAX_NODES: usize = 1 << 14;

/// Saddle-point data for one λ.
#[derive(Debug, Clone)]
pub struct SaddleData {
    pub lambda: Float,
    /// Positive saddle point of φ.
    pub w0: Float,
    /// The negative saddle point −1 − w₀.
    pub w_minus: Float,
    /// s(w₋) < 0, where w(s) has its branch point.
    pub s_minus: Float,
    /// The constant A in φ(w) = s − λ ln s + A.
    pub a_const: Float,
}

fn fw<T>(p: u32, v: T) -> Float
where
    Float: rug::Assign<T>,
{
    Float::with_val(p, v)
}

/// Bracketed Newton for an increasing or decreasing g on [lo, hi].
fn solve_bracketed(g: &dyn Fn(&Float) -> (Float, Float), lo: &Float, hi: &Float, p: u32) -> Result<Float> {
    let mut lo = Float::with_val(p, lo);
    let mut hi = Float::with_val(p, hi);
    let (glo, _) = g(&lo);
    let (ghi, _) = g(&hi);
    if glo.is_zero() {
        return Ok(lo);
    }
    if ghi.is_zero() {
        return Ok(hi);
    }
    if (glo.is_sign_negative()) == (ghi.is_sign_negative()) {
        return Err(PcfError::Convergence("root not bracketed in saddle mapping".into()));
    }
    let lo_neg = glo.is_sign_negative();
    let mut x = Float::with_val(p, &lo + &hi) / 2u32;
    for _ in 0..(4 * p as usize + 200) {
        let (gx, dg) = g(&x);
        if gx.is_zero() {
            return Ok(x);
        }
        if gx.is_sign_negative() == lo_neg {
            lo.assign_f(&x);
        } else {
            hi.assign_f(&x);
        }
        let width = Float::with_val(p, &hi - &lo);
        let tol = Float::with_val(p, Float::with_val(p, x.abs_ref()) + 1e-30f64) >> (p as i32 - 4);
        if width <= tol {
            return Ok(x);
        }
        let mut next = if dg.is_zero() || !dg.is_finite() { None } else { Some(Float::with_val(p, &x - Float::with_val(p, &gx / &dg))) };
        if let Some(n) = &next {
            if !(*n > lo && *n < hi) {
                next = None;
            }
        }
        let n = next.unwrap_or_else(|| Float::with_val(p, &lo + &hi) / 2u32);
        let step = Float::with_val(p, &n - &x).abs();
        x = n;
        if step <= tol {
            return Ok(x);
        }
    }
    Err(PcfError::Convergence("saddle mapping did not converge".into()))
}

trait AssignF {
    fn assign_f(&mut self, v: &Float);
}

impl AssignF for Float {
    fn assign_f(&mut self, v: &Float) {
        *self = Float::with_val(self.prec(), v);
    }
}

/// w₀, w₋, A and s₋ for λ ≥ 0.
pub fn saddle(lambda: &Float) -> Result<SaddleData> {
    if *lambda < 0 {
        return Err(PcfError::Domain("λ must be nonnegative".into()));
    }
    let p = lambda.prec();
    let lam = Float::with_val(p, lambda);
    let disc = Float::with_val(p, Float::with_val(p, &lam * 4u32) + 1u32).sqrt();
    let w0 = Float::with_val(p, disc - 1u32) / 2u32;
    let w_minus = Float::with_val(p, Float::with_val(p, -&w0) - 1u32);
    if lam.is_zero() {
        return Ok(SaddleData { lambda: lam, w0, w_minus, s_minus: fw(p, -0.5), a_const: fw(p, 0) });
    }
    let ln_ratio = Float::with_val(p, Float::with_val(p, &lam / &w0).ln());
    // A = ½w₀² + w₀ − λ + λ ln(λ/w₀)
    let a_const = Float::with_val(p, Float::with_val(p, w0.square_ref()) / 2u32) + &w0 - &lam + Float::with_val(p, &lam * &ln_ratio);
    // s₋ = −λu with u e^u = (−w₋/w₀) e^{−(λ − w₀ − ½)/λ}
    let ln_c = Float::with_val(p, Float::with_val(p, -&w_minus) / &w0).ln()
        - Float::with_val(p, Float::with_val(p, Float::with_val(p, &lam - &w0) - 0.5f64) / &lam);
    let g = |u: &Float| {
        let v = Float::with_val(p, u + Float::with_val(p, u.ln_ref())) - &ln_c;
        let d = Float::with_val(p, u.recip_ref()) + 1u32;
        (v, d)
    };
    let mut hi = Float::with_val(p, Float::with_val(p, ln_c.abs_ref()) + 2u32);
    while g(&hi).0 < 0 {
        hi *= 2u32;
    }
    let mut lo = Float::with_val(p, Float::with_val(p, &ln_c - 2u32).exp().min(&fw(p, 0.5)));
    while g(&lo).0 > 0 {
        lo /= 4u32;
    }
    let u = solve_bracketed(&g, &lo, &hi, p)?;
    let s_minus = Float::with_val(p, &u * &lam) * -1i32;
    Ok(SaddleData { lambda: lam, w0, w_minus, s_minus, a_const })
}

impl SaddleData {
    fn prec(&self) -> u32 {
        self.lambda.prec()
    }

    fn with_prec(&self, p: u32) -> Result<Self> {
        if p == self.prec() {
            Ok(self.clone())
        } else {
            saddle(&Float::with_val(p, &self.lambda))
        }
    }

    /// ½w₀² + w₀ − λ.
    fn c0(&self, p: u32) -> Float {
        let w0 = Float::with_val(p, &self.w0);
        Float::with_val(p, Float::with_val(p, w0.square_ref()) / 2u32) + &w0 - &self.lambda
    }

    /// φ(w) = w + w²/2 − λ ln w for w > 0.
    pub fn phi(&self, w: &Float) -> Float {
        let p = w.prec();
        let base = Float::with_val(p, Float::with_val(p, w.square_ref()) / 2u32) + w;
        if self.lambda.is_zero() {
            base
        } else {
            base - Float::with_val(p, &self.lambda * Float::with_val(p, w.ln_ref()))
        }
    }

    /// G(w) = ½w² + w − s − c₀ − λ ln(λw/(w₀s)) for real w, s of one sign.
    fn g_real(&self, w: &Float, s: &Float) -> (Float, Float) {
        let p = w.prec();
        let mut v = Float::with_val(p, Float::with_val(p, w.square_ref()) / 2u32) + w - s - self.c0(p);
        let mut d = Float::with_val(p, w + 1u32);
        if !self.lambda.is_zero() {
            let r = Float::with_val(p, Float::with_val(p, &self.lambda * w) / Float::with_val(p, &self.w0 * s));
            v -= Float::with_val(p, &self.lambda * r.ln());
            d -= Float::with_val(p, &self.lambda / w);
        }
        (v, d)
    }

    /// w(s) on the real branch, s > s₋.
    pub fn w_of_s(&self, s: &Float) -> Result<Float> {
        let p = s.prec();
        if *s <= self.s_minus {
            return Err(PcfError::Domain(format!("s = {} is left of the branch point", s.to_f64())));
        }
        if s.is_zero() {
            return Ok(fw(p, 0));
        }
        if self.lambda.is_zero() {
            let r = Float::with_val(p, Float::with_val(p, s * 2u32) + 1u32).sqrt();
            return Ok(r - 1u32);
        }
        let w0 = Float::with_val(p, &self.w0);
        let g = |w: &Float| self.g_real(w, s);
        if *s == self.lambda {
            return Ok(w0);
        }
        if *s < 0 {
            let lo = Float::with_val(p, &self.w_minus);
            return solve_bracketed(&g, &lo, &fw(p, 0), p).map(|w| w.min(&fw(p, 0)));
        }
        if *s < self.lambda {
            let mut lo = Float::with_val(p, &w0 / 2u32);
            while g(&lo).0 < 0 {
                lo /= 4u32;
            }
            return solve_bracketed(&g, &lo, &w0, p);
        }
        let mut hi = Float::with_val(p, Float::with_val(p, s * 2u32).sqrt()) + &w0 + 2u32;
        while g(&hi).0 < 0 {
            hi *= 2u32;
        }
        solve_bracketed(&g, &w0, &hi, p)
    }

    /// s(w) on the real branch, w > w₋.
    pub fn s_of_w(&self, w: &Float) -> Result<Float> {
        let p = w.prec();
        if *w <= self.w_minus {
            return Err(PcfError::Domain("w must exceed the negative saddle point".into()));
        }
        if self.lambda.is_zero() {
            return Ok(Float::with_val(p, Float::with_val(p, w.square_ref()) / 2u32) + w);
        }
        if w.is_zero() {
            return Ok(fw(p, 0));
        }
        let lam = Float::with_val(p, &self.lambda);
        if *w == self.w0 {
            return Ok(lam);
        }
        // G(w, s) = 0 as an equation in s: ∂G/∂s = −1 + λ/s.
        let g = |s: &Float| {
            let (v, _) = self.g_real(w, s);
            let d = Float::with_val(p, &lam / s) - 1u32;
            (v, d)
        };
        if *w < 0 {
            let lo = Float::with_val(p, &self.s_minus);
            let mut hi = Float::with_val(p, &lo / 2u32);
            while g(&hi).0 > 0 {
                hi /= 4u32;
            }
            return solve_bracketed(&g, &lo, &hi, p);
        }
        if *w < self.w0 {
            let mut lo = Float::with_val(p, &lam / 2u32);
            while g(&lo).0 > 0 {
                lo /= 4u32;
            }
            return solve_bracketed(&g, &lo, &lam, p);
        }
        let mut hi = Float::with_val(p, &lam * 2u32) + Float::with_val(p, w.square_ref()) + 2u32;
        while g(&hi).0 > 0 {
            hi *= 2u32;
        }
        solve_bracketed(&g, &lam, &hi, p)
    }

    /// Newton on G(w; σ) = 0 at the working precision, from a tracked
    /// double-precision state whose carried logarithm fixes the branch.
    /// Returns w, L and the first correction.
    fn polish(&self, sigma: &Complex, seed: &fast::State) -> Option<(Complex, Complex, Float)> {
        let p = sigma.prec().0;
        let mut w = Complex::with_val(p, (seed.w.re, seed.w.im));
        if self.lambda.is_zero() {
            let r = Complex::with_val(p, Complex::with_val(p, sigma * 2u32) + 1u32).sqrt();
            let exact = r - 1u32;
            let d = Float::with_val(p, Complex::with_val(p, &exact - &w).abs_ref());
            return Some((exact, Complex::with_val(p, 0), d));
        }
        let lam = Float::with_val(p, &self.lambda);
        let c0 = self.c0(p);
        // the seed's L fixes only the multiple of 2πi; at the node,
        // L(w) = Ln(λw_seed/(w₀σ)) + 2πim + ln(w/w_seed)
        let ln_k = Float::with_val(p, Float::with_val(p, &lam / &self.w0).ln());
        let seed_w = w.clone();
        let principal = Complex::with_val(p, Complex::with_val(p, &seed_w / sigma).ln()) + &ln_k;
        let turns = ((seed.l.im - principal.imag().to_f64()) / std::f64::consts::TAU).round();
        let two_pi_m = Float::with_val(p, Constant::Pi) * Float::with_val(p, 2.0 * turns);
        let base = Complex::with_val(p, &principal + Complex::with_val(p, (0, two_pi_m)));
        let carried = |w: &Complex| Complex::with_val(p, Complex::with_val(p, w / &seed_w).ln()) + &base;
        let mut first = None;
        let tol_bits = p as i32 - 6;
        for _ in 0..40 {
            let l = carried(&w);
            let g = Complex::with_val(p, Complex::with_val(p, w.square_ref()) / 2u32) + &w - sigma - &c0 - Complex::with_val(p, &l * &lam);
            let dg = Complex::with_val(p, &w + 1u32) - Complex::with_val(p, &lam / &w);
            let step = Complex::with_val(p, &g / &dg);
            let sz = Float::with_val(p, step.abs_ref());
            if !sz.is_finite() {
                return None;
            }
            w -= &step;
            let first_sz = first.get_or_insert_with(|| sz.clone()).clone();
            let scale = Float::with_val(p, w.abs_ref()) + 1e-30f64;
            if sz <= (scale >> tol_bits) {
                let l = carried(&w);
                return Some((w, l, first_sz));
            }
        }
        None
    }

    /// f(σ) = (1+4λ)^{1/4}√(w/σ)(σ−λ)/(w²+w−λ), with √(w/σ) = e^{(L − ln(λ/w₀))/2}.
    fn f_given(&self, sigma: &Complex, w: &Complex, l: &Complex) -> Complex {
        let p = sigma.prec().0;
        let lam = Float::with_val(p, &self.lambda);
        let q4 = Float::with_val(p, Float::with_val(p, &lam * 4u32) + 1u32).sqrt().sqrt();
        let root = if lam.is_zero() {
            Complex::with_val(p, Complex::with_val(p, w / sigma).sqrt())
        } else {
            let ln_k = Float::with_val(p, Float::with_val(p, &lam / &self.w0).ln());
            Complex::with_val(p, Complex::with_val(p, l - ln_k) / 2u32).exp()
        };
        let num = Complex::with_val(p, sigma - &lam);
        let den = Complex::with_val(p, w.square_ref()) + w - &lam;
        Complex::with_val(p, root * num / den) * q4
    }

    /// f(0); 1 at λ = 0.
    fn f_at_zero(&self, p: u32) -> Float {
        if self.lambda.is_zero() {
            return fw(p, 1);
        }
        // w/σ → (w₀/λ)e^{−c₀/λ} as σ → 0
        let q4 = Float::with_val(p, Float::with_val(p, &self.lambda * 4u32) + 1u32).sqrt().sqrt();
        let e = Float::with_val(p, Float::with_val(p, -self.c0(p)) / &self.lambda).exp();
        let ratio = Float::with_val(p, Float::with_val(p, &self.w0 / &self.lambda) * e);
        Float::with_val(p, ratio.sqrt() * q4)
    }
}

/// s(w) for real w > w₋.
pub fn map_s_of_w(w: &Float, lambda: &Float) -> Result<Float> {
    saddle(lambda)?.s_of_w(w)
}

/// w(s) for real s > s₋.
pub fn map_w_of_s(s: &Float, lambda: &Float) -> Result<Float> {
    saddle(lambda)?.w_of_s(s)
}

/// f(s) for real s ≥ 0. Close to s = λ, where the closed form is 0/0, the
/// value comes from the Cauchy integral with the plain kernel 1/(σ − s).
pub fn f_value(s: &Float, lambda: &Float) -> Result<Float> {
    let sd = saddle(lambda)?;
    f_value_with(&sd, s)
}

fn f_value_with(sd: &SaddleData, s: &Float) -> Result<Float> {
    let p = s.prec();
    if *s < 0 {
        return Err(PcfError::Domain("f is evaluated for s ≥ 0".into()));
    }
    if s.is_zero() {
        return sd.f_at_zero(p).pipe(Ok);
    }
    if sd.lambda.is_zero() {
        // √((1 + √(1+2s))/(2(1+2s)))
        let u = Float::with_val(p, Float::with_val(p, s * 2u32) + 1u32);
        let num = Float::with_val(p, Float::with_val(p, u.sqrt_ref()) + 1u32);
        return Ok(Float::with_val(p, num / Float::with_val(p, &u * 2u32)).sqrt());
    }
    let near = Float::with_val(p, Float::with_val(p, s - &sd.lambda).abs());
    let radius = Float::with_val(p, sd.lambda.clone().max(&fw(p, 1))) * 1e-3f64;
    if near < radius {
        return cauchy_f_n(sd, s, &[0], p).map(|v| v[0].clone());
    }
    let w = sd.w_of_s(s)?;
    let l = Float::with_val(p, Float::with_val(p, &sd.lambda * &w) / Float::with_val(p, &sd.w0 * s)).ln();
    let f = sd.f_given(&Complex::with_val(p, s), &Complex::with_val(p, &w), &Complex::with_val(p, &l));
    Ok(f.real().clone())
}

trait Pipe: Sized {
    fn pipe<R>(self, f: impl FnOnce(Self) -> R) -> R {
        f(self)
    }
}
impl<T> Pipe for T {}

/// Q_n as N(p, q, λ)/(2^n q^α p^β) with p = σ − s, q = σ − λ.
#[derive(Debug, Clone, PartialEq)]
pub struct CauchyKernel {
    pub n: u32,
    /// Monomials p^i q^j λ^k ↦ coefficient.
    pub numerator: BTreeMap<[u32; 3], Rational>,
    pub q_power: u32,
    pub p_power: u32,
}

impl CauchyKernel {
    /// Evaluate the numerator at rational (p, q, λ).
    pub fn numerator_at(&self, p: &Rational, q: &Rational, lam: &Rational) -> Rational {
        let mut acc = Rational::new();
        for (m, c) in &self.numerator {
            let t = Rational::from(p.clone().pow(m[0] as i32)) * Rational::from(q.clone().pow(m[1] as i32)) * Rational::from(lam.clone().pow(m[2] as i32));
            acc += t * c;
        }
        acc
    }

    /// Q_n(σ, λ, s) at rational arguments.
    pub fn eval_rational(&self, sigma: &Rational, lam: &Rational, s: &Rational) -> Rational {
        let p = Rational::from(sigma - s);
        let q = Rational::from(sigma - lam);
        let den = Rational::from(p.clone().pow(self.p_power as i32)) * Rational::from(q.clone().pow(self.q_power as i32)) * Rational::from(rug::Integer::from(1) << self.n);
        self.numerator_at(&p, &q, lam) / den
    }

}

/// Q_0 = 1/(σ−s), Q_n = −[Q_{n−1} + 2σ ∂_σQ_{n−1}]/(2(σ−λ)), kept exact.
pub fn cauchy_kernel(n: u32) -> CauchyKernel {
    let mut num: BTreeMap<[u32; 3], Rational> = BTreeMap::new();
    num.insert([0, 0, 0], Rational::from(1));
    let (mut alpha, mut beta) = (0u32, 1u32);
    for _ in 0..n {
        // Ñ = Npq + 2σ(N_σ pq − αNp − βNq), σ = q + λ, ∂_σ = ∂_p + ∂_q
        let mut out: BTreeMap<[u32; 3], Rational> = BTreeMap::new();
        let mut add = |m: [u32; 3], c: Rational| {
            let e = out.entry(m).or_insert_with(Rational::new);
            *e += c;
        };
        for (m, c) in &num {
            let [i, j, k] = *m;
            add([i + 1, j + 1, k], c.clone());
            let mut inner: Vec<([u32; 3], Rational)> = Vec::new();
            if i > 0 {
                inner.push(([i, j + 1, k], Rational::from(c * i)));
            }
            if j > 0 {
                inner.push(([i + 1, j, k], Rational::from(c * j)));
            }
            inner.push(([i + 1, j, k], Rational::from(c * alpha) * -1i32));
            inner.push(([i, j + 1, k], Rational::from(c * beta) * -1i32));
            for (mm, cc) in inner {
                // 2σ · term = 2q·term + 2λ·term
                add([mm[0], mm[1] + 1, mm[2]], Rational::from(&cc * 2u32));
                add([mm[0], mm[1], mm[2] + 1], cc * 2u32);
            }
        }
        out.retain(|_, c| *c != 0);
        let min_q = out.keys().map(|m| m[1]).min().unwrap_or(0);
        let min_p = out.keys().map(|m| m[0]).min().unwrap_or(0);
        num = out.into_iter().map(|(m, c)| ([m[0] - min_p, m[1] - min_q, m[2]], -c)).collect();
        alpha = alpha + 2 - min_q;
        beta = beta + 1 - min_p;
    }
    CauchyKernel { n, numerator: num, q_power: alpha, p_power: beta }
}

/// σ(θ) = m + A e^{iθ} + B e^{−iθ}: an ellipse with foci at the ends of
/// [lo, hi], or a circle when that segment is short.
struct Contour {
    m: Float,
    a: Float,
    b: Float,
}

impl Contour {
    fn around(sd: &SaddleData, lo: &Float, hi: &Float, p: u32) -> Result<Contour> {
        let m = Float::with_val(p, Float::with_val(p, lo + hi) / 2u32);
        let h = Float::with_val(p, Float::with_val(p, hi - lo) / 2u32);
        let d = Float::with_val(p, &m - &sd.s_minus);
        if d <= h {
            return Err(PcfError::Domain("contour would cross the branch point".into()));
        }
        let floor = Float::with_val(p, &d / 16u32);
        if h <= floor {
            let r = Float::with_val(p, &d / 4u32);
            return Ok(Contour { m, a: r, b: fw(p, 0) });
        }
        // the confocal ellipse through s₋ has ρ_out = x + √(x²−1); use ρ = √ρ_out
        let x = Float::with_val(p, &d / &h);
        let rho_out = Float::with_val(p, Float::with_val(p, Float::with_val(p, x.square_ref()) - 1u32).sqrt() + &x);
        let rho = rho_out.sqrt();
        let a = Float::with_val(p, &h * &rho) / 2u32;
        let b = Float::with_val(p, &h / &rho) / 2u32;
        Ok(Contour { m, a, b })
    }

    fn point(&self, theta: &Float) -> (Complex, Complex) {
        let p = theta.prec();
        let (sn, cs) = theta.clone().sin_cos(Float::new(p));
        let re = Float::with_val(p, Float::with_val(p, &self.a + &self.b) * &cs) + &self.m;
        let im = Float::with_val(p, Float::with_val(p, &self.a - &self.b) * &sn);
        // dσ/dθ = i(Ae^{iθ} − Be^{−iθ})
        let dre = Float::with_val(p, Float::with_val(p, &self.a + &self.b) * &sn) * -1i32;
        let dim = Float::with_val(p, Float::with_val(p, &self.a - &self.b) * &cs);
        (Complex::with_val(p, (re, im)), Complex::with_val(p, (dre, dim)))
    }

    /// Smallest distance from the contour to the focal segment.
    fn clearance(&self) -> f64 {
        let (a, b) = (self.a.to_f64(), self.b.to_f64());
        if b == 0.0 {
            // circle: the segment sits within a quarter radius of the centre
            0.75 * a
        } else {
            a + b - 2.0 * (a * b).sqrt()
        }
    }
}

fn to_c64(z: &Complex) -> fast::C {
    fast::C::new(z.real().to_f64(), z.imag().to_f64())
}

/// w(σ), f(σ) and dσ/dθ at the trapezoid nodes of one contour. w is tracked
/// in double precision and polished by Newton at the working precision.
struct Samples {
    sd: SaddleData,
    sd64: fast::Saddle64,
    contour: Contour,
    wp: u32,
    states: Vec<fast::State>,
    sigma: Vec<Complex>,
    /// f(σ)·dσ/dθ
    g: Vec<Complex>,
}

impl Samples {
    fn new(sd: &SaddleData, lo: &Float, hi: &Float, wp: u32) -> Result<Samples> {
        let sd = sd.with_prec(wp)?;
        let sd64 = fast::Saddle64::new(&sd);
        let contour = Contour::around(&sd, lo, hi, wp)?;
        let nodes = 64usize;
        let pts: Vec<(Complex, Complex)> = (0..nodes).map(|k| contour.point(&theta(k, nodes, wp))).collect();
        let start = pts[0].0.real().to_f64();
        let states = fast::closed_loop(&sd64, nodes, &|k, _| to_c64(&pts[k].0), start)?;
        let mut out = Samples { sd, sd64, contour, wp, states: Vec::new(), sigma: Vec::new(), g: Vec::new() };
        for ((sg, dsg), st) in pts.into_iter().zip(states) {
            out.push(sg, dsg, st)?;
        }
        Ok(out)
    }

    fn push(&mut self, sg: Complex, dsg: Complex, seed: fast::State) -> Result<()> {
        let wp = self.wp;
        let (w, l, first) = self.sd.polish(&sg, &seed).ok_or_else(track_fail)?;
        if first.to_f64() > 1e-9 * seed.w.norm() {
            return Err(PcfError::Convergence("Newton polish left the tracked branch".into()));
        }
        let f = self.sd.f_given(&sg, &w, &l);
        self.g.push(Complex::with_val(wp, f * &dsg));
        self.sigma.push(sg);
        self.states.push(seed);
        Ok(())
    }

    fn len(&self) -> usize {
        self.sigma.len()
    }

    fn refine(&mut self) -> Result<()> {
        let n = self.len();
        if 2 * n > MAX_NODES {
            return Err(PcfError::Convergence("Cauchy integral did not stabilise".into()));
        }
        let old_sigma = std::mem::take(&mut self.sigma);
        let old_g = std::mem::take(&mut self.g);
        let old_states = std::mem::take(&mut self.states);
        for k in 0..n {
            self.sigma.push(old_sigma[k].clone());
            self.g.push(old_g[k].clone());
            self.states.push(old_states[k]);
            let (sg, dsg) = self.contour.point(&theta(2 * k + 1, 2 * n, self.wp));
            let st = self.sd64.track(old_states[k], to_c64(&sg)).ok_or_else(track_fail)?;
            self.push(sg, dsg, st)?;
        }
        Ok(())
    }

    /// Per node, the kernel numerator as a polynomial in p with the q- and
    /// λ-dependence, f·dσ/dθ and the q-power of the denominator folded in.
    fn prepare(&self, kern: &CauchyKernel) -> PreparedKernel {
        let wp = self.wp;
        let lam = &self.sd.lambda;
        let deg = kern.numerator.keys().map(|m| m[0]).max().unwrap_or(0) as usize;
        let coeffs: Vec<(usize, u32, u32, Float)> =
            kern.numerator.iter().map(|(m, c)| (m[0] as usize, m[1], m[2], Float::with_val(wp, c))).collect();
        let per_node = self
            .sigma
            .iter()
            .zip(&self.g)
            .map(|(sg, g)| {
                let q = Complex::with_val(wp, sg - lam);
                let mut cs = vec![Complex::with_val(wp, 0); deg + 1];
                for (i, j, k, c) in &coeffs {
                    let qj = Complex::with_val(wp, Pow::pow(&q, *j));
                    let lk = Float::with_val(wp, Pow::pow(lam, *k));
                    cs[*i] += qj * Float::with_val(wp, c * lk);
                }
                let den = Complex::with_val(wp, Pow::pow(&q, kern.q_power)) << kern.n as i32;
                let scale = Complex::with_val(wp, g / den);
                // leading coefficient first, as a polynomial in 1/p
                cs.into_iter().map(|c| Complex::with_val(wp, c * &scale)).collect()
            })
            .collect();
        assert!((deg as u32) < kern.p_power);
        PreparedKernel { min_power: kern.p_power - deg as u32, per_node }
    }

    /// (f_n(s), mean |integrand|) for a prepared kernel.
    fn eval(&self, pk: &PreparedKernel, s: &Float) -> (Float, Float) {
        let wp = self.wp;
        let mut sum = Complex::with_val(wp, 0);
        let mut mag = Float::with_val(wp, 0);
        let mut inv = Complex::new(wp);
        let mut t = Complex::new(wp);
        for (sg, cs) in self.sigma.iter().zip(&pk.per_node) {
            // Q_n decays like 1/p, so the terms are c_i p^{i−β} with i < β: Horner in 1/p
            inv.assign(sg);
            inv -= s;
            inv.recip_mut();
            t.assign(&cs[0]);
            for c in &cs[1..] {
                t *= &inv;
                t += c;
            }
            for _ in 0..pk.min_power {
                t *= &inv;
            }
            mag += t.real().clone().abs();
            mag += t.imag().clone().abs();
            sum += &t;
        }
        // (1/2πi)∫ g dθ ≈ (1/(iN)) Σ g, and f_n is real on the real axis
        let n = self.len() as u32;
        (Float::with_val(wp, sum.imag() / n), mag / n)
    }
}

struct PreparedKernel {
    /// β − deg: the smallest power of 1/p present.
    min_power: u32,
    per_node: Vec<Vec<Complex>>,
}

fn theta(k: usize, n: usize, p: u32) -> Float {
    Float::with_val(p, Float::with_val(p, Constant::Pi) * (2 * k) as u32) / n as u32
}

fn track_fail() -> PcfError {
    PcfError::Convergence("w(s) continuation failed on the contour".into())
}

fn working_bits(contour_clearance: f64, maxn: u32, prec: u32) -> u32 {
    let loss = ((2 * maxn + 1) as f64 * (-contour_clearance.max(1e-300).log2()).max(0.0)).ceil() as u32;
    prec + 32 + loss
}

/// f_n at every point of `at`, for every n in `ns`, from one contour whose
/// focal segment covers λ and the points. Nodes double until every value
/// moves by less than 2^{−prec} of its integrand scale.
fn cauchy_values(sd: &SaddleData, lo: &Float, hi: &Float, ns: &[u32], at: &[Float], prec: u32) -> Result<(Samples, Vec<PreparedKernel>)> {
    let maxn = ns.iter().copied().max().unwrap_or(0);
    let probe = Contour::around(sd, lo, hi, 64)?;
    let wp = working_bits(probe.clearance(), maxn, prec);
    let mut samples = Samples::new(sd, lo, hi, wp)?;
    let kernels: Vec<CauchyKernel> = ns.iter().map(|&n| cauchy_kernel(n)).collect();
    let at: Vec<Float> = at.iter().map(|x| Float::with_val(wp, x)).collect();
    let mut prev: Option<Vec<Float>> = None;
    loop {
        let prepared: Vec<PreparedKernel> = kernels.iter().map(|k| samples.prepare(k)).collect();
        let mut vals = Vec::new();
        let mut scales = Vec::new();
        for pk in &prepared {
            for s in &at {
                let (v, sc) = samples.eval(pk, s);
                vals.push(v);
                scales.push(sc);
            }
        }
        if let Some(pv) = &prev {
            let stable = vals.iter().zip(pv).zip(&scales).all(|((v, p), sc)| {
                Float::with_val(wp, v - p).abs() <= (Float::with_val(wp, sc) >> (prec as i32 + 4))
            });
            if stable {
                return Ok((samples, prepared));
            }
        }
        prev = Some(vals);
        samples.refine()?;
    }
}

/// f_n(s) for each n in `ns` by the Cauchy integral (1/2πi)∮Q_n f dσ.
fn cauchy_f_n(sd: &SaddleData, s: &Float, ns: &[u32], prec: u32) -> Result<Vec<Float>> {
    let lam = Float::with_val(s.prec().max(sd.prec()), &sd.lambda);
    let (lo, hi) = if *s < lam { (s.clone(), lam) } else { (lam, s.clone()) };
    let (samples, prepared) = cauchy_values(sd, &lo, &hi, ns, std::slice::from_ref(s), prec)?;
    let s = Float::with_val(samples.wp, s);
    Ok(prepared.iter().map(|pk| Float::with_val(prec, samples.eval(pk, &s).0)).collect())
}

/// f_n(s, λ) via the Cauchy representation, at `prec` bits.
pub fn f_n(s: &Float, lambda: &Float, n: u32, prec: u32) -> Result<Float> {
    let sd = saddle(&Float::with_val(prec, lambda))?;
    if *s < 0 {
        return Err(PcfError::Domain("f_n is evaluated for s ≥ 0".into()));
    }
    Ok(cauchy_f_n(&sd, s, &[n], prec)?.remove(0))
}

/// f_n(s, λ) in double precision, for scans.
pub fn f_n_f64(s: f64, lambda: f64, n: u32) -> Result<f64> {
    if s < 0.0 {
        return Err(PcfError::Domain("f_n is evaluated for s ≥ 0".into()));
    }
    let sd = saddle(&fw(SCAN_PREC, lambda))?;
    fast::Saddle64::new(&sd).f_n(s, &cauchy_kernel(n))
}

/// f_0(λ), …, f_{n−1}(λ) from one contour around s = λ.
pub fn coefficients(lambda: &Float, n: u32, prec: u32) -> Result<Vec<Float>> {
    let sd = saddle(&Float::with_val(prec, lambda))?;
    let ns: Vec<u32> = (0..n).collect();
    let mut v = cauchy_f_n(&sd, &sd.lambda.clone(), &ns, prec)?;
    // f(λ) = 1 exactly by construction
    if let Some(first) = v.first_mut() {
        *first = fw(prec, 1);
    }
    Ok(v)
}

/// |φ_k(τ̃) − (−1)^k(2λ)^k f_k(λ)| with τ̃ = ½(1/√(4λ+1) − 1).
pub fn coeff_bridge(k: u32, lambda: &Float, ctx: &PrecisionContext) -> Result<Float> {
    let p = ctx.bits();
    let lam = Float::with_val(p, lambda);
    let table = crate::uniform::coeffs(k as usize)?;
    let tau = tau_of_lambda(&lam);
    let phi = table.phi[k as usize].eval(&tau);
    let fk = coefficients(&lam, k + 1, p)?.pop().unwrap();
    let mut rhs = Float::with_val(p, Float::with_val(p, &lam * 2u32).pow(k)) * fk;
    if k % 2 == 1 {
        rhs = -rhs;
    }
    Ok(Float::with_val(p, phi - rhs).abs())
}

/// τ̃ = ½(1/√(4λ+1) − 1).
pub fn tau_of_lambda(lambda: &Float) -> Float {
    let p = lambda.prec();
    let r = Float::with_val(p, Float::with_val(p, lambda * 4u32) + 1u32).sqrt().recip();
    Float::with_val(p, r - 1u32) / 2u32
}

/// The closed form f_1(λ) = −(2τ̃+1)²(20τ̃²+30τ̃+9)/(24(τ̃+1)).
pub fn f1_closed(lambda: &Float) -> Float {
    let p = lambda.prec();
    let t = tau_of_lambda(lambda);
    let a = Float::with_val(p, Float::with_val(p, &t * 2u32) + 1u32).square();
    let b = Float::with_val(p, Float::with_val(p, t.square_ref()) * 20u32) + Float::with_val(p, &t * 30u32) + 9u32;
    let c = Float::with_val(p, Float::with_val(p, &t + 1u32) * 24u32);
    Float::with_val(p, a * b / c) * -1i32
}

fn check_az(a: &Float, z: &Float) -> Result<()> {
    if *a < 0 {
        return Err(PcfError::Domain("the integral expansion needs a ≥ 0".into()));
    }
    if *z <= 0 {
        return Err(PcfError::Domain("the integral expansion needs z > 0".into()));
    }
    Ok(())
}

fn lambda_of(a: &Float, z: &Float) -> Float {
    let p = a.prec();
    Float::with_val(p, a / Float::with_val(p, z.square_ref()))
}

/// ln of e^{−z²/4−Az²} z^{−a−½}(1+4λ)^{−1/4}.
fn ln_prefactor(a: &Float, z: &Float, sd: &SaddleData) -> Float {
    let p = a.prec();
    let z2 = Float::with_val(p, z.square_ref());
    let e = Float::with_val(p, Float::with_val(p, &z2 / 4u32) + Float::with_val(p, &sd.a_const * &z2));
    let lz = Float::with_val(p, Float::with_val(p, a + 0.5f64) * Float::with_val(p, z.ln_ref()));
    let l4 = Float::with_val(p, Float::with_val(p, Float::with_val(p, &sd.lambda * 4u32) + 1u32).ln()) / 4u32;
    Float::with_val(p, -e) - lz - l4
}

/// Weight-function parameters: w_n(s,λ) = [(s/λ)^{−λ}e^{s−λ}]^{σ_n}.
#[derive(Debug, Clone)]
pub struct WeightConfig {
    pub sigma_n: f64,
}

impl Default for WeightConfig {
    fn default() -> Self {
        WeightConfig { sigma_n: 1.0 }
    }
}

/// S_n = a^{λσ}e^{−λσ}(1−σ/z²)^{λσ−a−½}Γ(a+½−λσ)/Γ(a+½).
pub fn s_factor(a: &Float, z: &Float, sigma_n: f64) -> Result<Float> {
    check_az(a, z)?;
    let p = a.prec();
    let z2 = Float::with_val(p, z.square_ref());
    let sig = fw(p, sigma_n);
    if z2 <= sig {
        return Err(PcfError::Precondition("S_n needs z² > σ_n".into()));
    }
    let ls = Float::with_val(p, lambda_of(a, z) * &sig);
    let ahalf = Float::with_val(p, a + 0.5f64);
    if ahalf <= ls {
        return Err(PcfError::Precondition("S_n needs a + ½ > λσ_n".into()));
    }
    let mut l = Float::with_val(p, -&ls);
    if !ls.is_zero() {
        l += Float::with_val(p, &ls * Float::with_val(p, a.ln_ref()));
    }
    let base = Float::with_val(p, 1u32 - Float::with_val(p, &sig / &z2));
    l += Float::with_val(p, Float::with_val(p, &ls - &ahalf) * base.ln());
    let (g1, _) = ln_gamma_real(&Float::with_val(p, &ahalf - &ls), p)?;
    let (g2, _) = ln_gamma_real(&ahalf, p)?;
    Ok(Float::with_val(p, l + g1 - g2).exp())
}

/// ln w_n(s,λ).
fn ln_weight(s: f64, lam: f64, sigma: f64) -> f64 {
    if lam == 0.0 {
        sigma * s
    } else {
        sigma * (s - lam - lam * (s / lam).ln())
    }
}

/// M_n(λ) = max(0, sup_{s≥0}|f_n(s)|/w_n(s,λ) − |f_n(λ)|), with the supremum
/// located on a 10³-point scan and refined by golden section in ln s.
#[derive(Debug, Clone, Serialize)]
pub struct WeightBound {
    pub lambda: f64,
    pub n: u32,
    /// f_n(λ) with its sign.
    pub f_n_lambda: f64,
    pub m_n: f64,
    /// s where |f_n|/w_n peaks.
    pub s_at_sup: f64,
}

const SCAN_PREC: u32 = 64;

pub fn weight_sup(lambda: f64, n: u32, cfg: &WeightConfig) -> Result<WeightBound> {
    if lambda < 0.0 || cfg.sigma_n < 0.0 {
        return Err(PcfError::Domain("λ and σ_n must be nonnegative".into()));
    }
    let lam_f = fw(SCAN_PREC, lambda);
    let sd = saddle(&lam_f)?;
    let sd64 = fast::Saddle64::new(&sd);
    let kernel = cauchy_kernel(n);
    let fl_signed = sd64.f_n(lambda, &kernel)?;
    let fl = fl_signed.abs();
    let ratio = |s: f64| -> Result<f64> {
        let v = sd64.f_n(s, &kernel)?.abs();
        Ok(v * (-ln_weight(s, lambda, cfg.sigma_n)).exp())
    };
    let mut grid: Vec<f64> = Vec::with_capacity(1001);
    let hi = if cfg.sigma_n > 0.0 {
        let mut h = lambda + 1.0;
        while ln_weight(h, lambda, cfg.sigma_n) < 25.0 {
            h = lambda + 2.0 * (h - lambda);
        }
        h
    } else {
        1e4 * lambda.max(1.0)
    };
    if lambda > 0.0 {
        for k in 0..400 {
            grid.push(lambda * 10f64.powf(-8.0 * (1.0 - k as f64 / 400.0)));
        }
    } else {
        grid.push(0.0);
    }
    let right = 1000 - grid.len();
    for k in 0..=right {
        let u = k as f64 / right as f64;
        grid.push(if cfg.sigma_n > 0.0 { lambda + (hi - lambda) * u * u } else { lambda + (hi - lambda) * u.powi(4) });
    }
    let vals: Vec<Result<f64>> = grid.par_iter().map(|&s| ratio(s)).collect();
    let mut best = (fl, lambda, 0usize);
    for (i, v) in vals.into_iter().enumerate() {
        let v = v?;
        if v > best.0 {
            best = (v, grid[i], i);
        }
    }
    if best.2 > 0 && best.2 + 1 < grid.len() && best.1 > 0.0 {
        // golden section in ln s between the scan neighbours
        let (mut lo, mut up) = (grid[best.2 - 1].max(1e-300).ln(), grid[best.2 + 1].ln());
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let mut x1 = up - g * (up - lo);
        let mut x2 = lo + g * (up - lo);
        let mut f1 = ratio(x1.exp())?;
        let mut f2 = ratio(x2.exp())?;
        for _ in 0..40 {
            if f1 > f2 {
                up = x2;
                x2 = x1;
                f2 = f1;
                x1 = up - g * (up - lo);
                f1 = ratio(x1.exp())?;
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + g * (up - lo);
                f2 = ratio(x2.exp())?;
            }
        }
        let (v, x) = if f1 > f2 { (f1, x1) } else { (f2, x2) };
        if v > best.0 {
            best = (v, x.exp(), best.2);
        }
    }
    Ok(WeightBound { lambda, n, f_n_lambda: fl_signed, m_n: (best.0 - fl).max(0.0), s_at_sup: best.1 })
}

/// [|f_n(λ)| + M_n(λ)]·S_n(a,z), a bound on |R_n(a,z)|.
pub fn weight_bound(a: &Float, z: &Float, n: u32, cfg: &WeightConfig) -> Result<(WeightBound, Float)> {
    check_az(a, z)?;
    let p = a.prec();
    let sn = s_factor(a, z, cfg.sigma_n)?;
    let wb = weight_sup(lambda_of(a, z).to_f64(), n, cfg)?;
    // pad for the 64-bit scan
    let k = fw(p, (wb.f_n_lambda.abs() + wb.m_n) * (1.0 + 1e-12));
    Ok((wb, Float::with_val(p, k * sn)))
}

/// U(a,z) ≈ e^{−z²/4−Az²}z^{−a−½}(1+4λ)^{−1/4} Σ_{k<n} f_k(λ)/z^{2k}, with
/// the weight-function bound on |R_n|/z^{2n} and the oracle remainder on request.
pub fn expansion_ibp(a: &Float, z: &Float, n: u32, exact: bool, ctx: &PrecisionContext) -> Result<BoundReport> {
    check_az(a, z)?;
    if n == 0 {
        return Err(PcfError::Precondition("n must be at least 1".into()));
    }
    let p = ctx.bits();
    let a = Float::with_val(p, a);
    let z = Float::with_val(p, z);
    let lam = lambda_of(&a, &z);
    let sd = saddle(&lam)?;
    let fk = coefficients(&lam, n, p)?;
    let z2 = Float::with_val(p, z.square_ref());
    let inv = Float::with_val(p, z2.recip_ref());
    let mut sum = fw(p, 0);
    let mut w = fw(p, 1);
    for f in &fk {
        sum += Float::with_val(p, f * &w);
        w *= &inv;
    }
    let pref = LogScaled { mantissa: Complex::with_val(p, 1), logscale: ln_prefactor(&a, &z, &sd) };
    let mut rep = BoundReport::new(Method::IntegralByParts, n, Complex::with_val(p, sum), pref);
    let (_, b) = weight_bound(&a, &z, n, &WeightConfig::default())?;
    rep.bound = Some(Float::with_val(p, b * Float::with_val(p, Pow::pow(&inv, n))));
    if exact {
        let (u, _) = u_real(&a, &z, ctx)?;
        rep.set_exact(&u.to_complex());
    }
    Ok(rep)
}

/// R_n(a,z) = z^{2n}(U/prefactor − Σ_{k<n} f_k(λ)/z^{2k}) from the oracle.
pub fn remainder_oracle_ibp(a: &Float, z: &Float, n: u32, ctx: &PrecisionContext) -> Result<Float> {
    check_az(a, z)?;
    let p = ctx.bits();
    let a = Float::with_val(p, a);
    let z = Float::with_val(p, z);
    let lam = lambda_of(&a, &z);
    let sd = saddle(&lam)?;
    let fk = if n == 0 { Vec::new() } else { coefficients(&lam, n, p)? };
    let z2 = Float::with_val(p, z.square_ref());
    let inv = Float::with_val(p, z2.recip_ref());
    let mut sum = fw(p, 0);
    let mut w = fw(p, 1);
    for f in &fk {
        sum += Float::with_val(p, f * &w);
        w *= &inv;
    }
    let (u, _) = u_real(&a, &z, ctx)?;
    let shift = Float::with_val(p, &u.logscale - ln_prefactor(&a, &z, &sd)).exp();
    let scaled = Float::with_val(p, &u.mantissa * shift);
    Ok(Float::with_val(p, Float::with_val(p, scaled - sum) * Float::with_val(p, Pow::pow(&z2, n))))
}

/// R_n(a,z) = z^{2a+1}/Γ(a+½) ∫_0^∞ s^{a−½}e^{−z²s} f_n(s) ds, with f_n from
/// the Cauchy representation at every quadrature node. One contour around
/// [0, S] serves all nodes; beyond S the integrand is below 10^{−digits−20}
/// of its peak.
pub fn remainder_exact_ibp(a: &Float, z: &Float, n: u32, ctx: &PrecisionContext) -> Result<Float> {
    check_az(a, z)?;
    let p = ctx.bits();
    let a = Float::with_val(p, a);
    let z = Float::with_val(p, z);
    let lam = lambda_of(&a, &z);
    let sd = saddle(&lam)?;
    let z2 = Float::with_val(p, z.square_ref());
    let ahalf = Float::with_val(p, &a + 0.5f64);
    let (lg, _) = ln_gamma_real(&ahalf, p)?;
    let ln_front = Float::with_val(p, Float::with_val(p, &a * 2u32) + 1u32) * Float::with_val(p, z.ln_ref()) - lg;
    let am = Float::with_val(p, &a - 0.5f64);

    // ln of s^{a−½}e^{−z²s} is concave for a > ½; walk right from its peak
    let (af, z2f) = (a.to_f64(), z2.to_f64());
    let expo = |s: f64| (af - 0.5) * s.ln() - z2f * s;
    let peak = ((af - 0.5) / z2f).max(1.0 / z2f);
    let drop = (ctx.digits() as f64 + 20.0) * std::f64::consts::LN_10;
    let mut upper = 2.0 * peak;
    while expo(peak) - expo(upper) < drop {
        upper *= 1.5;
    }
    let upper = upper.max(lam.to_f64());
    let zero = fw(p, 0);
    let hi = fw(p, upper);
    let probes = [zero.clone(), lam.clone(), Float::with_val(p, &hi / 2u32), hi.clone()];
    let (samples, prepared) = cauchy_values(&sd, &zero, &hi, &[n], &probes, p)?;
    let pk = &prepared[0];
    let integrand = |s: &Float| -> Float {
        let q = s.prec();
        if s.is_zero() {
            return Float::with_val(q, 0);
        }
        let e = Float::with_val(q, &am * Float::with_val(q, s.ln_ref())) - Float::with_val(q, &z2 * s) + &ln_front;
        let fv = samples.eval(pk, &Float::with_val(samples.wp, s)).0;
        Float::with_val(q, e.exp() * fv)
    };
    let pk_s = Float::with_val(p, peak);
    let mut breaks: Vec<Float> = vec![zero.clone()];
    for k in [0.5, 1.0, 2.0] {
        let b = Float::with_val(p, &pk_s * k);
        if b < hi {
            breaks.push(b);
        }
    }
    breaks.push(hi.clone());
    let tight = ctx.clone().with_quad_tol(ctx.eps(0).min(1e-8))?;
    let mut total = fw(p, 0);
    for w in breaks.windows(2) {
        let r = quad_interval(&integrand, &w[0], &w[1], &tight)?;
        total += r.value;
    }
    if !total.is_finite() {
        return Err(PcfError::Convergence("remainder integral is not finite".into()));
    }
    Ok(total)
}

/// ρ₁ = |R_1|/([|f_1(λ)| + M_1(λ)]S_1) at one (a, z).
pub fn rho1(a: &Float, z: &Float, ctx: &PrecisionContext) -> Result<f64> {
    let r = remainder_oracle_ibp(a, z, 1, ctx)?;
    let (_, b) = weight_bound(a, z, 1, &WeightConfig::default())?;
    Ok(Float::with_val(ctx.bits(), r.abs() / b).to_f64())
}

/// Default vertical-line abscissa: max(0.3, ½|s₋|), kept below |s₋|.
pub fn choose_sigma0(lambda: &Float) -> Result<Float> {
    let sd = saddle(lambda)?;
    let p = lambda.prec();
    let sm = Float::with_val(p, sd.s_minus.abs_ref());
    let half = Float::with_val(p, &sm / 2u32);
    let c = half.clone().max(&fw(p, 0.3));
    Ok(if c < sm { c } else { half })
}

/// max |f| on Re σ = −σ₀: |f(−σ₀)|, checked against a 10²-point scan of the line.
#[derive(Debug, Clone)]
pub struct LineMax {
    pub at_axis: f64,
    pub scan_max: f64,
    pub value: f64,
}

pub fn line_max_f(lambda: &Float, sigma0: &Float) -> Result<LineMax> {
    let sd = saddle(lambda)?;
    if *sigma0 <= 0 || Float::with_val(lambda.prec(), -sigma0) <= sd.s_minus {
        return Err(PcfError::Domain("σ₀ must lie in (0, |s₋|)".into()));
    }
    let (at_axis, scan_max) = fast::Saddle64::new(&sd).line_scan(sigma0.to_f64())?;
    Ok(LineMax { at_axis, scan_max, value: at_axis.max(scan_max) })
}

/// The coefficient C_n with |R_n| ≤ M(σ₀,λ)·C_n, from integrating the
/// majorants of |Q_n| along the line Re σ = −σ₀.
pub fn line_coefficient(n: u32, lambda: &Float, sigma0: &Float) -> Result<Float> {
    let p = lambda.prec();
    let pi = Float::with_val(p, Constant::Pi);
    let l = lambda;
    let s = sigma0;
    let pw = |x: &Float, k: u32| Float::with_val(p, Pow::pow(x, k));
    let (num, den) = match n {
        1 => (
            Float::with_val(p, l * 4u32) + Float::with_val(p, Float::with_val(p, &pi * 3u32) * s),
            Float::with_val(p, Float::with_val(p, &pi * 4u32) * pw(s, 2)),
        ),
        2 => (
            Float::with_val(p, pw(l, 2) * 16u32)
                + Float::with_val(p, Float::with_val(p, &pi * 11u32) * Float::with_val(p, l * s))
                + Float::with_val(p, pw(s, 2) * 26u32),
            Float::with_val(p, Float::with_val(p, &pi * 16u32) * pw(s, 4)),
        ),
        3 => (
            Float::with_val(p, pw(l, 3) * 768u32)
                + Float::with_val(p, Float::with_val(p, &pi * 549u32) * Float::with_val(p, pw(l, 2) * s))
                + Float::with_val(p, Float::with_val(p, l * pw(s, 2)) * 1376u32)
                + Float::with_val(p, Float::with_val(p, &pi * 243u32) * pw(s, 3)),
            Float::with_val(p, Float::with_val(p, &pi * 96u32) * pw(s, 6)),
        ),
        _ => return Err(PcfError::Unsupported(format!("line bound for n = {n}"))),
    };
    Ok(num / den)
}

/// The majorant of |Q_n| on σ = −σ₀ + iτ, as a function of r² = σ₀² + τ².
pub fn line_majorant(n: u32, lambda: f64, r2: f64) -> Result<f64> {
    let l = lambda;
    Ok(match n {
        1 => l / r2.powf(1.5) + 1.5 / r2,
        2 => 1.5 * l * l / r2.powf(2.5) + 11.0 * l / (4.0 * r2 * r2) + 13.0 / (8.0 * r2.powf(1.5)),
        3 => 15.0 * l.powi(3) / r2.powf(3.5) + 61.0 * l * l / (2.0 * r2.powi(3)) + 43.0 * l / (2.0 * r2.powf(2.5)) + 81.0 / (8.0 * r2 * r2),
        _ => return Err(PcfError::Unsupported(format!("line majorant for n = {n}"))),
    })
}

/// |R_n(a,z)| ≤ M(σ₀,λ)·C_n(λ,σ₀), n ∈ {1,2,3}; σ₀ defaults to choose_sigma0(λ).
pub fn cauchy_line_bound(a: &Float, z: &Float, n: u32, sigma0: Option<&Float>) -> Result<Float> {
    check_az(a, z)?;
    let lam = lambda_of(a, z);
    let s0 = match sigma0 {
        Some(s) => Float::with_val(lam.prec(), s),
        None => choose_sigma0(&lam)?,
    };
    let m = line_max_f(&lam, &s0)?;
    Ok(line_coefficient(n, &lam, &s0)? * m.value)
}

/// One row of the f_1 weight-bound curve.
#[derive(Debug, Clone, Serialize)]
pub struct Fig4Row {
    pub lambda: f64,
    pub f1: f64,
    pub m1: f64,
    pub scaled_bound: f64,
    /// ρ₁ at the chosen z.
    pub rho1: f64,
    /// z → ∞ limit |f_1|/(|f_1| + M_1); its dip sits exactly at the zero of f_1.
    pub rho1_limit: f64,
}

/// The zero of f_1(λ) in [8, 8.6], by bisection on the contour values.
pub fn f1_zero(prec: u32) -> Result<Float> {
    let f1 = |l: &Float| -> Result<Float> { Ok(coefficients(l, 2, prec)?.swap_remove(1)) };
    let mut lo = fw(prec, 8);
    let mut hi = Float::with_val(prec, 8.6f64);
    if !(f1(&lo)? < 0 && f1(&hi)? > 0) {
        return Err(PcfError::Convergence("f_1 has no sign change on [8, 8.6]".into()));
    }
    while Float::with_val(prec, &hi - &lo) > Float::with_val(prec, Float::i_exp(1, -(prec as i32) / 2)) {
        let mid = Float::with_val(prec, &lo + &hi) / 2u32;
        if f1(&mid)? < 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

fn fig4_row(lam: f64, z: f64, ctx: &PrecisionContext) -> Result<Fig4Row> {
    let wb = weight_sup(lam, 1, &WeightConfig::default())?;
    let zf = ctx.real(z);
    let a = Float::with_val(ctx.bits(), ctx.real(lam) * Float::with_val(ctx.bits(), zf.square_ref()));
    let r = remainder_oracle_ibp(&a, &zf, 1, ctx)?.to_f64().abs();
    let sn = s_factor(&a, &zf, 1.0)?.to_f64();
    let k1 = wb.f_n_lambda.abs() + wb.m_n;
    Ok(Fig4Row {
        lambda: lam,
        f1: wb.f_n_lambda,
        m1: wb.m_n,
        scaled_bound: (1.0 + 5.0 * lam) * k1,
        rho1: r / (k1 * sn),
        rho1_limit: wb.f_n_lambda.abs() / k1,
    })
}

/// (1+5λ)[|f_1(λ)| + M_1(λ)] and ρ₁(λ) on λ ∈ [0, λ_max], with a = λz² at
/// fixed z. A row at the zero of f_1 is added when it lies in range.
pub fn fig_weight_curves(lambda_max: f64, samples: usize, z: f64, ctx: &PrecisionContext) -> Result<Vec<Fig4Row>> {
    let mut lams: Vec<f64> = (0..=samples).map(|k| lambda_max * k as f64 / samples as f64).collect();
    if lambda_max >= 8.6 {
        let root = f1_zero(64)?.to_f64();
        if !lams.contains(&root) {
            lams.push(root);
            lams.sort_by(f64::total_cmp);
        }
    }
    let rows: Vec<Result<Fig4Row>> = lams.into_par_iter().map(|lam| fig4_row(lam, z, ctx)).collect();
    rows.into_iter().collect()
}
