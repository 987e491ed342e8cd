//! Double-exponential quadrature: tanh-sinh on finite pieces, exp-sinh on [a, ∞).
//!
//! Each rule refines by halving the step until two successive levels agree; the
//! difference of the last two levels is returned as the error estimate. A finite
//! piece that does not settle is bisected, within a fixed budget.

use rug::float::Constant;
use rug::{Complex, Float};

use crate::error::{PcfError, Result};
use crate::precision::PrecisionContext;

const MAX_LEVEL: u32 = 9;
const MAX_SPLIT_DEPTH: u32 = 10;

/// Value types the quadrature can accumulate.
pub trait QuadValue: Clone {
    fn zero(prec: u32) -> Self;
    /// self += v·w
    fn add_weighted(&mut self, v: &Self, w: &Float);
    fn add_assign(&mut self, v: &Self);
    fn scale(&mut self, s: &Float);
    fn mag(&self) -> Float;
    fn dist(&self, other: &Self) -> Float;
}

impl QuadValue for Float {
    fn zero(prec: u32) -> Self {
        Float::with_val(prec, 0)
    }
    fn add_weighted(&mut self, v: &Self, w: &Float) {
        *self += Float::with_val(self.prec(), v * w);
    }
    fn add_assign(&mut self, v: &Self) {
        *self += v;
    }
    fn scale(&mut self, s: &Float) {
        *self *= s;
    }
    fn mag(&self) -> Float {
        Float::with_val(64, self.abs_ref())
    }
    fn dist(&self, other: &Self) -> Float {
        Float::with_val(64, Float::with_val(self.prec(), self - other).abs())
    }
}

impl QuadValue for Complex {
    fn zero(prec: u32) -> Self {
        Complex::with_val(prec, 0)
    }
    fn add_weighted(&mut self, v: &Self, w: &Float) {
        *self += Complex::with_val(self.prec().0, v * w);
    }
    fn add_assign(&mut self, v: &Self) {
        *self += v;
    }
    fn scale(&mut self, s: &Float) {
        *self *= s;
    }
    fn mag(&self) -> Float {
        Float::with_val(64, self.abs_ref())
    }
    fn dist(&self, other: &Self) -> Float {
        let d = Complex::with_val(self.prec().0, self - other);
        Float::with_val(64, d.abs().real())
    }
}

#[derive(Debug, Clone)]
pub struct QuadResult<T> {
    pub value: T,
    /// Absolute error estimate.
    pub error: Float,
}

fn t_max(wp: u32) -> f64 {
    (2.0 * wp as f64 * std::f64::consts::LN_2 / std::f64::consts::PI).asinh() + 0.25
}

struct Node {
    x: Float,
    w: Float,
}

fn tanh_sinh_node(t: f64, a: &Float, b: &Float, h: &Float, wp: u32) -> Node {
    let half_pi = Float::with_val(wp, Constant::Pi) / 2u32;
    let tt = Float::with_val(wp, t);
    let u = Float::with_val(wp, tt.sinh_ref()) * &half_pi;
    let cu = Float::with_val(wp, u.cosh_ref());
    let w = Float::with_val(wp, tt.cosh_ref()) * &half_pi / cu.square() * h;
    let x = if t > 0.0 {
        let e = Float::with_val(wp, Float::with_val(wp, &u * 2u32).exp() + 1u32);
        Float::with_val(wp, b - Float::with_val(wp, h * 2u32) / e)
    } else if t < 0.0 {
        let e = Float::with_val(wp, Float::with_val(wp, &u * -2i32).exp() + 1u32);
        Float::with_val(wp, a + Float::with_val(wp, h * 2u32) / e)
    } else {
        Float::with_val(wp, a + h)
    };
    Node { x, w }
}

fn exp_sinh_node(t: f64, a: &Float, wp: u32) -> Node {
    let half_pi = Float::with_val(wp, Constant::Pi) / 2u32;
    let tt = Float::with_val(wp, t);
    let u = Float::with_val(wp, tt.sinh_ref()) * &half_pi;
    let eu = u.exp();
    let w = Float::with_val(wp, tt.cosh_ref()) * &half_pi * &eu;
    Node { x: Float::with_val(wp, a + &eu), w }
}

/// One double-exponential rule given a node generator over t ∈ [−tmax, tmax].
fn de_rule<T: QuadValue>(
    f: &dyn Fn(&Float) -> T,
    node: &dyn Fn(f64) -> Node,
    tmax: f64,
    tol: f64,
    wp: u32,
) -> Option<QuadResult<T>> {
    let tiny = Float::with_val(64, Float::i_exp(1, -(wp as i32) - 8));
    let h0 = 0.5f64;
    // Level 0 also fixes the effective t-range by trimming negligible tails.
    let mut raw = T::zero(wp);
    let mut vals: Vec<(f64, Float)> = Vec::new();
    let jmax = (tmax / h0).ceil() as i64;
    for j in -jmax..=jmax {
        let t = j as f64 * h0;
        let nd = node(t);
        let v = f(&nd.x);
        let contrib_mag = Float::with_val(64, v.mag() * &nd.w);
        vals.push((t, contrib_mag));
        raw.add_weighted(&v, &nd.w);
    }
    let total = raw.mag();
    let thresh = Float::with_val(64, &total * &tiny);
    let mut lo = -tmax;
    let mut hi = tmax;
    // Trim from each end while contributions are negligible.
    for (t, m) in vals.iter() {
        if *m <= thresh || !m.is_finite() {
            lo = *t;
        } else {
            break;
        }
    }
    for (t, m) in vals.iter().rev() {
        if *m <= thresh || !m.is_finite() {
            hi = *t;
        } else {
            break;
        }
    }
    let mut step = h0;
    let mut prev = raw.clone();
    prev.scale(&Float::with_val(wp, step));
    for _level in 1..=MAX_LEVEL {
        let half = step / 2.0;
        let n = ((hi - lo) / step).ceil() as i64;
        for j in 0..n {
            let t = lo + half + j as f64 * step;
            if t >= hi {
                break;
            }
            let nd = node(t);
            let v = f(&nd.x);
            raw.add_weighted(&v, &nd.w);
        }
        step = half;
        let mut cur = raw.clone();
        cur.scale(&Float::with_val(wp, step));
        let diff = cur.dist(&prev);
        let mag = cur.mag();
        if diff <= Float::with_val(64, &mag * tol) || diff.is_zero() {
            return Some(QuadResult { value: cur, error: diff });
        }
        prev = cur;
    }
    None
}

fn tanh_sinh_adaptive<T: QuadValue>(
    f: &dyn Fn(&Float) -> T,
    a: &Float,
    b: &Float,
    tol: f64,
    wp: u32,
    depth: u32,
) -> Result<QuadResult<T>> {
    let h = Float::with_val(wp, Float::with_val(wp, b - a) / 2u32);
    let node = |t: f64| tanh_sinh_node(t, a, b, &h, wp);
    if let Some(r) = de_rule(f, &node, t_max(wp), tol, wp) {
        return Ok(r);
    }
    if depth >= MAX_SPLIT_DEPTH {
        return Err(PcfError::Convergence(format!(
            "tanh-sinh on [{}, {}] exhausted the subdivision budget",
            a.to_f64(),
            b.to_f64()
        )));
    }
    let mid = Float::with_val(wp, a + &h);
    let left = tanh_sinh_adaptive(f, a, &mid, tol, wp, depth + 1)?;
    let right = tanh_sinh_adaptive(f, &mid, b, tol, wp, depth + 1)?;
    let mut value = left.value;
    value.add_assign(&right.value);
    Ok(QuadResult { value, error: left.error + right.error })
}

fn wp_of(ctx: &PrecisionContext) -> u32 {
    ctx.guarded(32)
}

/// ∫_a^b f.
pub fn quad_interval<T: QuadValue>(
    f: &dyn Fn(&Float) -> T,
    a: &Float,
    b: &Float,
    ctx: &PrecisionContext,
) -> Result<QuadResult<T>> {
    tanh_sinh_adaptive(f, a, b, ctx.quad_tol(), wp_of(ctx), 0)
}

/// ∫_a^∞ f.
pub fn quad_semi_infinite_from<T: QuadValue>(
    f: &dyn Fn(&Float) -> T,
    a: &Float,
    ctx: &PrecisionContext,
) -> Result<QuadResult<T>> {
    let wp = wp_of(ctx);
    let node = |t: f64| exp_sinh_node(t, a, wp);
    de_rule(f, &node, t_max(wp) + 1.0, ctx.quad_tol(), wp)
        .ok_or_else(|| PcfError::Convergence(format!("exp-sinh on [{}, inf)", a.to_f64())))
}

/// ∫_0^∞ f, split at 1.
pub fn quad_semi_infinite<T: QuadValue>(f: &dyn Fn(&Float) -> T, ctx: &PrecisionContext) -> Result<QuadResult<T>> {
    let one = Float::with_val(wp_of(ctx), 1);
    quad_piecewise(f, &[Float::with_val(wp_of(ctx), 0), one], ctx)
}

/// ∫_{b_0}^∞ f with finite pieces between consecutive breakpoints and a tail from the last one.
pub fn quad_piecewise<T: QuadValue>(
    f: &dyn Fn(&Float) -> T,
    breaks: &[Float],
    ctx: &PrecisionContext,
) -> Result<QuadResult<T>> {
    assert!(!breaks.is_empty());
    let wp = wp_of(ctx);
    let mut value = T::zero(wp);
    let mut error = Float::with_val(64, 0);
    for pair in breaks.windows(2) {
        if pair[1] <= pair[0] {
            continue;
        }
        let r = quad_interval(f, &pair[0], &pair[1], ctx)?;
        value.add_assign(&r.value);
        error += r.error;
    }
    let r = quad_semi_infinite_from(f, breaks.last().unwrap(), ctx)?;
    value.add_assign(&r.value);
    error += r.error;
    Ok(QuadResult { value, error })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn close(a: &Float, b: &Float, tol: f64) -> bool {
        let d = Float::with_val(a.prec(), a - b).abs();
        (d / Float::with_val(a.prec(), b.abs_ref())).to_f64() <= tol
    }

    #[test]
    fn exponential_integral() {
        let c = ctx();
        let wp = c.guarded(32);
        let r = quad_semi_infinite(&|w: &Float| Float::with_val(wp, -w).exp(), &c).unwrap();
        assert!(close(&r.value, &c.real(1.0), c.quad_tol()));
    }

    #[test]
    fn endpoint_singularity() {
        let c = ctx();
        let wp = c.guarded(32);
        let r = quad_semi_infinite(
            &|w: &Float| Float::with_val(wp, w.recip_sqrt_ref()) * Float::with_val(wp, -w).exp(),
            &c,
        )
        .unwrap();
        let sp = Float::with_val(c.bits(), Constant::Pi).sqrt();
        assert!(close(&r.value, &sp, c.quad_tol()));
        assert!(r.error.to_f64() < 1e-40);
    }

    #[test]
    fn gaussian() {
        let c = ctx();
        let wp = c.guarded(32);
        let r = quad_semi_infinite(&|w: &Float| Float::with_val(wp, -Float::with_val(wp, w.square_ref()) / 2u32).exp(), &c)
            .unwrap();
        let expect = Float::with_val(c.bits(), Float::with_val(c.bits(), Constant::Pi) / 2u32).sqrt();
        assert!(close(&r.value, &expect, c.quad_tol()));
    }

    #[test]
    fn gamma_integrals() {
        let c = ctx();
        let wp = c.guarded(32);
        for s in [0.5, 1.0, 1.5, 5.0] {
            let sm1 = Float::with_val(wp, s - 1.0);
            let r = quad_semi_infinite(
                &|w: &Float| {
                    let lw = Float::with_val(wp, w.ln_ref());
                    Float::with_val(wp, &sm1 * lw - w).exp()
                },
                &c,
            )
            .unwrap();
            let g = Float::with_val(c.bits(), Float::with_val(c.bits(), s).gamma());
            assert!(close(&r.value, &g, c.quad_tol()), "s={s}");
        }
    }

    #[test]
    fn complex_oscillatory() {
        // ∫_0^∞ e^{−w} e^{iw} dw = 1/(1−i)
        let c = ctx();
        let wp = c.guarded(32);
        let r = quad_semi_infinite(
            &|w: &Float| Complex::with_val(wp, (Float::with_val(wp, -w), Float::with_val(wp, w))).exp(),
            &c,
        )
        .unwrap();
        let expect = Complex::with_val(wp, (0.5, 0.5));
        let d = Complex::with_val(wp, &r.value - &expect).abs().real().to_f64();
        assert!(d < 1e-50);
    }

    #[test]
    fn finite_interval_with_kink_splits() {
        let c = PrecisionContext::new(30).unwrap();
        let wp = c.guarded(32);
        let r = quad_interval(
            &|x: &Float| Float::with_val(wp, Float::with_val(wp, x - 0.25f64).abs()),
            &Float::with_val(wp, 0),
            &Float::with_val(wp, 1),
            &c,
        );
        // |x−1/4| has a kink at a bisection point.
        let v = r.unwrap().value;
        assert!((v.to_f64() - 0.3125).abs() < 1e-12);
    }
}
