//! Reference values of U(a,z), U′(a,z), V(a,z), V′(a,z).
//!
//! Three independent routes:
//! * the integral U(a,z) = e^{−z²/4}/Γ(a+½) ∫_0^∞ w^{a−½} e^{−w²/2−zw} dw for a > −½,
//!   taken along a ray rotated towards the saddle when z is complex;
//! * downward three-term recurrence in a, seeded by two quadratures, for a ≤ −½;
//! * Maclaurin series through Kummer's M (moderate |z| only), used as a cross-check
//!   and as the independent source of V in the connection identities.

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float};

use crate::error::{PcfError, Result};
use crate::numerics::erfc::erfc_complex;
use crate::numerics::gamma::{gamma_real, ln_gamma_real};
use crate::numerics::quad::{quad_interval, quad_piecewise, QuadValue};
use crate::precision::PrecisionContext;
use crate::value::LogScaled;

/// U, U′ and (for real z) V, V′ at one point.
#[derive(Debug, Clone)]
pub struct PCFValues {
    pub u: LogScaled<Complex>,
    pub uprime: LogScaled<Complex>,
    pub v: Option<LogScaled<Float>>,
    pub vprime: Option<LogScaled<Float>>,
}

#[derive(Debug, Clone)]
pub struct ConnectionResidual {
    pub identity: &'static str,
    /// |lhs − rhs| relative to the largest term.
    pub residual: Float,
}

fn half(prec: u32) -> Float {
    Float::with_val(prec, 0.5)
}

/// Peak r* and width of r^p e^{−c2 r²/2 − c1 r} on r ≥ 0.
fn peak(p: f64, c2: f64, c1: f64) -> (f64, f64) {
    let (r, curv) = if p > 0.0 {
        let disc = (c1 * c1 + 4.0 * c2 * p).sqrt();
        let r = if c1 > 0.0 { 2.0 * p / (c1 + disc) } else { (disc - c1) / (2.0 * c2) };
        (r, c2 + p / (r * r))
    } else {
        let r = (-c1 / c2).max(0.0);
        let c = if r > 0.0 { c2 + p / (r * r) } else { c2 };
        (r, c.max(c2 / 4.0))
    };
    (r, 1.0 / curv.sqrt())
}

fn peak_breaks(p: f64, c1: f64, wp: u32) -> Vec<Float> {
    let (rstar, sigma) = peak(p, 1.0, c1);
    let mut breaks = vec![Float::with_val(wp, 0)];
    if rstar > 0.0 {
        let lo = rstar - 8.0 * sigma;
        if lo > 0.0 {
            breaks.push(Float::with_val(wp, lo));
        }
        breaks.push(Float::with_val(wp, rstar));
        breaks.push(Float::with_val(wp, rstar + 8.0 * sigma));
    } else {
        let s = 1.0 / (c1.max(0.0) + 1.0);
        breaks.push(Float::with_val(wp, s));
        breaks.push(Float::with_val(wp, 8.0 * s));
    }
    breaks
}

/// ∫_0^b r^p e^{g(r)} dr. For p < 0 the piece [0, b] is integrated in t = r^{p+1},
/// which removes the endpoint singularity: r^p dr = q dt with q = 1/(p+1).
fn singular_piece<T: QuadValue>(
    body: &dyn Fn(&Float, Float) -> T,
    p: &Float,
    b: &Float,
    ctx: &PrecisionContext,
) -> Result<T> {
    let wp = ctx.guarded(32);
    let p1 = Float::with_val(wp, p + 1u32);
    let q = Float::with_val(wp, p1.recip_ref());
    let c = Float::with_val(wp, &q * &p1) - 1u32;
    let lnq = Float::with_val(wp, q.ln_ref());
    let end = Float::with_val(wp, b.pow(&p1));
    let g = |t: &Float| {
        let r = Float::with_val(wp, t.pow(&q));
        body(&r, Float::with_val(wp, t.ln_ref()) * &c + &lnq)
    };
    Ok(quad_interval(&g, &Float::with_val(wp, 0), &end, ctx)?.value)
}

/// ∫_0^∞ w^p e^{−w²/2 − zw} dw.
///
/// Real z: along the real axis. Complex z = x + iy: down the imaginary axis to −iy,
/// then horizontally to +∞. On the horizontal leg the exponent is −t²/2 − xt plus a
/// constant, so nothing oscillates there; the vertical leg has finite length |y|.
fn ray_integral(p: &Float, z: &Complex, ctx: &PrecisionContext) -> Result<LogScaled<Complex>> {
    let wp = ctx.guarded(32);
    let zr = z.real().to_f64();
    let zi = z.imag().to_f64();
    let pf = p.to_f64();
    let pw = Float::with_val(wp, p);
    let breaks = peak_breaks(pf, zr, wp);
    let (tstar, _) = peak(pf, 1.0, zr);
    let h_log = |t: f64| -t * t / 2.0 - zr * t - zi * zi / 2.0 + pf / 2.0 * (t * t + zi * zi).ln();
    let mut l = if tstar > 0.0 || zi != 0.0 { h_log(tstar) } else { 0.0 };
    let ay = zi.abs();
    for k in (1..=32).filter(|_| ay > 0.0) {
        let r = ay * k as f64 / 32.0;
        l = l.max(r * r / 2.0 - r * ay + pf * r.ln());
    }
    let lmax = Float::with_val(wp, l);

    if zi == 0.0 {
        let zrr = Float::with_val(wp, z.real());
        let body = |r: &Float, powlog: Float| -> Float {
            let mut e = powlog;
            e -= Float::with_val(wp, r.square_ref()) / 2u32;
            e -= Float::with_val(wp, &zrr * r);
            e -= &lmax;
            e.exp()
        };
        let f = |r: &Float| body(r, Float::with_val(wp, r.ln_ref()) * &pw);
        let v = if pf < 0.0 {
            singular_piece(&body, &pw, &breaks[1], ctx)? + quad_piecewise(&f, &breaks[1..], ctx)?.value
        } else {
            quad_piecewise(&f, &breaks, ctx)?.value
        };
        let v = Complex::with_val(ctx.bits(), &v);
        return Ok(LogScaled { mantissa: v, logscale: Float::with_val(ctx.bits(), &lmax) });
    }

    let sg: i32 = if zi > 0.0 { 1 } else { -1 };
    let pi = Float::with_val(wp, Constant::Pi);
    // vertical leg w = −i·sg·r: w^p dw = r^p e^{−iπ sg (p+1)/2} dr, exponent r²/2 + i sg z r
    let th = Float::with_val(wp, &pw + 1u32) * &pi / 2u32 * -sg;
    let rot = Complex::with_val(wp, (th.cos_ref(), th.sin_ref()));
    let isz = Complex::with_val(wp, z * Complex::with_val(wp, (0, sg)));
    let body_v = |r: &Float, powlog: Float| -> Complex {
        let mut e = Complex::with_val(wp, powlog - &lmax + Float::with_val(wp, r.square_ref()) / 2u32);
        e += Complex::with_val(wp, &isz * r);
        e.exp()
    };
    let fv = |r: &Float| body_v(r, Float::with_val(wp, r.ln_ref()) * &pw);
    let yb = Float::with_val(wp, z.imag().abs_ref());
    let b1 = Float::with_val(wp, 1.0 / (1.0 + ay)).min(&yb);
    let mut vert = if pf < 0.0 {
        singular_piece(&body_v, &pw, &b1, ctx)?
    } else {
        quad_interval(&fv, &Float::with_val(wp, 0), &b1, ctx)?.value
    };
    if b1 < yb {
        vert += quad_interval(&fv, &b1, &yb, ctx)?.value;
    }
    // horizontal leg w = t − iy
    let w0 = Complex::with_val(wp, (0, -Float::with_val(wp, z.imag())));
    let fh = |t: &Float| -> Complex {
        let w = Complex::with_val(wp, &w0 + t);
        let mut e = Complex::with_val(wp, w.ln_ref()) * &pw;
        e -= Complex::with_val(wp, w.square_ref()) / 2u32;
        e -= Complex::with_val(wp, z * &w);
        e -= &lmax;
        e.exp()
    };
    let horiz = quad_piecewise(&fh, &breaks, ctx)?.value;
    let v = vert * rot + horiz;
    Ok(LogScaled { mantissa: Complex::with_val(ctx.bits(), &v), logscale: Float::with_val(ctx.bits(), &lmax) })
}

/// e^{−z²/4}/Γ(a+½), log-scaled.
fn integral_prefactor(a: &Float, z: &Complex, prec: u32) -> Result<LogScaled<Complex>> {
    let wp = prec + 16;
    let q = Complex::with_val(wp, -Complex::with_val(wp, z.square_ref()) / 4u32);
    let (lg, _) = ln_gamma_real(&Float::with_val(wp, a + half(wp)), wp)?;
    let im = q.imag().clone();
    let mantissa = Complex::with_val(prec, (im.cos_ref(), im.sin_ref()));
    Ok(LogScaled { mantissa, logscale: Float::with_val(prec, q.real() - lg) })
}

fn check_quadrature_a(a: &Float) -> Result<()> {
    if *a <= -0.5 {
        return Err(PcfError::Precondition(format!("integral representation needs a > -1/2, got {}", a.to_f64())));
    }
    Ok(())
}

/// U(a,z) from the integral representation.
pub fn u_quadrature(a: &Float, z: &Complex, ctx: &PrecisionContext) -> Result<LogScaled<Complex>> {
    check_quadrature_a(a)?;
    let p = Float::with_val(ctx.bits(), a - half(ctx.bits()));
    let i0 = ray_integral(&p, z, ctx)?;
    Ok(integral_prefactor(a, z, ctx.bits())?.mul(&i0))
}

/// U′(a,z) = −(z/2)U(a,z) − e^{−z²/4}/Γ(a+½) ∫ w^{a+½} e^{−w²/2−zw} dw.
pub fn uprime_quadrature(a: &Float, z: &Complex, ctx: &PrecisionContext) -> Result<LogScaled<Complex>> {
    Ok(u_pair_quadrature(a, z, ctx)?.1)
}

fn u_pair_quadrature(a: &Float, z: &Complex, ctx: &PrecisionContext) -> Result<(LogScaled<Complex>, LogScaled<Complex>)> {
    check_quadrature_a(a)?;
    let prec = ctx.bits();
    let pref = integral_prefactor(a, z, prec)?;
    let p0 = Float::with_val(prec, a - half(prec));
    let p1 = Float::with_val(prec, a + half(prec));
    let u = pref.mul(&ray_integral(&p0, z, ctx)?);
    let i1 = pref.mul(&ray_integral(&p1, z, ctx)?);
    let mhz = Complex::with_val(prec, z / 2u32) * -1i32;
    let up = u.scale(&mhz).add(&i1.neg());
    Ok((u, up))
}

fn steps_to_seed(a: &Float) -> u32 {
    // a0 = a + m ∈ (1/2, 3/2]
    let m = Float::with_val(64, half(64) - a).floor().to_f64() as i64 + 1;
    m.max(0) as u32
}

fn rel_diff(x: &Complex, y: &Complex) -> f64 {
    let p = x.prec().0;
    let d = Float::with_val(p, Complex::with_val(p, x - y).abs_ref());
    let m = Float::with_val(p, y.abs_ref());
    if m.is_zero() {
        return d.to_f64();
    }
    Float::with_val(64, d / m).to_f64()
}

/// U(a,z) and U(a−1,z) by downward recurrence from quadrature seeds, at the digits of `ctx`.
fn recur_once(a: &Float, z: &Complex, ctx: &PrecisionContext, self_check: bool) -> Result<(Complex, Complex)> {
    let wp = ctx.guarded(16);
    let m = steps_to_seed(a);
    let a0 = Float::with_val(wp, a + m);
    let a1 = Float::with_val(wp, &a0 + 1u32);
    let u0 = u_quadrature(&a0, z, ctx)?.value();
    let (u1, u1p) = u_pair_quadrature(&a1, z, ctx)?;
    let u1 = u1.value();
    if self_check {
        // U(a0) = z U(a0+1) + (a0+3/2) U(a0+2) and U′(a0+1) = (z/2) U(a0+1) − U(a0).
        let a2 = Float::with_val(wp, &a0 + 2u32);
        let u2 = u_quadrature(&a2, z, ctx)?.value();
        let rhs = Complex::with_val(wp, z * &u1) + Complex::with_val(wp, &u2 * Float::with_val(wp, &a0 + 1.5f64));
        let tol = ctx.eps(10);
        let r1 = rel_diff(&rhs, &u0);
        let dp = Complex::with_val(wp, Complex::with_val(wp, z * &u1) / 2u32 - &u0);
        let r2 = rel_diff(&dp, &u1p.value());
        if r1 > tol || r2 > tol {
            return Err(PcfError::SelfCheck(format!(
                "recurrence identities at a={}: residuals {r1:e}, {r2:e}",
                a0.to_f64()
            )));
        }
    }
    let mut hi = Complex::with_val(wp, u1);
    let mut cur = Complex::with_val(wp, u0);
    let mut b = a0;
    for _ in 0..=m {
        let next = Complex::with_val(wp, z * &cur) + Complex::with_val(wp, &hi * Float::with_val(wp, &b + 0.5f64));
        hi = cur;
        cur = next;
        b -= 1u32;
    }
    Ok((hi, cur))
}

/// U(a,z), U′(a,z) by recurrence, with a precision-doubling stability check.
fn u_by_recurrence(a: &Float, z: &Complex, ctx: &PrecisionContext) -> Result<(Complex, Complex)> {
    let digits = ctx.digits();
    let mut guard = 20u32;
    let c1 = PrecisionContext::new(digits + guard)?;
    let mut prev = recur_once(a, z, &c1, true)?;
    loop {
        let c2 = PrecisionContext::new(digits + 2 * guard)?;
        let cur = recur_once(a, z, &c2, false)?;
        let ok = |x: &Complex, y: &Complex| {
            let scale = Float::with_val(64, y.abs_ref());
            scale.is_zero() || rel_diff(x, y) < ctx.eps(-3)
        };
        if ok(&prev.0, &cur.0) && ok(&prev.1, &cur.1) {
            let prec = ctx.bits();
            let (u, um1) = cur;
            let up = Complex::with_val(prec, Complex::with_val(u.prec().0, z * &u) / 2u32 - &um1);
            return Ok((Complex::with_val(prec, u), up));
        }
        guard *= 2;
        if guard > 8 * digits {
            return Err(PcfError::SelfCheck(format!(
                "recurrence for U({}, z) unstable beyond {} guard digits",
                a.to_f64(),
                guard / 2
            )));
        }
        prev = cur;
    }
}

/// U(a,z) for real z, any real a (intended for a ≤ −½), by quadrature-seeded downward recurrence.
pub fn u_negative_a(a: &Float, z: &Float, ctx: &PrecisionContext) -> Result<LogScaled<Complex>> {
    let zc = Complex::with_val(ctx.bits(), z);
    let (u, _) = u_by_recurrence(a, &zc, ctx)?;
    Ok(LogScaled::<Complex>::exact(u).normalized())
}

/// U(a,z), U′(a,z) for real a and complex z, choosing quadrature or recurrence.
pub fn u_and_uprime(a: &Float, z: &Complex, ctx: &PrecisionContext) -> Result<(LogScaled<Complex>, LogScaled<Complex>)> {
    if *a > -0.5 {
        u_pair_quadrature(a, z, ctx)
    } else {
        let (u, up) = u_by_recurrence(a, z, ctx)?;
        Ok((LogScaled::<Complex>::exact(u).normalized(), LogScaled::<Complex>::exact(up).normalized()))
    }
}

/// U(a,x), U′(a,x) for real arguments.
pub fn u_real(a: &Float, x: &Float, ctx: &PrecisionContext) -> Result<(LogScaled<Float>, LogScaled<Float>)> {
    let z = Complex::with_val(ctx.bits(), x);
    let (u, up) = u_and_uprime(a, &z, ctx)?;
    Ok((u.re(), up.re()))
}

fn v_factor(a: &Float, prec: u32) -> Result<(Float, Float)> {
    let g = gamma_real(&Float::with_val(prec, a + half(prec)), prec)?;
    let pi = Float::with_val(prec, Constant::Pi);
    let s = Float::with_val(prec, Float::with_val(prec, a * &pi).sin());
    Ok((Float::with_val(prec, g / &pi), s))
}

/// V(a,x) = Γ(½+a)[sin(πa) U(a,x) + U(a,−x)]/π.
pub fn v_ref(a: &Float, x: &Float, ctx: &PrecisionContext) -> Result<LogScaled<Float>> {
    Ok(v_pair(a, x, ctx)?.0)
}

/// V′(a,x) = Γ(½+a)[sin(πa) U′(a,x) − U′(a,−x)]/π.
pub fn vprime_ref(a: &Float, x: &Float, ctx: &PrecisionContext) -> Result<LogScaled<Float>> {
    Ok(v_pair(a, x, ctx)?.1)
}

fn v_pair(a: &Float, x: &Float, ctx: &PrecisionContext) -> Result<(LogScaled<Float>, LogScaled<Float>)> {
    let prec = ctx.bits();
    let (k, s) = v_factor(a, prec)?;
    let (u, up) = u_real(a, x, ctx)?;
    let mx = Float::with_val(prec, -x);
    let (um, ump) = u_real(a, &mx, ctx)?;
    let v = u.scale(&s).add(&um).scale(&k);
    let vp = up.scale(&s).add(&ump.neg()).scale(&k);
    Ok((v, vp))
}

/// All four functions at real (a, x).
pub fn pcf_values(a: &Float, x: &Float, ctx: &PrecisionContext) -> Result<PCFValues> {
    let z = Complex::with_val(ctx.bits(), x);
    let (u, up) = u_and_uprime(a, &z, ctx)?;
    let (v, vp) = match v_pair(a, x, ctx) {
        Ok((v, vp)) => (Some(v), Some(vp)),
        Err(PcfError::Pole { .. }) => (None, None),
        Err(e) => return Err(e),
    };
    Ok(PCFValues { u, uprime: up, v, vprime: vp })
}

/// Values from the Maclaurin route.
#[derive(Debug, Clone)]
pub struct TaylorValues {
    pub u: Complex,
    pub uprime: Complex,
    pub v: Complex,
    pub vprime: Complex,
}

fn recip_gamma(x: &Float, prec: u32) -> Float {
    if x.is_integer() && *x <= 0 {
        Float::with_val(prec, 0)
    } else {
        Float::with_val(prec, x.gamma_ref()).recip()
    }
}

/// ln of the largest term of M(α, β, x), in natural-log units.
fn kummer_max_log(alpha: f64, beta: f64, x: f64) -> f64 {
    let mut l = 0.0f64;
    let mut best = 0.0f64;
    let mut k = 0.0;
    while k < 4.0 * x + alpha.abs() + 50.0 {
        let r = ((alpha + k) / (beta + k)).abs() * x / (k + 1.0);
        if r == 0.0 {
            break;
        }
        l += r.ln();
        best = best.max(l);
        k += 1.0;
    }
    best
}

fn kummer_m(alpha: &Float, beta: &Float, x: &Complex, wp: u32) -> Complex {
    let mut term = Complex::with_val(wp, 1);
    let mut sum = Complex::with_val(wp, 1);
    let mut max_mag = Float::with_val(64, 1);
    let xm = Float::with_val(64, x.abs_ref()).to_f64();
    let tiny = Float::with_val(64, Float::i_exp(1, -(wp as i32)));
    let mut k = 0u32;
    loop {
        let kf = Float::with_val(wp, k);
        term *= Float::with_val(wp, alpha + &kf) / Float::with_val(wp, beta + &kf);
        term *= x;
        term /= k + 1;
        sum += &term;
        k += 1;
        let mag = Float::with_val(64, term.abs_ref());
        if mag > max_mag {
            max_mag = mag.clone();
        }
        if term.is_zero() {
            break;
        }
        if (k as f64) > 2.0 * xm + alpha.to_f64().abs() + 2.0 && mag < Float::with_val(64, &max_mag * &tiny) {
            break;
        }
    }
    sum
}

/// U, U′, V, V′ from U(a,0), U′(a,0), V(a,0), V′(a,0) and the even/odd Kummer solutions.
pub fn taylor_values(a: &Float, z: &Complex, ctx: &PrecisionContext) -> Result<TaylorValues> {
    let prec = ctx.bits();
    let af = a.to_f64();
    let x_abs = Float::with_val(64, z.abs_ref()).to_f64().powi(2) / 2.0;
    let lmax = [(af / 2.0 + 0.25, 0.5), (af / 2.0 + 0.75, 1.5), (af / 2.0 + 1.25, 1.5), (af / 2.0 + 1.75, 2.5)]
        .iter()
        .map(|&(al, be)| kummer_max_log(al, be, x_abs))
        .fold(0.0f64, f64::max);
    let guard = (2.0 * lmax * std::f64::consts::LOG2_E + 2.0 * af.abs() + 64.0).ceil() as u32;
    let wp = prec + guard;
    let a = Float::with_val(wp, a);
    let z = Complex::with_val(wp, z);
    let x = Complex::with_val(wp, z.square_ref()) / 2u32;
    let e = Complex::with_val(wp, -Complex::with_val(wp, z.square_ref()) / 4u32).exp();
    let q = |v: f64| Float::with_val(wp, v);
    let al1 = Float::with_val(wp, &a / 2u32) + q(0.25);
    let al2 = Float::with_val(wp, &a / 2u32) + q(0.75);
    let m1 = kummer_m(&al1, &q(0.5), &x, wp);
    let m1d = kummer_m(&Float::with_val(wp, &al1 + 1u32), &q(1.5), &x, wp);
    let m2 = kummer_m(&al2, &q(1.5), &x, wp);
    let m2d = kummer_m(&Float::with_val(wp, &al2 + 1u32), &q(2.5), &x, wp);
    let u1 = Complex::with_val(wp, &e * &m1);
    let u2 = Complex::with_val(wp, &e * &m2) * &z;
    // u1′ = e^{−z²/4} z [−M1/2 + 2α1 M(α1+1, 3/2, x)]
    let u1p = Complex::with_val(wp, -Complex::with_val(wp, &m1 / 2u32) + Complex::with_val(wp, &m1d * Float::with_val(wp, &al1 * 2u32)))
        * &z
        * &e;
    // u2′ = e^{−z²/4} [M2 − (z²/2) M2 + z² (2α2/3) M(α2+1, 5/2, x)]
    let z2 = Complex::with_val(wp, z.square_ref());
    let inner = Complex::with_val(wp, &m2 - Complex::with_val(wp, &x * &m2))
        + Complex::with_val(wp, &z2 * &m2d) * Float::with_val(wp, Float::with_val(wp, &al2 * 2u32) / 3u32);
    let u2p = Complex::with_val(wp, inner * &e);
    let pi = Float::with_val(wp, Constant::Pi);
    let sqrt_pi = Float::with_val(wp, pi.sqrt_ref());
    let two = q(2.0);
    let pow2 = |e: Float| -> Float { Float::with_val(wp, (&two).pow(&e)) };
    let ha = Float::with_val(wp, &a / 2u32);
    let u0 = Float::with_val(wp, &sqrt_pi * pow2(Float::with_val(wp, -&ha) - q(0.25)))
        * recip_gamma(&Float::with_val(wp, q(0.75) + &ha), wp);
    let u0p = -Float::with_val(wp, &sqrt_pi * pow2(Float::with_val(wp, q(0.25) - &ha)))
        * recip_gamma(&Float::with_val(wp, q(0.25) + &ha), wp);
    let s1 = Float::with_val(wp, Float::with_val(wp, q(0.75) - &ha) * &pi).sin();
    let s2 = Float::with_val(wp, Float::with_val(wp, q(0.25) - &ha) * &pi).sin();
    let v0 = pow2(Float::with_val(wp, &ha + q(0.25))) * s1 * recip_gamma(&Float::with_val(wp, q(0.75) - &ha), wp);
    let v0p = pow2(Float::with_val(wp, &ha + q(0.75))) * s2 * recip_gamma(&Float::with_val(wp, q(0.25) - &ha), wp);
    let comb = |c1: &Float, c2: &Float, f1: &Complex, f2: &Complex| -> Complex {
        Complex::with_val(prec, Complex::with_val(wp, f1 * c1) + Complex::with_val(wp, f2 * c2))
    };
    Ok(TaylorValues {
        u: comb(&u0, &u0p, &u1, &u2),
        uprime: comb(&u0, &u0p, &u1p, &u2p),
        v: comb(&v0, &v0p, &u1, &u2),
        vprime: comb(&v0, &v0p, &u1p, &u2p),
    })
}

fn rel_residual(lhs: &Complex, rhs: &Complex, terms: &[&Complex]) -> Float {
    let p = lhs.prec().0;
    let d = Float::with_val(p, Complex::with_val(p, lhs - rhs).abs_ref());
    let mut m = Float::with_val(p, 0);
    for t in terms {
        let a = Float::with_val(p, t.abs_ref());
        if a > m {
            m = a;
        }
    }
    if m.is_zero() {
        d
    } else {
        d / m
    }
}

/// U·V′ − U′·V − √(2/π), relative to the larger product.
pub fn wronskian_residual(a: &Float, x: &Float, ctx: &PrecisionContext) -> Result<Float> {
    let p = ctx.bits();
    let vals = pcf_values(a, x, ctx)?;
    let u = vals.u.re().value();
    let up = vals.uprime.re().value();
    let v = vals.v.ok_or_else(|| PcfError::Pole { function: "gamma", arg: a.to_string() })?.value();
    let vp = vals.vprime.unwrap().value();
    let t1 = Complex::with_val(p, Float::with_val(p, &u * &vp));
    let t2 = Complex::with_val(p, Float::with_val(p, &up * &v));
    let target = Complex::with_val(p, Float::with_val(p, Float::with_val(p, Constant::Pi).recip() * 2u32).sqrt());
    let lhs = Complex::with_val(p, &t1 - &t2);
    Ok(rel_residual(&lhs, &target, &[&t1, &t2, &target]))
}

/// U(a,x) d/dx U(a,−x) − U′(a,x) U(a,−x) − √(2π)/Γ(a+½).
pub fn wronskian_u_residual(a: &Float, x: &Float, ctx: &PrecisionContext) -> Result<Float> {
    let p = ctx.bits();
    let (u, up) = u_real(a, x, ctx)?;
    let mx = Float::with_val(p, -x);
    let (um, ump) = u_real(a, &mx, ctx)?;
    let (u, up, um, ump) = (u.value(), up.value(), um.value(), ump.value());
    // d/dx U(a,−x) = −U′(a,−x)
    let t1 = Complex::with_val(p, -Float::with_val(p, &u * &ump));
    let t2 = Complex::with_val(p, Float::with_val(p, &up * &um));
    let g = gamma_real(&Float::with_val(p, a + half(p)), p)?;
    let target = Complex::with_val(p, Float::with_val(p, Float::with_val(p, Constant::Pi) * 2u32).sqrt() / g);
    let lhs = Complex::with_val(p, &t1 - &t2);
    Ok(rel_residual(&lhs, &target, &[&t1, &t2, &target]))
}

/// Residuals of the five connection formulas between U(a,±z), U(−a,±iz), V(a,±z).
/// V is taken from the Maclaurin route, so it is independent of the U oracle.
pub fn connection_residuals(a: &Float, z: &Complex, ctx: &PrecisionContext) -> Result<Vec<ConnectionResidual>> {
    let p = ctx.bits();
    let pi = Float::with_val(p, Constant::Pi);
    let g = gamma_real(&Float::with_val(p, a + half(p)), p)?;
    let mz = Complex::with_val(p, -z);
    let iz = Complex::with_val(p, z * Complex::with_val(p, (0, 1)));
    let miz = Complex::with_val(p, -&iz);
    let ma = Float::with_val(p, -a);
    let u_pz = u_and_uprime(a, z, ctx)?.0.value();
    let u_mz = u_and_uprime(a, &mz, ctx)?.0.value();
    let u_iz = u_and_uprime(&ma, &iz, ctx)?.0.value();
    let u_miz = u_and_uprime(&ma, &miz, ctx)?.0.value();
    let v_pz = taylor_values(a, z, ctx)?.v;
    let v_mz = taylor_values(a, &mz, ctx)?.v;
    let sin_pa = Float::with_val(p, Float::with_val(p, a * &pi).sin());
    let cos_pa = Float::with_val(p, Float::with_val(p, a * &pi).cos());
    let sqrt_2pi = Float::with_val(p, Float::with_val(p, &pi * 2u32).sqrt());
    let cis = |t: Float| Complex::with_val(p, (t.cos_ref(), t.sin_ref()));
    let i = Complex::with_val(p, (0, 1));
    let mut out = Vec::new();

    // cos²(πa) Γ(a+½) U(a,z) = π [V(a,−z) − sin(πa) V(a,z)]
    let lhs = Complex::with_val(p, &u_pz * Float::with_val(p, cos_pa.square_ref())) * &g;
    let r1 = Complex::with_val(p, &v_mz * &pi);
    let r2 = Complex::with_val(p, &v_pz * Float::with_val(p, &sin_pa * &pi));
    let rhs = Complex::with_val(p, &r1 - &r2);
    out.push(ConnectionResidual { identity: "I16", residual: rel_residual(&lhs, &rhs, &[&lhs, &r1, &r2]) });

    // π V(a,z) = Γ(½+a) [sin(πa) U(a,z) + U(a,−z)]
    let lhs = Complex::with_val(p, &v_pz * &pi);
    let r1 = Complex::with_val(p, &u_pz * Float::with_val(p, &sin_pa * &g));
    let r2 = Complex::with_val(p, &u_mz * &g);
    let rhs = Complex::with_val(p, &r1 + &r2);
    out.push(ConnectionResidual { identity: "I17", residual: rel_residual(&lhs, &rhs, &[&lhs, &r1, &r2]) });

    // √(2π) U(−a,iz) = Γ(½+a) [e^{−iπ(a/2−1/4)} U(a,z) + e^{iπ(a/2−1/4)} U(a,−z)]
    let th = Float::with_val(p, Float::with_val(p, a / 2u32) - 0.25f64) * &pi;
    let lhs = Complex::with_val(p, &u_iz * &sqrt_2pi);
    let r1 = Complex::with_val(p, &u_pz * cis(Float::with_val(p, -&th))) * &g;
    let r2 = Complex::with_val(p, &u_mz * cis(th.clone())) * &g;
    let rhs = Complex::with_val(p, &r1 + &r2);
    out.push(ConnectionResidual { identity: "I18", residual: rel_residual(&lhs, &rhs, &[&lhs, &r1, &r2]) });

    // U(a,z) = i e^{πia} U(a,−z) + √(2π)/Γ(a+½) e^{πi(a−½)/2} U(−a,iz)
    let ph = Float::with_val(p, Float::with_val(p, a - 0.5f64) * &pi) / 2u32;
    let r1 = Complex::with_val(p, &u_mz * &i) * cis(Float::with_val(p, a * &pi));
    let r2 = Complex::with_val(p, &u_iz * cis(ph.clone())) * Float::with_val(p, &sqrt_2pi / &g);
    let rhs = Complex::with_val(p, &r1 + &r2);
    out.push(ConnectionResidual { identity: "I19", residual: rel_residual(&u_pz, &rhs, &[&u_pz, &r1, &r2]) });

    // U(a,z) = −i e^{−πia} U(a,−z) + √(2π)/Γ(a+½) e^{−πi(a−½)/2} U(−a,−iz)
    let r1 = -Complex::with_val(p, &u_mz * &i) * cis(Float::with_val(p, -Float::with_val(p, a * &pi)));
    let r2 = Complex::with_val(p, &u_miz * cis(Float::with_val(p, -&ph))) * Float::with_val(p, &sqrt_2pi / &g);
    let rhs = Complex::with_val(p, &r1 + &r2);
    out.push(ConnectionResidual { identity: "I20", residual: rel_residual(&u_pz, &rhs, &[&u_pz, &r1, &r2]) });
    Ok(out)
}

/// W_{−a/2, 1/4}(w²/2) = 2^{a/2} w^{1/2} U(a,w), for Re w ≥ 0, w ≠ 0.
pub fn whittaker_ref(a: &Float, w: &Complex, ctx: &PrecisionContext) -> Result<LogScaled<Complex>> {
    if w.real().is_sign_negative() && !w.real().is_zero() || w.is_zero() {
        return Err(PcfError::Precondition("whittaker_ref needs Re w ≥ 0 and w ≠ 0".into()));
    }
    let p = ctx.bits();
    let (u, _) = u_and_uprime(a, w, ctx)?;
    let sw = Complex::with_val(p, w.sqrt_ref());
    let f = Float::with_val(p, Float::with_val(p, a / 2u32) * Float::with_val(p, 2u32).ln()).exp();
    Ok(u.scale(&Complex::with_val(p, sw * f)))
}

/// W_{−1/4, 1/4}(z) = √π z^{1/4} e^{z/2} erfc(√z), principal branches.
pub fn whittaker_erfc(z: &Complex, ctx: &PrecisionContext) -> Result<LogScaled<Complex>> {
    let p = ctx.bits();
    let wp = p + 32;
    let z = Complex::with_val(wp, z);
    let sz = Complex::with_val(wp, z.sqrt_ref());
    let e = erfc_complex(&sz, wp)?;
    let q = Complex::with_val(wp, sz.sqrt_ref());
    let sp = Float::with_val(wp, Float::with_val(wp, Constant::Pi).sqrt());
    let half_z = Complex::with_val(wp, &z / 2u32);
    let mant = Complex::with_val(p, e * q * sp * Complex::with_val(wp, (half_z.imag().cos_ref(), half_z.imag().sin_ref())));
    Ok(LogScaled { mantissa: mant, logscale: Float::with_val(p, half_z.real()) })
}
