//! Uniform expansions of U, V in elementary functions for large |a|.
//!
//! With μ = √(2|a|) and z = μt√2, the expansions are series in μ^{-2} whose
//! coefficients are exact rational polynomials in τ̃ (a > 0) or τ (a < 0).
//! Remainders are bounded through the total variation of those polynomials.

use std::borrow::Cow;
use std::sync::OnceLock;

use rayon::prelude::*;
use rug::float::Constant;
use rug::{Complex, Float, Rational};
use serde::Serialize;

use crate::error::{PcfError, Result};
use crate::numerics::gamma::ln_gamma_real;
use crate::numerics::poly::{poly_variation, RationalPoly};
use crate::oracle::{pcf_values, u_real};
use crate::precision::PrecisionContext;
use crate::report::{BoundReport, Method};
use crate::value::LogScaled;

pub const DEFAULT_ORDER: usize = 8;
/// Orders beyond this are refused; the rational coefficients grow quickly.
pub const MAX_ORDER: usize = 40;

/// φ_0..φ_N and ψ_0..ψ_N as exact polynomials in τ.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffTable {
    pub phi: Vec<RationalPoly>,
    pub psi: Vec<RationalPoly>,
}

impl CoeffTable {
    /// Highest index available.
    pub fn order(&self) -> usize {
        self.phi.len() - 1
    }
}

/// φ_{s+1} = −4τ²(τ+1)²φ_s′ − ¼∫_0^τ(20u²+20u+3)φ_s(u)du and
/// ψ_s = φ_s + 2τ(τ+1)(2τ+1)φ_{s−1} + 8τ²(τ+1)²φ_{s−1}′.
pub fn gen_coeffs(n: usize) -> CoeffTable {
    let tt = RationalPoly::from_ints(&[0, 0, 1, 2, 1]); // τ²(τ+1)²
    let cubic = RationalPoly::from_ints(&[0, 2, 6, 4]); // 2τ(τ+1)(2τ+1)
    let quad = RationalPoly::from_ints(&[3, 20, 20]);
    let m4 = RationalPoly::constant(-4);
    let quarter = Rational::from((-1, 4));
    let eight = RationalPoly::constant(8);
    let mut phi = vec![RationalPoly::one()];
    for s in 0..n {
        let p = &phi[s];
        let a = &(&m4 * &tt) * &p.derivative();
        let b = (&quad * p).antiderivative().scale(&quarter);
        phi.push(&a + &b);
    }
    let mut psi = vec![RationalPoly::one()];
    for s in 1..=n {
        let prev = &phi[s - 1];
        let term = &(&cubic * prev) + &(&(&eight * &tt) * &prev.derivative());
        psi.push(&phi[s] + &term);
    }
    CoeffTable { phi, psi }
}

/// The shared table for s ≤ 8, or a fresh one for higher orders.
pub fn coeffs(n: usize) -> Result<Cow<'static, CoeffTable>> {
    static DEFAULT: OnceLock<CoeffTable> = OnceLock::new();
    if n > MAX_ORDER {
        return Err(PcfError::Precondition(format!("order {n} exceeds {MAX_ORDER}")));
    }
    if n <= DEFAULT_ORDER {
        Ok(Cow::Borrowed(DEFAULT.get_or_init(|| gen_coeffs(DEFAULT_ORDER))))
    } else {
        Ok(Cow::Owned(gen_coeffs(n)))
    }
}

/// (τ̃, ξ̃) for real t: τ̃ = ½(t/√(t²+1) − 1), ξ̃ = ½t√(t²+1) + ½ asinh t.
pub fn map_pos(t: &Float) -> (Float, Float) {
    let p = t.prec();
    let s = Float::with_val(p, Float::with_val(p, t.square_ref()) + 1u32).sqrt();
    let tau = if *t >= 0 {
        // −1/(2s(s+t)), free of cancellation for large t
        let d = Float::with_val(p, Float::with_val(p, &s + t) * &s) * 2u32;
        Float::with_val(p, d.recip()) * -1i32
    } else {
        Float::with_val(p, Float::with_val(p, t / &s) - 1u32) / 2u32
    };
    let xi = Float::with_val(p, Float::with_val(p, t * &s) + Float::with_val(p, t.asinh_ref())) / 2u32;
    (tau, xi)
}

/// (τ, ξ) for t > 1: τ = ½(t/√(t²−1) − 1), ξ = ½t√(t²−1) − ½ acosh t.
pub fn map_neg(t: &Float) -> Result<(Float, Float)> {
    if *t <= 1 {
        return Err(PcfError::Domain(format!("t must exceed 1 for a < 0, got {}", t.to_f64())));
    }
    let p = t.prec();
    let s = Float::with_val(p, Float::with_val(p, t.square_ref()) - 1u32).sqrt();
    let d = Float::with_val(p, Float::with_val(p, &s + t) * &s) * 2u32;
    let tau = d.recip();
    let xi = Float::with_val(p, Float::with_val(p, t * &s) - Float::with_val(p, t.acosh_ref())) / 2u32;
    Ok((tau, xi))
}

/// ln h(μ) = −(μ²/4 + ¼)ln 2 − μ²/4 + (μ²/2 − ½)ln μ.
pub fn ln_h(mu: &Float) -> Float {
    let p = mu.prec();
    let m2 = Float::with_val(p, mu.square_ref());
    let ln2 = Float::with_val(p, Constant::Log2);
    let q = Float::with_val(p, &m2 / 4u32);
    let e2 = Float::with_val(p, &q + 0.25f64) * ln2;
    let em = Float::with_val(p, Float::with_val(p, &m2 / 2u32) - 0.5f64) * Float::with_val(p, mu.ln_ref());
    Float::with_val(p, em - e2 - q)
}

/// The same quantity in terms of a = μ²/2: −½ln 2 − a/2 + (a/2 − ¼)ln a.
pub fn ln_h_from_a(a: &Float) -> Float {
    let p = a.prec();
    let ln2 = Float::with_val(p, Constant::Log2);
    let half_a = Float::with_val(p, a / 2u32);
    let la = Float::with_val(p, Float::with_val(p, &half_a - 0.25f64) * Float::with_val(p, a.ln_ref()));
    Float::with_val(p, la - half_a - Float::with_val(p, ln2 / 2u32))
}

pub fn h_mu(mu: &Float) -> LogScaled<Float> {
    LogScaled { mantissa: Float::with_val(mu.prec(), 1), logscale: ln_h(mu) }
}

/// Which expansion a point belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Branch {
    /// a > 0, U(a, z) with z ≥ 0.
    PosZ,
    /// a > 0, U(a, −z) with z ≥ 0.
    NegZ,
    /// a < 0, t > 1.
    NegA,
}

impl Branch {
    pub fn as_str(&self) -> &'static str {
        match self {
            Branch::PosZ => "pos_z",
            Branch::NegZ => "neg_z",
            Branch::NegA => "neg_a",
        }
    }
}

#[derive(Debug, Clone)]
pub struct UniformPoint {
    pub branch: Branch,
    pub a: Float,
    pub mu: Float,
    pub t: Float,
    pub tau: Float,
    pub xi: Float,
    /// a/z², absent at z = 0.
    pub lambda: Option<Float>,
}

impl UniformPoint {
    pub fn new(branch: Branch, a: &Float, t: &Float, ctx: &PrecisionContext) -> Result<Self> {
        let p = ctx.bits();
        let a = Float::with_val(p, a);
        let t = Float::with_val(p, t);
        match branch {
            Branch::PosZ | Branch::NegZ => {
                if a <= 0 {
                    return Err(PcfError::Domain(format!("branch {} needs a > 0", branch.as_str())));
                }
                if t < 0 {
                    return Err(PcfError::Domain("t must be nonnegative".into()));
                }
            }
            Branch::NegA => {
                if a >= 0 {
                    return Err(PcfError::Domain("branch neg_a needs a < 0".into()));
                }
            }
        }
        let mu = Float::with_val(p, Float::with_val(p, a.abs_ref()) * 2u32).sqrt();
        let (tau, xi) = match branch {
            Branch::NegA => map_neg(&t)?,
            _ => map_pos(&t),
        };
        let lambda = if t.is_zero() {
            None
        } else {
            let l = Float::with_val(p, Float::with_val(p, t.square_ref()) * 4u32).recip();
            Some(if branch == Branch::NegA { l * -1i32 } else { l })
        };
        Ok(UniformPoint { branch, a, mu, t, tau, xi, lambda })
    }

    /// Picks the branch from the signs of a and z, with t = |z|/(μ√2).
    pub fn from_z(a: &Float, z: &Float, ctx: &PrecisionContext) -> Result<Self> {
        let p = ctx.bits();
        if a.is_zero() {
            return Err(PcfError::Domain("uniform expansions need a ≠ 0".into()));
        }
        let mu = Float::with_val(p, Float::with_val(p, a.abs_ref()) * 2u32).sqrt();
        let scale = Float::with_val(p, Float::with_val(p, 2u32).sqrt() * &mu);
        let t = Float::with_val(p, Float::with_val(p, z.abs_ref()) / &scale);
        let branch = if *a < 0 {
            if *z < 0 {
                return Err(PcfError::Domain("a < 0 is covered only for z > 2√|a|".into()));
            }
            Branch::NegA
        } else if *z < 0 {
            Branch::NegZ
        } else {
            Branch::PosZ
        };
        Self::new(branch, a, &t, ctx)
    }

    /// The argument of U at this point: μt√2, negated on the neg_z branch.
    pub fn z(&self) -> Float {
        let p = self.t.prec();
        let z = Float::with_val(p, Float::with_val(p, 2u32).sqrt() * &self.mu) * &self.t;
        if self.branch == Branch::NegZ {
            z * -1i32
        } else {
            z
        }
    }

    fn mu2(&self) -> Float {
        Float::with_val(self.mu.prec(), self.mu.square_ref())
    }

    /// ln of (t² ± 1)^{1/4}.
    fn ln_quarter(&self) -> Float {
        let p = self.t.prec();
        let t2 = Float::with_val(p, self.t.square_ref());
        let q = if self.branch == Branch::NegA { t2 - 1u32 } else { t2 + 1u32 };
        Float::with_val(p, q.ln()) / 4u32
    }

    fn mu2_xi(&self) -> Float {
        Float::with_val(self.t.prec(), self.mu2() * &self.xi)
    }
}

/// Σ_{s<n} (±1)^s c_s(τ)/μ^{2s}.
fn series(polys: &[RationalPoly], tau: &Float, mu2: &Float, n: usize, alternating: bool) -> Float {
    let p = tau.prec();
    let step = Float::with_val(p, mu2.recip_ref());
    let mut w = Float::with_val(p, 1);
    let mut acc = Float::with_val(p, 0);
    for (s, c) in polys.iter().take(n).enumerate() {
        let term = Float::with_val(p, c.eval(tau) * &w);
        if alternating && s % 2 == 1 {
            acc -= term;
        } else {
            acc += term;
        }
        w *= &step;
    }
    acc
}

/// Total variation of φ_s over the interval the branch needs.
///
/// pos_z: [τ̃, 0]; neg_z: [−1, τ̃]; neg_a: |φ_s(τ)|, since on τ ≥ 0 every
/// coefficient has one sign and φ_s is monotone from φ_s(0) = 0.
pub fn variation_phi(s: usize, tau: &Float, branch: Branch) -> Result<Float> {
    if s == 0 {
        return Err(PcfError::Precondition("variation needs s ≥ 1".into()));
    }
    let table = coeffs(s)?;
    let phi = &table.phi[s];
    let p = tau.prec();
    Ok(match branch {
        Branch::PosZ => poly_variation(phi, tau, &Float::with_val(p, 0), p),
        Branch::NegZ => poly_variation(phi, &Float::with_val(p, -1), tau, p),
        Branch::NegA => Float::with_val(p, phi.eval(tau).abs()),
    })
}

/// Closed-form upper bounds for the pos_z variations of φ_1..φ_3.
pub fn variation_majorant(s: usize, tau: &Float) -> Result<Float> {
    let p = tau.prec();
    let t2 = Float::with_val(p, tau.square_ref());
    let (num, c) = match s {
        1 => (Float::with_val(p, tau * -3i32) / 4u32, Float::with_val(p, 4.8f64)),
        2 => (Float::with_val(p, &t2 * 105u32) / 32u32, Float::with_val(p, 18u32)),
        3 => (Float::with_val(p, Float::with_val(p, &t2 * tau) * -3465i32) / 128u32, Float::with_val(p, 52u32)),
        _ => return Err(PcfError::Unsupported(format!("no majorant for s = {s}"))),
    };
    let den = Float::with_val(p, &t2 * c) + 1u32;
    Ok(num / den)
}

/// exp(2V(φ_1)/μ²)·V(φ_n)/μ^{2n}.
pub fn remainder_bound_uniform(point: &UniformPoint, n: usize) -> Result<Float> {
    if n == 0 {
        return Err(PcfError::Precondition("n must be at least 1".into()));
    }
    let p = point.tau.prec();
    let mu2 = point.mu2();
    let v1 = variation_phi(1, &point.tau, point.branch)?;
    let vn = variation_phi(n, &point.tau, point.branch)?;
    let e = Float::with_val(p, Float::with_val(p, v1 * 2u32) / &mu2).exp();
    let mu2n = Float::with_val(p, rug::ops::Pow::pow(&mu2, n as u32));
    Ok(Float::with_val(p, e * vn) / mu2n)
}

fn check_order(n: usize) -> Result<()> {
    if n == 0 {
        return Err(PcfError::Precondition("n must be at least 1".into()));
    }
    if n > MAX_ORDER {
        return Err(PcfError::Precondition(format!("order {n} exceeds {MAX_ORDER}")));
    }
    Ok(())
}

fn report(method: Method, n: usize, sum: Float, sign: i32, ln_pref: Float) -> BoundReport {
    let p = sum.prec();
    let pref = LogScaled { mantissa: Complex::with_val(p, sign), logscale: ln_pref };
    BoundReport::new(method, n as u32, Complex::with_val(p, sum), pref)
}

fn ln_gamma_half_plus(a: &Float) -> Result<Float> {
    let p = a.prec();
    let (lg, _) = ln_gamma_real(&Float::with_val(p, a + 0.5f64), p)?;
    Ok(lg)
}

/// An expansion for a function and its derivative at one point.
#[derive(Debug, Clone)]
pub struct UniformPair {
    pub point: UniformPoint,
    pub value: BoundReport,
    pub derivative: BoundReport,
}

/// U(a,z) ~ e^{−μ²ξ̃}/(√2 μ h (t²+1)^{1/4}) Σ(−1)^sφ_s/μ^{2s},
/// U′(a,z) ~ −(t²+1)^{1/4}e^{−μ²ξ̃}/(2h) Σ(−1)^sψ_s/μ^{2s}.
pub fn eval_pos_z(a: &Float, t: &Float, n: usize, exact: bool, ctx: &PrecisionContext) -> Result<UniformPair> {
    let pt = UniformPoint::new(Branch::PosZ, a, t, ctx)?;
    eval_a_positive(pt, n, exact, ctx)
}

/// U(a,−z) ~ √(2π)h e^{μ²ξ̃}/(Γ(½+a)(t²+1)^{1/4}) Σφ_s/μ^{2s},
/// U′(a,−z) ~ −√π μ h e^{μ²ξ̃}(t²+1)^{1/4}/Γ(½+a) Σψ_s/μ^{2s}.
pub fn eval_neg_z(a: &Float, t: &Float, n: usize, exact: bool, ctx: &PrecisionContext) -> Result<UniformPair> {
    let pt = UniformPoint::new(Branch::NegZ, a, t, ctx)?;
    eval_a_positive(pt, n, exact, ctx)
}

fn eval_a_positive(pt: UniformPoint, n: usize, exact: bool, ctx: &PrecisionContext) -> Result<UniformPair> {
    check_order(n)?;
    let table = coeffs(n)?;
    let p = ctx.bits();
    let mu2 = pt.mu2();
    let lh = ln_h(&pt.mu);
    let lq = pt.ln_quarter();
    let mx = pt.mu2_xi();
    let ln_mu = Float::with_val(p, pt.mu.ln_ref());
    let ln2 = Float::with_val(p, Constant::Log2);
    let ln_pi = Float::with_val(p, Float::with_val(p, Constant::Pi).ln());
    let (mut value, mut derivative) = if pt.branch == Branch::PosZ {
        let f = series(&table.phi, &pt.tau, &mu2, n, true);
        let g = series(&table.psi, &pt.tau, &mu2, n, true);
        let lf = Float::with_val(p, -&mx) - Float::with_val(p, &ln2 / 2u32) - &ln_mu - &lh - &lq;
        let lg = Float::with_val(p, &lq - &mx) - &ln2 - &lh;
        (report(Method::UniformPositiveZ, n, f, 1, lf), report(Method::UniformPositiveZ, n, g, -1, lg))
    } else {
        let lgam = ln_gamma_half_plus(&pt.a)?;
        let f = series(&table.phi, &pt.tau, &mu2, n, false);
        let g = series(&table.psi, &pt.tau, &mu2, n, false);
        let l2pi = Float::with_val(p, &ln2 + &ln_pi) / 2u32;
        let lf = Float::with_val(p, l2pi + &lh) + &mx - &lgam - &lq;
        let lg = Float::with_val(p, Float::with_val(p, &ln_pi / 2u32) + &ln_mu) + &lh + &mx + &lq - &lgam;
        (report(Method::UniformNegativeZ, n, f, 1, lf), report(Method::UniformNegativeZ, n, g, -1, lg))
    };
    value.bound = Some(remainder_bound_uniform(&pt, n)?);
    if exact {
        let (u, up) = u_real(&pt.a, &pt.z(), ctx)?;
        value.set_exact(&u.to_complex());
        derivative.set_exact(&up.to_complex());
    }
    Ok(UniformPair { point: pt, value, derivative })
}

/// The four a < 0 expansions at one point.
#[derive(Debug, Clone)]
pub struct NegativeAReports {
    pub point: UniformPoint,
    pub u: BoundReport,
    pub v: BoundReport,
    pub uprime: BoundReport,
    pub vprime: BoundReport,
}

fn neg_a_u(pt: &UniformPoint, n: usize, table: &CoeffTable) -> Result<BoundReport> {
    let p = pt.t.prec();
    let f = series(&table.phi, &pt.tau, &pt.mu2(), n, false);
    let lf = Float::with_val(p, ln_h(&pt.mu) - pt.mu2_xi()) - pt.ln_quarter();
    let mut r = report(Method::UniformNegativeA, n, f, 1, lf);
    r.bound = Some(remainder_bound_uniform(pt, n)?);
    Ok(r)
}

/// U(a,z) for a < 0 only; the cheap path used by the table.
pub fn eval_neg_a_u(a: &Float, t: &Float, n: usize, exact: bool, ctx: &PrecisionContext) -> Result<BoundReport> {
    check_order(n)?;
    let pt = UniformPoint::new(Branch::NegA, a, t, ctx)?;
    let table = coeffs(n)?;
    let mut r = neg_a_u(&pt, n, &table)?;
    if exact {
        let (u, _) = u_real(&pt.a, &pt.z(), ctx)?;
        r.set_exact(&u.to_complex());
    }
    Ok(r)
}

/// U ~ h e^{−μ²ξ}/(t²−1)^{1/4} Σφ_s/μ^{2s},
/// V ~ e^{μ²ξ}/(μ√π h (t²−1)^{1/4}) Σ(−1)^sφ_s/μ^{2s},
/// U′ ~ −μ h (t²−1)^{1/4}e^{−μ²ξ}/√2 Σψ_s/μ^{2s},
/// V′ ~ (t²−1)^{1/4}e^{μ²ξ}/(√(2π) h) Σ(−1)^sψ_s/μ^{2s}.
///
/// V is given the same bound as U; the derivatives carry none.
pub fn eval_neg_a(a: &Float, t: &Float, n: usize, exact: bool, ctx: &PrecisionContext) -> Result<NegativeAReports> {
    check_order(n)?;
    let pt = UniformPoint::new(Branch::NegA, a, t, ctx)?;
    let table = coeffs(n)?;
    let p = ctx.bits();
    let mu2 = pt.mu2();
    let lh = ln_h(&pt.mu);
    let lq = pt.ln_quarter();
    let mx = pt.mu2_xi();
    let ln_mu = Float::with_val(p, pt.mu.ln_ref());
    let ln2 = Float::with_val(p, Constant::Log2);
    let ln_pi = Float::with_val(p, Float::with_val(p, Constant::Pi).ln());
    let m = Method::UniformNegativeA;

    let mut u = neg_a_u(&pt, n, &table)?;
    let pv = series(&table.phi, &pt.tau, &mu2, n, true);
    let lv = Float::with_val(p, &mx - &ln_mu) - Float::with_val(p, &ln_pi / 2u32) - &lh - &lq;
    let mut v = report(m, n, pv, 1, lv);
    v.bound = u.bound.clone();
    let g = series(&table.psi, &pt.tau, &mu2, n, false);
    let lg = Float::with_val(p, &ln_mu + &lh) + &lq - &mx - Float::with_val(p, &ln2 / 2u32);
    let mut uprime = report(m, n, g, -1, lg);
    let q = series(&table.psi, &pt.tau, &mu2, n, true);
    let lqv = Float::with_val(p, &mx + &lq) - Float::with_val(p, Float::with_val(p, &ln2 + &ln_pi) / 2u32) - &lh;
    let mut vprime = report(m, n, q, 1, lqv);

    if exact {
        let vals = pcf_values(&pt.a, &pt.z(), ctx)?;
        u.set_exact(&vals.u);
        uprime.set_exact(&vals.uprime);
        if let (Some(vv), Some(vp)) = (&vals.v, &vals.vprime) {
            v.set_exact(&vv.to_complex());
            vprime.set_exact(&vp.to_complex());
        }
    }
    Ok(NegativeAReports { point: pt, u, v, uprime, vprime })
}

/// One of the three ratio tables of the uniform expansions (n = 3).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum UniformTableKind {
    PositiveZ,
    NegativeZ,
    NegativeA,
}

impl UniformTableKind {
    pub fn from_number(k: u32) -> Option<Self> {
        match k {
            3 => Some(Self::PositiveZ),
            4 => Some(Self::NegativeZ),
            5 => Some(Self::NegativeA),
            _ => None,
        }
    }

    pub fn a_values(&self) -> Vec<f64> {
        let v = [1.0, 5.0, 10.0, 50.0, 100.0];
        match self {
            Self::NegativeA => v.iter().map(|a| -a).collect(),
            _ => v.to_vec(),
        }
    }

    pub fn t_values(&self) -> Vec<f64> {
        match self {
            Self::NegativeA => vec![1.5, 2.0, 3.0, 5.0, 10.0, 20.0, 50.0],
            _ => vec![0.0, 1.0, 2.5, 5.0, 10.0, 25.0, 50.0],
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct UniformTable {
    pub kind: UniformTableKind,
    pub n: usize,
    pub a_values: Vec<f64>,
    pub t_values: Vec<f64>,
    /// ratios[i][j] = |exact remainder|/bound at a_values[i], t_values[j].
    pub ratios: Vec<Vec<f64>>,
}

/// Ratio |R_n|/bound at one table cell.
pub fn uniform_ratio(kind: UniformTableKind, a: f64, t: f64, n: usize, ctx: &PrecisionContext) -> Result<f64> {
    let a = ctx.real(a);
    let t = ctx.real(t);
    let rep = match kind {
        UniformTableKind::PositiveZ => eval_pos_z(&a, &t, n, true, ctx)?.value,
        UniformTableKind::NegativeZ => eval_neg_z(&a, &t, n, true, ctx)?.value,
        UniformTableKind::NegativeA => eval_neg_a_u(&a, &t, n, true, ctx)?,
    };
    rep.ratio_f64().ok_or_else(|| PcfError::Convergence("bound vanished".into()))
}

pub fn tables_uniform(kind: UniformTableKind, ctx: &PrecisionContext) -> Result<UniformTable> {
    let n = 3;
    let a_values = kind.a_values();
    let t_values = kind.t_values();
    let cells: Vec<(usize, usize)> =
        (0..a_values.len()).flat_map(|i| (0..t_values.len()).map(move |j| (i, j))).collect();
    let vals: Vec<Result<f64>> =
        cells.par_iter().map(|&(i, j)| uniform_ratio(kind, a_values[i], t_values[j], n, ctx)).collect();
    let mut ratios = vec![vec![0.0; t_values.len()]; a_values.len()];
    for ((i, j), v) in cells.into_iter().zip(vals) {
        ratios[i][j] = v?;
    }
    Ok(UniformTable { kind, n, a_values, t_values, ratios })
}

/// φ_1, φ_2, φ_3 sampled on [−1, 0]: rows (τ̃, φ_1, φ_2, φ_3).
pub fn fig_phi_curves(samples: usize) -> Vec<[f64; 4]> {
    let table = gen_coeffs(3);
    (0..=samples)
        .map(|k| {
            let tau = Float::with_val(64, -1.0 + k as f64 / samples as f64);
            [tau.to_f64(), table.phi[1].eval(&tau).to_f64(), table.phi[2].eval(&tau).to_f64(), table.phi[3].eval(&tau).to_f64()]
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct VariationRow {
    pub s: usize,
    pub tau: f64,
    pub phi: f64,
    /// Variation over [τ̃, 0].
    pub variation: f64,
    pub majorant: f64,
    /// Variation over [−1, τ̃].
    pub variation_left: f64,
    /// majorant + variation over [−1, −½].
    pub majorant_left: f64,
}

/// φ_s, its variations and their majorants on τ̃ ∈ [−½, 0], s = 1, 2, 3.
pub fn fig_variations(samples: usize) -> Result<Vec<VariationRow>> {
    let p = 128;
    let table = gen_coeffs(3);
    let mut rows = Vec::new();
    for s in 1..=3 {
        let left_half = variation_phi(s, &Float::with_val(p, -0.5), Branch::NegZ)?.to_f64();
        for k in 0..=samples {
            let tau = Float::with_val(p, -0.5 + 0.5 * k as f64 / samples as f64);
            let maj = variation_majorant(s, &tau)?.to_f64();
            rows.push(VariationRow {
                s,
                tau: tau.to_f64(),
                phi: table.phi[s].eval(&tau).to_f64(),
                variation: variation_phi(s, &tau, Branch::PosZ)?.to_f64(),
                majorant: maj,
                variation_left: variation_phi(s, &tau, Branch::NegZ)?.to_f64(),
                majorant_left: maj + left_half,
            });
        }
    }
    Ok(rows)
}

/// F̃Q̃ + G̃P̃ with every factor extracted from oracle values; exactly 2.
pub fn pair_relation_residual(a: &Float, t: &Float, ctx: &PrecisionContext) -> Result<Float> {
    let p = ctx.bits();
    let pos = eval_pos_z(a, t, 1, false, ctx)?;
    let neg = eval_neg_z(a, t, 1, false, ctx)?;
    let (u, up) = u_real(&pos.point.a, &pos.point.z(), ctx)?;
    let (um, ump) = u_real(&neg.point.a, &neg.point.z(), ctx)?;
    let scaled = |x: &LogScaled<Float>, r: &BoundReport| -> Float {
        let m = Float::with_val(p, &x.mantissa / r.prefactor.mantissa.real());
        let s = Float::with_val(p, &x.logscale - &r.prefactor.logscale).exp();
        m * s
    };
    let f = scaled(&u, &pos.value);
    let g = scaled(&up, &pos.derivative);
    let pp = scaled(&um, &neg.value);
    let q = scaled(&ump, &neg.derivative);
    let lhs = Float::with_val(p, &f * &q) + Float::with_val(p, &g * &pp);
    Ok(Float::with_val(p, lhs - 2u32).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn poly(c: &[(i64, i64)]) -> RationalPoly {
        RationalPoly::from_ratios(c)
    }

    #[test]
    fn reference_coefficients() {
        let t = gen_coeffs(3);
        // −(τ/12)(20τ²+30τ+9)
        assert_eq!(t.phi[1], poly(&[(0, 1), (-9, 12), (-30, 12), (-20, 12)]));
        // (τ/12)(28τ²+42τ+15)
        assert_eq!(t.psi[1], poly(&[(0, 1), (15, 12), (42, 12), (28, 12)]));
        // (τ²/288)(6160τ⁴+18480τ³+19404τ²+8028τ+945)
        assert_eq!(t.phi[2], poly(&[(0, 1), (0, 1), (945, 288), (8028, 288), (19404, 288), (18480, 288), (6160, 288)]));
        // −(τ²/288)(7280τ⁴+21840τ³+23028τ²+9684τ+1215)
        assert_eq!(t.psi[2], poly(&[(0, 1), (0, 1), (-1215, 288), (-9684, 288), (-23028, 288), (-21840, 288), (-7280, 288)]));
        let cubic = |c: [i64; 7]| {
            let mut v = vec![(0, 1); 3];
            v.extend(c.iter().rev().map(|&x| (x, 51840)));
            poly(&v)
        };
        assert_eq!(t.phi[3], cubic([-27227200, -122522400, -220540320, -200166120, -94064328, -20545650, -1403325]));
        assert_eq!(t.psi[3], cubic([30430400, 136936800, 246708000, 224494200, 106122312, 23489190, 1658475]));
    }

    #[test]
    fn degree_and_sign() {
        let t = gen_coeffs(8);
        for s in 1..=8 {
            assert_eq!(t.phi[s].degree(), Some(3 * s));
            assert_eq!(t.phi[s].coeff(0), 0);
            for c in t.phi[s].coeffs().iter().filter(|c| **c != 0) {
                assert_eq!(c.cmp0() == std::cmp::Ordering::Greater, s % 2 == 0, "s={s}");
            }
        }
        assert_eq!(coeffs(5).unwrap().order(), DEFAULT_ORDER);
        assert_eq!(coeffs(9).unwrap().order(), 9);
    }

    #[test]
    fn maps() {
        let c = ctx();
        let (tau, xi) = map_pos(&c.real(0.0));
        assert_eq!(tau, -0.5);
        assert_eq!(xi, 0);
        let (tau, _) = map_pos(&c.real(1e8));
        assert!(tau < 0 && tau > -1e-16);
        let (tau, xi) = map_neg(&c.real(1.25)).unwrap();
        let third = Float::with_val(c.bits(), 1) / 3u32;
        assert!(Float::with_val(c.bits(), &tau - &third).abs().to_f64() < c.eps(2));
        let ln2 = Float::with_val(c.bits(), Constant::Log2);
        let expect = Float::with_val(c.bits(), 15) / 32u32 - ln2 / 2u32;
        assert!(Float::with_val(c.bits(), &xi - &expect).abs().to_f64() < c.eps(2));
        assert!(map_neg(&c.real(1.0)).is_err());
        // monotone in t
        let mut prev = map_pos(&c.real(-5.0));
        for k in -49..200 {
            let cur = map_pos(&c.real(k as f64 / 10.0));
            assert!(cur.0 > prev.0 && cur.1 > prev.1);
            prev = cur;
        }
    }

    #[test]
    fn xi_derivative_in_tau() {
        // dξ̃/dτ̃ = 1/(8τ̃²(1+τ̃)²)
        let c = ctx();
        let p = c.bits();
        let h = Float::with_val(p, 1e-20);
        for k in 0..100 {
            let t = c.real(-3.0 + 0.07 * k as f64);
            let (t0, x0) = map_pos(&Float::with_val(p, &t - &h));
            let (t1, x1) = map_pos(&Float::with_val(p, &t + &h));
            let fd = Float::with_val(p, &x1 - &x0) / Float::with_val(p, &t1 - &t0);
            let (tau, _) = map_pos(&t);
            let u = Float::with_val(p, &tau * Float::with_val(p, &tau + 1u32));
            let expect = Float::with_val(p, Float::with_val(p, u.square_ref()) * 8u32).recip();
            let rel = Float::with_val(p, (fd - &expect) / &expect).abs().to_f64();
            assert!(rel < 1e-30, "t={} rel={rel}", t.to_f64());
        }
    }

    #[test]
    fn h_forms_agree() {
        let c = ctx();
        let p = c.bits();
        let mu = Float::with_val(p, 2).sqrt();
        let l1 = ln_h(&mu);
        let l2 = ln_h_from_a(&c.real(1.0));
        assert!(Float::with_val(p, &l1 - &l2).abs().to_f64() < c.eps(2));
        // a = 1: h = 2^{-1/2}e^{-1/2}
        let ln2 = Float::with_val(p, Constant::Log2);
        let expect = Float::with_val(p, ln2 + 1u32) / -2i32;
        assert!(Float::with_val(p, &l1 - &expect).abs().to_f64() < c.eps(2));
        let mu = c.real(200.0).sqrt();
        let big = ln_h(&mu);
        let small = ln_h_from_a(&c.real(100.0));
        assert!(big.is_finite());
        assert!(Float::with_val(p, Float::with_val(p, &big - &small) / &small).abs().to_f64() < c.eps(3));
        assert_eq!(h_mu(&mu).logscale, big);
    }

    #[test]
    fn points_and_branches() {
        let c = ctx();
        let pt = UniformPoint::from_z(&c.real(2.0), &c.real(-6.0), &c).unwrap();
        assert_eq!(pt.branch, Branch::NegZ);
        assert!((pt.t.to_f64() - 3.0 / 2f64.sqrt()).abs() < 1e-15);
        assert!((pt.z().to_f64() + 6.0).abs() < 1e-15);
        assert!((pt.lambda.as_ref().unwrap().to_f64() - 2.0 / 36.0).abs() < 1e-15);
        let pt = UniformPoint::from_z(&c.real(-2.0), &c.real(6.0), &c).unwrap();
        assert_eq!(pt.branch, Branch::NegA);
        assert!(pt.tau >= 0);
        assert!(UniformPoint::from_z(&c.real(-2.0), &c.real(2.5), &c).is_err());
        assert!(UniformPoint::new(Branch::PosZ, &c.real(-1.0), &c.real(1.0), &c).is_err());
    }

    #[test]
    fn variations_and_majorants() {
        let p = 128;
        let f = |x: f64| Float::with_val(p, x);
        assert_eq!(variation_phi(1, &f(0.0), Branch::PosZ).unwrap(), 0);
        let v: Vec<f64> = (1..=3).map(|s| variation_phi(s, &f(-0.5), Branch::NegZ).unwrap().to_f64()).collect();
        for (got, want) in v.iter().zip([0.169152, 0.160128, 0.241453]) {
            assert!((got - want).abs() < 1e-6, "{got} vs {want}");
        }
        assert_eq!(variation_majorant(1, &f(0.0)).unwrap(), 0);
        assert!((variation_majorant(1, &f(-0.5)).unwrap().to_f64() - 0.375 / 2.2).abs() < 1e-15);
        assert!((variation_majorant(3, &f(-0.5)).unwrap().to_f64() - 3465.0 / 1024.0 / 14.0).abs() < 1e-15);
        assert!(variation_majorant(4, &f(-0.1)).is_err());
        // near the origin φ_1 is monotone, so the variation is φ_1 itself
        let tau = f(-0.05);
        let t = gen_coeffs(1);
        let direct = Float::with_val(p, t.phi[1].eval(&tau).abs());
        assert!(Float::with_val(p, variation_phi(1, &tau, Branch::PosZ).unwrap() - direct).abs() < 1e-35);
        // The s = 2 majorant dips below the variation on a short stretch
        // near τ̃ = −0.47, by under 0.05% relative; everywhere else it holds.
        for k in 0..=1000 {
            let tau = f(-0.5 * k as f64 / 1000.0);
            for s in 1..=3 {
                let var = variation_phi(s, &tau, Branch::PosZ).unwrap();
                let maj = variation_majorant(s, &tau).unwrap();
                let t = tau.to_f64();
                if s == 2 && (-0.4746..=-0.4633).contains(&t) {
                    let rel = Float::with_val(p, &var - &maj) / &var;
                    assert!(rel.to_f64() < 4.5e-4, "tau={t}");
                } else {
                    assert!(maj >= var, "s={s} tau={t}");
                }
            }
        }
        let at = f(-0.469);
        assert!(variation_majorant(2, &at).unwrap() < variation_phi(2, &at, Branch::PosZ).unwrap());
    }

    #[test]
    fn bound_scales_like_mu_power() {
        let c = ctx();
        let t = c.real(1.0);
        let b1 = remainder_bound_uniform(&UniformPoint::new(Branch::PosZ, &c.real(1000.0), &t, &c).unwrap(), 3).unwrap();
        let b2 = remainder_bound_uniform(&UniformPoint::new(Branch::PosZ, &c.real(4000.0), &t, &c).unwrap(), 3).unwrap();
        let r = Float::with_val(c.bits(), &b1 / &b2).to_f64();
        assert!((r / 64.0 - 1.0).abs() < 1e-3, "{r}");
    }

    #[test]
    fn first_term_is_one() {
        let c = ctx();
        let r = eval_pos_z(&c.real(3.0), &c.real(0.7), 1, false, &c).unwrap();
        assert_eq!(r.value.partial_sum, 1);
        let r = eval_neg_a(&c.real(-3.0), &c.real(1.7), 1, false, &c).unwrap();
        assert_eq!(r.u.partial_sum, 1);
        assert_eq!(r.v.partial_sum, 1);
    }

    #[test]
    fn large_a_agrees_to_seventeen_digits() {
        let c = ctx();
        let r = eval_pos_z(&c.real(100.0), &c.real(50.0), 3, true, &c).unwrap();
        let sum = r.value.partial_sum.real().clone();
        let expect = c.parse("0.99999962523819834799").unwrap();
        assert!(Float::with_val(c.bits(), &sum - &expect).abs().to_f64() < 1e-20);
        let exact = Float::with_val(c.bits(), &sum - r.value.exact_remainder.as_ref().unwrap());
        let expect = c.parse("0.99999962523819834461").unwrap();
        assert!(Float::with_val(c.bits(), &exact - &expect).abs().to_f64() < 1e-20);
    }

    #[test]
    fn table_spot_values() {
        let c = PrecisionContext::new(40).unwrap();
        let cases = [
            (UniformTableKind::PositiveZ, 1.0, 0.0, 0.21493),
            (UniformTableKind::PositiveZ, 1.0, 1.0, 0.14455),
            (UniformTableKind::PositiveZ, 10.0, 2.5, 0.98214),
            (UniformTableKind::NegativeZ, 1.0, 0.0, 0.29041),
            (UniformTableKind::NegativeZ, 5.0, 1.0, 0.02071),
            (UniformTableKind::NegativeA, -1.0, 1.5, 0.29990),
            (UniformTableKind::NegativeA, -10.0, 3.0, 0.97608),
            (UniformTableKind::NegativeA, -50.0, 5.0, 0.99850),
        ];
        for (k, a, t, want) in cases {
            let got = uniform_ratio(k, a, t, 3, &c).unwrap();
            assert!((got - want).abs() < 1e-3, "{k:?} a={a} t={t}: {got} vs {want}");
        }
    }

    #[test]
    fn pair_relation() {
        let c = ctx();
        for a in [1.0, 5.0, 20.0] {
            for t in [0.0, 1.0, 3.0] {
                let r = pair_relation_residual(&c.real(a), &c.real(t), &c).unwrap();
                assert!(r.to_f64() < c.eps(10), "a={a} t={t} r={}", r.to_f64());
            }
        }
    }

    #[test]
    fn negative_a_functions_against_oracle() {
        let c = ctx();
        let r = eval_neg_a(&c.real(-20.0), &c.real(4.0), 4, true, &c).unwrap();
        for rep in [&r.u, &r.v, &r.uprime, &r.vprime] {
            let rem = rep.exact_remainder.as_ref().unwrap().to_f64();
            assert!(rem < 1e-5, "{rem}");
        }
        assert!(r.u.ratio_f64().unwrap() <= 1.0);
        assert!(r.uprime.bound.is_none());
    }

    #[test]
    fn derivative_expansions_against_oracle() {
        let c = ctx();
        let pos = eval_pos_z(&c.real(8.0), &c.real(1.5), 4, true, &c).unwrap();
        let neg = eval_neg_z(&c.real(8.0), &c.real(1.5), 4, true, &c).unwrap();
        for rep in [&pos.derivative, &neg.derivative] {
            assert!(rep.exact_remainder.as_ref().unwrap().to_f64() < 1e-4);
        }
    }
}
