//! Large-z expansions of U and V at fixed a, and the Whittaker-function remainder bounds.

use rayon::prelude::*;
use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float};

use crate::error::{PcfError, Result};
use crate::numerics::gamma::chi_prec;
use crate::numerics::hyp2f1::hyp2f1_half;
use crate::oracle::{whittaker_erfc, whittaker_ref};
use crate::precision::PrecisionContext;
pub use crate::report::{BoundReport, Method, RegionLabel, VariationMode};
use crate::value::LogScaled;

/// Coefficients a_s of W_{k,1/4}(z) ~ z^k e^{−z/2} Σ a_s z^{−s}, k = −a/2.
#[derive(Debug, Clone)]
pub struct WhittakerSeries {
    pub a: Float,
    /// a_0 … a_n.
    pub coeffs: Vec<Float>,
}

impl WhittakerSeries {
    pub fn new(a: &Float, n: u32, prec: u32) -> Self {
        let mut coeffs = Vec::with_capacity(n as usize + 1);
        let mut c = Float::with_val(prec, 1);
        let b = Float::with_val(prec, a + 0.5f64);
        for s in 0..=n {
            coeffs.push(c.clone());
            // a_{s+1}/a_s = −(b+2s)(b+2s+1)/(4(s+1))
            let f1 = Float::with_val(prec, &b + 2 * s);
            let f2 = Float::with_val(prec, &f1 + 1u32);
            c = -(c * f1 * f2) / (4 * (s + 1));
        }
        WhittakerSeries { a: Float::with_val(prec, a), coeffs }
    }

    pub fn n(&self) -> u32 {
        self.coeffs.len() as u32 - 1
    }

    /// Σ_{s<m} a_s z^{−s}.
    pub fn partial_sum(&self, z: &Complex, m: u32) -> Complex {
        let p = self.coeffs[0].prec();
        let inv = Complex::with_val(p, z.recip_ref());
        let mut pw = Complex::with_val(p, 1);
        let mut sum = Complex::with_val(p, 0);
        for c in self.coeffs.iter().take(m as usize) {
            sum += Complex::with_val(p, &pw * c);
            pw *= &inv;
        }
        sum
    }

    /// z^k e^{−z/2}, principal branch.
    pub fn prefactor(&self, z: &Complex) -> LogScaled<Complex> {
        let p = self.coeffs[0].prec();
        let k = Float::with_val(p, &self.a / 2u32) * -1i32;
        let mut l = Complex::with_val(p, z.ln_ref()) * &k;
        l -= Complex::with_val(p, z / 2u32);
        log_to_scaled(&l)
    }
}

/// e^{l} as mantissa e^{i Im l}, logscale Re l.
fn log_to_scaled(l: &Complex) -> LogScaled<Complex> {
    let p = l.prec().0;
    let im = l.imag();
    LogScaled { mantissa: Complex::with_val(p, (im.cos_ref(), im.sin_ref())), logscale: l.real().clone() }
}

/// Σ_{s<n} t_s with t_0 = 1 and t_{s+1}/t_s = sign·(b+2s)(b+2s+1)/((s+1)·2z²).
fn pcf_series(b: &Float, z2: &Complex, n: u32, alternating: bool) -> Complex {
    let p = z2.prec().0;
    let inv = Complex::with_val(p, Complex::with_val(p, z2 * 2u32).recip_ref());
    let mut t = Complex::with_val(p, 1);
    let mut sum = Complex::with_val(p, 0);
    for s in 0..n {
        sum += &t;
        let f1 = Float::with_val(p, b + 2 * s);
        let f2 = Float::with_val(p, &f1 + 1u32);
        t *= Complex::with_val(p, &inv * Float::with_val(p, f1 * f2)) / (s + 1);
        if alternating {
            t = -t;
        }
    }
    sum
}

/// ln z for z = r e^{iθ}, θ unrestricted.
fn polar_ln(r: &Float, theta: &Float) -> Complex {
    let p = r.prec();
    Complex::with_val(p, (Float::with_val(p, r.ln_ref()), theta))
}

fn u_branch(a: &Float, lnz: &Complex, z2: &Complex, n: u32) -> LogScaled<Complex> {
    let p = z2.prec().0;
    // e^{−z²/4} z^{−a−1/2}
    let e = Float::with_val(p, -a) - 0.5f64;
    let l = Complex::with_val(p, z2 / 4u32) * -1i32 + Complex::with_val(p, lnz * &e);
    let b = Float::with_val(p, a + 0.5f64);
    log_to_scaled(&l).scale(&pcf_series(&b, z2, n, true))
}

fn v_branch(a: &Float, lnz: &Complex, z2: &Complex, n: u32) -> LogScaled<Complex> {
    let p = z2.prec().0;
    // e^{z²/4} z^{a−1/2}
    let e = Float::with_val(p, a - 0.5f64);
    let l = Complex::with_val(p, z2 / 4u32) + Complex::with_val(p, lnz * &e);
    let b = Float::with_val(p, 0.5f64 - a);
    log_to_scaled(&l).scale(&pcf_series(&b, z2, n, false))
}

fn check_phase(theta: f64, lo: f64, hi: f64, sector: &'static str) -> Result<()> {
    if theta > lo && theta < hi {
        Ok(())
    } else {
        Err(PcfError::PhaseOutOfSector { phase: theta, sector })
    }
}

fn nonzero(z: &Complex) -> Result<()> {
    if z.is_zero() {
        Err(PcfError::Domain("z = 0".into()))
    } else {
        Ok(())
    }
}

/// e^{−z²/4} z^{−a−½} Σ_{s<n} (−1)^s (a+½)_{2s}/(s!(2z²)^s), |ph z| < 3π/4.
pub fn u_series_partial(a: &Float, z: &Complex, n: u32, ctx: &PrecisionContext) -> Result<LogScaled<Complex>> {
    nonzero(z)?;
    let p = ctx.bits();
    let theta = Float::with_val(p, z.arg_ref());
    let q = 0.75 * std::f64::consts::PI;
    check_phase(theta.to_f64(), -q, q, "|ph z| < 3π/4")?;
    let z = Complex::with_val(p, z);
    let z2 = Complex::with_val(p, z.square_ref());
    Ok(u_branch(a, &Complex::with_val(p, z.ln_ref()), &z2, n))
}

/// √(2/π) e^{z²/4} z^{a−½} Σ_{s<n} (½−a)_{2s}/(s!(2z²)^s), |ph z| < π/4.
pub fn v_series_partial(a: &Float, z: &Complex, n: u32, ctx: &PrecisionContext) -> Result<LogScaled<Complex>> {
    nonzero(z)?;
    let p = ctx.bits();
    let theta = Float::with_val(p, z.arg_ref());
    let q = std::f64::consts::FRAC_PI_4;
    check_phase(theta.to_f64(), -q, q, "|ph z| < π/4")?;
    let z = Complex::with_val(p, z);
    let z2 = Complex::with_val(p, z.square_ref());
    let c = Float::with_val(p, Float::with_val(p, Constant::Pi).recip() * 2u32).sqrt();
    Ok(v_branch(a, &Complex::with_val(p, z.ln_ref()), &z2, n).scale(&Complex::with_val(p, c)))
}

/// Compound expansion of U(a, r e^{iθ}) for π/4 < θ < 5π/4 or −5π/4 < θ < −π/4:
/// the recessive U-series (n_plus terms) plus ±i√(2π)/Γ(a+½) e^{∓aπi} times the
/// dominant V-type series (n_minus terms).
pub fn u_compound_polar(
    a: &Float,
    r: &Float,
    theta: &Float,
    n_plus: u32,
    n_minus: u32,
    ctx: &PrecisionContext,
) -> Result<LogScaled<Complex>> {
    if r.is_zero() {
        return Err(PcfError::Domain("z = 0".into()));
    }
    let p = ctx.bits();
    let pi = std::f64::consts::PI;
    let th = theta.to_f64();
    let upper = th > 0.25 * pi && th < 1.25 * pi;
    if !upper {
        check_phase(th, -1.25 * pi, -0.25 * pi, "π/4 < |ph z| < 5π/4")?;
    }
    let lnz = polar_ln(&Float::with_val(p, r), &Float::with_val(p, theta));
    let z2 = Complex::with_val(p, &lnz * 2u32).exp();
    let rec = u_branch(a, &lnz, &z2, n_plus);
    let dom = v_branch(a, &lnz, &z2, n_minus);
    let g = Float::with_val(p, Float::with_val(p, a + 0.5f64).gamma_ref());
    let sign: i32 = if upper { 1 } else { -1 };
    if g.is_infinite() || g.is_nan() {
        // 1/Γ(a+½) = 0: the dominant part drops out
        return Ok(rec);
    }
    let pi_f = Float::with_val(p, Constant::Pi);
    let ang = Float::with_val(p, a * &pi_f) * -sign;
    let c = Complex::with_val(p, (ang.cos_ref(), ang.sin_ref()))
        * Complex::with_val(p, (0, sign))
        * Float::with_val(p, Float::with_val(p, &pi_f * 2u32).sqrt() / g);
    Ok(rec.add(&dom.scale(&c)))
}

/// Compound expansion at a complex z, with θ = ph z ∈ (−π, π].
pub fn u_compound(a: &Float, z: &Complex, n_plus: u32, n_minus: u32, ctx: &PrecisionContext) -> Result<LogScaled<Complex>> {
    nonzero(z)?;
    let p = ctx.bits();
    let r = Float::with_val(p, z.abs_ref());
    let theta = Float::with_val(p, z.arg_ref());
    u_compound_polar(a, &r, &theta, n_plus, n_minus, ctx)
}

/// Region of the Whittaker variable z for κ = |a|.
///
/// R1: Re z ≥ κ. R4: |z| ≥ 2κ and |Im z| ≤ κ. R2: above the line Im z = κ for
/// Re z ≤ 0 and outside the circle |z| = κ for Re z > 0 (and conjugates).
/// R1ext: Re z > max(0, −a). R2ext: Im z ≠ 0. Precedence R1 > R4 > R2 > R1ext > R2ext.
/// With `strict` only R1, R2 and R4 are reported.
pub fn classify_region(a: &Float, z: &Complex, strict: bool) -> RegionLabel {
    let [r1, r2, r4] = region_membership(a, z);
    if r1 {
        return RegionLabel::R1;
    }
    if r4 {
        return RegionLabel::R4;
    }
    if r2 {
        return RegionLabel::R2;
    }
    if strict {
        return RegionLabel::Outside;
    }
    if z.real().to_f64() > (-a.to_f64()).max(0.0) {
        return RegionLabel::R1Ext;
    }
    if z.imag().to_f64() != 0.0 {
        return RegionLabel::R2Ext;
    }
    RegionLabel::Outside
}

/// Membership in R1, R2, R4 separately, without precedence.
pub fn region_membership(a: &Float, z: &Complex) -> [bool; 3] {
    let kappa = a.to_f64().abs();
    let x = z.real().to_f64();
    let y = z.imag().to_f64().abs();
    let r = x.hypot(y);
    let r1 = x >= kappa;
    let r4 = r >= 2.0 * kappa && y <= kappa && r > 0.0;
    let r2 = y > 0.0 && if x <= 0.0 { y >= kappa } else { r >= kappa };
    [r1, r2, r4]
}

#[derive(Debug, Clone)]
pub struct BoundQuantities {
    pub kappa: Float,
    /// κ/|z|, before any R4 modification.
    pub sigma: Float,
    pub alpha: Float,
    pub beta: Float,
    pub delta: Float,
    /// (½ + ½√(1−4σ²))^{−1/2}; defined for σ ≤ ½.
    pub v: Option<Float>,
    pub theta: Float,
    /// cos φ = κ/|z|, φ ∈ [0, π/2].
    pub phi: Float,
}

pub fn bound_quantities(a: &Float, z: &Complex, region: RegionLabel, ctx: &PrecisionContext) -> Result<BoundQuantities> {
    nonzero(z)?;
    let p = ctx.guarded(16);
    let kappa = Float::with_val(p, a.abs_ref());
    let r = Float::with_val(p, z.abs_ref());
    let sigma = Float::with_val(p, &kappa / &r);
    if sigma >= 1 {
        return Err(PcfError::SigmaTooLarge { sigma: sigma.to_f64() });
    }
    let v = if sigma <= 0.5 {
        let s = Float::with_val(p, 1u32 - Float::with_val(p, sigma.square_ref()) * 4u32).sqrt();
        Some(Float::with_val(p, Float::with_val(p, s / 2u32) + 0.5f64).recip_sqrt())
    } else {
        None
    };
    let (s, rinv) = if region == RegionLabel::R4 {
        let v = v.clone().ok_or(PcfError::SigmaTooLarge { sigma: sigma.to_f64() })?;
        (Float::with_val(p, &sigma * &v), Float::with_val(p, &v / &r))
    } else {
        (sigma.clone(), Float::with_val(p, r.recip_ref()))
    };
    if s >= 1 {
        return Err(PcfError::SigmaTooLarge { sigma: s.to_f64() });
    }
    let one_m = Float::with_val(p, 1u32 - &s);
    let alpha = Float::with_val(p, one_m.recip_ref());
    let beta = (Float::with_val(p, 1u32 + &s) + Float::with_val(p, &s * &alpha) * &rinv) / 2u32;
    let a2 = Float::with_val(p, Float::with_val(p, a.square_ref()) / 4u32 + 0.1875f64).abs();
    let delta = a2 + Float::with_val(p, &s * Float::with_val(p, 1u32 + Float::with_val(p, &s / 4u32))) * Float::with_val(p, alpha.square_ref());
    let theta = Float::with_val(p, z.arg_ref());
    let phi = Float::with_val(p, sigma.acos_ref());
    Ok(BoundQuantities { kappa, sigma, alpha, beta, delta, v, theta, phi })
}

fn rpow(z: &Complex, n: u32, p: u32) -> Float {
    Float::with_val(p, z.abs_ref()).pow(-(n as i32))
}

/// Upper bound for V_P(t^{−n}) by region.
pub fn variation_bound(n: u32, a: &Float, z: &Complex, region: RegionLabel, ctx: &PrecisionContext) -> Result<Float> {
    let p = ctx.guarded(16);
    let zn = rpow(z, n, p);
    match region {
        RegionLabel::R1 | RegionLabel::R1Ext => Ok(zn),
        RegionLabel::R2 | RegionLabel::R2Ext => Ok(chi_prec(n, p) * zn),
        RegionLabel::R4 => {
            let q = bound_quantities(a, z, region, ctx)?;
            Ok(r4_variation(&chi_prec(n, p), n, &q, p) * zn)
        }
        RegionLabel::Outside => Err(PcfError::OutsideRegion),
    }
}

/// [c + σv²n]vⁿ with the unmodified σ.
fn r4_variation(c: &Float, n: u32, q: &BoundQuantities, p: u32) -> Float {
    let v = q.v.as_ref().expect("R4 implies σ ≤ 1/2");
    let vv = Float::with_val(p, v.square_ref());
    let t = Float::with_val(p, &q.sigma * &vv) * n;
    (Float::with_val(p, c + t)) * Float::with_val(p, v.pow(n))
}

/// The variation of t^{−n} along the straight path z + τe^{iφ}:
/// n|z|^{−n} ∫_0^∞ du/(u²+2cos(θ−φ)u+1)^{(n+1)/2}.
///
/// This is |z|^{−n} F(n/2, ½; n/2+1; sin²(θ−φ)) when cos(θ−φ) ≥ 0. For
/// cos(θ−φ) < 0 the same hypergeometric value belongs to the reflected integrand,
/// and the integral is 2χ(n)/|sin(θ−φ)|ⁿ − F.
pub fn variation_2f1(n: u32, a: &Float, z: &Complex, ctx: &PrecisionContext) -> Result<Float> {
    let p = ctx.guarded(16);
    let kappa = Float::with_val(p, a.abs_ref());
    let r = Float::with_val(p, z.abs_ref());
    if r.is_zero() {
        return Err(PcfError::Domain("z = 0".into()));
    }
    let sigma = Float::with_val(p, &kappa / &r);
    if sigma > 1 {
        return Err(PcfError::SigmaTooLarge { sigma: sigma.to_f64() });
    }
    Ok(path_integral(n, z, &sigma, ctx)? * rpow(z, n, p))
}

/// n∫_0^∞ du/(u²+2cos(θ−φ)u+1)^{(n+1)/2}, |θ| taken so conjugates agree.
fn path_integral(n: u32, z: &Complex, sigma: &Float, ctx: &PrecisionContext) -> Result<Float> {
    let p = ctx.guarded(16);
    let theta = Float::with_val(p, z.arg_ref()).abs();
    let phi = Float::with_val(p, sigma.acos_ref());
    let d = Float::with_val(p, &theta - &phi);
    let s = Float::with_val(p, d.sin_ref());
    let c = Float::with_val(p, d.cos_ref());
    let x = Float::with_val(p, s.square_ref()).min(&Float::with_val(p, 1));
    let f = hyp2f1_half(n, &x, &PrecisionContext::new(ctx.digits() + 5)?)?;
    if c >= 0 {
        Ok(Float::with_val(p, f))
    } else {
        let sn = Float::with_val(p, s.abs_ref()).pow(n);
        Ok(chi_prec(n, p) * 2u32 / sn - f)
    }
}

/// The variation used for V_P(t^{−m}) in the given mode.
fn mode_variation(m: u32, a: &Float, z: &Complex, region: RegionLabel, mode: VariationMode, q: &BoundQuantities, ctx: &PrecisionContext) -> Result<Float> {
    match mode {
        VariationMode::Piecewise => variation_bound(m, a, z, region, ctx),
        VariationMode::Hyp2f1 => {
            let p = ctx.guarded(16);
            match region {
                RegionLabel::R1 | RegionLabel::R1Ext => Ok(rpow(z, m, p)),
                RegionLabel::R2 | RegionLabel::R2Ext => variation_2f1(m, a, z, ctx),
                RegionLabel::R4 => {
                    let i = path_integral(m, z, &q.sigma, ctx)?;
                    Ok(r4_variation(&i, m, q, p) * rpow(z, m, p))
                }
                RegionLabel::Outside => Err(PcfError::OutsideRegion),
            }
        }
    }
}

/// Exact W_{−a/2,1/4}(z): the erfc closed form at a = ½, the U oracle otherwise.
pub fn whittaker_exact(a: &Float, z: &Complex, ctx: &PrecisionContext) -> Result<LogScaled<Complex>> {
    if *a == 0.5 {
        return whittaker_erfc(z, ctx);
    }
    let p = ctx.bits();
    let w = Complex::with_val(p, Complex::with_val(p, z * 2u32).sqrt_ref());
    whittaker_ref(a, &w, ctx)
}

/// The remainder bound 2α|z^k e^{−z/2} a_n| V_P(t^{−n}) exp[2αδ V_P(t^{−1})] for the
/// n-term Whittaker expansion, in units of |z^k e^{−z/2}|. The derivative remainder
/// is bounded by β times the same quantity. With `exact`, ε_n and ρ are filled in.
pub fn remainder_bound(
    a: &Float,
    z: &Complex,
    n: u32,
    mode: VariationMode,
    exact: bool,
    ctx: &PrecisionContext,
) -> Result<BoundReport> {
    nonzero(z)?;
    let p = ctx.guarded(16);
    let region = classify_region(a, z, false);
    if region == RegionLabel::Outside {
        return Err(PcfError::OutsideRegion);
    }
    let q = bound_quantities(a, z, region, ctx)?;
    let series = WhittakerSeries::new(a, n, p);
    let zc = Complex::with_val(p, z);
    let mut rep = BoundReport::new(Method::Poincare(mode), n, series.partial_sum(&zc, n), series.prefactor(&zc));
    rep.region = Some(region);
    let vn = mode_variation(n, a, z, region, mode, &q, ctx)?;
    let v1 = mode_variation(1, a, z, region, mode, &q, ctx)?;
    let two_alpha = Float::with_val(p, &q.alpha * 2u32);
    let expo = Float::with_val(p, &two_alpha * &q.delta) * v1;
    let b = two_alpha * Float::with_val(p, series.coeffs[n as usize].abs_ref()) * vn * expo.exp();
    rep.derivative_bound = Some(Float::with_val(p, &b * &q.beta));
    rep.bound = Some(b);
    if exact {
        rep.set_exact(&whittaker_exact(a, z, ctx)?);
    }
    Ok(rep)
}

#[derive(Debug, Clone)]
pub struct PoincareTable {
    pub mode: VariationMode,
    pub ns: Vec<u32>,
    /// θ = jπ/8.
    pub js: Vec<u32>,
    /// ratios[i][j] for ns[i], js[j].
    pub ratios: Vec<Vec<f64>>,
}

/// ρ = |ε_n|/bound at a = ½, z = 10e^{ijπ/8}, j = 0..8, n ∈ {5, 10, 15}.
pub fn table_poincare(mode: VariationMode, ctx: &PrecisionContext) -> Result<PoincareTable> {
    let ns = vec![5u32, 10, 15];
    let js: Vec<u32> = (0..=8).collect();
    let p = ctx.bits();
    let cells: Vec<(usize, usize)> = (0..ns.len()).flat_map(|i| (0..js.len()).map(move |j| (i, j))).collect();
    let vals: Vec<Result<f64>> = cells
        .par_iter()
        .map(|&(i, j)| {
            let a = Float::with_val(p, 0.5);
            let z = table_point(js[j], p);
            let rep = remainder_bound(&a, &z, ns[i], mode, true, ctx)?;
            Ok(rep.ratio_f64().unwrap_or(f64::NAN))
        })
        .collect();
    let mut ratios = vec![vec![0.0; js.len()]; ns.len()];
    for ((i, j), v) in cells.into_iter().zip(vals) {
        ratios[i][j] = v?;
    }
    Ok(PoincareTable { mode, ns, js, ratios })
}

/// 10e^{ijπ/8}, with the axis points exact.
pub fn table_point(j: u32, p: u32) -> Complex {
    match j {
        0 => Complex::with_val(p, (10, 0)),
        4 => Complex::with_val(p, (0, 10)),
        8 => Complex::with_val(p, (-10, 0)),
        _ => {
            let th = Float::with_val(p, Constant::Pi) * j / 8u32;
            Complex::with_val(p, (th.cos_ref(), th.sin_ref())) * 10u32
        }
    }
}

/// dF/dx along the ray of constant phase, F = Re(z + a ln z): (u + x)/x.
pub fn ray_path_slope(a_re: f64, x: f64) -> f64 {
    (a_re + x) / x
}

/// dF(x₀, y)/dy on a vertical path: (u y − v x₀)/(x₀² + y²), a = u + iv.
pub fn vertical_path_slope(a_re: f64, a_im: f64, x0: f64, y: f64) -> f64 {
    (a_re * y - a_im * x0) / (x0 * x0 + y * y)
}

/// dF/dx on the half line through z₀ perpendicular to the ray to z₀.
pub fn perpendicular_path_slope(a_re: f64, a_im: f64, x0: f64, y0: f64, x: f64) -> f64 {
    let y = y0 - x0 / y0 * (x - x0);
    let r0 = x0 * x0 + y0 * y0;
    let r = x * x + y * y;
    1.0 + a_re * r0 / (y0 * y0 * r) * (x - x0) + a_im * r0 / (y0 * r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::u_and_uprime;

    fn ctx() -> PrecisionContext {
        PrecisionContext::default()
    }

    fn c(x: f64, y: f64) -> Complex {
        Complex::with_val(ctx().bits(), (x, y))
    }

    #[test]
    fn whittaker_coefficients() {
        let s = WhittakerSeries::new(&Float::with_val(100, 0.5), 3, 100);
        assert_eq!(s.coeffs[0], 1);
        // a_1 = −(1)(2)/4, a_2 = (1·2·3·4)/(16·2)
        assert_eq!(s.coeffs[1], -0.5);
        assert_eq!(s.coeffs[2], 0.75);
        assert_eq!(s.coeffs[3], -(1.0 * 2.0 * 3.0 * 4.0 * 5.0 * 6.0) / (64.0 * 6.0));
    }

    #[test]
    fn u_series_single_term_and_ratio() {
        let k = ctx();
        let a = k.real(0.3);
        let z = c(4.0, 1.0);
        let one = u_series_partial(&a, &z, 1, &k).unwrap().value();
        let p = k.bits();
        let zz = Complex::with_val(p, &z);
        let expect = Complex::with_val(p, -Complex::with_val(p, zz.square_ref()) / 4u32).exp()
            * Complex::with_val(p, (&zz).pow(&(Float::with_val(p, -&a) - 0.5f64)));
        assert!(Float::with_val(p, Complex::with_val(p, &one - &expect).abs_ref()).to_f64() < 1e-50);
        let two = u_series_partial(&a, &z, 2, &k).unwrap().value();
        let ratio = Complex::with_val(p, &two - &one) / &one;
        let z2 = Complex::with_val(p, zz.square_ref());
        let b = Float::with_val(p, &a + 0.5f64);
        let want = Complex::with_val(p, -Float::with_val(p, &b * Float::with_val(p, &b + 1u32)) / (z2 * 2u32));
        assert!(Float::with_val(p, Complex::with_val(p, ratio - want).abs_ref()).to_f64() < 1e-50);
    }

    #[test]
    fn sectors_enforced() {
        let k = ctx();
        assert!(matches!(u_series_partial(&k.real(1.0), &c(-1.0, 0.1), 3, &k), Err(PcfError::PhaseOutOfSector { .. })));
        assert!(matches!(v_series_partial(&k.real(1.0), &c(1.0, 1.5), 3, &k), Err(PcfError::PhaseOutOfSector { .. })));
        assert!(u_compound(&k.real(1.0), &c(1.0, 0.1), 3, 3, &k).is_err());
    }

    #[test]
    fn v_series_terminates_at_half() {
        let k = ctx();
        let a = k.real(0.5);
        let z = c(3.0, 0.0);
        let v1 = v_series_partial(&a, &z, 1, &k).unwrap().value();
        let v9 = v_series_partial(&a, &z, 9, &k).unwrap().value();
        assert_eq!(v1, v9);
    }

    #[test]
    fn u_series_close_to_oracle() {
        let k = ctx();
        let a = k.real(0.5);
        let z = c(10.0, 0.0);
        let s = u_series_partial(&a, &z, 5, &k).unwrap().value();
        let u = u_and_uprime(&a, &z, &k).unwrap().0.value();
        let rel = Float::with_val(64, Complex::with_val(k.bits(), &s - &u).abs_ref()) / Float::with_val(64, u.abs_ref());
        assert!(rel.to_f64() < 1e-4);
    }

    #[test]
    fn compound_matches_oracle_and_conjugates() {
        let k = ctx();
        let p = k.bits();
        let a = k.real(0.5);
        let th = Float::with_val(p, Constant::Pi) * 3u32 / 4u32;
        let z = Complex::with_val(p, (th.cos_ref(), th.sin_ref())) * 10u32;
        let s = u_compound(&a, &z, 8, 8, &k).unwrap().value();
        let u = u_and_uprime(&a, &z, &k).unwrap().0.value();
        let rel = Float::with_val(64, Complex::with_val(p, &s - &u).abs_ref()) / Float::with_val(64, u.abs_ref());
        assert!(rel.to_f64() < 1e-6, "rel={}", rel.to_f64());
        let zc = Complex::with_val(p, z.conj_ref());
        let sc = u_compound(&a, &zc, 8, 8, &k).unwrap().value();
        let d = Complex::with_val(p, sc.conj_ref()) - &s;
        assert!(Float::with_val(64, d.abs_ref()).to_f64() < 1e-40);
    }

    #[test]
    fn compound_beyond_pi_via_polar() {
        let k = ctx();
        let p = k.bits();
        let a = k.real(1.5);
        let r = k.real(8.0);
        let th = Float::with_val(p, Constant::Pi) * 9u32 / 8u32;
        let s = u_compound_polar(&a, &r, &th, 8, 8, &k).unwrap().value();
        let z = Complex::with_val(p, (th.cos_ref(), th.sin_ref())) * &r;
        let u = u_and_uprime(&a, &z, &k).unwrap().0.value();
        let rel = Float::with_val(64, Complex::with_val(p, &s - &u).abs_ref()) / Float::with_val(64, u.abs_ref());
        assert!(rel.to_f64() < 1e-5, "rel={}", rel.to_f64());
    }

    #[test]
    fn overlap_at_imaginary_axis() {
        let k = ctx();
        let a = k.real(0.5);
        let z = c(0.0, 10.0);
        let e1 = u_series_partial(&a, &z, 10, &k).unwrap().value();
        let e3 = u_compound(&a, &z, 10, 10, &k).unwrap().value();
        let u = u_and_uprime(&a, &z, &k).unwrap().0.value();
        let p = k.bits();
        let d1 = Float::with_val(64, Complex::with_val(p, &e1 - &u).abs_ref());
        let d3 = Float::with_val(64, Complex::with_val(p, &e3 - &u).abs_ref());
        let d13 = Float::with_val(64, Complex::with_val(p, &e1 - &e3).abs_ref());
        assert!(d13 <= Float::with_val(64, &d1 + &d3) * 1.0001f64);
        assert!(d13.to_f64() / Float::with_val(64, u.abs_ref()).to_f64() < 1e-6);
    }

    #[test]
    fn regions() {
        let a = Float::with_val(64, 0.5);
        let p = 64;
        assert_eq!(classify_region(&a, &c(10.0, 0.0), false), RegionLabel::R1);
        assert_eq!(classify_region(&a, &c(0.0, 10.0), false), RegionLabel::R2);
        let th = std::f64::consts::PI / 8.0;
        assert_eq!(classify_region(&a, &c(10.0 * th.cos(), 10.0 * th.sin()), false), RegionLabel::R1);
        assert_eq!(classify_region(&a, &c(-10.0, 0.0), false), RegionLabel::R4);
        assert_eq!(classify_region(&a, &Complex::with_val(p, (0.2, 0.1)), false), RegionLabel::R1Ext);
        assert_eq!(classify_region(&a, &Complex::with_val(p, (-0.2, 0.1)), false), RegionLabel::R2Ext);
        assert_eq!(classify_region(&a, &Complex::with_val(p, (-0.2, 0.1)), true), RegionLabel::Outside);
        assert_eq!(classify_region(&a, &Complex::with_val(p, (-0.7, 0.0)), false), RegionLabel::Outside);
        let neg = Float::with_val(64, -2);
        assert_eq!(classify_region(&neg, &Complex::with_val(p, (1.0, 0.0)), false), RegionLabel::Outside);
        assert_eq!(classify_region(&neg, &Complex::with_val(p, (2.5, 0.0)), false), RegionLabel::R1);
        // z = 3, κ = 1 lies in R4 as well as R1
        let one = Float::with_val(64, 1);
        assert_eq!(region_membership(&one, &Complex::with_val(p, (3.0, 0.0))), [true, false, true]);
        assert_eq!(region_membership(&one, &Complex::with_val(p, (-3f64.sqrt(), 1.0))), [false, true, true]);
        assert_eq!(region_membership(&one, &Complex::with_val(p, (0.5, 0.5))), [false, false, false]);
    }

    #[test]
    fn quantities() {
        let k = ctx();
        let q = bound_quantities(&k.real(0.0), &c(3.0, 4.0), RegionLabel::R2, &k).unwrap();
        assert_eq!(q.sigma, 0);
        assert_eq!(q.alpha, 1);
        assert_eq!(q.beta, 0.5);
        assert_eq!(q.delta, 0.1875);
        let q = bound_quantities(&k.real(0.5), &c(10.0, 0.0), RegionLabel::R1, &k).unwrap();
        assert!((q.alpha.to_f64() - 20.0 / 19.0).abs() < 1e-15);
        let want = 0.25 + 0.05 * (1.0 + 0.0125) / (0.95f64 * 0.95);
        assert!((q.delta.to_f64() - want).abs() < 1e-15);
        let q4 = bound_quantities(&k.real(0.5), &c(-10.0, 0.0), RegionLabel::R4, &k).unwrap();
        let v = (0.5 + 0.5 * (1.0f64 - 4.0 * 0.0025).sqrt()).powf(-0.5);
        assert!((q4.v.as_ref().unwrap().to_f64() - v).abs() < 1e-15);
        assert!((q4.alpha.to_f64() - 1.0 / (1.0 - 0.05 * v)).abs() < 1e-14);
        assert!(matches!(
            bound_quantities(&k.real(20.0), &c(10.0, 0.0), RegionLabel::R1, &k),
            Err(PcfError::SigmaTooLarge { .. })
        ));
    }

    #[test]
    fn variation_bounds() {
        let k = ctx();
        let a = k.real(0.5);
        assert!((variation_bound(3, &a, &c(10.0, 0.0), RegionLabel::R1, &k).unwrap().to_f64() - 1e-3).abs() < 1e-18);
        let r2 = variation_bound(1, &a, &c(0.0, 10.0), RegionLabel::R2, &k).unwrap().to_f64();
        assert!((r2 - std::f64::consts::PI / 20.0).abs() < 1e-15);
        let r4 = variation_bound(4, &k.real(0.0), &c(-10.0, 0.0), RegionLabel::R4, &k).unwrap().to_f64();
        assert!((r4 - chi_prec(4, 64).to_f64() * 1e-4).abs() < 1e-18);
        assert!(matches!(variation_bound(1, &a, &c(1.0, 0.0), RegionLabel::Outside, &k), Err(PcfError::OutsideRegion)));
    }

    #[test]
    fn hypergeometric_variation_limits() {
        let k = ctx();
        let p = k.bits();
        // θ = φ: cos φ = κ/|z| with z = κ/cos φ e^{iφ}
        let a = k.real(3.0);
        let phi = Float::with_val(p, Float::with_val(p, 0.3f64).acos());
        let z = Complex::with_val(p, (phi.cos_ref(), phi.sin_ref())) * 10u32;
        let v = variation_2f1(4, &a, &z, &k).unwrap().to_f64();
        assert!((v - 1e-4).abs() < 1e-16);
        // sin² = 1: κ = 0 on the imaginary axis gives θ − φ = 0, so use κ = 0, z = −10·i·e^{iπ/2}
        let a0 = k.real(0.0);
        let v = variation_2f1(5, &a0, &c(0.0, 10.0), &k).unwrap().to_f64();
        assert!((v - 1e-5).abs() < 1e-18);
        let v = variation_2f1(5, &a0, &c(-10.0, 0.0), &k).unwrap().to_f64();
        assert!((v - chi_prec(5, 64).to_f64() * 1e-5).abs() < 1e-16);
    }

    #[test]
    fn hypergeometric_never_exceeds_chi() {
        let k = PrecisionContext::new(30).unwrap();
        let a = k.real(0.5);
        for j in 0..=16 {
            let th = std::f64::consts::PI * j as f64 / 16.0;
            let z = c(10.0 * th.cos(), 10.0 * th.sin());
            if classify_region(&a, &z, false) != RegionLabel::R2 {
                continue;
            }
            for n in [1, 5, 12] {
                let f = variation_2f1(n, &a, &z, &k).unwrap();
                let chi = variation_bound(n, &a, &z, RegionLabel::R2, &k).unwrap();
                assert!(f <= Float::with_val(64, &chi * 1.0000001f64), "j={j} n={n}");
            }
        }
    }

    #[test]
    fn table_cells_match() {
        let k = ctx();
        let a = k.real(0.5);
        let r = remainder_bound(&a, &table_point(0, k.bits()), 5, VariationMode::Piecewise, true, &k).unwrap();
        assert!((r.ratio_f64().unwrap() - 0.294).abs() < 0.0015);
        let r = remainder_bound(&a, &table_point(8, k.bits()), 10, VariationMode::Piecewise, true, &k).unwrap();
        assert_eq!(r.region, Some(RegionLabel::R4));
        assert!((r.ratio_f64().unwrap() - 0.369).abs() < 0.0015);
        let r = remainder_bound(&a, &table_point(6, k.bits()), 15, VariationMode::Hyp2f1, true, &k).unwrap();
        assert!((r.ratio_f64().unwrap() - 0.288).abs() < 0.0015);
    }

    #[test]
    fn derivative_bound_holds() {
        let k = ctx();
        let p = k.bits();
        let a = k.real(0.5);
        for j in [0u32, 3, 6, 8] {
            let z = table_point(j, p);
            let n = 6;
            let r = remainder_bound(&a, &z, n, VariationMode::Piecewise, false, &k).unwrap();
            // ε_n′ by a central difference of the exact remainder (smooth, so h = 2^{−40} is ample)
            let h = Complex::with_val(p, Float::with_val(p, Float::i_exp(1, -40)));
            let eps = |zz: &Complex| {
                let w = whittaker_exact(&a, zz, &k).unwrap().value();
                let s = WhittakerSeries::new(&a, n, p);
                let approx = s.prefactor(zz).scale(&s.partial_sum(zz, n)).value();
                Complex::with_val(p, w - approx)
            };
            let zp = Complex::with_val(p, &z + &h);
            let zm = Complex::with_val(p, &z - &h);
            let d = Complex::with_val(p, eps(&zp) - eps(&zm)) / Complex::with_val(p, &h * 2u32);
            let scale = r.prefactor.abs().value();
            let db = Float::with_val(p, r.derivative_bound.as_ref().unwrap() * scale);
            assert!(Float::with_val(p, d.abs_ref()) <= db, "j={j}");
        }
    }

    #[test]
    fn monotone_paths() {
        // ray of constant phase: Re z > max(0, −Re a) ⇒ (u + x)/x > 0
        for u in [-3.0, -0.5, 0.0, 2.0] {
            let x0 = (-u as f64).max(0.0) + 0.01;
            for i in 0..100 {
                let x = x0 * (1.0 + i as f64 * 0.37);
                assert!(ray_path_slope(u, x) > 0.0);
            }
        }
        // vertical path upwards when ph z ∈ (ph a, ph a + π)
        let (u, v) = (1.0f64, 2.0f64);
        let alpha = v.atan2(u);
        for i in 0..100 {
            let ph = alpha + 0.01 + (std::f64::consts::PI - 0.02) * i as f64 / 99.0;
            let (x0, y) = (3.0 * ph.cos(), 3.0 * ph.sin());
            assert!(vertical_path_slope(u, v, x0, y) > 0.0, "ph={ph}");
        }
        // perpendicular half line: Im z₀ > max(0, −Im a)
        for &(u, v, x0, y0) in &[(0.5, -1.0, -2.0, 1.5), (-2.0, 0.5, 1.0, 3.0), (1.0, 0.0, -3.0, 0.2)] {
            for i in 0..100 {
                let x = x0 + i as f64 * 0.5;
                assert!(perpendicular_path_slope(u, v, x0, y0, x) > 0.0, "x0={x0} y0={y0} x={x}");
            }
        }
    }
}
