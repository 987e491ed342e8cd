//! Double-precision twin of the contour machinery, for the weight-bound scans
//! that need thousands of f_n values to a few digits each, and for tracking
//! w(σ) before the working-precision polish.
//!
//! ln(λw/(w₀σ)) is carried along the path as L rather than taken principal,
//! so w stays on the analytic continuation when that ratio winds around 0.

pub(super) use num_complex::Complex64 as C;
use rug::Float;

use super::{CauchyKernel, SaddleData};
use crate::error::{PcfError, Result};

/// A point of the continuation: σ, w(σ) and the carried logarithm.
#[derive(Debug, Clone, Copy)]
pub(super) struct State {
    pub s: C,
    pub w: C,
    pub l: C,
}

pub(super) struct Saddle64 {
    lam: f64,
    s_minus: f64,
    c0: f64,
    ln_k: f64,
    q4: f64,
    exact: SaddleData,
}

impl Saddle64 {
    pub(super) fn new(sd: &SaddleData) -> Saddle64 {
        let lam = sd.lambda.to_f64();
        let w0 = sd.w0.to_f64();
        Saddle64 {
            lam,
            s_minus: sd.s_minus.to_f64(),
            c0: 0.5 * w0 * w0 + w0 - lam,
            ln_k: if lam == 0.0 { 0.0 } else { (lam / w0).ln() },
            q4: (1.0 + 4.0 * lam).sqrt().sqrt(),
            exact: sd.with_prec(64).expect("64-bit saddle data"),
        }
    }

    /// The state at a real σ > s₋, σ ≠ 0.
    pub(super) fn real_state(&self, s: f64) -> Result<State> {
        let w = self.exact.w_of_s(&Float::with_val(64, s))?.to_f64();
        let l = if self.lam == 0.0 { 0.0 } else { self.ln_k + (w / s).ln() };
        Ok(State { s: C::new(s, 0.0), w: C::new(w, 0.0), l: C::new(l, 0.0) })
    }

    fn newton(&self, sigma: C, seed: C, r: &State) -> Option<(State, f64)> {
        if self.lam == 0.0 {
            let w = (1.0 + 2.0 * sigma).sqrt() - 1.0;
            return Some((State { s: sigma, w, l: C::new(0.0, 0.0) }, (w - seed).norm()));
        }
        let mut w = seed;
        let mut first = None;
        for _ in 0..30 {
            let l = r.l + (w * r.s / (r.w * sigma)).ln();
            let g = 0.5 * w * w + w - sigma - self.c0 - self.lam * l;
            let dg = w + 1.0 - self.lam / w;
            let step = g / dg;
            let sz = step.norm();
            if !sz.is_finite() {
                return None;
            }
            w -= step;
            let f = *first.get_or_insert(sz);
            if sz <= 1e-14 * w.norm().max(1e-300) {
                let l = r.l + (w * r.s / (r.w * sigma)).ln();
                return Some((State { s: sigma, w, l }, f));
            }
        }
        None
    }

    /// Continue from `from` to σ = sb along the straight segment.
    pub(super) fn track(&self, from: State, sb: C) -> Option<State> {
        let sa = from.s;
        let mut cur = from;
        let (mut done, mut frac) = (0.0f64, 1.0f64);
        let total = sb - sa;
        let mut guard = 0;
        while done < 1.0 {
            guard += 1;
            if guard > 4000 || frac < 1e-12 {
                return None;
            }
            frac = frac.min(1.0 - done);
            let ns = if done + frac >= 1.0 { sb } else { sa + total * (done + frac) };
            let ds = ns - cur.s;
            // dw/dσ = w(σ − λ)/(σ(w² + w − λ))
            let den = cur.s * (cur.w * cur.w + cur.w - self.lam);
            let pred = if den.norm() == 0.0 { cur.w } else { cur.w + cur.w * (cur.s - self.lam) / den * ds };
            let jump = (pred - cur.w).norm();
            match self.newton(ns, pred, &cur) {
                // the corrector may only trim the predictor, never move far from it
                Some((st, _)) if (st.w - pred).norm() <= 0.25 * jump + 1e-12 * cur.w.norm() && st.w.re.is_finite() => {
                    cur = st;
                    done += frac;
                    frac *= 2.0;
                }
                _ => frac /= 2.0,
            }
        }
        Some(cur)
    }

    /// f(σ) = (1+4λ)^{1/4}√(w/σ)(σ−λ)/(w²+w−λ).
    pub(super) fn f(&self, st: &State) -> C {
        let root = if self.lam == 0.0 { (st.w / st.s).sqrt() } else { (0.5 * (st.l - self.ln_k)).exp() };
        root * (st.s - self.lam) / (st.w * st.w + st.w - self.lam) * self.q4
    }

    /// f_n(s) to about twelve digits relative to the integrand scale.
    pub(super) fn f_n(&self, s: f64, kernel: &CauchyKernel) -> Result<f64> {
        let (lo, hi) = if s < self.lam { (s, self.lam) } else { (self.lam, s) };
        let m = 0.5 * (lo + hi);
        let h = 0.5 * (hi - lo);
        let d = m - self.s_minus;
        if d <= h {
            return Err(PcfError::Domain("contour would cross the branch point".into()));
        }
        let (a, b) = if h <= d / 16.0 {
            (d / 4.0, 0.0)
        } else {
            let x = d / h;
            let rho = (x + (x * x - 1.0).sqrt()).sqrt();
            (0.5 * h * rho, 0.5 * h / rho)
        };
        let point = |th: f64| {
            let (sn, cs) = th.sin_cos();
            (C::new(m + (a + b) * cs, (a - b) * sn), C::new(-(a + b) * sn, (a - b) * cs))
        };
        let coeffs: Vec<(i32, i32, i32, f64)> =
            kernel.numerator.iter().map(|(k, c)| (k[0] as i32, k[1] as i32, k[2] as i32, c.to_f64())).collect();
        let scale_n = 0.5f64.powi(kernel.n as i32);
        let q_n = |sg: C| {
            let p = sg - s;
            let q = sg - self.lam;
            let mut acc = C::new(0.0, 0.0);
            for &(i, j, k, c) in &coeffs {
                acc += p.powi(i) * q.powi(j) * (c * self.lam.powi(k));
            }
            acc / (p.powi(kernel.p_power as i32) * q.powi(kernel.q_power as i32)) * scale_n
        };
        let tau = std::f64::consts::TAU;
        let fail = || PcfError::Convergence("w(s) continuation failed on the contour".into());
        let mut nodes = 64usize;
        let mut level = closed_loop(self, nodes, &|k, n| point(tau * k as f64 / n as f64).0, m + a + b)?;
        let mut prev: Option<f64> = None;
        loop {
            let mut sum = C::new(0.0, 0.0);
            let mut mag = 0.0;
            for (k, st) in level.iter().enumerate() {
                let (_, dsg) = point(tau * k as f64 / nodes as f64);
                let g = q_n(st.s) * self.f(st) * dsg;
                mag += g.norm();
                sum += g;
            }
            let val = sum.im / nodes as f64;
            let scale = mag / nodes as f64;
            if let Some(pv) = prev {
                if (val - pv).abs() <= 1e-12 * scale {
                    return Ok(val);
                }
            }
            if nodes >= super::MAX_NODES {
                return Err(PcfError::Convergence("Cauchy integral did not stabilise".into()));
            }
            prev = Some(val);
            let mut next = Vec::with_capacity(2 * nodes);
            for (k, st) in level.iter().enumerate() {
                next.push(*st);
                let (sb, _) = point(tau * (2 * k + 1) as f64 / (2 * nodes) as f64);
                next.push(self.track(*st, sb).ok_or_else(fail)?);
            }
            level = next;
            nodes *= 2;
        }
    }

    /// max |f| over a geometric 10²-point scan of σ = −σ₀ + iτ, τ ∈ [10⁻²σ₀, 10⁴σ₀],
    /// and |f(−σ₀)|. f(σ̄) is the conjugate of f(σ), so the lower half adds nothing.
    pub(super) fn line_scan(&self, sigma0: f64) -> Result<(f64, f64)> {
        let mut cur = self.real_state(-sigma0)?;
        let at_axis = self.f(&cur).norm();
        let mut best = at_axis;
        for k in 1..=100 {
            let tau = sigma0 * 10f64.powf(-2.0 + 6.0 * k as f64 / 100.0);
            cur = self
                .track(cur, C::new(-sigma0, tau))
                .ok_or_else(|| PcfError::Convergence("w(s) continuation failed on the line".into()))?;
            best = best.max(self.f(&cur).norm());
        }
        Ok((at_axis, best))
    }
}

/// States at σ(k/n) for k < n, tracked once around from the real point `start`;
/// errors unless the continuation closes up.
pub(super) fn closed_loop(sd: &Saddle64, n: usize, point: &dyn Fn(usize, usize) -> C, start: f64) -> Result<Vec<State>> {
    let fail = || PcfError::Convergence("w(s) continuation failed on the contour".into());
    let first = sd.real_state(start)?;
    let mut out = Vec::with_capacity(n);
    out.push(first);
    let mut cur = first;
    for k in 1..=n {
        cur = sd.track(cur, point(k % n, n)).ok_or_else(fail)?;
        if k < n {
            out.push(cur);
        }
    }
    let tol = 1e-8 * (first.w.norm() + 1.0);
    if (cur.w - first.w).norm() > tol || (cur.l - first.l).norm() > 1e-8 * (first.l.norm() + 1.0) {
        return Err(PcfError::Convergence("w(s) is not single-valued on the contour".into()));
    }
    Ok(out)
}
