//! Python bindings: oracle values, the four expansions with their bounds,
//! table regression, region geometry and coefficient tables.

use pcf_core::integral::{coefficients, expansion_ibp};
use pcf_core::oracle::{u_and_uprime, u_real, v_ref, vprime_ref};
use pcf_core::poincare::{classify_region, region_membership, remainder_bound, whittaker_exact};
use pcf_core::precision::to_decimal;
use pcf_core::report::{BoundReport, VariationMode};
use pcf_core::tables::run_table;
use pcf_core::uniform::{coeffs as uniform_coeffs, eval_neg_a, eval_neg_z, eval_pos_z};
use pcf_core::value::LogScaled;
use pcf_core::{PcfError, PrecisionContext};
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use rug::{Complex, Float};

fn py_err(e: PcfError) -> PyErr {
    if e.is_invalid_input() {
        PyValueError::new_err(e.to_string())
    } else {
        PyArithmeticError::new_err(e.to_string())
    }
}

fn context(digits: u32) -> PyResult<PrecisionContext> {
    PrecisionContext::new(digits).map_err(py_err)
}

/// A str is parsed exactly at working precision; anything else must be a float.
fn big(obj: &Bound<'_, PyAny>, ctx: &PrecisionContext) -> PyResult<Float> {
    if let Ok(s) = obj.extract::<String>() {
        return ctx.parse(&s).map_err(py_err);
    }
    Ok(ctx.real(obj.extract::<f64>()?))
}

/// mantissa · e^{logscale}, with the digits kept as strings.
#[pyclass(frozen, get_all, skip_from_py_object, module = "pcfbounds")]
#[derive(Clone)]
struct LogValue {
    mantissa_re: String,
    mantissa_im: String,
    logscale: String,
}

impl LogValue {
    fn new(v: &LogScaled<Complex>, digits: u32) -> Self {
        LogValue {
            mantissa_re: to_decimal(v.mantissa.real(), digits),
            mantissa_im: to_decimal(v.mantissa.imag(), digits),
            logscale: to_decimal(&v.logscale, digits),
        }
    }
}

#[pymethods]
impl LogValue {
    /// The value as a Python complex; overflows to inf for huge logscales.
    fn to_complex(&self) -> PyResult<(f64, f64)> {
        let parse = |s: &str| s.parse::<f64>().map_err(|e| PyValueError::new_err(e.to_string()));
        let scale = parse(&self.logscale)?.exp();
        Ok((parse(&self.mantissa_re)? * scale, parse(&self.mantissa_im)? * scale))
    }

    fn __float__(&self) -> PyResult<f64> {
        Ok(self.to_complex()?.0)
    }

    fn __repr__(&self) -> String {
        format!("LogValue(({}, {}) * exp({}))", self.mantissa_re, self.mantissa_im, self.logscale)
    }
}

/// One expansion evaluation. `bound`, `exact_remainder` and `ratio` are in
/// units of the prefactor, so `ratio` = |true remainder| / bound.
#[pyclass(frozen, get_all, module = "pcfbounds")]
struct Report {
    method: String,
    region: Option<String>,
    n: u32,
    digits: u32,
    value: LogValue,
    prefactor: LogValue,
    /// (re, im) as decimal strings.
    partial_sum: (String, String),
    exact_scaled: Option<(String, String)>,
    bound: Option<f64>,
    derivative_bound: Option<f64>,
    exact_remainder: Option<f64>,
    ratio: Option<f64>,
}

#[pymethods]
impl Report {
    fn __repr__(&self) -> String {
        format!(
            "Report(method={:?}, n={}, partial_sum={}, bound={:?}, ratio={:?})",
            self.method, self.n, self.partial_sum.0, self.bound, self.ratio
        )
    }
}

fn pair(c: &Complex, digits: u32) -> (String, String) {
    (to_decimal(c.real(), digits), to_decimal(c.imag(), digits))
}

fn report(mut rep: BoundReport, exact: Option<LogScaled<Complex>>, digits: u32) -> Report {
    let mut exact_scaled = None;
    if let Some(e) = &exact {
        rep.set_exact(e);
        let p = rep.partial_sum.prec().0;
        let m = Complex::with_val(p, &e.mantissa / &rep.prefactor.mantissa);
        let s = m * Float::with_val(p, &e.logscale - &rep.prefactor.logscale).exp();
        exact_scaled = Some(pair(&s, digits));
    }
    let f = |x: &Option<Float>| x.as_ref().map(|v| v.to_f64());
    Report {
        method: rep.method.as_str().into(),
        region: rep.region.map(|r| r.to_string()),
        n: rep.n,
        digits,
        value: LogValue::new(&rep.approximation(), digits),
        prefactor: LogValue::new(&rep.prefactor, digits),
        partial_sum: pair(&rep.partial_sum, digits),
        exact_scaled,
        bound: f(&rep.bound),
        derivative_bound: f(&rep.derivative_bound),
        exact_remainder: f(&rep.exact_remainder),
        ratio: f(&rep.ratio),
    }
}

/// U(a, z) from the reference oracle.
#[pyfunction]
#[pyo3(signature = (a, z, zi = 0.0, digits = 40))]
fn u(a: &Bound<'_, PyAny>, z: &Bound<'_, PyAny>, zi: f64, digits: u32) -> PyResult<LogValue> {
    let ctx = context(digits)?;
    let zc = Complex::with_val(ctx.bits(), (big(z, &ctx)?, zi));
    let (v, _) = u_and_uprime(&big(a, &ctx)?, &zc, &ctx).map_err(py_err)?;
    Ok(LogValue::new(&v, digits))
}

/// U′(a, z) from the reference oracle.
#[pyfunction]
#[pyo3(signature = (a, z, zi = 0.0, digits = 40))]
fn uprime(a: &Bound<'_, PyAny>, z: &Bound<'_, PyAny>, zi: f64, digits: u32) -> PyResult<LogValue> {
    let ctx = context(digits)?;
    let zc = Complex::with_val(ctx.bits(), (big(z, &ctx)?, zi));
    let (_, v) = u_and_uprime(&big(a, &ctx)?, &zc, &ctx).map_err(py_err)?;
    Ok(LogValue::new(&v, digits))
}

/// V(a, x) for real x.
#[pyfunction]
#[pyo3(signature = (a, x, digits = 40))]
fn v(a: &Bound<'_, PyAny>, x: &Bound<'_, PyAny>, digits: u32) -> PyResult<LogValue> {
    let ctx = context(digits)?;
    let r = v_ref(&big(a, &ctx)?, &big(x, &ctx)?, &ctx).map_err(py_err)?;
    Ok(LogValue::new(&r.to_complex(), digits))
}

/// V′(a, x) for real x.
#[pyfunction]
#[pyo3(signature = (a, x, digits = 40))]
fn vprime(a: &Bound<'_, PyAny>, x: &Bound<'_, PyAny>, digits: u32) -> PyResult<LogValue> {
    let ctx = context(digits)?;
    let r = vprime_ref(&big(a, &ctx)?, &big(x, &ctx)?, &ctx).map_err(py_err)?;
    Ok(LogValue::new(&r.to_complex(), digits))
}

/// Large-z expansion of W_{−a/2,1/4}(z) with its remainder bound.
#[pyfunction]
#[pyo3(signature = (a, z, zi = 0.0, n = 5, variation = "piecewise", oracle = false, digits = 40))]
fn poincare(
    a: &Bound<'_, PyAny>,
    z: &Bound<'_, PyAny>,
    zi: f64,
    n: u32,
    variation: &str,
    oracle: bool,
    digits: u32,
) -> PyResult<Report> {
    let ctx = context(digits)?;
    let mode = match variation {
        "piecewise" => VariationMode::Piecewise,
        "hyp2f1" => VariationMode::Hyp2f1,
        other => return Err(PyValueError::new_err(format!("unknown variation {other:?}"))),
    };
    let a = big(a, &ctx)?;
    let zc = Complex::with_val(ctx.bits(), (big(z, &ctx)?, zi));
    let rep = remainder_bound(&a, &zc, n, mode, false, &ctx).map_err(py_err)?;
    let exact = if oracle { Some(whittaker_exact(&a, &zc, &ctx).map_err(py_err)?) } else { None };
    Ok(report(rep, exact, digits))
}

/// Uniform expansion in t = z/(2√|a|). `branch` is "pos" (a > 0, z ≥ 0),
/// "negz" (a > 0, z ≤ 0) or "nega" (a < 0, t > 1).
#[pyfunction]
#[pyo3(signature = (a, t, n = 3, branch = "pos", function = "u", oracle = false, digits = 40))]
fn uniform(
    a: &Bound<'_, PyAny>,
    t: &Bound<'_, PyAny>,
    n: usize,
    branch: &str,
    function: &str,
    oracle: bool,
    digits: u32,
) -> PyResult<Report> {
    let ctx = context(digits)?;
    let a = big(a, &ctx)?;
    let t = big(t, &ctx)?;
    let derivative = match function {
        "u" | "v" => false,
        "uprime" | "vprime" => true,
        other => return Err(PyValueError::new_err(format!("unknown function {other:?}"))),
    };
    let (rep, z) = match branch {
        "pos" | "negz" if function.starts_with('v') => {
            return Err(PyValueError::new_err("V is available on the nega branch only"));
        }
        "pos" | "negz" => {
            let pair = if branch == "pos" {
                eval_pos_z(&a, &t, n, false, &ctx)
            } else {
                eval_neg_z(&a, &t, n, false, &ctx)
            }
            .map_err(py_err)?;
            let z = pair.point.z();
            (if derivative { pair.derivative } else { pair.value }, z)
        }
        "nega" => {
            let r = eval_neg_a(&a, &t, n, false, &ctx).map_err(py_err)?;
            let z = r.point.z();
            let rep = match function {
                "u" => r.u,
                "uprime" => r.uprime,
                "v" => r.v,
                _ => r.vprime,
            };
            (rep, z)
        }
        other => return Err(PyValueError::new_err(format!("unknown branch {other:?}"))),
    };
    let exact = if oracle {
        let val = match function {
            "u" => u_real(&a, &z, &ctx).map(|p| p.0),
            "uprime" => u_real(&a, &z, &ctx).map(|p| p.1),
            "v" => v_ref(&a, &z, &ctx),
            _ => vprime_ref(&a, &z, &ctx),
        }
        .map_err(py_err)?;
        Some(val.to_complex())
    } else {
        None
    };
    Ok(report(rep, exact, digits))
}

/// Integral-representation expansion of U(a, z), a ≥ 0, z > 0.
#[pyfunction]
#[pyo3(signature = (a, z, n = 1, oracle = false, digits = 40))]
fn ibp(a: &Bound<'_, PyAny>, z: &Bound<'_, PyAny>, n: u32, oracle: bool, digits: u32) -> PyResult<Report> {
    let ctx = context(digits)?;
    let a = big(a, &ctx)?;
    let z = big(z, &ctx)?;
    let rep = expansion_ibp(&a, &z, n, false, &ctx).map_err(py_err)?;
    let exact = if oracle { Some(u_real(&a, &z, &ctx).map_err(py_err)?.0.to_complex()) } else { None };
    Ok(report(rep, exact, digits))
}

/// Table `which` as (row, column, rho, expected, pass) tuples.
#[pyfunction]
#[pyo3(signature = (which, digits = 40))]
fn table(py: Python<'_>, which: u32, digits: u32) -> PyResult<Vec<(f64, f64, f64, Option<f64>, bool)>> {
    let ctx = context(digits)?;
    let run = py.detach(|| run_table(which, &ctx)).map_err(py_err)?;
    Ok(run.cells.iter().map(|c| (c.row, c.col, c.rho, c.expected, c.pass)).collect())
}

/// Region label of z = x + iy for the large-z bounds.
#[pyfunction]
#[pyo3(signature = (a, x, y, strict = false))]
fn region(a: f64, x: f64, y: f64, strict: bool) -> String {
    classify_region(&Float::with_val(64, a), &Complex::with_val(64, (x, y)), strict).to_string()
}

/// (in R1, in R2, in R4) without precedence.
#[pyfunction]
fn membership(a: f64, x: f64, y: f64) -> (bool, bool, bool) {
    let [r1, r2, r4] = region_membership(&Float::with_val(64, a), &Complex::with_val(64, (x, y)));
    (r1, r2, r4)
}

/// φ_0..φ_order and ψ_0..ψ_order as polynomial strings in τ.
#[pyfunction]
#[pyo3(signature = (order = 3))]
fn coeffs(order: usize) -> PyResult<(Vec<String>, Vec<String>)> {
    let t = uniform_coeffs(order).map_err(py_err)?;
    let show = |v: &[pcf_core::numerics::poly::RationalPoly]| v.iter().take(order + 1).map(|p| p.to_string_in("tau")).collect();
    Ok((show(&t.phi), show(&t.psi)))
}

/// f_0(λ), …, f_{n−1}(λ).
#[pyfunction]
#[pyo3(signature = (lam, n = 3, digits = 40))]
fn f_coeffs(lam: &Bound<'_, PyAny>, n: u32, digits: u32) -> PyResult<Vec<String>> {
    let ctx = context(digits)?;
    let l = big(lam, &ctx)?;
    let v = coefficients(&l, n, ctx.bits()).map_err(py_err)?;
    Ok(v.iter().map(|x| to_decimal(x, digits)).collect())
}

#[pymodule]
fn pcfbounds(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<LogValue>()?;
    m.add_class::<Report>()?;
    m.add_function(wrap_pyfunction!(u, m)?)?;
    m.add_function(wrap_pyfunction!(uprime, m)?)?;
    m.add_function(wrap_pyfunction!(v, m)?)?;
    m.add_function(wrap_pyfunction!(vprime, m)?)?;
    m.add_function(wrap_pyfunction!(poincare, m)?)?;
    m.add_function(wrap_pyfunction!(uniform, m)?)?;
    m.add_function(wrap_pyfunction!(ibp, m)?)?;
    m.add_function(wrap_pyfunction!(table, m)?)?;
    m.add_function(wrap_pyfunction!(region, m)?)?;
    m.add_function(wrap_pyfunction!(membership, m)?)?;
    m.add_function(wrap_pyfunction!(coeffs, m)?)?;
    m.add_function(wrap_pyfunction!(f_coeffs, m)?)?;
    Ok(())
}
