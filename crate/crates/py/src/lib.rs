//! Python bindings. Ring elements and levels travel as strings ("a+bw"),
//! structured results come back as the same dictionaries the CLI prints.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde_json::Value;

use bianchi_core::fourier::{
    automorphy_residual, bessel_k as core_bessel_k, eigenfunctional, eval_series, fourier_coefficients, FourierTable,
    H3Point, KernelPhase, SeedElement,
};
use bianchi_core::hecke::{eigensystems as core_eigensystems, hecke_on_manin, hecke_oracle, ORACLE_BUDGET};
use bianchi_core::heilbronn::generate;
use bianchi_core::linalg::{QuadRat, Scalar, Q};
use bianchi_core::ring::{FieldId, Mat2, QuadInt};
use bianchi_core::symbols::{build_space, Level, SymbolSpace};
use bianchi_core::Error;

create_exception!(bianchi, VerificationError, PyRuntimeError);

fn err(e: Error) -> PyErr {
    match e {
        Error::Verification(m) => VerificationError::new_err(m),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn to_py(py: Python<'_>, v: &Value) -> PyResult<Py<PyAny>> {
    Ok(py.import("json")?.call_method1("loads", (v.to_string(),))?.unbind())
}

fn field(d: i64) -> PyResult<FieldId> {
    FieldId::new(d).map_err(err)
}

fn elt(s: &str) -> PyResult<QuadInt> {
    QuadInt::parse(s).map_err(err)
}

fn level(d: i64, n: &str) -> PyResult<Level> {
    Level::new(field(d)?, &elt(n)?).map_err(err)
}

fn coprime_etas(lv: &Level, max_norm: u64) -> Vec<QuadInt> {
    let f = lv.field;
    f.ideals_up_to_norm(max_norm)
        .into_iter()
        .filter(|e| !e.is_one() && f.gcd(e, &lv.generator).map(|g| f.is_unit(&g)).unwrap_or(false))
        .collect()
}

/// (q, r) with a = q·b + r and N(r) ≤ ε·N(b).
#[pyfunction]
fn euclid_div(d: i64, a: &str, b: &str) -> PyResult<(String, String)> {
    let (q, r) = field(d)?.euclid_div(&elt(a)?, &elt(b)?).map_err(err)?;
    Ok((q.to_string(), r.to_string()))
}

#[pyfunction]
fn norm(d: i64, a: &str) -> PyResult<String> {
    Ok(field(d)?.norm(&elt(a)?).to_string())
}

fn space_json<F: Scalar>(lv: &Level, k: usize) -> PyResult<Value> {
    let s: SymbolSpace<F> = build_space(lv, k).map_err(err)?;
    let mut v = s.to_json(false);
    v["en_size"] = s.num_points().into();
    v["exactness_holds"] = s.exactness_holds().into();
    Ok(v)
}

/// Summary of ℳ_k(Γ₁(n)): dimensions, basis generators, boundary classes.
#[pyfunction]
#[pyo3(signature = (d, level, weight=2))]
fn space(py: Python<'_>, d: i64, level: &str, weight: usize) -> PyResult<Py<PyAny>> {
    let lv = self::level(d, level)?;
    let v = if weight == 2 { space_json::<Q>(&lv, 2)? } else { space_json::<QuadRat>(&lv, weight)? };
    to_py(py, &v)
}

/// The Heilbronn–Merel family of η, with its C_Δ certificate if `verify`.
#[pyfunction]
#[pyo3(signature = (d, eta, verify=false))]
fn heilbronn(py: Python<'_>, d: i64, eta: &str, verify: bool) -> PyResult<Py<PyAny>> {
    let fam = generate(field(d)?, &elt(eta)?).map_err(err)?;
    let v = if verify {
        fam.check_invariants().map_err(err)?;
        let cert = fam.verify_c_delta().map_err(err)?;
        if !cert.ok() {
            return Err(VerificationError::new_err(format!("C_Δ fails in classes {:?}", cert.failures())));
        }
        fam.to_json(Some(&cert))
    } else {
        fam.to_json(None)
    };
    to_py(py, &v)
}

/// T_η on the quotient basis of the weight-2 space. With `oracle`, also
/// checks it against the coset-representative computation.
#[pyfunction]
#[pyo3(signature = (d, level, eta, oracle=false))]
fn hecke(py: Python<'_>, d: i64, level: &str, eta: &str, oracle: bool) -> PyResult<Py<PyAny>> {
    let lv = self::level(d, level)?;
    let s: SymbolSpace<Q> = build_space(&lv, 2).map_err(err)?;
    let eta = elt(eta)?;
    let t = hecke_on_manin(&s, &eta).map_err(err)?;
    if oracle && hecke_oracle(&s, &eta, ORACLE_BUDGET).map_err(err)?.matrix != t.matrix {
        return Err(VerificationError::new_err(format!("T_{eta} differs from the oracle at {lv}")));
    }
    to_py(py, &t.to_json(&s))
}

/// Rational eigensystems of the cuspidal space under T_η, N(η) ≤ max_norm.
#[pyfunction]
#[pyo3(signature = (d, level, max_norm=30))]
fn eigensystems(py: Python<'_>, d: i64, level: &str, max_norm: u64) -> PyResult<Py<PyAny>> {
    let lv = self::level(d, level)?;
    let s: SymbolSpace<Q> = build_space(&lv, 2).map_err(err)?;
    to_py(py, &core_eigensystems(&s, &coprime_etas(&lv, max_norm)).map_err(err)?.to_json())
}

#[pyfunction]
fn bessel_k(nu: u32, x: f64) -> PyResult<f64> {
    core_bessel_k(nu, x).map_err(err)
}

fn phase(s: &str) -> PyResult<KernelPhase> {
    KernelPhase::parse(s).map_err(err)
}

/// A truncated Fourier expansion of a weight-2 rational eigenform.
#[pyclass(frozen)]
struct FourierSeries {
    table: FourierTable,
}

#[pymethods]
impl FourierSeries {
    /// Tabulates a_α for N(α) ≤ bound from the first one-dimensional
    /// eigensystem cut out by T_η with N(η) ≤ max_norm.
    #[new]
    #[pyo3(signature = (d, level, bound=200, max_norm=30))]
    fn new(py: Python<'_>, d: i64, level: &str, bound: u64, max_norm: u64) -> PyResult<FourierSeries> {
        let lv = self::level(d, level)?;
        let table = py
            .detach(|| -> bianchi_core::Result<Option<FourierTable>> {
                let s: SymbolSpace<Q> = build_space(&lv, 2)?;
                let systems = core_eigensystems(&s, &coprime_etas(&lv, max_norm))?.systems;
                let Some(sys) = systems.iter().find(|x| x.dim() == 1) else { return Ok(None) };
                let phi = eigenfunctional(&s, sys)?;
                let seed = SeedElement::from_quotient(&s, &sys.vectors[0])?;
                Ok(Some(fourier_coefficients(&s, &phi, &seed, bound)?))
            })
            .map_err(err)?
            .ok_or_else(|| PyValueError::new_err(format!("no one-dimensional rational eigensystem at {lv}")))?;
        Ok(FourierSeries { table })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<FourierSeries> {
        let v: Value = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(FourierSeries { table: FourierTable::from_json(&v).map_err(err)? })
    }

    fn to_json(&self) -> String {
        self.table.to_json().to_string()
    }

    #[getter]
    fn norm_bound(&self) -> u64 {
        self.table.norm_bound
    }

    fn __len__(&self) -> usize {
        self.table.entries.len()
    }

    /// a_α as an exact rational string, None beyond the bound.
    fn coefficient(&self, alpha: &str) -> PyResult<Option<String>> {
        Ok(self.table.get(&elt(alpha)?).map(|q| q.to_string()))
    }

    /// The three components of F(z, t).
    #[pyo3(signature = (z, t, phase="unit"))]
    fn eval(&self, py: Python<'_>, z: Complex64, t: f64, phase: &str) -> PyResult<Vec<Complex64>> {
        let w = H3Point::new(z, t).map_err(err)?;
        let phase = self::phase(phase)?;
        Ok(py.detach(|| eval_series(&self.table, &w, phase)).value.to_vec())
    }

    /// Residual of F|γ = F at (z, t); γ = [a, b, c, d] as ring strings.
    #[pyo3(signature = (gamma, z, t, phase="unit"))]
    fn automorphy(&self, py: Python<'_>, gamma: [String; 4], z: Complex64, t: f64, phase: &str) -> PyResult<Py<PyAny>> {
        let [a, b, c, d] = gamma;
        let g = Mat2::new(elt(&a)?, elt(&b)?, elt(&c)?, elt(&d)?);
        let w = H3Point::new(z, t).map_err(err)?;
        let phase = self::phase(phase)?;
        let r = py.detach(|| automorphy_residual(&self.table, &g, &w, phase)).map_err(err)?;
        to_py(py, &r.to_json())
    }
}

#[pymodule]
fn bianchi(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("VerificationError", m.py().get_type::<VerificationError>())?;
    m.add_function(wrap_pyfunction!(euclid_div, m)?)?;
    m.add_function(wrap_pyfunction!(norm, m)?)?;
    m.add_function(wrap_pyfunction!(space, m)?)?;
    m.add_function(wrap_pyfunction!(heilbronn, m)?)?;
    m.add_function(wrap_pyfunction!(hecke, m)?)?;
    m.add_function(wrap_pyfunction!(eigensystems, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_k, m)?)?;
    m.add_class::<FourierSeries>()?;
    Ok(())
}
