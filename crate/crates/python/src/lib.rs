//! Python bindings: curve data, eigenform decomposition, classification,
//! period lattices, torus maps and interval exchanges.

use std::collections::BTreeMap;
use std::sync::Arc;

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use modfol_core::algebra::{NumberField, QPolynomial, RealEmbedding};
use modfol_core::congruence::{curve_data, Level};
use modfol_core::eigen::{decompose as core_decompose, decompose_auto, EigenformOrbit};
use modfol_core::foliation::{
    classify as core_classify, classify_torus, module_rank, JacobianModule,
};
use modfol_core::iet::{minimality_probe, parse_length, periodicity_report, rauzy_step};
use modfol_core::modsym::{build_space, cuspidal_subspace, CuspidalSubspace};
use modfol_core::periods::{
    detect_rank as core_detect_rank, homology_generators, numeric_jacobian, order_for, BigFloat,
    NumericEigenform,
};
use modfol_core::Error;

create_exception!(modfol, ModfolError, PyException);

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Domain(_) | Error::Parse(_) | Error::Dimension(_) => {
            PyValueError::new_err(e.to_string())
        }
        other => ModfolError::new_err(other.to_string()),
    }
}

fn level(n: u64) -> PyResult<Level> {
    Level::new(n).map_err(py_err)
}

fn cuspidal(n: u64) -> PyResult<CuspidalSubspace> {
    Ok(cuspidal_subspace(Arc::new(build_space(level(n)?))))
}

fn orbits(s: &CuspidalSubspace) -> PyResult<Vec<EigenformOrbit>> {
    if s.dimension() == 0 {
        return Err(py_err(Error::NoCuspForms(s.level().get())));
    }
    decompose_auto(s).map_err(py_err)
}

/// Index, elliptic points, cusps and genus of X0(N).
#[pyclass(frozen, get_all, module = "modfol")]
struct Curve {
    level: u64,
    mu: u64,
    nu2: u64,
    nu3: u64,
    nu_inf: u64,
    genus: u64,
}

#[pymethods]
impl Curve {
    fn __repr__(&self) -> String {
        format!(
            "Curve(level={}, mu={}, nu2={}, nu3={}, nu_inf={}, genus={})",
            self.level, self.mu, self.nu2, self.nu3, self.nu_inf, self.genus
        )
    }
}

#[pyfunction]
fn curve(n: u64) -> PyResult<Curve> {
    let c = curve_data(level(n)?);
    Ok(Curve {
        level: n,
        mu: c.index_mu,
        nu2: c.nu2,
        nu3: c.nu3,
        nu_inf: c.nu_inf,
        genus: c.genus,
    })
}

/// One Galois orbit of newform eigenvalue systems. Coefficients are
/// polynomials in the field generator `x`.
#[pyclass(frozen, get_all, module = "modfol")]
struct Eigenform {
    level: u64,
    orbit: usize,
    degree: usize,
    field: String,
    defining_prime: u64,
    embedding_root: f64,
    multiplicity: usize,
    possibly_old: bool,
    coefficients: BTreeMap<u64, String>,
    classification: Option<String>,
}

impl Eigenform {
    fn new(index: usize, o: &EigenformOrbit) -> Self {
        let c = curve_data(o.level);
        Self {
            level: o.level.get(),
            orbit: index,
            degree: o.degree,
            field: o.field.minimal_polynomial().to_string_var("x"),
            defining_prime: o.defining_prime,
            embedding_root: o.embedding.root_f64(),
            multiplicity: o.multiplicity,
            possibly_old: o.possibly_old,
            coefficients: o
                .coefficient_map
                .iter()
                .map(|(&p, v)| (p, v.to_string_var("x")))
                .collect(),
            classification: core_classify(o, &c)
                .ok()
                .map(|k| k.kind.as_str().to_string()),
        }
    }
}

#[pymethods]
impl Eigenform {
    fn __repr__(&self) -> String {
        format!(
            "Eigenform(level={}, orbit={}, degree={}, field='{}')",
            self.level, self.orbit, self.degree, self.field
        )
    }
}

/// Splits the cuspidal space of level `n`; primes are chosen automatically
/// unless given.
#[pyfunction]
#[pyo3(signature = (n, primes=None))]
fn decompose(py: Python<'_>, n: u64, primes: Option<Vec<u64>>) -> PyResult<Vec<Eigenform>> {
    let s = cuspidal(n)?;
    if s.dimension() == 0 {
        return Ok(Vec::new());
    }
    let found = py
        .detach(|| match &primes {
            Some(ps) => core_decompose(&s, ps),
            None => decompose_auto(&s),
        })
        .map_err(py_err)?;
    Ok(found
        .iter()
        .enumerate()
        .map(|(i, o)| Eigenform::new(i, o))
        .collect())
}

/// Foliation class of each orbit at level `n`, in orbit order.
#[pyfunction]
fn classify(py: Python<'_>, n: u64) -> PyResult<Vec<String>> {
    let s = cuspidal(n)?;
    let c = curve_data(s.level());
    let os = py.detach(|| orbits(&s))?;
    os.iter()
        .map(|o| {
            core_classify(o, &c)
                .map(|k| k.kind.as_str().to_string())
                .map_err(py_err)
        })
        .collect()
}

/// Classification of the torus map given by an SL2(Z) matrix.
#[pyclass(frozen, get_all, module = "modfol")]
struct Torus {
    kind: String,
    trace: i64,
    /// Largest eigenvalue for Anosov maps.
    dilatation: Option<f64>,
    dilatation_polynomial: Option<String>,
}

#[pyfunction]
fn torus(a: i64, b: i64, c: i64, d: i64) -> PyResult<Torus> {
    let t = classify_torus(&[[a, b], [c, d]]).map_err(py_err)?;
    let (dilatation, dilatation_polynomial) = match &t.dilatation {
        Some((lam, emb)) => (
            Some(emb.to_f64(lam)),
            Some(lam.minimal_polynomial().to_string_var("x")),
        ),
        None => (None, None),
    };
    Ok(Torus {
        kind: t.kind.as_str().to_string(),
        trace: t.trace,
        dilatation,
        dilatation_polynomial,
    })
}

/// Numerical period lattice of one orbit, with the detected Z-rank.
#[pyclass(frozen, get_all, module = "modfol")]
struct Periods {
    level: u64,
    orbit: usize,
    degree: usize,
    digits: u32,
    values: Vec<String>,
    precision_estimate: u32,
    detected_rank: usize,
    exact_rank: usize,
    relations: Vec<Vec<String>>,
}

#[pyfunction]
#[pyo3(signature = (n, orbit=0, digits=60))]
fn periods(py: Python<'_>, n: u64, orbit: usize, digits: u32) -> PyResult<Periods> {
    if digits < 40 {
        return Err(PyValueError::new_err(
            "rank detection needs at least 40 digits",
        ));
    }
    let s = cuspidal(n)?;
    py.detach(|| {
        let os = orbits(&s)?;
        let o = os
            .get(orbit)
            .ok_or_else(|| PyValueError::new_err(format!("level {n} has {} orbits", os.len())))?;
        let basis = homology_generators(&s);
        let f = NumericEigenform::new(o, orbit, &s.space, order_for(&basis.gammas, digits), digits)
            .map_err(py_err)?;
        let pv = numeric_jacobian(&f, &basis.gammas, digits).map_err(py_err)?;
        let report = core_detect_rank(&pv.values, digits).map_err(py_err)?;
        Ok(Periods {
            level: n,
            orbit,
            degree: o.degree,
            digits,
            values: pv.values.iter().map(|v| v.to_decimal(digits)).collect(),
            precision_estimate: pv.precision_estimate,
            detected_rank: report.rank,
            exact_rank: module_rank(&JacobianModule::of_orbit(o)),
            relations: report
                .relations
                .iter()
                .map(|r| r.iter().map(|x| x.to_string()).collect())
                .collect(),
        })
    })
}

/// Z-rank of decimal reals given as strings, with integer relations.
#[pyfunction]
#[pyo3(signature = (values, digits=60))]
fn detect_rank(values: Vec<String>, digits: u32) -> PyResult<(usize, Vec<Vec<String>>)> {
    let xs = values
        .iter()
        .map(|v| BigFloat::parse(v, digits))
        .collect::<Result<Vec<_>, _>>()
        .map_err(py_err)?;
    let r = core_detect_rank(&xs, digits).map_err(py_err)?;
    Ok((
        r.rank,
        r.relations
            .iter()
            .map(|rel| rel.iter().map(|x| x.to_string()).collect())
            .collect(),
    ))
}

/// An interval exchange with lengths in a real number field. Lengths are
/// strings like `1/3` or `2*w+1`, `w` being the root of `field`.
#[pyclass(frozen, module = "modfol")]
struct Iet {
    inner: modfol_core::iet::Iet,
}

#[pymethods]
impl Iet {
    /// `perm` is one-based: `perm[i]` is the position of interval `i + 1`
    /// after the exchange.
    #[new]
    #[pyo3(signature = (lengths, perm, field=None, root=None))]
    fn new(
        lengths: Vec<String>,
        perm: Vec<usize>,
        field: Option<&str>,
        root: Option<usize>,
    ) -> PyResult<Self> {
        let k = match field {
            Some(f) => NumberField::new(QPolynomial::parse(f, "w").map_err(py_err)?),
            None => Ok(NumberField::rationals()),
        }
        .map_err(py_err)?;
        let emb = match root {
            Some(i) => RealEmbedding::new(&k, i),
            None => RealEmbedding::largest(&k),
        }
        .map_err(py_err)?;
        let ls = lengths
            .iter()
            .map(|s| parse_length(s, &k))
            .collect::<Result<Vec<_>, _>>()
            .map_err(py_err)?;
        let inner = modfol_core::iet::Iet::from_one_based(ls, &perm, emb).map_err(py_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn lengths(&self) -> Vec<String> {
        self.inner
            .lengths()
            .iter()
            .map(|l| l.to_string_var("w"))
            .collect()
    }

    #[getter]
    fn permutation(&self) -> Vec<usize> {
        self.inner.permutation().iter().map(|p| p + 1).collect()
    }

    #[getter]
    fn total(&self) -> String {
        self.inner.total().to_string_var("w")
    }

    fn apply(&self, x: &str) -> PyResult<String> {
        let x = parse_length(x, self.inner.field()).map_err(py_err)?;
        Ok(self.inner.apply(&x).map_err(py_err)?.to_string_var("w"))
    }

    fn apply_inverse(&self, y: &str) -> PyResult<String> {
        let y = parse_length(y, self.inner.field()).map_err(py_err)?;
        Ok(self
            .inner
            .apply_inverse(&y)
            .map_err(py_err)?
            .to_string_var("w"))
    }

    fn rauzy_step(&self) -> PyResult<Iet> {
        Ok(Iet {
            inner: rauzy_step(&self.inner).map_err(py_err)?,
        })
    }

    /// For rational lengths: `(periodic, lcm of cycle lengths, cells)`.
    fn periodicity(&self, py: Python<'_>) -> PyResult<(bool, String, u64)> {
        let r = py
            .detach(|| periodicity_report(&self.inner))
            .map_err(py_err)?;
        Ok((r.periodic, r.period_lcm.to_string(), r.cells))
    }

    /// For lengths of rank at least two: `(no_periodic_orbit_found,
    /// keane_violations)` after `steps` Rauzy steps.
    #[pyo3(signature = (steps=10_000))]
    fn minimality(&self, py: Python<'_>, steps: usize) -> PyResult<(bool, usize)> {
        let r = py
            .detach(|| minimality_probe(&self.inner, steps))
            .map_err(py_err)?;
        Ok((r.no_periodic_orbit_found, r.keane_violations))
    }

    fn __repr__(&self) -> String {
        format!(
            "Iet(lengths={:?}, perm={:?})",
            self.lengths(),
            self.permutation()
        )
    }
}

#[pymodule]
fn modfol(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("ModfolError", m.py().get_type::<ModfolError>())?;
    m.add_class::<Curve>()?;
    m.add_class::<Eigenform>()?;
    m.add_class::<Torus>()?;
    m.add_class::<Periods>()?;
    m.add_class::<Iet>()?;
    m.add_function(wrap_pyfunction!(curve, m)?)?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(torus, m)?)?;
    m.add_function(wrap_pyfunction!(periods, m)?)?;
    m.add_function(wrap_pyfunction!(detect_rank, m)?)?;
    Ok(())
}
