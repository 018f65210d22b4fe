//! Python bindings. Integers cross the boundary as Python ints, vectors as
//! lists and matrices as lists of rows.

use logchart::cohomology::{cech_vs_group_cohomology, finite_group_cohomology, polydisc_cohomology};
use logchart::covers::{classify_covers, galois_correspondence_check, CoverDescriptor, LogPoint};
use logchart::io;
use logchart::monoid::{integralize, AffineMonoid, MonoidPresentation};
use logchart::morphism::{
    abhyankar_index, chart_classification, is_exact, is_kummer, pushout, ramification_index,
    self_product_decomposition, MonoidHom,
};
use logchart::zlattice::{AmbientAbelianGroup, FiniteAbelianGroup, IntegerMatrix};
use num_bigint::BigInt;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err(e: logchart::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn matrix(rows: Vec<Vec<BigInt>>, cols: usize) -> PyResult<IntegerMatrix> {
    if rows.iter().any(|r| r.len() != cols) {
        return Err(PyValueError::new_err(format!("every row must have {cols} entries")));
    }
    Ok(IntegerMatrix::from_rows(rows, cols))
}

/// A finite abelian group given by invariant factors.
#[pyclass(name = "FiniteGroup", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyFiniteGroup(FiniteAbelianGroup);

#[pymethods]
impl PyFiniteGroup {
    #[new]
    fn new(orders: Vec<BigInt>) -> Self {
        PyFiniteGroup(FiniteAbelianGroup::from_orders(&orders))
    }

    #[getter]
    fn invariants(&self) -> Vec<BigInt> {
        self.0.factors().to_vec()
    }

    #[getter]
    fn order(&self) -> BigInt {
        self.0.order()
    }

    /// Dimensions of `H^i(G, F_ell)` for `i ≤ max_degree`.
    #[pyo3(signature = (ell, max_degree = 4))]
    fn cohomology(&self, ell: u64, max_degree: usize) -> PyResult<Vec<usize>> {
        finite_group_cohomology(&self.0, ell, max_degree).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("FiniteGroup({})", self.0)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

/// A finitely generated submonoid of `Z^r ⊕ torsion`.
#[pyclass(name = "Monoid", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyMonoid(AffineMonoid);

#[pymethods]
impl PyMonoid {
    #[new]
    #[pyo3(signature = (free_rank, generators, torsion = Vec::new()))]
    fn new(free_rank: usize, generators: Vec<Vec<BigInt>>, torsion: Vec<BigInt>) -> PyResult<Self> {
        let ambient = AmbientAbelianGroup::new(free_rank, &torsion);
        if let Some(g) = generators.iter().find(|g| g.len() != ambient.dim()) {
            return Err(PyValueError::new_err(format!("generator {g:?} needs {} coordinates", ambient.dim())));
        }
        AffineMonoid::new(ambient, generators).map(PyMonoid).map_err(err)
    }

    /// `N^n`.
    #[staticmethod]
    fn free(n: usize) -> Self {
        PyMonoid(AffineMonoid::free(n))
    }

    /// The integral monoid of a presentation `(generator count, [(lhs, rhs), ...])`.
    #[staticmethod]
    fn from_presentation(generators: usize, relations: Vec<(Vec<u64>, Vec<u64>)>) -> PyResult<Self> {
        let p = MonoidPresentation::new(generators, relations).map_err(err)?;
        Ok(PyMonoid(integralize(&p)))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        io::parse_monoid(&v, "").map(PyMonoid).map_err(err)
    }

    fn to_json(&self) -> String {
        io::monoid_to_json(&self.0).to_string()
    }

    #[getter]
    fn generators(&self) -> Vec<Vec<BigInt>> {
        self.0.generators().to_vec()
    }

    #[getter]
    fn free_rank(&self) -> usize {
        self.0.ambient().free_rank()
    }

    #[getter]
    fn torsion(&self) -> Vec<BigInt> {
        self.0.ambient().torsion().to_vec()
    }

    #[getter]
    fn rank(&self) -> usize {
        self.0.rank()
    }

    fn contains(&self, x: Vec<BigInt>) -> PyResult<bool> {
        if x.len() != self.0.ambient().dim() {
            return Err(PyValueError::new_err("wrong number of coordinates"));
        }
        Ok(self.0.contains(&x))
    }

    fn __contains__(&self, x: Vec<BigInt>) -> PyResult<bool> {
        self.contains(x)
    }

    fn saturate(&self) -> Self {
        PyMonoid(self.0.saturate())
    }

    /// Flags `fine`, `sharp`, `saturated`, `fs` and the `dimension`.
    fn classify<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let c = self.0.classify();
        let d = PyDict::new(py);
        d.set_item("fine", c.fine)?;
        d.set_item("sharp", c.sharp)?;
        d.set_item("saturated", c.saturated)?;
        d.set_item("fs", c.fs)?;
        d.set_item("dimension", c.dimension)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!("Monoid({})", self.0)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

/// A monoid map given by its matrix on ambient coordinates.
#[pyclass(name = "Hom", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyHom(MonoidHom);

#[pymethods]
impl PyHom {
    #[new]
    fn new(domain: &PyMonoid, codomain: &PyMonoid, group_map: Vec<Vec<BigInt>>) -> PyResult<Self> {
        let m = matrix(group_map, domain.0.ambient().dim())?;
        MonoidHom::new(domain.0.clone(), codomain.0.clone(), m).map(PyHom).map_err(err)
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        io::parse_hom(&v, "").map(PyHom).map_err(err)
    }

    fn to_json(&self) -> String {
        io::hom_to_json(&self.0).to_string()
    }

    #[getter]
    fn domain(&self) -> PyMonoid {
        PyMonoid(self.0.domain().clone())
    }

    #[getter]
    fn codomain(&self) -> PyMonoid {
        PyMonoid(self.0.codomain().clone())
    }

    #[getter]
    fn group_map(&self) -> Vec<Vec<BigInt>> {
        self.0.group_map().to_rows()
    }

    fn apply(&self, x: Vec<BigInt>) -> PyResult<Vec<BigInt>> {
        if x.len() != self.0.domain().ambient().dim() {
            return Err(PyValueError::new_err("wrong number of coordinates"));
        }
        Ok(self.0.apply(&x))
    }

    /// `None` when exact, otherwise a witness in `P^gp` mapping into `Q` but not lying in `P`.
    fn exactness_witness(&self) -> PyResult<Option<Vec<BigInt>>> {
        let v = is_exact(&self.0).map_err(err)?;
        Ok(if v.exact { None } else { v.witness })
    }

    fn is_exact(&self) -> PyResult<bool> {
        Ok(is_exact(&self.0).map_err(err)?.exact)
    }

    fn is_kummer(&self) -> PyResult<bool> {
        Ok(is_kummer(&self.0).map_err(err)?.kummer)
    }

    /// The cokernel of `u^gp` for a Kummer map, else `None`.
    fn galois_group(&self) -> PyResult<Option<PyFiniteGroup>> {
        let v = is_kummer(&self.0).map_err(err)?;
        Ok(v.galois_group.filter(|_| v.kummer).map(PyFiniteGroup))
    }

    fn ramification_index(&self) -> PyResult<BigInt> {
        ramification_index(&self.0).map_err(err)
    }

    fn abhyankar_index(&self) -> PyResult<BigInt> {
        abhyankar_index(&self.0).map_err(err)
    }

    /// Chart flags at residue characteristic `p` (0 or a prime).
    #[pyo3(signature = (p = 0))]
    fn chart<'py>(&self, py: Python<'py>, p: u64) -> PyResult<Bound<'py, PyDict>> {
        let c = chart_classification(&self.0, p).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("injective", c.injective)?;
        d.set_item("exact", c.exact)?;
        d.set_item("kummer", c.kummer)?;
        d.set_item("log_smooth", c.log_smooth)?;
        d.set_item("log_etale", c.log_etale)?;
        d.set_item("kummer_etale", c.kummer_etale)?;
        d.set_item("galois_group", c.galois_group.map(PyFiniteGroup))?;
        Ok(d)
    }

    /// `(monoid, left, right)` for the pushout of `self` and `other` along their common domain.
    #[pyo3(signature = (other, saturate = true))]
    fn pushout(&self, other: &PyHom, saturate: bool) -> PyResult<(PyMonoid, PyHom, PyHom)> {
        let po = pushout(&self.0, &other.0, saturate).map_err(err)?;
        Ok((PyMonoid(po.monoid), PyHom(po.left), PyHom(po.right)))
    }

    /// The saturated `j`-fold self product and whether it was certified
    /// isomorphic to `Q ⊕ G^{j-1}`.
    fn self_product(&self, j: usize) -> PyResult<(PyMonoid, PyFiniteGroup, bool)> {
        let sp = self_product_decomposition(&self.0, j).map_err(err)?;
        Ok((PyMonoid(sp.product), PyFiniteGroup(sp.galois_group), sp.certified))
    }

    /// Compares Čech cohomology of the cover with `H^*(G, F_ell)` over degrees in `[-bound, bound]^r`.
    #[pyo3(signature = (ell, max_degree = 3, bound = 8))]
    fn cech_matches_group_cohomology(&self, ell: u64, max_degree: usize, bound: i64) -> PyResult<(bool, Vec<usize>, Vec<usize>)> {
        let c = cech_vs_group_cohomology(&self.0, ell, max_degree, bound).map_err(err)?;
        Ok((c.matches, c.group_cohomology, c.cech_normalized))
    }

    fn __repr__(&self) -> String {
        format!("Hom({} -> {}, {:?})", self.0.domain(), self.0.codomain(), self.0.group_map().to_rows())
    }
}

/// A Kummer cover of a log point.
#[pyclass(name = "Cover", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyCover(CoverDescriptor);

#[pymethods]
impl PyCover {
    #[getter]
    fn level(&self) -> u64 {
        self.0.level
    }

    #[getter]
    fn lattice(&self) -> Vec<Vec<BigInt>> {
        self.0.lattice.clone()
    }

    #[getter]
    fn monoid(&self) -> PyMonoid {
        PyMonoid(self.0.monoid.clone())
    }

    #[getter]
    fn inclusion(&self) -> PyHom {
        PyHom(self.0.inclusion.clone())
    }

    #[getter]
    fn galois_group(&self) -> PyFiniteGroup {
        PyFiniteGroup(self.0.galois_group.clone())
    }

    fn __repr__(&self) -> String {
        format!("Cover(level={}, lattice={:?}, G={})", self.0.level, self.0.lattice, self.0.galois_group)
    }
}

fn point(monoid: &PyMonoid, exclude: Vec<u64>) -> PyResult<LogPoint> {
    LogPoint::new(monoid.0.clone(), exclude).map_err(err)
}

/// Connected Kummer covers of level `n` over the log point with monoid `monoid`.
#[pyfunction]
#[pyo3(signature = (monoid, n, exclude_primes = Vec::new()))]
fn covers(monoid: &PyMonoid, n: u64, exclude_primes: Vec<u64>) -> PyResult<Vec<PyCover>> {
    let pt = point(monoid, exclude_primes)?;
    Ok(classify_covers(&pt, n).map_err(err)?.into_iter().map(PyCover).collect())
}

/// Checks `Hom(Q1, Q2)` against equivariant maps of fibers for every pair of covers.
#[pyfunction]
#[pyo3(signature = (monoid, n, exclude_primes = Vec::new()))]
fn galois_correspondence(monoid: &PyMonoid, n: u64, exclude_primes: Vec<u64>) -> PyResult<(bool, usize, usize)> {
    let pt = point(monoid, exclude_primes)?;
    let r = galois_correspondence_check(&pt, n).map_err(err)?;
    Ok((r.passed, r.covers.len(), r.pairs.len()))
}

/// Dimensions of the invariant cohomology of the punctured polydisc of
/// dimension `n` at level `m`.
#[pyfunction]
#[pyo3(signature = (n, m, ell = None))]
fn polydisc(n: usize, m: u64, ell: Option<u64>) -> PyResult<Vec<usize>> {
    Ok(polydisc_cohomology(n, m, ell).map_err(err)?.dims)
}

#[pymodule]
fn pylogchart(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFiniteGroup>()?;
    m.add_class::<PyMonoid>()?;
    m.add_class::<PyHom>()?;
    m.add_class::<PyCover>()?;
    m.add_function(wrap_pyfunction!(covers, m)?)?;
    m.add_function(wrap_pyfunction!(galois_correspondence, m)?)?;
    m.add_function(wrap_pyfunction!(polydisc, m)?)?;
    Ok(())
}
