//! Python bindings for the mcenter library. Rationals cross the boundary
//! as `p/q` strings (feed them to `fractions.Fraction`); nothing is ever
//! converted through floating point.

use mcenter_core::rat::{format_rational, parse_rational, Rat};
use mcenter_core::transport::{self, Measure};
use mcenter_core::{central, io, isometry, quotient, sampler, spaces, FiniteMetricSpace};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn value_err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_weights(weights: Vec<String>) -> PyResult<Measure> {
    let parsed: Result<Vec<Rat>, _> = weights.iter().map(|w| parse_rational(w)).collect();
    Measure::new(parsed.map_err(value_err)?).map_err(value_err)
}

fn format_weights(m: &Measure) -> Vec<String> {
    m.weights().iter().map(format_rational).collect()
}

fn format_matrix(m: &[Vec<Rat>]) -> Vec<Vec<String>> {
    m.iter()
        .map(|row| row.iter().map(format_rational).collect())
        .collect()
}

/// A finite metric space with exact rational distances.
#[pyclass(module = "mcenter", skip_from_py_object)]
#[derive(Clone)]
struct MetricSpace {
    inner: FiniteMetricSpace,
}

#[pymethods]
impl MetricSpace {
    /// Validates a labeled distance matrix of rational strings.
    #[new]
    fn py_new(labels: Vec<String>, matrix: Vec<Vec<String>>) -> PyResult<Self> {
        let mut parsed: Vec<Vec<Rat>> = Vec::with_capacity(matrix.len());
        for row in &matrix {
            let r: Result<Vec<Rat>, _> = row.iter().map(|s| parse_rational(s)).collect();
            parsed.push(r.map_err(value_err)?);
        }
        let inner = FiniteMetricSpace::validate(parsed, labels).map_err(value_err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn grid(n: usize) -> PyResult<Self> {
        if n < 1 {
            return Err(PyValueError::new_err("grid needs n >= 1"));
        }
        Ok(Self {
            inner: spaces::grid(n),
        })
    }

    #[staticmethod]
    fn cycle(n: usize) -> PyResult<Self> {
        Ok(Self {
            inner: spaces::cycle(n).map_err(value_err)?,
        })
    }

    #[staticmethod]
    fn equilateral(n: usize) -> PyResult<Self> {
        if n < 1 {
            return Err(PyValueError::new_err("equilateral needs n >= 1"));
        }
        Ok(Self {
            inner: spaces::equilateral(n),
        })
    }

    #[staticmethod]
    fn random(n: usize, seed: u64) -> PyResult<Self> {
        if n < 1 {
            return Err(PyValueError::new_err("random needs n >= 1"));
        }
        Ok(Self {
            inner: spaces::random_space(n, seed),
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: io::parse_space_json(text).map_err(value_err)?,
        })
    }

    fn to_json(&self) -> String {
        io::emit_space_json(&self.inner)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("MetricSpace({} points)", self.inner.len())
    }

    #[getter]
    fn labels(&self) -> Vec<String> {
        self.inner.labels().to_vec()
    }

    fn distance(&self, i: usize, j: usize) -> PyResult<String> {
        let n = self.inner.len();
        if i >= n || j >= n {
            return Err(PyValueError::new_err("point index out of range"));
        }
        Ok(format_rational(self.inner.dist(i, j)))
    }

    fn matrix(&self) -> Vec<Vec<String>> {
        format_matrix(self.inner.matrix())
    }

    fn diameter(&self) -> String {
        format_rational(&self.inner.diameter())
    }

    fn relabel(&self, perm: Vec<usize>) -> PyResult<Self> {
        let n = self.inner.len();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true))
        {
            return Err(PyValueError::new_err("not a permutation of the points"));
        }
        Ok(Self {
            inner: self.inner.relabel(&perm),
        })
    }

    /// Every distance-preserving permutation, lexicographically sorted.
    fn isometries(&self) -> Vec<Vec<usize>> {
        isometry::enumerate_isometries(&self.inner)
            .elements()
            .iter()
            .map(|e| e.perm.clone())
            .collect()
    }

    fn orbits(&self) -> Vec<Vec<usize>> {
        isometry::enumerate_isometries(&self.inner).orbits().orbits
    }

    fn is_transitive(&self) -> bool {
        isometry::enumerate_isometries(&self.inner).is_transitive()
    }

    /// Iterated Chebyshev center sets with their radii.
    fn chebyshev_tower(&self) -> (Vec<Vec<usize>>, Vec<String>, bool) {
        let t = self.inner.chebyshev_tower();
        let radii = t.radii.iter().map(format_rational).collect();
        let singleton = t.terminal_is_singleton();
        (t.levels, radii, singleton)
    }

    fn weak_convexity(&self) -> (bool, Vec<(usize, usize)>) {
        let report = self.inner.weak_convexity_check();
        (report.convex, report.failures)
    }

    /// The quotient space under the isometry group, with the projection.
    fn quotient(&self) -> (MetricSpace, Vec<usize>) {
        let q = quotient::quotient(&self.inner);
        (MetricSpace { inner: q.space }, q.projection)
    }

    /// Level sizes, diameters, and quasi-nilpotence of the quotient tower.
    fn quotient_tower(&self) -> (Vec<usize>, Vec<String>, bool) {
        let t = quotient::quotient_tower(&self.inner);
        (
            t.levels.iter().map(|l| l.len()).collect(),
            t.diameters.iter().map(format_rational).collect(),
            t.quasi_nilpotent,
        )
    }

    /// Kantorovich distance between two weight vectors (rational strings).
    fn kantorovich(&self, mu: Vec<String>, nu: Vec<String>) -> PyResult<String> {
        let mu = parse_weights(mu)?;
        let nu = parse_weights(nu)?;
        let value = transport::kantorovich_distance(&self.inner, &mu, &nu).map_err(value_err)?;
        Ok(format_rational(&value))
    }

    /// Kantorovich distance with certificates:
    /// `(value, coupling, potential)`.
    fn kantorovich_certified(
        &self,
        mu: Vec<String>,
        nu: Vec<String>,
    ) -> PyResult<(String, Vec<Vec<String>>, Vec<String>)> {
        let mu = parse_weights(mu)?;
        let nu = parse_weights(nu)?;
        let res = transport::kantorovich(&self.inner, &mu, &nu).map_err(value_err)?;
        Ok((
            format_rational(&res.value),
            format_matrix(&res.plan.matrix),
            res.potential.values.iter().map(format_rational).collect(),
        ))
    }

    /// Central measure: `(weights, exact, residual_diameter)`.
    #[pyo3(signature = (max_iter = 16))]
    fn central_measure(&self, max_iter: usize) -> PyResult<(Vec<String>, bool, String)> {
        let result = central::central_measure(&self.inner, max_iter).map_err(value_err)?;
        Ok((
            format_weights(&result.measure),
            result.exact,
            format_rational(&result.residual_diameter),
        ))
    }

    /// Central measure of the second kind (quasi-nilpotent spaces only).
    fn lambda_measure(&self) -> PyResult<Vec<String>> {
        let m = central::lambda_measure(&self.inner).map_err(value_err)?;
        Ok(format_weights(&m))
    }

    /// Canonical metric: `(rho, representation, representation_count)`.
    fn canonical_metric(&self) -> PyResult<(Vec<Vec<String>>, Vec<usize>, usize)> {
        let order = sampler::canonical_metric(&self.inner).map_err(value_err)?;
        Ok((
            format_matrix(&order.rho),
            order.representation,
            order.all_representations_count,
        ))
    }

    fn canonical_orbit_sequence(&self) -> PyResult<Vec<usize>> {
        sampler::canonical_orbit_sequence(&self.inner).map_err(value_err)
    }
}

/// Transport of a weight vector under an index map.
#[pyfunction]
fn pushforward(weights: Vec<String>, map: Vec<usize>, target_size: usize) -> PyResult<Vec<String>> {
    let mu = parse_weights(weights)?;
    let out = transport::pushforward(&mu, &map, target_size).map_err(value_err)?;
    Ok(format_weights(&out))
}

#[pymodule]
fn mcenter(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<MetricSpace>()?;
    m.add_function(wrap_pyfunction!(pushforward, m)?)?;
    Ok(())
}
