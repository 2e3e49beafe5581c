//! Python bindings. Allocations cross the boundary as lists holding the
//! owning agent index or `None` per item, prices as lists of floats, and
//! infinite qualities as `float("inf")`.

use exchange_lab::algorithms::{
    greedy_allocate, is_local_optimum, local_optimum_search, optimal_allocation, price_bands,
    supporting_prices, ImprovementRule, PriceRule, SearchPolicy, SearchStatus,
};
use exchange_lab::bundle::Bundle;
use exchange_lab::catalog;
use exchange_lab::economy::{social_value, Allocation, PriceVector};
use exchange_lab::equilibrium::{
    check_single_improvement, check_single_swap, max_q_for_allocation_with, max_quality,
    max_quasi_q_for_allocation, quasi_walrasian_quality, verify_local_equilibrium,
    verify_strong_ir, verify_walrasian, EquilibriumVerdict, PriceShape, Quality,
};
use exchange_lab::generate::{seeded_economy, EconomyClass};
use exchange_lab::io;
use exchange_lab::lp::{dual_prices, fractional_optimum};
use exchange_lab::SubmodularityIndex;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(exchange_lab, ExchangeLabError, PyValueError);

fn err(e: exchange_lab::Error) -> PyErr {
    ExchangeLabError::new_err(e.to_string())
}

fn quality(q: Quality) -> f64 {
    q.as_f64()
}

fn index(a: SubmodularityIndex) -> f64 {
    a.finite().unwrap_or(f64::INFINITY)
}

/// An exchange economy: named items and agents with full valuation tables.
#[pyclass(name = "Economy", module = "exchange_lab", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyEconomy {
    inner: exchange_lab::Economy,
}

#[pymethods]
impl PyEconomy {
    /// Parses an economy JSON document.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyEconomy {
            inner: io::economy_from_str(text).map_err(err)?,
        })
    }

    /// A built-in example: `(economy, allocation, prices)`.
    #[staticmethod]
    #[pyo3(signature = (name, param=None))]
    fn example(name: &str, param: Option<f64>) -> PyResult<(Self, Vec<Option<usize>>, Vec<f64>)> {
        let ex = catalog::by_name(name, param).map_err(err)?;
        Ok((
            PyEconomy { inner: ex.economy },
            ex.allocation.assignment().to_vec(),
            ex.prices.into_vec(),
        ))
    }

    /// A seeded random economy of a class: additive, unit-demand,
    /// budgeted-additive or random-monotone.
    #[staticmethod]
    fn random(class: &str, items: usize, agents: usize, seed: u64) -> PyResult<Self> {
        let class: EconomyClass = class.parse().map_err(err)?;
        Ok(PyEconomy {
            inner: seeded_economy(class, items, agents, seed).map_err(err)?,
        })
    }

    fn to_json(&self) -> String {
        io::to_pretty(&io::economy_to_json(&self.inner))
    }

    fn fingerprint(&self) -> String {
        io::fingerprint(&self.inner)
    }

    #[getter]
    fn items(&self) -> Vec<String> {
        self.inner.items().to_vec()
    }

    #[getter]
    fn agents(&self) -> Vec<String> {
        self.inner.agents().iter().map(|a| a.name.clone()).collect()
    }

    /// `v_agent(bundle)` for a bundle given as item indices.
    fn value(&self, agent: usize, bundle: Vec<usize>) -> PyResult<f64> {
        self.check_agent(agent)?;
        let b = Bundle::from_items(bundle, self.inner.num_items()).map_err(err)?;
        Ok(self.inner.valuation(agent).value(b))
    }

    /// Per-agent submodularity indices.
    fn submodularity_indices(&self) -> Vec<f64> {
        self.inner
            .submodularity_indices()
            .into_iter()
            .map(index)
            .collect()
    }

    fn submodularity_index(&self) -> f64 {
        index(self.inner.submodularity_index())
    }

    fn social_value(&self, allocation: Vec<Option<usize>>) -> PyResult<f64> {
        social_value(&self.inner, &Allocation::new(allocation)).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.inner.num_items()
    }

    fn __repr__(&self) -> String {
        format!(
            "Economy(items={:?}, agents={:?})",
            self.inner.items(),
            self.agents()
        )
    }
}

impl PyEconomy {
    fn check_agent(&self, agent: usize) -> PyResult<()> {
        if agent < self.inner.num_agents() {
            Ok(())
        } else {
            Err(ExchangeLabError::new_err(format!(
                "agent {agent} out of range for {} agents",
                self.inner.num_agents()
            )))
        }
    }
}

fn to_prices(p: Vec<f64>) -> PyResult<PriceVector> {
    PriceVector::new(p).map_err(err)
}

fn verdict<'py>(
    py: Python<'py>,
    e: &PyEconomy,
    v: &EquilibriumVerdict,
) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("holds", v.holds)?;
    let violations: Vec<String> = v
        .violations
        .iter()
        .map(|w| io::witness_to_json(&e.inner, w).to_string())
        .collect();
    d.set_item("violations", violations)?;
    Ok(d)
}

/// Maximum-value total allocation by dynamic programming: `(allocation, value)`.
#[pyfunction(name = "optimal_allocation")]
fn py_optimal_allocation(e: &PyEconomy) -> (Vec<Option<usize>>, f64) {
    let (f, m) = optimal_allocation(&e.inner);
    (f.assignment().to_vec(), m)
}

/// Value of the fractional relaxation.
#[pyfunction(name = "fractional_optimum")]
fn py_fractional_optimum(e: &PyEconomy) -> PyResult<f64> {
    Ok(fractional_optimum(&e.inner).map_err(err)?.1)
}

/// Optimal dual solution: `(item prices, agent utilities)`.
#[pyfunction(name = "dual_prices")]
fn py_dual_prices(e: &PyEconomy) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let d = dual_prices(&e.inner).map_err(err)?;
    Ok((d.item_prices.into_vec(), d.agent_utilities))
}

/// Largest `r` and `s` for which `(allocation, prices)` is an
/// `(r, s)`-local equilibrium.
#[pyfunction(name = "max_quality")]
fn py_max_quality<'py>(
    py: Python<'py>,
    e: &PyEconomy,
    allocation: Vec<Option<usize>>,
    prices: Vec<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let rep =
        max_quality(&e.inner, &Allocation::new(allocation), &to_prices(prices)?).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("r_star", quality(rep.r_star))?;
    d.set_item("s_star", quality(rep.s_star))?;
    d.set_item("q", quality(rep.q()))?;
    d.set_item("unallocated_price_ok", rep.unallocated_price_ok)?;
    Ok(d)
}

#[pyfunction(name = "verify_local_equilibrium")]
#[pyo3(signature = (e, allocation, prices, r=1.0, s=1.0))]
fn py_verify_local<'py>(
    py: Python<'py>,
    e: &PyEconomy,
    allocation: Vec<Option<usize>>,
    prices: Vec<f64>,
    r: f64,
    s: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let v = verify_local_equilibrium(
        &e.inner,
        &Allocation::new(allocation),
        &to_prices(prices)?,
        r,
        s,
    )
    .map_err(err)?;
    verdict(py, e, &v)
}

#[pyfunction(name = "verify_strong_ir")]
#[pyo3(signature = (e, allocation, prices, c=1.0))]
fn py_verify_strong_ir<'py>(
    py: Python<'py>,
    e: &PyEconomy,
    allocation: Vec<Option<usize>>,
    prices: Vec<f64>,
    c: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let v = verify_strong_ir(
        &e.inner,
        &Allocation::new(allocation),
        &to_prices(prices)?,
        c,
    )
    .map_err(err)?;
    verdict(py, e, &v)
}

#[pyfunction(name = "verify_walrasian")]
fn py_verify_walrasian<'py>(
    py: Python<'py>,
    e: &PyEconomy,
    allocation: Vec<Option<usize>>,
    prices: Vec<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let v = verify_walrasian(&e.inner, &Allocation::new(allocation), &to_prices(prices)?)
        .map_err(err)?;
    verdict(py, e, &v)
}

/// Single-swap condition; with `drops=True` single-item drops are checked too.
#[pyfunction(name = "check_single_swap")]
#[pyo3(signature = (e, allocation, prices, drops=false))]
fn py_check_single_swap<'py>(
    py: Python<'py>,
    e: &PyEconomy,
    allocation: Vec<Option<usize>>,
    prices: Vec<f64>,
    drops: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let f = Allocation::new(allocation);
    let p = to_prices(prices)?;
    let v = if drops {
        check_single_improvement(&e.inner, &f, &p)
    } else {
        check_single_swap(&e.inner, &f, &p)
    }
    .map_err(err)?;
    verdict(py, e, &v)
}

#[pyfunction(name = "quasi_walrasian_quality")]
fn py_quasi_quality(
    e: &PyEconomy,
    allocation: Vec<Option<usize>>,
    prices: Vec<f64>,
) -> PyResult<f64> {
    quasi_walrasian_quality(&e.inner, &Allocation::new(allocation), &to_prices(prices)?)
        .map_err(err)
}

/// Supremum `q` with prices making the allocation a `(q, q)`-local
/// equilibrium: `(q, prices)`. `uniform=True` restricts to equal prices.
#[pyfunction(name = "max_q")]
#[pyo3(signature = (e, allocation, uniform=false))]
fn py_max_q(
    e: &PyEconomy,
    allocation: Vec<Option<usize>>,
    uniform: bool,
) -> PyResult<(f64, Vec<f64>)> {
    let shape = if uniform {
        PriceShape::Uniform
    } else {
        PriceShape::Free
    };
    let res =
        max_q_for_allocation_with(&e.inner, &Allocation::new(allocation), shape).map_err(err)?;
    Ok((quality(res.q_star), res.prices.into_vec()))
}

#[pyfunction(name = "max_quasi_q")]
fn py_max_quasi_q(e: &PyEconomy, allocation: Vec<Option<usize>>) -> PyResult<(f64, Vec<f64>)> {
    let (q, p) = max_quasi_q_for_allocation(&e.inner, &Allocation::new(allocation)).map_err(err)?;
    Ok((q, p.into_vec()))
}

/// Greedy allocation in `order` (catalog order by default): `(allocation, prices)`.
#[pyfunction(name = "greedy")]
#[pyo3(signature = (e, order=None, lam=0.0))]
fn py_greedy(
    e: &PyEconomy,
    order: Option<Vec<usize>>,
    lam: f64,
) -> PyResult<(Vec<Option<usize>>, Vec<f64>)> {
    let order = order.unwrap_or_else(|| (0..e.inner.num_items()).collect());
    let rule = PriceRule::new(lam).map_err(err)?;
    let (f, p, _) = greedy_allocate(&e.inner, &order, rule).map_err(err)?;
    Ok((f.assignment().to_vec(), p.into_vec()))
}

/// Single-item-transfer local search from a total allocation:
/// `(allocation, moves, converged)`.
#[pyfunction(name = "local_search")]
#[pyo3(signature = (e, allocation, rule="best", seed=0, move_cap=1_000_000))]
fn py_local_search(
    e: &PyEconomy,
    allocation: Vec<Option<usize>>,
    rule: &str,
    seed: u64,
    move_cap: usize,
) -> PyResult<(Vec<Option<usize>>, usize, bool)> {
    let rule = match rule {
        "first" => ImprovementRule::First,
        "best" => ImprovementRule::Best,
        "random" => ImprovementRule::Random,
        other => {
            return Err(ExchangeLabError::new_err(format!(
                "unknown rule '{other}'; expected first, best or random"
            )))
        }
    };
    let policy = SearchPolicy {
        rule,
        seed,
        move_cap,
        ..SearchPolicy::default()
    };
    let out = local_optimum_search(&e.inner, &Allocation::new(allocation), &policy).map_err(err)?;
    Ok((
        out.allocation.assignment().to_vec(),
        out.moves.len(),
        out.status == SearchStatus::Converged,
    ))
}

#[pyfunction(name = "is_local_optimum")]
fn py_is_local_optimum(e: &PyEconomy, allocation: Vec<Option<usize>>) -> PyResult<bool> {
    Ok(is_local_optimum(&e.inner, &Allocation::new(allocation))
        .map_err(err)?
        .holds)
}

/// Suitable price bands `[(lo, hi)]` at a local optimum.
#[pyfunction(name = "price_bands")]
fn py_price_bands(e: &PyEconomy, allocation: Vec<Option<usize>>) -> PyResult<Vec<(f64, f64)>> {
    price_bands(&e.inner, &Allocation::new(allocation)).map_err(err)
}

#[pyfunction(name = "supporting_prices")]
#[pyo3(signature = (e, allocation, lam=0.0))]
fn py_supporting_prices(
    e: &PyEconomy,
    allocation: Vec<Option<usize>>,
    lam: f64,
) -> PyResult<Vec<f64>> {
    let rule = PriceRule::new(lam).map_err(err)?;
    Ok(
        supporting_prices(&e.inner, &Allocation::new(allocation), rule)
            .map_err(err)?
            .into_vec(),
    )
}

#[pymodule]
#[pyo3(name = "exchange_lab")]
fn exchange_lab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("ExchangeLabError", m.py().get_type::<ExchangeLabError>())?;
    m.add("EXAMPLES", catalog::NAMES.to_vec())?;
    m.add_class::<PyEconomy>()?;
    m.add_function(wrap_pyfunction!(py_optimal_allocation, m)?)?;
    m.add_function(wrap_pyfunction!(py_fractional_optimum, m)?)?;
    m.add_function(wrap_pyfunction!(py_dual_prices, m)?)?;
    m.add_function(wrap_pyfunction!(py_max_quality, m)?)?;
    m.add_function(wrap_pyfunction!(py_verify_local, m)?)?;
    m.add_function(wrap_pyfunction!(py_verify_strong_ir, m)?)?;
    m.add_function(wrap_pyfunction!(py_verify_walrasian, m)?)?;
    m.add_function(wrap_pyfunction!(py_check_single_swap, m)?)?;
    m.add_function(wrap_pyfunction!(py_quasi_quality, m)?)?;
    m.add_function(wrap_pyfunction!(py_max_q, m)?)?;
    m.add_function(wrap_pyfunction!(py_max_quasi_q, m)?)?;
    m.add_function(wrap_pyfunction!(py_greedy, m)?)?;
    m.add_function(wrap_pyfunction!(py_local_search, m)?)?;
    m.add_function(wrap_pyfunction!(py_is_local_optimum, m)?)?;
    m.add_function(wrap_pyfunction!(py_price_bands, m)?)?;
    m.add_function(wrap_pyfunction!(py_supporting_prices, m)?)?;
    Ok(())
}
