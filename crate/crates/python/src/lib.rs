//! Python bindings for `fdmimo`.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use fdmimo::channel::RngStream;
use fdmimo::harness::{run_experiment_with_threads, ExperimentSpec};
use fdmimo::power_control::{pf_solve as core_pf_solve, PfSystem};
use fdmimo::solver::{draw_trial, solve};
use fdmimo::{ComplexMatrix, ComplexVector, Error, SinrTargets, TxMode};

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Dimension(_) | Error::NonFinite(_) | Error::InvalidConfig(_) => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn parse_mode(mode: &str) -> PyResult<TxMode> {
    mode.parse().map_err(PyValueError::new_err)
}

fn rows(m: &ComplexMatrix) -> Vec<Vec<Complex64>> {
    (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect()
}

fn entries(v: &ComplexVector) -> Vec<Complex64> {
    v.iter().copied().collect()
}

/// System parameters. Every keyword defaults to the reference deployment.
#[pyclass(name = "SystemConfig", from_py_object)]
#[derive(Clone)]
struct PySystemConfig {
    inner: fdmimo::SystemConfig,
}

#[pymethods]
impl PySystemConfig {
    #[new]
    #[pyo3(signature = (*, m=None, n=None, n_tap=None, noise_floor_dbm=None, p_max_dbm=None,
        pl_link_db=None, pl_si_db=None, k_factor_db=None, amp_imp_db=None, phase_imp_deg=None,
        max_iter=None, conv_tol=None))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        m: Option<usize>,
        n: Option<usize>,
        n_tap: Option<usize>,
        noise_floor_dbm: Option<f64>,
        p_max_dbm: Option<f64>,
        pl_link_db: Option<f64>,
        pl_si_db: Option<f64>,
        k_factor_db: Option<f64>,
        amp_imp_db: Option<f64>,
        phase_imp_deg: Option<f64>,
        max_iter: Option<usize>,
        conv_tol: Option<f64>,
    ) -> PyResult<Self> {
        let d = fdmimo::SystemConfig::default();
        let inner = fdmimo::SystemConfig {
            m: m.unwrap_or(d.m),
            n: n.unwrap_or(d.n),
            n_tap: n_tap.unwrap_or(d.n_tap),
            noise_floor_dbm: noise_floor_dbm.unwrap_or(d.noise_floor_dbm),
            p_max_dbm: p_max_dbm.unwrap_or(d.p_max_dbm),
            pl_link_db: pl_link_db.unwrap_or(d.pl_link_db),
            pl_si_db: pl_si_db.unwrap_or(d.pl_si_db),
            k_factor_db: k_factor_db.unwrap_or(d.k_factor_db),
            amp_imp_db: amp_imp_db.unwrap_or(d.amp_imp_db),
            phase_imp_deg: phase_imp_deg.unwrap_or(d.phase_imp_deg),
            max_iter: max_iter.unwrap_or(d.max_iter),
            conv_tol: conv_tol.unwrap_or(d.conv_tol),
        };
        inner.validate().map_err(to_py_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn n_tap(&self) -> usize {
        self.inner.n_tap
    }

    #[getter]
    fn noise_floor_dbm(&self) -> f64 {
        self.inner.noise_floor_dbm
    }

    #[getter]
    fn p_max_dbm(&self) -> f64 {
        self.inner.p_max_dbm
    }

    #[getter]
    fn pl_link_db(&self) -> f64 {
        self.inner.pl_link_db
    }

    #[getter]
    fn pl_si_db(&self) -> f64 {
        self.inner.pl_si_db
    }

    #[getter]
    fn k_factor_db(&self) -> f64 {
        self.inner.k_factor_db
    }

    #[getter]
    fn amp_imp_db(&self) -> f64 {
        self.inner.amp_imp_db
    }

    #[getter]
    fn phase_imp_deg(&self) -> f64 {
        self.inner.phase_imp_deg
    }

    #[getter]
    fn max_iter(&self) -> usize {
        self.inner.max_iter
    }

    #[getter]
    fn conv_tol(&self) -> f64 {
        self.inner.conv_tol
    }

    fn noise_mw(&self) -> f64 {
        self.inner.noise_mw()
    }

    fn p_max_mw(&self) -> f64 {
        self.inner.p_max_mw()
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }
}

#[pyfunction]
fn dbm_to_mw(x: f64) -> f64 {
    fdmimo::types::dbm_to_mw(x)
}

#[pyfunction]
fn mw_to_dbm(x: f64) -> f64 {
    fdmimo::types::mw_to_dbm(x)
}

/// Draws trial `trial` of `seed` and runs the alternating optimizer on it.
#[pyfunction]
#[pyo3(signature = (config, rate_bps_hz, seed, trial=0, mode="MRT"))]
fn solve_trial<'py>(
    py: Python<'py>,
    config: &PySystemConfig,
    rate_bps_hz: f64,
    seed: u64,
    trial: u64,
    mode: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let mode = parse_mode(mode)?;
    let targets = SinrTargets::from_rate(rate_bps_hz).map_err(to_py_err)?;
    let cfg = &config.inner;
    let r = py
        .detach(|| {
            let mut rng = RngStream::for_trial(seed, trial);
            let (ch, canc) = draw_trial(cfg, &mut rng)?;
            solve(cfg, &ch, &canc, &targets, &mut rng, mode)
        })
        .map_err(to_py_err)?;
    let d = PyDict::new(py);
    d.set_item("p_mw", r.state.p.to_vec())?;
    d.set_item(
        "v_bar",
        r.state.v_bar.iter().map(entries).collect::<Vec<_>>(),
    )?;
    d.set_item("u", r.state.u.iter().map(entries).collect::<Vec<_>>())?;
    d.set_item("achieved_sinr", r.achieved_sinr.to_vec())?;
    d.set_item("residual_si_dbm", r.residual_si_dbm.to_vec())?;
    d.set_item("iterations", r.iterations)?;
    d.set_item("converged", r.converged)?;
    d.set_item("feasible", r.feasible)?;
    d.set_item("power_outage", r.power_outage)?;
    d.set_item("wall_time_s", r.wall_time_s)?;
    Ok(d)
}

/// Channel matrices of one trial as lists of complex rows.
#[pyfunction]
#[pyo3(signature = (config, seed, trial=0))]
fn draw_channels<'py>(
    py: Python<'py>,
    config: &PySystemConfig,
    seed: u64,
    trial: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let mut rng = RngStream::for_trial(seed, trial);
    let (ch, _) = draw_trial(&config.inner, &mut rng).map_err(to_py_err)?;
    let d = PyDict::new(py);
    d.set_item("h_12", rows(&ch.h_12))?;
    d.set_item("h_21", rows(&ch.h_21))?;
    d.set_item("h_11", rows(&ch.h_11))?;
    d.set_item("h_22", rows(&ch.h_22))?;
    Ok(d)
}

/// Closed-form minimum powers; `p` is `None` when the targets are unreachable.
#[pyfunction]
fn pf_solve<'py>(
    py: Python<'py>,
    gamma: [f64; 2],
    m_diag: [f64; 2],
    m_vec: [f64; 2],
    sigma2: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let sys = PfSystem::new(gamma, m_diag, m_vec).map_err(to_py_err)?;
    let sol = core_pf_solve(&sys, sigma2);
    let d = PyDict::new(py);
    d.set_item("p", sol.p.map(|p| p.to_vec()))?;
    d.set_item("feasible", sol.feasible)?;
    d.set_item("spectral_radius", sol.spectral_radius)?;
    Ok(d)
}

/// Monte-Carlo grid over modes × rates × P_max; one dict per cell.
#[pyfunction]
#[pyo3(signature = (config, rates_bps_hz, n_trials, seed=1, p_max_sweep_dbm=Vec::new(),
    modes=vec!["MRT".to_owned(), "ZF_RQ".to_owned(), "RQ_RQ".to_owned()], threads=0))]
#[allow(clippy::too_many_arguments)]
fn run_experiment<'py>(
    py: Python<'py>,
    config: &PySystemConfig,
    rates_bps_hz: Vec<f64>,
    n_trials: usize,
    seed: u64,
    p_max_sweep_dbm: Vec<f64>,
    modes: Vec<String>,
    threads: usize,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let tx_modes = modes
        .iter()
        .map(|m| parse_mode(m))
        .collect::<PyResult<Vec<_>>>()?;
    let spec = ExperimentSpec {
        base: config.inner.clone(),
        target_rates_bps_hz: rates_bps_hz,
        p_max_sweep_dbm,
        n_trials,
        master_seed: seed,
        tx_modes,
        ..ExperimentSpec::default()
    };
    let rows = py
        .detach(|| run_experiment_with_threads(&spec, threads))
        .map_err(to_py_err)?;
    rows.iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("tx_mode", r.tx_mode.as_str())?;
            d.set_item("target_rate", r.target_rate)?;
            d.set_item("p_max_dbm", r.p_max_dbm)?;
            d.set_item("mean_tx_power_dbm", r.mean_tx_power_dbm)?;
            d.set_item("mean_residual_si_dbm", r.mean_residual_si_dbm)?;
            d.set_item("outage_prob", r.outage_prob)?;
            d.set_item("convergence_rate", r.convergence_rate)?;
            d.set_item("mean_iterations", r.mean_iterations)?;
            d.set_item("mean_runtime_s", r.mean_runtime_s)?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
fn fdmimo_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySystemConfig>()?;
    m.add_function(wrap_pyfunction!(dbm_to_mw, m)?)?;
    m.add_function(wrap_pyfunction!(mw_to_dbm, m)?)?;
    m.add_function(wrap_pyfunction!(solve_trial, m)?)?;
    m.add_function(wrap_pyfunction!(draw_channels, m)?)?;
    m.add_function(wrap_pyfunction!(pf_solve, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
