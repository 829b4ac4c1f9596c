//! Python bindings over the command layer: each call takes the same overrides as the CLI
//! flags and returns plain Python values.

use std::path::PathBuf;

use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use ins_eqf::check::{self, CheckOptions, Mutation};
use ins_eqf::cli::{self, CliError, Common};
use ins_eqf::symmetry::SymmetryKind;

fn py_err(e: CliError) -> PyErr {
    match e {
        CliError::Data(d) => PyOSError::new_err(d.to_string()),
        CliError::Property(m) => PyRuntimeError::new_err(m),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn parse_kinds(kinds: Option<Vec<String>>) -> PyResult<Option<Vec<SymmetryKind>>> {
    kinds.map(|ks| ks.iter().map(|k| k.parse::<SymmetryKind>().map_err(|e| PyValueError::new_err(e.to_string()))).collect()).transpose()
}

#[allow(clippy::too_many_arguments)]
fn common(
    config: Option<PathBuf>,
    out: Option<PathBuf>,
    seed: Option<u64>,
    kinds: Option<Vec<String>>,
    runs: Option<usize>,
    duration: Option<f64>,
) -> PyResult<Common> {
    Ok(Common { config, out, seed, kinds: parse_kinds(kinds)?, runs, duration, ..Default::default() })
}

/// Short names of the six symmetry kinds.
#[pyfunction]
fn kinds() -> Vec<&'static str> {
    SymmetryKind::ALL.iter().map(|k| k.name()).collect()
}

/// Writes imu.csv, gnss.csv, truth.csv and config.toml to `out`; returns row counts.
#[pyfunction]
#[pyo3(signature = (out, config=None, seed=None, duration=None, noise_free=false))]
fn simulate(
    py: Python<'_>,
    out: PathBuf,
    config: Option<PathBuf>,
    seed: Option<u64>,
    duration: Option<f64>,
    noise_free: bool,
) -> PyResult<Py<PyDict>> {
    let c = common(config, Some(out), seed, None, None, duration)?;
    let (_, log) = py.detach(|| cli::cmd_simulate(&c, noise_free)).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("imu", log.imu.len())?;
    d.set_item("gnss", log.gnss.len())?;
    d.set_item("truth", log.truth.len())?;
    Ok(d.unbind())
}

/// Filters the log in `data`, writes estimates.csv and metrics.csv to `out`, and returns one
/// summary dict per kind.
#[pyfunction]
#[pyo3(signature = (data, out, config=None, kinds=None))]
fn run(py: Python<'_>, data: PathBuf, out: PathBuf, config: Option<PathBuf>, kinds: Option<Vec<String>>) -> PyResult<Vec<Py<PyDict>>> {
    let c = common(config, Some(out), None, kinds, None, None)?;
    let (_, filters) = py.detach(|| cli::cmd_run(&data, &c)).map_err(py_err)?;
    filters
        .iter()
        .map(|f| {
            let d = PyDict::new(py);
            let last = f.epochs.last().expect("initial epoch");
            d.set_item("kind", f.kind.name())?;
            d.set_item("epochs", f.epochs.len())?;
            d.set_item("t", last.t)?;
            d.set_item("position", last.estimate.pos.as_slice().to_vec())?;
            let nis: Vec<f64> = f.epochs.iter().filter_map(|e| e.nis).collect();
            d.set_item("mean_nis", (!nis.is_empty()).then(|| nis.iter().sum::<f64>() / nis.len() as f64))?;
            d.set_item("failure", f.failure.clone())?;
            Ok(d.unbind())
        })
        .collect()
}

/// Monte-Carlo comparison; returns `{kind: (transient, asymptotic)}` ANEES.
#[pyfunction]
#[pyo3(signature = (out, config=None, seed=None, runs=None, duration=None, kinds=None, sweep=false))]
#[allow(clippy::too_many_arguments)]
fn compare(
    py: Python<'_>,
    out: PathBuf,
    config: Option<PathBuf>,
    seed: Option<u64>,
    runs: Option<usize>,
    duration: Option<f64>,
    kinds: Option<Vec<String>>,
    sweep: bool,
) -> PyResult<Py<PyDict>> {
    let c = common(config, Some(out), seed, kinds, runs, duration)?;
    let (_, cmp) = py.detach(|| cli::cmd_compare(&c, sweep)).map_err(py_err)?;
    let d = PyDict::new(py);
    for (k, s) in &cmp.table {
        d.set_item(k.name(), s.map(|s| (s.transient, s.asymptotic)))?;
    }
    Ok(d.unbind())
}

/// Runs the property suite; returns `(passed, report)`.
#[pyfunction]
#[pyo3(signature = (seed=7, samples=1000, mutate_gravity=false))]
fn check_suite(py: Python<'_>, seed: u64, samples: usize, mutate_gravity: bool) -> (bool, String) {
    let opts = CheckOptions { seed, samples, mutation: mutate_gravity.then_some(Mutation::FlipGravity) };
    let report = py.detach(|| check::run(&opts));
    (report.passed(), report.to_string())
}

/// Runs the command line with `args` (without the program name); returns the exit code.
#[pyfunction]
fn main(py: Python<'_>, args: Vec<String>) -> i32 {
    py.detach(|| cli::main_with(std::iter::once("ins-eqf".to_string()).chain(args)))
}

#[pymodule]
#[pyo3(name = "ins_eqf")]
fn ins_eqf_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(kinds, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    m.add_function(wrap_pyfunction!(check_suite, m)?)?;
    m.add_function(wrap_pyfunction!(main, m)?)?;
    Ok(())
}
