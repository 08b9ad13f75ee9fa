use num_complex::Complex64 as C64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use vortexwave::cli_io::{preset, run_simulation, run_taylor_sweep, TaylorSweepConfig};
use vortexwave::singular_integrals::residue_pair_integral;
use vortexwave::spectral_core::PeriodicGrid;
use vortexwave::taylor_sign::{a1_pair_closed, a1_single_vortex_closed};
use vortexwave::verify::run_criterion;

fn value_err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyfunction]
pub fn flat_hilbert(values: Vec<(f64, f64)>, half_period: f64) -> PyResult<Vec<(f64, f64)>> {
    let grid = PeriodicGrid::new(values.len(), half_period).map_err(value_err)?;
    let c: Vec<C64> = values.iter().map(|&(re, im)| C64::new(re, im)).collect();
    Ok(grid.hilbert(&c).iter().map(|v| (v.re, v.im)).collect())
}

#[pyfunction]
pub fn a1_single_vortex(lambda: f64, y: f64) -> PyResult<(f64, String)> {
    let (a1, class) = a1_single_vortex_closed(lambda, y).map_err(value_err)?;
    Ok((a1, class.as_str().to_string()))
}

#[pyfunction]
pub fn a1_pair(lambda: f64, x: f64, y: f64) -> PyResult<f64> {
    a1_pair_closed(lambda, x, y).map_err(value_err)
}

#[pyfunction]
pub fn residue_integral(n: usize, half_period: f64) -> PyResult<(f64, f64)> {
    let grid = PeriodicGrid::new(n, half_period).map_err(value_err)?;
    let v = residue_pair_integral(&grid, C64::new(0.0, -1.0), C64::new(0.0, -2.0));
    Ok((v.re, v.im))
}

#[pyfunction]
pub fn taylor_sweep(name: &str) -> PyResult<(Vec<(f64, f64, String)>, Option<(f64, f64)>)> {
    let config = TaylorSweepConfig::preset(name).map_err(value_err)?;
    let result = run_taylor_sweep(&config).map_err(value_err)?;
    let rows = result
        .rows
        .iter()
        .map(|r| (r.ratio, r.a1, r.classification.as_str().to_string()))
        .collect();
    Ok((rows, result.bracket))
}

#[pyfunction]
#[pyo3(signature = (name, until=None))]
pub fn simulate(name: &str, until: Option<f64>) -> PyResult<(String, f64, u64, f64)> {
    let config = preset(name).map_err(value_err)?;
    let summary = run_simulation(&config, None, until).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok((summary.status, summary.t, summary.steps, summary.min_e_lagrangian))
}

#[pyfunction]
pub fn verify(id: u8) -> (bool, String) {
    let r = run_criterion(id);
    (r.passed, r.line())
}

#[pymodule]
fn vortexwave_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(flat_hilbert, m)?)?;
    m.add_function(wrap_pyfunction!(a1_single_vortex, m)?)?;
    m.add_function(wrap_pyfunction!(a1_pair, m)?)?;
    m.add_function(wrap_pyfunction!(residue_integral, m)?)?;
    m.add_function(wrap_pyfunction!(taylor_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
