//! Browser bindings for the fermigauss demo page.
//!
//! Each exported function takes plain numbers and returns a JSON string, so the
//! page needs no generated TypeScript types. The [`api`] module holds the same
//! operations as ordinary Rust functions for native testing.

use wasm_bindgen::prelude::*;

pub mod api;

fn to_js(r: Result<String, String>) -> Result<String, JsError> {
    r.map_err(|e| JsError::new(&e))
}

/// Single-mode generator with its CP region over the `(a_x, c)` plane.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn explore_single_mode(
    a_na: f64,
    a_x: f64,
    a_z: f64,
    a_op: f64,
    c: f64,
    extent: f64,
    grid: usize,
) -> Result<String, JsError> {
    to_js(api::explore_single_mode(
        &api::SingleMode { a_na, a_x, a_z, a_op, c },
        extent,
        grid,
    ))
}

/// Two-mode catalog scenario evolved from a mixed thermal state.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn catalog_trajectory(
    key: &str,
    r: f64,
    b: f64,
    c: f64,
    nu1: f64,
    nu2: f64,
    mix: f64,
    t_max: f64,
    samples: usize,
) -> Result<String, JsError> {
    to_js(api::catalog_trajectory(
        key,
        &api::params(r, b, c),
        &api::InitialState { nu1, nu2, mix },
        t_max,
        samples,
    ))
}

/// Spectrum of the two-mode rate matrix while one parameter is swept.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn rate_sweep(
    key: &str,
    r: f64,
    b: f64,
    c: f64,
    param: &str,
    from: f64,
    to: f64,
    steps: usize,
) -> Result<String, JsError> {
    to_js(api::rate_sweep(key, &api::params(r, b, c), param, from, to, steps))
}

/// Keys and labels of the catalog scenarios.
#[wasm_bindgen]
pub fn scenarios() -> String {
    api::scenarios()
}
