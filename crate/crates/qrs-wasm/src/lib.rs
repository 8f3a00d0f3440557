//! wasm-bindgen surface for the browser demo: three interactive operations
//! returning JSON strings, plotted by the static page in `www/`.

mod api;

use wasm_bindgen::prelude::*;

/// p_success(p_l) curves near the capacity threshold for comma-separated
/// prime dimensions.
#[wasm_bindgen]
pub fn capacity_table(
    code_rate: f64,
    d_list_csv: String,
    half_width: f64,
    points: usize,
) -> Result<String, JsValue> {
    let d_list: Vec<u64> = d_list_csv
        .split(',')
        .map(|s| s.trim().parse::<u64>())
        .collect::<Result<_, _>>()
        .map_err(|e| JsValue::from_str(&format!("bad d list: {e}")))?;
    api::capacity_table(code_rate, &d_list, half_width, points).map_err(|e| JsValue::from_str(&e))
}

/// Per-dimension optimal cost coefficient over (k, L_0).
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn cost_frontier(
    eps_g: f64,
    eps_d: f64,
    eta_c: f64,
    t_0_us: f64,
    l_tot_km: u64,
    l_0_max_km: u64,
    max_d: u64,
    qpyc: bool,
) -> Result<String, JsValue> {
    api::cost_frontier(
        eps_g, eps_d, eta_c, t_0_us, l_tot_km, l_0_max_km, max_d, qpyc,
    )
    .map_err(|e| JsValue::from_str(&e))
}

/// Stabilizers, logical operators, and matrices of the [[d, 2k-d, d-k+1]]
/// code.
#[wasm_bindgen]
pub fn code_report(d: u64, k: usize) -> Result<String, JsValue> {
    api::code_report(d, k).map_err(|e| JsValue::from_str(&e))
}

/// k nearest to a target code rate, clamped to the CSS-valid range.
#[wasm_bindgen]
pub fn suggested_k(d: u64, code_rate: f64) -> usize {
    api::suggested_k(d, code_rate)
}
