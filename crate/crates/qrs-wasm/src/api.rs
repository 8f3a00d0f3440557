//! JSON-string API behind the browser demo. Pure Rust so the logic tests on
//! any target; the wasm-bindgen wrappers in `lib.rs` just forward.

use serde::Serialize;

use qrs_core::erasure::{capacity_gap_curve, default_p_grid, nearest_k_for_rate};
use qrs_core::qrsc::QrscCode;
use qrs_core::repeater::HardwareParams;
use qrs_core::sweep::{optimize, qubit_cost, KPolicy, SweepSpec};
use qrs_core::{is_prime, PrimeField};

#[derive(Serialize)]
struct CapacityCurve {
    d: u64,
    k: usize,
    code_rate: f64,
    threshold: f64,
    p_l: Vec<f64>,
    p_success: Vec<f64>,
}

#[derive(Serialize)]
struct CapacityResponse {
    center: f64,
    curves: Vec<CapacityCurve>,
}

/// p_success(p_l) curves near the capacity threshold for each prime in
/// `d_list`, with k chosen nearest the requested code rate.
pub fn capacity_table(
    code_rate: f64,
    d_list: &[u64],
    half_width: f64,
    points: usize,
) -> Result<String, String> {
    let grid = default_p_grid(code_rate, half_width, points.clamp(2, 2001));
    let rows = capacity_gap_curve(code_rate, d_list, &grid).map_err(|e| e.to_string())?;
    let mut curves: Vec<CapacityCurve> = Vec::new();
    for row in rows {
        if curves.last().map(|c: &CapacityCurve| c.d) != Some(row.d) {
            curves.push(CapacityCurve {
                d: row.d,
                k: row.k,
                code_rate: row.code_rate,
                threshold: (row.d - row.k as u64) as f64 / row.d as f64,
                p_l: Vec::new(),
                p_success: Vec::new(),
            });
        }
        let curve = curves.last_mut().expect("pushed above");
        curve.p_l.push(row.p_l);
        curve.p_success.push(row.p_success);
    }
    serde_json::to_string(&CapacityResponse {
        center: (1.0 - code_rate) / 2.0,
        curves,
    })
    .map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct FrontierRow {
    d: u64,
    qubits: f64,
    feasible: bool,
    k: Option<usize>,
    l_0_km: Option<u64>,
    c_prime: Option<f64>,
    r_key_bits_per_s: Option<f64>,
    q: Option<f64>,
}

#[derive(Serialize)]
struct FrontierResponse {
    rows: Vec<FrontierRow>,
    best_d: Option<u64>,
}

/// Per-dimension optimal cost coefficient over (k, L_0), Fig.-3 style:
/// infeasible dimensions stay in the output as markers.
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
) -> Result<String, String> {
    let candidates: Vec<u64> = (3..=max_d.clamp(3, 101)).filter(|&d| is_prime(d)).collect();
    let spec = SweepSpec {
        d_candidates: candidates,
        k_policy: if qpyc {
            KPolicy::QpycConstrained
        } else {
            KPolicy::Free
        },
        l_0_min_km: 1,
        l_0_max_km: l_0_max_km.max(1),
        l_tot_km,
        l_att_km: qrs_core::repeater::DEFAULT_ATTENUATION_KM,
        hardware: HardwareParams {
            eps_g,
            eps_d,
            eps_m: eps_g / 4.0,
            t_0: t_0_us * 1e-6,
            eta_c,
        },
        qubit_budget: None,
    };
    let result = optimize(&spec).map_err(|e| e.to_string())?;
    let rows: Vec<FrontierRow> = result
        .frontier
        .iter()
        .map(|entry| match &entry.best {
            Some(b) => FrontierRow {
                d: entry.d,
                qubits: qubit_cost(entry.d),
                feasible: true,
                k: Some(b.k),
                l_0_km: Some(b.l_0_km),
                c_prime: b.c_prime,
                r_key_bits_per_s: Some(b.r_key_bits_per_s),
                q: Some(b.q),
            },
            None => FrontierRow {
                d: entry.d,
                qubits: qubit_cost(entry.d),
                feasible: false,
                k: None,
                l_0_km: None,
                c_prime: None,
                r_key_bits_per_s: None,
                q: None,
            },
        })
        .collect();
    serde_json::to_string(&FrontierResponse {
        best_d: result.best.as_ref().map(|b| b.d),
        rows,
    })
    .map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct CodeResponse {
    d: u64,
    n_logical: usize,
    distance: usize,
    alpha: u64,
    generator: Vec<Vec<u64>>,
    parity_check: Vec<Vec<u64>>,
    x_stabilizers: Vec<String>,
    z_stabilizers: Vec<String>,
    logical_x: Vec<String>,
    logical_z: Vec<String>,
    erasure_tolerance: usize,
}

/// Stabilizers, logical operators, and matrices of the [[d, 2k-d, d-k+1]]
/// code as display strings.
pub fn code_report(d: u64, k: usize) -> Result<String, String> {
    let field = PrimeField::new(d).map_err(|e| e.to_string())?;
    let code = QrscCode::new(field, k).map_err(|e| e.to_string())?;
    let strings = |ops: &[qrs_core::PauliWord]| ops.iter().map(|w| w.to_string()).collect();
    serde_json::to_string(&CodeResponse {
        d,
        n_logical: code.n_logical(),
        distance: code.distance(),
        alpha: field.alpha(),
        generator: code.base().generator().row_vecs(),
        parity_check: code.base().parity_check().row_vecs(),
        x_stabilizers: strings(code.x_stabilizers()),
        z_stabilizers: strings(code.z_stabilizers()),
        logical_x: strings(code.logical_x()),
        logical_z: strings(code.logical_z()),
        erasure_tolerance: code.block_length() - code.base().message_length(),
    })
    .map_err(|e| e.to_string())
}

/// Suggested k for a given d and target code rate (demo slider helper).
pub fn suggested_k(d: u64, code_rate: f64) -> usize {
    nearest_k_for_rate(d, code_rate)
}
