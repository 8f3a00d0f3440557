//! Exhaustive grid search minimizing the cost coefficient over code dimension
//! d, message length k, and repeater spacing L_0.
//!
//! Grids are tiny (a handful of primes, at most d/2 message lengths, and the
//! divisors of the total distance), so every point is evaluated and the
//! minimum is exact; determinism comes from a total tie-break key rather than
//! from evaluation order.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::is_prime;
use crate::repeater::{
    evaluate_chain, HardwareParams, LinkParams, PerformanceReport, RepeaterError,
    DEFAULT_ATTENUATION_KM,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SweepError {
    #[error("sweep grid is empty: {0}")]
    EmptyGrid(String),
    #[error("d={0} is not prime")]
    NonPrimeCandidate(u64),
    #[error("QPyC-constrained sweeps need odd d; got d={0}")]
    QpycNeedsOddD(u64),
    #[error(transparent)]
    Repeater(#[from] RepeaterError),
}

/// Message-length policy for the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KPolicy {
    /// All CSS-valid k: d/2 < k <= d.
    Free,
    /// Polynomial-code constraint k = (d+1)/2 (one logical qudit).
    QpycConstrained,
}

/// Declarative sweep description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    /// Prime code dimensions to search.
    pub d_candidates: Vec<u64>,
    pub k_policy: KPolicy,
    /// Spacing grid: divisors of `l_tot_km` within this range, in km.
    pub l_0_min_km: u64,
    pub l_0_max_km: u64,
    pub l_tot_km: u64,
    #[serde(default = "default_l_att")]
    pub l_att_km: f64,
    pub hardware: HardwareParams,
    /// Cap on 2 d log2(d), the physical qubits a station must hold.
    #[serde(default = "default_qubit_budget")]
    pub qubit_budget: Option<f64>,
}

fn default_l_att() -> f64 {
    DEFAULT_ATTENUATION_KM
}

fn default_qubit_budget() -> Option<f64> {
    Some(200.0)
}

/// Physical qubits per station: two blocks of d qudits, log2(d) qubits each.
pub fn qubit_cost(d: u64) -> f64 {
    2.0 * d as f64 * (d as f64).log2()
}

/// Ascending divisors of `l_tot` inside [lo, hi].
pub fn spacing_grid(l_tot: u64, lo: u64, hi: u64) -> Vec<u64> {
    (lo.max(1)..=hi.min(l_tot))
        .filter(|&l| l_tot.is_multiple_of(l))
        .collect()
}

impl SweepSpec {
    fn k_grid(&self, d: u64) -> Vec<usize> {
        match self.k_policy {
            KPolicy::Free => ((d / 2 + 1) as usize..=d as usize).collect(),
            KPolicy::QpycConstrained => vec![d.div_ceil(2) as usize],
        }
    }

    fn validate(&self) -> Result<(), SweepError> {
        if self.d_candidates.is_empty() {
            return Err(SweepError::EmptyGrid("no d candidates".into()));
        }
        for &d in &self.d_candidates {
            if !is_prime(d) {
                return Err(SweepError::NonPrimeCandidate(d));
            }
            if self.k_policy == KPolicy::QpycConstrained && d % 2 == 0 {
                return Err(SweepError::QpycNeedsOddD(d));
            }
        }
        self.hardware.validate()?;
        Ok(())
    }
}

/// One evaluated grid point that produced no key, with its report retained.
#[derive(Debug, Clone, Serialize)]
pub struct InfeasiblePoint {
    pub d: u64,
    pub k: usize,
    pub l_0_km: u64,
    pub report: PerformanceReport,
}

/// Best feasible configuration per dimension.
#[derive(Debug, Clone, Serialize)]
pub struct FrontierEntry {
    pub d: u64,
    /// None when every (k, L_0) at this d is infeasible.
    pub best: Option<PerformanceReport>,
    pub evaluated_points: usize,
    pub infeasible_points: usize,
}

/// Full sweep output: global best, per-d frontier, and the infeasible set.
#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub best: Option<PerformanceReport>,
    pub frontier: Vec<FrontierEntry>,
    pub infeasible: Vec<InfeasiblePoint>,
    pub evaluated_points: usize,
}

/// Total order on feasible reports: cost first, then smaller d, then smaller
/// spacing. Total and deterministic, so parallel reduction order is
/// irrelevant.
fn better(a: &PerformanceReport, b: &PerformanceReport) -> bool {
    let ka = (
        a.c_prime.unwrap_or(f64::INFINITY),
        a.d,
        a.l_0_km,
        a.k,
    );
    let kb = (
        b.c_prime.unwrap_or(f64::INFINITY),
        b.d,
        b.l_0_km,
        b.k,
    );
    ka.0.total_cmp(&kb.0)
        .then(ka.1.cmp(&kb.1))
        .then(ka.2.cmp(&kb.2))
        .then(ka.3.cmp(&kb.3))
        .is_lt()
}

/// Exhaustively evaluates the (d, k, L_0) grid and reports the cost-optimal
/// configuration, the per-d frontier, and every infeasible point with its
/// reason.
pub fn optimize(spec: &SweepSpec) -> Result<SweepResult, SweepError> {
    spec.validate()?;
    let spacings = spacing_grid(spec.l_tot_km, spec.l_0_min_km, spec.l_0_max_km);
    if spacings.is_empty() {
        return Err(SweepError::EmptyGrid(format!(
            "no divisors of {} km in [{}, {}] km",
            spec.l_tot_km, spec.l_0_min_km, spec.l_0_max_km
        )));
    }
    let budgeted: Vec<u64> = spec
        .d_candidates
        .iter()
        .copied()
        .filter(|&d| {
            spec.qubit_budget
                .is_none_or(|budget| qubit_cost(d) <= budget)
        })
        .collect();
    if budgeted.is_empty() {
        return Err(SweepError::EmptyGrid(
            "every d candidate exceeds the qubit budget".into(),
        ));
    }

    let mut points: Vec<(u64, usize, u64)> = Vec::new();
    for &d in &budgeted {
        for k in spec.k_grid(d) {
            for &l_0 in &spacings {
                points.push((d, k, l_0));
            }
        }
    }

    let reports: Vec<PerformanceReport> = points
        .par_iter()
        .map(|&(d, k, l_0)| {
            let link = LinkParams::new(l_0, spec.l_att_km, spec.l_tot_km)
                .expect("spacings are divisors by construction");
            evaluate_chain(&spec.hardware, &link, d, k).map_err(SweepError::from)
        })
        .collect::<Result<_, _>>()?;

    let mut frontier: Vec<FrontierEntry> = Vec::new();
    let mut infeasible: Vec<InfeasiblePoint> = Vec::new();
    let mut best: Option<PerformanceReport> = None;
    let mut sorted_d = budgeted.clone();
    sorted_d.sort_unstable();
    for &d in &sorted_d {
        let mut entry = FrontierEntry {
            d,
            best: None,
            evaluated_points: 0,
            infeasible_points: 0,
        };
        for report in reports.iter().filter(|r| r.d == d) {
            entry.evaluated_points += 1;
            if report.feasible {
                if entry.best.as_ref().is_none_or(|cur| better(report, cur)) {
                    entry.best = Some(report.clone());
                }
                if best.as_ref().is_none_or(|cur| better(report, cur)) {
                    best = Some(report.clone());
                }
            } else {
                entry.infeasible_points += 1;
                infeasible.push(InfeasiblePoint {
                    d: report.d,
                    k: report.k,
                    l_0_km: report.l_0_km,
                    report: report.clone(),
                });
            }
        }
        frontier.push(entry);
    }

    Ok(SweepResult {
        best,
        frontier,
        infeasible,
        evaluated_points: reports.len(),
    })
}

/// Flatness probe: per-d optimal cost at d = 31 and beyond, and the largest
/// relative deviation from the d = 31 optimum.
///
/// The comparison deliberately ignores the qubit budget (2 d log2 d already
/// exceeds 200 qubits at d = 31); an infeasible d = 31 baseline is reported
/// in the output rather than raised.
#[derive(Debug, Clone, Serialize)]
pub struct FlatnessReport {
    /// (d, optimal cost) pairs for every probed dimension with a feasible
    /// optimum.
    pub per_d_optimal: Vec<(u64, f64)>,
    /// max over probed d of |C'(d) - C'(31)| / C'(31); None when d = 31 has
    /// no feasible configuration.
    pub relative_variation: Option<f64>,
}

pub fn flatness_report(spec: &SweepSpec, d_extended: &[u64]) -> Result<FlatnessReport, SweepError> {
    let baseline_d = 31u64;
    let mut probe = spec.clone();
    probe.qubit_budget = None;

    let mut per_d_optimal = Vec::new();
    let mut optimum_at = |d: u64| -> Result<Option<f64>, SweepError> {
        probe.d_candidates = vec![d];
        let result = optimize(&probe)?;
        Ok(result.best.and_then(|b| b.c_prime))
    };

    let baseline = optimum_at(baseline_d)?;
    if let Some(c) = baseline {
        per_d_optimal.push((baseline_d, c));
    }
    let mut variation: Option<f64> = baseline.map(|_| 0.0);
    for &d in d_extended {
        if d == baseline_d {
            continue;
        }
        if let Some(c) = optimum_at(d)? {
            per_d_optimal.push((d, c));
            if let (Some(base), Some(v)) = (baseline, variation.as_mut()) {
                *v = v.max((c - base).abs() / base);
            }
        }
    }
    per_d_optimal.sort_by_key(|&(d, _)| d);
    Ok(FlatnessReport {
        per_d_optimal,
        relative_variation: variation,
    })
}

/// Default search list: odd primes up to 23, the largest dimension within the
/// 200-qubit default budget.
pub fn default_d_candidates() -> Vec<u64> {
    vec![3, 5, 7, 11, 13, 17, 19, 23]
}

/// Frontier rows as CSV, schema qrs.frontier.v1.
pub fn frontier_to_csv(result: &SweepResult) -> String {
    let mut out = String::from("# schema: qrs.frontier.v1\n");
    out.push_str("d,k,L_0,r,C_prime,R_key_bits_per_s,Q,feasible,evaluated,infeasible\n");
    for entry in &result.frontier {
        match &entry.best {
            Some(b) => out.push_str(&format!(
                "{},{},{},{},{},{},{},true,{},{}\n",
                entry.d,
                b.k,
                b.l_0_km,
                b.stations,
                b.c_prime.map_or(String::new(), |c| format!("{c}")),
                b.r_key_bits_per_s,
                b.q,
                entry.evaluated_points,
                entry.infeasible_points
            )),
            None => out.push_str(&format!(
                "{},,,,,,,false,{},{}\n",
                entry.d, entry.evaluated_points, entry.infeasible_points
            )),
        }
    }
    out
}
