//! One-way repeater-chain performance: per-station loss and operation-error
//! model, decode-correct/incorrect probabilities, QBER, asymptotic secure key
//! rate, and the qubits-per-secret-bit cost coefficient.
//!
//! Loss convention: a single per-photon arrival probability
//! eta = eta_c^2 exp(-L_0/L_att) with p_l = 1 - eta; the decode formulas use
//! p_l for lost photons and eta for survivors so that the zero-operation-error
//! limit collapses exactly onto the erasure-channel success probability.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::erasure::{self, ln_choose, ln_pow, stable_sum, AnalysisError};
use crate::field::is_prime;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RepeaterError {
    #[error("operation error sum 3*eps_g + 4*eps_d + eps_m = {0} exceeds 1")]
    OperationErrorTooLarge(f64),
    #[error("probability {name}={value} outside [0, 1]")]
    ProbabilityRange { name: &'static str, value: f64 },
    #[error("gate time t_0={0} must be positive")]
    NonPositiveGateTime(f64),
    #[error("chain needs prime d and d/2 < k <= d; got d={d}, k={k}")]
    InvalidCode { d: u64, k: usize },
    #[error("repeater spacing {l_0} km does not divide total distance {l_tot} km")]
    SpacingNotDivisor { l_0: u64, l_tot: u64 },
    #[error("repeater spacing must be a positive number of km")]
    ZeroSpacing,
    #[error("heralded success probability is zero; the chain never succeeds")]
    ChainNeverSucceeds,
    #[error("key rate is zero; configuration infeasible")]
    Infeasible,
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

/// Per-station hardware error and timing parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HardwareParams {
    /// Gate error probability.
    pub eps_g: f64,
    /// Depolarization error probability.
    pub eps_d: f64,
    /// Measurement error probability.
    pub eps_m: f64,
    /// Gate/measurement time in seconds.
    pub t_0: f64,
    /// Fiber-matter coupling efficiency.
    pub eta_c: f64,
}

impl HardwareParams {
    pub fn validate(&self) -> Result<(), RepeaterError> {
        for (name, value) in [
            ("eps_g", self.eps_g),
            ("eps_d", self.eps_d),
            ("eps_m", self.eps_m),
            ("eta_c", self.eta_c),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(RepeaterError::ProbabilityRange { name, value });
            }
        }
        if self.t_0.is_nan() || self.t_0 <= 0.0 {
            return Err(RepeaterError::NonPositiveGateTime(self.t_0));
        }
        Ok(())
    }
}

pub const DEFAULT_ATTENUATION_KM: f64 = 20.0;

/// Fiber-link geometry. Spacings are whole kilometers dividing the total
/// distance, so the station count r = L_tot / L_0 is an exact integer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkParams {
    /// Repeater spacing in km.
    pub l_0_km: u64,
    /// Fiber attenuation length in km.
    pub l_att_km: f64,
    /// Total distance in km.
    pub l_tot_km: u64,
}

impl LinkParams {
    pub fn new(l_0_km: u64, l_att_km: f64, l_tot_km: u64) -> Result<Self, RepeaterError> {
        if l_0_km == 0 {
            return Err(RepeaterError::ZeroSpacing);
        }
        if l_tot_km == 0 || !l_tot_km.is_multiple_of(l_0_km) {
            return Err(RepeaterError::SpacingNotDivisor {
                l_0: l_0_km,
                l_tot: l_tot_km,
            });
        }
        Ok(Self {
            l_0_km,
            l_att_km,
            l_tot_km,
        })
    }

    /// Number of repeater stations r = L_tot / L_0.
    pub fn stations(&self) -> u64 {
        self.l_tot_km / self.l_0_km
    }
}

/// Per-photon arrival probability eta = eta_c^2 exp(-L_0 / L_att).
pub fn arrival_probability(eta_c: f64, l_0_km: f64, l_att_km: f64) -> f64 {
    eta_c * eta_c * (-l_0_km / l_att_km).exp()
}

/// Effective operation error at the logical X and Z measurements of one
/// teleportation-based error-correction step: 3 eps_g + 4 eps_d + eps_m.
pub fn operation_error(hw: &HardwareParams) -> Result<f64, RepeaterError> {
    hw.validate()?;
    let eps = 3.0 * hw.eps_g + 4.0 * hw.eps_d + hw.eps_m;
    if eps > 1.0 {
        return Err(RepeaterError::OperationErrorTooLarge(eps));
    }
    Ok(eps)
}

fn check_chain_code(d: u64, k: usize) -> Result<(), RepeaterError> {
    if !is_prime(d) || 2 * k as u64 <= d || k as u64 > d {
        return Err(RepeaterError::InvalidCode { d, k });
    }
    Ok(())
}

/// Joint probabilities that a station receives enough photons (x losses
/// with x <= d-k) and decodes correctly (y operation errors among the d-x
/// survivors with x + 2y <= d-k) or incorrectly (y above the correctable
/// budget but at most d-k-x).
///
/// With eps = 0 the correct-decode probability reduces bit-for-bit to the
/// erasure-channel success probability at p_l = 1 - eta; outcomes with
/// y > d-k-x are covered by neither bucket and are reported separately by
/// [`evaluate_chain`].
pub fn p_correct_incorrect(
    d: u64,
    k: usize,
    eta: f64,
    eps: f64,
) -> Result<(f64, f64), RepeaterError> {
    check_chain_code(d, k)?;
    for (name, value) in [("eta", eta), ("eps", eps)] {
        if !(0.0..=1.0).contains(&value) {
            return Err(RepeaterError::ProbabilityRange { name, value });
        }
    }
    let p_l = 1.0 - eta;
    let budget = d - k as u64;
    let mut correct_terms = Vec::new();
    let mut incorrect_terms = Vec::new();
    for x in 0..=budget {
        let y_correct_max = (budget - x) / 2;
        for y in 0..=(budget - x) {
            let log_term = ln_choose(d, x)
                + ln_choose(d - x, y)
                + ln_pow(p_l, x)
                + ln_pow(1.0 - p_l, d - x)
                + ln_pow(eps, y)
                + ln_pow(1.0 - eps, d - x - y);
            let term = log_term.exp();
            if y <= y_correct_max {
                correct_terms.push(term);
            } else {
                incorrect_terms.push(term);
            }
        }
    }
    Ok((
        stable_sum(correct_terms).min(1.0),
        stable_sum(incorrect_terms).min(1.0),
    ))
}

/// QBER over r stations: Q = 1 - (P_correct / P_success)^r, under the
/// assumption that one station-level logical error corrupts the end-to-end
/// outcome.
pub fn qber(p_correct: f64, p_success: f64, stations: u64) -> Result<f64, RepeaterError> {
    if p_success.is_nan() || p_success <= 0.0 {
        return Err(RepeaterError::ChainNeverSucceeds);
    }
    if p_correct < 0.0 || p_correct > p_success + 1e-12 {
        return Err(RepeaterError::ProbabilityRange {
            name: "p_correct",
            value: p_correct,
        });
    }
    let ratio = (p_correct / p_success).min(1.0);
    Ok(1.0 - ratio.powi(stations as i32))
}

/// d-ary conditional entropy term h(Q) = -Q log2(Q/(d-1)) - (1-Q) log2(1-Q),
/// with the h(0) = 0 limit.
pub fn entropy_term(q: f64, d: u64) -> f64 {
    if q <= 0.0 {
        return 0.0;
    }
    let mut h = -q * (q / (d as f64 - 1.0)).log2();
    if q < 1.0 {
        h -= (1.0 - q) * (1.0 - q).log2();
    }
    h
}

/// Asymptotic secure key rate in bits per gate time t_0:
/// (2k - d) P_success^r (log2 d - 2 h(Q)), clamped at zero when the
/// conditional entropy consumes the whole alphabet.
pub fn key_rate_per_t0(d: u64, k: usize, p_success: f64, q: f64, stations: u64) -> f64 {
    let logical = (2 * k) as f64 - d as f64;
    let herald = p_success.powi(stations as i32);
    let yield_bits = (d as f64).log2() - 2.0 * entropy_term(q, d);
    (logical * herald * yield_bits).max(0.0)
}

/// Key rate in bits per second.
pub fn key_rate(d: u64, k: usize, p_success: f64, q: f64, stations: u64, t_0: f64) -> f64 {
    key_rate_per_t0(d, k, p_success, q, stations) / t_0
}

/// Cost coefficient C' = 2 d log2(d) / (L_0 R): qubits per km per secure bit
/// per time unit t_0. `rate_per_t0` must be the per-t_0 rate.
pub fn cost_coefficient(d: u64, l_0_km: f64, rate_per_t0: f64) -> Result<f64, RepeaterError> {
    if rate_per_t0.is_nan() || rate_per_t0 <= 0.0 {
        return Err(RepeaterError::Infeasible);
    }
    Ok(2.0 * d as f64 * (d as f64).log2() / (l_0_km * rate_per_t0))
}

/// Why a configuration produced no secret key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InfeasibleReason {
    /// Heralded success probability is zero: losses exceed what d-k erasures
    /// can ever cover.
    NeverHeralded,
    /// The QBER consumed the whole alphabet: log2(d) <= 2 h(Q).
    ZeroKeyRate,
}

/// Full per-configuration performance summary.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerformanceReport {
    pub d: u64,
    pub k: usize,
    pub l_0_km: u64,
    pub stations: u64,
    /// Per-photon arrival probability.
    pub eta: f64,
    /// Effective operation error at the X/Z measurements.
    pub eps_xz: f64,
    /// Heralded (arrival-only) success probability per station.
    pub p_success: f64,
    pub p_correct: f64,
    pub p_incorrect: f64,
    /// Probability mass with more operation errors than the decode formulas
    /// cover (y > d-k-x); tracked separately, never silently merged.
    pub p_uncovered: f64,
    pub q_x: f64,
    pub q_z: f64,
    pub q: f64,
    pub r_key_bits_per_t0: f64,
    pub r_key_bits_per_s: f64,
    /// Cost coefficient, absent when the key rate is zero.
    pub c_prime: Option<f64>,
    pub feasible: bool,
    pub infeasible_reason: Option<InfeasibleReason>,
}

impl PerformanceReport {
    /// Stable CSV column set, schema qrs.chain.v1.
    pub fn csv_header() -> &'static str {
        "d,k,L_0,r,eta,eps,p_success,p_correct,p_incorrect,Q,R_key_bits_per_s,R_key_bits_per_t0,C_prime,feasible"
    }

    pub fn csv_row(&self) -> String {
        let c_prime = self.c_prime.map_or(String::new(), |c| format!("{c}"));
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.d,
            self.k,
            self.l_0_km,
            self.stations,
            self.eta,
            self.eps_xz,
            self.p_success,
            self.p_correct,
            self.p_incorrect,
            self.q,
            self.r_key_bits_per_s,
            self.r_key_bits_per_t0,
            c_prime,
            self.feasible
        )
    }
}

/// Chains loss, operation error, decode probabilities, QBER, key rate, and
/// cost into one deterministic report. Infeasible configurations come back
/// as flagged reports; only invalid parameters error.
pub fn evaluate_chain(
    hw: &HardwareParams,
    link: &LinkParams,
    d: u64,
    k: usize,
) -> Result<PerformanceReport, RepeaterError> {
    check_chain_code(d, k)?;
    hw.validate()?;
    let eta = arrival_probability(hw.eta_c, link.l_0_km as f64, link.l_att_km);
    let eps = operation_error(hw)?;
    let stations = link.stations();
    let p_l = 1.0 - eta;
    let p_success = erasure::p_success(d, k, p_l)?;
    let (p_correct, p_incorrect) = p_correct_incorrect(d, k, eta, eps)?;
    let p_uncovered = (p_success - p_correct - p_incorrect).max(0.0);

    if p_success <= 0.0 {
        return Ok(PerformanceReport {
            d,
            k,
            l_0_km: link.l_0_km,
            stations,
            eta,
            eps_xz: eps,
            p_success,
            p_correct,
            p_incorrect,
            p_uncovered,
            q_x: 1.0,
            q_z: 1.0,
            q: 1.0,
            r_key_bits_per_t0: 0.0,
            r_key_bits_per_s: 0.0,
            c_prime: None,
            feasible: false,
            infeasible_reason: Some(InfeasibleReason::NeverHeralded),
        });
    }

    // The X and Z error channels share one eps, so Q_X = Q_Z; both are kept
    // so the (Q_X + Q_Z)/2 structure survives asymmetric extensions.
    let q_x = qber(p_correct, p_success, stations)?;
    let q_z = q_x;
    let q = 0.5 * (q_x + q_z);
    let r_key_bits_per_t0 = key_rate_per_t0(d, k, p_success, q, stations);
    let r_key_bits_per_s = r_key_bits_per_t0 / hw.t_0;
    let feasible = r_key_bits_per_t0 > 0.0;
    let c_prime = cost_coefficient(d, link.l_0_km as f64, r_key_bits_per_t0).ok();

    Ok(PerformanceReport {
        d,
        k,
        l_0_km: link.l_0_km,
        stations,
        eta,
        eps_xz: eps,
        p_success,
        p_correct,
        p_incorrect,
        p_uncovered,
        q_x,
        q_z,
        q,
        r_key_bits_per_t0,
        r_key_bits_per_s,
        c_prime,
        feasible,
        infeasible_reason: if feasible {
            None
        } else {
            Some(InfeasibleReason::ZeroKeyRate)
        },
    })
}
