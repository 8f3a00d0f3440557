//! Closed-form erasure-channel analysis: block success/failure probabilities,
//! Chernoff-Hoeffding tail bounds, KL divergence, and capacity-approach
//! curves.
//!
//! Binomial tails are computed in log space with log-gamma binomials and
//! summed smallest-first, so dimensions into the hundreds stay accurate where
//! naive factorials overflow.

use serde::Serialize;
use statrs::function::gamma::ln_gamma;
use thiserror::Error;

use crate::field::is_prime;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("block dimension {0} is not prime")]
    NonPrimeDimension(u64),
    #[error("message length k={k} out of range for d={d}")]
    InvalidK { k: usize, d: u64 },
    #[error("probability {name}={value} outside [0, 1]")]
    ProbabilityRange { name: &'static str, value: f64 },
    #[error("KL divergence needs arguments in the open interval (0, 1)")]
    KlDomain,
    #[error("no Chernoff bound at the boundary |p_l - (d-k)/d| < {0}")]
    BoundaryEpsilon(f64),
}

/// Bounds with |p_l - (d-k)/d| below this floor are refused as vacuous.
pub const EPSILON_FLOOR: f64 = 1e-3;

pub(crate) fn ln_choose(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    // Exact zero at the edges; ln_gamma(1) itself carries rounding noise.
    if k == 0 || k == n {
        return 0.0;
    }
    ln_gamma((n + 1) as f64) - ln_gamma((k + 1) as f64) - ln_gamma((n - k + 1) as f64)
}

/// j * ln(p) with the 0^0 = 1 convention: a zero count contributes exactly
/// 0.0 regardless of p, keeping p = 0 and p = 1 edges finite.
pub(crate) fn ln_pow(p: f64, count: u64) -> f64 {
    if count == 0 {
        0.0
    } else {
        count as f64 * p.ln()
    }
}

/// Sums already-exponentiated terms smallest-first for a stable total.
pub(crate) fn stable_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(f64::total_cmp);
    terms.iter().sum()
}

fn check_probability(name: &'static str, value: f64) -> Result<(), AnalysisError> {
    if !(0.0..=1.0).contains(&value) {
        return Err(AnalysisError::ProbabilityRange { name, value });
    }
    Ok(())
}

fn check_code(d: u64, k: usize) -> Result<(), AnalysisError> {
    if !is_prime(d) {
        return Err(AnalysisError::NonPrimeDimension(d));
    }
    if k < 1 || k as u64 > d {
        return Err(AnalysisError::InvalidK { k, d });
    }
    Ok(())
}

/// Probability that at most d-k of d qudits are erased (each independently
/// with probability `p_l`), i.e. that the [[d, 2k-d]] block is recoverable.
pub fn p_success(d: u64, k: usize, p_l: f64) -> Result<f64, AnalysisError> {
    check_code(d, k)?;
    check_probability("p_l", p_l)?;
    Ok(binomial_head(d, d - k as u64, p_l))
}

/// Complement of [`p_success`]; complementarity is the definition, rather
/// than a separately re-indexed tail sum that could drift off by one term.
pub fn p_fail(d: u64, k: usize, p_l: f64) -> Result<f64, AnalysisError> {
    Ok(1.0 - p_success(d, k, p_l)?)
}

/// P(X <= cut) for X ~ Binomial(d, p), in log space, summed smallest-first.
pub(crate) fn binomial_head(d: u64, cut: u64, p: f64) -> f64 {
    if p == 0.0 {
        return 1.0;
    }
    if p == 1.0 {
        return if cut >= d { 1.0 } else { 0.0 };
    }
    let terms: Vec<f64> = (0..=cut.min(d))
        .map(|j| (ln_choose(d, j) + ln_pow(p, j) + ln_pow(1.0 - p, d - j)).exp())
        .collect();
    stable_sum(terms).min(1.0)
}

/// Kullback-Leibler divergence D(a||b) in nats between Bernoulli(a) and
/// Bernoulli(b); both arguments must lie strictly inside (0, 1).
pub fn kl_divergence(a: f64, b: f64) -> Result<f64, AnalysisError> {
    if !(a > 0.0 && a < 1.0 && b > 0.0 && b < 1.0) {
        return Err(AnalysisError::KlDomain);
    }
    Ok(a * (a / b).ln() + (1.0 - a) * ((1.0 - a) / (1.0 - b)).ln())
}

/// Which side of the threshold a Chernoff-Hoeffding bound applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundRegime {
    /// p_l above the correctable fraction: exp(-d D) upper-bounds success.
    UpperOnSuccess,
    /// p_l below the correctable fraction: 1 - exp(-d D) lower-bounds success.
    LowerOnSuccess,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChernoffBound {
    pub regime: BoundRegime,
    /// The bound on P_success itself (upper or lower per `regime`).
    pub value: f64,
    /// Distance epsilon = |p_l - (d-k)/d| from the threshold.
    pub epsilon: f64,
    /// The small-epsilon Taylor form of the same bound. Informational only:
    /// the printed lower-regime form has a sign that can push it below zero,
    /// so nothing is ever asserted against this field.
    pub taylor_value: f64,
}

/// Chernoff-Hoeffding bound on the block success probability.
///
/// With t = (d-k)/d the correctable fraction and D the KL divergence, the
/// bound is exp(-d D(t || p_l)): an upper bound on success for p_l > t and a
/// lower bound 1 - exp(-d D) for p_l < t. At the threshold the exponent
/// vanishes and no informative bound exists, so an epsilon floor applies.
pub fn chernoff_bound(d: u64, k: usize, p_l: f64) -> Result<ChernoffBound, AnalysisError> {
    check_code(d, k)?;
    check_probability("p_l", p_l)?;
    let threshold = (d - k as u64) as f64 / d as f64;
    let epsilon = (p_l - threshold).abs();
    if epsilon < EPSILON_FLOOR {
        return Err(AnalysisError::BoundaryEpsilon(EPSILON_FLOOR));
    }
    // Limits at the domain edges: D(0||p) = -ln(1-p); a degenerate channel
    // (p_l exactly 0 or 1) makes the divergence infinite and the tail zero.
    let divergence = if p_l == 0.0 || p_l == 1.0 {
        f64::INFINITY
    } else if threshold == 0.0 {
        -(1.0 - p_l).ln()
    } else {
        kl_divergence(threshold, p_l)?
    };
    let tail = (-(d as f64) * divergence).exp();
    // Taylor expansions with x = epsilon * d, valid for epsilon << 1.
    let x = epsilon * d as f64;
    if p_l > threshold {
        Ok(ChernoffBound {
            regime: BoundRegime::UpperOnSuccess,
            value: tail,
            epsilon,
            taylor_value: (-epsilon * x / p_l).exp() * (-epsilon * x / (1.0 - p_l)).exp(),
        })
    } else {
        Ok(ChernoffBound {
            regime: BoundRegime::LowerOnSuccess,
            value: 1.0 - tail,
            epsilon,
            // As printed: one exponent carries a positive sign, which is why
            // this form is reported, never asserted.
            taylor_value: 1.0
                - (-(p_l + epsilon) * x / p_l).exp()
                    * ((1.0 - p_l - epsilon) * x / (1.0 - p_l)).exp(),
        })
    }
}

/// One row of a capacity-approach table.
#[derive(Debug, Clone, Serialize)]
pub struct CapacityPoint {
    pub d: u64,
    pub k: usize,
    /// Achieved code rate (2k-d)/d.
    pub code_rate: f64,
    pub p_l: f64,
    pub p_success: f64,
    /// Chernoff bound on success where one applies (epsilon above floor).
    pub bound: Option<f64>,
    pub regime: Option<BoundRegime>,
}

/// Nearest message length k to the target rate R_c = (2k-d)/d, clamped to
/// the CSS-valid range (d/2, d].
pub fn nearest_k_for_rate(d: u64, code_rate: f64) -> usize {
    let ideal = (code_rate + 1.0) * d as f64 / 2.0;
    let k = ideal.round() as i64;
    let min_k = (d / 2 + 1) as i64;
    let max_k = d as i64;
    k.clamp(min_k, max_k) as usize
}

/// Tabulates p_success over a p_l grid for each prime dimension, choosing per
/// dimension the k nearest to the requested code rate. The transition
/// steepens with d, demonstrating the approach to the 1 - 2 p_l capacity.
pub fn capacity_gap_curve(
    code_rate: f64,
    d_list: &[u64],
    p_grid: &[f64],
) -> Result<Vec<CapacityPoint>, AnalysisError> {
    let mut out = Vec::with_capacity(d_list.len() * p_grid.len());
    for &d in d_list {
        if !is_prime(d) {
            return Err(AnalysisError::NonPrimeDimension(d));
        }
        let k = nearest_k_for_rate(d, code_rate);
        for &p_l in p_grid {
            let success = p_success(d, k, p_l)?;
            let bound = chernoff_bound(d, k, p_l).ok();
            out.push(CapacityPoint {
                d,
                k,
                code_rate: (2.0 * k as f64 - d as f64) / d as f64,
                p_l,
                p_success: success,
                bound: bound.map(|b| b.value),
                regime: bound.map(|b| b.regime),
            });
        }
    }
    Ok(out)
}

/// Evenly spaced p_l grid centered on the capacity threshold (1-R_c)/2.
pub fn default_p_grid(code_rate: f64, half_width: f64, points: usize) -> Vec<f64> {
    let center = (1.0 - code_rate) / 2.0;
    let lo = (center - half_width).max(0.0);
    let hi = (center + half_width).min(1.0);
    if points <= 1 {
        return vec![center];
    }
    (0..points)
        .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
        .collect()
}

/// Width of the p_l interval over which p_success falls from `hi` to `lo`
/// (defaults elsewhere: 0.99 to 0.01), located by bisection on the monotone
/// tail.
pub fn transition_width(d: u64, k: usize, hi: f64, lo: f64) -> Result<f64, AnalysisError> {
    check_code(d, k)?;
    let solve_for = |target: f64| -> f64 {
        let mut lo_p = 0.0f64;
        let mut hi_p = 1.0f64;
        for _ in 0..80 {
            let mid = 0.5 * (lo_p + hi_p);
            let value = binomial_head(d, d - k as u64, mid);
            if value > target {
                lo_p = mid;
            } else {
                hi_p = mid;
            }
        }
        0.5 * (lo_p + hi_p)
    };
    Ok(solve_for(lo) - solve_for(hi))
}

/// Renders capacity points as CSV with the stable column set.
pub fn capacity_points_to_csv(points: &[CapacityPoint]) -> String {
    let mut out = String::from("# schema: qrs.capacity.v1\n");
    out.push_str("d,k,R_c,p_l,p_success,bound,regime\n");
    for p in points {
        let bound = p.bound.map_or(String::new(), |b| format!("{b}"));
        let regime = match p.regime {
            Some(BoundRegime::UpperOnSuccess) => "upper_on_success",
            Some(BoundRegime::LowerOnSuccess) => "lower_on_success",
            None => "",
        };
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            p.d, p.k, p.code_rate, p.p_l, p.p_success, bound, regime
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    /// Independent oracle for small d: exact binomial coefficients in u128
    /// and plain powers, no logs.
    fn exact_tail(d: u64, cut: u64, p: f64) -> f64 {
        (0..=cut.min(d))
            .map(|j| {
                choose_u128(d, j) as f64 * p.powi(j as i32) * (1.0 - p).powi((d - j) as i32)
            })
            .sum()
    }

    fn choose_u128(n: u64, k: u64) -> u128 {
        let k = k.min(n - k);
        let mut num = 1u128;
        let mut den = 1u128;
        for i in 0..k {
            num *= (n - i) as u128;
            den *= (i + 1) as u128;
        }
        num / den
    }

    #[test]
    fn p_success_examples() {
        // No redundancy: only the zero-erasure term.
        let p = p_success(7, 7, 0.3).unwrap();
        assert!((p - 0.7f64.powi(7)).abs() < TOL);
        // Zero erasure probability.
        assert_eq!(p_success(11, 6, 0.0).unwrap(), 1.0);
        // Two-term sum, cross-checked against the exact-binomial oracle.
        let p = p_success(3, 2, 0.1).unwrap();
        assert!((p - 0.972).abs() < TOL);
        assert!((p - exact_tail(3, 1, 0.1)).abs() < TOL);
    }

    #[test]
    fn p_fail_examples() {
        assert_eq!(p_fail(5, 3, 1.0).unwrap(), 1.0);
        let pf = p_fail(3, 2, 0.1).unwrap();
        assert!((pf - 0.028).abs() < TOL);
        for d in [3u64, 5, 13] {
            for k in 1..=d as usize {
                for p_l in [0.0, 0.2, 0.5, 0.9, 1.0] {
                    let total = p_success(d, k, p_l).unwrap() + p_fail(d, k, p_l).unwrap();
                    assert!((total - 1.0).abs() < TOL);
                }
            }
        }
    }

    #[test]
    fn log_space_matches_exact_binomials() {
        for d in [3u64, 7, 13, 23, 31] {
            for k in 1..=d as usize {
                for p in [1e-6, 0.01, 0.3, 0.5, 0.77, 0.999] {
                    let fast = p_success(d, k, p).unwrap();
                    let exact = exact_tail(d, d - k as u64, p);
                    let scale = fast.abs().max(exact.abs()).max(f64::MIN_POSITIVE);
                    assert!(
                        (fast - exact).abs() / scale < 1e-12,
                        "d={d} k={k} p={p}: {fast} vs {exact}"
                    );
                }
            }
        }
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(
            p_success(4, 2, 0.1),
            Err(AnalysisError::NonPrimeDimension(4))
        ));
        assert!(matches!(
            p_success(5, 0, 0.1),
            Err(AnalysisError::InvalidK { .. })
        ));
        assert!(matches!(
            p_success(5, 3, 1.5),
            Err(AnalysisError::ProbabilityRange { .. })
        ));
    }

    #[test]
    fn kl_divergence_examples() {
        assert!(kl_divergence(0.3, 0.3).unwrap().abs() < TOL);
        // Frozen from a 50-digit evaluation of the defining formula:
        // D(0.5||0.25) = 0.5 ln 2 + 0.5 ln(2/3).
        let value = kl_divergence(0.5, 0.25).unwrap();
        assert!((value - 0.14384103622589046).abs() < TOL);
        // Gibbs: nonnegative, zero only on the diagonal.
        for a in [0.1, 0.4, 0.9] {
            for b in [0.2, 0.5, 0.8] {
                let v = kl_divergence(a, b).unwrap();
                if (a - b).abs() < 1e-15 {
                    assert!(v.abs() < TOL);
                } else {
                    assert!(v > 0.0);
                }
            }
        }
        assert!(matches!(kl_divergence(0.0, 0.5), Err(AnalysisError::KlDomain)));
        assert!(matches!(kl_divergence(0.5, 1.0), Err(AnalysisError::KlDomain)));
    }

    #[test]
    fn chernoff_bounds_hold() {
        // Upper regime: p_l above the correctable fraction.
        let bound = chernoff_bound(101, 61, 0.5).unwrap();
        assert_eq!(bound.regime, BoundRegime::UpperOnSuccess);
        let ps = p_success(101, 61, 0.5).unwrap();
        assert!(ps <= bound.value);

        // Lower regime.
        let bound = chernoff_bound(101, 61, 0.3).unwrap();
        assert_eq!(bound.regime, BoundRegime::LowerOnSuccess);
        let ps = p_success(101, 61, 0.3).unwrap();
        assert!(ps >= bound.value);

        // Boundary is refused.
        let threshold = 40.0 / 101.0;
        assert!(matches!(
            chernoff_bound(101, 61, threshold),
            Err(AnalysisError::BoundaryEpsilon(_))
        ));
    }

    #[test]
    fn chernoff_bounds_hold_on_grid() {
        for d in [11u64, 31, 101, 151] {
            for k in [(d / 2 + 1) as usize, (3 * d / 4) as usize] {
                for p_l in [0.05, 0.15, 0.25, 0.35, 0.45, 0.55, 0.65] {
                    match chernoff_bound(d, k, p_l) {
                        Ok(bound) => {
                            let ps = p_success(d, k, p_l).unwrap();
                            // 1e-12 slack absorbs summation noise when both
                            // sides sit within a few ulp of 1.
                            match bound.regime {
                                BoundRegime::UpperOnSuccess => assert!(
                                    ps <= bound.value + 1e-12,
                                    "upper bound violated d={d} k={k} p={p_l}"
                                ),
                                BoundRegime::LowerOnSuccess => assert!(
                                    ps >= bound.value - 1e-12,
                                    "lower bound violated d={d} k={k} p={p_l}"
                                ),
                            }
                        }
                        Err(AnalysisError::BoundaryEpsilon(_)) => {}
                        Err(e) => panic!("unexpected error {e}"),
                    }
                }
            }
        }
    }

    #[test]
    fn taylor_forms_reported_not_asserted() {
        // The small-epsilon approximations travel with each bound for
        // inspection; the printed lower form can dip below zero, so the only
        // contract is that the field is populated and finite.
        let upper = chernoff_bound(101, 61, 0.5).unwrap();
        assert!(upper.taylor_value.is_finite());
        assert!(upper.taylor_value > 0.0 && upper.taylor_value < 1.0);
        let lower = chernoff_bound(101, 61, 0.3).unwrap();
        assert!(lower.taylor_value.is_finite());
    }

    #[test]
    fn monotonicity() {
        // Nonincreasing in p_l; nondecreasing in d-k at fixed d.
        for d in [5u64, 13, 101] {
            for k in 1..=d as usize {
                let mut prev = f64::INFINITY;
                for i in 0..=20 {
                    let p_l = i as f64 / 20.0;
                    let value = p_success(d, k, p_l).unwrap();
                    assert!(value <= prev + 1e-12);
                    prev = value;
                }
            }
            for p_l in [0.1, 0.3, 0.6] {
                let mut prev = -1.0;
                for k in (1..=d as usize).rev() {
                    let value = p_success(d, k, p_l).unwrap();
                    assert!(value + 1e-12 >= prev);
                    prev = value;
                }
            }
        }
    }

    #[test]
    fn rate_zero_symmetry_point() {
        // k = (d+1)/2 at p_l = 0.5: the binomial head P(X <= (d-1)/2) is
        // exactly one half by symmetry.
        for d in [3u64, 7, 11, 101] {
            let k = nearest_k_for_rate(d, 0.0);
            assert_eq!(k as u64, d.div_ceil(2));
            let p = p_success(d, k, 0.5).unwrap();
            assert!((p - 0.5).abs() < 1e-12, "d={d}: {p}");
        }
    }

    #[test]
    fn transition_width_shrinks_like_inverse_sqrt_d() {
        let w151 = transition_width(151, nearest_k_for_rate(151, 0.2), 0.99, 0.01).unwrap();
        let w601 = transition_width(601, nearest_k_for_rate(601, 0.2), 0.99, 0.01).unwrap();
        let ratio = w601 / w151;
        let predicted = (151.0f64 / 601.0).sqrt();
        assert!(
            (ratio - predicted).abs() / predicted < 0.2,
            "ratio {ratio} vs sqrt prediction {predicted}"
        );
    }

    #[test]
    fn capacity_consistency_across_dimensions() {
        // Strictly inside capacity success tends to 1; outside it tends to 0.
        let primes = [11u64, 31, 101, 307, 601];
        let rate = 0.2;
        let inside = 0.3; // 1 - 2 p_l = 0.4 > 0.2
        let outside = 0.5; // 1 - 2 p_l = 0.0 < 0.2
        let mut prev_inside = 0.0;
        for &d in &primes {
            let k = nearest_k_for_rate(d, rate);
            let p_in = p_success(d, k, inside).unwrap();
            let p_out = p_success(d, k, outside).unwrap();
            assert!(p_in >= prev_inside - 1e-9);
            prev_inside = p_in;
            if d >= 307 {
                assert!(p_in > 0.99, "d={d}: inside-capacity success {p_in}");
                assert!(p_out < 0.01, "d={d}: outside-capacity success {p_out}");
            }
        }
    }

    #[test]
    fn capacity_curve_tabulation() {
        let grid = default_p_grid(0.2, 0.15, 11);
        let points = capacity_gap_curve(0.2, &[11, 31], &grid).unwrap();
        assert_eq!(points.len(), 22);
        // p_l = 0 absent from this grid; all rows carry valid probabilities.
        for p in &points {
            assert!((0.0..=1.0).contains(&p.p_success));
            assert!(((2 * p.k) as f64 - p.d as f64) / p.d as f64 == p.code_rate);
        }
        let csv = capacity_points_to_csv(&points);
        assert!(csv.starts_with("# schema: qrs.capacity.v1\nd,k,R_c,p_l,p_success,bound,regime\n"));
        assert_eq!(csv.lines().count(), 2 + 22);

        assert!(matches!(
            capacity_gap_curve(0.2, &[12], &grid),
            Err(AnalysisError::NonPrimeDimension(12))
        ));
    }
}
