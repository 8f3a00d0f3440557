//! Independent stochastic verification of the analytic probabilities: sampled
//! erasure patterns with a rank-based decodability cross-check, sampled
//! operation-error counts classified against the x + 2y <= d-k criterion, and
//! an exact small-d enumeration that needs no sampling at all.
//!
//! Randomness is counter-based: every trial derives its generator from
//! (seed, trial index), so tallies are reproducible bit-for-bit no matter how
//! trials are sharded across workers.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::field::is_prime;
use crate::linalg::Matrix;
use crate::rs::RsCode;
use crate::PrimeField;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MonteCarloError {
    #[error("trial config needs prime d and 1 <= k <= d; got d={d}, k={k}")]
    InvalidCode { d: u64, k: usize },
    #[error("probability {name}={value} outside [0, 1]")]
    ProbabilityRange { name: &'static str, value: f64 },
    #[error("n_samples must be at least 1")]
    NoSamples,
    #[error("exact enumeration supported for d <= {max}, got d={d}")]
    EnumerationTooLarge { d: u64, max: u64 },
}

/// Largest dimension for the exact (x, y) enumeration; C(31, j) still fits
/// comfortably in u128 and the loop stays trivial.
pub const MAX_ENUMERATION_D: u64 = 31;

/// Fraction of trials that re-verify the counting criterion against the rank
/// of the surviving generator columns.
const RANK_CHECK_STRIDE: u64 = 100;

/// One Monte Carlo experiment description.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialConfig {
    pub d: u64,
    pub k: usize,
    /// Per-qudit erasure probability.
    pub p_l: f64,
    /// Per-survivor operation-error probability.
    pub eps: f64,
    pub n_samples: u64,
    pub seed: u64,
}

impl TrialConfig {
    fn validate(&self) -> Result<(), MonteCarloError> {
        if !is_prime(self.d) || self.k < 1 || self.k as u64 > self.d {
            return Err(MonteCarloError::InvalidCode {
                d: self.d,
                k: self.k,
            });
        }
        for (name, value) in [("p_l", self.p_l), ("eps", self.eps)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(MonteCarloError::ProbabilityRange { name, value });
            }
        }
        if self.n_samples == 0 {
            return Err(MonteCarloError::NoSamples);
        }
        Ok(())
    }
}

/// Tallies from one experiment. For erasure sampling only `count_success`
/// (arrival with at most d-k losses) and its complement are populated; decode
/// sampling splits successes into correct/incorrect/uncovered, and the four
/// buckets sum to `n_samples`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct TrialOutcome {
    pub n_samples: u64,
    /// Trials with x <= d-k losses (the block arrived decodably).
    pub count_success: u64,
    pub count_correct: u64,
    pub count_incorrect: u64,
    /// Arrived, but with more operation errors than the decode formulas
    /// cover (y > d-k-x).
    pub count_uncovered: u64,
    pub count_not_received: u64,
    /// Trials where the rank criterion was re-checked, and how often it
    /// disagreed with survivor counting (must stay zero: the code is MDS).
    pub rank_checks: u64,
    pub rank_disagreements: u64,
}

impl TrialOutcome {
    fn merge(mut self, other: TrialOutcome) -> TrialOutcome {
        self.n_samples += other.n_samples;
        self.count_success += other.count_success;
        self.count_correct += other.count_correct;
        self.count_incorrect += other.count_incorrect;
        self.count_uncovered += other.count_uncovered;
        self.count_not_received += other.count_not_received;
        self.rank_checks += other.rank_checks;
        self.rank_disagreements += other.rank_disagreements;
        self
    }

    pub fn estimate(&self, count: u64) -> f64 {
        count as f64 / self.n_samples as f64
    }

    /// Binomial standard error sqrt(p(1-p)/n) of an estimated proportion.
    pub fn std_error(&self, count: u64) -> f64 {
        let p = self.estimate(count);
        (p * (1.0 - p) / self.n_samples as f64).sqrt()
    }
}

/// splitmix64 finalizer over a golden-ratio indexed stream: maps
/// (seed, trial index) to an independent-looking 64-bit trial seed.
fn trial_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed.wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(trial_seed(seed, index))
}

/// Samples erasure patterns and counts decodable arrivals (survivors >= k).
///
/// Every `RANK_CHECK_STRIDE`-th trial additionally recomputes decodability as
/// the rank of the surviving generator columns; MDS makes the two criteria
/// provably equal, so `rank_disagreements` > 0 can only mean an
/// implementation bug.
pub fn sample_erasure_success(cfg: &TrialConfig) -> Result<TrialOutcome, MonteCarloError> {
    cfg.validate()?;
    let field = PrimeField::new(cfg.d).expect("d validated prime");
    let code = RsCode::new(field, cfg.k).expect("k validated in range");
    let d = cfg.d as usize;

    let outcome = (0..cfg.n_samples)
        .into_par_iter()
        .map(|index| {
            let mut rng = trial_rng(cfg.seed, index);
            let mut survivors: Vec<usize> = Vec::with_capacity(d);
            for position in 0..d {
                if rng.random::<f64>() >= cfg.p_l {
                    survivors.push(position);
                }
            }
            let success = survivors.len() >= cfg.k;
            let mut tally = TrialOutcome {
                n_samples: 1,
                ..TrialOutcome::default()
            };
            if success {
                tally.count_success = 1;
            } else {
                tally.count_not_received = 1;
            }
            if index % RANK_CHECK_STRIDE == 0 {
                tally.rank_checks = 1;
                let rank = surviving_column_rank(&code, &survivors);
                if (rank == cfg.k) != success {
                    tally.rank_disagreements = 1;
                }
            }
            tally
        })
        .reduce(TrialOutcome::default, TrialOutcome::merge);
    Ok(outcome)
}

fn surviving_column_rank(code: &RsCode, survivors: &[usize]) -> usize {
    let g = code.generator();
    let rows: Vec<Vec<u64>> = survivors
        .iter()
        .map(|&p| (0..g.rows()).map(|r| g.get(r, p)).collect())
        .collect();
    if rows.is_empty() {
        return 0;
    }
    Matrix::from_rows(code.field(), rows).rank()
}

/// Samples loss + operation-error outcomes per station and classifies each
/// trial: correct (y within the x + 2y <= d-k budget), incorrect (above the
/// budget but at most d-k-x), uncovered (y > d-k-x), or not received
/// (x > d-k losses).
pub fn sample_decode_outcomes(cfg: &TrialConfig) -> Result<TrialOutcome, MonteCarloError> {
    cfg.validate()?;
    let budget = cfg.d - cfg.k as u64;
    let d = cfg.d as usize;

    let outcome = (0..cfg.n_samples)
        .into_par_iter()
        .map(|index| {
            let mut rng = trial_rng(cfg.seed, index);
            let mut losses = 0u64;
            let mut survivors = 0u64;
            for _ in 0..d {
                if rng.random::<f64>() < cfg.p_l {
                    losses += 1;
                } else {
                    survivors += 1;
                }
            }
            let mut errors = 0u64;
            for _ in 0..survivors {
                if rng.random::<f64>() < cfg.eps {
                    errors += 1;
                }
            }
            let mut tally = TrialOutcome {
                n_samples: 1,
                ..TrialOutcome::default()
            };
            if losses > budget {
                tally.count_not_received = 1;
            } else {
                tally.count_success = 1;
                let remaining = budget - losses;
                if errors <= remaining / 2 {
                    tally.count_correct = 1;
                } else if errors <= remaining {
                    tally.count_incorrect = 1;
                } else {
                    tally.count_uncovered = 1;
                }
            }
            tally
        })
        .reduce(TrialOutcome::default, TrialOutcome::merge);
    Ok(outcome)
}

/// Exact classification probabilities from the full (x, y) enumeration with
/// integer binomial coefficients: the sampling-free oracle for small d.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExactBuckets {
    pub p_correct: f64,
    pub p_incorrect: f64,
    pub p_uncovered: f64,
    pub p_not_received: f64,
}

impl ExactBuckets {
    pub fn p_success(&self) -> f64 {
        self.p_correct + self.p_incorrect + self.p_uncovered
    }

    pub fn total(&self) -> f64 {
        self.p_success() + self.p_not_received
    }
}

/// Enumerates all (x losses, y errors) pairs with exact binomial weights
/// C(d,x) C(d-x,y) p_l^x (1-p_l)^(d-x) eps^y (1-eps)^(d-x-y) and buckets them
/// by the decode criterion. Independent of the log-space closed forms.
pub fn exhaustive_enumeration(
    d: u64,
    k: usize,
    p_l: f64,
    eps: f64,
) -> Result<ExactBuckets, MonteCarloError> {
    if d > MAX_ENUMERATION_D {
        return Err(MonteCarloError::EnumerationTooLarge {
            d,
            max: MAX_ENUMERATION_D,
        });
    }
    let cfg_check = TrialConfig {
        d,
        k,
        p_l,
        eps,
        n_samples: 1,
        seed: 0,
    };
    cfg_check.validate()?;

    let budget = d - k as u64;
    let mut buckets = ExactBuckets {
        p_correct: 0.0,
        p_incorrect: 0.0,
        p_uncovered: 0.0,
        p_not_received: 0.0,
    };
    for x in 0..=d {
        let loss_weight = choose_u128(d, x) as f64
            * int_pow(p_l, x)
            * int_pow(1.0 - p_l, d - x);
        if x > budget {
            buckets.p_not_received += loss_weight;
            continue;
        }
        let remaining = budget - x;
        for y in 0..=(d - x) {
            let weight = loss_weight
                * choose_u128(d - x, y) as f64
                * int_pow(eps, y)
                * int_pow(1.0 - eps, d - x - y);
            if y <= remaining / 2 {
                buckets.p_correct += weight;
            } else if y <= remaining {
                buckets.p_incorrect += weight;
            } else {
                buckets.p_uncovered += weight;
            }
        }
    }
    Ok(buckets)
}

fn choose_u128(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    let mut acc = 1u128;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// p^e with the 0^0 = 1 convention, by repeated squaring on f64.
fn int_pow(p: f64, e: u64) -> f64 {
    if e == 0 {
        return 1.0;
    }
    p.powi(e as i32)
}

/// One verified quantity: analytic value vs Monte Carlo estimate.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationRecord {
    pub quantity: String,
    pub analytic: f64,
    pub estimate: f64,
    pub std_error: f64,
    /// |estimate - analytic| in units of the standard error.
    pub sigmas: f64,
    pub pass: bool,
}

/// Agreement contract: 4 standard errors, chosen so a ~50-check grid has
/// under 1% false-alarm probability.
pub const AGREEMENT_SIGMAS: f64 = 4.0;

impl VerificationRecord {
    pub fn new(quantity: impl Into<String>, analytic: f64, estimate: f64, std_error: f64) -> Self {
        let sigmas = if std_error > 0.0 {
            (estimate - analytic).abs() / std_error
        } else if estimate == analytic {
            0.0
        } else {
            f64::INFINITY
        };
        Self {
            quantity: quantity.into(),
            analytic,
            estimate,
            std_error,
            sigmas,
            pass: sigmas <= AGREEMENT_SIGMAS,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::erasure::p_success;
    use crate::repeater::p_correct_incorrect;

    fn cfg(d: u64, k: usize, p_l: f64, eps: f64, n: u64, seed: u64) -> TrialConfig {
        TrialConfig {
            d,
            k,
            p_l,
            eps,
            n_samples: n,
            seed,
        }
    }

    #[test]
    fn degenerate_probabilities() {
        let out = sample_erasure_success(&cfg(5, 3, 0.0, 0.0, 1000, 7)).unwrap();
        assert_eq!(out.count_success, 1000);
        let out = sample_erasure_success(&cfg(5, 3, 1.0, 0.0, 1000, 7)).unwrap();
        assert_eq!(out.count_success, 0);
        assert_eq!(out.count_not_received, 1000);
        assert_eq!(out.rank_disagreements, 0);
    }

    #[test]
    fn erasure_estimate_matches_analytic() {
        let out = sample_erasure_success(&cfg(3, 2, 0.1, 0.0, 200_000, 42)).unwrap();
        let analytic = p_success(3, 2, 0.1).unwrap();
        let record = VerificationRecord::new(
            "p_success",
            analytic,
            out.estimate(out.count_success),
            out.std_error(out.count_success),
        );
        assert!(record.pass, "{record:?}");
        assert!(out.rank_checks > 0);
        assert_eq!(out.rank_disagreements, 0);
    }

    #[test]
    fn deterministic_given_seed() {
        let a = sample_decode_outcomes(&cfg(7, 4, 0.2, 0.05, 50_000, 99)).unwrap();
        let b = sample_decode_outcomes(&cfg(7, 4, 0.2, 0.05, 50_000, 99)).unwrap();
        assert_eq!(a, b);
        let c = sample_decode_outcomes(&cfg(7, 4, 0.2, 0.05, 50_000, 100)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn shard_independence() {
        // Tallies must not depend on how the index range is partitioned:
        // simulate a two-shard run by splitting the index range by hand.
        let full = sample_decode_outcomes(&cfg(5, 3, 0.3, 0.1, 20_000, 4321)).unwrap();
        let mut manual = TrialOutcome::default();
        for index in 0..20_000u64 {
            let mut rng = trial_rng(4321, index);
            let mut losses = 0u64;
            let mut survivors = 0u64;
            for _ in 0..5 {
                if rng.random::<f64>() < 0.3 {
                    losses += 1;
                } else {
                    survivors += 1;
                }
            }
            let mut errors = 0u64;
            for _ in 0..survivors {
                if rng.random::<f64>() < 0.1 {
                    errors += 1;
                }
            }
            manual.n_samples += 1;
            if losses > 2 {
                manual.count_not_received += 1;
            } else {
                manual.count_success += 1;
                let remaining = 2 - losses;
                if errors <= remaining / 2 {
                    manual.count_correct += 1;
                } else if errors <= remaining {
                    manual.count_incorrect += 1;
                } else {
                    manual.count_uncovered += 1;
                }
            }
        }
        assert_eq!(full.count_success, manual.count_success);
        assert_eq!(full.count_correct, manual.count_correct);
        assert_eq!(full.count_incorrect, manual.count_incorrect);
        assert_eq!(full.count_uncovered, manual.count_uncovered);
        assert_eq!(full.count_not_received, manual.count_not_received);
    }

    #[test]
    fn decode_outcomes_zero_eps() {
        let out = sample_decode_outcomes(&cfg(7, 5, 0.15, 0.0, 50_000, 5)).unwrap();
        assert_eq!(out.count_incorrect, 0);
        assert_eq!(out.count_uncovered, 0);
        assert_eq!(
            out.count_correct + out.count_not_received,
            out.n_samples
        );
    }

    #[test]
    fn decode_estimates_match_analytic() {
        let out = sample_decode_outcomes(&cfg(3, 2, 0.1, 0.01, 400_000, 2024)).unwrap();
        let (pc, pi) = p_correct_incorrect(3, 2, 0.9, 0.01).unwrap();
        let rc = VerificationRecord::new(
            "p_correct",
            pc,
            out.estimate(out.count_correct),
            out.std_error(out.count_correct),
        );
        assert!(rc.pass, "{rc:?}");
        let ri = VerificationRecord::new(
            "p_incorrect",
            pi,
            out.estimate(out.count_incorrect),
            out.std_error(out.count_incorrect),
        );
        assert!(ri.pass, "{ri:?}");
        assert_eq!(
            out.count_success + out.count_not_received,
            out.n_samples
        );
        assert_eq!(
            out.count_correct + out.count_incorrect + out.count_uncovered,
            out.count_success
        );
    }

    #[test]
    fn enumeration_is_complete_and_matches_closed_forms() {
        for (d, k) in [(3u64, 2usize), (5, 4), (7, 4), (23, 12), (31, 16)] {
            for (p_l, eps) in [(0.1, 0.01), (0.3, 0.05), (0.0, 0.2), (0.6, 0.0)] {
                let exact = exhaustive_enumeration(d, k, p_l, eps).unwrap();
                assert!(
                    (exact.total() - 1.0).abs() < 1e-12,
                    "buckets must sum to 1: d={d} k={k}"
                );
                let (pc, pi) = p_correct_incorrect(d, k, 1.0 - p_l, eps).unwrap();
                let rel = |a: f64, b: f64| {
                    let scale = a.abs().max(b.abs());
                    if scale == 0.0 {
                        0.0
                    } else {
                        (a - b).abs() / scale
                    }
                };
                assert!(rel(exact.p_correct, pc) < 1e-12, "d={d} k={k} pc");
                assert!(rel(exact.p_incorrect, pi) < 1e-12, "d={d} k={k} pi");
            }
        }
    }

    #[test]
    fn enumeration_collapses_to_erasure_success_at_zero_eps() {
        for (d, k) in [(3u64, 2usize), (5, 4), (13, 7)] {
            for p_l in [0.0, 0.15, 0.5, 1.0] {
                let exact = exhaustive_enumeration(d, k, p_l, 0.0).unwrap();
                let ps = p_success(d, k, p_l).unwrap();
                assert!((exact.p_correct - ps).abs() < 1e-12);
                assert_eq!(exact.p_incorrect, 0.0);
                assert_eq!(exact.p_uncovered, 0.0);
            }
        }
    }

    #[test]
    fn sampler_matches_enumeration_at_unit_distance_margin() {
        // d-k = 1: every bucket including uncovered is populated; the sampled
        // tallies must sit within the agreement contract of the exact
        // enumeration across all four buckets.
        let trial = cfg(5, 4, 0.2, 0.1, 200_000, 31337);
        let sampled = sample_decode_outcomes(&trial).unwrap();
        let exact = exhaustive_enumeration(5, 4, 0.2, 0.1).unwrap();
        for (name, analytic, count) in [
            ("correct", exact.p_correct, sampled.count_correct),
            ("incorrect", exact.p_incorrect, sampled.count_incorrect),
            ("uncovered", exact.p_uncovered, sampled.count_uncovered),
            ("not_received", exact.p_not_received, sampled.count_not_received),
        ] {
            let record = VerificationRecord::new(
                name,
                analytic,
                sampled.estimate(count),
                sampled.std_error(count),
            );
            assert!(record.pass, "{record:?}");
        }
    }

    #[test]
    fn enumeration_bucket_structure_small_distance() {
        // d-k = 1: no incorrect bucket at x = 1, a single-error incorrect
        // bucket at x = 0, everything else uncovered or lost.
        let exact = exhaustive_enumeration(5, 4, 0.2, 0.1, ).unwrap();
        // x=0: correct y=0, incorrect y=1; weights via direct arithmetic.
        let c50 = 1.0f64;
        let w_x0 = c50 * 0.8f64.powi(5);
        let expected_incorrect_x0 = w_x0 * 5.0 * 0.1 * 0.9f64.powi(4);
        // x=1: remaining budget 0, so no incorrect contribution at all.
        assert!((exact.p_incorrect - expected_incorrect_x0).abs() < 1e-12);
        assert!(exact.p_uncovered > 0.0);
    }

    #[test]
    fn config_validation() {
        assert!(matches!(
            sample_erasure_success(&cfg(4, 2, 0.1, 0.0, 10, 0)),
            Err(MonteCarloError::InvalidCode { .. })
        ));
        assert!(matches!(
            sample_erasure_success(&cfg(5, 2, 1.5, 0.0, 10, 0)),
            Err(MonteCarloError::ProbabilityRange { .. })
        ));
        assert!(matches!(
            sample_erasure_success(&cfg(5, 2, 0.5, 0.0, 0, 0)),
            Err(MonteCarloError::NoSamples)
        ));
        assert!(matches!(
            exhaustive_enumeration(37, 19, 0.1, 0.1),
            Err(MonteCarloError::EnumerationTooLarge { .. })
        ));
    }

    #[test]
    fn verification_record_sigma_accounting() {
        let r = VerificationRecord::new("q", 0.5, 0.5, 0.0);
        assert_eq!(r.sigmas, 0.0);
        assert!(r.pass);
        let r = VerificationRecord::new("q", 0.5, 0.6, 0.01);
        assert!((r.sigmas - 10.0).abs() < 1e-12);
        assert!(!r.pass);
    }
}
