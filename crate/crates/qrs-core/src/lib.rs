//! Quantum Reed-Solomon codes over prime fields and their use in one-way
//! quantum repeaters.
//!
//! The crate builds [[d, 2k-d, d-k+1]] CSS codes from classical Reed-Solomon
//! codes over GF(d), evaluates their erasure-channel performance both in
//! closed form and by Monte Carlo, models a chain of teleportation-corrected
//! repeater stations, and grid-searches code dimension, message length, and
//! repeater spacing against the qubits-per-secret-bit cost coefficient.

pub mod erasure;
pub mod field;
pub mod linalg;
pub mod monte_carlo;
pub mod qrsc;
pub mod repeater;
pub mod rs;
pub mod sweep;

pub use erasure::{
    capacity_gap_curve, chernoff_bound, kl_divergence, p_fail, p_success, transition_width,
    AnalysisError, BoundRegime, CapacityPoint, ChernoffBound,
};
pub use field::{is_prime, nearest_prime, primes_up_to, FieldElement, FieldError, PrimeField};
pub use monte_carlo::{
    exhaustive_enumeration, sample_decode_outcomes, sample_erasure_success, ExactBuckets,
    MonteCarloError, TrialConfig, TrialOutcome, VerificationRecord,
};
pub use qrsc::{LogicalState, PauliWord, QrscCode, QrscError};
pub use repeater::{
    arrival_probability, cost_coefficient, evaluate_chain, key_rate, operation_error,
    p_correct_incorrect, qber, HardwareParams, InfeasibleReason, LinkParams, PerformanceReport,
    RepeaterError,
};
pub use rs::{Codeword, Message, RsCode, RsError};
pub use sweep::{
    flatness_report, optimize, FlatnessReport, KPolicy, SweepError, SweepResult, SweepSpec,
};
