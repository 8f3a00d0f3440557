//! CSS construction of the quantum Reed-Solomon code [[d, 2k-d, d-k+1]] over
//! qudits of prime dimension d.
//!
//! Stabilizers and logical operators are held in the symplectic (exponent
//! vector) representation with phases dropped: a word stands for
//! prod_i X_i^{x_i} Z_i^{z_i} up to global phase. All structural checks
//! (commutation, support, equivalence) are phase-insensitive, and exponent
//! vectors scale to dimensions where explicit state vectors cannot exist.
//!
//! Logical operator extraction: the X-type stabilizer exponent rows are the
//! parity-check rows (the dual code's generator), which for k > d/2 are the
//! leading rows of the generator matrix itself. The remaining generator rows
//! are coset representatives of the dual inside the code and serve as logical
//! X operators; logical Z operators are the linear combinations of those same
//! representatives that make the symplectic pairing the identity.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::field::{add_mod, mul_mod, sub_mod, PrimeField};
use crate::linalg::{neg_vec, solve, Matrix, SolveOutcome};
use crate::rs::RsCode;

/// Coset enumeration above this many elements is refused.
const MAX_COSET_ENUMERATION: u64 = 1 << 21;

/// Largest qudit dimension for which explicit logical states are built.
const MAX_STATE_DIMENSION: u64 = 5;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QrscError {
    #[error("CSS construction requires k > d/2; got d={d}, k={k}")]
    CssViolation { d: u64, k: usize },
    #[error("operator does not commute with the stabilizer group")]
    NotInNormalizer,
    #[error("stabilizer coset has {0} elements, too many to enumerate")]
    CosetTooLarge(u64),
    #[error("explicit states supported only for d <= {MAX_STATE_DIMENSION}, got d={0}")]
    StateTooLarge(u64),
    #[error("expected {expected} logical symbols, got {got}")]
    WrongLogicalCount { expected: usize, got: usize },
    #[error("pauli word length {got} does not match block length {expected}")]
    WrongLength { expected: usize, got: usize },
}

/// A generalized Pauli word on d-dimensional qudits, up to global phase:
/// X^l|j> = |j+l>, Z^l|j> = w^(lj)|j> with w = exp(2*pi*i/d).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliWord {
    dimension: u64,
    x_exponents: Vec<u64>,
    z_exponents: Vec<u64>,
}

impl PauliWord {
    pub fn new(dimension: u64, x_exponents: Vec<u64>, z_exponents: Vec<u64>) -> Self {
        assert_eq!(x_exponents.len(), z_exponents.len());
        let reduce = |v: Vec<u64>| v.into_iter().map(|e| e % dimension).collect();
        Self {
            dimension,
            x_exponents: reduce(x_exponents),
            z_exponents: reduce(z_exponents),
        }
    }

    pub fn identity(dimension: u64, length: usize) -> Self {
        Self {
            dimension,
            x_exponents: vec![0; length],
            z_exponents: vec![0; length],
        }
    }

    pub fn x_word(dimension: u64, exponents: Vec<u64>) -> Self {
        let len = exponents.len();
        Self::new(dimension, exponents, vec![0; len])
    }

    pub fn z_word(dimension: u64, exponents: Vec<u64>) -> Self {
        let len = exponents.len();
        Self::new(dimension, vec![0; len], exponents)
    }

    pub fn dimension(&self) -> u64 {
        self.dimension
    }

    pub fn len(&self) -> usize {
        self.x_exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x_exponents.is_empty()
    }

    pub fn x_exponents(&self) -> &[u64] {
        &self.x_exponents
    }

    pub fn z_exponents(&self) -> &[u64] {
        &self.z_exponents
    }

    pub fn is_identity(&self) -> bool {
        self.x_exponents.iter().all(|&e| e == 0) && self.z_exponents.iter().all(|&e| e == 0)
    }

    /// Positions where the word acts nontrivially.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| self.x_exponents[i] != 0 || self.z_exponents[i] != 0)
            .collect()
    }

    pub fn acts_trivially_on(&self, positions: &[usize]) -> bool {
        positions
            .iter()
            .all(|&i| self.x_exponents[i] == 0 && self.z_exponents[i] == 0)
    }

    /// Product up to phase: exponents add componentwise mod d.
    pub fn mul(&self, other: &PauliWord) -> PauliWord {
        assert_eq!(self.dimension, other.dimension);
        assert_eq!(self.len(), other.len());
        let d = self.dimension;
        PauliWord {
            dimension: d,
            x_exponents: self
                .x_exponents
                .iter()
                .zip(&other.x_exponents)
                .map(|(&a, &b)| add_mod(a, b, d))
                .collect(),
            z_exponents: self
                .z_exponents
                .iter()
                .zip(&other.z_exponents)
                .map(|(&a, &b)| add_mod(a, b, d))
                .collect(),
        }
    }

    /// Symplectic form sum_i (x_i z'_i - z_i x'_i) mod d; zero exactly when
    /// the two words commute.
    pub fn symplectic_form(&self, other: &PauliWord) -> u64 {
        assert_eq!(self.dimension, other.dimension);
        let d = self.dimension;
        let mut acc = 0u64;
        for i in 0..self.len() {
            let pos = mul_mod(self.x_exponents[i], other.z_exponents[i], d);
            let neg = mul_mod(self.z_exponents[i], other.x_exponents[i], d);
            acc = add_mod(acc, sub_mod(pos, neg, d), d);
        }
        acc
    }

    pub fn commutes_with(&self, other: &PauliWord) -> bool {
        self.symplectic_form(other) == 0
    }
}

/// Renders one letter per site: I, or X/Z with superscript exponents, giving
/// strings like "XXX", "IXX²", and "IZ²Z".
impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            let x = self.x_exponents[i];
            let z = self.z_exponents[i];
            if x == 0 && z == 0 {
                f.write_str("I")?;
            } else {
                if x > 0 {
                    f.write_str("X")?;
                    if x > 1 {
                        f.write_str(&superscript(x))?;
                    }
                }
                if z > 0 {
                    f.write_str("Z")?;
                    if z > 1 {
                        f.write_str(&superscript(z))?;
                    }
                }
            }
        }
        Ok(())
    }
}

fn superscript(n: u64) -> String {
    const DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    n.to_string()
        .chars()
        .map(|c| DIGITS[c.to_digit(10).unwrap() as usize])
        .collect()
}

/// The quantum Reed-Solomon code [[d, 2k-d, d-k+1]] built from the classical
/// [d, k] code and its dual.
#[derive(Debug, Clone)]
pub struct QrscCode {
    base: RsCode,
    x_stabilizers: Vec<PauliWord>,
    z_stabilizers: Vec<PauliWord>,
    logical_x: Vec<PauliWord>,
    logical_z: Vec<PauliWord>,
}

impl QrscCode {
    /// Runs the CSS construction for k > d/2 and re-verifies the structural
    /// invariants (stabilizer commutation, normalizer membership, symplectic
    /// pairing) before returning.
    pub fn new(field: PrimeField, k: usize) -> Result<Self, QrscError> {
        let d = field.modulus();
        if 2 * (k as u64) <= d {
            return Err(QrscError::CssViolation { d, k });
        }
        let base = RsCode::new(field, k).expect("k validated above");
        let n = base.block_length();
        let n_stab = n - k;

        // X- and Z-type stabilizer exponents are the parity-check rows.
        let h_rows = base.parity_check().row_vecs();
        let x_stabilizers: Vec<PauliWord> = h_rows
            .iter()
            .map(|row| PauliWord::x_word(d, row.clone()))
            .collect();
        let z_stabilizers: Vec<PauliWord> = h_rows
            .iter()
            .map(|row| PauliWord::z_word(d, row.clone()))
            .collect();

        // Coset representatives of the dual inside the code: generator rows
        // x^(d-k) .. x^(k-1). (The first d-k generator rows coincide with the
        // parity-check rows because both are Vandermonde prefixes.)
        let g_rows = base.generator().row_vecs();
        let x_reps: Vec<Vec<u64>> = g_rows[n_stab..k].to_vec();
        let n_logical = x_reps.len();

        // Pair logical Z against logical X: with M = A A^T (the Gram matrix
        // of the representatives), B = (M^-1)^T A satisfies A B^T = I, which
        // makes the symplectic pairing exactly delta_ij.
        let a = Matrix::from_rows(&field, x_reps.clone());
        let gram = a.matmul(&a.transpose());
        let gram_inv = gram
            .inverse()
            .expect("symplectic pairing on coset space is nondegenerate");
        let b = gram_inv.transpose().matmul(&a);

        let logical_x: Vec<PauliWord> = x_reps
            .into_iter()
            .map(|row| PauliWord::x_word(d, row))
            .collect();
        let logical_z: Vec<PauliWord> = b
            .row_vecs()
            .into_iter()
            .map(|row| PauliWord::z_word(d, row))
            .collect();

        let code = Self {
            base,
            x_stabilizers,
            z_stabilizers,
            logical_x,
            logical_z,
        };
        code.verify_structure(n_logical);
        Ok(code)
    }

    fn verify_structure(&self, n_logical: usize) {
        let stabs: Vec<&PauliWord> = self
            .x_stabilizers
            .iter()
            .chain(&self.z_stabilizers)
            .collect();
        for (i, s) in stabs.iter().enumerate() {
            for t in &stabs[i + 1..] {
                assert!(s.commutes_with(t), "stabilizers must commute");
            }
        }
        let logicals: Vec<&PauliWord> = self.logical_x.iter().chain(&self.logical_z).collect();
        for l in &logicals {
            for s in &stabs {
                assert!(l.commutes_with(s), "logicals must centralize stabilizers");
            }
        }
        for (i, lx) in self.logical_x.iter().enumerate() {
            for (j, lz) in self.logical_z.iter().enumerate() {
                let pairing = lx.symplectic_form(lz);
                if i == j {
                    assert_eq!(pairing, 1, "conjugate pair must have unit pairing");
                } else {
                    assert_eq!(pairing, 0, "distinct pairs must commute");
                }
            }
        }
        assert_eq!(self.logical_x.len(), n_logical);
        assert_eq!(self.logical_z.len(), n_logical);
    }

    pub fn base(&self) -> &RsCode {
        &self.base
    }

    pub fn field(&self) -> &PrimeField {
        self.base.field()
    }

    /// Physical block length (= d).
    pub fn block_length(&self) -> usize {
        self.base.block_length()
    }

    /// Number of logical qudits, 2k - d.
    pub fn n_logical(&self) -> usize {
        2 * self.base.message_length() - self.block_length()
    }

    /// Code distance d - k + 1; up to d - k erasures are correctable.
    pub fn distance(&self) -> usize {
        self.base.distance()
    }

    pub fn x_stabilizers(&self) -> &[PauliWord] {
        &self.x_stabilizers
    }

    pub fn z_stabilizers(&self) -> &[PauliWord] {
        &self.z_stabilizers
    }

    pub fn logical_x(&self) -> &[PauliWord] {
        &self.logical_x
    }

    pub fn logical_z(&self) -> &[PauliWord] {
        &self.logical_z
    }

    /// Iterates the full stabilizer group (all X-type and Z-type generator
    /// combinations) multiplied onto `op`, phase-free.
    ///
    /// Errs with [`QrscError::NotInNormalizer`] when `op` fails to commute
    /// with some stabilizer, and [`QrscError::CosetTooLarge`] when the group
    /// order d^(2(d-k)) exceeds the enumeration bound.
    pub fn stabilizer_equivalents(&self, op: &PauliWord) -> Result<Vec<PauliWord>, QrscError> {
        if op.len() != self.block_length() {
            return Err(QrscError::WrongLength {
                expected: self.block_length(),
                got: op.len(),
            });
        }
        for s in self.x_stabilizers.iter().chain(&self.z_stabilizers) {
            if !op.commutes_with(s) {
                return Err(QrscError::NotInNormalizer);
            }
        }
        let d = self.field().modulus();
        let n_stab = self.x_stabilizers.len() as u32;
        let group_order = d
            .checked_pow(2 * n_stab)
            .filter(|&g| g <= MAX_COSET_ENUMERATION)
            .ok_or_else(|| {
                let saturated = (d as u128)
                    .checked_pow(2 * n_stab)
                    .map_or(u64::MAX, |g| g.min(u64::MAX as u128) as u64);
                QrscError::CosetTooLarge(saturated)
            })?;

        let mut out = Vec::with_capacity(group_order as usize);
        let combos = d.pow(n_stab);
        for x_index in 0..combos {
            let x_element = self.stabilizer_combination(x_index, &self.x_stabilizers);
            let with_x = op.mul(&x_element);
            for z_index in 0..combos {
                let z_element = self.stabilizer_combination(z_index, &self.z_stabilizers);
                out.push(with_x.mul(&z_element));
            }
        }
        Ok(out)
    }

    /// Decodes `index` as base-d digits selecting the power of each generator.
    fn stabilizer_combination(&self, mut index: u64, generators: &[PauliWord]) -> PauliWord {
        let d = self.field().modulus();
        let mut acc = PauliWord::identity(d, self.block_length());
        for g in generators {
            let power = index % d;
            index /= d;
            for _ in 0..power {
                acc = acc.mul(g);
            }
        }
        acc
    }

    /// Finds a stabilizer-equivalent of `op` acting trivially on `positions`,
    /// via a linear solve over the stabilizer span (exact for any d).
    pub fn equivalent_avoiding(
        &self,
        op: &PauliWord,
        positions: &[usize],
    ) -> Option<PauliWord> {
        let d = self.field().modulus();
        if positions.is_empty() {
            return Some(op.clone());
        }
        let h = self.base.parity_check();
        // Solve lambda * H|_E = -op|_E separately for the X and Z parts: the
        // unknowns are the generator coefficients lambda in F_d^(d-k).
        let solve_part = |target: &[u64]| -> Option<Vec<u64>> {
            let cols: Vec<Vec<u64>> = positions
                .iter()
                .map(|&p| (0..h.rows()).map(|r| h.get(r, p)).collect())
                .collect();
            let system = Matrix::from_rows(self.field(), cols);
            let restricted: Vec<u64> = positions.iter().map(|&p| target[p]).collect();
            match solve(&system, &neg_vec(&restricted, d)) {
                SolveOutcome::Solution(lambda) => Some(lambda),
                SolveOutcome::Inconsistent => None,
            }
        };
        let lambda_x = solve_part(op.x_exponents())?;
        let lambda_z = solve_part(op.z_exponents())?;

        let x_shift = h.left_mul_vec(&lambda_x);
        let z_shift = h.left_mul_vec(&lambda_z);
        let result = op.mul(&PauliWord::new(d, x_shift, z_shift));
        debug_assert!(result.acts_trivially_on(positions));
        Some(result)
    }

    /// True exactly when every logical X and Z operator admits a
    /// stabilizer-equivalent representative with identity action on all
    /// erased positions; guaranteed whenever at most d - k qudits are erased.
    pub fn certify_erasure_correctable(&self, erased: &[usize]) -> bool {
        let positions: Vec<usize> = erased.to_vec();
        self.logical_x
            .iter()
            .chain(&self.logical_z)
            .all(|op| self.equivalent_avoiding(op, &positions).is_some())
    }

    /// Builds the explicit logical basis state |s_0, ..., s_(m-1)>: the equal
    /// superposition of codewords whose high message coefficients are pinned
    /// to the logical symbols while the low d-k coefficients run free.
    pub fn logical_basis_state(&self, logical_symbols: &[u64]) -> Result<LogicalState, QrscError> {
        let d = self.field().modulus();
        if d > MAX_STATE_DIMENSION {
            return Err(QrscError::StateTooLarge(d));
        }
        if logical_symbols.len() != self.n_logical() {
            return Err(QrscError::WrongLogicalCount {
                expected: self.n_logical(),
                got: logical_symbols.len(),
            });
        }
        let k = self.base.message_length();
        let n_free = self.block_length() - k; // d - k low coefficients
        let terms = (d as usize).pow(n_free as u32);
        let amplitude = Complex64::new(1.0 / (terms as f64).sqrt(), 0.0);

        let mut amplitudes = BTreeMap::new();
        let mut message = vec![0u64; k];
        for (slot, &s) in logical_symbols.iter().enumerate() {
            message[n_free + slot] = s % d;
        }
        for index in 0..terms {
            let mut rem = index as u64;
            for coeff in message.iter_mut().take(n_free) {
                *coeff = rem % d;
                rem /= d;
            }
            let msg = self
                .base
                .message_from_values(&message)
                .expect("message length is k by construction");
            let word = self.base.encode(&msg).expect("encode cannot fail here");
            let key: Vec<u8> = word.values().iter().map(|&v| v as u8).collect();
            amplitudes.insert(key, amplitude);
        }
        Ok(LogicalState {
            dimension: d,
            length: self.block_length(),
            amplitudes,
        })
    }
}

/// A sparse state vector over the d^n computational basis, keyed by basis
/// strings.
#[derive(Debug, Clone)]
pub struct LogicalState {
    dimension: u64,
    length: usize,
    amplitudes: BTreeMap<Vec<u8>, Complex64>,
}

impl LogicalState {
    pub fn dimension(&self) -> u64 {
        self.dimension
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn amplitudes(&self) -> &BTreeMap<Vec<u8>, Complex64> {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .values()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Applies a Pauli word: X exponents shift basis labels, Z exponents
    /// contribute the phase w^(sum_i z_i v_i) evaluated on the incoming label.
    pub fn apply(&self, word: &PauliWord) -> LogicalState {
        assert_eq!(word.len(), self.length);
        assert_eq!(word.dimension(), self.dimension);
        let d = self.dimension;
        let omega = 2.0 * std::f64::consts::PI / d as f64;
        let mut amplitudes = BTreeMap::new();
        for (basis, amp) in &self.amplitudes {
            let mut phase_exp = 0u64;
            let mut shifted = basis.clone();
            for i in 0..self.length {
                let v = basis[i] as u64;
                phase_exp = add_mod(phase_exp, mul_mod(word.z_exponents()[i], v, d), d);
                shifted[i] = add_mod(v, word.x_exponents()[i], d) as u8;
            }
            let phase = Complex64::from_polar(1.0, omega * phase_exp as f64);
            let entry = amplitudes.entry(shifted).or_insert(Complex64::ZERO);
            *entry += amp * phase;
        }
        LogicalState {
            dimension: d,
            length: self.length,
            amplitudes,
        }
    }

    /// Inner product <self|other>.
    pub fn inner(&self, other: &LogicalState) -> Complex64 {
        let mut acc = Complex64::ZERO;
        for (basis, amp) in &self.amplitudes {
            if let Some(other_amp) = other.amplitudes.get(basis) {
                acc += amp.conj() * other_amp;
            }
        }
        acc
    }

    /// Maximum componentwise amplitude difference against `other`.
    pub fn max_amplitude_difference(&self, other: &LogicalState) -> f64 {
        let mut keys: Vec<&Vec<u8>> = self.amplitudes.keys().collect();
        keys.extend(other.amplitudes.keys());
        keys.into_iter()
            .map(|k| {
                let a = self.amplitudes.get(k).copied().unwrap_or(Complex64::ZERO);
                let b = other.amplitudes.get(k).copied().unwrap_or(Complex64::ZERO);
                (a - b).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Dense amplitude vector of length d^n in lexicographic basis order
    /// (first qudit most significant).
    pub fn dense(&self) -> Vec<Complex64> {
        let size = (self.dimension as usize).pow(self.length as u32);
        let mut out = vec![Complex64::ZERO; size];
        for (basis, amp) in &self.amplitudes {
            let mut index = 0usize;
            for &digit in basis {
                index = index * self.dimension as usize + digit as usize;
            }
            out[index] = *amp;
        }
        out
    }
}
