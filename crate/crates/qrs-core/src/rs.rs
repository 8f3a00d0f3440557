//! Classical Reed-Solomon codes [d, k, d-k+1] over GF(d).
//!
//! Codewords are evaluations of degree-<k message polynomials at every field
//! point. Evaluation points are kept in canonical ascending order
//! 0, 1, ..., d-1; the permutation to primitive-element power order
//! (0, alpha, alpha^2, ...) is exposed for callers that want the other
//! convention, and the two orderings generate column-permutation-equivalent
//! codes.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::field::{add_mod, mul_mod, pow_mod, FieldElement, PrimeField};
use crate::linalg::{solve, Matrix, SolveOutcome};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RsError {
    #[error("message length k={k} out of range for block length d={d}")]
    InvalidK { k: usize, d: u64 },
    #[error("expected {expected} symbols, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("only {survivors} symbols survive but k={k} are needed")]
    TooManyErasures { survivors: usize, k: usize },
    #[error("surviving symbols do not lie on any degree-<k polynomial")]
    InconsistentWord,
    #[error("symbol belongs to GF({got}) but the code is over GF({expected})")]
    WrongField { expected: u64, got: u64 },
    #[error("erased position {0} outside block")]
    PositionOutOfRange(usize),
}

/// A message of exactly k symbols.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    symbols: Vec<FieldElement>,
}

impl Message {
    pub fn symbols(&self) -> &[FieldElement] {
        &self.symbols
    }

    pub fn values(&self) -> Vec<u64> {
        self.symbols.iter().map(FieldElement::value).collect()
    }
}

/// A length-d codeword, possibly with erased positions. Erased positions keep
/// their slot but their stored symbol is meaningless.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Codeword {
    symbols: Vec<FieldElement>,
    erasure_mask: BTreeSet<usize>,
}

impl Codeword {
    pub fn symbols(&self) -> &[FieldElement] {
        &self.symbols
    }

    pub fn values(&self) -> Vec<u64> {
        self.symbols.iter().map(FieldElement::value).collect()
    }

    pub fn erasure_mask(&self) -> &BTreeSet<usize> {
        &self.erasure_mask
    }

    /// Marks a position as erased.
    pub fn erase(&mut self, position: usize) -> Result<(), RsError> {
        if position >= self.symbols.len() {
            return Err(RsError::PositionOutOfRange(position));
        }
        self.erasure_mask.insert(position);
        Ok(())
    }

    pub fn surviving_positions(&self) -> Vec<usize> {
        (0..self.symbols.len())
            .filter(|p| !self.erasure_mask.contains(p))
            .collect()
    }
}

/// A classical [d, k, d-k+1] Reed-Solomon code over GF(d).
#[derive(Debug, Clone)]
pub struct RsCode {
    field: PrimeField,
    k: usize,
    eval_points: Vec<u64>,
    generator: Matrix,
    parity_check: Matrix,
}

impl RsCode {
    /// Builds the code with generator row i = (x^i at each evaluation point)
    /// and the parity-check matrix as the generator of the dual [d, d-k, k+1]
    /// code, constructed the same way with d-k rows.
    pub fn new(field: PrimeField, k: usize) -> Result<Self, RsError> {
        let d = field.modulus();
        if k < 1 || k as u64 > d {
            return Err(RsError::InvalidK { k, d });
        }
        let eval_points: Vec<u64> = (0..d).collect();
        let generator = vandermonde(&field, k, &eval_points);
        let parity_check = vandermonde(&field, (d as usize) - k, &eval_points);
        Ok(Self {
            field,
            k,
            eval_points,
            generator,
            parity_check,
        })
    }

    pub fn field(&self) -> &PrimeField {
        &self.field
    }

    /// Block length n = d.
    pub fn block_length(&self) -> usize {
        self.field.modulus() as usize
    }

    pub fn message_length(&self) -> usize {
        self.k
    }

    /// Minimum distance d - k + 1 (MDS).
    pub fn distance(&self) -> usize {
        self.block_length() - self.k + 1
    }

    pub fn eval_points(&self) -> &[u64] {
        &self.eval_points
    }

    pub fn generator(&self) -> &Matrix {
        &self.generator
    }

    pub fn parity_check(&self) -> &Matrix {
        &self.parity_check
    }

    /// The dual [d, d-k, k+1] code: its generator is this code's parity-check
    /// matrix. Applying it twice returns a code with the original row space.
    ///
    /// Panics for k = d, whose dual (the zero code) falls outside the
    /// representable family.
    pub fn dual(&self) -> RsCode {
        RsCode::new(self.field, self.block_length() - self.k)
            .expect("dual of a k < d code is always in range")
    }

    /// Permutation p such that canonical column p[j] holds evaluation point
    /// alpha^(j-1) for j >= 1, with column 0 staying at point 0. Reorders the
    /// ascending-order columns into the primitive-element power order.
    pub fn alpha_power_permutation(&self) -> Vec<usize> {
        let d = self.field.modulus();
        let mut perm = Vec::with_capacity(d as usize);
        perm.push(0);
        let mut point = 1u64; // alpha^0
        for j in 0..d.saturating_sub(1) {
            if j > 0 {
                point = mul_mod(point, self.field.alpha(), d);
            }
            perm.push(point as usize);
        }
        perm
    }

    pub fn message_from_values(&self, values: &[u64]) -> Result<Message, RsError> {
        if values.len() != self.k {
            return Err(RsError::LengthMismatch {
                expected: self.k,
                got: values.len(),
            });
        }
        Ok(Message {
            symbols: values.iter().map(|&v| self.field.element(v)).collect(),
        })
    }

    pub fn codeword_from_values(&self, values: &[u64]) -> Result<Codeword, RsError> {
        if values.len() != self.block_length() {
            return Err(RsError::LengthMismatch {
                expected: self.block_length(),
                got: values.len(),
            });
        }
        Ok(Codeword {
            symbols: values.iter().map(|&v| self.field.element(v)).collect(),
            erasure_mask: BTreeSet::new(),
        })
    }

    /// Evaluation encoding: symbol i is the message polynomial at point i,
    /// which equals the row-vector product msg * G.
    pub fn encode(&self, msg: &Message) -> Result<Codeword, RsError> {
        if msg.symbols.len() != self.k {
            return Err(RsError::LengthMismatch {
                expected: self.k,
                got: msg.symbols.len(),
            });
        }
        for s in &msg.symbols {
            if s.modulus() != self.field.modulus() {
                return Err(RsError::WrongField {
                    expected: self.field.modulus(),
                    got: s.modulus(),
                });
            }
        }
        let d = self.field.modulus();
        let symbols = self
            .eval_points
            .iter()
            .map(|&x| {
                // Horner evaluation of c_0 + c_1 x + ... + c_{k-1} x^{k-1}.
                let mut acc = 0u64;
                for c in msg.symbols.iter().rev() {
                    acc = add_mod(mul_mod(acc, x, d), c.value(), d);
                }
                self.field.element(acc)
            })
            .collect();
        Ok(Codeword {
            symbols,
            erasure_mask: BTreeSet::new(),
        })
    }

    /// Recovers the message from the surviving symbols by solving the
    /// Vandermonde system on the surviving columns.
    ///
    /// All survivors participate: with more than k survivors the system is
    /// overdetermined and inconsistency (corruption that is not an erasure)
    /// is detected and reported as [`RsError::InconsistentWord`].
    pub fn decode_erasures(&self, word: &Codeword) -> Result<Message, RsError> {
        if word.symbols.len() != self.block_length() {
            return Err(RsError::LengthMismatch {
                expected: self.block_length(),
                got: word.symbols.len(),
            });
        }
        let survivors = word.surviving_positions();
        if survivors.len() < self.k {
            return Err(RsError::TooManyErasures {
                survivors: survivors.len(),
                k: self.k,
            });
        }
        let d = self.field.modulus();
        let rows: Vec<Vec<u64>> = survivors
            .iter()
            .map(|&p| {
                let x = self.eval_points[p];
                (0..self.k as u64).map(|i| pow_mod(x, i, d)).collect()
            })
            .collect();
        let rhs: Vec<u64> = survivors
            .iter()
            .map(|&p| word.symbols[p].value())
            .collect();
        let system = Matrix::from_rows(&self.field, rows);
        match solve(&system, &rhs) {
            SolveOutcome::Solution(coeffs) => Ok(Message {
                symbols: coeffs.into_iter().map(|v| self.field.element(v)).collect(),
            }),
            SolveOutcome::Inconsistent => Err(RsError::InconsistentWord),
        }
    }
}

/// Rows x^0 .. x^(rows-1) evaluated at each point, with 0^0 = 1. A zero-row
/// matrix keeps the column count (the k = d code has an empty parity check).
fn vandermonde(field: &PrimeField, rows: usize, points: &[u64]) -> Matrix {
    if rows == 0 {
        return Matrix::zeros(field, 0, points.len());
    }
    let d = field.modulus();
    let data: Vec<Vec<u64>> = (0..rows as u64)
        .map(|i| points.iter().map(|&x| pow_mod(x, i, d)).collect())
        .collect();
    Matrix::from_rows(field, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;

    fn code(d: u64, k: usize) -> RsCode {
        RsCode::new(PrimeField::new(d).unwrap(), k).unwrap()
    }

    #[test]
    fn worked_matrices() {
        // [3,2,2]: G = [[1,1,1],[0,1,2]] in ascending point order (a column
        // permutation of the alpha-ordered form), H = [[1,1,1]].
        let c = code(3, 2);
        assert_eq!(c.generator().row_vecs(), vec![vec![1, 1, 1], vec![0, 1, 2]]);
        assert_eq!(c.parity_check().row_vecs(), vec![vec![1, 1, 1]]);

        // [5,4,2]: H = [[1,1,1,1,1]].
        let c = code(5, 4);
        assert_eq!(c.parity_check().row_vecs(), vec![vec![1, 1, 1, 1, 1]]);

        // [2,1,2]: binary repetition.
        let c = code(2, 1);
        assert_eq!(c.generator().row_vecs(), vec![vec![1, 1]]);
        assert_eq!(c.parity_check().row_vecs(), vec![vec![1, 1]]);
    }

    #[test]
    fn invalid_k_rejected() {
        let field = PrimeField::new(5).unwrap();
        assert!(matches!(
            RsCode::new(field, 0),
            Err(RsError::InvalidK { .. })
        ));
        assert!(matches!(
            RsCode::new(field, 6),
            Err(RsError::InvalidK { .. })
        ));
    }

    #[test]
    fn encode_examples() {
        let c = code(3, 2);
        // 1 + x at points (0,1,2).
        let msg = c.message_from_values(&[1, 1]).unwrap();
        assert_eq!(c.encode(&msg).unwrap().values(), vec![1, 2, 0]);

        // Zero polynomial.
        let zero = c.message_from_values(&[0, 0]).unwrap();
        assert_eq!(c.encode(&zero).unwrap().values(), vec![0, 0, 0]);

        // (c0, 1) -> (c0, c0+1, c0+2): the arithmetic-progression codewords.
        for c0 in 0..3u64 {
            let msg = c.message_from_values(&[c0, 1]).unwrap();
            assert_eq!(
                c.encode(&msg).unwrap().values(),
                vec![c0, (c0 + 1) % 3, (c0 + 2) % 3]
            );
        }
    }

    #[test]
    fn encode_equals_msg_times_generator() {
        for (d, k) in [(3u64, 2usize), (5, 3), (7, 4), (11, 6)] {
            let c = code(d, k);
            for trial in 0..20u64 {
                let values: Vec<u64> = (0..k as u64).map(|i| (trial * 7 + i * 13) % d).collect();
                let msg = c.message_from_values(&values).unwrap();
                let by_poly = c.encode(&msg).unwrap().values();
                let by_matrix = c.generator().left_mul_vec(&values);
                assert_eq!(by_poly, by_matrix);
            }
        }
    }

    #[test]
    fn decode_worked_examples() {
        let c = code(3, 2);
        // (?, 2, 0) with position 0 erased solves to (1, 1).
        let mut word = c.codeword_from_values(&[9, 2, 0]).unwrap();
        word.erase(0).unwrap();
        assert_eq!(c.decode_erasures(&word).unwrap().values(), vec![1, 1]);

        // Identity round trip with no erasures.
        let msg = c.message_from_values(&[2, 1]).unwrap();
        let word = c.encode(&msg).unwrap();
        assert_eq!(c.decode_erasures(&word).unwrap(), msg);

        // k=1 constant polynomial: one survivor suffices.
        let c = code(5, 1);
        let mut word = c.codeword_from_values(&[0, 0, 0, 0, 3]).unwrap();
        for p in 0..4 {
            word.erase(p).unwrap();
        }
        assert_eq!(c.decode_erasures(&word).unwrap().values(), vec![3]);
    }

    #[test]
    fn decode_error_paths() {
        let c = code(3, 2);
        let msg = c.message_from_values(&[1, 2]).unwrap();
        let mut word = c.encode(&msg).unwrap();
        word.erase(0).unwrap();
        word.erase(1).unwrap();
        assert!(matches!(
            c.decode_erasures(&word),
            Err(RsError::TooManyErasures { survivors: 1, k: 2 })
        ));

        // Corrupt one symbol without erasing it: overdetermined system is
        // inconsistent.
        let word = c.encode(&msg).unwrap();
        let mut values = word.values();
        values[1] = (values[1] + 1) % 3;
        let corrupted = c.codeword_from_values(&values).unwrap();
        assert!(matches!(
            c.decode_erasures(&corrupted),
            Err(RsError::InconsistentWord)
        ));

        assert!(matches!(
            word.clone().erase(7),
            Err(RsError::PositionOutOfRange(7))
        ));
    }

    #[test]
    fn dual_worked_examples() {
        let c = code(3, 2);
        let dual = c.dual();
        assert_eq!(dual.message_length(), 1);
        assert_eq!(dual.distance(), 3);
        assert_eq!(dual.generator().row_vecs(), vec![vec![1, 1, 1]]);
        // Involution up to row space: parameters and matrices coincide here.
        let double = dual.dual();
        assert_eq!(double.generator(), c.generator());

        let c5 = code(5, 4);
        let dual5 = c5.dual();
        assert_eq!(dual5.message_length(), 1);
        assert_eq!(dual5.distance(), 5);
    }

    #[test]
    fn generator_orthogonal_to_parity_check() {
        for d in [2u64, 3, 5, 7, 11, 13] {
            for k in 1..=d as usize {
                let c = code(d, k);
                if k == d as usize {
                    // Dual has zero rows; nothing to check.
                    continue;
                }
                let product = c.generator().matmul(&c.parity_check().transpose());
                assert!(product.is_zero(), "G H^T != 0 for d={d} k={k}");
            }
        }
    }

    #[test]
    fn generator_rank_and_mds_column_rank() {
        // Any k columns of G are independent (checked exhaustively, small d).
        for d in [2u64, 3, 5, 7] {
            for k in 1..=d as usize {
                let c = code(d, k);
                assert_eq!(c.generator().rank(), k);
                let cols = c.generator().transpose();
                for subset in column_subsets(d as usize, k) {
                    let rows: Vec<Vec<u64>> =
                        subset.iter().map(|&j| cols.row(j).to_vec()).collect();
                    let m = Matrix::from_rows(c.field(), rows);
                    assert_eq!(m.rank(), k, "dependent columns {subset:?} d={d} k={k}");
                }
            }
        }
    }

    #[test]
    fn encoding_is_linear() {
        let c = code(7, 3);
        let d = 7u64;
        for a in 0..d {
            let m1 = c.message_from_values(&[1, 5, 2]).unwrap();
            let m2 = c.message_from_values(&[3, 0, 6]).unwrap();
            let combo: Vec<u64> = m1
                .values()
                .iter()
                .zip(m2.values())
                .map(|(&v1, v2)| (a * v1 + v2) % d)
                .collect();
            let lhs = c
                .encode(&c.message_from_values(&combo).unwrap())
                .unwrap()
                .values();
            let e1 = c.encode(&m1).unwrap().values();
            let e2 = c.encode(&m2).unwrap().values();
            let rhs: Vec<u64> = e1
                .iter()
                .zip(e2)
                .map(|(&v1, v2)| (a * v1 + v2) % d)
                .collect();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn alpha_power_permutation_reorders_points() {
        let c = code(5, 2);
        // alpha = 2 for GF(5): order (0, 1, 2, 4, 3).
        assert_eq!(c.alpha_power_permutation(), vec![0, 1, 2, 4, 3]);
    }

    fn column_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut current = Vec::new();
        subsets_rec(0, n, k, &mut current, &mut out);
        out
    }

    fn subsets_rec(
        start: usize,
        n: usize,
        k: usize,
        current: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        for i in start..n {
            current.push(i);
            subsets_rec(i + 1, n, k, current, out);
            current.pop();
        }
    }
}
