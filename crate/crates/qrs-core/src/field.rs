//! Exact arithmetic in the prime field GF(d).
//!
//! Only prime moduli are supported; every [`PrimeField`] carries its smallest
//! primitive element so that downstream matrix constructions are reproducible.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("modulus {0} is not prime")]
    CompositeModulus(u64),
    #[error("division by zero in GF({0})")]
    DivisionByZero(u64),
    #[error("elements belong to different fields: GF({0}) vs GF({1})")]
    FieldMismatch(u64, u64),
}

/// Deterministic primality test by trial division.
///
/// Code dimensions stay small (a few hundred at most in the capacity sweeps),
/// so trial division is more than fast enough.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut f = 3u64;
    while f * f <= n {
        if n.is_multiple_of(f) {
            return false;
        }
        f += 2;
    }
    true
}

/// All primes in `2..=max`, ascending.
pub fn primes_up_to(max: u64) -> Vec<u64> {
    (2..=max).filter(|&n| is_prime(n)).collect()
}

/// The prime closest to `n` (ties resolve downward).
pub fn nearest_prime(n: u64) -> u64 {
    if is_prime(n) {
        return n;
    }
    for offset in 1.. {
        if n > offset && is_prime(n - offset) {
            return n - offset;
        }
        if is_prime(n + offset) {
            return n + offset;
        }
    }
    unreachable!("primes are unbounded")
}

// Reduced-representative arithmetic mod d. Inputs must already be < d; these
// back both the typed element API and the matrix elimination hot paths.

pub(crate) fn add_mod(a: u64, b: u64, d: u64) -> u64 {
    debug_assert!(a < d && b < d);
    let s = a + b;
    if s >= d {
        s - d
    } else {
        s
    }
}

pub(crate) fn sub_mod(a: u64, b: u64, d: u64) -> u64 {
    debug_assert!(a < d && b < d);
    if a >= b {
        a - b
    } else {
        a + d - b
    }
}

pub(crate) fn mul_mod(a: u64, b: u64, d: u64) -> u64 {
    debug_assert!(a < d && b < d);
    a * b % d
}

pub(crate) fn neg_mod(a: u64, d: u64) -> u64 {
    debug_assert!(a < d);
    if a == 0 {
        0
    } else {
        d - a
    }
}

/// a^e by square-and-multiply, with 0^0 = 1.
pub(crate) fn pow_mod(a: u64, mut e: u64, d: u64) -> u64 {
    debug_assert!(a < d);
    let mut base = a;
    let mut acc = 1 % d;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, d);
        }
        base = mul_mod(base, base, d);
        e >>= 1;
    }
    acc
}

/// Multiplicative inverse via Fermat: a^(d-2) for prime d. Callers must
/// exclude zero.
pub(crate) fn inv_mod(a: u64, d: u64) -> u64 {
    debug_assert!(a != 0, "inverse of zero");
    pow_mod(a, d - 2, d)
}

fn multiplicative_order(g: u64, d: u64) -> u64 {
    let mut acc = g % d;
    let mut order = 1;
    while acc != 1 {
        acc = acc * g % d;
        order += 1;
    }
    order
}

/// The prime field GF(d) together with its smallest primitive element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    d: u64,
    alpha: u64,
}

impl PrimeField {
    /// Builds GF(d), verifying primality and locating the smallest primitive
    /// element (the smallest nonzero element of multiplicative order d-1).
    pub fn new(d: u64) -> Result<Self, FieldError> {
        if !is_prime(d) {
            return Err(FieldError::CompositeModulus(d));
        }
        let alpha = (1..d)
            .find(|&g| multiplicative_order(g, d) == d - 1)
            .expect("every prime field has a primitive element");
        Ok(Self { d, alpha })
    }

    pub fn modulus(&self) -> u64 {
        self.d
    }

    /// The smallest primitive element alpha, with alpha^(d-1) = 1.
    pub fn alpha(&self) -> u64 {
        self.alpha
    }

    /// Wraps a raw integer as a reduced field element.
    pub fn element(&self, value: u64) -> FieldElement {
        FieldElement {
            value: value % self.d,
            modulus: self.d,
        }
    }

    pub fn zero(&self) -> FieldElement {
        self.element(0)
    }

    pub fn one(&self) -> FieldElement {
        self.element(1)
    }

    /// All d elements in canonical ascending order 0, 1, ..., d-1.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.d).map(move |v| self.element(v))
    }
}

/// An element of GF(d). Carries its modulus so cross-field operations are
/// rejected rather than silently mixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u64,
    modulus: u64,
}

impl FieldElement {
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn check_same_field(&self, other: &FieldElement) -> Result<(), FieldError> {
        if self.modulus != other.modulus {
            return Err(FieldError::FieldMismatch(self.modulus, other.modulus));
        }
        Ok(())
    }

    fn lift(&self, value: u64) -> FieldElement {
        FieldElement {
            value,
            modulus: self.modulus,
        }
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check_same_field(other)?;
        Ok(self.lift(add_mod(self.value, other.value, self.modulus)))
    }

    pub fn sub(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check_same_field(other)?;
        Ok(self.lift(sub_mod(self.value, other.value, self.modulus)))
    }

    pub fn mul(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check_same_field(other)?;
        Ok(self.lift(mul_mod(self.value, other.value, self.modulus)))
    }

    pub fn div(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check_same_field(other)?;
        if other.value == 0 {
            return Err(FieldError::DivisionByZero(self.modulus));
        }
        Ok(self.lift(mul_mod(
            self.value,
            inv_mod(other.value, self.modulus),
            self.modulus,
        )))
    }

    pub fn neg(&self) -> FieldElement {
        self.lift(neg_mod(self.value, self.modulus))
    }

    pub fn inv(&self) -> Result<FieldElement, FieldError> {
        if self.value == 0 {
            return Err(FieldError::DivisionByZero(self.modulus));
        }
        Ok(self.lift(inv_mod(self.value, self.modulus)))
    }

    /// Integer powers of either sign; negative exponents go through the
    /// inverse, so they fail on zero.
    pub fn pow(&self, exponent: i64) -> Result<FieldElement, FieldError> {
        if exponent >= 0 {
            Ok(self.lift(pow_mod(self.value, exponent as u64, self.modulus)))
        } else {
            if self.value == 0 {
                return Err(FieldError::DivisionByZero(self.modulus));
            }
            let inv = inv_mod(self.value, self.modulus);
            Ok(self.lift(pow_mod(inv, exponent.unsigned_abs(), self.modulus)))
        }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_composite_modulus() {
        for d in [0u64, 1, 4, 6, 9, 15, 21] {
            assert!(matches!(
                PrimeField::new(d),
                Err(FieldError::CompositeModulus(_))
            ));
        }
    }

    #[test]
    fn smallest_primitive_elements() {
        // d=3 -> alpha=2 is stated in the worked example; d=7 -> 3 checked
        // against the brute-force order search below.
        assert_eq!(PrimeField::new(3).unwrap().alpha(), 2);
        assert_eq!(PrimeField::new(2).unwrap().alpha(), 1);
        assert_eq!(PrimeField::new(7).unwrap().alpha(), 3);
    }

    /// Independent oracle: order of g is the least t >= 1 with g^t = 1,
    /// computed by plain repeated multiplication.
    fn brute_force_order(g: u64, d: u64) -> u64 {
        let mut acc = g % d;
        let mut t = 1;
        while acc != 1 {
            acc = acc * g % d;
            t += 1;
        }
        t
    }

    #[test]
    fn alpha_is_smallest_with_full_order() {
        for d in [2u64, 3, 5, 7, 11, 13, 17, 19, 23] {
            let field = PrimeField::new(d).unwrap();
            let alpha = field.alpha();
            assert_eq!(brute_force_order(alpha, d), d - 1);
            for g in 1..alpha {
                assert_ne!(brute_force_order(g, d), d - 1, "alpha not minimal for d={d}");
            }
        }
    }

    #[test]
    fn alpha_powers_enumerate_nonzero_elements() {
        for d in [2u64, 3, 5, 7, 11, 13] {
            let field = PrimeField::new(d).unwrap();
            let mut seen = vec![false; d as usize];
            let mut acc = 1u64;
            for _ in 0..d - 1 {
                assert!(!seen[acc as usize], "alpha powers repeat early for d={d}");
                seen[acc as usize] = true;
                acc = mul_mod(acc, field.alpha(), d);
            }
            assert!(seen[1..].iter().all(|&s| s));
        }
    }

    #[test]
    fn arithmetic_examples() {
        let gf3 = PrimeField::new(3).unwrap();
        assert_eq!(
            gf3.element(2).add(&gf3.element(2)).unwrap(),
            gf3.element(1)
        );

        let gf5 = PrimeField::new(5).unwrap();
        // inv(2) by exhaustive search: 2*x = 1 mod 5 -> x = 3.
        let inv = (1..5).find(|x| 2 * x % 5 == 1).unwrap();
        assert_eq!(gf5.element(2).inv().unwrap(), gf5.element(inv));
        // alpha^(d-1) = 1.
        assert_eq!(gf5.element(2).pow(4).unwrap(), gf5.one());
    }

    #[test]
    fn negative_exponents_and_division() {
        let gf7 = PrimeField::new(7).unwrap();
        let a = gf7.element(3);
        assert_eq!(a.pow(-1).unwrap(), a.inv().unwrap());
        assert_eq!(
            a.pow(-2).unwrap(),
            a.inv().unwrap().mul(&a.inv().unwrap()).unwrap()
        );
        assert_eq!(a.div(&a).unwrap(), gf7.one());
        assert!(matches!(
            a.div(&gf7.zero()),
            Err(FieldError::DivisionByZero(7))
        ));
        assert!(matches!(
            gf7.zero().pow(-1),
            Err(FieldError::DivisionByZero(7))
        ));
    }

    #[test]
    fn cross_field_operations_rejected() {
        let gf3 = PrimeField::new(3).unwrap();
        let gf5 = PrimeField::new(5).unwrap();
        assert!(matches!(
            gf3.element(1).add(&gf5.element(1)),
            Err(FieldError::FieldMismatch(3, 5))
        ));
    }

    #[test]
    fn field_axioms_exhaustive() {
        for d in [2u64, 3, 5, 7, 11, 13] {
            let field = PrimeField::new(d).unwrap();
            for a in 0..d {
                let ea = field.element(a);
                // identities and inverses
                assert_eq!(ea.add(&field.zero()).unwrap(), ea);
                assert_eq!(ea.mul(&field.one()).unwrap(), ea);
                assert_eq!(ea.add(&ea.neg()).unwrap(), field.zero());
                if a != 0 {
                    assert_eq!(ea.mul(&ea.inv().unwrap()).unwrap(), field.one());
                }
                for b in 0..d {
                    let eb = field.element(b);
                    assert_eq!(ea.add(&eb).unwrap(), eb.add(&ea).unwrap());
                    assert_eq!(ea.mul(&eb).unwrap(), eb.mul(&ea).unwrap());
                    for c in 0..d {
                        let ec = field.element(c);
                        assert_eq!(
                            ea.add(&eb).unwrap().add(&ec).unwrap(),
                            ea.add(&eb.add(&ec).unwrap()).unwrap()
                        );
                        assert_eq!(
                            ea.mul(&eb).unwrap().mul(&ec).unwrap(),
                            ea.mul(&eb.mul(&ec).unwrap()).unwrap()
                        );
                        assert_eq!(
                            ea.mul(&eb.add(&ec).unwrap()).unwrap(),
                            ea.mul(&eb).unwrap().add(&ea.mul(&ec).unwrap()).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn primes_up_to_matches_trial_division() {
        assert_eq!(primes_up_to(23), vec![2, 3, 5, 7, 11, 13, 17, 19, 23]);
        assert!(is_prime(601));
        assert!(!is_prime(600));
    }

    #[test]
    fn nearest_prime_snapping() {
        assert_eq!(nearest_prime(13), 13);
        assert_eq!(nearest_prime(600), 599); // equidistant from 599 and 601
        assert_eq!(nearest_prime(9), 7); // ties resolve downward
        assert_eq!(nearest_prime(1), 2);
        assert_eq!(nearest_prime(0), 2);
    }
}
