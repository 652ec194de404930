//! Exact values `sum_j q_j log p_j` with rational coefficients.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::sarith::PrimeSet;

/// `sum_j q_j · log p_j`.
///
/// Logarithms of distinct primes are linearly independent over Q, so two
/// values are equal iff their coefficient vectors are.
#[derive(Clone, Debug)]
pub struct SymbolicLogValue {
    primes: PrimeSet,
    coeffs: Vec<BigRational>,
}

impl SymbolicLogValue {
    pub fn zero(primes: &PrimeSet) -> Self {
        Self { primes: primes.clone(), coeffs: vec![BigRational::zero(); primes.len()] }
    }

    pub fn new(primes: &PrimeSet, coeffs: Vec<BigRational>) -> Self {
        assert_eq!(coeffs.len(), primes.len(), "coefficient vector length mismatch");
        Self { primes: primes.clone(), coeffs }
    }

    /// `q · log p_i`.
    pub fn single(primes: &PrimeSet, i: usize, q: BigRational) -> Self {
        let mut v = Self::zero(primes);
        v.coeffs[i] = q;
        v
    }

    pub fn from_integers(primes: &PrimeSet, coeffs: &[i64]) -> Self {
        Self::new(primes, coeffs.iter().map(|&c| BigRational::from_integer(BigInt::from(c))).collect())
    }

    pub fn primes(&self) -> &PrimeSet {
        &self.primes
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Double-precision rendering of `sum q_j ln p_j`.
    pub fn to_f64(&self) -> f64 {
        self.coeffs
            .iter()
            .zip(self.primes.iter())
            .map(|(q, p)| rational_to_f64(q) * (p as f64).ln())
            .sum()
    }

    pub fn scale(&self, t: &BigRational) -> Self {
        Self { primes: self.primes.clone(), coeffs: self.coeffs.iter().map(|q| q * t).collect() }
    }

    /// The coefficient vector as `[q1,...,ql]`.
    pub fn coeff_string(&self) -> String {
        let parts: Vec<String> = self.coeffs.iter().map(ToString::to_string).collect();
        format!("[{}]", parts.join(","))
    }
}

pub fn rational_to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // Fall back through the integer parts for huge numerators/denominators.
        let n = q.numer().to_f64().unwrap_or(f64::INFINITY);
        let d = q.denom().to_f64().unwrap_or(f64::INFINITY);
        n / d
    })
}

impl PartialEq for SymbolicLogValue {
    fn eq(&self, other: &Self) -> bool {
        self.coeffs == other.coeffs && self.primes == other.primes
    }
}

impl Eq for SymbolicLogValue {}

impl std::hash::Hash for SymbolicLogValue {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl<'a> std::ops::Add<&'a SymbolicLogValue> for &'a SymbolicLogValue {
    type Output = SymbolicLogValue;

    fn add(self, rhs: &'a SymbolicLogValue) -> SymbolicLogValue {
        debug_assert_eq!(self.primes, rhs.primes);
        SymbolicLogValue {
            primes: self.primes.clone(),
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl std::ops::Neg for &SymbolicLogValue {
    type Output = SymbolicLogValue;

    fn neg(self) -> SymbolicLogValue {
        SymbolicLogValue { primes: self.primes.clone(), coeffs: self.coeffs.iter().map(|q| -q).collect() }
    }
}

impl fmt::Display for SymbolicLogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut wrote = false;
        for (q, p) in self.coeffs.iter().zip(self.primes.iter()) {
            if q.is_zero() {
                continue;
            }
            if wrote {
                write!(f, " {} ", if q.is_negative() { '-' } else { '+' })?;
                write!(f, "{}·log {p}", q.abs())?;
            } else {
                write!(f, "{q}·log {p}")?;
            }
            wrote = true;
        }
        if !wrote {
            write!(f, "0")?;
        }
        Ok(())
    }
}
