//! The affine group `R ⋊ S` with law `(r,s)(r',s') = (r + s·r', s·s')`, and
//! right cosets of `Λ = Z ⋊ {1}`.

use std::fmt;

use num_bigint::BigInt;

use crate::error::{Error, Result};
use crate::sarith::{PrimeSet, SInteger, SUnit};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineElement {
    pub s: SUnit,
    pub r: SInteger,
}

impl AffineElement {
    pub fn new(r: SInteger, s: SUnit) -> Self {
        debug_assert_eq!(r.primes(), s.primes());
        Self { s, r }
    }

    pub fn identity(primes: &PrimeSet) -> Self {
        Self::new(SInteger::zero(primes), SUnit::identity(primes))
    }

    /// Pure translation `(n, 1)`.
    pub fn translation(primes: &PrimeSet, n: i64) -> Self {
        Self::new(SInteger::from_integer(primes, n), SUnit::identity(primes))
    }

    /// Pure dilation `(0, s)`.
    pub fn dilation(s: SUnit) -> Self {
        Self::new(SInteger::zero(s.primes()), s)
    }

    pub fn primes(&self) -> &PrimeSet {
        self.r.primes()
    }

    pub fn mult(&self, other: &AffineElement) -> AffineElement {
        AffineElement::new(&self.r + &other.r.mul_sunit(&self.s), &self.s * &other.s)
    }

    pub fn inverse(&self) -> AffineElement {
        let s_inv = self.s.inv();
        AffineElement::new(-self.r.mul_sunit(&s_inv), s_inv)
    }

    /// `x ↦ r + s·x` on rational points.
    pub fn act(&self, x: &SInteger) -> SInteger {
        &self.r + &x.mul_sunit(&self.s)
    }

    pub fn coset_key(&self) -> CosetKey {
        let k = self.r.mul_sunit(&self.s.inv()).floor();
        let shift = SInteger::from_integer(self.primes(), k).mul_sunit(&self.s);
        CosetKey { s: self.s.clone(), residue: &self.r - &shift }
    }

    /// Parses `(num/den, [n1,...,nl])`.
    pub fn parse(primes: &PrimeSet, text: &str) -> Result<Self> {
        let t = text.trim();
        let inner = t
            .strip_prefix('(')
            .and_then(|t| t.strip_suffix(')'))
            .ok_or_else(|| Error::InvalidArgument(format!("`{t}` is not of the form (r, [n1,...])")))?;
        let (r, s) = inner
            .split_once(',')
            .ok_or_else(|| Error::InvalidArgument(format!("`{t}` is not of the form (r, [n1,...])")))?;
        Ok(Self::new(SInteger::parse(primes, r)?, SUnit::parse(primes, s)?))
    }
}

impl fmt::Display for AffineElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.r, self.s)
    }
}

/// Identifies the right coset `(r,s)Λ = {(r + s·k, s) : k ∈ Z}`.
///
/// `residue` is `r - s·⌊r/s⌋`, the unique representative in `[0, s)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CosetKey {
    pub s: SUnit,
    pub residue: SInteger,
}

impl CosetKey {
    /// Key of `(u,1)·(residue, s)`.
    pub fn shifted(&self, u: i64) -> CosetKey {
        let moved = &self.residue + &SInteger::from_integer(self.s.primes(), BigInt::from(u));
        AffineElement::new(moved, self.s.clone()).coset_key()
    }

    pub fn representative(&self) -> AffineElement {
        AffineElement::new(self.residue.clone(), self.s.clone())
    }
}

impl fmt::Display for CosetKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} + s·Z, {})", self.residue, self.s)
    }
}
