//! Exact arithmetic in `Z[1/p1, ..., 1/pl]` and its unit group `S`.
//!
//! Every [`SInteger`] is held in canonical form: a unit part coprime to all
//! primes of the set, plus an exponent vector. Valuations are read off the
//! exponent vector, and equality is structural.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::logval::SymbolicLogValue;

/// Ordered set of distinct primes `p1 < ... < pl`.
#[derive(Clone, Debug)]
pub struct PrimeSet {
    primes: Arc<[u64]>,
}

impl PrimeSet {
    pub fn new(primes: impl Into<Vec<u64>>) -> Result<Self> {
        let primes: Vec<u64> = primes.into();
        if primes.is_empty() {
            return Err(Error::InvalidPrimeSet("at least one prime is required".into()));
        }
        for &p in &primes {
            if !is_prime(p) {
                return Err(Error::InvalidPrimeSet(format!("{p} is not prime")));
            }
        }
        for w in primes.windows(2) {
            match w[0].cmp(&w[1]) {
                Ordering::Less => {}
                Ordering::Equal => {
                    return Err(Error::InvalidPrimeSet(format!("duplicate prime {}", w[0])))
                }
                Ordering::Greater => {
                    return Err(Error::InvalidPrimeSet(format!(
                        "primes must be sorted ascending ({} before {})",
                        w[0], w[1]
                    )))
                }
            }
        }
        Ok(Self { primes: primes.into() })
    }

    /// Parses a comma separated list such as `2,3,5`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim().trim_start_matches('[').trim_end_matches(']');
        let primes = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::InvalidPrimeSet(format!("`{}` is not an integer", t.trim())))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(primes)
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn prime(&self, i: usize) -> u64 {
        self.primes[i]
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.primes
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.primes.iter().copied()
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i < self.len() {
            Ok(())
        } else {
            Err(Error::PrimeIndex { index: i, len: self.len() })
        }
    }

    /// `prod p_i^{|e_i|}` over the indices where `sign * e_i > 0`.
    fn positive_part(&self, exps: &[i64], sign: i64) -> BigUint {
        self.iter()
            .zip(exps)
            .filter(|(_, &e)| e * sign > 0)
            .map(|(p, &e)| BigUint::from(p).pow((e * sign) as u32))
            .product()
    }
}

impl PartialEq for PrimeSet {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.primes, &other.primes) || self.primes == other.primes
    }
}

impl Eq for PrimeSet {}

impl fmt::Display for PrimeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, p) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "]")
    }
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// p-adic valuation; zero has valuation `Infinite`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

impl PartialOrd for Valuation {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Valuation {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => a.cmp(b),
            (Valuation::Finite(_), Valuation::Infinite) => Ordering::Less,
            (Valuation::Infinite, Valuation::Finite(_)) => Ordering::Greater,
            (Valuation::Infinite, Valuation::Infinite) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

/// Removes every factor `p` from `n`, returning the count.
pub(crate) fn strip_prime(n: &mut BigInt, p: u64) -> i64 {
    if n.is_zero() {
        return 0;
    }
    let p = BigInt::from(p);
    let mut count = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return count;
        }
        *n = q;
        count += 1;
    }
}

/// Element of `Z[1/p1, ..., 1/pl]`: `unit * prod p_i^{exps_i}`.
#[derive(Clone, Debug)]
pub struct SInteger {
    primes: PrimeSet,
    unit: BigInt,
    exps: Vec<i64>,
}

impl SInteger {
    /// Builds `unit * prod p_i^{exps_i}` and canonicalizes.
    pub fn from_parts(primes: &PrimeSet, unit: BigInt, exps: Vec<i64>) -> Self {
        assert_eq!(exps.len(), primes.len(), "exponent vector length mismatch");
        let mut x = Self { primes: primes.clone(), unit, exps };
        x.canonicalize();
        x
    }

    pub fn zero(primes: &PrimeSet) -> Self {
        Self { primes: primes.clone(), unit: BigInt::zero(), exps: vec![0; primes.len()] }
    }

    pub fn one(primes: &PrimeSet) -> Self {
        Self::from_integer(primes, 1)
    }

    pub fn from_integer(primes: &PrimeSet, n: impl Into<BigInt>) -> Self {
        Self::from_parts(primes, n.into(), vec![0; primes.len()])
    }

    /// `num/den`; fails when `den` has a prime factor outside the set.
    pub fn from_ratio(primes: &PrimeSet, num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        let mut num = num.into();
        let mut den = den.into();
        if den.is_zero() {
            return Err(Error::NotSInteger(format!("{num}/0")));
        }
        let g = num.gcd(&den);
        if !g.is_zero() && !g.is_one() {
            num /= &g;
            den /= &g;
        }
        let mut exps = vec![0i64; primes.len()];
        for (i, p) in primes.iter().enumerate() {
            exps[i] = -strip_prime(&mut den, p);
        }
        if !den.abs().is_one() {
            return Err(Error::NotSInteger(format!("{num}/{den}")));
        }
        Ok(Self::from_parts(primes, num * den.signum(), exps))
    }

    pub fn from_rational(primes: &PrimeSet, q: &BigRational) -> Result<Self> {
        Self::from_ratio(primes, q.numer().clone(), q.denom().clone())
    }

    /// Parses `num/den` or `n`.
    pub fn parse(primes: &PrimeSet, s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidArgument(format!("`{s}` is not a rational number"));
        match s.split_once('/') {
            Some((n, d)) => {
                let n: BigInt = n.trim().parse().map_err(|_| bad())?;
                let d: BigInt = d.trim().parse().map_err(|_| bad())?;
                Self::from_ratio(primes, n, d)
            }
            None => Ok(Self::from_integer(primes, s.parse::<BigInt>().map_err(|_| bad())?)),
        }
    }

    fn canonicalize(&mut self) {
        if self.unit.is_zero() {
            self.exps.iter_mut().for_each(|e| *e = 0);
            return;
        }
        if let Ok(mut small) = i128::try_from(&self.unit) {
            for (i, p) in self.primes.iter().enumerate() {
                let p = p as i128;
                while small % p == 0 {
                    small /= p;
                    self.exps[i] += 1;
                }
            }
            self.unit = BigInt::from(small);
            return;
        }
        for (i, p) in self.primes.clone().iter().enumerate() {
            self.exps[i] += strip_prime(&mut self.unit, p);
        }
    }

    pub fn primes(&self) -> &PrimeSet {
        &self.primes
    }

    pub fn unit(&self) -> &BigInt {
        &self.unit
    }

    pub fn exps(&self) -> &[i64] {
        &self.exps
    }

    pub fn is_zero(&self) -> bool {
        self.unit.is_zero()
    }

    pub fn valuation(&self, i: usize) -> Valuation {
        if self.is_zero() {
            Valuation::Infinite
        } else {
            Valuation::Finite(self.exps[i])
        }
    }

    /// Smallest valuation over all primes (`Infinite` for zero).
    pub fn min_valuation(&self) -> Valuation {
        (0..self.primes.len()).map(|i| self.valuation(i)).min().unwrap_or(Valuation::Infinite)
    }

    pub fn numer_denom(&self) -> (BigInt, BigInt) {
        let num = &self.unit * BigInt::from(self.primes.positive_part(&self.exps, 1));
        let den = BigInt::from(self.primes.positive_part(&self.exps, -1));
        (num, den)
    }

    pub fn to_rational(&self) -> BigRational {
        let (n, d) = self.numer_denom();
        BigRational::new_raw(n, d)
    }

    pub fn is_integer(&self) -> bool {
        self.exps.iter().all(|&e| e >= 0)
    }

    pub fn to_integer(&self) -> Option<BigInt> {
        self.is_integer().then(|| self.numer_denom().0)
    }

    pub fn floor(&self) -> BigInt {
        let (n, d) = self.numer_denom();
        n.div_floor(&d)
    }

    pub fn mul_sunit(&self, s: &SUnit) -> SInteger {
        if self.is_zero() {
            return self.clone();
        }
        let exps = self.exps.iter().zip(&s.exps).map(|(a, b)| a + b).collect();
        Self { primes: self.primes.clone(), unit: self.unit.clone(), exps }
    }

    /// Multiplicative inverse; defined only for S-units `±prod p_i^{n_i}`.
    pub fn inv(&self) -> Result<SInteger> {
        if self.is_zero() {
            return Err(Error::NotSUnit { value: "0".into(), factor: "0".into() });
        }
        if !self.unit.abs().is_one() {
            return Err(Error::NotSUnit {
                value: self.to_string(),
                factor: smallest_factor(&self.unit.abs()),
            });
        }
        Ok(Self {
            primes: self.primes.clone(),
            unit: self.unit.clone(),
            exps: self.exps.iter().map(|e| -e).collect(),
        })
    }

    fn check_same(&self, other: &Self) {
        debug_assert_eq!(self.primes, other.primes, "mixed prime sets");
    }
}

/// Smallest prime factor by trial division up to 10^6, else the cofactor itself.
fn smallest_factor(n: &BigInt) -> String {
    let mut d = 2u64;
    while d < 1_000_000 {
        let bd = BigInt::from(d);
        if &bd * &bd > *n {
            break;
        }
        if (n % &bd).is_zero() {
            return d.to_string();
        }
        d += 1;
    }
    n.to_string()
}

impl PartialEq for SInteger {
    fn eq(&self, other: &Self) -> bool {
        self.unit == other.unit && self.exps == other.exps && self.primes == other.primes
    }
}

impl Eq for SInteger {}

impl Hash for SInteger {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.unit.hash(state);
        self.exps.hash(state);
    }
}

impl PartialOrd for SInteger {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Numeric order of the represented rationals.
impl Ord for SInteger {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        let (sa, sb) = (self.unit.sign(), other.unit.sign());
        if sa != sb || sa == Sign::NoSign {
            return sa.cmp(&sb);
        }
        // Both sides times the same positive p-power: compare integers.
        let base: Vec<i64> = self.exps.iter().zip(&other.exps).map(|(a, b)| *a.min(b)).collect();
        match (self.lift_small(&base), other.lift_small(&base)) {
            (Some(a), Some(b)) => a.cmp(&b),
            _ => self.lift(&base).cmp(&other.lift(&base)),
        }
    }
}

impl SInteger {
    /// `unit·prod p_i^{exps_i - base_i}` for `base ≤ exps`.
    fn lift(&self, base: &[i64]) -> BigInt {
        if let Some(small) = self.lift_small(base) {
            return BigInt::from(small);
        }
        let shift: Vec<i64> = self.exps.iter().zip(base).map(|(e, m)| e - m).collect();
        &self.unit * BigInt::from(self.primes.positive_part(&shift, 1))
    }

    fn lift_small(&self, base: &[i64]) -> Option<i128> {
        let mut acc = i128::try_from(&self.unit).ok()?;
        for ((e, m), p) in self.exps.iter().zip(base).zip(self.primes.iter()) {
            let k = u32::try_from(e - m).ok()?;
            acc = acc.checked_mul((p as i128).checked_pow(k)?)?;
        }
        Some(acc)
    }
}

impl<'a> std::ops::Add<&'a SInteger> for &'a SInteger {
    type Output = SInteger;

    fn add(self, rhs: &'a SInteger) -> SInteger {
        self.check_same(rhs);
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let base: Vec<i64> = self.exps.iter().zip(&rhs.exps).map(|(a, b)| *a.min(b)).collect();
        let sum = self.lift(&base) + rhs.lift(&base);
        SInteger::from_parts(&self.primes, sum, base)
    }
}

impl<'a> std::ops::Sub<&'a SInteger> for &'a SInteger {
    type Output = SInteger;

    fn sub(self, rhs: &'a SInteger) -> SInteger {
        self + &(-rhs)
    }
}

impl<'a> std::ops::Mul<&'a SInteger> for &'a SInteger {
    type Output = SInteger;

    fn mul(self, rhs: &'a SInteger) -> SInteger {
        self.check_same(rhs);
        if self.is_zero() || rhs.is_zero() {
            return SInteger::zero(&self.primes);
        }
        // Product of units coprime to every p_i stays coprime: no re-stripping.
        SInteger {
            primes: self.primes.clone(),
            unit: &self.unit * &rhs.unit,
            exps: self.exps.iter().zip(&rhs.exps).map(|(a, b)| a + b).collect(),
        }
    }
}

impl std::ops::Neg for &SInteger {
    type Output = SInteger;

    fn neg(self) -> SInteger {
        SInteger { primes: self.primes.clone(), unit: -&self.unit, exps: self.exps.clone() }
    }
}

impl std::ops::Neg for SInteger {
    type Output = SInteger;

    fn neg(self) -> SInteger {
        -&self
    }
}

impl fmt::Display for SInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (n, d) = self.numer_denom();
        if d.is_one() {
            write!(f, "{n}")
        } else {
            write!(f, "{n}/{d}")
        }
    }
}

/// Element `prod p_i^{n_i}` of the dilation group `S`, stored as its exponent vector.
#[derive(Clone, Debug)]
pub struct SUnit {
    primes: PrimeSet,
    exps: Vec<i64>,
}

impl SUnit {
    pub fn new(primes: &PrimeSet, exps: Vec<i64>) -> Self {
        assert_eq!(exps.len(), primes.len(), "exponent vector length mismatch");
        Self { primes: primes.clone(), exps }
    }

    pub fn identity(primes: &PrimeSet) -> Self {
        Self::new(primes, vec![0; primes.len()])
    }

    /// `p_i^{power}`.
    pub fn prime_power(primes: &PrimeSet, i: usize, power: i64) -> Self {
        let mut exps = vec![0; primes.len()];
        exps[i] = power;
        Self::new(primes, exps)
    }

    /// Parses the bracketed exponent form `[n1,...,nl]`.
    pub fn parse(primes: &PrimeSet, s: &str) -> Result<Self> {
        let t = s.trim();
        let inner = t
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| Error::InvalidArgument(format!("`{t}` is not a bracketed exponent vector")))?;
        let exps = inner
            .split(',')
            .map(|e| {
                e.trim()
                    .parse::<i64>()
                    .map_err(|_| Error::InvalidArgument(format!("`{}` is not an integer exponent", e.trim())))
            })
            .collect::<Result<Vec<_>>>()?;
        if exps.len() != primes.len() {
            return Err(Error::InvalidArgument(format!(
                "exponent vector `{t}` has {} entries, expected {}",
                exps.len(),
                primes.len()
            )));
        }
        Ok(Self::new(primes, exps))
    }

    pub fn primes(&self) -> &PrimeSet {
        &self.primes
    }

    pub fn exps(&self) -> &[i64] {
        &self.exps
    }

    pub fn is_identity(&self) -> bool {
        self.exps.iter().all(|&e| e == 0)
    }

    pub fn inv(&self) -> SUnit {
        Self { primes: self.primes.clone(), exps: self.exps.iter().map(|e| -e).collect() }
    }

    /// `log ||s||_{p_i} = -n_i log p_i`.
    pub fn norm_log(&self, i: usize) -> SymbolicLogValue {
        SymbolicLogValue::single(&self.primes, i, BigRational::from_integer(BigInt::from(-self.exps[i])))
    }

    pub fn to_sinteger(&self) -> SInteger {
        SInteger::from_parts(&self.primes, BigInt::one(), self.exps.clone())
    }

    /// `prod p_i^{max(n_i, 0)}`: the index `[Z : sZ ∩ Z]`.
    pub fn s_plus(&self) -> BigUint {
        self.primes.positive_part(&self.exps, 1)
    }

    /// `prod p_i^{max(-n_i, 0)}`.
    pub fn s_minus(&self) -> BigUint {
        self.primes.positive_part(&self.exps, -1)
    }
}

impl PartialEq for SUnit {
    fn eq(&self, other: &Self) -> bool {
        self.exps == other.exps && self.primes == other.primes
    }
}

impl Eq for SUnit {}

impl Hash for SUnit {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.exps.hash(state);
    }
}

impl PartialOrd for SUnit {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic order on exponent vectors.
impl Ord for SUnit {
    fn cmp(&self, other: &Self) -> Ordering {
        self.exps.cmp(&other.exps)
    }
}

impl<'a> std::ops::Mul<&'a SUnit> for &'a SUnit {
    type Output = SUnit;

    fn mul(self, rhs: &'a SUnit) -> SUnit {
        debug_assert_eq!(self.primes, rhs.primes, "mixed prime sets");
        SUnit {
            primes: self.primes.clone(),
            exps: self.exps.iter().zip(&rhs.exps).map(|(a, b)| a + b).collect(),
        }
    }
}

impl fmt::Display for SUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, e) in self.exps.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "]")
    }
}
