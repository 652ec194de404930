//! Finite-precision p-adic numbers, Haar balls, and the affine action on `Q_p`.
//!
//! A non-zero [`PAdicApprox`] is `p^v · u` with `u` a unit known modulo
//! `p^M` (`M` relative digits); it is therefore known modulo `p^{v+M}`.
//! Anything that vanishes at the available precision becomes the tagged
//! zero-to-precision marker `ZeroTo(A)`, meaning "≡ 0 mod p^A".

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::group::AffineElement;
use crate::logval::SymbolicLogValue;
use crate::sarith::{PrimeSet, SInteger, SUnit};

pub const DEFAULT_PRECISION: u32 = 64;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PAdicRepr {
    Nonzero { valuation: i64, unit: BigUint, precision: u32 },
    ZeroTo(i64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PAdicApprox {
    prime: u64,
    repr: PAdicRepr,
}

fn modulus(p: u64, k: u32) -> BigUint {
    BigUint::from(p).pow(k)
}

/// `a^{-1} mod m` for `gcd(a, m) = 1`.
fn mod_inverse(a: &BigUint, m: &BigUint) -> BigUint {
    let a = BigInt::from(a.clone());
    let m = BigInt::from(m.clone());
    let eg = a.extended_gcd(&m);
    debug_assert!(eg.gcd.is_one(), "not invertible");
    eg.x.mod_floor(&m).to_biguint().expect("non-negative after mod_floor")
}

/// `x mod m` for a signed `x`.
fn reduce(x: &BigInt, m: &BigUint) -> BigUint {
    x.mod_floor(&BigInt::from(m.clone())).to_biguint().expect("non-negative after mod_floor")
}

impl PAdicApprox {
    pub fn zero_to(prime: u64, bound: i64) -> Self {
        Self { prime, repr: PAdicRepr::ZeroTo(bound) }
    }

    /// `p^valuation · unit`; strips any factors of `p` out of `unit` first.
    pub fn new(prime: u64, valuation: i64, unit: BigUint, precision: u32) -> Self {
        Self::normalize(prime, valuation, unit, valuation + precision as i64)
    }

    /// Builds from `p^base · raw` known modulo `p^abs`.
    fn normalize(prime: u64, base: i64, raw: BigUint, abs: i64) -> Self {
        if abs <= base {
            return Self::zero_to(prime, abs);
        }
        let mut raw = raw % modulus(prime, (abs - base) as u32);
        if raw.is_zero() {
            return Self::zero_to(prime, abs);
        }
        let p = BigUint::from(prime);
        let mut v = base;
        while (&raw % &p).is_zero() {
            raw /= &p;
            v += 1;
        }
        Self { prime, repr: PAdicRepr::Nonzero { valuation: v, unit: raw, precision: (abs - v) as u32 } }
    }

    /// Expansion of `x` in `Q_{p_i}` with `precision` relative digits.
    pub fn from_sinteger(x: &SInteger, i: usize, precision: u32) -> Self {
        match x.valuation(i).finite() {
            None => Self::zero_to(x.primes().prime(i), precision as i64),
            Some(v) => Self::from_sinteger_abs(x, i, v + precision as i64),
        }
    }

    /// Expansion of `x` in `Q_{p_i}` known modulo `p_i^abs`.
    pub fn from_sinteger_abs(x: &SInteger, i: usize, abs: i64) -> Self {
        let primes = x.primes();
        let p = primes.prime(i);
        let v = match x.valuation(i).finite() {
            None => return Self::zero_to(p, abs),
            Some(v) if v >= abs => return Self::zero_to(p, abs),
            Some(v) => v,
        };
        let m = modulus(p, (abs - v) as u32);
        let (num, den) = other_prime_parts(primes, x.exps(), i);
        let num = reduce(&(x.unit() * BigInt::from(num)), &m);
        let unit = (num * mod_inverse(&(den % &m), &m)) % &m;
        Self { prime: p, repr: PAdicRepr::Nonzero { valuation: v, unit, precision: (abs - v) as u32 } }
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn repr(&self) -> &PAdicRepr {
        &self.repr
    }

    pub fn is_zero_marker(&self) -> bool {
        matches!(self.repr, PAdicRepr::ZeroTo(_))
    }

    /// Exact valuation, unknown (`None`) for the zero marker.
    pub fn valuation(&self) -> Option<i64> {
        match self.repr {
            PAdicRepr::Nonzero { valuation, .. } => Some(valuation),
            PAdicRepr::ZeroTo(_) => None,
        }
    }

    /// Certified lower bound on the valuation.
    pub fn valuation_lower_bound(&self) -> i64 {
        match self.repr {
            PAdicRepr::Nonzero { valuation, .. } => valuation,
            PAdicRepr::ZeroTo(b) => b,
        }
    }

    /// Relative digits (0 for the zero marker).
    pub fn precision(&self) -> u32 {
        match self.repr {
            PAdicRepr::Nonzero { precision, .. } => precision,
            PAdicRepr::ZeroTo(_) => 0,
        }
    }

    /// The value is known modulo `p^abs_precision`.
    pub fn abs_precision(&self) -> i64 {
        match self.repr {
            PAdicRepr::Nonzero { valuation, precision, .. } => valuation + precision as i64,
            PAdicRepr::ZeroTo(b) => b,
        }
    }

    /// Little-endian base-p digits of the unit part.
    pub fn digits(&self) -> Vec<u64> {
        match &self.repr {
            PAdicRepr::ZeroTo(_) => Vec::new(),
            PAdicRepr::Nonzero { unit, precision, .. } => {
                let p = BigUint::from(self.prime);
                let mut u = unit.clone();
                (0..*precision)
                    .map(|_| {
                        let (q, r) = u.div_rem(&p);
                        u = q;
                        r.to_u64().expect("digit below p")
                    })
                    .collect()
            }
        }
    }

    /// Lowers the absolute precision to `abs` (no-op if already lower).
    pub fn truncate_abs(&self, abs: i64) -> Self {
        if abs >= self.abs_precision() {
            return self.clone();
        }
        match &self.repr {
            PAdicRepr::ZeroTo(_) => Self::zero_to(self.prime, abs),
            PAdicRepr::Nonzero { valuation, unit, .. } => Self::normalize(self.prime, *valuation, unit.clone(), abs),
        }
    }

    /// Keeps at most `precision` relative digits.
    pub fn truncate(&self, precision: u32) -> Self {
        match self.repr {
            PAdicRepr::Nonzero { valuation, .. } => self.truncate_abs(valuation + precision as i64),
            PAdicRepr::ZeroTo(_) => self.clone(),
        }
    }

    /// `raw` with `self = p^base · raw`, truncated below `p^abs` by the caller.
    fn lift_to(&self, base: i64, abs: i64) -> BigUint {
        match &self.repr {
            PAdicRepr::ZeroTo(_) => BigUint::zero(),
            PAdicRepr::Nonzero { valuation, unit, .. } => {
                if *valuation >= abs {
                    BigUint::zero()
                } else {
                    unit * modulus(self.prime, (valuation - base) as u32)
                }
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.prime, other.prime, "mixed primes");
        let abs = self.abs_precision().min(other.abs_precision());
        let base = self.valuation_lower_bound().min(other.valuation_lower_bound()).min(abs);
        let raw = self.lift_to(base, abs) + other.lift_to(base, abs);
        Self::normalize(self.prime, base, raw, abs)
    }

    pub fn neg(&self) -> Self {
        match &self.repr {
            PAdicRepr::ZeroTo(_) => self.clone(),
            PAdicRepr::Nonzero { valuation, unit, precision } => {
                let m = modulus(self.prime, *precision);
                Self {
                    prime: self.prime,
                    repr: PAdicRepr::Nonzero { valuation: *valuation, unit: &m - unit, precision: *precision },
                }
            }
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.prime, other.prime, "mixed primes");
        match (&self.repr, &other.repr) {
            (
                PAdicRepr::Nonzero { valuation: va, unit: ua, precision: pa },
                PAdicRepr::Nonzero { valuation: vb, unit: ub, precision: pb },
            ) => {
                let prec = (*pa).min(*pb);
                let unit = (ua * ub) % modulus(self.prime, prec);
                Self { prime: self.prime, repr: PAdicRepr::Nonzero { valuation: va + vb, unit, precision: prec } }
            }
            // 0(p^A)·p^v u = 0(p^{A+v}); a zero times a zero-marker is bounded by both bounds.
            (PAdicRepr::ZeroTo(a), PAdicRepr::Nonzero { valuation, .. })
            | (PAdicRepr::Nonzero { valuation, .. }, PAdicRepr::ZeroTo(a)) => {
                Self::zero_to(self.prime, a + valuation)
            }
            (PAdicRepr::ZeroTo(a), PAdicRepr::ZeroTo(b)) => Self::zero_to(self.prime, a + b),
        }
    }

    /// Exact multiplication by an S-unit, viewed in `Q_{p_i}`.
    pub fn mul_sunit(&self, s: &SUnit, i: usize) -> Self {
        debug_assert_eq!(s.primes().prime(i), self.prime);
        let shift = s.exps()[i];
        match &self.repr {
            PAdicRepr::ZeroTo(b) => Self::zero_to(self.prime, b + shift),
            PAdicRepr::Nonzero { valuation, unit, precision } => {
                let m = modulus(self.prime, *precision);
                let (num, den) = other_prime_parts(s.primes(), s.exps(), i);
                let factor = (num % &m) * mod_inverse(&(den % &m), &m);
                Self {
                    prime: self.prime,
                    repr: PAdicRepr::Nonzero {
                        valuation: valuation + shift,
                        unit: (unit * factor) % &m,
                        precision: *precision,
                    },
                }
            }
        }
    }

    /// Residue of the value modulo `p^k` when it is in `Z_p` and known well enough.
    pub fn residue_mod(&self, k: u32) -> Option<BigUint> {
        if self.abs_precision() < k as i64 {
            return None;
        }
        match &self.repr {
            PAdicRepr::ZeroTo(_) => Some(BigUint::zero()),
            PAdicRepr::Nonzero { valuation, unit, .. } => {
                if *valuation < 0 {
                    None
                } else if *valuation >= k as i64 {
                    Some(BigUint::zero())
                } else {
                    Some((unit * modulus(self.prime, *valuation as u32)) % modulus(self.prime, k))
                }
            }
        }
    }

    /// Parses the textual form produced by `Display`.
    pub fn parse(text: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("`{text}` is not of the form p-adic(p, v, digits)"));
        let inner = text.trim().strip_prefix("p-adic(").and_then(|t| t.strip_suffix(')')).ok_or_else(bad)?;
        let parts: Vec<&str> = inner.splitn(3, ',').map(str::trim).collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let p: u64 = parts[0].parse().map_err(|_| bad())?;
        if let Some(bound) = parts[1].strip_prefix(">=") {
            return Ok(Self::zero_to(p, bound.parse().map_err(|_| bad())?));
        }
        let v: i64 = parts[1].parse().map_err(|_| bad())?;
        let digits: Vec<u64> = if p <= 36 {
            parts[2].chars().map(|c| c.to_digit(36).map(u64::from).ok_or_else(bad)).collect::<Result<_>>()?
        } else {
            parts[2].split('.').map(|d| d.parse().map_err(|_| bad())).collect::<Result<_>>()?
        };
        if digits.iter().any(|&d| d >= p) || digits.first().is_none_or(|&d| d == 0) {
            return Err(bad());
        }
        let unit = digits.iter().rev().fold(BigUint::zero(), |acc, &d| acc * p + d);
        Ok(Self { prime: p, repr: PAdicRepr::Nonzero { valuation: v, unit, precision: digits.len() as u32 } })
    }
}

/// `(num, den)` with `num/den = prod_{k≠i} p_k^{e_k}`.
fn other_prime_parts(primes: &PrimeSet, exps: &[i64], i: usize) -> (BigUint, BigUint) {
    let mut num = BigUint::one();
    let mut den = BigUint::one();
    for (k, (p, &e)) in primes.iter().zip(exps).enumerate() {
        if k == i || e == 0 {
            continue;
        }
        let pw = BigUint::from(p).pow(e.unsigned_abs() as u32);
        if e > 0 {
            num *= pw;
        } else {
            den *= pw;
        }
    }
    (num, den)
}

impl fmt::Display for PAdicApprox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            PAdicRepr::ZeroTo(b) => write!(f, "p-adic({}, >={b}, 0)", self.prime),
            PAdicRepr::Nonzero { valuation, .. } => {
                let digits = self.digits();
                let body: String = if self.prime <= 36 {
                    digits.iter().map(|&d| std::char::from_digit(d as u32, 36).unwrap_or('?')).collect()
                } else {
                    digits.iter().map(u64::to_string).collect::<Vec<_>>().join(".")
                };
                write!(f, "p-adic({}, {valuation}, {body})", self.prime)
            }
        }
    }
}

/// `x ↦ r + s·x` in `Q_{p_i}`, to the precision `x` supports after scaling.
pub fn affine_apply(g: &AffineElement, x: &PAdicApprox, i: usize) -> PAdicApprox {
    let sx = x.mul_sunit(&g.s, i);
    let r = PAdicApprox::from_sinteger_abs(&g.r, i, sx.abs_precision());
    r.add(&sx)
}

/// Information-function value `-log |s|_{p_i} = n_i·log p_i` of the
/// Radon–Nikodym derivative `d(r,s)^{-1}m / dm` for Haar `m` on `Q_{p_i}`.
pub fn rn_derivative_log(g: &AffineElement, i: usize) -> SymbolicLogValue {
    -&g.s.norm_log(i)
}

/// The ball `center + p^m Z_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PAdicBall {
    pub prime: u64,
    pub center: PAdicApprox,
    pub radius_exponent: i64,
}

impl PAdicBall {
    pub fn new(center: PAdicApprox, radius_exponent: i64) -> Self {
        Self { prime: center.prime(), center, radius_exponent }
    }

    /// The center must be known at least to the ball's resolution.
    pub fn is_resolved(&self) -> bool {
        self.center.abs_precision() >= self.radius_exponent
    }

    /// `Some(true/false)` when decidable at the available precision.
    pub fn contains(&self, x: &PAdicApprox) -> Option<bool> {
        let d = x.sub(&self.center);
        if d.valuation_lower_bound() >= self.radius_exponent {
            Some(true)
        } else if d.valuation().is_some() {
            Some(false)
        } else {
            None
        }
    }

    /// `g·B = (r + s·center) + p^{m + n_i} Z_p`.
    pub fn image(&self, g: &AffineElement, i: usize) -> PAdicBall {
        let shift = g.s.exps()[i];
        let center = affine_apply(g, &self.center, i).truncate_abs(self.radius_exponent + shift);
        PAdicBall { prime: self.prime, center, radius_exponent: self.radius_exponent + shift }
    }
}

/// Haar mass `p^{-m}` with `m(Z_p) = 1`.
pub fn ball_mass(b: &PAdicBall) -> BigRational {
    let p = BigInt::from(b.prime);
    let pw = p.pow(b.radius_exponent.unsigned_abs() as u32);
    if b.radius_exponent >= 0 {
        BigRational::new(BigInt::one(), pw)
    } else {
        BigRational::from_integer(pw)
    }
}

/// Haar-uniform element of `Z_p` from `precision` random digits.
pub fn uniform_zp(prime: u64, precision: u32, mut digit: impl FnMut() -> u64) -> PAdicApprox {
    let raw = (0..precision).fold((BigUint::zero(), BigUint::one()), |(acc, pw), _| {
        let d = digit() % prime;
        (acc + &pw * d, pw * prime)
    });
    PAdicApprox::normalize(prime, 0, raw.0, precision as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ps(p: &[u64]) -> PrimeSet {
        PrimeSet::new(p.to_vec()).unwrap()
    }

    fn digits_str(x: &PAdicApprox) -> String {
        x.digits().iter().map(|d| d.to_string()).collect()
    }

    #[test]
    fn from_sinteger_examples() {
        let p2 = ps(&[2]);
        let m1 = PAdicApprox::from_sinteger(&SInteger::from_integer(&p2, -1), 0, 8);
        assert_eq!(m1.valuation(), Some(0));
        assert_eq!(digits_str(&m1), "11111111");
        assert_eq!(m1.to_string(), "p-adic(2, 0, 11111111)");

        let q = PAdicApprox::from_sinteger(&SInteger::parse(&p2, "3/4").unwrap(), 0, 4);
        assert_eq!(q.valuation(), Some(-2));
        assert_eq!(digits_str(&q), "1100");

        let p3 = ps(&[3]);
        let six = PAdicApprox::from_sinteger(&SInteger::from_integer(&p3, 6), 0, 4);
        assert_eq!(six.valuation(), Some(1));
        assert_eq!(digits_str(&six), "2000");

        // 1/3 in Q_2 = ...0101011 (3 · 1/3 = 1).
        let p23 = ps(&[2, 3]);
        let third = PAdicApprox::from_sinteger(&SInteger::parse(&p23, "1/3").unwrap(), 0, 8);
        let three = PAdicApprox::from_sinteger(&SInteger::from_integer(&p23, 3), 0, 8);
        assert_eq!(third.mul(&three), PAdicApprox::from_sinteger(&SInteger::one(&p23), 0, 8));
        assert!(PAdicApprox::from_sinteger(&SInteger::zero(&p23), 1, 5).is_zero_marker());
    }

    #[test]
    fn affine_apply_examples() {
        let p2 = ps(&[2]);
        let x = PAdicApprox::from_sinteger(&SInteger::from_integer(&p2, 5), 0, 16);
        let doubled = affine_apply(&AffineElement::dilation(SUnit::new(&p2, vec![1])), &x, 0);
        assert_eq!(doubled.valuation(), Some(1));
        let zero = PAdicApprox::zero_to(2, 16);
        let one = affine_apply(&AffineElement::translation(&p2, 1), &zero, 0);
        assert_eq!(one, PAdicApprox::from_sinteger(&SInteger::one(&p2), 0, 16));
    }

    #[test]
    fn rn_derivative_examples() {
        let p23 = ps(&[2, 3]);
        let g = AffineElement::dilation(SUnit::new(&p23, vec![1, 0]));
        assert_eq!(rn_derivative_log(&g, 0), SymbolicLogValue::from_integers(&p23, &[1, 0]));
        assert!(rn_derivative_log(&AffineElement::translation(&p23, 5), 0).is_zero());
        let g = AffineElement::dilation(SUnit::new(&p23, vec![3, -1]));
        assert_eq!(rn_derivative_log(&g, 1), SymbolicLogValue::from_integers(&p23, &[0, -1]));
    }

    #[test]
    fn ball_mass_examples() {
        let zp = PAdicBall::new(PAdicApprox::zero_to(2, 8), 0);
        assert_eq!(ball_mass(&zp), BigRational::one());
        let two_zp = PAdicBall::new(PAdicApprox::zero_to(2, 8), 1);
        assert_eq!(ball_mass(&two_zp), BigRational::new(1.into(), 2.into()));
        assert_eq!(ball_mass(&PAdicBall::new(PAdicApprox::zero_to(3, 8), -2)), BigRational::from_integer(9.into()));

        let p2 = ps(&[2]);
        let g = AffineElement::dilation(SUnit::new(&p2, vec![1]));
        let image = zp.image(&g, 0);
        assert_eq!(&ball_mass(&image) / &ball_mass(&zp), BigRational::new(1.into(), 2.into()));
        // |2|_2 = exp(-rn_derivative_log).
        let rn = rn_derivative_log(&g, 0).to_f64();
        assert!(((ball_mass(&image) / ball_mass(&zp)).to_f64().unwrap() - (-rn).exp()).abs() < 1e-15);
    }

    #[test]
    fn text_form_round_trips() {
        for s in ["p-adic(2, 0, 11111111)", "p-adic(3, -2, 1200)", "p-adic(5, >=7, 0)", "p-adic(37, 1, 36.0.5)"] {
            assert_eq!(PAdicApprox::parse(s).unwrap().to_string(), s);
        }
        assert!(PAdicApprox::parse("p-adic(2, 0, 0111)").is_err());
        assert!(PAdicApprox::parse("p-adic(2, 0, 1211)").is_err());
    }

    fn rational() -> impl Strategy<Value = SInteger> {
        (-100_000i64..100_000, 0u32..5, 0u32..4, 0u32..3).prop_map(|(n, a, b, c)| {
            SInteger::from_ratio(&ps(&[2, 3, 5]), n, 2i64.pow(a) * 3i64.pow(b) * 5i64.pow(c)).unwrap()
        })
    }

    proptest! {
        #[test]
        fn expansion_respects_ring_ops(x in rational(), y in rational(), i in 0usize..3) {
            let m = 24;
            let ex = PAdicApprox::from_sinteger(&x, i, m);
            let ey = PAdicApprox::from_sinteger(&y, i, m);
            let prod = ex.mul(&ey);
            let exact = PAdicApprox::from_sinteger_abs(&(&x * &y), i, prod.abs_precision());
            prop_assert_eq!(prod, exact);
            let sum = ex.add(&ey);
            let exact = PAdicApprox::from_sinteger_abs(&(&x + &y), i, sum.abs_precision());
            prop_assert_eq!(sum.clone(), exact);
            // Ultrametric inequality, with equality for distinct valuations.
            if let (Some(vx), Some(vy)) = (ex.valuation(), ey.valuation()) {
                prop_assert!(sum.valuation_lower_bound() >= vx.min(vy));
                if vx != vy {
                    prop_assert_eq!(sum.valuation(), Some(vx.min(vy)));
                }
            }
        }

        #[test]
        fn affine_apply_matches_exact_action(r in rational(), x in rational(), e in proptest::collection::vec(-3i64..4, 3), i in 0usize..3) {
            let g = AffineElement::new(r, SUnit::new(&ps(&[2, 3, 5]), e));
            let ex = PAdicApprox::from_sinteger(&x, i, 20);
            let got = affine_apply(&g, &ex, i);
            let exact = PAdicApprox::from_sinteger_abs(&g.act(&x), i, got.abs_precision());
            prop_assert_eq!(got, exact);
        }

        #[test]
        fn composition_matches_group_law(a in rational(), b in rational(), x in rational(),
                                         ea in proptest::collection::vec(-2i64..3, 3),
                                         eb in proptest::collection::vec(-2i64..3, 3), i in 0usize..3) {
            let p = ps(&[2, 3, 5]);
            let g = AffineElement::new(a, SUnit::new(&p, ea));
            let h = AffineElement::new(b, SUnit::new(&p, eb));
            let ex = PAdicApprox::from_sinteger(&x, i, 20);
            let lhs = affine_apply(&g.mult(&h), &ex, i);
            let rhs = affine_apply(&g, &affine_apply(&h, &ex, i), i);
            let abs = lhs.abs_precision().min(rhs.abs_precision());
            prop_assert_eq!(lhs.truncate_abs(abs), rhs.truncate_abs(abs));
        }

        #[test]
        fn ball_image_scales_mass(center in rational(), r in rational(), m in -3i64..6,
                                  e in proptest::collection::vec(-3i64..4, 3), i in 0usize..3) {
            let p = ps(&[2, 3, 5]);
            let ball = PAdicBall::new(PAdicApprox::from_sinteger_abs(&center, i, 40), m);
            prop_assume!(ball.is_resolved());
            let s = SUnit::new(&p, e);
            let g = AffineElement::new(r, s.clone());
            let image = ball.image(&g, i);
            let norm = BigRational::from_integer(BigInt::from(p.prime(i))).pow(-(s.exps()[i] as i32));
            prop_assert_eq!(ball_mass(&image), ball_mass(&ball) * norm);
            // The image ball contains the image of the center.
            let gx = affine_apply(&g, &ball.center, i);
            prop_assert_eq!(image.contains(&gx), Some(true));
        }
    }
}
