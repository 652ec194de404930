//! Float drift targets `β_j > 0` turned into rational `c_j ≈ β_j / log p_j`.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::logval::rational_to_f64;
use crate::sarith::PrimeSet;

pub const DEFAULT_DENOMINATOR_BOUND: u64 = 1_000_000;

/// First continued-fraction convergent of `x` within `tol` whose denominator
/// does not exceed `bound`.
pub fn rationalize(x: f64, tol: f64, bound: u64) -> Result<BigRational> {
    let fail = || Error::Rationalize { value: x.to_string(), tol: tol.to_string(), bound };
    if !x.is_finite() || tol.is_nan() || tol <= 0.0 {
        return Err(fail());
    }
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut rest = x;
    for _ in 0..64 {
        let a = rest.floor();
        if a.abs() > 1e18 {
            break;
        }
        let a = a as i128;
        let (h2, k2) = (a * h1 + h0, a * k1 + k0);
        if k2 > bound as i128 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (x - h1 as f64 / k1 as f64).abs() <= tol {
            return Ok(BigRational::new(BigInt::from(h1), BigInt::from(k1)));
        }
        let frac = rest - a as f64;
        if frac == 0.0 {
            break;
        }
        rest = 1.0 / frac;
    }
    Err(fail())
}

#[derive(Clone, Debug)]
pub struct RationalizedTarget {
    pub beta: f64,
    pub coeff: BigRational,
    /// `|c·log p - β|`.
    pub error: f64,
}

/// `c_j` with `|c_j·log p_j - β_j| ≤ tol`.
pub fn targets_from_beta(primes: &PrimeSet, betas: &[f64], tol: f64, bound: u64) -> Result<Vec<RationalizedTarget>> {
    if betas.len() != primes.len() {
        return Err(Error::InvalidArgument(format!("{} targets for {} primes", betas.len(), primes.len())));
    }
    if let Some(bad) = betas.iter().find(|b| b.is_nan() || **b <= 0.0) {
        return Err(Error::NonPositiveTarget(bad.to_string()));
    }
    primes
        .iter()
        .zip(betas)
        .map(|(p, &beta)| {
            let lp = (p as f64).ln();
            let coeff = rationalize(beta / lp, tol / lp, bound).map_err(|_| Error::Rationalize {
                value: beta.to_string(),
                tol: tol.to_string(),
                bound,
            })?;
            let error = (rational_to_f64(&coeff) * lp - beta).abs();
            Ok(RationalizedTarget { beta, coeff, error })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::q;
    use proptest::prelude::*;

    #[test]
    fn known_expansions() {
        assert_eq!(rationalize(0.5, 1e-12, 10).unwrap(), q(1, 2));
        assert_eq!(rationalize(std::f64::consts::PI, 1e-2, 1000).unwrap(), q(22, 7));
        assert_eq!(rationalize(std::f64::consts::PI, 1e-6, 1000).unwrap(), q(355, 113));
        assert!(rationalize(std::f64::consts::PI, 1e-12, 1000).is_err());
        assert_eq!(rationalize(-1.25, 1e-12, 10).unwrap(), q(-5, 4));
    }

    #[test]
    fn beta_targets() {
        let ps = PrimeSet::new(vec![2, 3]).unwrap();
        let t = targets_from_beta(&ps, &[0.5, 0.7], 1e-6, DEFAULT_DENOMINATOR_BOUND).unwrap();
        for (r, beta) in t.iter().zip([0.5, 0.7]) {
            assert!(r.error <= 1e-6);
            assert!((rational_to_f64(&r.coeff) * (if beta == 0.5 { 2f64 } else { 3f64 }).ln() - beta).abs() <= 1e-6);
        }
        assert!(matches!(targets_from_beta(&ps, &[0.5, 0.0], 1e-6, 100), Err(Error::NonPositiveTarget(_))));
        assert!(matches!(targets_from_beta(&ps, &[0.5, 0.7], 1e-12, 10), Err(Error::Rationalize { .. })));
    }

    proptest! {
        // Oracle: brute-force best approximation with denominator ≤ 60.
        #[test]
        fn convergent_is_within_tol(x in 0.01f64..50.0) {
            let bound = 60;
            let best = (1..=bound).map(|d| ((x * d as f64).round() / d as f64 - x).abs()).fold(f64::INFINITY, f64::min);
            let tol = best * 1.000001 + 1e-15;
            if let Ok(c) = rationalize(x, tol, bound) {
                prop_assert!((rational_to_f64(&c) - x).abs() <= tol);
                prop_assert!(*c.denom() <= BigInt::from(bound));
            }
            // The last convergent with denominator k ≤ bound < k' is within 1/(k·k').
            prop_assert!(rationalize(x, 1.0 / bound as f64, bound).is_ok());
        }
    }
}
