use std::collections::HashSet;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::FiniteMeasure;
use crate::group::AffineElement;
use crate::logval::SymbolicLogValue;
use crate::sarith::PrimeSet;

/// Drift coefficients: `φ_{p_i}(τ) = coeffs[i]·log p_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DriftVector {
    pub primes: PrimeSet,
    pub coeffs: Vec<BigRational>,
}

impl DriftVector {
    pub fn is_negative(&self) -> bool {
        self.coeffs.iter().all(Signed::is_negative)
    }

    pub fn phi(&self, i: usize) -> SymbolicLogValue {
        SymbolicLogValue::single(&self.primes, i, self.coeffs[i].clone())
    }

    pub fn phi_f64(&self, i: usize) -> f64 {
        self.phi(i).to_f64()
    }
}

impl fmt::Display for DriftVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "phi_{} = {}·log {} ({:.12})", self.primes.prime(i), c, self.primes.prime(i), self.phi_f64(i))?;
        }
        Ok(())
    }
}

/// `c_i = -sum τ(r,s)·n_i(s)`.
pub fn drift(tau: &FiniteMeasure<AffineElement>) -> DriftVector {
    let primes = tau.support().next().map(|g| g.primes().clone()).expect("drift of an empty measure");
    let mut coeffs = vec![BigRational::zero(); primes.len()];
    for (g, w) in tau.iter() {
        for (c, &n) in coeffs.iter_mut().zip(g.s.exps()) {
            *c -= w * BigRational::from_integer(BigInt::from(n));
        }
    }
    DriftVector { primes, coeffs }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GeneratingVerdict {
    /// Every generator appeared as a product of at most `depth` support elements.
    Verified { depth: usize },
    Inconclusive { depth: usize, missing: Vec<AffineElement> },
}

impl GeneratingVerdict {
    pub fn is_verified(&self) -> bool {
        matches!(self, GeneratingVerdict::Verified { .. })
    }
}

impl fmt::Display for GeneratingVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratingVerdict::Verified { depth } => write!(f, "verified (depth {depth})"),
            GeneratingVerdict::Inconclusive { depth, missing } => {
                write!(f, "inconclusive (depth {depth}, {} generator(s) unreached", missing.len())?;
                if let Some(g) = missing.first() {
                    write!(f, ", e.g. {g}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Frontier size past which the search gives up as inconclusive.
const MAX_STATES: usize = 2_000_000;

/// Breadth-first search over products of support elements of length `≤ depth`.
pub fn check_generating(
    tau: &FiniteMeasure<AffineElement>,
    generators: &[AffineElement],
    depth: usize,
) -> GeneratingVerdict {
    let support: Vec<AffineElement> = tau.support().cloned().collect();
    let mut missing: Vec<AffineElement> = generators.to_vec();
    let mut reached: HashSet<AffineElement> = HashSet::new();
    let mut frontier: Vec<AffineElement> = Vec::new();
    for len in 1..=depth {
        let next: Vec<AffineElement> = if len == 1 {
            support.clone()
        } else {
            frontier.iter().flat_map(|a| support.iter().map(move |b| a.mult(b))).collect()
        };
        frontier = next.into_iter().filter(|g| reached.insert(g.clone())).collect();
        missing.retain(|g| !reached.contains(g));
        if missing.is_empty() {
            return GeneratingVerdict::Verified { depth: len };
        }
        if frontier.is_empty() || reached.len() > MAX_STATES {
            return GeneratingVerdict::Inconclusive { depth: len, missing };
        }
    }
    GeneratingVerdict::Inconclusive { depth, missing }
}
