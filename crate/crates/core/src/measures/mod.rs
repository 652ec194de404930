//! Finitely supported measures with exact rational weights.

mod absorb;
mod checks;
mod design;
mod file;
pub mod targets;

pub use absorb::{absorb, check_absorbing, coset_reps, AbsorbingReport, CosetReps, ShiftCheck};
pub use checks::{check_generating, drift, DriftVector, GeneratingVerdict};
pub use file::MeasureFile;
pub use design::{
    build_tau, default_generators, design_iota, design_tau, parse_rational, DesignConfig, IotaDesign, TauDesign, StepMeasure,
};

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Atoms with strictly positive rational weights, kept in carrier order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteMeasure<C: Ord> {
    atoms: BTreeMap<C, BigRational>,
}

impl<C: Ord + Clone> Default for FiniteMeasure<C> {
    fn default() -> Self {
        Self::new()
    }
}

impl<C: Ord + Clone> FiniteMeasure<C> {
    pub fn new() -> Self {
        Self { atoms: BTreeMap::new() }
    }

    pub fn dirac(c: C) -> Self {
        let mut m = Self::new();
        m.add(c, BigRational::one());
        m
    }

    /// Uniform probability on the distinct values of `points`.
    pub fn uniform(points: impl IntoIterator<Item = C>) -> Self {
        let mut m = Self::new();
        for c in points {
            m.atoms.insert(c, BigRational::one());
        }
        let n = BigRational::from_integer(BigInt::from(m.atoms.len()));
        for w in m.atoms.values_mut() {
            *w = &*w / &n;
        }
        m
    }

    /// Sums weights of repeated carriers; zero totals are dropped.
    pub fn from_atoms(atoms: impl IntoIterator<Item = (C, BigRational)>) -> Self {
        let mut m = Self::new();
        for (c, w) in atoms {
            m.add(c, w);
        }
        m
    }

    pub fn add(&mut self, c: C, w: BigRational) {
        if w.is_zero() {
            return;
        }
        let slot = self.atoms.entry(c.clone()).or_insert_with(BigRational::zero);
        *slot += w;
        if slot.is_zero() {
            self.atoms.remove(&c);
        }
    }

    pub fn weight(&self, c: &C) -> BigRational {
        self.atoms.get(c).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&C, &BigRational)> {
        self.atoms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = &C> {
        self.atoms.keys()
    }

    pub fn contains(&self, c: &C) -> bool {
        self.atoms.contains_key(c)
    }

    pub fn total_mass(&self) -> BigRational {
        self.atoms.values().fold(BigRational::zero(), |acc, w| acc + w)
    }

    pub fn is_probability(&self) -> bool {
        self.total_mass().is_one() && self.atoms.values().all(|w| *w > BigRational::zero())
    }

    pub fn require_probability(&self) -> Result<()> {
        if self.is_probability() {
            Ok(())
        } else {
            Err(Error::NotProbability(self.total_mass().to_string()))
        }
    }

    pub fn scaled(&self, t: &BigRational) -> Self {
        Self::from_atoms(self.atoms.iter().map(|(c, w)| (c.clone(), w * t)))
    }

    /// `t·a + (1-t)·b`.
    pub fn mix(t: &BigRational, a: &Self, b: &Self) -> Self {
        let mut m = a.scaled(t);
        for (c, w) in b.iter() {
            m.add(c.clone(), w * (BigRational::one() - t));
        }
        m
    }

    /// Image measure under `f`.
    pub fn push_forward<D: Ord + Clone>(&self, f: impl Fn(&C) -> D) -> FiniteMeasure<D> {
        FiniteMeasure::from_atoms(self.atoms.iter().map(|(c, w)| (f(c), w.clone())))
    }

    /// Least common denominator of all weights.
    pub fn common_denominator(&self) -> BigInt {
        use num_integer::Integer;
        self.atoms.values().fold(BigInt::one(), |acc, w| acc.lcm(w.denom()))
    }
}

/// `sum_n m(n)·n`.
pub fn mean(m: &FiniteMeasure<i64>) -> BigRational {
    m.iter()
        .fold(BigRational::zero(), |acc, (n, w)| acc + w * BigRational::from_integer(BigInt::from(*n)))
}

/// Additive convolution on Z.
pub fn convolve(a: &FiniteMeasure<i64>, b: &FiniteMeasure<i64>) -> FiniteMeasure<i64> {
    let mut out = FiniteMeasure::new();
    for (x, wx) in a.iter() {
        for (y, wy) in b.iter() {
            out.add(x + y, wx * wy);
        }
    }
    out
}

/// `m^{*n}` with `m^{*0} = δ_0`.
pub fn convolution_power(m: &FiniteMeasure<i64>, n: u32) -> FiniteMeasure<i64> {
    (0..n).fold(FiniteMeasure::dirac(0), |acc, _| convolve(&acc, m))
}

#[cfg(test)]
pub(crate) fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn paper_sigma() -> FiniteMeasure<i64> {
        FiniteMeasure::from_atoms([(1, q(3, 4)), (-1, q(1, 4))])
    }

    #[test]
    fn convolve_examples() {
        let s2 = convolve(&paper_sigma(), &paper_sigma());
        let expected = FiniteMeasure::from_atoms([(2, q(9, 16)), (0, q(6, 16)), (-2, q(1, 16))]);
        assert_eq!(s2, expected);
        assert_eq!(convolve(&FiniteMeasure::dirac(0), &paper_sigma()), paper_sigma());
        assert_eq!(convolution_power(&paper_sigma(), 2), expected);
    }

    #[test]
    fn measure_basics() {
        let u = FiniteMeasure::uniform([-1i64, 0, 1, 1]);
        assert_eq!(u.len(), 3);
        assert!(u.is_probability());
        assert_eq!(u.weight(&0), q(1, 3));
        let mut m = FiniteMeasure::dirac(5i64);
        m.add(5, -BigRational::one());
        assert!(m.is_empty());
        let mixed = FiniteMeasure::mix(&q(1, 4), &FiniteMeasure::dirac(1i64), &FiniteMeasure::dirac(2));
        assert_eq!(mean(&mixed), q(7, 4));
        assert_eq!(paper_sigma().common_denominator(), BigInt::from(4));
    }

    fn int_measure() -> impl Strategy<Value = FiniteMeasure<i64>> {
        proptest::collection::vec((-6i64..=6, 1i64..=9), 1..5).prop_map(|atoms| {
            let total: i64 = atoms.iter().map(|(_, w)| w).sum();
            FiniteMeasure::from_atoms(atoms.into_iter().map(|(n, w)| (n, q(w, total))))
        })
    }

    proptest! {
        #[test]
        fn convolution_mean_is_additive(a in int_measure(), b in int_measure()) {
            let c = convolve(&a, &b);
            prop_assert!(c.is_probability());
            prop_assert_eq!(mean(&c), mean(&a) + mean(&b));
        }
    }
}
