use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::group::AffineElement;
use crate::measures::FiniteMeasure;

/// Independent stream families derived from one run seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stream {
    Drift = 1,
    Boundary = 2,
    Stationarity = 3,
    Entropy = 4,
    Control = 5,
    Slope = 6,
}

/// ChaCha8 keyed by `seed`, on stream `(purpose, index)`.
pub fn stream_rng(seed: u64, purpose: Stream, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((purpose as u64) << 48) | (index & ((1 << 48) - 1)));
    rng
}

/// Inverse-CDF sampler over the atoms of `τ`.
///
/// Weights are put over their common denominator `L`; atom `k` owns the
/// draws `u ∈ [⌊C_{k-1}·2^64/L⌋, ⌊C_k·2^64/L⌋)` of a uniform 64-bit `u`, so
/// every atom probability is exact up to the `2^-64` grid.
#[derive(Clone, Debug)]
pub struct Sampler {
    atoms: Vec<AffineElement>,
    exps: Vec<Vec<i64>>,
    thresholds: Vec<u128>,
}

impl Sampler {
    pub fn new(tau: &FiniteMeasure<AffineElement>) -> Result<Self> {
        tau.require_probability()?;
        let denom = tau.common_denominator();
        let scale = BigInt::from(BigUint::from(1u8) << 64);
        let mut cumulative = BigInt::from(0);
        let mut atoms = Vec::with_capacity(tau.len());
        let mut thresholds = Vec::with_capacity(tau.len());
        for (g, w) in tau.iter() {
            cumulative += (w * num_rational::BigRational::from_integer(denom.clone())).to_integer();
            let t = (&cumulative * &scale) / &denom;
            thresholds.push(t.to_u128().expect("threshold within 2^64"));
            atoms.push(g.clone());
        }
        let exps = atoms.iter().map(|g| g.s.exps().to_vec()).collect();
        Ok(Self { atoms, exps, thresholds })
    }

    pub fn atoms(&self) -> &[AffineElement] {
        &self.atoms
    }

    pub fn sample_index(&self, rng: &mut impl RngCore) -> usize {
        let u = rng.next_u64() as u128;
        self.thresholds.partition_point(|&t| t <= u)
    }

    pub fn sample(&self, rng: &mut impl RngCore) -> &AffineElement {
        &self.atoms[self.sample_index(rng)]
    }

    /// Dilation exponent vector of atom `k`.
    pub fn exps(&self, k: usize) -> &[i64] {
        &self.exps[k]
    }
}
