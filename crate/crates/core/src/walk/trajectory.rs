use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive};
use rand::RngCore;

use super::sampler::{stream_rng, Sampler, Stream};
use crate::error::{Error, Result};
use crate::group::AffineElement;
use crate::logval::rational_to_f64;
use crate::measures::{DriftVector, FiniteMeasure};
use crate::padic::PAdicApprox;
use crate::sarith::{PrimeSet, SInteger, SUnit};

/// Walk increments with cached prefix products `γ_1···γ_k = (b_k, π_k)`.
///
/// `b_k = b_{k-1} + π_{k-1}·r_k`, `π_k = π_{k-1}·s_k`, `b_0 = 0`, `π_0 = 1`.
#[derive(Clone, Debug)]
pub struct Trajectory {
    increments: Vec<AffineElement>,
    translations: Vec<SInteger>,
    dilations: Vec<SUnit>,
}

impl Trajectory {
    pub fn new(primes: &PrimeSet) -> Self {
        Self {
            increments: Vec::new(),
            translations: vec![SInteger::zero(primes)],
            dilations: vec![SUnit::identity(primes)],
        }
    }

    pub fn from_increments(primes: &PrimeSet, increments: impl IntoIterator<Item = AffineElement>) -> Self {
        let mut t = Self::new(primes);
        for g in increments {
            t.push(g);
        }
        t
    }

    pub fn push(&mut self, g: AffineElement) {
        let pi = self.dilations.last().expect("π_0 always present");
        let b = self.translations.last().expect("b_0 always present");
        let next_b = b + &g.r.mul_sunit(pi);
        let next_pi = pi * &g.s;
        self.translations.push(next_b);
        self.dilations.push(next_pi);
        self.increments.push(g);
    }

    pub fn extend(&mut self, sampler: &Sampler, rng: &mut impl RngCore, steps: usize) {
        for _ in 0..steps {
            self.push(sampler.sample(rng).clone());
        }
    }

    pub fn len(&self) -> usize {
        self.increments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.increments.is_empty()
    }

    pub fn increments(&self) -> &[AffineElement] {
        &self.increments
    }

    pub fn translation(&self, k: usize) -> &SInteger {
        &self.translations[k]
    }

    pub fn dilation(&self, k: usize) -> &SUnit {
        &self.dilations[k]
    }

    /// `γ_1···γ_n`.
    pub fn product(&self) -> AffineElement {
        AffineElement::new(self.translations[self.len()].clone(), self.dilations[self.len()].clone())
    }

    /// `min_{k ∈ [⌈2n/3⌉, n]} v_{p_j}(π_k) - guard`: every later term
    /// `π_{k-1} r_k` is bounded below by this as long as the prefix
    /// valuations stay above the suffix minimum.
    pub fn tail_bound(&self, j: usize, guard: i64) -> i64 {
        let n = self.len();
        let start = (2 * n).div_ceil(3);
        (start..=n).map(|k| self.dilations[k].exps()[j]).min().unwrap_or(0) - guard
    }
}

/// `max(0, -min v_{p_j}(r))` over the non-zero translation parts of `τ`.
pub fn guard(tau: &FiniteMeasure<AffineElement>, j: usize) -> i64 {
    tau.support().filter_map(|g| g.r.valuation(j).finite()).map(|v| -v).max().unwrap_or(0).max(0)
}

/// The boundary point `z_j = sum_k π_{k-1} r_k ∈ Q_{p_j}` to `precision` certified relative digits.
pub fn boundary_point(t: &Trajectory, j: usize, precision: u32, guard: i64) -> Result<PAdicApprox> {
    let tail = t.tail_bound(j, guard);
    let b = t.translation(t.len());
    let m = precision as i64;
    match b.valuation(j).finite() {
        Some(v) if v < tail => {
            if tail - v < m {
                return Err(Error::InsufficientPrecision { required: m, achieved: tail });
            }
            Ok(PAdicApprox::from_sinteger_abs(b, j, v + m))
        }
        // Vanishes to the certified precision.
        _ => {
            if tail < m {
                return Err(Error::InsufficientPrecision { required: m, achieved: tail });
            }
            Ok(PAdicApprox::zero_to(b.primes().prime(j), tail))
        }
    }
}

/// One approximate draw from the stationary measure on `prod_j Q_{p_j}`.
#[derive(Clone, Debug)]
pub struct BoundarySample {
    pub index: u64,
    pub steps: usize,
    pub points: Vec<PAdicApprox>,
    /// Certified tail valuation per prime.
    pub tails: Vec<i64>,
}

#[derive(Clone, Debug)]
pub struct BoundarySampleSet {
    pub primes: PrimeSet,
    pub precision: u32,
    pub seed: u64,
    pub samples: Vec<BoundarySample>,
}

/// Initial depth `⌈1.5·(M + guard_j)/|c_j|⌉`, maximised over primes.
pub fn initial_depth(drift: &DriftVector, precision: u32, guards: &[i64]) -> Result<usize> {
    let mut depth = 1usize;
    for (j, c) in drift.coeffs.iter().enumerate() {
        if !c.is_negative() {
            return Err(Error::DriftHypothesis {
                index: j + 1,
                prime: drift.primes.prime(j),
                coeff: c.to_string(),
            });
        }
        let need = (precision as i64 + guards[j]) as f64 / rational_to_f64(&c.abs()) * 1.5;
        depth = depth.max(need.ceil().to_usize().unwrap_or(usize::MAX));
    }
    Ok(depth)
}

/// Walks until every prime's boundary coordinate is certified to `precision`,
/// extending by 50% each time it is not.
pub fn sample_boundary(
    sampler: &Sampler,
    drift: &DriftVector,
    guards: &[i64],
    precision: u32,
    rng: &mut impl RngCore,
) -> Result<(Trajectory, Vec<PAdicApprox>)> {
    let primes = &drift.primes;
    let start = initial_depth(drift, precision, guards)?;
    let cap = start.saturating_mul(64);
    let mut t = Trajectory::new(primes);
    t.extend(sampler, rng, start);
    loop {
        let points: Result<Vec<_>> =
            (0..primes.len()).map(|j| boundary_point(&t, j, precision, guards[j])).collect();
        match points {
            Ok(points) => return Ok((t, points)),
            Err(e) if t.len() >= cap => return Err(e),
            Err(_) => {
                let more = t.len().div_ceil(2);
                t.extend(sampler, rng, more);
            }
        }
    }
}

/// `count` boundary samples, sample `i` on its own RNG stream.
pub fn sample_boundary_set(
    tau: &FiniteMeasure<AffineElement>,
    drift: &DriftVector,
    precision: u32,
    count: usize,
    seed: u64,
) -> Result<BoundarySampleSet> {
    use rayon::prelude::*;
    let sampler = Sampler::new(tau)?;
    let guards: Vec<i64> = (0..drift.primes.len()).map(|j| guard(tau, j)).collect();
    initial_depth(drift, precision, &guards)?;
    let samples = (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, Stream::Boundary, i);
            let (t, points) = sample_boundary(&sampler, drift, &guards, precision, &mut rng)?;
            let tails = (0..drift.primes.len()).map(|j| t.tail_bound(j, guards[j])).collect();
            Ok(BoundarySample { index: i, steps: t.len(), points, tails })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundarySampleSet { primes: drift.primes.clone(), precision, seed, samples })
}

/// `v_{p_j}(π_k)` for `k = 0..=steps`.
pub fn valuation_path(sampler: &Sampler, j: usize, steps: usize, rng: &mut impl RngCore) -> Vec<i64> {
    let mut path = Vec::with_capacity(steps + 1);
    let mut v = 0i64;
    path.push(v);
    for _ in 0..steps {
        v += sampler.exps(sampler.sample_index(rng))[j];
        path.push(v);
    }
    path
}

/// Least-squares slope of `ys` against `0, 1, 2, ...`.
pub fn ols_slope(ys: &[i64]) -> f64 {
    let n = ys.len() as f64;
    let mean_x = (n - 1.0) / 2.0;
    let mean_y = ys.iter().map(|&y| y as f64).sum::<f64>() / n;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, &y) in ys.iter().enumerate() {
        let dx = x as f64 - mean_x;
        sxy += dx * (y as f64 - mean_y);
        sxx += dx * dx;
    }
    sxy / sxx
}

/// Exact drift coefficient as a float, for comparisons.
pub fn coeff_f64(c: &BigRational) -> f64 {
    rational_to_f64(c)
}
