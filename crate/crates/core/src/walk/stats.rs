//! Monte-Carlo estimators: drift, valuation slope, stationarity and entropy.

use rand::Rng;
use rayon::prelude::*;

use super::sampler::{stream_rng, Sampler, Stream};
use super::testfn::TestFamily;
use super::trajectory::{ols_slope, valuation_path, BoundarySample, BoundarySampleSet};
use crate::error::{Error, Result};
use crate::group::AffineElement;
use crate::logval::SymbolicLogValue;
use crate::padic::{affine_apply, uniform_zp, PAdicApprox};
use crate::sarith::PrimeSet;
use crate::spectrum::{indices, IndexSet};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeanStderr {
    pub mean: f64,
    pub stderr: f64,
}

impl MeanStderr {
    /// Sample mean and `s/sqrt(n)`, summed in index order.
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        if xs.len() < 2 {
            return Self { mean, stderr: 0.0 };
        }
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
        Self { mean, stderr: (var / n).sqrt() }
    }

    /// `|mean - target| ≤ sigmas·stderr`.
    pub fn within(&self, target: f64, sigmas: f64) -> bool {
        (self.mean - target).abs() <= sigmas * self.stderr
    }

    pub fn relative_error(&self, target: f64) -> f64 {
        ((self.mean - target) / target).abs()
    }
}

#[derive(Clone, Debug)]
pub struct DriftEstimate {
    pub steps: usize,
    pub per_prime: Vec<MeanStderr>,
    /// `per_trial[t][j] = (1/n)·log ‖π_n‖_{p_j}` for trial `t`.
    pub per_trial: Vec<Vec<f64>>,
}

/// Per-trial `(1/n)·log ‖π_n‖_{p_j} = -(1/n)·v_{p_j}(π_n)·log p_j`.
pub fn estimate_drift(sampler: &Sampler, primes: &PrimeSet, steps: usize, trials: usize, seed: u64) -> Result<DriftEstimate> {
    if steps == 0 || trials < 2 {
        return Err(Error::InvalidArgument(format!("drift estimation needs steps ≥ 1 and trials ≥ 2 (got {steps}, {trials})")));
    }
    let l = primes.len();
    let per_trial: Vec<Vec<f64>> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream_rng(seed, Stream::Drift, t);
            let mut total = vec![0i64; l];
            for _ in 0..steps {
                for (acc, n) in total.iter_mut().zip(sampler.exps(sampler.sample_index(&mut rng))) {
                    *acc += n;
                }
            }
            total.iter().zip(primes.iter()).map(|(&v, p)| -(v as f64) / steps as f64 * (p as f64).ln()).collect()
        })
        .collect();
    let per_prime = (0..l).map(|j| MeanStderr::from_samples(&per_trial.iter().map(|r| r[j]).collect::<Vec<_>>())).collect();
    Ok(DriftEstimate { steps, per_prime, per_trial })
}

/// OLS slope of `v_{p_j}(π_k)` against `k` along one walk of `steps` steps.
pub fn valuation_slope(sampler: &Sampler, j: usize, steps: usize, seed: u64) -> f64 {
    let mut rng = stream_rng(seed, Stream::Slope, j as u64);
    ols_slope(&valuation_path(sampler, j, steps, &mut rng))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StationarityConfig {
    /// Pass iff `|Δ̂| ≤ sigmas·stderr`.
    pub sigmas: f64,
    /// Largest tolerated fraction of precision-insufficient evaluations.
    pub max_insufficient: f64,
}

impl Default for StationarityConfig {
    fn default() -> Self {
        Self { sigmas: 4.0, max_insufficient: 0.01 }
    }
}

#[derive(Clone, Debug)]
pub struct FunctionResult {
    pub label: String,
    pub prime_index: usize,
    pub estimate: MeanStderr,
    pub evaluated: usize,
    pub insufficient: usize,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct StationarityReport {
    pub family: String,
    pub samples: usize,
    pub results: Vec<FunctionResult>,
    /// `per_sample[i][f] = u_f(x_i) - u_f(g_i x_i)` when both are evaluable.
    pub per_sample: Vec<Vec<Option<f64>>>,
    pub insufficient_fraction: f64,
    pub pass: bool,
}

/// Estimates `Δ_u = E[u(x) - u(gx)]` with `x` from `samples` and `g ~ τ`
/// drawn on stream `(Stationarity, sample index)`.
pub fn stationarity_test(
    sampler: &Sampler,
    samples: &BoundarySampleSet,
    family: &dyn TestFamily,
    seed: u64,
    config: StationarityConfig,
) -> StationarityReport {
    let functions = family.functions(&samples.primes);
    let l = samples.primes.len();
    let per_sample: Vec<Vec<Option<f64>>> = samples
        .samples
        .par_iter()
        .map(|s| {
            let mut rng = stream_rng(seed, Stream::Stationarity, s.index);
            let g: &AffineElement = sampler.sample(&mut rng);
            let gx: Vec<PAdicApprox> = (0..l).map(|j| affine_apply(g, &s.points[j], j)).collect();
            functions
                .iter()
                .map(|u| Some(u.evaluate(&s.points)? - u.evaluate(&gx)?))
                .collect()
        })
        .collect();
    let mut results = Vec::with_capacity(functions.len());
    let mut insufficient_total = 0usize;
    for (f, u) in functions.iter().enumerate() {
        let diffs: Vec<f64> = per_sample.iter().filter_map(|row| row[f]).collect();
        let insufficient = per_sample.len() - diffs.len();
        insufficient_total += insufficient;
        let estimate = if diffs.is_empty() { MeanStderr { mean: f64::NAN, stderr: f64::NAN } } else { MeanStderr::from_samples(&diffs) };
        let pass = estimate.within(0.0, config.sigmas);
        results.push(FunctionResult {
            label: u.label.clone(),
            prime_index: u.prime_index,
            estimate,
            evaluated: diffs.len(),
            insufficient,
            pass,
        });
    }
    let evaluations = (per_sample.len() * functions.len()).max(1);
    let insufficient_fraction = insufficient_total as f64 / evaluations as f64;
    let pass = results.iter().all(|r| r.pass) && insufficient_fraction <= config.max_insufficient;
    StationarityReport { family: family.name().to_string(), samples: per_sample.len(), results, per_sample, insufficient_fraction, pass }
}

/// Points with independent Haar-uniform `Z_{p_j}` coordinates, shaped like
/// a boundary sample set. These are not `τ`-stationary.
pub fn uniform_control_samples(primes: &PrimeSet, precision: u32, count: usize, seed: u64) -> BoundarySampleSet {
    let samples = (0..count as u64)
        .map(|i| {
            let mut rng = stream_rng(seed, Stream::Control, i);
            let points: Vec<PAdicApprox> =
                primes.iter().map(|p| uniform_zp(p, precision, || rng.gen_range(0..p))).collect();
            let tails = points.iter().map(|x| x.abs_precision()).collect();
            BoundarySample { index: i, steps: 0, points, tails }
        })
        .collect();
    BoundarySampleSet { primes: primes.clone(), precision, seed, samples }
}

/// `sum_{j ∈ J} n_j(s)·log p_j = sum_{j ∈ J} -log |s|_{p_j}` for one increment.
pub fn entropy_sample(g: &AffineElement, subset: IndexSet) -> SymbolicLogValue {
    let primes = g.primes();
    let coeffs: Vec<i64> =
        (0..primes.len()).map(|j| if subset >> j & 1 == 1 { g.s.exps()[j] } else { 0 }).collect();
    SymbolicLogValue::from_integers(primes, &coeffs)
}

#[derive(Clone, Debug)]
pub struct EntropyEstimate {
    pub subset: IndexSet,
    pub draws: u64,
    pub estimate: MeanStderr,
}

const ENTROPY_CHUNK: u64 = 1 << 16;

/// Mean of [`entropy_sample`] over `draws` increments `g ~ τ`.
///
/// Exponent sums and cross-products are accumulated as integers per chunk,
/// so the result does not depend on scheduling.
pub fn estimate_entropy(sampler: &Sampler, primes: &PrimeSet, subset: IndexSet, draws: u64, seed: u64) -> Result<EntropyEstimate> {
    let l = primes.len();
    if l < 64 && subset >> l != 0 {
        return Err(Error::InvalidArgument(format!("index set {subset:#b} exceeds {l} primes")));
    }
    if draws == 0 {
        return Err(Error::InvalidArgument("entropy estimation needs at least one draw".into()));
    }
    let js: Vec<usize> = indices(subset, l).collect();
    let k = js.len();
    let chunks = draws.div_ceil(ENTROPY_CHUNK);
    let partials: Vec<(Vec<i128>, Vec<i128>)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, Stream::Entropy, c);
            let len = ENTROPY_CHUNK.min(draws - c * ENTROPY_CHUNK);
            let mut first = vec![0i128; k];
            let mut second = vec![0i128; k * k];
            for _ in 0..len {
                let e = sampler.exps(sampler.sample_index(&mut rng));
                for (a, &ja) in js.iter().enumerate() {
                    let na = e[ja] as i128;
                    first[a] += na;
                    for (b, &jb) in js.iter().enumerate() {
                        second[a * k + b] += na * e[jb] as i128;
                    }
                }
            }
            (first, second)
        })
        .collect();
    let mut first = vec![0i128; k];
    let mut second = vec![0i128; k * k];
    for (f, s) in &partials {
        first.iter_mut().zip(f).for_each(|(a, b)| *a += b);
        second.iter_mut().zip(s).for_each(|(a, b)| *a += b);
    }
    let logs: Vec<f64> = js.iter().map(|&j| (primes.prime(j) as f64).ln()).collect();
    let n = draws as f64;
    let mean: f64 = (0..k).map(|a| first[a] as f64 / n * logs[a]).sum();
    let mean_sq: f64 = (0..k).flat_map(|a| (0..k).map(move |b| (a, b))).map(|(a, b)| second[a * k + b] as f64 / n * logs[a] * logs[b]).sum();
    let stderr = if draws < 2 { 0.0 } else { ((mean_sq - mean * mean).max(0.0) * n / (n - 1.0) / n).sqrt() };
    Ok(EntropyEstimate { subset, draws, estimate: MeanStderr { mean, stderr } })
}
