//! The simulation run behind `bndent walk`: drift, slope, boundary samples,
//! stationarity and entropy, rendered as CSV files tied to a manifest.

use crate::error::{Error, Result};
use crate::group::AffineElement;
use crate::measures::{drift, FiniteMeasure};
use crate::report::{fmt_f64, render_csv, RunManifest, TRIAL_COLUMNS};
use crate::spectrum::{entropy_of_boundary, IndexSet};
use crate::walk::{
    estimate_drift, estimate_entropy, sample_boundary_set, stationarity_test, valuation_slope, FamilyRegistry, Sampler,
    StationarityConfig, DEFAULT_FAMILY,
};

#[derive(Clone, Debug)]
pub struct WalkConfig {
    pub steps: usize,
    pub trials: usize,
    pub samples: usize,
    pub precision: u32,
    pub draws: u64,
    pub seed: u64,
    pub prime_index: Option<usize>,
    pub family: String,
    pub stationarity: StationarityConfig,
    /// Allowed relative error of the valuation slope against `-c_j`.
    pub slope_tolerance: f64,
}

impl Default for WalkConfig {
    fn default() -> Self {
        Self {
            steps: 10_000,
            trials: 50,
            samples: 1_000,
            precision: 32,
            draws: 100_000,
            seed: 42,
            prime_index: None,
            family: DEFAULT_FAMILY.to_string(),
            stationarity: StationarityConfig::default(),
            slope_tolerance: 0.1,
        }
    }
}

impl WalkConfig {
    pub fn record(&self, m: &mut RunManifest) {
        m.set("steps", self.steps)
            .set("trials", self.trials)
            .set("samples", self.samples)
            .set("precision", self.precision)
            .set("draws", self.draws)
            .set("prime_index", self.prime_index.map_or("all".to_string(), |j| (j + 1).to_string()))
            .set("family", &self.family)
            .set("sigmas", self.stationarity.sigmas)
            .set("max_insufficient", self.stationarity.max_insufficient)
            .set("slope_tolerance", self.slope_tolerance);
        m.seed = self.seed;
    }
}

#[derive(Clone, Debug)]
pub struct WalkRun {
    pub manifest: RunManifest,
    /// `(file name, contents)` in a fixed order.
    pub files: Vec<(String, String)>,
    /// One human-readable line per check.
    pub lines: Vec<String>,
    pub pass: bool,
    /// Why boundary sampling was refused, if it was.
    pub boundary_refusal: Option<Error>,
}

fn mark(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}

fn subsets(l: usize, only: Option<usize>) -> Vec<IndexSet> {
    match only {
        Some(j) => vec![1 << j],
        None if l <= 4 => (1..1u64 << l).collect(),
        None => {
            let mut v: Vec<IndexSet> = (0..l).map(|j| 1 << j).collect();
            v.push((1 << l) - 1);
            v
        }
    }
}

pub fn run_walk(tau: &FiniteMeasure<AffineElement>, config: &WalkConfig, mut manifest: RunManifest) -> Result<WalkRun> {
    let exact = drift(tau);
    let primes = exact.primes.clone();
    let l = primes.len();
    if let Some(j) = config.prime_index {
        primes.check_index(j)?;
    }
    let family = FamilyRegistry::with_defaults();
    let family = family.get(&config.family)?;
    config.record(&mut manifest);
    let hash = manifest.hash();
    let sampler = Sampler::new(tau)?;
    let selected: Vec<usize> = config.prime_index.map_or((0..l).collect(), |j| vec![j]);
    let sigmas = config.stationarity.sigmas;
    let mut lines = Vec::new();
    let mut pass = true;
    let mut summary: Vec<Vec<String>> = Vec::new();

    let est = estimate_drift(&sampler, &primes, config.steps, config.trials, config.seed)?;
    let mut drift_rows = Vec::new();
    for (t, row) in est.per_trial.iter().enumerate() {
        for &j in &selected {
            drift_rows.push(vec![t.to_string(), primes.prime(j).to_string(), config.steps.to_string(), "log_norm_rate".into(), fmt_f64(row[j])]);
        }
    }
    for &j in &selected {
        let e = est.per_prime[j];
        let target = exact.phi_f64(j);
        let ok = e.within(target, sigmas);
        pass &= ok;
        lines.push(format!(
            "drift p={}: {:.6} ± {:.6} vs exact {}·log {} = {:.6} [{}]",
            primes.prime(j), e.mean, e.stderr, exact.coeffs[j], primes.prime(j), target, mark(ok)
        ));
        summary.push(vec!["drift".into(), primes.prime(j).to_string(), fmt_f64(e.mean), fmt_f64(e.stderr), fmt_f64(target), ok.to_string()]);

        let slope = valuation_slope(&sampler, j, config.steps, config.seed);
        let expected = -crate::logval::rational_to_f64(&exact.coeffs[j]);
        let ok = expected != 0.0 && ((slope - expected) / expected).abs() <= config.slope_tolerance;
        pass &= ok;
        lines.push(format!("slope p={}: {:.6} vs {:.6} [{}]", primes.prime(j), slope, expected, mark(ok)));
        drift_rows.push(vec!["0".into(), primes.prime(j).to_string(), config.steps.to_string(), "valuation_slope".into(), fmt_f64(slope)]);
        summary.push(vec!["valuation_slope".into(), primes.prime(j).to_string(), fmt_f64(slope), String::new(), fmt_f64(expected), ok.to_string()]);
    }
    let mut files = vec![("drift.csv".to_string(), render_csv(&hash, &TRIAL_COLUMNS, drift_rows))];

    let mut boundary_refusal = None;
    match sample_boundary_set(tau, &exact, config.precision, config.samples, config.seed) {
        Ok(set) => {
            let mut rows = Vec::new();
            for s in &set.samples {
                for &j in &selected {
                    let p = primes.prime(j).to_string();
                    rows.push(vec![s.index.to_string(), p.clone(), s.steps.to_string(), "point".into(), s.points[j].to_string()]);
                    rows.push(vec![s.index.to_string(), p, s.steps.to_string(), "tail_valuation".into(), s.tails[j].to_string()]);
                }
            }
            files.push(("boundary.csv".into(), render_csv(&hash, &TRIAL_COLUMNS, rows)));

            let rep = stationarity_test(&sampler, &set, family, config.seed, config.stationarity);
            let mut rows = Vec::new();
            for r in rep.results.iter().filter(|r| selected.contains(&r.prime_index)) {
                pass &= r.pass;
                lines.push(format!(
                    "stationarity {}: {:.6} ± {:.6} ({} evaluated, {} insufficient) [{}]",
                    r.label, r.estimate.mean, r.estimate.stderr, r.evaluated, r.insufficient, mark(r.pass)
                ));
                rows.push(vec![
                    r.label.clone(),
                    primes.prime(r.prime_index).to_string(),
                    r.evaluated.to_string(),
                    r.insufficient.to_string(),
                    fmt_f64(r.estimate.mean),
                    fmt_f64(r.estimate.stderr),
                    r.pass.to_string(),
                ]);
            }
            let ok = rep.insufficient_fraction <= config.stationarity.max_insufficient;
            pass &= ok;
            lines.push(format!("stationarity precision: {:.4}% insufficient [{}]", 100.0 * rep.insufficient_fraction, mark(ok)));
            files.push((
                "stationarity.csv".into(),
                render_csv(&hash, &["function", "prime", "evaluated", "insufficient", "estimate", "stderr", "pass"], rows),
            ));
        }
        Err(e) => {
            pass = false;
            lines.push(format!("boundary sampling refused: {e}"));
            boundary_refusal = Some(e);
        }
    }

    let mut rows = Vec::new();
    for subset in subsets(l, config.prime_index) {
        let label = format!("{subset:0l$b}");
        let e = estimate_entropy(&sampler, &primes, subset, config.draws, config.seed)?;
        match entropy_of_boundary(&exact, subset) {
            Ok(value) => {
                let target = value.to_f64();
                let ok = e.estimate.within(target, sigmas);
                pass &= ok;
                lines.push(format!(
                    "entropy J={label}: {:.6} ± {:.6} vs exact {} = {:.6} [{}]",
                    e.estimate.mean, e.estimate.stderr, value, target, mark(ok)
                ));
                rows.push(vec![label, config.draws.to_string(), fmt_f64(e.estimate.mean), fmt_f64(e.estimate.stderr), value.coeff_string(), fmt_f64(target), ok.to_string()]);
            }
            Err(err) => {
                pass = false;
                lines.push(format!("entropy J={label}: no exact value ({err})"));
                rows.push(vec![label, config.draws.to_string(), fmt_f64(e.estimate.mean), fmt_f64(e.estimate.stderr), String::new(), String::new(), "false".into()]);
            }
        }
    }
    files.push((
        "entropy.csv".into(),
        render_csv(&hash, &["subset", "draws", "estimate", "stderr", "exact_coefficients", "exact_value", "pass"], rows),
    ));
    files.push(("summary.csv".into(), render_csv(&hash, &["statistic", "prime", "estimate", "stderr", "exact", "pass"], summary)));

    Ok(WalkRun { manifest, files, lines, pass, boundary_refusal })
}
