//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

use std::collections::{BTreeSet, HashMap};
use std::time::{Duration, Instant};

use bndent_core::measures::{
    absorb, check_absorbing, check_generating, design_tau, drift, DesignConfig, FiniteMeasure,
};
use bndent_core::padic::{PAdicApprox, DEFAULT_PRECISION};
use bndent_core::pipeline::{run_walk, WalkConfig};
use bndent_core::report::RunManifest;
use bndent_core::spectrum::enumerate_spectrum;
use bndent_core::walk::{
    entropy_sample, estimate_drift, estimate_entropy, sample_boundary_set, stationarity_test, stream_rng,
    uniform_control_samples, valuation_slope, FamilyRegistry, Sampler, StationarityConfig, Stream, Trajectory,
    DEFAULT_FAMILY,
};
use bndent_core::{AffineElement, DriftVector, PrimeSet, SInteger, SUnit, SymbolicLogValue};
use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, Zero};
use rand::Rng;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn ps(p: &[u64]) -> PrimeSet {
    PrimeSet::new(p.to_vec()).unwrap()
}

fn designed() -> (PrimeSet, FiniteMeasure<AffineElement>) {
    let p = ps(&[2, 3]);
    let tau = design_tau(&p, &DesignConfig::new(&p, vec![q(1, 1), q(1, 1)])).unwrap().tau;
    (p, tau)
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn within(elapsed: Duration, limit: Duration) -> bool {
    elapsed < limit
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let (p, tau) = designed();
    let atoms = tau.len();
    let absorbing = check_absorbing(&tau, None);
    let gens = bndent_core::measures::default_generators(&p);
    let generating = check_generating(&tau, &gens, 3);
    let d = drift(&tau);
    let elapsed = start.elapsed();
    let drift_ok = d.coeffs == vec![q(-1, 1), q(-1, 1)];
    let pass = atoms < 200
        && tau.is_probability()
        && absorbing.holds
        && generating.is_verified()
        && drift_ok
        && within(elapsed, Duration::from_secs(1));
    check(
        pass,
        format!(
            "atoms={atoms} (<200 required), absorbing={}, generating={generating}, drift=({}, {}), {:.3}s",
            absorbing.holds,
            d.phi(0),
            d.phi(1),
            elapsed.as_secs_f64()
        ),
    )
}

/// Every subset's coefficient vector, summed directly.
fn brute_subset_sums(coeffs: &[BigRational]) -> BTreeSet<Vec<BigRational>> {
    let l = coeffs.len();
    (0u64..1 << l)
        .map(|mask| {
            (0..l)
                .map(|j| if mask & (1 << j) != 0 { -coeffs[j].clone() } else { BigRational::zero() })
                .collect()
        })
        .collect()
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let (_, tau) = designed();
    let rep = enumerate_spectrum(&drift(&tau)).unwrap();
    let p = ps(&[2, 3]);
    let expected: BTreeSet<Vec<BigRational>> =
        [[0, 0], [1, 0], [0, 1], [1, 1]].iter().map(|c| SymbolicLogValue::from_integers(&p, c).coeffs().to_vec()).collect();
    let got: BTreeSet<Vec<BigRational>> = rep.distinct.iter().map(|e| e.value.coeffs().to_vec()).collect();
    let floats: Vec<f64> = rep.distinct.iter().map(|e| e.value.to_f64()).collect();
    let float_ok = floats.len() == 4
        && floats.iter().zip([0.0, 2f64.ln(), 3f64.ln(), 6f64.ln()]).all(|(a, b)| (a - b).abs() < 1e-6)
        && (floats[3] - 6f64.ln()).abs() < 1e-12;
    let mut exact_ok = got == expected && float_ok;

    let all_primes = [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29];
    let mut rng = stream_rng(2, Stream::Control, 0);
    let mut agree = 0;
    for _ in 0..100 {
        let l = rng.gen_range(1..=10);
        let primes = ps(&all_primes[..l]);
        // Small numerators make coincident subset sums likely, which exercises deduplication.
        let coeffs: Vec<BigRational> = (0..l).map(|_| q(-rng.gen_range(1..=4), rng.gen_range(1..=3))).collect();
        let d = DriftVector { primes, coeffs: coeffs.clone() };
        let got: BTreeSet<Vec<BigRational>> =
            enumerate_spectrum(&d).unwrap().distinct.iter().map(|e| e.value.coeffs().to_vec()).collect();
        let want = brute_subset_sums(&coeffs);
        if got == want {
            agree += 1;
        }
    }
    exact_ok &= agree == 100;
    let elapsed = start.elapsed();
    check(
        exact_ok && within(elapsed, Duration::from_secs(5)),
        format!("designed spectrum {floats:?}, random vectors agreeing with oracle {agree}/100, {:.3}s", elapsed.as_secs_f64()),
    )
}

type Q128 = Ratio<i128>;

fn to_q128(r: &BigRational) -> Q128 {
    Q128::new(i128::try_from(r.numer()).unwrap(), i128::try_from(r.denom()).unwrap())
}

/// Points `X/D` of `Z[1/30]` with a fixed common denominator `D`; the class
/// of `x + sZ` is `X·s_minus mod D·s_plus`, since `(x - y)/s ∈ Z` iff
/// `D·s_plus` divides `(X - Y)·s_minus`.
struct Classes {
    d: i128,
    s_plus: i128,
    s_minus: i128,
}

impl Classes {
    fn numerator(&self, x: &SInteger) -> i128 {
        let (n, d) = x.numer_denom();
        let (n, d) = (i128::try_from(&n).unwrap(), i128::try_from(&d).unwrap());
        assert_eq!(self.d % d, 0, "denominator of {x} does not divide {}", self.d);
        n * (self.d / d)
    }

    fn key(&self, numerator: i128) -> i128 {
        (numerator * self.s_minus).rem_euclid(self.d * self.s_plus)
    }
}

/// Exponent vectors over (2,3,5) with `s_plus ≤ 1000` and every exponent ≥ -2.
fn sunits_up_to(bound: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let range = |p: i64| {
        let mut v = vec![-2, -1, 0];
        let mut k = 1;
        while p.pow(k) <= bound {
            v.push(k as i64);
            k += 1;
        }
        v
    };
    for &a in &range(2) {
        for &b in &range(3) {
            for &c in &range(5) {
                let plus = 2i64.pow(a.max(0) as u32) * 3i64.pow(b.max(0) as u32) * 5i64.pow(c.max(0) as u32);
                if plus <= bound {
                    out.push(vec![a, b, c]);
                }
            }
        }
    }
    out
}

fn random_kappa(p: &PrimeSet, rng: &mut impl Rng) -> FiniteMeasure<SInteger> {
    let atoms = rng.gen_range(1..=3);
    let raw: Vec<(SInteger, BigRational)> = (0..atoms)
        .map(|_| {
            let den = 2i64.pow(rng.gen_range(0..3)) * 3i64.pow(rng.gen_range(0..3)) * 5i64.pow(rng.gen_range(0..2));
            let x = SInteger::from_rational(p, &q(rng.gen_range(-50..=50), den)).unwrap();
            (x, q(rng.gen_range(1..=9), 1))
        })
        .collect();
    let total: BigRational = raw.iter().map(|(_, w)| w.clone()).sum();
    FiniteMeasure::from_atoms(raw.into_iter().map(|(x, w)| (x, w / &total)))
}

/// Brute-force check of `κ_s(u + r + sZ) = κ_s(r + sZ)` for `|u| ≤ 2·s_plus`.
///
/// Base points `r`: every atom of `kappa` (whose Z-orbits cover supp `ks`)
/// plus a spread of atoms of `ks`.
fn absorbs(kappa: &FiniteMeasure<SInteger>, ks: &FiniteMeasure<SInteger>, s: &SUnit, comparisons: &mut u64) -> bool {
    let s_plus = i64::try_from(&BigInt::from(s.s_plus())).unwrap();
    let s_minus = i128::try_from(&BigInt::from(s.s_minus())).unwrap();
    // κ denominators divide 2^2·3^2·5; κ_s atoms t - v add nothing new.
    let classes = Classes { d: 180, s_plus: s_plus as i128, s_minus };
    let support: Vec<i128> = ks.support().map(|t| classes.numerator(t)).collect();
    let mut mass: HashMap<i128, Q128> = HashMap::new();
    for (x, (_, w)) in support.iter().zip(ks.iter()) {
        *mass.entry(classes.key(*x)).or_insert_with(Q128::zero) += to_q128(w);
    }
    let coset_mass = |x: i128| mass.get(&classes.key(x)).copied().unwrap_or_else(Q128::zero);
    let stride = (support.len() / 4).max(1);
    let bases: Vec<i128> =
        kappa.support().map(|t| classes.numerator(t)).chain(support.iter().step_by(stride).copied()).collect();
    for r in bases {
        let m0 = coset_mass(r);
        for u in -2 * s_plus..=2 * s_plus {
            *comparisons += 1;
            if coset_mass(r + u as i128 * classes.d) != m0 {
                return false;
            }
        }
    }
    true
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let p = ps(&[2, 3, 5]);
    let units = sunits_up_to(1000);
    let mut rng = stream_rng(3, Stream::Control, 0);
    let kappas: Vec<FiniteMeasure<SInteger>> = (0..20).map(|_| random_kappa(&p, &mut rng)).collect();
    let mut comparisons = 0u64;
    let mut failures = Vec::new();
    for exps in &units {
        let s = SUnit::new(&p, exps.clone());
        for (k, kappa) in kappas.iter().enumerate() {
            let ks = absorb(kappa, &s);
            let mass_ok = ks.total_mass().is_one() && ks.iter().all(|(_, w)| w.is_positive());
            if !(mass_ok && absorbs(kappa, &ks, &s, &mut comparisons)) {
                failures.push(format!("s={s} kappa#{k}"));
            }
        }
    }
    // The oracle must reject an unabsorbed Dirac mass once s_plus > 1.
    let dirac = FiniteMeasure::dirac(SInteger::zero(&p));
    let control_rejected = !absorbs(&dirac, &dirac, &SUnit::new(&p, vec![1, 0, 0]), &mut 0);
    let elapsed = start.elapsed();
    check(
        failures.is_empty() && control_rejected && within(elapsed, Duration::from_secs(30)),
        format!(
            "{} S-units x 20 kappa, {comparisons} coset-mass comparisons, {} failures{}, control rejected {control_rejected}, {:.2}s",
            units.len(),
            failures.len(),
            failures.first().map(|f| format!(" (first: {f})")).unwrap_or_default(),
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let (p, tau) = designed();
    let exact = drift(&tau);
    let est = estimate_drift(&Sampler::new(&tau).unwrap(), &p, 100_000, 50, 4).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for j in 0..2 {
        let e = est.per_prime[j];
        let target = exact.phi_f64(j);
        pass &= e.within(target, 4.0) && e.relative_error(target) < 0.01;
        parts.push(format!("p={}: {:.6}±{:.6} vs {:.6}", p.prime(j), e.mean, e.stderr, target));
    }
    let elapsed = start.elapsed();
    check(pass && within(elapsed, Duration::from_secs(120)), format!("{}, {:.2}s", parts.join("; "), elapsed.as_secs_f64()))
}

fn criterion_5() -> Outcome {
    let (p, tau) = designed();
    let exact = drift(&tau);
    let sampler = Sampler::new(&tau).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for j in 0..2 {
        let slope = valuation_slope(&sampler, j, 100_000, 5);
        let expected = -bndent_core::logval::rational_to_f64(&exact.coeffs[j]);
        pass &= ((slope - expected) / expected).abs() <= 0.1;
        parts.push(format!("slope p={}: {slope:.4} vs {expected}", p.prime(j)));
    }

    let p2 = ps(&[2]);
    let step = AffineElement::new(SInteger::from_integer(&p2, 1), SUnit::new(&p2, vec![1]));
    let dirac = FiniteMeasure::dirac(step.clone());
    let set = sample_boundary_set(&dirac, &drift(&dirac), 32, 1, 5).unwrap();
    let z = &set.samples[0].points[0];
    let minus_one = PAdicApprox::from_sinteger(&SInteger::from_integer(&p2, -1), 0, 32);
    let digits_ok = z == &minus_one && z.digits().len() == 32 && z.digits().iter().all(|&d| d == 1);
    let t = Trajectory::from_increments(&p2, std::iter::repeat_n(step, set.samples[0].steps));
    pass &= digits_ok && t.translation(t.len()) + &SInteger::one(&p2) == SInteger::from_integer(&p2, BigInt::from(2).pow(t.len() as u32));
    parts.push(format!("(1,2)-walk boundary point {z} after {} steps", set.samples[0].steps));
    check(pass, parts.join("; "))
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let (p, tau) = designed();
    let exact = drift(&tau);
    let sampler = Sampler::new(&tau).unwrap();
    let registry = FamilyRegistry::with_defaults();
    let family = registry.get(DEFAULT_FAMILY).unwrap();
    let config = StationarityConfig::default();
    let set = sample_boundary_set(&tau, &exact, DEFAULT_PRECISION, 10_000, 6).unwrap();
    let rep = stationarity_test(&sampler, &set, family, 6, config);
    let per_prime_ok = (0..2).all(|j| rep.results.iter().filter(|r| r.prime_index == j).count() >= 3);
    let worst = rep
        .results
        .iter()
        .map(|r| r.estimate.mean.abs() / r.estimate.stderr.max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    let control = uniform_control_samples(&p, DEFAULT_PRECISION, 10_000, 6);
    let neg = stationarity_test(&sampler, &control, family, 6, config);
    let failed: Vec<&str> = neg.results.iter().filter(|r| !r.pass).map(|r| r.label.as_str()).collect();
    let elapsed = start.elapsed();
    check(
        rep.pass && per_prime_ok && !failed.is_empty() && within(elapsed, Duration::from_secs(300)),
        format!(
            "{} functions, max |delta|/stderr = {worst:.2}, insufficient {:.3}%, control failed {} ({}), {:.2}s",
            rep.results.len(),
            100.0 * rep.insufficient_fraction,
            failed.len(),
            failed.join(","),
            elapsed.as_secs_f64()
        ),
    )
}

fn criterion_7() -> Outcome {
    let (p, tau) = designed();
    let sampler = Sampler::new(&tau).unwrap();
    let e = estimate_entropy(&sampler, &p, 0b11, 1_000_000, 7).unwrap();
    let target = 2f64.ln() + 3f64.ln();
    let stat_ok = e.estimate.within(target, 4.0) && e.estimate.relative_error(target) < 0.01;
    let mut rng = stream_rng(7, Stream::Entropy, u64::MAX >> 20);
    let additive = (0..100_000).all(|_| {
        let g = sampler.sample(&mut rng);
        entropy_sample(g, 0b11) == &entropy_sample(g, 0b01) + &entropy_sample(g, 0b10)
    });
    check(
        stat_ok && additive,
        format!("{:.6}±{:.6} vs {target:.6}, per-sample additivity {additive}", e.estimate.mean, e.estimate.stderr),
    )
}

fn criterion_8() -> Outcome {
    let (_, tau) = designed();
    let config = WalkConfig { steps: 5_000, trials: 10, samples: 300, draws: 50_000, seed: 8, ..WalkConfig::default() };
    let manifest = || {
        let mut m = RunManifest::new(8);
        m.input("tau", bndent_core::measures::MeasureFile::Group(tau.clone()).render().as_bytes());
        m
    };
    let a = run_walk(&tau, &config, manifest()).unwrap();
    let b = run_walk(&tau, &config, manifest()).unwrap();
    let same = a.files == b.files && a.manifest.hash() == b.manifest.hash();
    let bytes: usize = a.files.iter().map(|f| f.1.len()).sum();
    check(same, format!("{} CSV files, {bytes} bytes, manifest {}", a.files.len(), &a.manifest.hash()[..16]))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("exact design", criterion_1),
        ("exact spectrum", criterion_2),
        ("absorption oracle", criterion_3),
        ("drift LLN", criterion_4),
        ("boundary convergence", criterion_5),
        ("stationarity", criterion_6),
        ("entropy", criterion_7),
        ("reproducibility", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        println!("criterion {} {name}: {} ({})", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
