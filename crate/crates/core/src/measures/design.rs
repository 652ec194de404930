//! Drift-targeted design of the product measure `τ(r,s) = κ_s(r)·ι(s)`.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{absorb, convolve, mean, FiniteMeasure};
use crate::error::{Error, Result};
use crate::group::AffineElement;
use crate::sarith::{PrimeSet, SInteger, SUnit};

/// Step measure `σ` on Z used to build each `ι_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepMeasure(FiniteMeasure<i64>);

impl StepMeasure {
    /// `¾δ₁ + ¼δ₋₁`.
    pub fn biased_coin() -> Self {
        let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        Self(FiniteMeasure::from_atoms([(1, q(3, 4)), (-1, q(1, 4))]))
    }

    /// Checks the measure is a probability on Z that generates Z as a
    /// semigroup and has non-zero mean.
    pub fn new(m: FiniteMeasure<i64>) -> Result<Self> {
        if !m.is_probability() {
            return Err(Error::InvalidSigma(format!("total mass {} is not 1", m.total_mass())));
        }
        let has_pos = m.support().any(|&n| n > 0);
        let has_neg = m.support().any(|&n| n < 0);
        let g = m.support().fold(0i64, |g, &n| g.gcd(&n));
        if !(has_pos && has_neg && g == 1) {
            return Err(Error::InvalidSigma("support does not generate Z as a semigroup".into()));
        }
        if mean(&m).is_zero() {
            return Err(Error::InvalidSigma("mean must be non-zero".into()));
        }
        Ok(Self(m))
    }

    /// Parses `biased-coin` or a list of `weight:point` pairs, e.g. `3/4:1,1/4:-1`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "biased-coin" || s == "default" {
            return Ok(Self::biased_coin());
        }
        let bad = |t: &str| Error::InvalidSigma(format!("`{t}` is not of the form weight:point"));
        let mut atoms = Vec::new();
        for part in s.split(',') {
            let (w, n) = part.split_once(':').ok_or_else(|| bad(part))?;
            let w = parse_rational(w).ok_or_else(|| bad(part))?;
            let n: i64 = n.trim().parse().map_err(|_| bad(part))?;
            if !w.is_positive() {
                return Err(Error::InvalidSigma(format!("non-positive weight in `{part}`")));
            }
            atoms.push((n, w));
        }
        Self::new(FiniteMeasure::from_atoms(atoms))
    }

    pub fn measure(&self) -> &FiniteMeasure<i64> {
        &self.0
    }

    pub fn mean(&self) -> BigRational {
        mean(&self.0)
    }
}

impl Default for StepMeasure {
    fn default() -> Self {
        Self::biased_coin()
    }
}

impl fmt::Display for StepMeasure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(n, w)| format!("{w}:{n}")).collect();
        write!(f, "{}", parts.join(","))
    }
}

pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            (!d.is_zero()).then(|| BigRational::new(n, d))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

/// `ι = w·σ^{*N} + (1-w)·δ_0` together with the chosen `N` and `w`.
#[derive(Clone, Debug)]
pub struct IotaDesign {
    pub measure: FiniteMeasure<i64>,
    pub n: u32,
    pub w: BigRational,
}

/// Smallest `N` with `w = c/(E[σ]·N) ≤ 1` whose support `supp(σ^{*N})`, plus
/// `0` when `w < 1`, covers `goal`.
pub fn design_iota(target: &BigRational, sigma: &StepMeasure, goal: &BTreeSet<i64>) -> Result<IotaDesign> {
    if !target.is_positive() {
        return Err(Error::NonPositiveTarget(target.to_string()));
    }
    let e = sigma.mean();
    if e.is_zero() {
        return Err(Error::InvalidSigma("mean must be non-zero".into()));
    }
    let ratio = target / &e;
    if !ratio.is_positive() {
        return Err(Error::InvalidSigma(format!("mean {e} has the wrong sign for target {target}")));
    }
    precheck_goal(sigma.measure(), goal)?;

    let n_min = ratio.ceil().to_integer().to_u32().ok_or_else(|| {
        Error::InvalidArgument(format!("target {target} needs an impractically large convolution power"))
    })?;
    let n_min = n_min.max(1);
    let reach = goal.iter().map(|g| g.unsigned_abs()).max().unwrap_or(0) as u32;
    let n_cap = n_min + 64 + 4 * reach;

    let mut power = super::convolution_power(sigma.measure(), n_min);
    let mut missing = None;
    for n in n_min..=n_cap {
        if n > n_min {
            power = convolve(&power, sigma.measure());
        }
        let w = &ratio / BigRational::from_integer(BigInt::from(n));
        let covers_zero = w < BigRational::one() || power.contains(&0);
        missing = goal.iter().copied().find(|g| !(power.contains(g) || (*g == 0 && covers_zero)));
        if missing.is_none() {
            let measure = FiniteMeasure::mix(&w, &power, &FiniteMeasure::dirac(0));
            return Ok(IotaDesign { measure, n, w });
        }
    }
    Err(Error::UnreachableSupport { point: missing.unwrap_or(0) })
}

/// Rejects goals that no convolution power can reach: every point of
/// `supp(σ^{*N})` is `≡ N·a (mod d)` for `d` the gcd of support differences.
fn precheck_goal(sigma: &FiniteMeasure<i64>, goal: &BTreeSet<i64>) -> Result<()> {
    let pts: Vec<i64> = sigma.support().copied().collect();
    let d = pts.windows(2).fold(0i64, |g, w| g.gcd(&(w[1] - w[0])));
    let max = *pts.last().unwrap_or(&0);
    let min = *pts.first().unwrap_or(&0);
    let nonzero: Vec<i64> = goal.iter().copied().filter(|&g| g != 0).collect();
    for &g in &nonzero {
        if (g > 0 && max <= 0) || (g < 0 && min >= 0) {
            return Err(Error::UnreachableSupport { point: g });
        }
    }
    if d > 1 {
        if let Some(&first) = nonzero.first() {
            if let Some(&clash) = nonzero.iter().find(|&&g| (g - first).rem_euclid(d) != 0) {
                return Err(Error::UnreachableSupport { point: clash });
            }
        }
    }
    Ok(())
}

/// `{(±1,1)} ∪ {(0, p_i^{±1})}`.
pub fn default_generators(primes: &PrimeSet) -> Vec<AffineElement> {
    let mut gens = vec![AffineElement::translation(primes, 1), AffineElement::translation(primes, -1)];
    for i in 0..primes.len() {
        gens.push(AffineElement::dilation(SUnit::prime_power(primes, i, 1)));
        gens.push(AffineElement::dilation(SUnit::prime_power(primes, i, -1)));
    }
    gens
}

/// `τ(r,s) = κ_s(r) · prod_i ι_i(n_i(s))`, with `κ_s` the absorbed `κ`.
pub fn build_tau(
    primes: &PrimeSet,
    kappa: &FiniteMeasure<SInteger>,
    iotas: &[FiniteMeasure<i64>],
) -> FiniteMeasure<AffineElement> {
    assert_eq!(iotas.len(), primes.len(), "one ι_i per prime");
    let mut dilations: Vec<(Vec<i64>, BigRational)> = vec![(Vec::new(), BigRational::one())];
    for iota in iotas {
        dilations = dilations
            .into_iter()
            .flat_map(|(exps, w)| {
                iota.iter().map(move |(n, wn)| {
                    let mut e = exps.clone();
                    e.push(*n);
                    (e, &w * wn)
                })
            })
            .collect();
    }
    let mut tau = FiniteMeasure::new();
    for (exps, w) in dilations {
        let s = SUnit::new(primes, exps);
        for (r, wr) in absorb(kappa, &s).iter() {
            tau.add(AffineElement::new(r.clone(), s.clone()), wr * &w);
        }
    }
    tau
}

#[derive(Clone, Debug)]
pub struct DesignConfig {
    /// `c_i` with `β_i = c_i·log p_i`.
    pub targets: Vec<BigRational>,
    pub sigma: StepMeasure,
    pub generators: Vec<AffineElement>,
}

impl DesignConfig {
    pub fn new(primes: &PrimeSet, targets: Vec<BigRational>) -> Self {
        Self { targets, sigma: StepMeasure::default(), generators: default_generators(primes) }
    }
}

#[derive(Clone, Debug)]
pub struct TauDesign {
    pub tau: FiniteMeasure<AffineElement>,
    pub kappa: FiniteMeasure<SInteger>,
    pub iotas: Vec<IotaDesign>,
}

/// Finitely supported, generating, Λ-absorbing `τ` with `φ_{p_i}(τ) = -c_i·log p_i`.
pub fn design_tau(primes: &PrimeSet, config: &DesignConfig) -> Result<TauDesign> {
    if config.targets.len() != primes.len() {
        return Err(Error::InvalidArgument(format!(
            "{} drift targets given for {} primes",
            config.targets.len(),
            primes.len()
        )));
    }
    if config.generators.is_empty() {
        return Err(Error::InvalidArgument("empty generator list".into()));
    }
    let kappa = FiniteMeasure::uniform(config.generators.iter().map(|g| g.r.clone()));
    let iotas = config
        .targets
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let goal: BTreeSet<i64> = config.generators.iter().map(|g| g.s.exps()[i]).collect();
            design_iota(c, &config.sigma, &goal)
        })
        .collect::<Result<Vec<_>>>()?;
    let measures: Vec<_> = iotas.iter().map(|d| d.measure.clone()).collect();
    let tau = build_tau(primes, &kappa, &measures);
    Ok(TauDesign { tau, kappa, iotas })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{check_absorbing, convolution_power, q};
    use proptest::prelude::*;

    fn goal(pts: &[i64]) -> BTreeSet<i64> {
        pts.iter().copied().collect()
    }

    #[test]
    fn design_iota_unit_target() {
        let sigma = StepMeasure::biased_coin();
        let d = design_iota(&q(1, 1), &sigma, &goal(&[-1, 0, 1])).unwrap();
        assert_eq!(d.n, 3);
        assert_eq!(d.w, q(2, 3));
        let expected = FiniteMeasure::mix(&q(2, 3), &convolution_power(sigma.measure(), 3), &FiniteMeasure::dirac(0));
        assert_eq!(d.measure, expected);
        assert_eq!(mean(&d.measure), q(1, 1));
        assert_eq!(d.measure.support().copied().collect::<Vec<_>>(), vec![-3, -1, 0, 1, 3]);
    }

    #[test]
    fn design_iota_small_target_uses_minimal_power() {
        let d = design_iota(&q(1, 100), &StepMeasure::biased_coin(), &goal(&[-1, 0, 1])).unwrap();
        assert_eq!(d.n, 1);
        assert_eq!(d.w, q(1, 50));
        assert_eq!(mean(&d.measure), q(1, 100));
    }

    #[test]
    fn design_iota_errors() {
        let sigma = StepMeasure::biased_coin();
        let err = design_iota(&q(0, 1), &sigma, &goal(&[0])).unwrap_err();
        assert_eq!(err.to_string(), "drift target must be positive (got 0)");
        // Both parities requested from a parity-rigid power.
        let err = design_iota(&q(1, 1), &sigma, &goal(&[1, 2])).unwrap_err();
        assert_eq!(err, Error::UnreachableSupport { point: 2 });
    }

    #[test]
    fn w_equal_one_needs_zero_in_power() {
        // c = 1 with E[σ] = 1/2: N = 2 gives w = 1 and supp σ^{*2} = {-2, 0, 2}.
        let d = design_iota(&q(1, 1), &StepMeasure::biased_coin(), &goal(&[0, 2])).unwrap();
        assert_eq!((d.n, d.w.clone()), (2, q(1, 1)));
        assert!(d.measure.contains(&0));
        // A σ with no zero in even powers forces N past the w = 1 boundary.
        let sigma = StepMeasure::parse("1/2:3,1/2:-1").unwrap();
        let d = design_iota(&q(1, 1), &sigma, &goal(&[0])).unwrap();
        assert_eq!(d.n, 2);
        assert_eq!(d.w, q(1, 2));
    }

    #[test]
    fn step_measure_parsing() {
        assert_eq!(StepMeasure::parse("3/4:1,1/4:-1").unwrap(), StepMeasure::biased_coin());
        assert_eq!(StepMeasure::biased_coin().to_string(), "1/4:-1,3/4:1");
        assert!(StepMeasure::parse("1/2:1,1/2:2").is_err());
        assert!(StepMeasure::parse("1/2:1,1/2:-1").is_err());
        assert!(StepMeasure::parse("1/2:1,1/4:-1").is_err());
    }

    #[test]
    fn build_tau_examples() {
        let ps = PrimeSet::new(vec![2, 3]).unwrap();
        let tau = build_tau(
            &ps,
            &FiniteMeasure::dirac(SInteger::zero(&ps)),
            &[FiniteMeasure::dirac(0), FiniteMeasure::dirac(0)],
        );
        assert_eq!(tau, FiniteMeasure::dirac(AffineElement::identity(&ps)));
    }

    #[test]
    fn designed_tau_support_and_marginal() {
        let ps = PrimeSet::new(vec![2, 3]).unwrap();
        let design = design_tau(&ps, &DesignConfig::new(&ps, vec![q(1, 1), q(1, 1)])).unwrap();
        assert!(design.tau.is_probability());
        for g in default_generators(&ps) {
            assert!(design.tau.contains(&g), "{g} missing from support");
        }
        // Marginal on S is the product of the ι_i.
        let marginal = design.tau.push_forward(|g| g.s.exps().to_vec());
        for (exps, w) in marginal.iter() {
            let expected = design.iotas[0].measure.weight(&exps[0]) * design.iotas[1].measure.weight(&exps[1]);
            assert_eq!(*w, expected);
        }
        assert_eq!(marginal.len(), 25);
    }

    fn kappa_strategy() -> impl Strategy<Value = Vec<(i64, i64, i64)>> {
        proptest::collection::vec((-40i64..40, 0u32..3, 1i64..5), 1..4)
            .prop_map(|v| v.into_iter().map(|(n, a, w)| (n, 2i64.pow(a), w)).collect())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn absorbed_dirac_iota_is_absorbing(atoms in kappa_strategy(), e0 in -2i64..=4, e1 in -2i64..=3) {
            let ps = PrimeSet::new(vec![2, 3]).unwrap();
            let total: i64 = atoms.iter().map(|a| a.2).sum();
            let kappa = FiniteMeasure::from_atoms(
                atoms.iter().map(|&(n, d, w)| (SInteger::from_ratio(&ps, n, d).unwrap(), q(w, total))),
            );
            let tau = build_tau(&ps, &kappa, &[FiniteMeasure::dirac(e0), FiniteMeasure::dirac(e1)]);
            prop_assert!(tau.is_probability());
            prop_assert!(check_absorbing(&tau, None).holds);
        }

        #[test]
        fn designed_iota_mean_is_exact(num in 1i64..400, den in 1i64..60) {
            let c = q(num, den);
            let d = design_iota(&c, &StepMeasure::biased_coin(), &goal(&[-1, 0, 1])).unwrap();
            prop_assert_eq!(mean(&d.measure), c);
            prop_assert!(d.w.is_positive() && d.w <= q(1, 1));
            prop_assert!(d.measure.is_probability());
        }
    }
}
