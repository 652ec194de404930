//! Bounded test functions `u` on `prod_j Q_{p_j}` for the stationarity test.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::padic::PAdicApprox;
use crate::sarith::PrimeSet;

pub type Evaluator = Box<dyn Fn(&[PAdicApprox]) -> Option<f64> + Send + Sync>;

/// A single `u`; `None` means the point is not known precisely enough.
pub struct TestFunction {
    pub label: String,
    pub prime_index: usize,
    pub eval: Evaluator,
}

impl TestFunction {
    pub fn evaluate(&self, x: &[PAdicApprox]) -> Option<f64> {
        (self.eval)(x)
    }
}

impl std::fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TestFunction").field("label", &self.label).field("prime_index", &self.prime_index).finish()
    }
}

pub trait TestFamily: Send + Sync {
    fn name(&self) -> &str;
    fn summary(&self) -> &str;
    fn functions(&self, primes: &PrimeSet) -> Vec<TestFunction>;
}

/// `u_{j,L}(x) = clamp(v_{p_j}(x_j), -L, L)`.
#[derive(Clone, Debug)]
pub struct ClampedValuation {
    pub levels: Vec<i64>,
}

impl Default for ClampedValuation {
    fn default() -> Self {
        Self { levels: vec![1, 2, 4] }
    }
}

pub fn clamped_valuation(x: &PAdicApprox, level: i64) -> Option<f64> {
    match x.valuation() {
        Some(v) => Some(v.clamp(-level, level) as f64),
        None if x.valuation_lower_bound() >= level => Some(level as f64),
        None => None,
    }
}

impl TestFamily for ClampedValuation {
    fn name(&self) -> &str {
        "clamped-valuation"
    }

    fn summary(&self) -> &str {
        "clamp(v_p(x_j), -L, L) for each prime and L in {1, 2, 4}"
    }

    fn functions(&self, primes: &PrimeSet) -> Vec<TestFunction> {
        let mut out = Vec::new();
        for (j, p) in primes.iter().enumerate() {
            for &level in &self.levels {
                out.push(TestFunction {
                    label: format!("clamp_v{p}_L{level}"),
                    prime_index: j,
                    eval: Box::new(move |x| clamped_valuation(&x[j], level)),
                });
            }
        }
        out
    }
}

/// Indicators of the residue balls `a + p_j Z_{p_j}`.
#[derive(Clone, Debug, Default)]
pub struct ResidueIndicator;

pub fn in_residue_class(x: &PAdicApprox, a: u64) -> Option<f64> {
    if x.valuation().is_some_and(|v| v < 0) {
        return Some(0.0);
    }
    let r = x.residue_mod(1)?;
    Some(if r == a.into() { 1.0 } else { 0.0 })
}

impl TestFamily for ResidueIndicator {
    fn name(&self) -> &str {
        "residue"
    }

    fn summary(&self) -> &str {
        "indicator of x_j in a + p Z_p for each prime and residue a"
    }

    fn functions(&self, primes: &PrimeSet) -> Vec<TestFunction> {
        let mut out = Vec::new();
        for (j, p) in primes.iter().enumerate() {
            for a in 0..p {
                out.push(TestFunction {
                    label: format!("res{p}_{a}"),
                    prime_index: j,
                    eval: Box::new(move |x| in_residue_class(&x[j], a)),
                });
            }
        }
        out
    }
}

/// Test families by name.
pub struct FamilyRegistry {
    families: BTreeMap<String, Box<dyn TestFamily>>,
}

pub const DEFAULT_FAMILY: &str = "clamped-valuation";

impl FamilyRegistry {
    pub fn empty() -> Self {
        Self { families: BTreeMap::new() }
    }

    pub fn with_defaults() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(ClampedValuation::default()));
        r.register(Box::new(ResidueIndicator));
        r
    }

    pub fn register(&mut self, family: Box<dyn TestFamily>) {
        self.families.insert(family.name().to_string(), family);
    }

    pub fn get(&self, name: &str) -> Result<&dyn TestFamily> {
        self.families.get(name).map(|f| f.as_ref()).ok_or_else(|| Error::UnknownFamily {
            name: name.to_string(),
            known: self.names().join(", "),
        })
    }

    pub fn names(&self) -> Vec<&str> {
        self.families.keys().map(String::as_str).collect()
    }
}

impl Default for FamilyRegistry {
    fn default() -> Self {
        Self::with_defaults()
    }
}
