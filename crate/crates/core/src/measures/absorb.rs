use std::collections::{BTreeMap, HashMap};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::FiniteMeasure;
use crate::group::{AffineElement, CosetKey};
use crate::sarith::{SInteger, SUnit};

/// Representatives `V_s = {0, 1, ..., s_plus - 1}` of `Z / (sZ ∩ Z)`.
#[derive(Clone, Debug)]
pub struct CosetReps {
    pub s: SUnit,
    pub s_plus: BigUint,
    pub reps: Vec<SInteger>,
}

pub fn coset_reps(s: &SUnit) -> CosetReps {
    let s_plus = s.s_plus();
    let count = s_plus.to_u64().expect("index [Z : sZ ∩ Z] does not fit in u64");
    let reps = (0..count).map(|v| SInteger::from_integer(s.primes(), v)).collect();
    CosetReps { s: s.clone(), s_plus, reps }
}

/// `κ_s(t) = |V_s|^{-1} · sum_{v ∈ V_s} κ(t + v)`.
pub fn absorb(kappa: &FiniteMeasure<SInteger>, s: &SUnit) -> FiniteMeasure<SInteger> {
    let reps = coset_reps(s);
    let share = BigRational::from_integer(BigInt::from(reps.s_plus.clone()));
    let mut out = FiniteMeasure::new();
    for (t, w) in kappa.iter() {
        let part = w / &share;
        for v in &reps.reps {
            out.add(t - v, part.clone());
        }
    }
    out
}

/// One `(K, u)` comparison: mass of coset `K` against mass of `(u,1)·K`.
#[derive(Clone, Copy, Debug)]
pub struct ShiftCheck {
    pub coset: usize,
    pub shift: i64,
    pub image: usize,
}

#[derive(Clone, Debug)]
pub struct AbsorbingReport {
    pub holds: bool,
    pub shift_range: u64,
    /// Every coset key touched, with its τ-mass. Indices `0..support_cosets`
    /// are the cosets carrying mass.
    pub cosets: Vec<(CosetKey, BigRational)>,
    pub support_cosets: usize,
    pub transcript: Vec<ShiftCheck>,
    pub first_violation: Option<ShiftCheck>,
}

impl AbsorbingReport {
    pub fn describe(&self, check: &ShiftCheck) -> String {
        let (key, before) = &self.cosets[check.coset];
        let after = &self.cosets[check.image].1;
        format!("K={key} u={} mass(K)={before} mass(u·K)={after}", check.shift)
    }

    /// Justification for checking only a finite shift window.
    pub fn sufficiency_note(&self) -> &'static str {
        "coset masses are periodic in the shift u with period s_plus; |u| <= 2*max(s_plus) covers every residue"
    }
}

/// Exact check of `τ((u,1)·γΛ) = τ(γΛ)` for all support cosets and `|u| ≤ shift_range`.
///
/// `shift_range = None` uses `2·max s_plus` over the support.
pub fn check_absorbing(tau: &FiniteMeasure<AffineElement>, shift_range: Option<u64>) -> AbsorbingReport {
    let mut masses: BTreeMap<CosetKey, BigRational> = BTreeMap::new();
    for (g, w) in tau.iter() {
        *masses.entry(g.coset_key()).or_insert_with(BigRational::zero) += w;
    }
    let max_plus = masses.keys().map(|k| k.s.s_plus().to_u64().unwrap_or(u64::MAX)).max().unwrap_or(1);
    let range = shift_range.unwrap_or(2 * max_plus);

    let mut cosets: Vec<(CosetKey, BigRational)> = masses.iter().map(|(k, m)| (k.clone(), m.clone())).collect();
    let support_cosets = cosets.len();
    let mut index: HashMap<CosetKey, usize> =
        cosets.iter().enumerate().map(|(i, (k, _))| (k.clone(), i)).collect();

    let mut transcript = Vec::new();
    let mut first_violation = None;
    'outer: for c in 0..support_cosets {
        let key = cosets[c].0.clone();
        let period = key.s.s_plus().to_i64().unwrap_or(i64::MAX);
        let mut by_residue: HashMap<i64, usize> = HashMap::new();
        for u in -(range as i64)..=(range as i64) {
            if u == 0 {
                continue;
            }
            let class = u.rem_euclid(period);
            let image = *by_residue.entry(class).or_insert_with(|| {
                let shifted = key.shifted(class);
                *index.entry(shifted.clone()).or_insert_with(|| {
                    let m = masses.get(&shifted).cloned().unwrap_or_else(BigRational::zero);
                    cosets.push((shifted, m));
                    cosets.len() - 1
                })
            });
            let check = ShiftCheck { coset: c, shift: u, image };
            transcript.push(check);
            if cosets[image].1 != cosets[c].1 {
                first_violation = Some(check);
                break 'outer;
            }
        }
    }

    AbsorbingReport {
        holds: first_violation.is_none(),
        shift_range: range,
        cosets,
        support_cosets,
        transcript,
        first_violation,
    }
}
