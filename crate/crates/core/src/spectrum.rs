//! Boundary entropies `h(Y_J) = sum_{j ∈ J} -φ_{p_j}` and the spectrum over all `J`.

use std::collections::HashSet;

use num_traits::Signed;

use crate::error::{Error, Result};
pub use crate::logval::SymbolicLogValue;
use crate::measures::DriftVector;

/// Index subset of `{0, ..., l-1}` as a bitmask.
pub type IndexSet = u64;

pub fn indices(mask: IndexSet, l: usize) -> impl Iterator<Item = usize> {
    (0..l).filter(move |j| mask >> j & 1 == 1)
}

/// `sum_{j ∈ J} (-c_j)·log p_j`; every `c_j` with `j ∈ J` must be negative.
pub fn entropy_of_boundary(drift: &DriftVector, subset: IndexSet) -> Result<SymbolicLogValue> {
    let l = drift.coeffs.len();
    if l < 64 && subset >> l != 0 {
        return Err(Error::InvalidArgument(format!("index set {subset:#b} exceeds {l} primes")));
    }
    let mut value = SymbolicLogValue::zero(&drift.primes);
    for j in indices(subset, l) {
        let c = &drift.coeffs[j];
        if !c.is_negative() {
            return Err(Error::DriftHypothesis { index: j + 1, prime: drift.primes.prime(j), coeff: c.to_string() });
        }
        value = &value + &SymbolicLogValue::single(&drift.primes, j, -c);
    }
    Ok(value)
}

#[derive(Clone, Debug)]
pub struct SpectrumEntry {
    pub subset: IndexSet,
    pub value: SymbolicLogValue,
}

#[derive(Clone, Debug)]
pub struct SpectrumReport {
    /// One entry per subset, indexed by bitmask.
    pub entries: Vec<SpectrumEntry>,
    /// Distinct values (first subset attaining each), sorted by float rendering.
    pub distinct: Vec<SpectrumEntry>,
}

impl SpectrumReport {
    pub fn entry(&self, subset: IndexSet) -> &SymbolicLogValue {
        &self.entries[subset as usize].value
    }

    /// Plain-text table: subset bitmask, coefficient vector, float value.
    pub fn to_table(&self, l: usize) -> String {
        let mut out = format!("{:<width$}  {:<24}  {}\n", "subset", "coefficients", "value", width = l.max(6));
        for e in &self.distinct {
            out.push_str(&format!(
                "{:<width$}  {:<24}  {:.12}\n",
                format!("{:0l$b}", e.subset, l = l),
                e.value.coeff_string(),
                e.value.to_f64(),
                width = l.max(6)
            ));
        }
        out
    }

    pub fn to_csv(&self, l: usize) -> String {
        let mut out = String::from("subset,coefficients,value\n");
        for e in &self.distinct {
            out.push_str(&format!("{:0l$b},\"{}\",{:.17e}\n", e.subset, e.value.coeff_string(), e.value.to_f64(), l = l));
        }
        out
    }
}

/// All `2^l` subset entropies, deduplicated by exact coefficient equality.
pub fn enumerate_spectrum(drift: &DriftVector) -> Result<SpectrumReport> {
    let l = drift.coeffs.len();
    if l >= 30 {
        return Err(Error::InvalidArgument(format!("2^{l} subsets is too many to enumerate")));
    }
    // Validate negativity once; the per-subset calls then cannot fail.
    entropy_of_boundary(drift, (1u64 << l) - 1)?;
    let singles: Vec<SymbolicLogValue> =
        (0..l).map(|j| SymbolicLogValue::single(&drift.primes, j, -&drift.coeffs[j])).collect();
    let mut entries: Vec<SpectrumEntry> = Vec::with_capacity(1 << l);
    entries.push(SpectrumEntry { subset: 0, value: SymbolicLogValue::zero(&drift.primes) });
    for mask in 1u64..(1 << l) {
        // Reuse the entry without the highest set bit.
        let top = 63 - mask.leading_zeros() as usize;
        let value = &entries[(mask ^ (1 << top)) as usize].value + &singles[top];
        entries.push(SpectrumEntry { subset: mask, value });
    }
    let mut seen = HashSet::new();
    let mut distinct: Vec<SpectrumEntry> = entries.iter().filter(|e| seen.insert(e.value.clone())).cloned().collect();
    distinct.sort_by(|a, b| a.value.to_f64().total_cmp(&b.value.to_f64()).then(a.subset.cmp(&b.subset)));
    Ok(SpectrumReport { entries, distinct })
}
