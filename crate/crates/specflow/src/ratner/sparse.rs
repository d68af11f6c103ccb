//! Crossing sequences N(x + nα, x' + nα) = [x' + nα] − [x + nα] and sparseness statistics.

use crate::cfrac::RealRep;
use crate::circle::{Circle, Lift};
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// x_n for n in [0, n_max), stored by its nonzero entries.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseSequence {
    pub n_max: u64,
    pub r: i64,
    pub nonzero: Vec<(u64, i64)>,
}

impl SparseSequence {
    pub fn from_values(values: &[i64], r: i64) -> Result<Self> {
        if r <= 0 {
            return Err(Error::invalid("R must be positive"));
        }
        if let Some((n, v)) = values.iter().enumerate().find(|(_, v)| v.abs() > r) {
            return Err(Error::invalid(format!("x_{n} = {v} exceeds R = {r}")));
        }
        let nonzero = values.iter().enumerate().filter(|(_, &v)| v != 0).map(|(n, &v)| (n as u64, v)).collect();
        Ok(SparseSequence { n_max: values.len() as u64, r, nonzero })
    }

    pub fn value(&self, n: u64) -> i64 {
        match self.nonzero.binary_search_by_key(&n, |e| e.0) {
            Ok(i) => self.nonzero[i].1,
            Err(_) => 0,
        }
    }

    /// k_0 = 0 followed by every n ≥ 1 with x_n ≠ 0.
    pub fn crossings(&self) -> Vec<u64> {
        merged_crossings(&[self])
    }
}

/// k_0 = 0 followed by every n ≥ 1 at which some sequence is nonzero.
pub fn merged_crossings(seqs: &[&SparseSequence]) -> Vec<u64> {
    let mut k: Vec<u64> = seqs.iter().flat_map(|s| s.nonzero.iter().map(|e| e.0)).filter(|&n| n >= 1).collect();
    k.sort_unstable();
    k.dedup();
    k.insert(0, 0);
    k
}

/// The crossing sequence of the pair (x, x') under x ↦ x + α, from a real α.
pub fn crossing_sequence(alpha: &RealRep, x: f64, x_prime: f64, n_max: u64) -> Result<SparseSequence> {
    if !x.is_finite() || !x_prime.is_finite() {
        return Err(Error::invalid("points must be finite"));
    }
    let (a, err) = alpha.to_circle();
    crossing_sequence_lifts(a, err, Lift::from_f64(x), Lift::from_f64(x_prime), n_max)
}

/// Same, for exact lifts and a fixed-point step with per-step error `step_err` (ulps).
pub fn crossing_sequence_lifts(step: Circle, step_err: u128, x: Lift, x_prime: Lift, n_max: u64) -> Result<SparseSequence> {
    if x_prime.diff_f64(x).abs() >= 0.5 {
        return Err(Error::invalid("need |x − x'| < 1/2"));
    }
    let (mut p, mut q) = (x, x_prime);
    let mut nonzero = Vec::new();
    for n in 0..n_max {
        let v = q.floor() - p.floor();
        if n > 0 {
            let e = step_err.saturating_mul(n as u128);
            if p.frac.norm() <= e || q.frac.norm() <= e {
                return Err(Error::precision(format!("crossing at n = {n} undecidable at this precision")));
            }
        }
        if v != 0 {
            nonzero.push((n, v));
        }
        p = p.add_frac(step);
        q = q.add_frac(step);
    }
    Ok(SparseSequence { n_max, r: 1, nonzero })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseVerdict {
    pub a_sparse: bool,
    pub ab_sparse: bool,
    /// min of k_{m+1} − k_m over m ≥ 1.
    pub min_gap: Option<u64>,
    /// max of k_{m+1} − k_m over m ≥ 0.
    pub max_gap: Option<u64>,
    /// n_max − 1 − k_last: a lower bound for the next, unobserved gap.
    pub open_tail: u64,
    pub crossings: usize,
}

/// With fewer than two crossings the (a, b) verdict is false by convention.
pub fn sparseness_check(seq: &SparseSequence, a: f64, b: f64) -> SparseVerdict {
    let k = seq.crossings();
    let gaps: Vec<u64> = k.windows(2).map(|w| w[1] - w[0]).collect();
    let min_gap = gaps.iter().skip(1).copied().min();
    let max_gap = gaps.iter().copied().max();
    let last = *k.last().unwrap_or(&0);
    let open_tail = seq.n_max.saturating_sub(1).saturating_sub(last);
    let a_sparse = gaps.iter().skip(1).all(|&g| g as f64 >= a);
    let ab_sparse = a_sparse && k.len() > 2 && gaps.iter().all(|&g| g as f64 <= b) && open_tail as f64 <= b;
    SparseVerdict { a_sparse, ab_sparse, min_gap, max_gap, open_tail, crossings: k.len() - 1 }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseSumVerdict {
    /// |Σ_{k<n} x_k| ≤ R(1 + n/a) for every n ≤ n_max.
    pub holds: bool,
    /// max over n of |Σ_{k<n} x_k| / (R(1 + n/a)).
    pub worst_ratio: f64,
    pub worst_n: u64,
    /// The same with R(1 + [x_0 ≠ 0] + n/a). A nonzero x_0 followed by a short first gap
    /// can break the plain form (x_0 = x_1 = 1, a = 3 gives 2 > 5/3); this one always holds.
    pub holds_with_head: bool,
}

/// Partial sums only move right after a nonzero entry while the bounds grow, so those n
/// are the only ones to check.
pub fn sparse_sum_bound(seq: &SparseSequence, a: f64) -> SparseSumVerdict {
    let r = seq.r as f64;
    let head = if seq.value(0) != 0 { 1.0 } else { 0.0 };
    let mut s = 0i64;
    let (mut worst_ratio, mut worst_n, mut holds_with_head) = (0.0f64, 0u64, true);
    for &(k, v) in &seq.nonzero {
        s += v;
        let n = k + 1;
        let ratio = s.abs() as f64 / (r * (1.0 + n as f64 / a));
        if ratio > worst_ratio {
            worst_ratio = ratio;
            worst_n = n;
        }
        holds_with_head &= s.abs() as f64 <= r * (1.0 + head + n as f64 / a);
    }
    SparseSumVerdict { holds: worst_ratio <= 1.0, worst_ratio, worst_n, holds_with_head }
}
