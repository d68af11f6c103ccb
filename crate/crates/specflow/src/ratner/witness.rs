//! Shadowing witnesses: a window [M, M + L) on which f^(n)(q) − f^(n)(p) stays within ε
//! of a fixed shift p.

use super::model::CocycleModel;
use super::{lift_pair, LiftedPoint};
use crate::circle::Circle;
use crate::error::{Error, Result};
use crate::roof::RoofFunction;
use crate::rotations::RotationVector2;
use crate::sum::Neumaier;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatnerWitness {
    pub m: u64,
    pub l: u64,
    pub p: f64,
    pub good_fraction: f64,
    pub eps: f64,
    /// L/M.
    pub ratio: f64,
    /// Torus distance of the pair.
    pub d: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessChecks {
    /// M ≥ C₁/d.
    pub m_lower: bool,
    /// M ≤ 3sC₂/d + 2.
    pub m_upper: bool,
    /// L/M ≥ κ(ε).
    pub ratio: bool,
    /// p₀ ≤ |p| ≤ p₁.
    pub shift: bool,
    /// good_fraction > 1 − ε.
    pub good: bool,
    /// M, L ≥ N.
    pub long_enough: bool,
}

impl WitnessChecks {
    pub fn all(&self) -> bool {
        self.m_lower && self.m_upper && self.ratio && self.shift && self.good && self.long_enough
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstructiveWitness {
    pub witness: RatnerWitness,
    pub checks: WitnessChecks,
    pub valid: bool,
    pub eps_requested: f64,
    /// ε was above the admissible cap and was lowered to 0.999·cap.
    pub clamped: bool,
    pub kappa: f64,
    pub delta: f64,
    /// Whether d < δ(ε, N). The construction runs either way; the checks decide validity.
    pub below_delta: bool,
    pub n: u64,
    pub m1: usize,
    pub m2: usize,
    /// 1 or 2: which of M₁, M₂ carried the shift.
    pub chosen: u8,
    /// The crossing times k_0 = 0, k_1, … that were scanned.
    pub crossings: Vec<u64>,
    pub horizon: u64,
    /// L − dL/C₁ − 1.
    pub good_lower_bound: f64,
    /// Steps n ≤ M + L at which |D_n − Σ h_j N_j^(n)| exceeded C₀nd plus the boundary terms.
    pub drift_violations: usize,
}

// D_n = f^(n)(q) − f^(n)(p) along the orbit, with the counter totals kept alongside.
struct Walk<'a> {
    model: &'a CocycleModel,
    f: &'a RoofFunction,
    rot: &'a RotationVector2,
    p0: LiftedPoint,
    q0: LiftedPoint,
    p: LiftedPoint,
    q: LiftedPoint,
    n: u64,
    diff: Neumaier,
    counts: Vec<i64>,
}

impl<'a> Walk<'a> {
    fn new(model: &'a CocycleModel, f: &'a RoofFunction, rot: &'a RotationVector2, p: LiftedPoint, q: LiftedPoint) -> Self {
        Walk { model, f, rot, p0: p, q0: q, p, q, n: 0, diff: Neumaier::default(), counts: vec![0; model.s] }
    }

    fn value(&self) -> f64 {
        self.diff.sum()
    }

    // Residual of the counter expansion at the current n against its allowance.
    fn drift_excess(&self, d: f64) -> f64 {
        let m = self.model;
        let expansion: f64 = self.counts.iter().zip(&m.h).map(|(&c, &h)| c as f64 * h).sum();
        let edge = (m.boundary(&self.p0, &self.q0) * m.n_extra(&self.p0, &self.q0) as f64).abs()
            + (m.boundary(&self.p, &self.q) * m.n_extra(&self.p, &self.q) as f64).abs();
        let tol = self.diff.error_bound() + 4.0 * self.n as f64 * self.f.per_term_error() + 1e-12;
        (self.value() - expansion).abs() - (m.c0 * self.n as f64 * d + edge + tol)
    }

    fn step(&mut self) {
        for (j, c) in self.counts.iter_mut().enumerate() {
            *c += self.model.counter(j, &self.p, &self.q);
        }
        self.diff.add(self.f.eval_c(self.q.x.frac, self.q.y.frac));
        self.diff.add(-self.f.eval_c(self.p.x.frac, self.p.y.frac));
        self.p = self.p.step(self.rot);
        self.q = self.q.step(self.rot);
        self.n += 1;
    }
}

/// Follows the proof of the shadowing lemma step by step: merged crossing times k_m,
/// the pair (m₁, m₂) with s < m₁ ≤ 2s, m₁ < m₂ ≤ m₁ + s, both gaps longer than L and
/// m₂ − m₁ minimal, then M₁ or M₂ depending on which carries a shift above h/4.
pub fn witness_constructive(
    model: &CocycleModel,
    f: &RoofFunction,
    rot: &RotationVector2,
    p: (Circle, Circle),
    q: (Circle, Circle),
    eps: f64,
    n: u64,
) -> Result<ConstructiveWitness> {
    if !(eps > 0.0) || n < 2 {
        return Err(Error::invalid("need ε > 0 and N ≥ 2"));
    }
    let (lp, lq) = lift_pair(p, q);
    let d = lp.distance(&lq);
    if d == 0.0 {
        return Err(Error::invalid("the pair must be distinct"));
    }
    let cap = model.eps_cap();
    let clamped = eps >= cap;
    let eps_used = if clamped { 0.999 * cap } else { eps };
    let l = (eps_used / (model.c0 * d)).ceil() as u64;
    let s = model.s;

    // Crossing scan up to k_{3s+1}, doubling the horizon if the gap bound undershoots.
    let wanted = 3 * s + 2;
    let mut horizon = (1.5 * wanted as f64 * model.c2 / d).ceil() as u64 + l + 4;
    let mut crossings = vec![0u64];
    let (mut pk, mut qk) = (lp, lq);
    let mut k = 0u64;
    for _ in 0..6 {
        while k < horizon && crossings.len() < wanted {
            if k > 0 && (0..s).any(|j| model.counter(j, &pk, &qk) != 0) {
                crossings.push(k);
            }
            pk = pk.step(rot);
            qk = qk.step(rot);
            k += 1;
        }
        if crossings.len() >= wanted {
            break;
        }
        horizon *= 2;
    }
    let gap_ok = |m: usize| m + 1 < crossings.len() && crossings[m + 1] - crossings[m] > l;
    let mut pick: Option<(usize, usize)> = None;
    for m1 in s + 1..=2 * s {
        for m2 in m1 + 1..=m1 + s {
            if gap_ok(m1) && gap_ok(m2) && pick.map_or(true, |(a, b)| m2 - m1 < b - a) {
                pick = Some((m1, m2));
            }
        }
    }
    let (m1, m2) = pick.ok_or_else(|| {
        Error::Certification(format!(
            "no admissible (m1, m2) among {} crossings within horizon {horizon} (L = {l})",
            crossings.len() - 1
        ))
    })?;
    let extra_zero = |m: u64| model.n_extra(&lp.advance(rot, m as i64), &lq.advance(rot, m as i64)) == 0;
    let first_zero = |a: u64| [a, a + 1].into_iter().find(|&m| extra_zero(m));
    let cand1 = first_zero(crossings[m1 + 1] - l);
    let cand2 = first_zero(crossings[m2] + 1);

    // One walk up to the end of the later window, keeping both windows' D_n.
    let end = cand1.into_iter().chain(cand2).max().unwrap_or(0) + l;
    let mut walk = Walk::new(model, f, rot, lp, lq);
    let mut win1 = Vec::new();
    let mut win2 = Vec::new();
    let mut drift_violations = 0;
    loop {
        if walk.drift_excess(d) > 0.0 {
            drift_violations += 1;
        }
        let t = walk.n;
        if cand1.is_some_and(|m| (m..m + l).contains(&t)) {
            win1.push(walk.value());
        }
        if cand2.is_some_and(|m| (m..m + l).contains(&t)) {
            win2.push(walk.value());
        }
        if t >= end {
            break;
        }
        walk.step();
    }
    let threshold = model.p0;
    let (chosen, m, window) = match (cand1, cand2) {
        (Some(m), _) if win1[0].abs() > threshold => (1u8, m, win1),
        (_, Some(m)) if win2[0].abs() > threshold => (2u8, m, win2),
        _ => {
            return Err(Error::Certification(
                "neither window start carries a shift above h/4; independence of the jumps may be broken".into(),
            ))
        }
    };
    let shift = window[0];
    let good = window.iter().filter(|&&v| (v - shift).abs() < eps_used).count();
    let good_fraction = good as f64 / l as f64;
    let sf = s as f64;
    let kappa = model.kappa(eps_used);
    let witness = RatnerWitness { m, l, p: shift, good_fraction, eps: eps_used, ratio: l as f64 / m as f64, d };
    let checks = WitnessChecks {
        m_lower: m as f64 >= model.c1 / d,
        m_upper: m as f64 <= 3.0 * sf * model.c2 / d + 2.0,
        ratio: witness.ratio >= kappa,
        shift: model.p0 <= shift.abs() && shift.abs() <= model.p1,
        good: good_fraction > 1.0 - eps_used,
        long_enough: m >= n && l >= n,
    };
    let delta = model.delta(eps_used, n);
    Ok(ConstructiveWitness {
        witness,
        valid: checks.all(),
        checks,
        eps_requested: eps,
        clamped,
        kappa,
        delta,
        below_delta: d < delta,
        n,
        m1,
        m2,
        chosen,
        crossings,
        horizon,
        good_lower_bound: l as f64 - d * l as f64 / model.c1 - 1.0,
        drift_violations,
    })
}

/// Window starts scanned by the empirical oracle: start, start + step, … below end.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MRange {
    pub start: u64,
    pub end: u64,
    pub step: u64,
}

/// Brute force over windows [M, M + L): p is the window median of f^(n)(q) − f^(n)(p),
/// scored by the fraction of the window within ε of it. Windows whose median is below
/// `min_shift` in size are skipped (the unshifted start of the orbit always scores 1).
/// Ties go to the earliest M. Returns None when every window was skipped.
pub fn witness_empirical(
    f: &RoofFunction,
    rot: &RotationVector2,
    p: (Circle, Circle),
    q: (Circle, Circle),
    eps: f64,
    range: MRange,
    l_min: u64,
    min_shift: f64,
) -> Result<Option<RatnerWitness>> {
    if range.step == 0 || range.end <= range.start || l_min == 0 {
        return Err(Error::invalid("empty window range"));
    }
    let (lp, lq) = lift_pair(p, q);
    let d = lp.distance(&lq);
    let last = range.end + l_min;
    let mut pk = lp.advance(rot, range.start as i64);
    let mut qk = lq.advance(rot, range.start as i64);
    let mut acc = Neumaier::default();
    let start = f.birkhoff(rot, lq.x.frac, lq.y.frac, range.start as i64)?.value
        - f.birkhoff(rot, lp.x.frac, lp.y.frac, range.start as i64)?.value;
    acc.add(start);
    let mut values = Vec::with_capacity((last - range.start) as usize);
    for _ in range.start..last {
        values.push(acc.sum());
        acc.add(f.eval_c(qk.x.frac, qk.y.frac));
        acc.add(-f.eval_c(pk.x.frac, pk.y.frac));
        pk = pk.step(rot);
        qk = qk.step(rot);
    }
    let l = l_min as usize;
    let mut best: Option<RatnerWitness> = None;
    let mut buf = vec![0.0; l];
    let mut m = range.start;
    while m < range.end {
        let w = &values[(m - range.start) as usize..][..l];
        buf.copy_from_slice(w);
        buf.sort_unstable_by(f64::total_cmp);
        let median = if l % 2 == 1 { buf[l / 2] } else { 0.5 * (buf[l / 2 - 1] + buf[l / 2]) };
        if median.abs() >= min_shift {
            let score = w.iter().filter(|&&v| (v - median).abs() < eps).count() as f64 / l as f64;
            if best.map_or(true, |b| score > b.good_fraction) {
                let ratio = if m == 0 { f64::INFINITY } else { l as f64 / m as f64 };
                best = Some(RatnerWitness { m, l: l_min, p: median, good_fraction: score, eps, ratio, d });
            }
        }
        m += range.step;
    }
    Ok(best)
}
