//! Monte Carlo estimates of μ^f(T_t A ∩ B) for boxes in X^f.

use crate::circle::Circle;
use crate::error::{Error, Result};
use crate::par::Exec;
use crate::rng;
use crate::roof::RoofFunction;
use crate::rotations::RotationVector2;
use crate::specflow::{flow, FlowPoint};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// [x0, x1) × [y0, y1) × [s0, s1), with the height interval below the roof over the base.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxSet {
    pub x: (f64, f64),
    pub y: (f64, f64),
    pub s: (f64, f64),
}

impl BoxSet {
    pub fn validate(&self, f: &RoofFunction) -> Result<()> {
        let ok = |(a, b): (f64, f64)| (0.0..1.0).contains(&a) && a < b && b <= 1.0;
        if !ok(self.x) || !ok(self.y) || !(0.0 <= self.s.0 && self.s.0 < self.s.1) {
            return Err(Error::invalid(format!("malformed box {self:?}")));
        }
        let (lo, _) = f.bounds_on(self.x.0, self.x.1, self.y.0, self.y.1);
        if self.s.1 > lo {
            return Err(Error::invalid(format!("box height {} exceeds the roof bound {lo} over its base", self.s.1)));
        }
        Ok(())
    }

    pub fn contains(&self, p: &FlowPoint) -> bool {
        let (x, y) = (p.xf(), p.yf());
        (self.x.0..self.x.1).contains(&x) && (self.y.0..self.y.1).contains(&y) && (self.s.0..self.s.1).contains(&p.s)
    }

    /// Lebesgue volume of the box (before normalising by ∫f).
    pub fn volume(&self) -> f64 {
        (self.x.1 - self.x.0) * (self.y.1 - self.y.0) * (self.s.1 - self.s.0)
    }

    /// Normalised measure μ^f(box) = volume / ∫f.
    pub fn measure(&self, f: &RoofFunction) -> Result<f64> {
        Ok(self.volume() / f.integral()?.value)
    }

    pub fn intersect(&self, o: &BoxSet) -> Option<BoxSet> {
        let cap = |a: (f64, f64), b: (f64, f64)| {
            let r = (a.0.max(b.0), a.1.min(b.1));
            (r.0 < r.1).then_some(r)
        };
        Some(BoxSet { x: cap(self.x, o.x)?, y: cap(self.y, o.y)?, s: cap(self.s, o.s)? })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSeries {
    pub times: Vec<f64>,
    pub estimates: Vec<f64>,
    pub stderrs: Vec<f64>,
    pub mu_a: f64,
    pub mu_b: f64,
    /// μ^f(A)·μ^f(B), the value mixing would force in the limit.
    pub product: f64,
    pub samples: usize,
    /// Draws discarded because the flowed point sat on a fibre boundary.
    pub ambiguous: usize,
    pub seed: u64,
}

/// Draws p uniformly from A and records whether T_t p ∈ B, so each estimate is
/// μ(A)·P(T_t p ∈ B), an unbiased estimate of μ(A ∩ T_{−t}B) = μ(T_t A ∩ B).
#[allow(clippy::too_many_arguments)]
pub fn correlation(
    f: &RoofFunction,
    rot: &RotationVector2,
    a: &BoxSet,
    b: &BoxSet,
    times: &[f64],
    samples: usize,
    seed: u64,
    exec: Exec,
) -> Result<CorrelationSeries> {
    a.validate(f)?;
    b.validate(f)?;
    if samples < 2 {
        return Err(Error::invalid("need at least two samples"));
    }
    let mu_a = a.measure(f)?;
    let mu_b = b.measure(f)?;
    let rows = exec.map(samples, |i| {
        let mut r = rng::stream(seed, i as u64);
        let x = Circle::from_f64(r.gen_range(a.x.0..a.x.1));
        let y = Circle::from_f64(r.gen_range(a.y.0..a.y.1));
        let s = r.gen_range(a.s.0..a.s.1);
        let p = FlowPoint { x, y, s };
        times
            .iter()
            .map(|&t| match flow(f, rot, &p, t) {
                Ok(q) => Ok(Some(b.contains(&q.point))),
                Err(Error::Ambiguous { .. }) => Ok(None),
                Err(e) => Err(e),
            })
            .collect::<Result<Vec<_>>>()
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    let mut estimates = Vec::with_capacity(times.len());
    let mut stderrs = Vec::with_capacity(times.len());
    let mut ambiguous = 0;
    for k in 0..times.len() {
        let (mut hits, mut valid) = (0usize, 0usize);
        for row in &rows {
            match row[k] {
                Some(h) => {
                    valid += 1;
                    hits += usize::from(h);
                }
                None => ambiguous += 1,
            }
        }
        if valid < 2 {
            return Err(Error::precision("almost every sample landed on a fibre boundary"));
        }
        let p = hits as f64 / valid as f64;
        estimates.push(mu_a * p);
        stderrs.push(mu_a * (p * (1.0 - p) / valid as f64).sqrt().max(1.0 / valid as f64));
    }
    if ambiguous * 1000 > samples * times.len() {
        return Err(Error::precision(format!("{ambiguous} ambiguous flow landings")));
    }
    Ok(CorrelationSeries {
        times: times.to_vec(),
        estimates,
        stderrs,
        mu_a,
        mu_b,
        product: mu_a * mu_b,
        samples,
        ambiguous,
        seed,
    })
}
