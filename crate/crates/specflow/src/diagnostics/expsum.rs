//! |∫_𝕋 e^{2πih(x)} dx| for piecewise-C² h with |h'| ≥ θ, against N/(πθ) + Var h'/(2πθ²).

use crate::error::{Error, Result};
use crate::quad::{adaptive_gk, linear_phase};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SliceJump {
    pub at: f64,
    pub size: f64,
}

/// cos·cos(2πkx) + sin·sin(2πkx).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SliceTrig {
    pub k: i64,
    #[serde(default)]
    pub cos: f64,
    #[serde(default)]
    pub sin: f64,
}

/// h(x) = offset + slope·x + Σ size·1[x ≥ at] + Σ trig, on [0, 1).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct PiecewiseSlice {
    pub slope: f64,
    #[serde(default)]
    pub offset: f64,
    #[serde(default)]
    pub jumps: Vec<SliceJump>,
    #[serde(default)]
    pub trig: Vec<SliceTrig>,
}

impl PiecewiseSlice {
    pub fn eval(&self, x: f64) -> f64 {
        let mut v = self.offset + self.slope * x;
        for j in &self.jumps {
            if x >= j.at {
                v += j.size;
            }
        }
        v + self.trig_part(x)
    }

    fn trig_part(&self, x: f64) -> f64 {
        self.trig
            .iter()
            .map(|t| {
                let a = TAU * t.k as f64 * x;
                t.cos * a.cos() + t.sin * a.sin()
            })
            .sum()
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.slope
            + self
                .trig
                .iter()
                .map(|t| {
                    let w = TAU * t.k as f64;
                    let a = w * x;
                    w * (t.sin * a.cos() - t.cos * a.sin())
                })
                .sum::<f64>()
    }

    /// A lower bound for |h'| on every piece, or None when the descriptor cannot certify one.
    pub fn certified_theta(&self) -> Option<f64> {
        let wiggle: f64 = self.trig.iter().map(|t| TAU * t.k.abs() as f64 * t.cos.hypot(t.sin)).sum();
        let th = self.slope.abs() - wiggle;
        (th > 0.0).then_some(th)
    }

    /// Upper bound on the total variation of h' over the circle.
    pub fn derivative_variation(&self) -> f64 {
        self.trig.iter().map(|t| 4.0 * t.k.abs() as f64 * TAU * t.k.abs() as f64 * t.cos.hypot(t.sin)).sum()
    }

    /// Discontinuities of h on the circle: interior jumps plus the seam at 0 when h(1⁻) ≠ h(0).
    pub fn discontinuities(&self) -> usize {
        let mut at: Vec<f64> = self.jumps.iter().filter(|j| j.size != 0.0).map(|j| j.at).collect();
        at.sort_by(|a, b| a.partial_cmp(b).unwrap());
        at.dedup();
        let seam = self.slope + self.jumps.iter().map(|j| j.size).sum::<f64>();
        at.len() + usize::from(seam != 0.0)
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.jumps.iter().map(|j| j.at).filter(|&a| a > 0.0 && a < 1.0).collect();
        b.push(0.0);
        b.push(1.0);
        b.sort_by(|a, b| a.partial_cmp(b).unwrap());
        b.dedup();
        b
    }

    fn validate(&self) -> Result<()> {
        if self.jumps.iter().any(|j| !(j.at > 0.0 && j.at < 1.0)) {
            return Err(Error::invalid("slice jumps must sit strictly inside (0, 1)"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpSumEstimate {
    pub value: f64,
    pub quad_error: f64,
    pub lemma_bound: f64,
    pub discontinuities: usize,
    pub theta: f64,
    pub derivative_variation: f64,
    pub evaluations: usize,
    pub pass: bool,
}

/// `quad_points` sets the initial panel count per piece (15 nodes each) before adaptive refinement.
pub fn exp_sum(h: &PiecewiseSlice, theta: f64, quad_points: usize) -> Result<ExpSumEstimate> {
    h.validate()?;
    let certified = h
        .certified_theta()
        .ok_or_else(|| Error::invalid("descriptor cannot certify a positive lower bound on |h'|"))?;
    if !(theta > 0.0) || theta > certified * (1.0 + 1e-12) {
        return Err(Error::invalid(format!("theta {theta} not certified (descriptor gives {certified})")));
    }
    let b = h.breakpoints();
    let pieces = b.len() - 1;
    let panels = (quad_points / 15 / pieces).max(1);
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut evaluations = 0;
    for w in b.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let c = h.eval(lo) - h.slope * lo;
        if h.trig.is_empty() {
            total += linear_phase(h.slope, c, lo, hi);
            err += 8.0 * f64::EPSILON * (hi - lo) * (1.0 + (h.slope * (hi - lo)).abs());
            continue;
        }
        let f = |x: f64| Complex64::from_polar(1.0, TAU * (c + h.slope * x + h.trig_part(x)));
        let step = (hi - lo) / panels as f64;
        for k in 0..panels {
            let a = lo + k as f64 * step;
            let r = adaptive_gk(&f, a, a + step, 1e-13 * step, 40);
            total += r.value;
            err += r.error;
            evaluations += r.evaluations;
        }
    }
    let n = h.discontinuities();
    let var = h.derivative_variation();
    let bound = n as f64 / (PI * theta) + var / (2.0 * PI * theta * theta);
    let value = total.norm();
    let quad_error = err + 4.0 * f64::EPSILON;
    Ok(ExpSumEstimate {
        value,
        quad_error,
        lemma_bound: bound,
        discontinuities: n,
        theta,
        derivative_variation: var,
        evaluations,
        pass: value - quad_error <= bound,
    })
}
