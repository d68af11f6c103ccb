//! The special flow T_t^f on X^f = {(x, y, s) : 0 ≤ s < f(x, y)}.

use crate::circle::Circle;
use crate::error::{Error, Result};
use crate::par::Exec;
use crate::rng;
use crate::roof::RoofFunction;
use crate::rotations::RotationVector2;
use crate::sum::Neumaier;
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowPoint {
    pub x: Circle,
    pub y: Circle,
    pub s: f64,
}

impl FlowPoint {
    pub fn new(f: &RoofFunction, x: Circle, y: Circle, s: f64) -> Result<Self> {
        let top = f.eval_c(x, y);
        if !(0.0..top).contains(&s) {
            return Err(Error::invalid(format!("height {s} outside [0, {top})")));
        }
        Ok(FlowPoint { x, y, s })
    }

    pub fn from_f64(f: &RoofFunction, x: f64, y: f64, s: f64) -> Result<Self> {
        Self::new(f, Circle::from_f64(x), Circle::from_f64(y), s)
    }

    pub fn xf(&self) -> f64 {
        self.x.to_f64()
    }

    pub fn yf(&self) -> f64 {
        self.y.to_f64()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowStep {
    pub point: FlowPoint,
    /// The unique n with f^(n) ≤ s + t < f^(n+1).
    pub n: i64,
    /// Bound on the height error of `point.s`.
    pub rounding_bound: f64,
}

/// T_t^f(x, y, s) = (T^n(x, y), s + t − f^(n)(x, y)).
///
/// n is bracketed by the certified bounds c ≤ f ≤ C and then located by a monotone
/// walk inside the bracket. A landing whose height lies within rounding distance of
/// either end of the fibre is an error rather than a guess; an exact floating hit of
/// the top is read as the glued point (T(x, y), 0).
pub fn flow(f: &RoofFunction, rot: &RotationVector2, p: &FlowPoint, t: f64) -> Result<FlowStep> {
    if !t.is_finite() {
        return Err(Error::invalid("flow time must be finite"));
    }
    if t == 0.0 {
        return Ok(FlowStep { point: *p, n: 0, rounding_bound: 0.0 });
    }
    let u = p.s + t;
    let c = f.inf_lower;
    let big_c = f.sup_upper;
    let u_err = 2.0 * f64::EPSILON * u.abs();
    let term_err = f.per_term_error();
    let (a, b) = (rot.alpha_circle(), rot.beta_circle());
    if u >= 0.0 {
        let n_lo = ((u / big_c).floor() as i64 - 1).max(0);
        let n_hi = (u / c).ceil() as i64 + 1;
        let start = f.birkhoff(rot, p.x, p.y, n_lo)?;
        let mut acc = Neumaier::default();
        acc.add(start.value);
        let mut bound = start.rounding_bound;
        let mut n = n_lo;
        let (mut x, mut y) = rot.step(p.x, p.y, n);
        loop {
            let v = f.eval_c(x, y);
            let next = acc.sum() + v;
            let rb = bound + term_err + acc.error_bound() + u_err;
            if next <= u {
                if next != u && u - next <= rb {
                    return Err(ambiguous(n + 1, u - next));
                }
                acc.add(v);
                bound += term_err;
                n += 1;
                x = x.add(a);
                y = y.add(b);
                if n > n_hi {
                    return Err(Error::precision(format!("flow search left its bracket at n = {n}")));
                }
                continue;
            }
            if next - u <= rb {
                return Err(ambiguous(n + 1, next - u));
            }
            let s = u - acc.sum();
            let rb = bound + acc.error_bound() + u_err;
            if s < 0.0 || (s != 0.0 && s <= rb) {
                return Err(ambiguous(n, s));
            }
            return Ok(FlowStep { point: FlowPoint { x, y, s: s.max(0.0) }, n, rounding_bound: rb });
        }
    }
    let n_hi = ((u / big_c).ceil() as i64 + 1).min(0);
    let n_lo = (u / c).floor() as i64 - 1;
    let start = f.birkhoff(rot, p.x, p.y, n_hi)?;
    let mut acc = Neumaier::default();
    acc.add(start.value);
    let mut bound = start.rounding_bound;
    let mut n = n_hi;
    let (mut x, mut y) = rot.step(p.x, p.y, n);
    while acc.sum() > u {
        x = x.sub(a);
        y = y.sub(b);
        n -= 1;
        acc.add(-f.eval_c(x, y));
        bound += term_err;
        if n < n_lo {
            return Err(Error::precision(format!("flow search left its bracket at n = {n}")));
        }
    }
    let s = u - acc.sum();
    let rb = bound + acc.error_bound() + u_err;
    let top = f.eval_c(x, y);
    if (s != 0.0 && s <= rb) || top - s <= rb + term_err {
        return Err(ambiguous(n, s));
    }
    Ok(FlowStep { point: FlowPoint { x, y, s }, n, rounding_bound: rb })
}

fn ambiguous(n: i64, gap: f64) -> Error {
    Error::Ambiguous { step: n, what: format!("flow lands {gap:e} from a fibre boundary") }
}

/// max(‖Δx‖, ‖Δy‖) + |Δs|.
pub fn metric_df(p: &FlowPoint, q: &FlowPoint) -> f64 {
    base_distance(p, q) + (p.s - q.s).abs()
}

pub fn base_distance(p: &FlowPoint, q: &FlowPoint) -> f64 {
    let dx = crate::circle::ulps_to_f64(p.x.dist(q.x));
    let dy = crate::circle::ulps_to_f64(p.y.dist(q.y));
    dx.max(dy)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleSet {
    pub points: Vec<FlowPoint>,
    pub attempts: u64,
    pub acceptance_rate: f64,
    pub seed: u64,
}

/// Point i of a run is drawn from its own stream keyed by (seed, i).
pub fn sample_point(f: &RoofFunction, seed: u64, i: u64) -> (FlowPoint, u64) {
    let mut r = rng::stream(seed, i);
    let top = f.sup_upper;
    let mut tries = 0;
    loop {
        tries += 1;
        let x = Circle(r.gen());
        let y = Circle(r.gen());
        let s = r.gen::<f64>() * top;
        if s < f.eval_c(x, y) {
            return (FlowPoint { x, y, s }, tries);
        }
    }
}

/// Uniform points of X^f by rejection from 𝕋² × [0, sup f).
pub fn uniform_sample(f: &RoofFunction, count: usize, seed: u64, exec: Exec) -> Result<SampleSet> {
    if count == 0 {
        return Err(Error::invalid("sample count must be >= 1"));
    }
    let drawn = exec.map(count, |i| sample_point(f, seed, i as u64));
    let attempts: u64 = drawn.iter().map(|d| d.1).sum();
    Ok(SampleSet {
        points: drawn.into_iter().map(|d| d.0).collect(),
        attempts,
        acceptance_rate: count as f64 / attempts as f64,
        seed,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub s: f64,
    pub n: i64,
}

pub fn trajectory(f: &RoofFunction, rot: &RotationVector2, p: &FlowPoint, times: &[f64]) -> Result<Vec<TrajectoryRow>> {
    times
        .iter()
        .map(|&t| {
            let st = flow(f, rot, p, t)?;
            Ok(TrajectoryRow { t, x: st.point.xf(), y: st.point.yf(), s: st.point.s, n: st.n })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roof::RoofDescriptor;

    #[test]
    fn zero_time_is_identity() {
        let rot = RotationVector2::golden_silver();
        let f = RoofFunction::new(RoofDescriptor::linear(1.0, 2.0, 3.0), &rot).unwrap();
        let p = FlowPoint::from_f64(&f, 0.2, 0.4, 1.0).unwrap();
        assert_eq!(flow(&f, &rot, &p, 0.0).unwrap().point, p);
    }

    #[test]
    fn top_of_fibre_glues_to_next_base_point() {
        let rot = RotationVector2::golden_silver();
        let f = RoofFunction::new(RoofDescriptor::linear(1.0, 2.0, 3.0), &rot).unwrap();
        let p = FlowPoint::from_f64(&f, 0.2, 0.4, 0.0).unwrap();
        let t = f.eval_c(p.x, p.y);
        let q = flow(&f, &rot, &p, t).unwrap();
        let (x1, y1) = rot.step(p.x, p.y, 1);
        assert_eq!((q.point.x, q.point.y, q.point.s, q.n), (x1, y1, 0.0, 1));
    }

    #[test]
    fn negative_time_inverts() {
        let rot = RotationVector2::golden_silver();
        let f = RoofFunction::new(RoofDescriptor::linear(1.0, 2.0, 3.0), &rot).unwrap();
        let p = FlowPoint::from_f64(&f, 0.2, 0.4, 1.3).unwrap();
        let q = flow(&f, &rot, &p, 37.25).unwrap();
        let back = flow(&f, &rot, &q.point, -37.25).unwrap();
        assert_eq!((back.point.x, back.point.y), (p.x, p.y));
        assert!((back.point.s - p.s).abs() < 1e-12);
    }

    #[test]
    fn metric_basics() {
        let rot = RotationVector2::golden_silver();
        let f = RoofFunction::new(RoofDescriptor::linear(1.0, 2.0, 3.0), &rot).unwrap();
        let p = FlowPoint::from_f64(&f, 0.95, 0.5, 1.0).unwrap();
        let q = FlowPoint::from_f64(&f, 0.05, 0.5, 1.25).unwrap();
        assert!((metric_df(&p, &q) - 0.35).abs() < 1e-12);
        assert_eq!(metric_df(&p, &p), 0.0);
    }
}
