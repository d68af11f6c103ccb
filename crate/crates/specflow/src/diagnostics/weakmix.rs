//! ∫∫ e^{2πis f^(n)} over the torus, by slices along the stretched coordinate.

use crate::circle::Circle;
use crate::error::{Error, Result};
use crate::par::Exec;
use crate::quad::{adaptive_gk, linear_phase};
use crate::rng;
use crate::roof::{DerivativeBounds, RoofFunction};
use crate::rotations::RotationVector2;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakMixingEstimate {
    pub s: f64,
    pub n: u64,
    /// |∫∫ e^{2πis f^(n)}|.
    pub numeric: f64,
    pub re: f64,
    pub im: f64,
    pub quad_error: f64,
    pub bound: f64,
    /// Coordinate along which the inner integrals are taken.
    pub axis: Axis,
    pub theta: f64,
    pub lines: usize,
    pub big_theta: f64,
    pub pass: bool,
}

/// Inner integrals run along x when ∫f_x ≠ 0, otherwise along y. With no smooth part and
/// no Heisenberg term the integrand factorises and both factors are integrated exactly.
pub fn weak_mixing_bound(
    f: &RoofFunction,
    rot: &RotationVector2,
    s: f64,
    n: u64,
    quad: usize,
    bounds: &DerivativeBounds,
) -> Result<WeakMixingEstimate> {
    if s == 0.0 || !s.is_finite() {
        return Err(Error::invalid("s must be a nonzero real"));
    }
    let vn = f.von_neumann_integrals();
    let axis = if vn.int_fx.abs() > 1e-12 { Axis::X } else { Axis::Y };
    let (theta, m0, lines) = match axis {
        Axis::X => (bounds.theta, bounds.m0, f.x_lines().len()),
        Axis::Y => (bounds.theta_y, bounds.m0_y, f.y_lines().len()),
    };
    if !(theta > 0.0) {
        return Err(Error::Certification("no certified theta along the stretched axis".into()));
    }
    if n < m0 {
        return Err(Error::invalid(format!("n = {n} below m0 = {m0}")));
    }
    let big_theta = bounds.big_theta;
    let bound = lines as f64 / (PI * s.abs() * theta) + big_theta / (2.0 * PI * s.abs() * theta * theta * n as f64);
    let (value, mut err) = if f.is_sawtooth_only() {
        separable(f, rot, s, n)
    } else {
        sliced(f, rot, s, n, axis, quad.max(15))
    };
    // phase rounding: |s·f^(n)| ≤ |s|·n·C with relative error ~ n·ε
    err += TAU * s.abs() * n as f64 * f.sup_upper * (n as f64 + 4.0) * f64::EPSILON;
    let numeric = value.norm();
    Ok(WeakMixingEstimate {
        s,
        n,
        numeric,
        re: value.re,
        im: value.im,
        quad_error: err,
        bound,
        axis,
        theta,
        lines,
        big_theta,
        pass: numeric - err <= bound,
    })
}

/// A step-and-slope function on [0, 1): value v0 at 0, slope k, sorted (position, jump) pairs.
struct Slice {
    v0: f64,
    k: f64,
    breaks: Vec<(f64, f64)>,
}

impl Slice {
    fn integral(&self, s: f64, smooth: Option<&dyn Fn(f64) -> f64>, panels: usize) -> (Complex64, f64) {
        let mut total = Complex64::new(0.0, 0.0);
        let mut err = 0.0;
        let mut c = self.v0;
        let mut lo = 0.0;
        let mut it = self.breaks.iter().peekable();
        loop {
            let (hi, jump) = match it.next() {
                Some(&(p, j)) => (p, j),
                None => (1.0, 0.0),
            };
            if hi > lo {
                match smooth {
                    None => {
                        total += linear_phase(s * self.k, s * c, lo, hi);
                        err += 8.0 * f64::EPSILON * (hi - lo);
                    }
                    Some(g) => {
                        let (kk, cc) = (self.k, c);
                        let ph = |x: f64| Complex64::from_polar(1.0, TAU * s * (cc + kk * x + g(x)));
                        let r = adaptive_gk(&ph, lo, hi, 1e-12 * (hi - lo), 30 + panels.ilog2());
                        total += r.value;
                        err += r.error;
                    }
                }
            }
            c += jump;
            lo = hi;
            if hi >= 1.0 {
                break;
            }
        }
        (total, err)
    }
}

fn sorted(mut b: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    b.retain(|&(p, j)| p > 0.0 && j != 0.0);
    b.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    b
}

fn separable(f: &RoofFunction, rot: &RotationVector2, s: f64, n: u64) -> (Complex64, f64) {
    let d = &f.desc;
    let one_axis = |jumps: &[crate::roof::Jump], step: Circle, c0: f64| {
        let mut v0 = c0 * n as f64;
        let mut breaks = Vec::new();
        let mut p = Circle::ZERO;
        for _ in 0..n {
            for j in jumps {
                let at = Circle::from_f64(j.at);
                v0 += j.d * p.sub(at).to_f64();
                breaks.push((at.sub(p).to_f64(), -j.d));
            }
            p = p.add(step);
        }
        let k = n as f64 * jumps.iter().map(|j| j.d).sum::<f64>();
        Slice { v0, k, breaks: sorted(breaks) }.integral(s, None, 1)
    };
    let (a, ea) = one_axis(&d.x_jumps, rot.alpha_circle(), d.c0);
    let (b, eb) = one_axis(&d.y_jumps, rot.beta_circle(), 0.0);
    (a * b, ea * b.norm() + eb * a.norm() + ea * eb)
}

#[inline]
fn wraps(y: Circle, beta: Circle) -> bool {
    y.0.checked_add(beta.0).is_none()
}

/// The slice of f^(n) through the outer coordinate `o`, as a function of the inner one.
fn slice_at(f: &RoofFunction, rot: &RotationVector2, n: u64, axis: Axis, o: Circle) -> Slice {
    let d = &f.desc;
    let (a, b) = (rot.alpha_circle(), rot.beta_circle());
    let (x0, y0) = match axis {
        Axis::X => (Circle::ZERO, o),
        Axis::Y => (o, Circle::ZERO),
    };
    let mut v0 = 0.0;
    let mut breaks = Vec::new();
    let mut slope_h = 0.0;
    let (mut x, mut y) = (x0, y0);
    let (mut off, step) = match axis {
        Axis::X => (Circle::ZERO, a),
        Axis::Y => (Circle::ZERO, b),
    };
    for _ in 0..n {
        v0 += f.eval_c(x, y);
        match axis {
            Axis::X => {
                for j in &d.x_jumps {
                    breaks.push((Circle::from_f64(j.at).sub(off).to_f64(), -j.d));
                }
                if d.gamma != 0.0 && wraps(y, b) {
                    breaks.push((off.neg().to_f64(), d.gamma));
                    slope_h -= d.gamma;
                }
            }
            Axis::Y => {
                for j in &d.y_jumps {
                    breaks.push((Circle::from_f64(j.at).sub(off).to_f64(), -j.d));
                }
                if d.gamma != 0.0 {
                    // at y_k = 0 both α{y} and the wrap indicator reset
                    breaks.push((off.neg().to_f64(), d.gamma * x.to_f64()));
                    breaks.push((b.neg().sub(off).to_f64(), -d.gamma * (x.to_f64() + f.alpha())));
                }
            }
        }
        off = off.add(step);
        x = x.add(a);
        y = y.add(b);
    }
    let nf = n as f64;
    let k = match axis {
        Axis::X => nf * d.x_jumps.iter().map(|j| j.d).sum::<f64>() + slope_h,
        Axis::Y => nf * (d.y_jumps.iter().map(|j| j.d).sum::<f64>() + d.gamma * f.alpha()),
    };
    Slice { v0, k, breaks: sorted(breaks) }
}

fn sliced(f: &RoofFunction, rot: &RotationVector2, s: f64, n: u64, axis: Axis, quad: usize) -> (Complex64, f64) {
    let outer_lines: Vec<Circle> = match axis {
        Axis::X => f.y_lines().iter().map(|l| l.at).collect(),
        Axis::Y => f.x_lines().iter().map(|l| l.at).collect(),
    };
    let step = match axis {
        Axis::X => rot.beta_circle(),
        Axis::Y => rot.alpha_circle(),
    };
    let mut outer = vec![0.0, 1.0];
    let mut off = Circle::ZERO;
    for _ in 0..n {
        for l in &outer_lines {
            outer.push(l.sub(off).to_f64());
        }
        off = off.add(step);
    }
    outer.retain(|p| (0.0..=1.0).contains(p));
    outer.sort_by(|a, b| a.partial_cmp(b).unwrap());
    outer.dedup();
    let has_trig = !f.desc.trig.is_empty();
    let worst_inner = std::cell::Cell::new(0.0f64);
    let inner = |o: f64| -> Complex64 {
        let oc = Circle::from_f64(o);
        let sl = slice_at(f, rot, n, axis, oc);
        let (v, e) = if has_trig {
            let g0 = g_at(f, rot, n, axis, oc, Circle::ZERO);
            let g = move |t: f64| g_at(f, rot, n, axis, oc, Circle::from_f64(t)) - g0;
            sl.integral(s, Some(&g), quad)
        } else {
            sl.integral(s, None, quad)
        };
        worst_inner.set(worst_inner.get().max(e));
        v
    };
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    for w in outer.windows(2) {
        if w[1] <= w[0] {
            continue;
        }
        let r = adaptive_gk(&inner, w[0], w[1], 1e-10 * (w[1] - w[0]), 24);
        total += r.value;
        err += r.error;
    }
    (total, err + worst_inner.get())
}

fn g_at(f: &RoofFunction, rot: &RotationVector2, n: u64, axis: Axis, outer: Circle, inner: Circle) -> f64 {
    match axis {
        Axis::X => f.g_sum(rot, inner, outer, n),
        Axis::Y => f.g_sum(rot, outer, inner, n),
    }
}

/// Monte Carlo mean of e^{2πis f^(n)} over uniform points, with its standard error.
pub fn weak_mixing_monte_carlo(
    f: &RoofFunction,
    rot: &RotationVector2,
    s: f64,
    n: u64,
    samples: usize,
    seed: u64,
    exec: Exec,
) -> Result<(Complex64, f64)> {
    if samples < 2 {
        return Err(Error::invalid("need at least two samples"));
    }
    let vals = exec.map(samples, |i| {
        let mut r = rng::stream(seed, i as u64);
        let (x, y) = (Circle(r.gen()), Circle(r.gen()));
        let (a, b) = (rot.alpha_circle(), rot.beta_circle());
        let (mut px, mut py) = (x, y);
        let mut v = 0.0;
        for _ in 0..n {
            v += f.eval_c(px, py);
            px = px.add(a);
            py = py.add(b);
        }
        Complex64::from_polar(1.0, TAU * s * v)
    });
    let mean: Complex64 = vals.iter().sum::<Complex64>() / samples as f64;
    let var = (1.0 - mean.norm_sqr()).max(0.0);
    Ok((mean, (var / samples as f64).sqrt()))
}
