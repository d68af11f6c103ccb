//! Roof functions f = c₀ + Σ d₁ⱼ{x − Δ₁ⱼ} + Σ d₂ⱼ{y − Δ₂ⱼ} + g(x, y) + γ·h(x, y) over a
//! fixed rotation, with h(x, y) = α{y} − ({x} + α)[{y} + β], and their Birkhoff cocycles.
//!
//! Convention: every piece is closed on the left, so {x − Δ} is 0 at x = Δ.

use crate::circle::{floor_of_advance, ulps_to_f64, Circle};
use crate::error::{Error, Result};
use crate::quad;
use crate::rotations::RotationVector2;
use crate::sum::Neumaier;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{PI, TAU};

const U: f64 = f64::EPSILON / 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Jump {
    /// Jump size d.
    pub d: f64,
    /// Breakpoint Δ in [0, 1).
    pub at: f64,
}

/// cos·cos(2π(kx·x + ky·y)) + sin·sin(2π(kx·x + ky·y)).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrigTerm {
    pub kx: i64,
    pub ky: i64,
    #[serde(default)]
    pub cos: f64,
    #[serde(default)]
    pub sin: f64,
}

impl TrigTerm {
    fn amp(&self) -> f64 {
        self.cos.hypot(self.sin)
    }

    /// Coefficients of ∂x^i ∂y^j of this term, again as a trig term of the same frequency.
    fn derivative(&self, i: u32, j: u32) -> TrigTerm {
        let (mut c, mut s) = (self.cos, self.sin);
        for _ in 0..i {
            let w = TAU * self.kx as f64;
            (c, s) = (w * s, -w * c);
        }
        for _ in 0..j {
            let w = TAU * self.ky as f64;
            (c, s) = (w * s, -w * c);
        }
        TrigTerm { kx: self.kx, ky: self.ky, cos: c, sin: s }
    }

    #[inline]
    fn phase(&self, x: Circle, y: Circle) -> Circle {
        x.mul_int(self.kx).add(y.mul_int(self.ky))
    }

    #[inline]
    fn eval(&self, x: Circle, y: Circle) -> f64 {
        let t = TAU * self.phase(x, y).to_f64();
        self.cos * t.cos() + self.sin * t.sin()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RoofDescriptor {
    #[serde(default)]
    pub c0: f64,
    #[serde(default)]
    pub x_jumps: Vec<Jump>,
    #[serde(default)]
    pub y_jumps: Vec<Jump>,
    #[serde(default)]
    pub trig: Vec<TrigTerm>,
    /// Coefficient of the Heisenberg term h.
    #[serde(default)]
    pub gamma: f64,
}

impl RoofDescriptor {
    /// a{x} + b{y} + c.
    pub fn linear(a: f64, b: f64, c: f64) -> Self {
        RoofDescriptor {
            c0: c,
            x_jumps: vec![Jump { d: a, at: 0.0 }],
            y_jumps: vec![Jump { d: b, at: 0.0 }],
            ..Default::default()
        }
    }
}

/// A discontinuity line of f and the uncertainty of its position (ulps).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Line {
    pub at: Circle,
    pub err: u128,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RoofFunction {
    pub desc: RoofDescriptor,
    x_at: Vec<Circle>,
    y_at: Vec<Circle>,
    x_lines: Vec<Line>,
    y_lines: Vec<Line>,
    alpha: Circle,
    beta: Circle,
    alpha_f: f64,
    beta_f: f64,
    /// Certified lower and upper bounds of f on the torus.
    pub inf_lower: f64,
    pub sup_upper: f64,
    /// Max-norm Lipschitz constant of the smooth part g.
    pub lip_g: f64,
    term_err: f64,
    slope: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BirkhoffValue {
    pub n: i64,
    pub value: f64,
    pub rounding_bound: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralValue {
    pub value: f64,
    pub error: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VonNeumann {
    pub int_fx: f64,
    pub int_fy: f64,
    /// ∫f_x ≠ 0 or ∫f_y ≠ 0.
    pub weak: bool,
    /// ∫f_x ≠ 0 and ∫f_y ≠ 0.
    pub strong: bool,
}

/// Closed-form Birkhoff sums of the partial derivatives of f.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivativeSums {
    pub m: u64,
    pub fx: f64,
    pub fy: f64,
    pub fxx: f64,
    pub fyy: f64,
    pub error: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivativeBounds {
    pub theta: f64,
    pub theta_y: f64,
    #[serde(rename = "Theta")]
    pub big_theta: f64,
    /// sup |f_x| and sup |f_y| over smooth pieces (first-derivative bounds).
    pub slope_upper_x: f64,
    pub slope_upper_y: f64,
    pub m0: u64,
    pub m0_y: u64,
    pub c: f64,
    #[serde(rename = "C")]
    pub big_c: f64,
    pub n_jump: usize,
    pub m_jump: usize,
    pub margin: f64,
    pub margin_y: f64,
}

#[inline]
fn frac_diff(x: Circle, at: Circle) -> f64 {
    x.sub(at).to_f64()
}

/// Does y + β wrap past 1, i.e. is [{y} + β] = 1?
#[inline]
fn heis_e(y: Circle, beta: Circle) -> bool {
    y.0.checked_add(beta.0).is_none()
}

impl RoofFunction {
    pub fn new(desc: RoofDescriptor, rot: &RotationVector2) -> Result<Self> {
        Self::with_grid(desc, rot, 64)
    }

    pub fn with_grid(desc: RoofDescriptor, rot: &RotationVector2, grid: usize) -> Result<Self> {
        for j in desc.x_jumps.iter().chain(&desc.y_jumps) {
            if !(0.0..1.0).contains(&j.at) || !j.d.is_finite() {
                return Err(Error::invalid(format!("jump {j:?} needs a breakpoint in [0,1) and a finite size")));
            }
        }
        if !desc.c0.is_finite() || !desc.gamma.is_finite() || desc.trig.iter().any(|t| !t.amp().is_finite()) {
            return Err(Error::invalid("roof coefficients must be finite"));
        }
        let alpha = rot.alpha_circle();
        let beta = rot.beta_circle();
        let (_, eb) = rot.step_errors();
        let x_at: Vec<Circle> = desc.x_jumps.iter().map(|j| Circle::from_f64(j.at)).collect();
        let y_at: Vec<Circle> = desc.y_jumps.iter().map(|j| Circle::from_f64(j.at)).collect();
        let mut x_lines: Vec<Line> = x_at.iter().map(|&at| Line { at, err: 0 }).collect();
        let mut y_lines: Vec<Line> = y_at.iter().map(|&at| Line { at, err: 0 }).collect();
        if desc.gamma != 0.0 {
            x_lines.push(Line { at: Circle::ZERO, err: 0 });
            y_lines.push(Line { at: Circle::ZERO, err: 0 });
            y_lines.push(Line { at: beta.neg(), err: eb });
        }
        dedup_lines(&mut x_lines);
        dedup_lines(&mut y_lines);
        let lip_g: f64 = desc.trig.iter().map(|t| t.amp() * TAU * (t.kx.abs() + t.ky.abs()) as f64).sum();
        let jumps_abs: f64 = desc.x_jumps.iter().chain(&desc.y_jumps).map(|j| j.d.abs()).sum();
        let alpha_f = alpha.to_f64();
        let beta_f = beta.to_f64();
        let g = desc.gamma.abs();
        let term_err = U
            * (8.0 * desc.c0.abs()
                + 8.0 * jumps_abs
                + desc.trig.iter().map(|t| 16.0 * t.amp() * (1.0 + TAU * (t.kx.abs() + t.ky.abs()) as f64)).sum::<f64>()
                + 8.0 * g * (alpha_f + 2.0))
            + (jumps_abs + lip_g + g * (1.0 + alpha_f)) * U;
        let slope = jumps_abs + lip_g + g * (2.0 + alpha_f);
        let mut f = RoofFunction {
            desc,
            x_at,
            y_at,
            x_lines,
            y_lines,
            alpha,
            beta,
            alpha_f,
            beta_f,
            inf_lower: 0.0,
            sup_upper: 0.0,
            lip_g,
            term_err,
            slope,
        };
        let (lo, hi) = f.cell_bounds(grid.max(1));
        if lo <= 0.0 {
            return Err(Error::invalid(format!("roof not certified positive: lower bound {lo}")));
        }
        f.inf_lower = lo;
        f.sup_upper = hi;
        Ok(f)
    }

    pub fn x_lines(&self) -> &[Line] {
        &self.x_lines
    }

    pub fn y_lines(&self) -> &[Line] {
        &self.y_lines
    }

    pub fn alpha(&self) -> f64 {
        self.alpha_f
    }

    pub fn beta(&self) -> f64 {
        self.beta_f
    }

    pub fn is_sawtooth_only(&self) -> bool {
        self.desc.trig.is_empty() && self.desc.gamma == 0.0
    }

    pub fn per_term_error(&self) -> f64 {
        self.term_err
    }

    #[inline]
    pub fn eval_c(&self, x: Circle, y: Circle) -> f64 {
        let d = &self.desc;
        let mut v = d.c0;
        for (j, &at) in d.x_jumps.iter().zip(&self.x_at) {
            v += j.d * frac_diff(x, at);
        }
        for (j, &at) in d.y_jumps.iter().zip(&self.y_at) {
            v += j.d * frac_diff(y, at);
        }
        for t in &d.trig {
            v += t.eval(x, y);
        }
        if d.gamma != 0.0 {
            v += d.gamma * self.h(x, y);
        }
        v
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.eval_c(Circle::from_f64(x), Circle::from_f64(y))
    }

    #[inline]
    fn h(&self, x: Circle, y: Circle) -> f64 {
        let e = if heis_e(y, self.beta) { 1.0 } else { 0.0 };
        self.alpha_f * y.to_f64() - (x.to_f64() + self.alpha_f) * e
    }

    pub fn g(&self, x: Circle, y: Circle) -> f64 {
        self.desc.trig.iter().map(|t| t.eval(x, y)).sum()
    }

    /// f_x on the smooth piece containing (x, y).
    pub fn fx(&self, x: Circle, y: Circle) -> f64 {
        let d = &self.desc;
        let mut v: f64 = d.x_jumps.iter().map(|j| j.d).sum();
        for t in &d.trig {
            v += t.derivative(1, 0).eval(x, y);
        }
        if d.gamma != 0.0 && heis_e(y, self.beta) {
            v -= d.gamma;
        }
        v
    }

    pub fn fy(&self, x: Circle, y: Circle) -> f64 {
        let d = &self.desc;
        let mut v: f64 = d.y_jumps.iter().map(|j| j.d).sum::<f64>() + d.gamma * self.alpha_f;
        for t in &d.trig {
            v += t.derivative(0, 1).eval(x, y);
        }
        v
    }

    pub fn fxx(&self, x: Circle, y: Circle) -> f64 {
        self.desc.trig.iter().map(|t| t.derivative(2, 0).eval(x, y)).sum()
    }

    pub fn fyy(&self, x: Circle, y: Circle) -> f64 {
        self.desc.trig.iter().map(|t| t.derivative(0, 2).eval(x, y)).sum()
    }

    /// Interval bounds of f on each cell of a grid×grid partition; returns (min lower, max upper).
    fn cell_bounds(&self, grid: usize) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        let w = 1.0 / grid as f64;
        for i in 0..grid {
            let (x0, x1) = (i as f64 * w, (i + 1) as f64 * w);
            for j in 0..grid {
                let (y0, y1) = (j as f64 * w, (j + 1) as f64 * w);
                let (l, u) = self.bounds_on(x0, x1, y0, y1);
                lo = lo.min(l);
                hi = hi.max(u);
            }
        }
        (lo - 1e-12, hi + 1e-12)
    }

    /// Certified (lower, upper) bounds of f on [x0, x1) × [y0, y1) ⊂ [0,1)².
    pub fn bounds_on(&self, x0: f64, x1: f64, y0: f64, y1: f64) -> (f64, f64) {
        let d = &self.desc;
        let mut lo = d.c0;
        let mut hi = d.c0;
        for j in &d.x_jumps {
            let (a, b) = saw_range(x0, x1, j.at);
            let (p, q) = scale(j.d, a, b);
            lo += p;
            hi += q;
        }
        for j in &d.y_jumps {
            let (a, b) = saw_range(y0, y1, j.at);
            let (p, q) = scale(j.d, a, b);
            lo += p;
            hi += q;
        }
        if !d.trig.is_empty() {
            let cx = 0.5 * (x0 + x1);
            let cy = 0.5 * (y0 + y1);
            let gc = self.g(Circle::from_f64(cx), Circle::from_f64(cy));
            let r: f64 = d
                .trig
                .iter()
                .map(|t| t.amp() * TAU * (t.kx.abs() as f64 * 0.5 * (x1 - x0) + t.ky.abs() as f64 * 0.5 * (y1 - y0)))
                .sum();
            let amp: f64 = d.trig.iter().map(|t| t.amp()).sum();
            lo += (gc - r).max(-amp);
            hi += (gc + r).min(amp);
        }
        if d.gamma != 0.0 {
            // h = α{y} − ({x}+α)e, e ∈ {0,1} depending on whether y ≥ 1 − β
            let thr = 1.0 - self.beta_f;
            let mut es = Vec::new();
            if y0 < thr + 1e-15 {
                es.push(0.0);
            }
            if y1 > thr - 1e-15 {
                es.push(1.0);
            }
            let (mut hl, mut hh) = (f64::INFINITY, f64::NEG_INFINITY);
            for e in es {
                let a_lo = self.alpha_f * y0 - (x1 + self.alpha_f) * e;
                let a_hi = self.alpha_f * y1 - (x0 + self.alpha_f) * e;
                hl = hl.min(a_lo);
                hh = hh.max(a_hi);
            }
            let (p, q) = scale(d.gamma, hl, hh);
            lo += p;
            hi += q;
        }
        (lo, hi)
    }

    /// Sorted breakpoints in x (including 0 and 1) splitting [0,1] into smooth pieces.
    pub fn breaks_x(&self) -> Vec<f64> {
        breaks(self.x_lines.iter().map(|l| l.at.to_f64()))
    }

    pub fn breaks_y(&self) -> Vec<f64> {
        breaks(self.y_lines.iter().map(|l| l.at.to_f64()))
    }

    /// ∫f with a quadrature error bound for the h part.
    pub fn integral(&self) -> Result<IntegralValue> {
        let d = &self.desc;
        let mut v = d.c0;
        v += d.x_jumps.iter().map(|j| j.d / 2.0).sum::<f64>();
        v += d.y_jumps.iter().map(|j| j.d / 2.0).sum::<f64>();
        v += d.trig.iter().filter(|t| t.kx == 0 && t.ky == 0).map(|t| t.cos).sum::<f64>();
        if d.gamma == 0.0 {
            return Ok(IntegralValue { value: v, error: 8.0 * U * v.abs() });
        }
        let ih = self.integral_h()?;
        Ok(IntegralValue { value: v + d.gamma * ih.value, error: d.gamma.abs() * ih.error + 8.0 * U * v.abs() })
    }

    /// ∫∫h by tensor Gauss–Legendre on the pieces, checked against a refined mesh.
    pub fn integral_h(&self) -> Result<IntegralValue> {
        let xb = vec![0.0, 1.0];
        let yb = breaks([1.0 - self.beta_f].into_iter());
        let h = |x: f64, y: f64| self.h(Circle::from_f64(x), Circle::from_f64(y));
        let coarse = quad::tensor_2d(&h, &xb, &yb, 4, 1);
        let fine = quad::tensor_2d(&h, &xb, &yb, 4, 2);
        let err = (coarse - fine).abs() + 1e-14;
        if err > 1e-8 {
            return Err(Error::Certification(format!("quadrature of h disagrees across meshes by {err:e}")));
        }
        Ok(IntegralValue { value: fine, error: err })
    }

    /// ∫ over the torus of an arbitrary function of f, using the pieces of f.
    pub fn integrate_with(&self, w: &dyn Fn(f64, f64, f64) -> f64, order: usize, sub: usize) -> f64 {
        let xb = self.breaks_x();
        let yb = self.breaks_y();
        let f = |x: f64, y: f64| w(x, y, self.eval(x, y));
        quad::tensor_2d(&f, &xb, &yb, order, sub)
    }

    pub fn von_neumann_integrals(&self) -> VonNeumann {
        let d = &self.desc;
        let ix = d.x_jumps.iter().map(|j| j.d).sum::<f64>() - self.beta_f * d.gamma;
        let iy = d.y_jumps.iter().map(|j| j.d).sum::<f64>() + self.alpha_f * d.gamma;
        let nz = |v: f64| v.abs() > 1e-12;
        VonNeumann { int_fx: ix, int_fy: iy, weak: nz(ix) || nz(iy), strong: nz(ix) && nz(iy) }
    }

    fn check_lines(&self, x: Circle, y: Circle, k: i64, rot: &RotationVector2, x_only: bool) -> Result<()> {
        if k == 0 {
            return Ok(());
        }
        let (ex, ey) = rot.drift(k);
        for l in &self.x_lines {
            let e = ex.saturating_add(l.err);
            if x.dist(l.at) <= e {
                return Err(Error::Ambiguous { step: k, what: format!("x within {:e} of a jump line", ulps_to_f64(e)) });
            }
        }
        if x_only {
            return Ok(());
        }
        for l in &self.y_lines {
            let e = ey.saturating_add(l.err);
            if y.dist(l.at) <= e {
                return Err(Error::Ambiguous { step: k, what: format!("y within {:e} of a jump line", ulps_to_f64(e)) });
            }
        }
        Ok(())
    }

    /// f^(m)(x, y) by compensated direct summation, with all three sign cases of m.
    pub fn birkhoff(&self, rot: &RotationVector2, x: Circle, y: Circle, m: i64) -> Result<BirkhoffValue> {
        self.sum_along(rot, x, y, m, |p, q| self.eval_c(p, q), false)
    }

    /// Σ_k over the same index range as f^(m) of an arbitrary per-point function, with the same
    /// sign convention; line checks optional.
    fn sum_along(
        &self,
        rot: &RotationVector2,
        x: Circle,
        y: Circle,
        m: i64,
        term: impl Fn(Circle, Circle) -> f64,
        x_only: bool,
    ) -> Result<BirkhoffValue> {
        if m == 0 {
            return Ok(BirkhoffValue { n: 0, value: 0.0, rounding_bound: 0.0 });
        }
        let (start, count, sign) = if m > 0 { (0i64, m as u64, 1.0) } else { (m, m.unsigned_abs(), -1.0) };
        let (a, b) = (rot.alpha_circle(), rot.beta_circle());
        let (mut px, mut py) = rot.step(x, y, start);
        let mut acc = Neumaier::default();
        let mut drift = 0.0;
        let (ea, eb) = rot.step_errors();
        let e_step = ulps_to_f64(ea.max(eb));
        for i in 0..count {
            let k = start + i as i64;
            self.check_lines(px, py, k, rot, x_only)?;
            acc.add(term(px, py));
            drift += e_step * k.unsigned_abs() as f64;
            px = px.add(a);
            py = py.add(b);
        }
        let value = sign * acc.sum();
        let rounding_bound = count as f64 * self.term_err + acc.error_bound() + self.slope * drift;
        Ok(BirkhoffValue { n: m, value, rounding_bound })
    }

    /// (f_x)^(m) by direct summation; fails if the x-line through (x, y) meets a discontinuity.
    pub fn birkhoff_dx(&self, rot: &RotationVector2, x: Circle, y: Circle, m: i64) -> Result<BirkhoffValue> {
        self.sum_along(rot, x, y, m, |p, q| self.fx(p, q), true)
    }

    pub fn birkhoff_dy(&self, rot: &RotationVector2, x: Circle, y: Circle, m: i64) -> Result<BirkhoffValue> {
        self.sum_along(rot, x, y, m, |p, q| self.fy(p, q), false)
    }

    pub fn birkhoff_dxx(&self, rot: &RotationVector2, x: Circle, y: Circle, m: i64) -> Result<BirkhoffValue> {
        self.sum_along(rot, x, y, m, |p, q| self.fxx(p, q), true)
    }

    pub fn birkhoff_dyy(&self, rot: &RotationVector2, x: Circle, y: Circle, m: i64) -> Result<BirkhoffValue> {
        self.sum_along(rot, x, y, m, |p, q| self.fyy(p, q), false)
    }

    /// Derivative cocycles in O(#terms) via geometric sums; one-sided at discontinuities.
    pub fn derivative_sums(&self, rot: &RotationVector2, x: Circle, y: Circle, m: u64) -> Result<DerivativeSums> {
        let d = &self.desc;
        let mf = m as f64;
        let mut fx = mf * d.x_jumps.iter().map(|j| j.d).sum::<f64>();
        let mut fy = mf * (d.y_jumps.iter().map(|j| j.d).sum::<f64>() + d.gamma * self.alpha_f);
        let (mut fxx, mut fyy) = (0.0, 0.0);
        let mut error = 8.0 * U * (fx.abs() + fy.abs());
        if d.gamma != 0.0 && m > 0 {
            let (_, eb) = rot.step_errors();
            let end = y.add(rot.beta_circle().mul_int(m as i64));
            if end.norm() <= eb.saturating_mul(m as u128) {
                return Err(Error::Ambiguous { step: m as i64, what: "y + m·beta within error of an integer".into() });
            }
            fx -= d.gamma * floor_of_advance(y, rot.beta_circle(), m) as f64;
        }
        for t in &d.trig {
            let (s, e) = geometric(t, x, y, rot, m);
            for (i, j, slot) in [(1u32, 0u32, 0usize), (0, 1, 1), (2, 0, 2), (0, 2, 3)] {
                let dt = t.derivative(i, j);
                let coef = Complex64::new(dt.cos, -dt.sin);
                let v = (coef * s).re;
                error += dt.amp() * e;
                match slot {
                    0 => fx += v,
                    1 => fy += v,
                    2 => fxx += v,
                    _ => fyy += v,
                }
            }
        }
        Ok(DerivativeSums { m, fx, fy, fxx, fyy, error })
    }

    /// Closed-form g^(m)(x, y) for m ≥ 0, used to cross-check direct sums.
    pub fn g_sum(&self, rot: &RotationVector2, x: Circle, y: Circle, m: u64) -> f64 {
        self.desc
            .trig
            .iter()
            .map(|t| {
                let (s, _) = geometric(t, x, y, rot, m);
                (Complex64::new(t.cos, -t.sin) * s).re
            })
            .sum()
    }

    /// Θ: sup|f_xx| and sup|f_yy| from the coefficient table.
    pub fn second_derivative_bound(&self) -> f64 {
        let bx: f64 = self.desc.trig.iter().map(|t| t.amp() * (TAU * t.kx as f64).powi(2)).sum();
        let by: f64 = self.desc.trig.iter().map(|t| t.amp() * (TAU * t.ky as f64).powi(2)).sum();
        bx.max(by)
    }

    fn third_derivative_bound(&self) -> f64 {
        let bx: f64 = self.desc.trig.iter().map(|t| t.amp() * (TAU * t.kx as f64).powi(3)).sum();
        let by: f64 = self.desc.trig.iter().map(|t| t.amp() * (TAU * t.ky as f64).powi(3)).sum();
        bx.abs().max(by.abs())
    }

    /// Bound on |f_xxx| and |f_yyy| used to pad sampled suprema of second derivatives.
    pub fn third_bound(&self) -> f64 {
        self.third_derivative_bound()
    }

    fn mixed_bound(&self) -> f64 {
        self.desc.trig.iter().map(|t| t.amp() * TAU * TAU * (t.kx * t.ky).abs() as f64).sum()
    }

    /// sup|f_x| and sup|f_y| over smooth pieces.
    pub fn slope_bounds(&self) -> (f64, f64) {
        let d = &self.desc;
        let sx: f64 = d.x_jumps.iter().map(|j| j.d).sum();
        let sy: f64 = d.y_jumps.iter().map(|j| j.d).sum::<f64>() + d.gamma * self.alpha_f;
        let gx: f64 = d.trig.iter().map(|t| t.amp() * TAU * t.kx.abs() as f64).sum();
        let gy: f64 = d.trig.iter().map(|t| t.amp() * TAU * t.ky.abs() as f64).sum();
        (sx.abs().max((sx - d.gamma).abs()) + gx, sy.abs() + gy)
    }

    /// Variation of x ↦ f(x, y) over the circle.
    pub fn slice_variation_x(&self, y: Circle) -> f64 {
        let d = &self.desc;
        let jumps: f64 = d.x_jumps.iter().map(|j| 2.0 * j.d.abs()).sum();
        let trig: f64 = d.trig.iter().map(|t| 4.0 * t.kx.abs() as f64 * t.amp()).sum();
        let heis = if d.gamma != 0.0 && heis_e(y, self.beta) { 2.0 * d.gamma.abs() } else { 0.0 };
        jumps + trig + heis
    }

    pub fn derivative_bounds(&self, rot: &RotationVector2, m_probe: u64, grid: usize) -> Result<DerivativeBounds> {
        if m_probe < 1 || grid < 1 {
            return Err(Error::invalid("derivative_bounds needs m_probe >= 1 and grid >= 1"));
        }
        let vn = self.von_neumann_integrals();
        if !vn.weak {
            return Err(Error::Certification("neither von Neumann integral is nonzero".into()));
        }
        let top = 2 * m_probe;
        let cell = 1.0 / grid as f64;
        // Per-m grid minima of |f_x^(m)|/m and |f_y^(m)|/m, for m = 1..=2·m_probe.
        let mut min_x = vec![f64::INFINITY; top as usize + 1];
        let mut min_y = vec![f64::INFINITY; top as usize + 1];
        let offset = 0.5 * cell + 1.0e-7;
        for i in 0..grid {
            for j in 0..grid {
                let x = Circle::from_f64(offset + i as f64 * cell);
                let y = Circle::from_f64(offset * 0.9 + j as f64 * cell);
                for m in 1..=top {
                    let s = self.derivative_sums(rot, x, y, m)?;
                    let mf = m as f64;
                    let k = m as usize;
                    min_x[k] = min_x[k].min(s.fx.abs() / mf);
                    min_y[k] = min_y[k].min(s.fy.abs() / mf);
                }
            }
        }
        let second = self.second_derivative_bound();
        let mixed = self.mixed_bound();
        let g = self.desc.gamma.abs();
        let margin_for = |m: u64| (second + mixed) * cell + g / m as f64 + 1e-12;
        let margin = margin_for(m_probe);
        let margin_y = (second + mixed) * cell + 1e-12;
        let range = m_probe as usize..=top as usize;
        let theta = min_x[range.clone()].iter().cloned().fold(f64::INFINITY, f64::min) - margin;
        let theta_y = min_y[range].iter().cloned().fold(f64::INFINITY, f64::min) - margin_y;
        let probe_x = vn.int_fx.abs() > 1e-12;
        if probe_x && theta <= 0.0 {
            return Err(Error::Certification(format!("theta <= 0 after margin ({theta:e}); probe too small?")));
        }
        let m0_for = |mins: &[f64], th: f64, with_gamma: bool| -> u64 {
            let mut m0 = top;
            for m in (1..=top).rev() {
                let mg = if with_gamma { margin_for(m) } else { margin_y };
                if mins[m as usize] - mg >= th {
                    m0 = m;
                } else {
                    break;
                }
            }
            m0
        };
        let m0 = if probe_x { m0_for(&min_x, theta, true) } else { 0 };
        let m0_y = if theta_y > 0.0 { m0_for(&min_y, theta_y, false) } else { 0 };
        let (sx, sy) = self.slope_bounds();
        Ok(DerivativeBounds {
            theta: theta.max(0.0),
            theta_y: theta_y.max(0.0),
            big_theta: second,
            slope_upper_x: sx,
            slope_upper_y: sy,
            m0,
            m0_y,
            c: self.inf_lower,
            big_c: self.sup_upper,
            n_jump: self.x_lines.len(),
            m_jump: self.y_lines.len(),
            margin,
            margin_y,
        })
    }

    /// f − ∫f.
    pub fn centered(&self) -> Result<Centered<'_>> {
        let i = self.integral()?;
        Ok(Centered { f: self, mean: i.value, mean_error: i.error })
    }
}

/// A roof shifted to mean zero; evaluable but no longer a valid roof.
#[derive(Clone, Copy, Debug)]
pub struct Centered<'a> {
    pub f: &'a RoofFunction,
    pub mean: f64,
    pub mean_error: f64,
}

impl Centered<'_> {
    pub fn eval_c(&self, x: Circle, y: Circle) -> f64 {
        self.f.eval_c(x, y) - self.mean
    }

    pub fn birkhoff(&self, rot: &RotationVector2, x: Circle, y: Circle, m: i64) -> Result<BirkhoffValue> {
        let b = self.f.birkhoff(rot, x, y, m)?;
        let mf = m as f64;
        Ok(BirkhoffValue {
            n: m,
            value: b.value - mf * self.mean,
            rounding_bound: b.rounding_bound + mf.abs() * self.mean_error + 4.0 * U * (mf * self.mean).abs(),
        })
    }
}

/// Σ_{k<m} e^{2πi(phase(T^k p))} for one trig frequency, and an absolute error estimate.
fn geometric(t: &TrigTerm, x: Circle, y: Circle, rot: &RotationVector2, m: u64) -> (Complex64, f64) {
    let theta0 = t.phase(x, y).to_f64();
    let w = Circle(0).add(rot.alpha_circle().mul_int(t.kx)).add(rot.beta_circle().mul_int(t.ky));
    let start = Complex64::from_polar(1.0, TAU * theta0);
    if m == 0 {
        return (Complex64::new(0.0, 0.0), 0.0);
    }
    if w.0 == 0 {
        return (start * m as f64, 4.0 * U * m as f64);
    }
    let wf = w.to_f64();
    let sw = (PI * wf).sin();
    if sw.abs() < 1e-9 {
        let mut acc = Complex64::new(0.0, 0.0);
        let mut p = t.phase(x, y);
        for _ in 0..m {
            acc += Complex64::from_polar(1.0, TAU * p.to_f64());
            p = p.add(w);
        }
        return (acc, 8.0 * U * m as f64);
    }
    let af = w.mul_int(m as i64).to_f64();
    let ratio = (PI * af).sin() / sw;
    let s = start * Complex64::from_polar(ratio, PI * (af - wf));
    (s, 16.0 * U * (1.0 + 1.0 / sw.abs()))
}

fn dedup_lines(v: &mut Vec<Line>) {
    v.sort_by_key(|l| l.at);
    v.dedup_by(|a, b| {
        if a.at == b.at {
            b.err = b.err.max(a.err);
            true
        } else {
            false
        }
    });
}

fn breaks(points: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = points.filter(|p| *p > 0.0 && *p < 1.0).collect();
    v.push(0.0);
    v.push(1.0);
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v.dedup();
    v
}

/// Range of {x − Δ} over x ∈ [x0, x1) ⊂ [0, 1).
fn saw_range(x0: f64, x1: f64, at: f64) -> (f64, f64) {
    if at > x0 && at < x1 {
        return (0.0, 1.0);
    }
    let a = (x0 - at).rem_euclid(1.0);
    let b = (a + (x1 - x0)).min(1.0);
    (a, b)
}

fn scale(k: f64, a: f64, b: f64) -> (f64, f64) {
    if k >= 0.0 {
        (k * a, k * b)
    } else {
        (k * b, k * a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> RotationVector2 {
        RotationVector2::golden_silver()
    }

    #[test]
    fn linear_roof_values() {
        let rot = golden();
        let f = RoofFunction::new(RoofDescriptor::linear(1.0, 2.0, 3.0), &rot).unwrap();
        assert_eq!(f.eval(0.5, 0.5), 4.5);
        let g = RoofFunction::new(
            RoofDescriptor { c0: 1.0, x_jumps: vec![Jump { d: 1.0, at: 0.0 }], ..Default::default() },
            &rot,
        )
        .unwrap();
        assert_eq!(g.eval(0.25, 0.9), 1.25);
        assert_eq!(f.integral().unwrap().value, 4.5);
    }

    #[test]
    fn right_continuity_at_breakpoint() {
        let rot = golden();
        let desc = RoofDescriptor { c0: 2.0, x_jumps: vec![Jump { d: 1.0, at: 0.3 }], ..Default::default() };
        let f = RoofFunction::new(desc, &rot).unwrap();
        let at = f.eval(0.3, 0.1);
        let right = f.eval(0.3 + 2f64.powi(-40), 0.1);
        assert!((at - right).abs() < 1e-11);
        assert!((f.eval(0.3 - 2f64.powi(-40), 0.1) - 3.0).abs() < 1e-11);
    }

    #[test]
    fn nonpositive_roof_rejected() {
        let rot = golden();
        let desc = RoofDescriptor { c0: 0.2, x_jumps: vec![Jump { d: -1.0, at: 0.0 }], ..Default::default() };
        assert!(RoofFunction::new(desc, &rot).is_err());
    }

    #[test]
    fn constant_roof_birkhoff() {
        let rot = golden();
        let f = RoofFunction::new(RoofDescriptor { c0: 2.5, ..Default::default() }, &rot).unwrap();
        let (x, y) = (Circle::from_f64(0.1), Circle::from_f64(0.2));
        assert_eq!(f.birkhoff(&rot, x, y, 0).unwrap().value, 0.0);
        assert!((f.birkhoff(&rot, x, y, 7).unwrap().value - 17.5).abs() < 1e-12);
        assert!((f.birkhoff(&rot, x, y, -4).unwrap().value + 10.0).abs() < 1e-12);
    }

    #[test]
    fn second_derivative_closed_form() {
        let rot = golden();
        let desc = RoofDescriptor {
            c0: 2.0,
            trig: vec![TrigTerm { kx: 1, ky: 0, cos: 0.1, sin: 0.0 }],
            ..Default::default()
        };
        let f = RoofFunction::new(desc, &rot).unwrap();
        assert!((f.second_derivative_bound() - 0.1 * 4.0 * PI * PI).abs() < 1e-12);
    }
}
