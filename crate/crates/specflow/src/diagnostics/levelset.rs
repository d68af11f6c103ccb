//! λ{x : ∃j, |f^(j)(x, y) − t| < ε} on a horizontal slice.

use crate::circle::Circle;
use crate::error::{Error, Result};
use crate::par::Exec;
use crate::roof::{DerivativeBounds, RoofFunction};
use crate::rotations::RotationVector2;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelSetEstimate {
    pub t: f64,
    pub eps: f64,
    pub estimate: f64,
    /// 16C/(θc²)(Nc + Θ₁)ε, with Θ₁ the first-derivative bound along x.
    pub lemma_bound: f64,
    pub j_lo: u64,
    pub j_hi: u64,
    pub refined_cells: usize,
    /// Refined cells whose sub-samples still flip more than twice.
    pub unresolved_cells: usize,
    pub partial: bool,
    /// Worst-case measure misattributed by refined cells (one sub-cell per transition).
    pub resolution_error: f64,
    pub pass: bool,
}

/// Integers j with (t − ε)/C < j < (t + ε)/c; no other return time can land within ε of t.
pub fn j_window(t: f64, eps: f64, c: f64, big_c: f64) -> (u64, u64) {
    let lo = ((t - eps) / big_c).floor() as i64 + 1;
    let hi = ((t + eps) / c).ceil() as i64 - 1;
    (lo.max(1) as u64, hi.max(0) as u64)
}

/// Whether some j in [j_lo, j_hi] has |f^(j)(x, y) − t| < ε.
pub fn level_hit(f: &RoofFunction, rot: &RotationVector2, x: Circle, y: Circle, t: f64, eps: f64, j: (u64, u64)) -> bool {
    let (a, b) = (rot.alpha_circle(), rot.beta_circle());
    let (mut px, mut py) = (x, y);
    let mut acc = 0.0;
    for k in 1..=j.1 {
        acc += f.eval_c(px, py);
        if k >= j.0 && (acc - t).abs() < eps {
            return true;
        }
        px = px.add(a);
        py = py.add(b);
    }
    false
}

/// Scans x on a grid of `x_grid` cells; a cell whose endpoints and midpoint disagree is
/// re-sampled at ten interior midpoints.
#[allow(clippy::too_many_arguments)]
pub fn level_set_measure(
    f: &RoofFunction,
    rot: &RotationVector2,
    y: f64,
    t: f64,
    eps: f64,
    x_grid: usize,
    bounds: &DerivativeBounds,
    exec: Exec,
) -> Result<LevelSetEstimate> {
    let (c, big_c) = (bounds.c, bounds.big_c);
    if x_grid == 0 {
        return Err(Error::invalid("x_grid must be >= 1"));
    }
    if !(eps > 0.0 && eps < c / 4.0) {
        return Err(Error::invalid(format!("need 0 < eps < c/4 = {}", c / 4.0)));
    }
    if t < 2.0 * big_c * bounds.m0 as f64 {
        return Err(Error::invalid(format!("need t >= 2·C·m0 = {}", 2.0 * big_c * bounds.m0 as f64)));
    }
    if !(bounds.theta > 0.0) {
        return Err(Error::Certification("no certified theta along x".into()));
    }
    let yc = Circle::from_f64(y);
    let win = j_window(t, eps, c, big_c);
    let w = 1.0 / x_grid as f64;
    let hit = |x: f64| level_hit(f, rot, Circle::from_f64(x), yc, t, eps, win);
    let nodes = exec.map(x_grid, |i| hit(i as f64 * w));
    let cells = exec.map(x_grid, |i| {
        let l = nodes[i];
        let r = nodes[(i + 1) % x_grid];
        let m = hit((i as f64 + 0.5) * w);
        if l == r && r == m {
            return (if m { w } else { 0.0 }, false, false);
        }
        let mut prev = l;
        let mut flips = 0;
        let mut mass = 0.0;
        for k in 0..10 {
            let v = hit(i as f64 * w + (k as f64 + 0.5) * w / 10.0);
            flips += usize::from(v != prev);
            prev = v;
            if v {
                mass += w / 10.0;
            }
        }
        flips += usize::from(prev != r);
        (mass, true, flips > 2)
    });
    let estimate: f64 = cells.iter().map(|c| c.0).sum();
    let refined_cells = cells.iter().filter(|c| c.1).count();
    let unresolved_cells = cells.iter().filter(|c| c.2).count();
    let lemma_bound = 16.0 * big_c / (bounds.theta * c * c) * (bounds.n_jump as f64 * c + bounds.slope_upper_x) * eps;
    Ok(LevelSetEstimate {
        t,
        eps,
        estimate,
        lemma_bound,
        j_lo: win.0,
        j_hi: win.1,
        refined_cells,
        unresolved_cells,
        partial: unresolved_cells > 0,
        resolution_error: refined_cells as f64 * w / 5.0,
        pass: estimate <= lemma_bound,
    })
}

/// Plain midpoint rule on `points` cells, scanning every return time up to (t + ε)/c.
pub fn level_set_dense(
    f: &RoofFunction,
    rot: &RotationVector2,
    y: f64,
    t: f64,
    eps: f64,
    points: usize,
    exec: Exec,
) -> f64 {
    let yc = Circle::from_f64(y);
    let all = (1, ((t + eps) / f.inf_lower).ceil() as u64 + 1);
    let w = 1.0 / points as f64;
    let hits = exec.map(points, |i| level_hit(f, rot, Circle::from_f64((i as f64 + 0.5) * w), yc, t, eps, all));
    hits.iter().filter(|&&h| h).count() as f64 * w
}
