//! Partial partitions η_{2n}, η_{2n+1} and sampled checks of the two stretch inequalities
//! of Fayad's mixing criterion over a Yoccoz pair.

use super::weakmix::Axis;
use crate::circle::{ulps_to_f64, Circle};
use crate::error::{Error, Result};
use crate::par::Exec;
use crate::rng;
use crate::roof::{DerivativeBounds, RoofFunction};
use crate::rotations::{RotationVector2, YoccozPair};
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub start: Circle,
    /// Length in units of 2^-128.
    pub len: u128,
}

impl Cell {
    pub fn length(&self) -> f64 {
        ulps_to_f64(self.len)
    }

    /// Point at relative position u ∈ [0, 1] of the cell.
    pub fn at(&self, u: f64) -> Circle {
        let off = (self.len as f64 * u.clamp(0.0, 1.0)) as u128;
        self.start.add(Circle(off.min(self.len)))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartialPartition {
    /// 2n or 2n + 1.
    pub level: usize,
    pub n: usize,
    pub axis: Axis,
    /// Number of translate points a_l − jα (or b_l − jβ) determining κ.
    pub points: usize,
    pub translates: String,
    pub cells: Vec<Cell>,
    pub mass: f64,
    pub max_length: f64,
    /// Cells of κ are kept iff longer than this.
    pub threshold: f64,
    /// 1 − 2N/√γ(n).
    pub mass_bound: f64,
    /// 2/q_n (even) or 2/r_n (odd).
    pub diameter_bound: f64,
    pub mass_ok: bool,
    /// Checked in integers: every kept length (plus its error) times q_n is below 2.
    pub diameter_ok: bool,
    /// Endpoint uncertainty in ulps.
    pub endpoint_error: u128,
}

fn gamma_ratio(pair: &YoccozPair, n: usize) -> (BigUint, BigUint) {
    pair.gamma.at(n)
}

/// q·⌈next·den/(num·q)⌉: the number of translates per discontinuity line.
fn translate_count(q: &BigUint, next: &BigUint, g: &(BigUint, BigUint)) -> BigUint {
    q * (next * &g.1).div_ceil(&(&g.0 * q))
}

#[allow(clippy::too_many_arguments)]
fn build(
    level: usize,
    n: usize,
    axis: Axis,
    lines: &[Circle],
    step: Circle,
    step_err: u128,
    denom: &BigUint,
    count: &BigUint,
    gamma: f64,
) -> Result<PartialPartition> {
    let j_max = count
        .to_u64()
        .filter(|&c| c <= 50_000_000)
        .ok_or_else(|| Error::invalid(format!("level {n} needs {count} translates per line; too many")))?;
    let mut pts: Vec<Circle> = Vec::with_capacity(lines.len() * j_max as usize);
    for &a in lines {
        let mut p = a;
        for _ in 0..j_max {
            pts.push(p);
            p = p.sub(step);
        }
    }
    pts.sort_unstable();
    let err = step_err.saturating_mul(j_max as u128);
    let qn = denom.to_f64().unwrap_or(f64::INFINITY);
    let threshold = 1.0 / (gamma.sqrt() * qn);
    let thr_ulps = threshold * 2f64.powi(128);
    let mut cells = Vec::new();
    let mut mass = 0u128;
    let mut max_len = 0u128;
    let two128 = BigUint::one() << 128u32;
    let mut diameter_ok = true;
    for i in 0..pts.len() {
        let a = pts[i];
        let b = pts[(i + 1) % pts.len()];
        let len = if pts.len() == 1 { u128::MAX } else { b.sub(a).0 };
        if len <= 2 * err {
            return Err(Error::precision(format!(
                "translate points {a:?} and {b:?} not separated beyond their error at level {n}"
            )));
        }
        let lf = len as f64;
        if (lf - thr_ulps).abs() <= 2.0 * err as f64 + 1.0 {
            return Err(Error::precision(format!("cell length within rounding of the filter threshold at level {n}")));
        }
        if lf > thr_ulps {
            if BigUint::from(len.saturating_add(2 * err)) * denom >= &two128 * 2u32 {
                diameter_ok = false;
            }
            cells.push(Cell { start: a, len });
            mass = mass.saturating_add(len);
            max_len = max_len.max(len);
        }
    }
    let mass_f = ulps_to_f64(mass);
    let mass_bound = 1.0 - 2.0 * lines.len() as f64 / gamma.sqrt();
    let pts_err = ulps_to_f64(2 * err) * cells.len() as f64;
    Ok(PartialPartition {
        level,
        n,
        axis,
        points: pts.len(),
        translates: count.to_string(),
        cells,
        mass: mass_f,
        max_length: ulps_to_f64(max_len),
        threshold,
        mass_bound,
        diameter_bound: 2.0 / qn,
        mass_ok: mass_f - pts_err >= mass_bound,
        diameter_ok,
        endpoint_error: err,
    })
}

/// η_{2n} from the points a_l − jα, j < q_n⌈q_{n+1}/(γ(n)q_n)⌉, keeping cells longer than
/// 1/(√γ(n)·q_n); η_{2n+1} likewise from b_l − jβ with r_n, r_{n+1}.
pub fn fayad_partitions(
    f: &RoofFunction,
    rot: &RotationVector2,
    pair: &YoccozPair,
    n: usize,
) -> Result<(PartialPartition, PartialPartition)> {
    if n < 1 {
        return Err(Error::invalid("level n must be >= 1"));
    }
    let pair = pair.extended(n + 1);
    let g = gamma_ratio(&pair, n);
    let gf = pair.gamma_at(n);
    let (ea, eb) = rot.step_errors();
    let xs: Vec<Circle> = f.x_lines().iter().map(|l| l.at).collect();
    let ys: Vec<Circle> = f.y_lines().iter().map(|l| l.at).collect();
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::invalid("roof needs discontinuity lines in both coordinates"));
    }
    let jx = translate_count(&pair.q[n], &pair.q[n + 1], &g);
    let jy = translate_count(&pair.r[n], &pair.r[n + 1], &g);
    let even = build(2 * n, n, Axis::X, &xs, rot.alpha_circle(), ea, &pair.q[n], &jx, gf)?;
    let odd = build(2 * n + 1, n, Axis::Y, &ys, rot.beta_circle(), eb, &pair.r[n], &jy, gf)?;
    Ok((even, odd))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FayadOptions {
    pub m_samples: usize,
    /// Sample points per cell when bounding inf and sup over the cell.
    pub cell_samples: usize,
    /// (cell, transverse coordinate) probes per sampled m.
    pub transverse_samples: usize,
    pub seed: u64,
    /// Walk every m in each window instead of sampling.
    #[serde(default)]
    pub exhaustive: bool,
}

impl Default for FayadOptions {
    fn default() -> Self {
        FayadOptions { m_samples: 20, cell_samples: 8, transverse_samples: 100, seed: 0, exhaustive: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    pub level: usize,
    pub axis: Axis,
    pub tau: f64,
    pub eps: f64,
    pub k: f64,
    pub m_window: (u64, u64),
    /// m₀ < window start, and window end ≤ the translate count, checked in integers.
    pub window_claim_ok: bool,
    pub mass: f64,
    pub max_length: f64,
    pub cells: usize,
    pub m_values: usize,
    pub probes: usize,
    pub passes: usize,
    pub failures: usize,
    /// min over probes of inf|∂f^(m)|·|C| − k.
    pub worst_stretch_margin: f64,
    /// min over probes of ε·inf|∂f^(m)| − sup|∂²f^(m)|·|C|.
    pub worst_distortion_margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FayadReport {
    pub n: usize,
    pub theta: f64,
    #[serde(rename = "Theta")]
    pub big_theta: f64,
    pub m0: u64,
    pub levels: Vec<LevelReport>,
    pub coverage: String,
    pub seed: u64,
    pub pass: bool,
}

struct Probe {
    stretch: f64,
    distortion: f64,
}

#[allow(clippy::too_many_arguments)]
fn probe(
    f: &RoofFunction,
    rot: &RotationVector2,
    axis: Axis,
    cell: &Cell,
    transverse: Circle,
    m: u64,
    samples: usize,
    big_theta: f64,
    eps: f64,
    k: f64,
) -> Result<Probe> {
    let third = f.third_bound();
    let mf = m as f64;
    let len = cell.length();
    let h = len / (2.0 * samples as f64);
    let mut inf = f64::INFINITY;
    let mut sup = 0.0f64;
    for i in 0..samples {
        let u = cell.at((i as f64 + 0.5) / samples as f64);
        let (x, y) = match axis {
            Axis::X => (u, transverse),
            Axis::Y => (transverse, u),
        };
        let d = f.derivative_sums(rot, x, y, m)?;
        let (d1, d2) = match axis {
            Axis::X => (d.fx, d.fxx),
            Axis::Y => (d.fy, d.fyy),
        };
        inf = inf.min(d1.abs() - d.error);
        sup = sup.max(d2.abs() + d.error);
    }
    // every point of the cell is within h of a sample
    let inf = inf - mf * big_theta * h;
    let sup = (sup + mf * third * h).min(mf * big_theta);
    Ok(Probe { stretch: inf * len - k, distortion: eps * inf - sup * len })
}

/// Samples m log-uniformly from [τ_{2n}/2, 2τ_{2n+1}] and [τ_{2n+1}/2, 2τ_{2n+2}] and
/// evaluates both inequalities on random (cell, transverse) probes.
pub fn fayad_check(
    f: &RoofFunction,
    rot: &RotationVector2,
    pair: &YoccozPair,
    n: usize,
    bounds: &DerivativeBounds,
    opts: &FayadOptions,
    exec: Exec,
) -> Result<FayadReport> {
    if opts.cell_samples == 0 || opts.transverse_samples == 0 || (!opts.exhaustive && opts.m_samples == 0) {
        return Err(Error::invalid("sample counts must be positive"));
    }
    let (even, odd) = fayad_partitions(f, rot, pair, n)?;
    let pair = pair.extended(n + 1);
    let theta = bounds.theta.min(bounds.theta_y);
    if !(theta > 0.0) {
        return Err(Error::Certification("fayad check needs theta > 0 in both coordinates".into()));
    }
    let big_theta = bounds.big_theta;
    let m0 = bounds.m0.max(bounds.m0_y);
    let g = pair.gamma_at(n);
    let (gn, gd) = pair.gamma.at(n);
    let (g1n, g1d) = pair.gamma.at(n + 1);
    let q = |i: usize| pair.q[i].to_f64().unwrap_or(f64::INFINITY);
    let r = |i: usize| pair.r[i].to_f64().unwrap_or(f64::INFINITY);
    let k = theta * g.sqrt();
    let big = |x: &BigUint| x.to_u64().ok_or_else(|| Error::invalid("m-window beyond 64-bit range"));
    // even window [γ(n)q_n, 4γ(n)r_n], odd window [γ(n)r_n, 4γ(n+1)q_{n+1}], rounded inward
    let w_even = (big(&(&gn * &pair.q[n]).div_ceil(&gd))?, big(&(&gn * &pair.r[n] * 4u32 / &gd))?);
    let w_odd = (big(&(&gn * &pair.r[n]).div_ceil(&gd))?, big(&(&g1n * &pair.q[n + 1] * 4u32 / &g1d))?);
    let jx = translate_count(&pair.q[n], &pair.q[n + 1], &(gn.clone(), gd.clone()));
    let jy = translate_count(&pair.r[n], &pair.r[n + 1], &(gn.clone(), gd.clone()));
    // m₀ < γq_n ≤ m ≤ 4γr_n ≤ q_{n+1}/γ ≤ J, and the same chain one half-level up
    let claim_even = m0 < w_even.0
        && &gn * &gn * &pair.r[n] * 4u32 <= &pair.q[n + 1] * &gd * &gd
        && BigUint::from(w_even.1) <= jx;
    let claim_odd = m0 < w_odd.0
        && &g1n * &gn * &pair.q[n + 1] * 4u32 <= &pair.r[n + 1] * &g1d * &gd
        && BigUint::from(w_odd.1) <= jy;
    let mut levels = Vec::new();
    for (part, window, tau, eps, tag) in [
        (&even, w_even, 2.0 * g * q(n), 2.0 * big_theta / (theta * q(n)), 0u64),
        (&odd, w_odd, 2.0 * g * r(n), 2.0 * big_theta / (theta * r(n)), 1u64),
    ] {
        if window.0 > window.1 || part.cells.is_empty() {
            return Err(Error::invalid(format!("empty m-window or partition at level {}", part.level)));
        }
        let ms: Vec<u64> = if opts.exhaustive {
            (window.0..=window.1).collect()
        } else {
            let mut rr = rng::stream(rng::derive(opts.seed, tag), u64::MAX);
            let (a, b) = ((window.0 as f64).ln(), ((window.1 + 1) as f64).ln());
            (0..opts.m_samples).map(|_| (rr.gen_range(a..b).exp() as u64).clamp(window.0, window.1)).collect()
        };
        let per_m = opts.transverse_samples;
        let results = exec.map(ms.len() * per_m, |idx| {
            let m = ms[idx / per_m];
            let mut rr = rng::stream(rng::derive(opts.seed, tag + 2), idx as u64);
            let cell = &part.cells[rr.gen_range(0..part.cells.len())];
            let transverse = Circle(rr.gen());
            probe(f, rot, part.axis, cell, transverse, m, opts.cell_samples, big_theta, eps, k)
        });
        let results = results.into_iter().collect::<Result<Vec<_>>>()?;
        let passes = results.iter().filter(|p| p.stretch >= 0.0 && p.distortion >= 0.0).count();
        levels.push(LevelReport {
            level: part.level,
            axis: part.axis,
            tau,
            eps,
            k,
            m_window: window,
            window_claim_ok: if tag == 0 { claim_even } else { claim_odd },
            mass: part.mass,
            max_length: part.max_length,
            cells: part.cells.len(),
            m_values: ms.len(),
            probes: results.len(),
            passes,
            failures: results.len() - passes,
            worst_stretch_margin: results.iter().map(|p| p.stretch).fold(f64::INFINITY, f64::min),
            worst_distortion_margin: results.iter().map(|p| p.distortion).fold(f64::INFINITY, f64::min),
        });
    }
    let coverage = if opts.exhaustive {
        format!("every m in each window, {} random (cell, transverse) probes per m", opts.transverse_samples)
    } else {
        format!(
            "{} log-uniform m per window, {} random (cell, transverse) probes per m, {} points per cell",
            opts.m_samples, opts.transverse_samples, opts.cell_samples
        )
    };
    let pass = levels.iter().all(|l| l.failures == 0 && l.window_claim_ok);
    Ok(FayadReport { n, theta, big_theta, m0, levels, coverage, seed: opts.seed, pass })
}
