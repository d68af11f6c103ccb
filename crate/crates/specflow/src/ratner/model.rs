//! The crossing-counter model of f^(n)(x', y') − f^(n)(x, y) and its constants.

use super::sparse::{crossing_sequence_lifts, sparseness_check};
use super::LiftedPoint;
use crate::cfrac::{bounded_pq_constant, PqConstant};
use crate::circle::{Circle, Lift};
use crate::error::{Error, Result};
use crate::rng;
use crate::roof::RoofFunction;
use crate::rotations::RotationVector2;
use rand::Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelCase {
    /// γ ≠ 0: two Heisenberg counters carry weight γ.
    Heisenberg,
    /// γ = 0: only the sawtooth jumps.
    Sawtooth,
}

/// One integer-valued crossing counter N_j evaluated on a lifted pair (p, q).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Counter {
    /// [x' − Δ] − [x − Δ].
    XJump { at: Circle },
    /// [y' − Δ] − [y − Δ].
    YJump { at: Circle },
    /// ([x'] − [x])·[{y} + β].
    HeisX,
    /// −[{x'} + α]·([y' + β] − [y + β]).
    HeisY,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelOptions {
    pub sweep_ds: Vec<f64>,
    pub sweep_points: usize,
    /// Gap statistics are taken over n < sweep_span/d.
    pub sweep_span: f64,
    pub independence_bound: i64,
    pub spot_checks: usize,
    pub seed: u64,
}

impl Default for ModelOptions {
    fn default() -> Self {
        ModelOptions {
            sweep_ds: vec![1e-2, 1e-3, 1e-4],
            sweep_points: 3,
            sweep_span: 40.0,
            independence_bound: 10,
            spot_checks: 1000,
            seed: 0x5eed,
        }
    }
}

/// Per-(d, coordinate) gap statistics, scaled by d.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub d: f64,
    pub coordinate: char,
    pub min_gap_scaled: f64,
    pub max_gap_scaled: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct C12Sweep {
    pub rows: Vec<SweepRow>,
    pub raw_c1: f64,
    pub raw_c2: f64,
    pub safety_low: f64,
    pub safety_high: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CocycleModel {
    pub case: ModelCase,
    pub h: Vec<f64>,
    pub counters: Vec<Counter>,
    pub s: usize,
    pub r: f64,
    pub b: f64,
    pub gamma: f64,
    pub lipschitz: f64,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    /// min |Σ w_j h_j| over nonzero w ∈ {−1, 0, 1}^s.
    pub h_min: f64,
    pub p0: f64,
    pub p1: f64,
    pub independence_bound: i64,
    pub sweep: C12Sweep,
    pub pq_alpha: PqConstant,
    pub pq_beta: PqConstant,
    pub spot_checks: usize,
    pub warnings: Vec<String>,
    alpha: Circle,
    beta: Circle,
    alpha_f: f64,
    beta_f: f64,
}

#[inline]
fn wraps(y: Circle, a: Circle) -> i64 {
    y.0.checked_add(a.0).is_none() as i64
}

impl CocycleModel {
    pub fn counter(&self, j: usize, p: &LiftedPoint, q: &LiftedPoint) -> i64 {
        match self.counters[j] {
            Counter::XJump { at } => q.x.floor_minus(at) - p.x.floor_minus(at),
            Counter::YJump { at } => q.y.floor_minus(at) - p.y.floor_minus(at),
            Counter::HeisX => (q.x.floor() - p.x.floor()) * wraps(p.y.frac, self.beta),
            Counter::HeisY => {
                -wraps(q.x.frac, self.alpha) * (q.y.add_frac(self.beta).floor() - p.y.add_frac(self.beta).floor())
            }
        }
    }

    /// N_{s+1} = [y'] − [y].
    pub fn n_extra(&self, p: &LiftedPoint, q: &LiftedPoint) -> i64 {
        q.y.floor() - p.y.floor()
    }

    /// b(p, q) = γ{x'}.
    pub fn boundary(&self, _p: &LiftedPoint, q: &LiftedPoint) -> f64 {
        self.gamma * q.x.frac.to_f64()
    }

    pub fn alpha_f64(&self) -> f64 {
        self.alpha_f
    }

    pub fn beta_f64(&self) -> f64 {
        self.beta_f
    }

    /// κ(ε) = ε/(6sC₀C₂).
    pub fn kappa(&self, eps: f64) -> f64 {
        eps / (6.0 * self.s as f64 * self.c0 * self.c2)
    }

    /// δ(ε, N) = ε³C₁/(2C₀N).
    pub fn delta(&self, eps: f64, n: u64) -> f64 {
        eps.powi(3) * self.c1 / (2.0 * self.c0 * n as f64)
    }

    /// Largest admissible ε: min(1/2, C₀C₁/s, h/(4s)).
    pub fn eps_cap(&self) -> f64 {
        let s = self.s as f64;
        0.5f64.min(self.c0 * self.c1 / s).min(self.h_min / (4.0 * s))
    }
}

/// Exhaustive search for a nonzero k ∈ [−K, K]^m with |Σ k_i v_i| below a rounding tolerance.
pub(crate) fn integer_relation(v: &[f64], k: i64) -> Option<Vec<i64>> {
    let scale: f64 = v.iter().map(|x| x.abs()).sum::<f64>() * k as f64;
    let tol = 1e-12 * scale.max(1.0);
    let m = v.len();
    let mut c = vec![-k; m];
    loop {
        // Only vectors whose first nonzero entry is positive; the rest are negatives.
        if let Some(first) = c.iter().find(|&&x| x != 0) {
            if *first > 0 {
                let s: f64 = c.iter().zip(v).map(|(&a, &b)| a as f64 * b).sum();
                if s.abs() <= tol {
                    return Some(c);
                }
            }
        }
        let mut i = 0;
        loop {
            if i == m {
                return None;
            }
            if c[i] < k {
                c[i] += 1;
                break;
            }
            c[i] = -k;
            i += 1;
        }
    }
}

fn min_combination(h: &[f64]) -> f64 {
    let s = h.len() as u32;
    let mut best = f64::INFINITY;
    for code in 1..3usize.pow(s) {
        let mut c = code;
        let mut v = 0.0;
        for &hj in h {
            v += ((c % 3) as f64 - 1.0) * hj;
            c /= 3;
        }
        if v != 0.0 {
            best = best.min(v.abs());
        }
    }
    best
}

fn gap_sweep(rot: &RotationVector2, opts: &ModelOptions) -> Result<C12Sweep> {
    let (ea, eb) = rot.step_errors();
    let mut r = rng::stream(opts.seed, 0);
    let bases: Vec<f64> = (0..opts.sweep_points.max(1)).map(|_| r.gen::<f64>()).collect();
    let mut rows = Vec::new();
    for &d in &opts.sweep_ds {
        if !(d > 0.0 && d < 0.5) {
            return Err(Error::invalid(format!("sweep distance {d} outside (0, 1/2)")));
        }
        let n_max = (opts.sweep_span / d).ceil() as u64;
        for (coordinate, step, err) in [('x', rot.alpha_circle(), ea), ('y', rot.beta_circle(), eb)] {
            let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
            for &x in &bases {
                let seq = crossing_sequence_lifts(step, err, Lift::from_f64(x), Lift::from_f64(x + d), n_max)?;
                let v = sparseness_check(&seq, 0.0, f64::INFINITY);
                if let (Some(a), Some(b)) = (v.min_gap, v.max_gap) {
                    lo = lo.min(a as f64 * d);
                    hi = hi.max(b as f64 * d);
                }
            }
            if !lo.is_finite() {
                return Err(Error::invalid(format!("sweep at d = {d} saw too few crossings; raise sweep_span")));
            }
            rows.push(SweepRow { d, coordinate, min_gap_scaled: lo, max_gap_scaled: hi });
        }
    }
    let raw_c1 = rows.iter().map(|r| r.min_gap_scaled).fold(f64::INFINITY, f64::min);
    let raw_c2 = rows.iter().map(|r| r.max_gap_scaled).fold(0.0, f64::max);
    Ok(C12Sweep { rows, raw_c1, raw_c2, safety_low: 0.8, safety_high: 1.25 })
}

/// Builds the counter model of a roof f₁(x) + f₂(y) + g + γh with sawtooth f₁, f₂.
///
/// C₁ and C₂ are gap statistics of crossing sequences over a d-sweep, widened by the
/// safety factors and normalized so that C₁ ≤ 1 ≤ C₂. Independence of the jump sizes
/// (and γ) is certified only against relations with coefficients up to the search bound.
pub fn build_cocycle_model(f: &RoofFunction, rot: &RotationVector2, opts: &ModelOptions) -> Result<CocycleModel> {
    let desc = &f.desc;
    let nonzero = |js: &[crate::roof::Jump]| js.iter().any(|j| j.d != 0.0);
    if !nonzero(&desc.x_jumps) || !nonzero(&desc.y_jumps) {
        return Err(Error::invalid("both sawtooth parts need a jump"));
    }
    for js in [&desc.x_jumps, &desc.y_jumps] {
        let mut at: Vec<u128> = js.iter().map(|j| Circle::from_f64(j.at).0).collect();
        at.sort_unstable();
        if at.windows(2).any(|w| w[0] == w[1]) || js.iter().any(|j| j.d == 0.0) {
            return Err(Error::invalid("jumps must be nonzero with distinct breakpoints"));
        }
    }
    let gamma = desc.gamma;
    let case = if gamma == 0.0 { ModelCase::Sawtooth } else { ModelCase::Heisenberg };
    let mut h = Vec::new();
    let mut counters = Vec::new();
    for j in &desc.x_jumps {
        h.push(-j.d);
        counters.push(Counter::XJump { at: Circle::from_f64(j.at) });
    }
    for j in &desc.y_jumps {
        h.push(-j.d);
        counters.push(Counter::YJump { at: Circle::from_f64(j.at) });
    }
    let mut independent: Vec<f64> = h.clone();
    if case == ModelCase::Heisenberg {
        if !f.von_neumann_integrals().weak {
            return Err(Error::invalid("with γ ≠ 0 one of Σd₁ − βγ, Σd₂ + αγ must be nonzero"));
        }
        independent.push(gamma);
        h.extend([gamma, gamma]);
        counters.extend([Counter::HeisX, Counter::HeisY]);
    }
    let k = opts.independence_bound;
    if k < 1 {
        return Err(Error::invalid("independence search bound must be >= 1"));
    }
    if let Some(rel) = integer_relation(&independent, k) {
        return Err(Error::Certification(format!("integer relation {rel:?} among {independent:?}")));
    }

    let s = h.len();
    let r = 1.0;
    let b = gamma.abs();
    let alpha_f = rot.alpha_f64();
    let beta_f = rot.beta_f64();
    let lipschitz = f.lip_g;
    let jumps: f64 = desc.x_jumps.iter().chain(&desc.y_jumps).map(|j| j.d.abs()).sum();
    let c0 = (lipschitz + jumps + gamma.abs().max(1.0) * (alpha_f.abs() + beta_f.abs() + 2.0)).max(1.0);
    let sweep = gap_sweep(rot, opts)?;
    let c1 = (sweep.safety_low * sweep.raw_c1).min(1.0);
    let c2 = (sweep.safety_high * sweep.raw_c2).max(1.0);
    let h_min = min_combination(&h);
    let sum_h: f64 = h.iter().map(|x| x.abs()).sum();
    let sf = s as f64;
    let p1 = r * ((3.0 * sf * c2 / c1 + 2.0) * sum_h + b + 3.0 * sf * c0 * c2 + 2.0);

    let d_min = opts.sweep_ds.iter().copied().fold(f64::INFINITY, f64::min);
    let pq_range = (opts.sweep_span / d_min).ceil() as u64;
    let pq_alpha = bounded_pq_constant(&rot.alpha, pq_range)?;
    let pq_beta = bounded_pq_constant(&rot.beta, pq_range)?;
    let mut warnings = Vec::new();
    for (name, pq) in [("alpha", &pq_alpha), ("beta", &pq_beta)] {
        if pq.max_quotient > 1000 {
            warnings.push(format!("{name} has a partial quotient {} below denominator {}", pq.max_quotient, pq.n_max));
        }
    }

    let model = CocycleModel {
        case,
        h,
        counters,
        s,
        r,
        b,
        gamma,
        lipschitz,
        c0,
        c1,
        c2,
        h_min,
        p0: h_min / 4.0,
        p1,
        independence_bound: k,
        sweep,
        pq_alpha,
        pq_beta,
        spot_checks: opts.spot_checks,
        warnings,
        alpha: rot.alpha_circle(),
        beta: rot.beta_circle(),
        alpha_f,
        beta_f,
    };
    spot_check(&model, opts)?;
    Ok(model)
}

// |N_j| ≤ R and |b| ≤ B on random pairs at lift distance below 1/2.
fn spot_check(model: &CocycleModel, opts: &ModelOptions) -> Result<()> {
    let mut r = rng::stream(opts.seed, 1);
    for _ in 0..opts.spot_checks {
        let p = LiftedPoint::on_torus(Circle(r.gen()), Circle(r.gen()));
        let dx = Circle(r.gen::<u128>() >> 1);
        let dy = Circle(r.gen::<u128>() >> 1);
        let q = LiftedPoint {
            x: if r.gen() { p.x.add_frac(dx) } else { p.x.sub_frac(dx) },
            y: if r.gen() { p.y.add_frac(dy) } else { p.y.sub_frac(dy) },
        };
        for j in 0..model.s {
            if model.counter(j, &p, &q).abs() as f64 > model.r {
                return Err(Error::Certification(format!("counter {j} exceeds R on a close pair")));
            }
        }
        if model.n_extra(&p, &q).abs() as f64 > model.r || model.boundary(&p, &q).abs() > model.b {
            return Err(Error::Certification("boundary term exceeds its bound".into()));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roof::RoofDescriptor;

    #[test]
    fn relation_search() {
        assert_eq!(integer_relation(&[1.0, 2f64.sqrt()], 10), None);
        assert_eq!(integer_relation(&[1.0, 2.0, 2f64.sqrt()], 3), Some(vec![2, -1, 0]));
    }

    #[test]
    fn h_min_enumerates_all_signs() {
        let r2 = 2f64.sqrt();
        assert!((min_combination(&[-1.0, -r2]) - (r2 - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn linear_roof_model() {
        let rot = RotationVector2::golden_silver();
        let r2 = 2f64.sqrt();
        let f = RoofFunction::new(RoofDescriptor::linear(1.0, r2, 3.0), &rot).unwrap();
        let m = build_cocycle_model(&f, &rot, &ModelOptions::default()).unwrap();
        assert_eq!(m.case, ModelCase::Sawtooth);
        assert_eq!((m.s, m.b), (2, 0.0));
        let expect = 1.0 + r2 + rot.alpha_f64() + rot.beta_f64() + 2.0;
        assert!((m.c0 - expect).abs() < 1e-12);
        assert!(0.0 < m.c1 && m.c1 <= 1.0 && m.c2 >= 1.0);
        assert!(m.warnings.is_empty());
    }

    #[test]
    fn dependent_jumps_are_rejected() {
        let rot = RotationVector2::golden_silver();
        let f = RoofFunction::new(RoofDescriptor::linear(1.0, 2.0, 3.0), &rot).unwrap();
        assert!(matches!(build_cocycle_model(&f, &rot, &ModelOptions::default()), Err(Error::Certification(_))));
    }
}
