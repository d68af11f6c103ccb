//! Deviations f^(l) − l∫f at (common) denominators, and their empirical distribution.

use crate::cfrac::{convergents, floor_sum_dyadic, PartialQuotients};
use crate::circle::Circle;
use crate::error::{Error, Result};
use crate::par::Exec;
use crate::rng;
use crate::roof::RoofFunction;
use crate::rotations::RotationVector2;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Above this l the orbit is not walked; the sawtooth sums are evaluated exactly.
pub const DIRECT_LIMIT: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SumMethod {
    Direct,
    ExactFloorSum,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RigidityRow {
    /// Decimal string; the larger common denominators overflow every machine integer.
    pub l: String,
    pub max_deviation: f64,
    pub threshold: f64,
    pub rounding_budget: f64,
    pub common_denominator: bool,
    pub method: SumMethod,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RigidityTable {
    pub rows: Vec<RigidityRow>,
    pub samples: usize,
    pub seed: u64,
}

/// Rational brackets lo < θ < hi from consecutive convergents fine enough for sums of length l.
struct Bracket {
    lo: (BigUint, BigUint),
    hi: (BigUint, BigUint),
}

fn brackets(pq: &PartialQuotients, l: &BigUint) -> Result<Vec<Bracket>> {
    let need: BigUint = l * l << 64u32;
    let mut n = 8;
    loop {
        let c = convergents(pq, n + 4)?;
        if let Some(k) = (1..n + 3).find(|&k| &c[k].q * &c[k + 1].q > need) {
            // a few successively finer brackets in case a floor sum straddles the coarse one
            let out = (k..k + 3)
                .map(|j| {
                    let (a, b) = (&c[j], &c[j + 1]);
                    let (a, b) = if j % 2 == 0 { (a, b) } else { (b, a) };
                    Bracket { lo: (a.p.clone(), a.q.clone()), hi: (b.p.clone(), b.q.clone()) }
                })
                .collect();
            return Ok(out);
        }
        n *= 2;
        if n > 1 << 16 {
            return Err(Error::precision("continued fraction too short to bracket the rotation"));
        }
    }
}

/// Σ_{k<l} ({u + kθ} − 1/2), exactly up to a bracket width below 2^-64, for u dyadic.
fn centered_saw_sum(u: Circle, l: &BigUint, br: &[Bracket]) -> Result<(f64, f64)> {
    for b in br {
        let f_lo = floor_sum_dyadic(l, u, &b.lo.0, &b.lo.1);
        let f_hi = floor_sum_dyadic(l, u, &b.hi.0, &b.hi.1);
        if f_lo != f_hi {
            continue;
        }
        let li = BigInt::from(l.clone());
        let tri: BigInt = &li * (&li - BigInt::one()) / BigInt::from(2);
        let u_r = BigRational::new(BigInt::from(u.to_biguint()), BigInt::one() << 128u32);
        let lo = BigRational::new(BigInt::from(b.lo.0.clone()), BigInt::from(b.lo.1.clone()));
        let hi = BigRational::new(BigInt::from(b.hi.0.clone()), BigInt::from(b.hi.1.clone()));
        let base = BigRational::from(li.clone()) * &u_r - BigRational::from(BigInt::from(f_lo))
            - BigRational::new(li, BigInt::from(2));
        let v_lo = &base + &lo * BigRational::from(tri.clone());
        let width = (hi - lo) * BigRational::from(tri);
        let v = v_lo.to_f64().unwrap_or(f64::NAN);
        let w = width.to_f64().unwrap_or(f64::INFINITY);
        return Ok((v, w.abs() + v.abs() * f64::EPSILON));
    }
    Err(Error::precision("orbit passes too close to an integer to fix the floor sum"))
}

struct Engine<'a> {
    f: &'a RoofFunction,
    rot: &'a RotationVector2,
    l: BigUint,
    small: Option<u64>,
    bx: Vec<Bracket>,
    by: Vec<Bracket>,
}

impl<'a> Engine<'a> {
    fn new(f: &'a RoofFunction, rot: &'a RotationVector2, l: &BigUint) -> Result<Self> {
        let small = l.to_u64().filter(|&v| v <= DIRECT_LIMIT);
        let (bx, by) = if small.is_none() {
            if !f.is_sawtooth_only() {
                return Err(Error::invalid("exact summation at large l needs a pure sawtooth roof"));
            }
            (brackets(&rot.alpha, l)?, brackets(&rot.beta, l)?)
        } else {
            (Vec::new(), Vec::new())
        };
        Ok(Engine { f, rot, l: l.clone(), small, bx, by })
    }

    fn method(&self) -> SumMethod {
        if self.small.is_some() {
            SumMethod::Direct
        } else {
            SumMethod::ExactFloorSum
        }
    }

    /// (f^(l) − l∫f)(x, y) and an error bound.
    fn centered(&self, x: Circle, y: Circle) -> Result<(f64, f64)> {
        if let Some(l) = self.small {
            let c = self.f.centered()?;
            let b = c.birkhoff(self.rot, x, y, l as i64)?;
            return Ok((b.value, b.rounding_bound));
        }
        let d = &self.f.desc;
        let (mut v, mut e) = (0.0, 0.0);
        for (jumps, p, br) in [(&d.x_jumps, x, &self.bx), (&d.y_jumps, y, &self.by)] {
            for j in jumps.iter() {
                let u = p.sub(Circle::from_f64(j.at));
                let (s, err) = centered_saw_sum(u, &self.l, br)?;
                v += j.d * s;
                e += j.d.abs() * err + 4.0 * f64::EPSILON * (j.d * s).abs();
            }
        }
        Ok((v, e))
    }
}

fn is_denominator(pq: &PartialQuotients, l: &BigUint) -> Result<bool> {
    let mut n = 16;
    loop {
        let c = convergents(pq, n)?;
        if c.iter().any(|c| &c.q == l) {
            return Ok(true);
        }
        if &c[n].q > l {
            return Ok(false);
        }
        n *= 2;
    }
}

fn sample_xy(seed: u64, i: usize) -> (Circle, Circle) {
    let mut r = rng::stream(seed, i as u64);
    (Circle(r.gen()), Circle(r.gen()))
}

/// Denjoy–Koksma check: max over sampled points of |f^(l) − l∫f| against Σ 2|d| = Var f₁ + Var f₂.
pub fn rigidity_scan(
    f: &RoofFunction,
    rot: &RotationVector2,
    denominators: &[BigUint],
    sample: usize,
    seed: u64,
    exec: Exec,
) -> Result<RigidityTable> {
    if !f.is_sawtooth_only() {
        return Err(Error::invalid("rigidity scan is stated for pure sawtooth roofs"));
    }
    if sample == 0 {
        return Err(Error::invalid("sample must be >= 1"));
    }
    let d = &f.desc;
    let threshold: f64 = d.x_jumps.iter().chain(&d.y_jumps).map(|j| 2.0 * j.d.abs()).sum();
    let mut rows = Vec::new();
    for l in denominators {
        if l.is_zero() {
            return Err(Error::invalid("denominators must be positive"));
        }
        let eng = Engine::new(f, rot, l)?;
        let vals = exec.map(sample, |i| {
            let (x, y) = sample_xy(seed, i);
            eng.centered(x, y)
        });
        let vals = vals.into_iter().collect::<Result<Vec<_>>>()?;
        let max_deviation = vals.iter().map(|v| v.0.abs()).fold(0.0, f64::max);
        let rounding_budget = vals.iter().map(|v| v.1).fold(0.0, f64::max);
        rows.push(RigidityRow {
            l: l.to_string(),
            max_deviation,
            threshold,
            rounding_budget,
            common_denominator: is_denominator(&rot.alpha, l)? && is_denominator(&rot.beta, l)?,
            method: eng.method(),
            pass: max_deviation <= threshold + rounding_budget,
        });
    }
    Ok(RigidityTable { rows, samples: sample, seed })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub l: String,
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub masses: Vec<f64>,
    /// Var f₁ + Var f₂; the limit law lives in [−V, V].
    pub support: f64,
    pub outside_fraction: f64,
    pub samples: usize,
    pub seed: u64,
    pub method: SumMethod,
}

/// Histogram of f₀^(l) = f^(l) − l∫f over uniform points, binned on [−V, V].
pub fn empirical_distribution(
    f: &RoofFunction,
    rot: &RotationVector2,
    l: &BigUint,
    bins: usize,
    samples: usize,
    seed: u64,
    exec: Exec,
) -> Result<Histogram> {
    let d = &f.desc;
    if d.gamma != 0.0 || d.trig.iter().any(|t| t.kx != 0 && t.ky != 0) {
        return Err(Error::invalid("distribution needs a roof of the form f1(x) + f2(y)"));
    }
    if bins == 0 || samples == 0 || l.is_zero() {
        return Err(Error::invalid("bins, samples and l must be positive"));
    }
    let trig_var: f64 = d.trig.iter().map(|t| 4.0 * (t.kx.abs() + t.ky.abs()) as f64 * t.cos.hypot(t.sin)).sum();
    let support = d.x_jumps.iter().chain(&d.y_jumps).map(|j| 2.0 * j.d.abs()).sum::<f64>() + trig_var;
    let eng = Engine::new(f, rot, l)?;
    let vals = exec.map(samples, |i| {
        let (x, y) = sample_xy(seed, i);
        eng.centered(x, y)
    });
    let vals = vals.into_iter().collect::<Result<Vec<_>>>()?;
    let (lo, hi) = if support > 0.0 { (-support, support) } else { (-0.5, 0.5) };
    let w = (hi - lo) / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|i| lo + i as f64 * w).collect();
    let mut counts = vec![0u64; bins];
    let mut outside = 0usize;
    for (v, e) in &vals {
        if *v < lo - e || *v > hi + e {
            outside += 1;
            continue;
        }
        let k = (((v - lo) / w).floor().max(0.0) as usize).min(bins - 1);
        counts[k] += 1;
    }
    let masses = counts.iter().map(|&c| c as f64 / samples as f64).collect();
    Ok(Histogram {
        l: l.to_string(),
        edges,
        counts,
        masses,
        support,
        outside_fraction: outside as f64 / samples as f64,
        samples,
        seed,
        method: eng.method(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roof::RoofDescriptor;

    #[test]
    fn exact_path_matches_direct_summation() {
        let rot = RotationVector2::golden_silver();
        let f = RoofFunction::new(RoofDescriptor::linear(1.0, 2.0, 3.0), &rot).unwrap();
        let l = BigUint::from(4181u32);
        let direct = Engine::new(&f, &rot, &l).unwrap();
        let mut exact = Engine::new(&f, &rot, &l).unwrap();
        exact.small = None;
        exact.bx = brackets(&rot.alpha, &l).unwrap();
        exact.by = brackets(&rot.beta, &l).unwrap();
        for i in 0..20 {
            let (x, y) = sample_xy(9, i);
            let (a, ea) = direct.centered(x, y).unwrap();
            let (b, eb) = exact.centered(x, y).unwrap();
            assert!((a - b).abs() <= ea + eb + 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn constant_roof_has_no_deviation() {
        let rot = RotationVector2::golden_silver();
        let f = RoofFunction::new(RoofDescriptor { c0: 2.0, ..Default::default() }, &rot).unwrap();
        let t = rigidity_scan(&f, &rot, &[BigUint::from(13u32)], 50, 1, Exec::Sequential).unwrap();
        assert_eq!(t.rows[0].max_deviation, 0.0);
    }
}
