//! Rotation vectors (α, β) on the two-torus: palindromic pairs, Yoccoz pairs,
//! bounded-search ergodicity certificates and certified orbit points.

use crate::cfrac::{
    self, convergents_of, eval_real, thue_morse_symbol, yoccoz_greedy, Coordinate, GammaSchedule,
    PartialQuotients, RealRep,
};
use crate::circle::{ulps_to_f64, Circle};
use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

pub const DEFAULT_BITS: u32 = 128;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RotationDescriptor {
    pub alpha: PartialQuotients,
    pub beta: PartialQuotients,
    #[serde(default = "default_bits")]
    pub precision_bits: u32,
}

fn default_bits() -> u32 {
    DEFAULT_BITS
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum ErgodicityVerdict {
    NoRelationFound,
    Relation { k: i64, l: i64, m: i64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErgodicityCertificate {
    pub search_bound: u32,
    pub bits: u32,
    #[serde(flatten)]
    pub verdict: ErgodicityVerdict,
    /// Smallest |kα + lβ − m| seen over the search box.
    pub min_distance: f64,
    pub escalations: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RotationVector2 {
    pub alpha: PartialQuotients,
    pub beta: PartialQuotients,
    pub alpha_real: RealRep,
    pub beta_real: RealRep,
    pub ergodicity_certificate: Option<ErgodicityCertificate>,
    pub bits: u32,
    a: Circle,
    b: Circle,
    err_a: u128,
    err_b: u128,
}

impl RotationVector2 {
    /// Both sources must be infinite; finite lists denote rationals.
    pub fn new(alpha: PartialQuotients, beta: PartialQuotients, bits: u32) -> Result<Self> {
        if alpha.is_finite() || beta.is_finite() {
            return Err(Error::invalid("rotation coordinates must be irrational (infinite partial quotient sources)"));
        }
        Self::new_unchecked(alpha, beta, bits)
    }

    /// Like `new` but accepts rational coordinates; used for degenerate test cases.
    pub fn new_unchecked(alpha: PartialQuotients, beta: PartialQuotients, bits: u32) -> Result<Self> {
        if !(16..=4096).contains(&bits) {
            return Err(Error::invalid(format!("precision_bits {bits} outside [16, 4096]")));
        }
        let alpha_real = eval_real(&alpha, bits)?;
        let beta_real = eval_real(&beta, bits)?;
        let (a, err_a) = alpha_real.to_circle();
        let (b, err_b) = beta_real.to_circle();
        Ok(RotationVector2 {
            alpha,
            beta,
            alpha_real,
            beta_real,
            ergodicity_certificate: None,
            bits,
            a,
            b,
            err_a,
            err_b,
        })
    }

    pub fn from_descriptor(d: &RotationDescriptor) -> Result<Self> {
        Self::new(d.alpha.clone(), d.beta.clone(), d.precision_bits)
    }

    pub fn descriptor(&self) -> RotationDescriptor {
        RotationDescriptor { alpha: self.alpha.clone(), beta: self.beta.clone(), precision_bits: self.bits }
    }

    /// α = [0; 1, 1, …] (golden), β = [0; 2, 2, …] = √2 − 1. Bounded quotients, independent with 1.
    pub fn golden_silver() -> Self {
        Self::new(PartialQuotients::constant(1), PartialQuotients::constant(2), DEFAULT_BITS).expect("valid")
    }

    pub fn alpha_circle(&self) -> Circle {
        self.a
    }

    pub fn beta_circle(&self) -> Circle {
        self.b
    }

    /// Per-step coordinate uncertainty in 2^-128 ulps.
    pub fn step_errors(&self) -> (u128, u128) {
        (self.err_a, self.err_b)
    }

    pub fn alpha_f64(&self) -> f64 {
        self.a.to_f64()
    }

    pub fn beta_f64(&self) -> f64 {
        self.b.to_f64()
    }

    /// T^n applied with the stored angles; exact in fixed point.
    #[inline]
    pub fn step(&self, x: Circle, y: Circle, n: i64) -> (Circle, Circle) {
        (x.add(self.a.mul_int(n)), y.add(self.b.mul_int(n)))
    }

    /// Distance (ulps) between T^n computed here and the true rotation, per coordinate.
    #[inline]
    pub fn drift(&self, n: i64) -> (u128, u128) {
        let k = n.unsigned_abs() as u128;
        (self.err_a.saturating_mul(k), self.err_b.saturating_mul(k))
    }

    pub fn with_certificate(mut self, c: ErgodicityCertificate) -> Self {
        self.ergodicity_certificate = Some(c);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrbitPoint {
    pub x: Circle,
    pub y: Circle,
    pub error_bound: f64,
}

pub fn orbit_point(rot: &RotationVector2, x0: Circle, y0: Circle, n: i64) -> Result<OrbitPoint> {
    let (ex, ey) = rot.drift(n);
    let e = ulps_to_f64(ex.max(ey));
    if e > 2f64.powi(-20) {
        return Err(Error::precision(format!("orbit error bound {e:e} at n = {n} exceeds 2^-20")));
    }
    let (x, y) = rot.step(x0, y0, n);
    Ok(OrbitPoint { x, y, error_bound: e })
}

pub fn thue_morse_symbols(n: usize) -> Vec<u64> {
    (0..n).map(thue_morse_symbol).collect()
}

pub fn is_palindrome<T: PartialEq>(w: &[T]) -> bool {
    w.iter().eq(w.iter().rev())
}

#[derive(Clone, Debug, PartialEq)]
pub struct PalindromicPair {
    pub symbols: Vec<u64>,
    /// Lengths k+1 of palindromic prefixes a₁…a_{k+1}.
    pub palindromic_prefix_lengths: Vec<usize>,
    /// q_k of α (= k-th denominator of β) for each recorded prefix.
    pub common_denominators: Vec<BigUint>,
    pub rotation: RotationVector2,
    pub no_palindrome_warning: bool,
    /// The irrationality of α relies on the word not being eventually periodic; true for Thue–Morse.
    pub aperiodicity_assumed: bool,
}

/// α = [0; a₁, a₂, …], β = [0; a₂, a₃, …] from the mapped Thue–Morse word.
pub fn palindromic_pair(n_terms: usize) -> Result<PalindromicPair> {
    if n_terms < 3 {
        return Err(Error::invalid("palindromic_pair needs n_terms >= 3"));
    }
    let symbols = thue_morse_symbols(n_terms);
    let rotation = RotationVector2::new(PartialQuotients::thue_morse(0), PartialQuotients::thue_morse(1), DEFAULT_BITS)?;
    let alpha_terms: Vec<BigUint> = symbols.iter().map(|&s| BigUint::from(s)).collect();
    let beta_terms = rotation.beta.terms(n_terms)?;
    let qa = convergents_of(&alpha_terms);
    let qb = convergents_of(&beta_terms);
    let mut lengths = Vec::new();
    let mut dens = Vec::new();
    for len in 1..=n_terms {
        if !is_palindrome(&symbols[..len]) {
            continue;
        }
        let k = len - 1;
        if qa[k].q != qb[k].q {
            return Err(Error::Certification(format!(
                "palindromic prefix of length {len} but q_{k}(alpha) != q_{k}(beta)"
            )));
        }
        lengths.push(len);
        dens.push(qa[k].q.clone());
    }
    Ok(PalindromicPair {
        no_palindrome_warning: lengths.is_empty(),
        symbols,
        palindromic_prefix_lengths: lengths,
        common_denominators: dens,
        rotation,
        aperiodicity_assumed: true,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct YoccozPair {
    pub gamma: GammaSchedule,
    pub alpha_pq: PartialQuotients,
    pub beta_pq: PartialQuotients,
    /// q_0..q_{levels+1}.
    pub q: Vec<BigUint>,
    /// r_0..r_levels.
    pub r: Vec<BigUint>,
    pub a: Vec<BigUint>,
    pub b: Vec<BigUint>,
    pub levels: usize,
}

impl YoccozPair {
    /// Both inequalities at level n, checked by cross-multiplication.
    pub fn check_level(&self, n: usize) -> (bool, bool) {
        check_condition(&self.gamma, &self.q, &self.r, n)
    }

    pub fn all_levels_ok(&self) -> bool {
        (1..=self.levels).all(|n| {
            let (a, b) = self.check_level(n);
            a && b
        })
    }

    pub fn rotation(&self, bits: u32) -> Result<RotationVector2> {
        RotationVector2::new(self.alpha_pq.clone(), self.beta_pq.clone(), bits)
    }

    pub fn gamma_at(&self, n: usize) -> f64 {
        self.gamma.at_f64(n)
    }

    /// Extends the tables to at least `levels` stages (the generator is unbounded).
    pub fn extended(&self, levels: usize) -> YoccozPair {
        let a1 = match &self.alpha_pq {
            PartialQuotients::Generated(cfrac::Generator::Yoccoz { a1, .. }) => *a1,
            _ => 1,
        };
        yoccoz_pair_with_seed(&self.gamma, levels.max(self.levels), a1).expect("schedule already validated")
    }
}

/// 4γ(n−1)γ(n)q_n ≤ r_n and 4γ(n)²r_n ≤ q_{n+1}.
pub fn check_condition(gamma: &GammaSchedule, q: &[BigUint], r: &[BigUint], n: usize) -> (bool, bool) {
    let (g0n, g0d) = gamma.at(n - 1);
    let (g1n, g1d) = gamma.at(n);
    let four = BigUint::from(4u32);
    let first = &four * &g0n * &g1n * &q[n] <= &r[n] * &g0d * &g1d;
    let second = &four * &g1n * &g1n * &r[n] <= &q[n + 1] * &g1d * &g1d;
    (first, second)
}

pub fn yoccoz_pair(gamma: &GammaSchedule, levels: usize) -> Result<YoccozPair> {
    yoccoz_pair_with_seed(gamma, levels, 1)
}

pub fn yoccoz_pair_with_seed(gamma: &GammaSchedule, levels: usize, a1: u64) -> Result<YoccozPair> {
    gamma.validate()?;
    if levels < 1 || a1 < 1 {
        return Err(Error::invalid("yoccoz_pair needs levels >= 1 and a1 >= 1"));
    }
    let t = yoccoz_greedy(gamma, a1, levels);
    let alpha_pq = PartialQuotients::Generated(cfrac::Generator::Yoccoz {
        gamma: gamma.clone(),
        coordinate: Coordinate::Alpha,
        a1,
    });
    let beta_pq =
        PartialQuotients::Generated(cfrac::Generator::Yoccoz { gamma: gamma.clone(), coordinate: Coordinate::Beta, a1 });
    Ok(YoccozPair { gamma: gamma.clone(), alpha_pq, beta_pq, q: t.q, r: t.r, a: t.a, b: t.b, levels })
}

/// Bounded search for kα + lβ − m ≈ 0 with 0 < |k|, |l| ≤ K and |m| ≤ 2K.
pub fn ergodicity_check(rot: &RotationVector2, k_max: u32, bits: u32) -> Result<ErgodicityCertificate> {
    if k_max < 1 {
        return Err(Error::invalid("search bound K must be >= 1"));
    }
    let kf = k_max as f64;
    let ab = rot.alpha_f64().abs() + rot.beta_f64().abs() + 1.0;
    if kf * ab * 2f64.powi(-(bits.min(1000) as i32)) >= 0.5 {
        return Err(Error::precision(format!("{bits} bits cannot support search bound {k_max}")));
    }
    let work = if bits == rot.bits { rot.clone() } else { RotationVector2::new_unchecked(rot.alpha.clone(), rot.beta.clone(), bits)? };
    let (ea, eb) = work.step_errors();
    let k = k_max as i64;
    let mut min_distance = f64::INFINITY;
    let mut escalations = 0;
    let mut hi_prec: Option<(RealRep, RealRep)> = None;
    // Smallest box first, so a reported relation is one of minimal height.
    let mut pairs: Vec<(i64, i64)> =
        (-k..=k).flat_map(|i| (-k..=k).map(move |j| (i, j))).filter(|&(i, j)| i != 0 && j != 0).collect();
    pairs.sort_by_key(|&(i, j)| i.abs().max(j.abs()));
    for (i, j) in pairs {
        let v = work.a.mul_int(i).add(work.b.mul_int(j));
        let m = nearest_integer(i as f64 * work.alpha_f64() + j as f64 * work.beta_f64(), v);
        if m.abs() > 2 * k {
            continue;
        }
        let d = v.norm();
        min_distance = min_distance.min(ulps_to_f64(d));
        let margin = ea.saturating_mul(i.unsigned_abs() as u128) + eb.saturating_mul(j.unsigned_abs() as u128);
        if d > margin {
            continue;
        }
        escalations += 1;
        if hi_prec.is_none() {
            let hb = bits.saturating_mul(4).min(4096);
            hi_prec = Some((eval_real(&rot.alpha, hb)?, eval_real(&rot.beta, hb)?));
        }
        let (ha, hb) = hi_prec.as_ref().expect("set above");
        let val = ha.mul_int(i).add(&hb.mul_int(j))?;
        let shifted = RealRep {
            mantissa: &val.mantissa - (BigInt::from(m) << val.bits),
            bits: val.bits,
            err: val.err.clone(),
        };
        let abs = if shifted.mantissa < BigInt::zero() { -&shifted.mantissa } else { shifted.mantissa.clone() };
        if abs > BigInt::from(shifted.err.clone()) {
            continue;
        }
        return Ok(ErgodicityCertificate {
            search_bound: k_max,
            bits,
            verdict: ErgodicityVerdict::Relation { k: i, l: j, m },
            min_distance: 0.0,
            escalations,
        });
    }
    Ok(ErgodicityCertificate {
        search_bound: k_max,
        bits,
        verdict: ErgodicityVerdict::NoRelationFound,
        min_distance,
        escalations,
    })
}

// The integer m nearest to kα + lβ: the float gives the integer part, the circle the rounding direction.
fn nearest_integer(approx: f64, frac: Circle) -> i64 {
    let f = frac.to_f64();
    let base = (approx - f).round() as i64;
    if f >= 0.5 {
        base + 1
    } else {
        base
    }
}

/// Exact continuant check used by tests and the CLI: q_k of two quotient lists.
pub fn denominators(terms: &[BigUint]) -> Vec<BigUint> {
    convergents_of(terms).into_iter().map(|c| c.q).collect()
}

/// True iff every q_{s+1} ≤ (A+1)·q_s along the given denominators.
pub fn growth_bounded(q: &[BigUint], a_max: u64) -> bool {
    let f = BigUint::from(a_max) + BigUint::one();
    q.windows(2).all(|w| w[1] <= &w[0] * &f)
}
