//! Continued fractions with exact integer arithmetic.
//!
//! α = [0; a₁, a₂, …] with convergents p_n/q_n, q₀ = 1, q₁ = a₁. Nothing here touches
//! floating point except the final conversions reported to callers.

use crate::circle::Circle;
use crate::error::{Error, Result};
use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

/// γ(n) = (slope·n + intercept)/den for n ≥ 1, and γ(0) := 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GammaSchedule {
    pub slope: u64,
    pub intercept: u64,
    #[serde(default = "one_u64")]
    pub den: u64,
}

fn one_u64() -> u64 {
    1
}

impl GammaSchedule {
    /// γ(n) = n + 1.
    pub fn n_plus_one() -> Self {
        GammaSchedule { slope: 1, intercept: 1, den: 1 }
    }

    pub fn scaled(&self, k: u64) -> Self {
        GammaSchedule { slope: self.slope * k, intercept: self.intercept * k, den: self.den }
    }

    pub fn validate(&self) -> Result<()> {
        if self.den == 0 || self.slope == 0 {
            return Err(Error::invalid("gamma schedule must be strictly increasing with nonzero denominator"));
        }
        if self.slope + self.intercept < self.den {
            return Err(Error::invalid("gamma(1) must be at least 1"));
        }
        Ok(())
    }

    /// (numerator, denominator) of γ(n).
    pub fn at(&self, n: usize) -> (BigUint, BigUint) {
        if n == 0 {
            return (BigUint::one(), BigUint::one());
        }
        let num = BigUint::from(self.slope) * BigUint::from(n) + BigUint::from(self.intercept);
        (num, BigUint::from(self.den))
    }

    pub fn at_f64(&self, n: usize) -> f64 {
        if n == 0 {
            return 1.0;
        }
        (self.slope as f64 * n as f64 + self.intercept as f64) / self.den as f64
    }
}

/// Which half of a Yoccoz pair a generator reads.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coordinate {
    Alpha,
    Beta,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Generator {
    Constant {
        value: u64,
    },
    /// Thue–Morse word with 0 ↦ 1, 1 ↦ 2, read from position `shift`.
    ThueMorse {
        #[serde(default)]
        shift: usize,
    },
    Yoccoz {
        gamma: GammaSchedule,
        coordinate: Coordinate,
        #[serde(default = "one_u64")]
        a1: u64,
    },
}

/// A source of partial quotients a₁, a₂, … ≥ 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PartialQuotients {
    /// A finite list; denotes the rational [0; a₁, …, a_k] exactly.
    List(Vec<u64>),
    Generated(Generator),
}

impl PartialQuotients {
    pub fn constant(value: u64) -> Self {
        PartialQuotients::Generated(Generator::Constant { value })
    }

    pub fn thue_morse(shift: usize) -> Self {
        PartialQuotients::Generated(Generator::ThueMorse { shift })
    }

    pub fn yoccoz(gamma: GammaSchedule, coordinate: Coordinate) -> Self {
        PartialQuotients::Generated(Generator::Yoccoz { gamma, coordinate, a1: 1 })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            PartialQuotients::List(v) => {
                if v.is_empty() {
                    return Err(Error::invalid("empty partial quotient list"));
                }
                if let Some(i) = v.iter().position(|&a| a == 0) {
                    return Err(Error::invalid(format!("partial quotient a_{} is zero", i + 1)));
                }
                Ok(())
            }
            PartialQuotients::Generated(Generator::Constant { value }) if *value == 0 => {
                Err(Error::invalid("constant generator needs a value >= 1"))
            }
            PartialQuotients::Generated(Generator::Yoccoz { gamma, a1, .. }) => {
                gamma.validate()?;
                if *a1 == 0 {
                    return Err(Error::invalid("yoccoz seed a1 must be >= 1"));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// Number of available terms, `None` when unbounded.
    pub fn len(&self) -> Option<usize> {
        match self {
            PartialQuotients::List(v) => Some(v.len()),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.len().is_some()
    }

    /// a₁..a_n.
    pub fn terms(&self, n: usize) -> Result<Vec<BigUint>> {
        match self {
            PartialQuotients::List(v) => {
                if v.len() < n {
                    return Err(Error::Exhausted { needed: n, available: v.len() });
                }
                Ok(v[..n].iter().map(|&a| BigUint::from(a)).collect())
            }
            PartialQuotients::Generated(g) => Ok(match g {
                Generator::Constant { value } => vec![BigUint::from(*value); n],
                Generator::ThueMorse { shift } => {
                    (0..n).map(|i| BigUint::from(thue_morse_symbol(i + shift))).collect()
                }
                Generator::Yoccoz { gamma, coordinate, a1 } => {
                    let levels = match coordinate {
                        Coordinate::Alpha => n.saturating_sub(1),
                        Coordinate::Beta => n,
                    };
                    let t = yoccoz_greedy(gamma, *a1, levels);
                    match coordinate {
                        Coordinate::Alpha => t.a[..n].to_vec(),
                        Coordinate::Beta => t.b[..n].to_vec(),
                    }
                }
            }),
        }
    }

    /// a₁..a_n as u64, for callers that only handle bounded quotients.
    pub fn small_terms(&self, n: usize) -> Result<Vec<u64>> {
        self.terms(n)?
            .iter()
            .enumerate()
            .map(|(i, a)| a.to_u64().ok_or_else(|| Error::invalid(format!("a_{} exceeds 64 bits", i + 1))))
            .collect()
    }
}

/// Thue–Morse symbol at index i under 0 ↦ 1, 1 ↦ 2.
pub fn thue_morse_symbol(i: usize) -> u64 {
    1 + (i.count_ones() % 2) as u64
}

/// Denominator tables of the greedy-minimal construction. `a[i]` is a_{i+1}, `q[i]` is q_i.
#[derive(Clone, Debug, PartialEq)]
pub struct YoccozTables {
    pub a: Vec<BigUint>,
    pub b: Vec<BigUint>,
    pub q: Vec<BigUint>,
    pub r: Vec<BigUint>,
}

fn ceil_div(num: &BigUint, den: &BigUint) -> BigUint {
    num.div_ceil(den)
}

/// Least x ≥ 1 with x·cur + prev ≥ target.
fn least_quotient(target: &BigUint, cur: &BigUint, prev: &BigUint) -> BigUint {
    if target <= prev {
        return BigUint::one();
    }
    ceil_div(&(target - prev), cur).max(BigUint::one())
}

/// Runs `levels` stages. Stage n picks b_n, then a_{n+1}.
pub fn yoccoz_greedy(gamma: &GammaSchedule, a1: u64, levels: usize) -> YoccozTables {
    let four = BigUint::from(4u32);
    let mut a = vec![BigUint::from(a1)];
    let mut b = Vec::with_capacity(levels);
    let mut q = vec![BigUint::one(), BigUint::from(a1)];
    // r_{-1} = 0 is kept implicitly as `r_prev` at the start.
    let mut r = vec![BigUint::one()];
    let mut r_prev = BigUint::zero();
    for n in 1..=levels {
        let (g0n, g0d) = gamma.at(n - 1);
        let (g1n, g1d) = gamma.at(n);
        let thr_r = ceil_div(&(&four * &g0n * &g1n * &q[n]), &(&g0d * &g1d));
        let bn = least_quotient(&thr_r, &r[n - 1], &r_prev);
        let rn = &bn * &r[n - 1] + &r_prev;
        r_prev = r[n - 1].clone();
        r.push(rn);
        b.push(bn);
        let thr_q = ceil_div(&(&four * &g1n * &g1n * &r[n]), &(&g1d * &g1d));
        let an1 = least_quotient(&thr_q, &q[n], &q[n - 1]);
        let qn1 = &an1 * &q[n] + &q[n - 1];
        q.push(qn1);
        a.push(an1);
    }
    YoccozTables { a, b, q, r }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Convergent {
    pub n: usize,
    pub p: BigUint,
    pub q: BigUint,
}

impl Convergent {
    pub fn ratio(&self) -> BigRational {
        BigRational::new(BigInt::from(self.p.clone()), BigInt::from(self.q.clone()))
    }
}

/// Convergents 0..=a.len() of [0; a₁, …].
pub fn convergents_of(a: &[BigUint]) -> Vec<Convergent> {
    let mut out = Vec::with_capacity(a.len() + 1);
    let (mut p2, mut q2) = (BigUint::one(), BigUint::zero());
    let (mut p1, mut q1) = (BigUint::zero(), BigUint::one());
    out.push(Convergent { n: 0, p: p1.clone(), q: q1.clone() });
    for (i, ai) in a.iter().enumerate() {
        let p = ai * &p1 + &p2;
        let q = ai * &q1 + &q2;
        out.push(Convergent { n: i + 1, p: p.clone(), q: q.clone() });
        p2 = std::mem::replace(&mut p1, p);
        q2 = std::mem::replace(&mut q1, q);
    }
    out
}

pub fn convergents(pq: &PartialQuotients, n: usize) -> Result<Vec<Convergent>> {
    pq.validate()?;
    Ok(convergents_of(&pq.terms(n)?))
}

/// Closed enclosure of α from a₁..a_k: α lies between c_k and the mediant of c_{k−1}, c_k,
/// whatever the tail. When the list has exactly k terms α = c_k.
pub fn enclosure(pq: &PartialQuotients, k: usize) -> Result<(BigRational, BigRational)> {
    if k == 0 {
        return Err(Error::invalid("enclosure needs at least one term"));
    }
    let c = convergents(pq, k)?;
    let last = c[k].ratio();
    if pq.len() == Some(k) {
        return Ok((last.clone(), last));
    }
    let med = BigRational::new(
        BigInt::from(&c[k].p + &c[k - 1].p),
        BigInt::from(&c[k].q + &c[k - 1].q),
    );
    Ok(if last < med { (last, med) } else { (med, last) })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApproxQuality {
    pub lower_ok: bool,
    pub upper_ok: bool,
}

/// Checks 1/(2q_n q_{n+1}) < |α − p_n/q_n| < 1/(q_n q_{n+1}) with rational enclosures.
pub fn approx_quality(pq: &PartialQuotients, n: usize) -> Result<ApproxQuality> {
    if n < 1 {
        return Err(Error::invalid("approx_quality needs n >= 1"));
    }
    let c = convergents(pq, n + 2)?;
    let (lo, hi) = enclosure(pq, n + 2)?;
    let cn = c[n].ratio();
    let d_lo = (&lo - &cn).abs();
    let d_hi = (&hi - &cn).abs();
    let (near, far) = if d_lo < d_hi { (d_lo, d_hi) } else { (d_hi, d_lo) };
    let qq = BigInt::from(&c[n].q * &c[n + 1].q);
    let upper = BigRational::new(BigInt::one(), qq.clone());
    let lower = BigRational::new(BigInt::one(), qq * 2);
    Ok(ApproxQuality { lower_ok: near > lower, upper_ok: far < upper })
}

/// A fixed-point real value·2^-bits with an error bound err·2^-bits.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RealRep {
    pub mantissa: BigInt,
    pub bits: u32,
    pub err: BigUint,
}

impl RealRep {
    pub fn exact(mantissa: BigInt, bits: u32) -> Self {
        RealRep { mantissa, bits, err: BigUint::zero() }
    }

    pub fn from_f64_exact(x: f64, bits: u32) -> Self {
        let r = BigRational::from_float(x).expect("finite");
        Self::from_rational(&r, bits)
    }

    /// Round-to-nearest, one ulp of error when inexact.
    pub fn from_rational(r: &BigRational, bits: u32) -> Self {
        let scaled = r * BigRational::from_integer(BigInt::one() << bits);
        let fl = scaled.floor();
        let frac = &scaled - &fl;
        let mut m = fl.to_integer();
        if frac * BigInt::from(2) >= BigRational::one() {
            m += 1;
        }
        let exact = scaled.is_integer();
        RealRep { mantissa: m, bits, err: if exact { BigUint::zero() } else { BigUint::one() } }
    }

    pub fn to_f64(&self) -> f64 {
        ldexp_big(&self.mantissa, self.bits)
    }

    pub fn error_bound(&self) -> f64 {
        ldexp_big(&BigInt::from(self.err.clone()), self.bits)
    }

    pub fn enclosure(&self) -> (BigRational, BigRational) {
        let den = BigInt::one() << self.bits;
        let e = BigInt::from(self.err.clone());
        (
            BigRational::new(&self.mantissa - &e, den.clone()),
            BigRational::new(&self.mantissa + &e, den),
        )
    }

    fn align(&self, o: &RealRep) -> Result<()> {
        if self.bits != o.bits {
            return Err(Error::invalid("RealRep precisions differ"));
        }
        Ok(())
    }

    pub fn add(&self, o: &RealRep) -> Result<RealRep> {
        self.align(o)?;
        Ok(RealRep { mantissa: &self.mantissa + &o.mantissa, bits: self.bits, err: &self.err + &o.err })
    }

    pub fn sub(&self, o: &RealRep) -> Result<RealRep> {
        self.align(o)?;
        Ok(RealRep { mantissa: &self.mantissa - &o.mantissa, bits: self.bits, err: &self.err + &o.err })
    }

    pub fn neg(&self) -> RealRep {
        RealRep { mantissa: -&self.mantissa, bits: self.bits, err: self.err.clone() }
    }

    pub fn mul_int(&self, k: i64) -> RealRep {
        RealRep {
            mantissa: &self.mantissa * k,
            bits: self.bits,
            err: &self.err * BigUint::from(k.unsigned_abs()),
        }
    }

    /// Value mod 1 as a circle point, with error in 2^-128 ulps.
    pub fn to_circle(&self) -> (Circle, u128) {
        let one = BigInt::one() << self.bits;
        let frac = self.mantissa.mod_floor(&one).to_biguint().expect("nonnegative");
        let (v, err) = if self.bits <= 128 {
            let s = 128 - self.bits;
            (frac << s, &self.err << s)
        } else {
            let s = self.bits - 128;
            let half = BigUint::one() << (s - 1);
            let v = (&frac + &half) >> s;
            let rounding = if (&frac % (BigUint::one() << s)).is_zero() { 0u32 } else { 1u32 };
            let e = ceil_shift(&self.err, s) + rounding;
            (v, e)
        };
        let v = (v % (BigUint::one() << 128u32)).to_u128().expect("fits");
        (Circle(v), err.to_u128().unwrap_or(u128::MAX))
    }
}

fn ceil_shift(x: &BigUint, s: u32) -> BigUint {
    let mask = (BigUint::one() << s) - 1u32;
    let r = x >> s;
    if (x & mask).is_zero() {
        r
    } else {
        r + 1u32
    }
}

/// m·2^-bits as the nearest-ish f64, without overflowing on large `bits`.
fn ldexp_big(m: &BigInt, bits: u32) -> f64 {
    let len = m.bits() as i64;
    let keep = 62i64;
    let (mm, e) = if len > keep {
        let sh = (len - keep) as u32;
        (m >> sh, sh as i64 - bits as i64)
    } else {
        (m.clone(), -(bits as i64))
    };
    mm.to_f64().unwrap_or(0.0) * 2f64.powi(e as i32)
}

/// α as a fixed-point real with error at most 2^-bits. Finite lists are exact rationals.
pub fn eval_real(pq: &PartialQuotients, bits: u32) -> Result<RealRep> {
    if bits < 16 {
        return Err(Error::invalid("eval_real needs at least 16 bits"));
    }
    pq.validate()?;
    let target = BigUint::one() << (bits + 1);
    if let Some(len) = pq.len() {
        let c = convergents(pq, len)?;
        for n in 1..len {
            if &c[n].q * &c[n + 1].q > target {
                return Ok(rounded_convergent(&c[n], bits));
            }
        }
        let last = &c[len];
        let r = BigRational::new(BigInt::from(last.p.clone()), BigInt::from(last.q.clone()));
        return Ok(RealRep::from_rational(&r, bits));
    }
    let mut k = 16;
    loop {
        let c = convergents(pq, k)?;
        for n in 1..k {
            if &c[n].q * &c[n + 1].q > target {
                return Ok(rounded_convergent(&c[n], bits));
            }
        }
        k *= 2;
        if k > 1 << 20 {
            return Err(Error::precision(format!("no convergent reaches {bits} bits within 2^20 terms")));
        }
    }
}

// |α − p/q| < 2^-bits-1 and rounding adds at most another half ulp, so one ulp covers both.
fn rounded_convergent(c: &Convergent, bits: u32) -> RealRep {
    let r = BigRational::new(BigInt::from(c.p.clone()), BigInt::from(c.q.clone()));
    let mut rep = RealRep::from_rational(&r, bits);
    rep.err = BigUint::one();
    rep
}

/// ‖x‖ with the error carried over unchanged.
pub fn dist_to_int(x: &RealRep) -> Result<RealRep> {
    let one = BigInt::one() << x.bits;
    if BigInt::from(x.err.clone()) * 4 >= one {
        return Err(Error::precision("error bound at least 1/4; distance to integers is meaningless"));
    }
    let frac = x.mantissa.mod_floor(&one);
    let other = &one - &frac;
    let d = if frac <= other { frac } else { other };
    Ok(RealRep { mantissa: d, bits: x.bits, err: x.err.clone() })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PqConstant {
    /// max over 1 ≤ n ≤ n_max of 1/(n‖nα‖).
    pub c: f64,
    /// Same maximum with each ‖nα‖ replaced by its certified lower bound.
    pub c_upper: f64,
    pub worst_n: u64,
    pub n_max: u64,
    /// Largest partial quotient among those whose denominators stay below n_max.
    pub max_quotient: u64,
}

/// Smallest C with ‖nα‖ ≥ 1/(Cn) on 1 ≤ n ≤ n_max.
pub fn bounded_pq_constant(pq: &PartialQuotients, n_max: u64) -> Result<PqConstant> {
    if n_max < 1 {
        return Err(Error::invalid("n_max must be >= 1"));
    }
    let bits = 128.max(2 * (64 - n_max.leading_zeros()) + 64);
    let (alpha, err) = eval_real(pq, bits)?.to_circle();
    let max_quotient = max_quotient_below(pq, n_max)?;
    let (mut c, mut c_upper, mut worst_n) = (0.0f64, 0.0f64, 1u64);
    let mut x = Circle::ZERO;
    for n in 1..=n_max {
        x = x.add(alpha);
        let v = x.norm();
        let e = err.saturating_mul(n as u128);
        if v <= e {
            return Err(Error::precision(format!("cannot separate n·alpha from an integer at n = {n}")));
        }
        let nf = n as f64;
        let cn = 1.0 / (nf * crate::circle::ulps_to_f64(v));
        if cn > c {
            c = cn;
            worst_n = n;
        }
        c_upper = c_upper.max(1.0 / (nf * crate::circle::ulps_to_f64(v - e)));
    }
    Ok(PqConstant { c, c_upper, worst_n, n_max, max_quotient })
}

fn max_quotient_below(pq: &PartialQuotients, n_max: u64) -> Result<u64> {
    let bound = BigUint::from(n_max);
    let mut k = 8;
    loop {
        let avail = pq.len().map_or(k, |l| l.min(k));
        let a = pq.terms(avail)?;
        let c = convergents_of(&a);
        if let Some(stop) = c.iter().position(|cv| cv.q > bound) {
            let m = a[..stop.max(1).min(a.len())].iter().max().cloned().unwrap_or_default();
            return Ok(m.to_u64().unwrap_or(u64::MAX));
        }
        if pq.len().is_some_and(|l| l <= k) {
            return Ok(a.iter().max().and_then(|m| m.to_u64()).unwrap_or(u64::MAX));
        }
        k *= 2;
    }
}

/// Σ_{i<n} ⌊(a·i + b)/m⌋ for nonnegative a, b and positive m.
pub fn floor_sum(n: &BigUint, m: &BigUint, a: &BigUint, b: &BigUint) -> BigUint {
    let (mut n, mut m, mut a, mut b) = (n.clone(), m.clone(), a.clone(), b.clone());
    let mut ans = BigUint::zero();
    loop {
        if n.is_zero() {
            return ans;
        }
        if a >= m {
            let nn1: BigUint = &n * (&n - 1u32) >> 1u32;
            ans += nn1 * (&a / &m);
            a %= &m;
        }
        if b >= m {
            ans += &n * (&b / &m);
            b %= &m;
        }
        let y_max = &a * &n + &b;
        if y_max < m {
            return ans;
        }
        n = &y_max / &m;
        b = &y_max % &m;
        std::mem::swap(&mut m, &mut a);
    }
}

/// Σ_{k<l} ⌊x + k·r⌋ for a dyadic x = X/2^128 in [0,1) and a rational r = p/q ≥ 0.
pub fn floor_sum_dyadic(l: &BigUint, x: Circle, p: &BigUint, q: &BigUint) -> BigUint {
    let m = q << 128u32;
    let a = p << 128u32;
    let b = x.to_biguint() * q;
    floor_sum(l, &m, &a, &b)
}

/// Signed BigInt from a BigUint, kept here to avoid repeating the conversion dance.
pub fn signed(x: &BigUint) -> BigInt {
    BigInt::from_biguint(Sign::Plus, x.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(x: u64) -> BigUint {
        BigUint::from(x)
    }

    #[test]
    fn fibonacci_denominators() {
        let c = convergents(&PartialQuotients::List(vec![1; 5]), 5).unwrap();
        let q: Vec<_> = c.iter().map(|c| c.q.clone()).collect();
        assert_eq!(q, [1u64, 1, 2, 3, 5, 8].map(b));
        assert_eq!((c[0].p.clone(), c[0].q.clone()), (b(0), b(1)));
        assert_eq!((c[1].p.clone(), c[1].q.clone()), (b(1), b(1)));
    }

    #[test]
    fn explicit_list_exhaustion_is_an_error() {
        let e = convergents(&PartialQuotients::List(vec![1, 2]), 3).unwrap_err();
        assert_eq!(e, Error::Exhausted { needed: 3, available: 2 });
    }

    #[test]
    fn zero_quotient_rejected() {
        assert!(PartialQuotients::List(vec![1, 0, 2]).validate().is_err());
    }

    #[test]
    fn golden_quality_at_three() {
        let pq = PartialQuotients::constant(1);
        let q = approx_quality(&pq, 3).unwrap();
        assert!(q.lower_ok && q.upper_ok);
    }

    #[test]
    fn single_term_list_is_exact_half() {
        let r = eval_real(&PartialQuotients::List(vec![2]), 64).unwrap();
        assert_eq!(r.to_f64(), 0.5);
        assert!(r.err.is_zero());
    }

    #[test]
    fn dist_to_int_is_symmetric() {
        let q = RealRep::from_f64_exact(0.25, 32);
        let t = RealRep::from_f64_exact(0.75, 32);
        assert_eq!(dist_to_int(&q).unwrap().to_f64(), 0.25);
        assert_eq!(dist_to_int(&t).unwrap().to_f64(), 0.25);
        let bad = RealRep { mantissa: BigInt::zero(), bits: 4, err: b(4) };
        assert!(dist_to_int(&bad).is_err());
    }

    #[test]
    fn floor_sum_small_cases() {
        for (n, m, a, bb) in [(4u64, 10u64, 6u64, 3u64), (6, 5, 4, 3), (1, 1, 0, 0), (10, 7, 13, 2)] {
            let brute: u64 = (0..n).map(|i| (a * i + bb) / m).sum();
            assert_eq!(floor_sum(&b(n), &b(m), &b(a), &b(bb)), b(brute));
        }
    }

    #[test]
    fn yoccoz_first_stage() {
        let t = yoccoz_greedy(&GammaSchedule::n_plus_one(), 1, 1);
        assert_eq!(t.b[0], b(8));
        assert_eq!(t.r[1], b(8));
        // 4·γ(1)²·r₁ = 128 = a₂·1 + 1 ⇒ a₂ = 127.
        assert_eq!(t.a[1], b(127));
        assert_eq!(t.q[2], b(128));
    }

    #[test]
    fn pq_constant_single_constraint() {
        let pq = PartialQuotients::constant(1);
        let c = bounded_pq_constant(&pq, 1).unwrap();
        let alpha = (5f64.sqrt() - 1.0) / 2.0;
        let expect = 1.0 / (1.0 - alpha).min(alpha);
        assert!((c.c - expect).abs() < 1e-12);
    }
}
