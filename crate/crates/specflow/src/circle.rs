//! Exact arithmetic on R/Z and on lifts to R.
//!
//! A point of the circle is a 128-bit binary fraction, so rotation by a fixed
//! angle is a wrapping add and never accumulates rounding. Uncertainty about how
//! well the stored angle matches the true irrational is tracked separately, in
//! units of 2^-128 ("ulps").

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

const TWO_POW_128: f64 = 340282366920938463463374607431768211456.0;
const TWO_POW_M128: f64 = 1.0 / TWO_POW_128;

#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
pub struct Circle(pub u128);

impl Circle {
    pub const ZERO: Circle = Circle(0);

    /// Reduces `x` mod 1. Exact unless the fractional part is below 2^-75 or so.
    pub fn from_f64(x: f64) -> Circle {
        let f = x - x.floor();
        let v = f * TWO_POW_128;
        if v >= TWO_POW_128 {
            Circle(0)
        } else {
            Circle(v as u128)
        }
    }

    /// Nearest f64 in [0, 1). Values that would round up to 1.0 are clamped just below it.
    pub fn to_f64(self) -> f64 {
        let v = self.0 as f64 * TWO_POW_M128;
        if v >= 1.0 {
            1.0 - f64::EPSILON / 2.0
        } else {
            v
        }
    }

    /// Round-to-nearest of p/q mod 1, with a flag telling whether it was exact.
    pub fn from_ratio(p: &BigUint, q: &BigUint) -> (Circle, bool) {
        let num = p << 128u32;
        let (quot, rem) = (&num / q, &num % q);
        let twice: BigUint = &rem << 1u32;
        let quot = if twice >= *q { quot + 1u32 } else { quot };
        let low = quot.iter_u64_digits().take(2).collect::<Vec<_>>();
        let v = match low.len() {
            0 => 0u128,
            1 => low[0] as u128,
            _ => (low[1] as u128) << 64 | low[0] as u128,
        };
        (Circle(v), rem.is_zero())
    }

    #[inline]
    pub fn add(self, o: Circle) -> Circle {
        Circle(self.0.wrapping_add(o.0))
    }

    #[inline]
    pub fn sub(self, o: Circle) -> Circle {
        Circle(self.0.wrapping_sub(o.0))
    }

    #[inline]
    pub fn neg(self) -> Circle {
        Circle(self.0.wrapping_neg())
    }

    /// n·x mod 1, exact.
    #[inline]
    pub fn mul_int(self, n: i64) -> Circle {
        Circle((n as i128 as u128).wrapping_mul(self.0))
    }

    /// Distance to the nearest integer, in ulps.
    #[inline]
    pub fn norm(self) -> u128 {
        self.0.min(self.0.wrapping_neg())
    }

    #[inline]
    pub fn dist(self, o: Circle) -> u128 {
        self.sub(o).norm()
    }

    pub fn to_biguint(self) -> BigUint {
        BigUint::from(self.0)
    }
}

pub fn ulps_to_f64(u: u128) -> f64 {
    u as f64 * TWO_POW_M128
}

/// An f64 error as a count of ulps, rounded up.
pub fn f64_to_ulps_ceil(x: f64) -> u128 {
    if x <= 0.0 {
        return 0;
    }
    let v = (x * TWO_POW_128).ceil();
    if v >= TWO_POW_128 {
        u128::MAX
    } else {
        v as u128 + 1
    }
}

/// (hi, lo) of the 192-bit product m·a.
#[inline]
pub fn widening_mul(m: u64, a: u128) -> (u64, u128) {
    let a_lo = a as u64 as u128;
    let a_hi = a >> 64;
    let m = m as u128;
    let p_lo = m * a_lo;
    let p_hi = m * a_hi;
    let (lo, carry) = p_lo.overflowing_add(p_hi << 64);
    let hi = (p_hi >> 64) as u64 + carry as u64;
    (hi, lo)
}

/// floor(y + m·a) for y, a in [0,1) given as circles and m ≥ 0.
#[inline]
pub fn floor_of_advance(y: Circle, a: Circle, m: u64) -> u64 {
    let (hi, lo) = widening_mul(m, a.0);
    let (_, carry) = lo.overflowing_add(y.0);
    hi + carry as u64
}

/// A real number split as integer part plus a circle point. Used for lifted orbits,
/// where integer parts are what the crossing counters read off.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default, Serialize, Deserialize)]
pub struct Lift {
    pub int: i64,
    pub frac: Circle,
}

impl Lift {
    pub fn new(int: i64, frac: Circle) -> Lift {
        Lift { int, frac }
    }

    pub fn from_f64(x: f64) -> Lift {
        Lift { int: x.floor() as i64, frac: Circle::from_f64(x) }
    }

    pub fn to_f64(self) -> f64 {
        self.int as f64 + self.frac.to_f64()
    }

    #[inline]
    pub fn floor(self) -> i64 {
        self.int
    }

    /// floor(self − delta) for a breakpoint delta in [0,1).
    #[inline]
    pub fn floor_minus(self, delta: Circle) -> i64 {
        if self.frac.0 >= delta.0 {
            self.int
        } else {
            self.int - 1
        }
    }

    #[inline]
    pub fn add_frac(self, a: Circle) -> Lift {
        let (f, c) = self.frac.0.overflowing_add(a.0);
        Lift { int: self.int + c as i64, frac: Circle(f) }
    }

    #[inline]
    pub fn sub_frac(self, a: Circle) -> Lift {
        let (f, b) = self.frac.0.overflowing_sub(a.0);
        Lift { int: self.int - b as i64, frac: Circle(f) }
    }

    #[inline]
    pub fn add(self, o: Lift) -> Lift {
        let l = self.add_frac(o.frac);
        Lift { int: l.int + o.int, frac: l.frac }
    }

    #[inline]
    pub fn sub(self, o: Lift) -> Lift {
        let l = self.sub_frac(o.frac);
        Lift { int: l.int - o.int, frac: l.frac }
    }

    /// self + m·a for an angle a in [0,1), exact for any m.
    pub fn advance(self, a: Circle, m: i64) -> Lift {
        let (hi, lo) = widening_mul(m.unsigned_abs(), a.0);
        let step = Lift { int: hi as i64, frac: Circle(lo) };
        if m >= 0 {
            self.add(step)
        } else {
            self.sub(step)
        }
    }

    /// Difference as f64; exact enough for |difference| well below 2^52.
    pub fn diff_f64(self, o: Lift) -> f64 {
        let d = self.sub(o);
        d.int as f64 + d.frac.to_f64()
    }

    pub fn to_circle(self) -> Circle {
        self.frac
    }

    pub fn int_to_f64(self) -> f64 {
        self.int.to_f64().unwrap_or(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrapping_is_mod_one() {
        let a = Circle::from_f64(0.75);
        let b = a.add(a);
        assert_eq!(b.to_f64(), 0.5);
        assert_eq!(a.mul_int(-1).to_f64(), 0.25);
        assert_eq!(Circle::from_f64(-0.25), a);
    }

    #[test]
    fn widening_mul_matches_bigint() {
        let a = 0xdead_beef_0123_4567_89ab_cdef_f00d_cafeu128;
        let m = 0x1234_5678_9abc_def0u64;
        let (hi, lo) = widening_mul(m, a);
        let exact = BigUint::from(a) * BigUint::from(m);
        let back = (BigUint::from(hi) << 128u32) + BigUint::from(lo);
        assert_eq!(exact, back);
    }

    #[test]
    fn lift_advance_agrees_with_repeated_steps() {
        let a = Circle::from_f64(0.6180339887498949);
        let mut l = Lift::from_f64(-0.3);
        for _ in 0..1000 {
            l = l.add_frac(a);
        }
        assert_eq!(l, Lift::from_f64(-0.3).advance(a, 1000));
        assert_eq!(l.advance(a, -1000), Lift::from_f64(-0.3));
    }

    #[test]
    fn floor_of_advance_counts_wraps() {
        let y = Circle::from_f64(0.9);
        let b = Circle::from_f64(0.25);
        assert_eq!(floor_of_advance(y, b, 0), 0);
        assert_eq!(floor_of_advance(y, b, 1), 1);
        assert_eq!(floor_of_advance(y, b, 5), 2);
    }

    #[test]
    fn ratio_rounding() {
        let (c, exact) = Circle::from_ratio(&BigUint::from(1u32), &BigUint::from(2u32));
        assert!(exact);
        assert_eq!(c.to_f64(), 0.5);
        let (c, exact) = Circle::from_ratio(&BigUint::from(1u32), &BigUint::from(3u32));
        assert!(!exact);
        assert!((c.to_f64() - 1.0 / 3.0).abs() < 1e-16);
    }
}
