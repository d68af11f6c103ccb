//! Both sides of the exact cocycle decompositions along a lifted pair of orbits.
//!
//! The identities are algebraic in α and β, so they hold verbatim for the stored
//! fixed-point angles. Orbits are therefore computed exactly and the only error is
//! floating evaluation and summation, which the reported budget covers.

use super::model::CocycleModel;
use super::LiftedPoint;
use crate::circle::{Circle, Lift};
use crate::error::{Error, Result};
use crate::roof::RoofFunction;
use crate::rotations::RotationVector2;
use crate::sum::Neumaier;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IdentityKind {
    /// u(x) = {x}: uⁿ(x') − uⁿ(x) = n(x' − x) − Σ([x'_k] − [x_k]).
    Sawtooth,
    /// h(x, y) = α{y} − ({x} + α)[{y} + β] against its counter expansion.
    Heisenberg,
    /// f^(n)(p') − f^(n)(p) against ĝ-differences, drift, Σ h_j N_j and boundary terms.
    Master,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityResidual {
    pub kind: IdentityKind,
    pub n: u64,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub budget: f64,
}

const U: f64 = f64::EPSILON / 2.0;

#[inline]
fn wraps(y: Circle, a: Circle) -> f64 {
    y.0.checked_add(a.0).is_none() as u8 as f64
}

#[inline]
fn heis(x: Circle, y: Circle, alpha: f64, beta: Circle) -> f64 {
    alpha * y.to_f64() - (x.to_f64() + alpha) * wraps(y, beta)
}

pub fn cocycle_identity_residual(
    model: &CocycleModel,
    f: &RoofFunction,
    rot: &RotationVector2,
    p: LiftedPoint,
    q: LiftedPoint,
    n: u64,
    kind: IdentityKind,
) -> Result<IdentityResidual> {
    if p.distance(&q) > 0.5 {
        return Err(Error::invalid("pair must be within distance 1/2"));
    }
    if n > i64::MAX as u64 / 2 {
        return Err(Error::invalid("n too large"));
    }
    let (a, b) = (rot.alpha_circle(), rot.beta_circle());
    let af = model.alpha_f64();
    let dx = q.x.diff_f64(p.x);
    let dy = q.y.diff_f64(p.y);
    let nf = n as f64;
    let mut lhs = Neumaier::default();
    let mut rhs = Neumaier::default();
    let pn = p.advance(rot, n as i64);
    let qn = q.advance(rot, n as i64);
    // [{y} + nβ], exactly.
    let y_wraps = (Lift::new(0, p.y.frac).advance(b, n as i64).int) as f64;
    let mut counts = vec![0i64; model.s];
    let (mut x_int, mut s1, mut s2) = (0i64, 0i64, 0i64);
    let (mut pk, mut qk) = (p, q);
    for _ in 0..n {
        match kind {
            IdentityKind::Sawtooth => {
                lhs.add(qk.x.frac.to_f64());
                lhs.add(-pk.x.frac.to_f64());
                x_int += qk.x.floor() - pk.x.floor();
            }
            IdentityKind::Heisenberg => {
                lhs.add(heis(qk.x.frac, qk.y.frac, af, b));
                lhs.add(-heis(pk.x.frac, pk.y.frac, af, b));
                s1 += (qk.x.floor() - pk.x.floor()) * wraps(pk.y.frac, b) as i64;
                s2 -= wraps(qk.x.frac, a) as i64 * (qk.y.add_frac(b).floor() - pk.y.add_frac(b).floor());
            }
            IdentityKind::Master => {
                lhs.add(f.eval_c(qk.x.frac, qk.y.frac));
                lhs.add(-f.eval_c(pk.x.frac, pk.y.frac));
                rhs.add(f.g(qk.x.frac, qk.y.frac));
                rhs.add(-f.g(pk.x.frac, pk.y.frac));
                for (j, c) in counts.iter_mut().enumerate() {
                    *c += model.counter(j, &pk, &qk);
                }
            }
        }
        pk = pk.step(rot);
        qk = qk.step(rot);
    }
    // {x'}([y'] − [y]).
    let boundary = |p: &LiftedPoint, q: &LiftedPoint| q.x.frac.to_f64() * (q.y.floor() - p.y.floor()) as f64;
    match kind {
        IdentityKind::Sawtooth => {
            rhs.add(nf * dx);
            rhs.add(-(x_int as f64));
        }
        IdentityKind::Heisenberg => {
            rhs.add(af * nf * dy);
            rhs.add(-y_wraps * dx);
            rhs.add(s1 as f64);
            rhs.add(s2 as f64);
            rhs.add(boundary(&p, &q));
            rhs.add(-boundary(&pn, &qn));
        }
        IdentityKind::Master => {
            let d = &f.desc;
            let sx: f64 = d.x_jumps.iter().map(|j| j.d).sum();
            let sy: f64 = d.y_jumps.iter().map(|j| j.d).sum();
            rhs.add(nf * sx * dx);
            rhs.add(nf * (sy + d.gamma * af) * dy);
            rhs.add(-d.gamma * y_wraps * dx);
            for (j, &c) in counts.iter().enumerate() {
                rhs.add(model.h[j] * c as f64);
            }
            rhs.add(model.boundary(&p, &q) * model.n_extra(&p, &q) as f64);
            rhs.add(-model.boundary(&pn, &qn) * model.n_extra(&pn, &qn) as f64);
        }
    }
    let (l, r) = (lhs.sum(), rhs.sum());
    let budget = 16.0 * U * (lhs.abs_sum() + rhs.abs_sum()) + lhs.error_bound() + rhs.error_bound() + f64::MIN_POSITIVE;
    Ok(IdentityResidual { kind, n, lhs: l, rhs: r, residual: (l - r).abs(), budget })
}
