//! Weak Ratner machinery: crossing sequences and their sparseness, the exact
//! decomposition of Birkhoff-sum differences into crossing counters, and the
//! shadowing-witness construction with a brute-force oracle.

mod identity;
mod model;
mod sparse;
mod witness;

pub use identity::{cocycle_identity_residual, IdentityKind, IdentityResidual};
pub use model::{build_cocycle_model, C12Sweep, CocycleModel, Counter, ModelCase, ModelOptions, SweepRow};
pub use sparse::{
    crossing_sequence, crossing_sequence_lifts, merged_crossings, sparse_sum_bound, sparseness_check, SparseSequence,
    SparseSumVerdict, SparseVerdict,
};
pub use witness::{witness_constructive, witness_empirical, ConstructiveWitness, MRange, RatnerWitness, WitnessChecks};

use crate::circle::{Circle, Lift};
use crate::rotations::RotationVector2;
use serde::{Deserialize, Serialize};

/// A point of the plane over the torus, kept as exact integer part plus fraction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LiftedPoint {
    pub x: Lift,
    pub y: Lift,
}

impl LiftedPoint {
    pub fn on_torus(x: Circle, y: Circle) -> Self {
        LiftedPoint { x: Lift::new(0, x), y: Lift::new(0, y) }
    }

    pub fn from_f64(x: f64, y: f64) -> Self {
        LiftedPoint { x: Lift::from_f64(x), y: Lift::from_f64(y) }
    }

    #[inline]
    pub fn step(self, rot: &RotationVector2) -> Self {
        LiftedPoint { x: self.x.add_frac(rot.alpha_circle()), y: self.y.add_frac(rot.beta_circle()) }
    }

    pub fn advance(self, rot: &RotationVector2, n: i64) -> Self {
        LiftedPoint { x: self.x.advance(rot.alpha_circle(), n), y: self.y.advance(rot.beta_circle(), n) }
    }

    /// Sup-distance of the lifts.
    pub fn distance(&self, o: &LiftedPoint) -> f64 {
        o.x.diff_f64(self.x).abs().max(o.y.diff_f64(self.y).abs())
    }
}

/// Lifts a torus pair so every coordinate difference lies in (−1/2, 1/2]; the lift
/// distance then equals the torus distance.
pub fn lift_pair(p: (Circle, Circle), q: (Circle, Circle)) -> (LiftedPoint, LiftedPoint) {
    let lp = LiftedPoint::on_torus(p.0, p.1);
    let near = |base: Lift, to: Circle| {
        let d = to.sub(base.frac);
        if d.0 <= 1u128 << 127 {
            base.add_frac(d)
        } else {
            base.sub_frac(d.neg())
        }
    };
    (lp, LiftedPoint { x: near(lp.x, q.0), y: near(lp.y, q.1) })
}
