mod expsum;

pub use expsum::{exp_sum, ExpSumEstimate, PiecewiseSlice, SliceJump, SliceTrig};
mod weakmix;

pub use weakmix::{weak_mixing_bound, weak_mixing_monte_carlo, Axis, WeakMixingEstimate};
mod levelset;

pub use levelset::{j_window, level_hit, level_set_dense, level_set_measure, LevelSetEstimate};
mod correlation;

pub use correlation::{correlation, BoxSet, CorrelationSeries};
mod rigidity;

pub use rigidity::{empirical_distribution, rigidity_scan, Histogram, RigidityRow, RigidityTable, SumMethod, DIRECT_LIMIT};
mod fayad;

pub use fayad::{fayad_check, fayad_partitions, Cell, FayadOptions, FayadReport, LevelReport, PartialPartition};
