//! Residual-lifetime mixture models.
//!
//! A baseline lifetime `X` inspected at a random age `Θ` leaves the residual
//! `X* = (X - Θ | X > Θ)` averaged over `Θ`, with survival function
//! `F̄*(x) = E[F̄(x + Θ) / F̄(Θ)]`. This crate evaluates such mixtures and
//! checks stochastic orders, aging classes and dependence properties on grids.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod aging;
pub mod dependence;
pub mod distributions;
pub mod error;
pub mod mixing;
pub mod mixture;
pub mod model;
pub mod numerics;
pub mod orders;
pub mod verify;

pub use aging::{check_aging_class, check_log_concavity, check_tp2_rr2, AgingClass, ClassVerdict, LogShape, Tp2Class, Tp2Verdict};
pub use dependence::{check_plrd_nlrd, check_rcsi_rcsd, check_si_sd, DependenceKind, DependenceSign, DependenceVerdict, JointAgeModel};
pub use distributions::{parse_distribution, LifetimeDistribution, Quantity};
pub use error::{Error, Result};
pub use mixing::{parse_mixing, MixingDistribution};
pub use mixture::ResidualMixture;
pub use model::SurvivalModel;
pub use numerics::{Grid, Spacing};
pub use orders::{check_order, check_upshifted_order, OrderKind, OrderVerdict, Outcome};
pub use verify::{list, run_scenario, Report, RunOptions};
