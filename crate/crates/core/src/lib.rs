//! Conditional systemic-risk measures through the copula.
//!
//! CoVaR and CoES of a loss `Y` given that `X` exceeds its own VaR reduce to the
//! marginal VaR and ES of `Y` evaluated at a single quantile `ω(α, β, C)`, the
//! largest solution of `C̄(α, ω) = (1 − α)(1 − β)`. This crate provides
//!
//! - [`margins`]: analytic Student-t / normal / GPD-tail margins and the
//!   historical VaR and ES estimators,
//! - [`copula`]: Gumbel, independence and Fréchet-bound copulas, Gumbel
//!   sampling, pseudo-observations and the empirical beta copula,
//! - [`measures`]: the `ω` solver, CoVaR, CoES, ΔCoVaR, ΔCoES, MES, the tail
//!   index estimator, GPD closed forms, equality-conditioned baselines and the
//!   sensitivity (influence) functions,
//! - [`simlab`]: the Monte-Carlo bias/variance and outlier-sweep experiments,
//! - [`dataio`]: returns panels, the system loss index, weekly aggregation,
//!   rolling-window estimation and pairwise network grids.
//!
//! Losses are positive throughout (`X = −P` for a profit `P`).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod copula;
pub mod dataio;
mod error;
pub mod fmt;
pub mod margins;
pub mod measures;
pub mod simlab;

pub use error::{Error, ErrorKind, Result};
