//! Toolkit for predicting surface-mount component shifts after pick-and-place.
//!
//! A placed chip component can drift from its designed position while it sits
//! on wet solder paste. This crate models that drift from inspection data:
//!
//! * [`domain`] — assembly-line data model: solder-paste deposits (SPI),
//!   placement records (AOI), the SPI/AOI join, ratio features and shift
//!   targets, and per-setting shift statistics.
//! * [`svr`] — epsilon-support-vector regression with linear and RBF kernels,
//!   trained by an SMO-style solver on the dual problem, plus JSON model
//!   persistence.
//! * [`oracle`] — a deliberately simple projected-gradient reference solver
//!   for the same dual problem, used to cross-check the SMO solver.
//! * [`modelsel`] — k-fold cross-validation, exhaustive grid search, MAE/RMSE
//!   metrics, k-sweeps, and model comparison reports.
//! * [`synthline`] — a seeded synthetic data generator with the production
//!   line's design-of-experiments structure (33 settings x 6 component types
//!   x configurable replications).

pub mod domain;
pub mod modelsel;
pub mod oracle;
pub mod seed;
pub mod svr;
pub mod synthline;
