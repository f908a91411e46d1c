//! LMMSE estimation when the estimator's model order is smaller than the
//! order of the system that produced the data.
//!
//! The crate is split bottom-up:
//!
//! * [`numkit`] dense matrix helpers, the SVD pseudoinverse, Gaussian sampling
//!   and the seedable [`RandomStream`].
//! * [`model`] the underlying system `y = A x + v`, its partition into the
//!   estimated block `x_S` and the discarded block `x_C`, and the assumed
//!   partial model.
//! * [`estimator`] full, mismatched-partial and oracle-partial LMMSE weights,
//!   plus exact conditional MSE trace formulas.
//! * [`analytic`] closed-form expected MSE over Gaussian regressors.
//! * [`experiment`] scenario presets and the deterministic Monte Carlo sweep.

pub mod analytic;
pub mod error;
pub mod estimator;
pub mod experiment;
pub mod model;
pub mod numkit;

pub use analytic::{Gamma, TheoryInputs};
pub use error::{Error, Result};
pub use estimator::{OracleMode, WeightsMatrix};
pub use experiment::{
    CovarianceRule, EstimatorMode, Experiment, RecordFlags, ScenarioConfig, ScenarioId, SweepRecord,
};
pub use model::{AssumedModelSpec, PartitionedCovariance, SystemDraw, SystemSpec};
pub use numkit::{CovarianceMatrix, Matrix, RandomStream, Vector};
