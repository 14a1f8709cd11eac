//! Estimation of a bivariate linear relationship when both coordinates
//! carry errors.
//!
//! The centerpiece is the marginal posterior density of the slope in the
//! bivariate normal errors-in-variables model under a rotationally
//! invariant prior. The posterior depends on the data only through the
//! sample correlation coefficient and the ratio of standard deviations,
//! and is invariant under interchange and rescaling of the coordinates.
//! Around it sit the classical comparison estimators (geometric mean, OLS
//! bisector, orthogonal regression) with basic bootstrap intervals,
//! Bland-Altman agreement statistics, and a Monte Carlo harness measuring
//! empirical interval coverage.

// Negated float comparisons in domain guards are deliberate: unlike their
// direct counterparts they reject NaN arguments.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod data;
pub mod error;
pub mod estimators;
pub mod posterior;
pub mod quad;
pub mod simulate;
pub mod specfun;

pub use data::{Dataset, SufficientStats};
pub use error::{Error, Result};
pub use estimators::{AgreementStats, BootstrapCI, EstimatorKind, SlopeEstimates};
pub use posterior::{IntervalEstimate, PosteriorModel, QuadSettings};
pub use simulate::{CoverageReport, CoverageSetting, ModelConfig};
pub use specfun::Tolerance;
