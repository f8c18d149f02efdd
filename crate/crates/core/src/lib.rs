//! Classical Runge-Kutta and Adams integrators for scalar initial value
//! problems, adaptive Adams variants built on inverse-multiquadric and
//! inverse-quadratic radial basis functions, absolute-stability analysis, and
//! a convergence benchmark harness.

// `!(x > 0.0)` deliberately rejects NaN; dense kernels index by row and column.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod adaptive;
pub mod bench;
pub mod classical;
pub mod cli;
pub mod driver;
pub mod error;
pub mod ivp;
pub mod method;
pub mod rbf;
pub mod stability;

pub use driver::{integrate, integrate_from, SolveOptions, Startup};
pub use error::{Error, Result};
pub use ivp::{global_error, observed_order, IvProblem, Trajectory};
pub use method::{Family, MethodId};
pub use rbf::RbfKind;
