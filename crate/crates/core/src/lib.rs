//! Sampled-in-space feedback control of scalar semilinear parabolic and
//! damped-wave equations: plant models, shape functions, matrix-inequality
//! stability certificates, a method-of-lines simulator, and trajectory
//! analysis.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod controller;
pub mod error;
pub mod expr;
pub mod lmi;
pub mod plant;
pub mod quadrature;
pub mod sampling;
pub mod scenarios;
pub mod shapes;
pub mod simulator;

pub use analysis::{
    actuation_energy, cost_integral_i, l2_norm_sq, lyapunov_hyperbolic, verify_decay, CostReport, DecayReport,
};
pub use controller::{ControllerSpec, SensorFrame};
pub use error::{Error, Result};
pub use lmi::{
    check_parabolic, check_hyperbolic, decay_bound, gamma_bound, search_feasible, GammaInputs, HyperbolicLmiParams,
    LmiCertificate, ParabolicLmiParams, SymMatrix, Tuning,
};
pub use plant::{BoundaryCondition, CoefficientField, FieldKind, Interval, Order, PlantSpec};
pub use sampling::{uniform_partition, ActuationPartition};
pub use shapes::ShapeSpec;
pub use simulator::{simulate, Mesh, SimulationOptions, StateSnapshot, TrajectoryRecord};
