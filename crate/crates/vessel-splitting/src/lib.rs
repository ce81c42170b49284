//! Splitting and composition integrators for a controlled marine-vessel
//! rigid-body model.
//!
//! The vessel equations of motion (rigid body with linear damping, hydrostatic
//! restoring forces and a PID positioning controller) split naturally into
//! two exactly solvable parts:
//!
//! * a conservative free-rigid-body part, solved in closed form with Jacobi
//!   elliptic functions and a truncated Magnus expansion for the attitude
//!   ([`free_flow`]), and
//! * a linear part collecting damping, restoring and control forces, solved
//!   by variation of constants with matrix φ-functions ([`linear_flow`]).
//!
//! Symmetric compositions of the two flows give explicit integrators of
//! order 2, 4 and 6 ([`integrators`]) with markedly better stability and
//! long-time energy behaviour than explicit Runge–Kutta methods of the same
//! order. The [`harness`] module drives the benchmark experiments (set-point
//! simulation, convergence order study, energy and global error tables,
//! control-norm traces) and writes their results as CSV.
//!
//! # Examples
//!
//! Each major capability has a runnable example:
//!
//! ```bash
//! cargo run --release --example simulate            # set-point maneuver CSV
//! cargo run --release --example order_study         # convergence slopes
//! cargo run --release --example energy_table        # long-run energy errors
//! cargo run --release --example global_error_table  # endpoint error table
//! cargo run --release --example control_norms       # scaled control traces
//! cargo run --release --example free_rigid_body     # exact Euler-top flow
//! cargo run --release --example passivity           # monotone energy decay
//! ```
//!
//! The same drivers are reachable through the thin `vessel-sim` binary; see
//! the crate README.

pub mod error;
pub mod free_flow;
pub mod harness;
pub mod integrators;
pub mod linear_flow;
pub mod rotations;
pub mod special;
pub mod vessel;

/// 3-vector of `f64`.
pub type Vec3 = nalgebra::Vector3<f64>;
/// 3×3 matrix of `f64`.
pub type Mat3 = nalgebra::Matrix3<f64>;

pub use error::{Error, Result};
pub use free_flow::{magnus_attitude, s1_flow, solve_euler_top, EulerTopSolution};
pub use harness::{load_config, ExperimentConfig};
pub use integrators::{
    integrate, splitting_step, IntegrateOpts, Method, SchemeCoefficients, Trajectory, Verdict,
};
pub use linear_flow::{build_s2_operators, s2_flow, S2Operators};
pub use rotations::{EulerAngles, Quat, Rot3};
pub use vessel::{hamiltonian, ControlConfig, State, VesselParams};
