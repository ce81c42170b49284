//! Exact flow of the linear sub-system collecting damping, restoring and
//! control forces, solved by variation of constants with φ-functions.
//!
//! Over a sub-step the attitude and position are frozen, so the angular and
//! linear velocities obey constant-coefficient linear equations
//! ω̇ = Aω + w_r1 + σ w_r2 and v̇ = Bv + w_t, whose solutions are
//!
//! ω(γ) = e^{γA}ω₀ + γφ₁(γA)w_r1 + γ²φ₂(γA)w_r2,
//! v(γ) = e^{γB}v₀ + γφ₁(γB)w_t.

use crate::error::Result;
use crate::rotations::{euler_from_quat, pi_e_inv};
use crate::special::{expm_phi12_apply, expm_phi1_apply};
use crate::vessel::{restoring_force, restoring_moment, ControlConfig, State, VesselParams};
use crate::{Mat3, Vec3};

/// Frozen-coefficient operators and forcing vectors of the linear sub-flow.
#[derive(Debug, Clone, Copy)]
pub struct S2Operators {
    /// Rotational drift matrix A, 1/s.
    pub a_rot: Mat3,
    /// Translational drift matrix B, 1/s.
    pub b_trans: Mat3,
    /// Constant rotational forcing, rad/s².
    pub w_r1: Vec3,
    /// Linear-in-time rotational forcing (from the integral state), rad/s³.
    pub w_r2: Vec3,
    /// Constant translational forcing, m/s².
    pub w_t: Vec3,
}

/// Assembles the frozen-coefficient operators at the current state.
///
/// With controls inactive the gain terms drop out: A = −T⁻¹D_r,
/// B = −m_v⁻¹D_t, and only the restoring forces remain in the forcing.
pub fn build_s2_operators(
    s: &State,
    params: &VesselParams,
    ctrl: &ControlConfig,
    active: bool,
) -> Result<S2Operators> {
    let q = s.q.normalized();
    let q_mat = q.rotation();
    let inv_t = Mat3::from_diagonal(&params.inertia.map(|x| 1.0 / x));
    let g_r = restoring_moment(&q, params);
    let g_t = restoring_force(&s.x, params);

    if !active {
        return Ok(S2Operators {
            a_rot: -inv_t * Mat3::from_diagonal(&params.d_r),
            b_trans: -Mat3::from_diagonal(&params.d_t) / params.mass,
            w_r1: -inv_t * (q_mat.transpose() * g_r),
            w_r2: Vec3::zeros(),
            w_t: -(q_mat.transpose() * g_t) / params.mass,
        });
    }

    let theta = euler_from_quat(&q)?;
    let pi_inv = pi_e_inv(&theta)?;
    let theta_err = ctrl.theta_err(&theta);
    let x_err = s.x - ctrl.x_ref;
    let pi_inv_q = pi_inv * q_mat;

    let a_rot = -inv_t
        * (Mat3::from_diagonal(&params.d_r)
            + pi_inv_q.transpose() * Mat3::from_diagonal(&ctrl.kd_r) * pi_inv_q);
    let b_trans = -(Mat3::from_diagonal(&params.d_t)
        + q_mat.transpose() * Mat3::from_diagonal(&ctrl.kd_t) * q_mat)
        / params.mass;

    let w_r1 = -inv_t
        * (q_mat.transpose()
            * (g_r
                + pi_inv.transpose()
                    * (ctrl.kp_r.component_mul(&theta_err)
                        + ctrl.ki_r.component_mul(&s.phi_theta))));
    let w_r2_angle = if ctrl.w_r2_uses_absolute_theta {
        theta.as_vec3()
    } else {
        theta_err
    };
    let w_r2 = -inv_t
        * (q_mat.transpose() * (pi_inv.transpose() * ctrl.ki_r.component_mul(&w_r2_angle)));
    let w_t = -(q_mat.transpose()
        * (g_t + ctrl.kp_t.component_mul(&x_err) + ctrl.ki_t.component_mul(&s.phi_x)))
        / params.mass;

    Ok(S2Operators {
        a_rot,
        b_trans,
        w_r1,
        w_r2,
        w_t,
    })
}

/// Exact flow of the linear sub-system over `gamma`. The attitude, position
/// and position-integral are frozen; φ_θ advances linearly by its frozen
/// rate θ̃₀.
pub fn s2_flow(
    s: &State,
    gamma: f64,
    params: &VesselParams,
    ctrl: &ControlConfig,
    active: bool,
) -> Result<State> {
    let ops = build_s2_operators(s, params, ctrl, active)?;
    let (exp_a, forced_omega) = expm_phi12_apply(
        &(gamma * ops.a_rot),
        &(gamma * ops.w_r1),
        &(gamma * gamma * ops.w_r2),
    );
    let (exp_b, forced_v) = expm_phi1_apply(&(gamma * ops.b_trans), &(gamma * ops.w_t));
    let theta = euler_from_quat(&s.q.normalized())?;
    Ok(State {
        omega: exp_a * s.omega + forced_omega,
        q: s.q,
        v: exp_b * s.v + forced_v,
        x: s.x,
        phi_theta: s.phi_theta + gamma * ctrl.theta_err(&theta),
        phi_x: s.phi_x,
    })
}
