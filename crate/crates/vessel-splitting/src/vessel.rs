//! The marine-vessel rigid-body model: parameters, dynamical state,
//! hydrostatic restoring forces, the PID positioning controller, the full
//! right-hand side in quaternion form, and energy/passivity diagnostics.

use crate::error::Result;
use crate::rotations::{
    euler_from_quat, pi_e_inv, quat_mul, wrap_angle, EulerAngles, Quat,
};
use crate::Vec3;

/// Full dynamical state.
///
/// `q` is the attitude as Euler parameters (unit quaternion to 1e-10 along
/// every integrated trajectory); `phi_theta` and `phi_x` accumulate the
/// integral of the attitude and position errors for the PID controller.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct State {
    /// Body angular velocity ω, rad/s.
    pub omega: Vec3,
    /// Attitude quaternion.
    pub q: Quat,
    /// Body-frame linear velocity v, m/s.
    pub v: Vec3,
    /// Spatial position x, m.
    pub x: Vec3,
    /// Integral of Euler-angle error, rad·s.
    pub phi_theta: Vec3,
    /// Integral of position error, m·s.
    pub phi_x: Vec3,
}

/// Number of scalar components in a flattened [`State`].
pub const STATE_DIM: usize = 19;

impl State {
    /// State at rest with the given attitude and position.
    pub fn at_rest(q: Quat, x: Vec3) -> Self {
        Self {
            omega: Vec3::zeros(),
            q,
            v: Vec3::zeros(),
            x,
            phi_theta: Vec3::zeros(),
            phi_x: Vec3::zeros(),
        }
    }

    pub fn to_flat(&self) -> [f64; STATE_DIM] {
        let mut y = [0.0; STATE_DIM];
        y[..3].copy_from_slice(self.omega.as_slice());
        y[3..7].copy_from_slice(&self.q.as_array());
        y[7..10].copy_from_slice(self.v.as_slice());
        y[10..13].copy_from_slice(self.x.as_slice());
        y[13..16].copy_from_slice(self.phi_theta.as_slice());
        y[16..19].copy_from_slice(self.phi_x.as_slice());
        y
    }

    pub fn from_flat(y: &[f64; STATE_DIM]) -> Self {
        Self {
            omega: Vec3::new(y[0], y[1], y[2]),
            q: Quat::new(y[3], y[4], y[5], y[6]),
            v: Vec3::new(y[7], y[8], y[9]),
            x: Vec3::new(y[10], y[11], y[12]),
            phi_theta: Vec3::new(y[13], y[14], y[15]),
            phi_x: Vec3::new(y[16], y[17], y[18]),
        }
    }

    /// Renormalizes the attitude quaternion in place.
    pub fn renormalize_attitude(&mut self) {
        self.q = self.q.normalized();
    }
}

/// Time derivative of a [`State`]; `q` holds the raw quaternion rate.
#[derive(Debug, Clone, Copy)]
pub struct StateDot {
    pub omega: Vec3,
    pub q: [f64; 4],
    pub v: Vec3,
    pub x: Vec3,
    pub phi_theta: Vec3,
    pub phi_x: Vec3,
}

impl StateDot {
    pub fn to_flat(&self) -> [f64; STATE_DIM] {
        let mut y = [0.0; STATE_DIM];
        y[..3].copy_from_slice(self.omega.as_slice());
        y[3..7].copy_from_slice(&self.q);
        y[7..10].copy_from_slice(self.v.as_slice());
        y[10..13].copy_from_slice(self.x.as_slice());
        y[13..16].copy_from_slice(self.phi_theta.as_slice());
        y[16..19].copy_from_slice(self.phi_x.as_slice());
        y
    }
}

/// Rigid-body and hydrostatic parameters. All diagonal matrices are stored
/// as their diagonals; entries are SI.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VesselParams {
    /// Diagonal of the inertia tensor T, kg·m².
    pub inertia: Vec3,
    /// Vessel mass m_v, kg.
    pub mass: f64,
    /// Diagonal rotational damping D_r.
    pub d_r: Vec3,
    /// Diagonal translational damping D_t.
    pub d_t: Vec3,
    /// Longitudinal metacentric height, m.
    pub gm_l: f64,
    /// Transverse metacentric height, m.
    pub gm_t: f64,
    /// Gravitational acceleration, m/s².
    pub g: f64,
    /// Water density, kg/m³.
    pub rho_w: f64,
    /// Water-plane area, m².
    pub a_wp: f64,
    /// Equilibrium water level, m.
    pub z_eq: f64,
}

impl VesselParams {
    /// Supply-vessel dataset used by all benchmark experiments.
    pub fn supply_vessel() -> Self {
        Self {
            inertia: Vec3::new(2.873071e8, 2.90000e9, 2.726143e9),
            mass: 6.3622085e6,
            d_r: Vec3::new(9.329153987e2, 6.514979127508227e8, 3.15094664584e4),
            d_t: Vec3::new(3.53933789e1, 1.1781388e2, 1.4566249e6),
            gm_l: 103.628,
            gm_t: 2.1440,
            g: 9.81,
            rho_w: 1.025e3,
            a_wp: 1.3834e3,
            z_eq: 0.0,
        }
    }

    /// Buoyancy stiffness c = g ρ_w A_wp.
    pub fn buoyancy_stiffness(&self) -> f64 {
        self.g * self.rho_w * self.a_wp
    }

    /// Diagonal of the restoring-moment stiffness
    /// G = m_v g diag(GM_L, GM_T, 0).
    pub fn restoring_stiffness(&self) -> Vec3 {
        Vec3::new(
            self.mass * self.g * self.gm_l,
            self.mass * self.g * self.gm_t,
            0.0,
        )
    }
}

impl Default for VesselParams {
    fn default() -> Self {
        Self::supply_vessel()
    }
}

/// PID gains (diagonals), reference pose, and activation time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlConfig {
    pub kp_r: Vec3,
    pub kd_r: Vec3,
    pub ki_r: Vec3,
    pub kp_t: Vec3,
    pub kd_t: Vec3,
    pub ki_t: Vec3,
    pub theta_ref: EulerAngles,
    pub x_ref: Vec3,
    /// Controls switch on at this time; integral states reset to zero there.
    pub t_on: f64,
    /// Use the absolute attitude θ₀ instead of the error θ̃₀ in the
    /// second-order forcing vector of the linear sub-flow. Off by default;
    /// the two coincide when θ_ref = 0.
    pub w_r2_uses_absolute_theta: bool,
}

impl ControlConfig {
    /// Station-keeping gains and references for the supply-vessel dataset.
    pub fn supply_vessel() -> Self {
        Self {
            kp_r: Vec3::new(0.0, 0.0, 1e8),
            kd_r: Vec3::new(0.0, 0.0, 1e9),
            ki_r: Vec3::new(0.0, 0.0, 2e5),
            kp_t: Vec3::new(4e5, 4e5, 0.0),
            kd_t: Vec3::new(4e6, 4e6, 0.0),
            ki_t: Vec3::new(1e3, 1e3, 0.0),
            theta_ref: EulerAngles::new(0.0, 0.0, 0.54),
            x_ref: Vec3::new(780.0, 20.0, 0.0),
            t_on: 50.0,
            w_r2_uses_absolute_theta: false,
        }
    }

    /// Attitude error θ̃ = θ − θ_ref, each component wrapped into (−π, π].
    pub fn theta_err(&self, theta: &EulerAngles) -> Vec3 {
        Vec3::new(
            wrap_angle(theta.phi - self.theta_ref.phi),
            wrap_angle(theta.theta - self.theta_ref.theta),
            wrap_angle(theta.psi - self.theta_ref.psi),
        )
    }
}

impl Default for ControlConfig {
    fn default() -> Self {
        Self::supply_vessel()
    }
}

/// Momentum-form variables ξ = (m, p, μ, z̄) used by the energy diagnostics.
#[derive(Debug, Clone, Copy)]
pub struct PortVars {
    /// Angular momentum m = Tω.
    pub m_ang: Vec3,
    /// Linear momentum p = m_v v.
    pub p_lin: Vec3,
    /// Body-frame vertical μ = Qᵀe₃ (unit).
    pub mu: Vec3,
    /// Elevation above equilibrium z̄ = z − z_eq.
    pub zbar: f64,
}

impl PortVars {
    pub fn from_state(s: &State, params: &VesselParams) -> Self {
        let q_mat = s.q.rotation();
        Self {
            m_ang: params.inertia.component_mul(&s.omega),
            p_lin: params.mass * s.v,
            mu: q_mat.transpose() * Vec3::z(),
            zbar: s.x.z - params.z_eq,
        }
    }
}

/// Spatial restoring moment g_r^s = (Q r_r^b) × (m_v g e₃), with the moment
/// arm r_r^b built from the metacentric heights.
pub fn restoring_moment(q: &Quat, params: &VesselParams) -> Vec3 {
    let q_mat = q.rotation();
    let arm = Vec3::new(
        params.gm_l * q_mat[(2, 0)],
        params.gm_t * q_mat[(2, 1)],
        0.0,
    );
    (q_mat * arm).cross(&(params.mass * params.g * Vec3::z()))
}

/// Spatial buoyancy restoring force g_t^s = g ρ_w A_wp (z − z_eq) e₃.
pub fn restoring_force(x: &Vec3, params: &VesselParams) -> Vec3 {
    params.buoyancy_stiffness() * (x.z - params.z_eq) * Vec3::z()
}

/// PID control torques (τ_r, τ_t) in the body frame. Returns zeros when
/// `active` is false.
pub fn control_torques(
    s: &State,
    ctrl: &ControlConfig,
    active: bool,
) -> Result<(Vec3, Vec3)> {
    if !active {
        return Ok((Vec3::zeros(), Vec3::zeros()));
    }
    let q = s.q.normalized();
    let theta = euler_from_quat(&q)?;
    let q_mat = q.rotation();
    let pi_inv = pi_e_inv(&theta)?;
    let theta_err = ctrl.theta_err(&theta);
    let theta_rate = pi_inv * q_mat * s.omega;
    let x_err = s.x - ctrl.x_ref;
    let x_rate = q_mat * s.v;

    let pid_r = ctrl.kp_r.component_mul(&theta_err)
        + ctrl.kd_r.component_mul(&theta_rate)
        + ctrl.ki_r.component_mul(&s.phi_theta);
    let tau_r = -(pi_inv * q_mat).transpose() * pid_r;

    let pid_t = ctrl.kp_t.component_mul(&x_err)
        + ctrl.kd_t.component_mul(&x_rate)
        + ctrl.ki_t.component_mul(&s.phi_x);
    let tau_t = -q_mat.transpose() * pid_t;
    Ok((tau_r, tau_t))
}

/// Full right-hand side in quaternion form, used by the reference
/// Runge–Kutta integrators. The attitude is renormalized internally so the
/// slightly non-unit stage values of an RK step are handled gracefully.
pub fn rhs_full(
    s: &State,
    params: &VesselParams,
    ctrl: &ControlConfig,
    active: bool,
) -> Result<StateDot> {
    let q = s.q.normalized();
    let q_mat = q.rotation();
    let (tau_r, tau_t) = control_torques(s, ctrl, active)?;

    let m_ang = params.inertia.component_mul(&s.omega);
    let omega_dot = (m_ang.cross(&s.omega)
        - (params.d_r.component_mul(&s.omega) + q_mat.transpose() * restoring_moment(&q, params)
            - tau_r))
        .component_div(&params.inertia);

    let q_dot = quat_mul(&s.q, &Quat { q0: 0.0, qv: s.omega });
    let q_dot = [
        0.5 * q_dot.q0,
        0.5 * q_dot.qv.x,
        0.5 * q_dot.qv.y,
        0.5 * q_dot.qv.z,
    ];

    let v_dot = -s.omega.cross(&s.v)
        - (params.d_t.component_mul(&s.v) + q_mat.transpose() * restoring_force(&s.x, params)
            - tau_t)
            / params.mass;

    let theta = euler_from_quat(&q)?;
    Ok(StateDot {
        omega: omega_dot,
        q: q_dot,
        v: v_dot,
        x: q_mat * s.v,
        phi_theta: ctrl.theta_err(&theta),
        phi_x: s.x - ctrl.x_ref,
    })
}

/// Total energy H = ½mᵀT⁻¹m + ½m_v⁻¹pᵀp + ½μᵀGμ + ½cz̄².
pub fn hamiltonian(s: &State, params: &VesselParams) -> f64 {
    let pv = PortVars::from_state(s, params);
    let kinetic = 0.5 * pv.m_ang.component_div(&params.inertia).dot(&pv.m_ang)
        + 0.5 / params.mass * pv.p_lin.dot(&pv.p_lin);
    let g_diag = params.restoring_stiffness();
    let potential = 0.5 * g_diag.component_mul(&pv.mu).dot(&pv.mu)
        + 0.5 * params.buoyancy_stiffness() * pv.zbar * pv.zbar;
    kinetic + potential
}

/// Instantaneous energy rate Ḣ = νᵀ(−Dν + τ) with ν = (v, ω).
///
/// Nonpositive whenever the controls are off (D is positive definite).
pub fn supply_rate(
    s: &State,
    params: &VesselParams,
    ctrl: &ControlConfig,
    active: bool,
) -> Result<f64> {
    let (tau_r, tau_t) = control_torques(s, ctrl, active)?;
    let damp = s.v.dot(&params.d_t.component_mul(&s.v))
        + s.omega.dot(&params.d_r.component_mul(&s.omega));
    Ok(-damp + s.v.dot(&tau_t) + s.omega.dot(&tau_r))
}

/// Scaled control norms (‖T⁻¹τ_r‖₂, ‖m_v⁻¹τ_t‖₂).
pub fn scaled_control_norms(
    s: &State,
    params: &VesselParams,
    ctrl: &ControlConfig,
    active: bool,
) -> Result<(f64, f64)> {
    let (tau_r, tau_t) = control_torques(s, ctrl, active)?;
    Ok((
        tau_r.component_div(&params.inertia).norm(),
        (tau_t / params.mass).norm(),
    ))
}
