//! Composition engine for the symmetric splitting schemes, reference
//! one-step methods (RK4, improved Euler) on the quaternion-form system,
//! and the fixed-step time loop with control activation and divergence
//! detection.

use crate::error::Result;
use crate::free_flow::s1_flow;
use crate::linear_flow::s2_flow;
use crate::vessel::{
    hamiltonian, rhs_full, scaled_control_norms, ControlConfig, State, VesselParams, STATE_DIM,
};

/// Angular-velocity norm beyond which a trajectory counts as diverged.
pub const DIVERGENCE_OMEGA: f64 = 1e6;

/// Magnitude cap on any state component. Translational instabilities can
/// grow v, x and the error integrals without the angular velocity ever
/// crossing [`DIVERGENCE_OMEGA`]; anything beyond this bound is divergence
/// long before floating-point overflow.
pub const DIVERGENCE_STATE: f64 = 1e12;

/// Which sub-flow a composition stage applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SubFlow {
    /// Conservative free-rigid-body flow.
    S1,
    /// Linear damping/control flow.
    S2,
}

/// Palindromic composition coefficients: stage durations (as fractions of
/// the step) a₁..a_{m+1} for the linear flow and b₁..b_m for the free flow,
/// expanded as a₁ b₁ a₂ … a_{m+1} … b₁ a₁.
#[derive(Debug, Clone)]
pub struct SchemeCoefficients {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub order: usize,
    pub name: &'static str,
    expansion: Vec<(SubFlow, f64)>,
}

impl SchemeCoefficients {
    pub fn new(a: Vec<f64>, b: Vec<f64>, order: usize, name: &'static str) -> Self {
        let expansion = expand(&a, &b);
        Self {
            a,
            b,
            order,
            name,
            expansion,
        }
    }

    /// Expanded stage list with zero stages dropped and adjacent stages of
    /// the same kind merged.
    pub fn expansion(&self) -> &[(SubFlow, f64)] {
        &self.expansion
    }

    /// Sum of linear-flow durations over the expanded sequence (must be 1).
    pub fn a_sum(&self) -> f64 {
        2.0 * self.a[..self.a.len() - 1].iter().sum::<f64>() + self.a[self.a.len() - 1]
    }

    /// Sum of free-flow durations over the expanded sequence (must be 1).
    pub fn b_sum(&self) -> f64 {
        2.0 * self.b.iter().sum::<f64>()
    }
}

fn expand(a: &[f64], b: &[f64]) -> Vec<(SubFlow, f64)> {
    let mut seq = Vec::with_capacity(2 * b.len() + a.len());
    for i in 0..b.len() {
        seq.push((SubFlow::S2, a[i]));
        seq.push((SubFlow::S1, b[i]));
    }
    seq.push((SubFlow::S2, a[b.len()]));
    for i in (0..b.len()).rev() {
        seq.push((SubFlow::S1, b[i]));
        seq.push((SubFlow::S2, a[i]));
    }
    let mut merged: Vec<(SubFlow, f64)> = Vec::with_capacity(seq.len());
    for (kind, c) in seq {
        if c == 0.0 {
            continue;
        }
        match merged.last_mut() {
            Some((k, acc)) if *k == kind => *acc += c,
            _ => merged.push((kind, c)),
        }
    }
    merged
}

/// Strang splitting: a = (1/2, 0), b = (1/2), order 2.
pub fn strang_coefficients() -> SchemeCoefficients {
    SchemeCoefficients::new(vec![0.5, 0.0], vec![0.5], 2, "SP2")
}

/// Fourth-order symmetric composition; the trailing coefficients close the
/// consistency conditions a₄ = 1 − 2Σaᵢ and b₃ = 1/2 − Σbᵢ.
pub fn sp4_coefficients() -> SchemeCoefficients {
    let a1 = 0.07920369643119565;
    let a2 = 0.353172906049773728818833445330;
    let a3 = -0.04206508035771952;
    let b1 = 0.209515106613361881525060713987;
    let b2 = -0.143851773179818;
    SchemeCoefficients::new(
        vec![a1, a2, a3, 1.0 - 2.0 * (a1 + a2 + a3)],
        vec![b1, b2, 0.5 - (b1 + b2)],
        4,
        "SP4",
    )
}

/// Sixth-order symmetric composition with the analogous closure relations.
pub fn sp6_coefficients() -> SchemeCoefficients {
    let a1 = 0.0502627644003923808654389538920;
    let a2 = 0.413514300428346618921141630839;
    let a3 = 0.04507988979439766;
    let a4 = -0.188054853819571375656897886496;
    let a5 = 0.541960678450781151905056284542;
    let b1 = 0.148816447901042828823498193483;
    let b2 = -0.132385865767782744686048193902;
    let b3 = 0.0673076046921849473963237618218;
    let b4 = 0.432666402578172649872653897748;
    SchemeCoefficients::new(
        vec![a1, a2, a3, a4, a5, 1.0 - 2.0 * (a1 + a2 + a3 + a4 + a5)],
        vec![b1, b2, b3, b4, 0.5 - (b1 + b2 + b3 + b4)],
        6,
        "SP6",
    )
}

/// One step of the palindromic composition of the two exact sub-flows; the
/// attitude quaternion is renormalized once at the end.
pub fn splitting_step(
    s: &State,
    h: f64,
    scheme: &SchemeCoefficients,
    params: &VesselParams,
    ctrl: &ControlConfig,
    active: bool,
    magnus_order: usize,
) -> Result<State> {
    let mut state = *s;
    for &(kind, c) in scheme.expansion() {
        state = match kind {
            SubFlow::S1 => s1_flow(&state, c * h, &ctrl.x_ref, params, magnus_order),
            SubFlow::S2 => s2_flow(&state, c * h, params, ctrl, active)?,
        };
    }
    state.renormalize_attitude();
    Ok(state)
}

fn rhs_flat(
    y: &[f64; STATE_DIM],
    params: &VesselParams,
    ctrl: &ControlConfig,
    active: bool,
) -> Result<[f64; STATE_DIM]> {
    Ok(rhs_full(&State::from_flat(y), params, ctrl, active)?.to_flat())
}

fn add_scaled(y: &[f64; STATE_DIM], k: &[f64; STATE_DIM], s: f64) -> [f64; STATE_DIM] {
    let mut out = *y;
    for i in 0..STATE_DIM {
        out[i] += s * k[i];
    }
    out
}

/// Classical four-stage RK4 on the full quaternion-form right-hand side.
pub fn rk4_step(
    s: &State,
    h: f64,
    params: &VesselParams,
    ctrl: &ControlConfig,
    active: bool,
) -> Result<State> {
    let y = s.to_flat();
    let k1 = rhs_flat(&y, params, ctrl, active)?;
    let k2 = rhs_flat(&add_scaled(&y, &k1, 0.5 * h), params, ctrl, active)?;
    let k3 = rhs_flat(&add_scaled(&y, &k2, 0.5 * h), params, ctrl, active)?;
    let k4 = rhs_flat(&add_scaled(&y, &k3, h), params, ctrl, active)?;
    let mut out = y;
    for i in 0..STATE_DIM {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    let mut state = State::from_flat(&out);
    state.renormalize_attitude();
    Ok(state)
}

/// Heun's two-stage improved Euler method.
pub fn improved_euler_step(
    s: &State,
    h: f64,
    params: &VesselParams,
    ctrl: &ControlConfig,
    active: bool,
) -> Result<State> {
    let y = s.to_flat();
    let k1 = rhs_flat(&y, params, ctrl, active)?;
    let k2 = rhs_flat(&add_scaled(&y, &k1, h), params, ctrl, active)?;
    let mut out = y;
    for i in 0..STATE_DIM {
        out[i] += 0.5 * h * (k1[i] + k2[i]);
    }
    let mut state = State::from_flat(&out);
    state.renormalize_attitude();
    Ok(state)
}

/// Integration methods available to the experiment drivers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    ImprovedEuler,
    Rk4,
    Sp2,
    Sp4,
    Sp6,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::ImprovedEuler,
        Method::Rk4,
        Method::Sp2,
        Method::Sp4,
        Method::Sp6,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Method::ImprovedEuler => "IE",
            Method::Rk4 => "RK4",
            Method::Sp2 => "SP2",
            Method::Sp4 => "SP4",
            Method::Sp6 => "SP6",
        }
    }

    pub fn scheme(&self) -> Option<SchemeCoefficients> {
        match self {
            Method::Sp2 => Some(strang_coefficients()),
            Method::Sp4 => Some(sp4_coefficients()),
            Method::Sp6 => Some(sp6_coefficients()),
            _ => None,
        }
    }

    /// Formal convergence order.
    pub fn order(&self) -> usize {
        match self {
            Method::ImprovedEuler => 2,
            Method::Rk4 => 4,
            Method::Sp2 => 2,
            Method::Sp4 => 4,
            Method::Sp6 => 6,
        }
    }
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "IE" => Ok(Method::ImprovedEuler),
            "RK4" => Ok(Method::Rk4),
            "SP2" => Ok(Method::Sp2),
            "SP4" => Ok(Method::Sp4),
            "SP6" => Ok(Method::Sp6),
            other => Err(format!(
                "unknown method '{other}' (expected IE, RK4, SP2, SP4 or SP6)"
            )),
        }
    }
}

/// Why a run was flagged unstable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnstableReason {
    NonFinite,
    OmegaOverflow,
    StateOverflow,
    GimbalLock,
}

impl std::fmt::Display for UnstableReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            UnstableReason::NonFinite => write!(f, "non-finite state component"),
            UnstableReason::OmegaOverflow => write!(f, "angular velocity above {DIVERGENCE_OMEGA}"),
            UnstableReason::StateOverflow => write!(f, "state component above {DIVERGENCE_STATE}"),
            UnstableReason::GimbalLock => write!(f, "pitch reached the kinematic singularity"),
        }
    }
}

/// Outcome of an [`integrate`] call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Verdict {
    Completed,
    Unstable { t: f64, reason: UnstableReason },
}

impl Verdict {
    pub fn is_stable(&self) -> bool {
        matches!(self, Verdict::Completed)
    }
}

/// Time-stamped record of an integrated trajectory with derived
/// diagnostics. Lists have equal length and strictly increasing times.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<State>,
    pub hamiltonians: Vec<f64>,
    /// (‖T⁻¹τ_r‖₂, ‖m_v⁻¹τ_t‖₂) at each record point.
    pub control_norms: Vec<(f64, f64)>,
    pub verdict: Verdict,
}

impl Trajectory {
    pub fn last_state(&self) -> &State {
        self.states.last().expect("trajectory records its start")
    }

    pub fn last_hamiltonian(&self) -> f64 {
        *self
            .hamiltonians
            .last()
            .expect("trajectory records its start")
    }
}

/// Options for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct IntegrateOpts {
    /// Record every `stride`-th step (the run start, the activation event
    /// and the final point are always recorded). The stride counter restarts
    /// at the activation event so record times stay on the step grid of
    /// each segment.
    pub stride: usize,
    /// Magnus truncation order for the free sub-flow; defaults to the
    /// composition order.
    pub magnus_order: Option<usize>,
}

impl Default for IntegrateOpts {
    fn default() -> Self {
        Self {
            stride: 1,
            magnus_order: None,
        }
    }
}

impl IntegrateOpts {
    /// Record only the run start, activation event and endpoint.
    pub fn endpoint_only() -> Self {
        Self {
            stride: usize::MAX,
            magnus_order: None,
        }
    }
}

enum Stepper {
    Split(SchemeCoefficients, usize),
    Rk4,
    ImprovedEuler,
}

impl Stepper {
    fn step(
        &self,
        s: &State,
        h: f64,
        params: &VesselParams,
        ctrl: &ControlConfig,
        active: bool,
    ) -> Result<State> {
        match self {
            Stepper::Split(scheme, magnus_order) => {
                splitting_step(s, h, scheme, params, ctrl, active, *magnus_order)
            }
            Stepper::Rk4 => rk4_step(s, h, params, ctrl, active),
            Stepper::ImprovedEuler => improved_euler_step(s, h, params, ctrl, active),
        }
    }
}

/// Fixed-step integration of the full system from `t0` to `t_end`.
///
/// The control flag flips at `ctrl.t_on`; when `t_on` falls inside the span
/// a shortened step lands exactly on the activation event, where the
/// integral states reset to zero. The final step is shortened likewise when
/// `h` does not divide the span. Divergence (any non-finite component or
/// ‖ω‖ > 10⁶) terminates the run with an unstable verdict rather than an
/// error, so parameter sweeps can record failed cells.
#[allow(clippy::too_many_arguments)]
pub fn integrate(
    s0: &State,
    t0: f64,
    t_end: f64,
    h: f64,
    method: Method,
    params: &VesselParams,
    ctrl: &ControlConfig,
    opts: &IntegrateOpts,
) -> Trajectory {
    assert!(h > 0.0 && t_end > t0, "need h > 0 and t_end > t0");
    let stepper = match method {
        Method::Rk4 => Stepper::Rk4,
        Method::ImprovedEuler => Stepper::ImprovedEuler,
        m => {
            let scheme = m.scheme().expect("splitting methods carry a scheme");
            let order = opts.magnus_order.unwrap_or(scheme.order);
            Stepper::Split(scheme, order)
        }
    };

    let mut traj = Trajectory {
        times: Vec::new(),
        states: Vec::new(),
        hamiltonians: Vec::new(),
        control_norms: Vec::new(),
        verdict: Verdict::Completed,
    };

    let mut state = *s0;
    let mut active = t0 >= ctrl.t_on;
    push_record(&mut traj, t0, &state, params, ctrl, active);

    // segments: [t0, t_on] with controls off, then [t_on, t_end] with
    // controls on (collapsing to a single segment when t_on is outside)
    let mut segments: Vec<(f64, f64, bool)> = Vec::new();
    if !active && ctrl.t_on < t_end {
        segments.push((t0, ctrl.t_on, false));
        segments.push((ctrl.t_on, t_end, true));
    } else {
        segments.push((t0, t_end, active));
    }

    for (seg_start, seg_end, seg_active) in segments {
        if seg_active && !active {
            // activation event: gains switch on, integral states reset
            active = true;
            state.phi_theta = crate::Vec3::zeros();
            state.phi_x = crate::Vec3::zeros();
        }
        let span = seg_end - seg_start;
        let n_full = ((span / h) + 1e-9).floor() as u64;
        let remainder = span - n_full as f64 * h;
        let mut since_record = 0usize;
        for k in 1..=n_full {
            let t = seg_start + k as f64 * h;
            match stepper.step(&state, h, params, ctrl, active) {
                Ok(next) => state = next,
                Err(_) => {
                    traj.verdict = Verdict::Unstable {
                        t,
                        reason: UnstableReason::GimbalLock,
                    };
                    return traj;
                }
            }
            if let Some(reason) = divergence(&state) {
                traj.verdict = Verdict::Unstable { t, reason };
                return traj;
            }
            since_record += 1;
            let segment_end = k == n_full && remainder <= 1e-9 * h;
            if since_record >= opts.stride || segment_end {
                push_record(&mut traj, t, &state, params, ctrl, active);
                since_record = 0;
            }
        }
        if remainder > 1e-9 * h {
            match stepper.step(&state, remainder, params, ctrl, active) {
                Ok(next) => state = next,
                Err(_) => {
                    traj.verdict = Verdict::Unstable {
                        t: seg_end,
                        reason: UnstableReason::GimbalLock,
                    };
                    return traj;
                }
            }
            if let Some(reason) = divergence(&state) {
                traj.verdict = Verdict::Unstable { t: seg_end, reason };
                return traj;
            }
            push_record(&mut traj, seg_end, &state, params, ctrl, active);
        }
    }
    traj
}

fn push_record(
    traj: &mut Trajectory,
    t: f64,
    s: &State,
    params: &VesselParams,
    ctrl: &ControlConfig,
    active: bool,
) {
    traj.times.push(t);
    traj.states.push(*s);
    traj.hamiltonians.push(hamiltonian(s, params));
    let norms = scaled_control_norms(s, params, ctrl, active).unwrap_or((f64::NAN, f64::NAN));
    traj.control_norms.push(norms);
}

fn divergence(s: &State) -> Option<UnstableReason> {
    let y = s.to_flat();
    if y.iter().any(|c| !c.is_finite()) {
        return Some(UnstableReason::NonFinite);
    }
    if s.omega.norm() > DIVERGENCE_OMEGA {
        return Some(UnstableReason::OmegaOverflow);
    }
    if y.iter().any(|c| c.abs() > DIVERGENCE_STATE) {
        return Some(UnstableReason::StateOverflow);
    }
    None
}
