//! Content-addressed cache for reference trajectories.
//!
//! Long reference runs (e.g. RK4 at h = 0.005 to t = 50000) are computed on
//! demand and stored under a SHA-256 key of the full run specification, so
//! the table drivers are cheap to re-run. Writes are atomic
//! (write-temp-then-rename) so concurrent drivers can share a cache
//! directory.

use super::csv::fmt_f64;
use crate::integrators::{integrate, IntegrateOpts, Method, Trajectory, UnstableReason, Verdict};
use crate::vessel::{ControlConfig, State, VesselParams, STATE_DIM};
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};

/// Everything that determines a single integration run.
#[derive(Debug, Clone, Copy)]
pub struct RunSpec<'a> {
    pub params: &'a VesselParams,
    pub ctrl: &'a ControlConfig,
    pub s0: &'a State,
    pub t0: f64,
    pub t_end: f64,
    pub h: f64,
    pub method: Method,
    pub stride: usize,
}

/// Hex SHA-256 of the canonical text form of a run specification.
pub fn cache_key(spec: &RunSpec) -> String {
    let p = spec.params;
    let c = spec.ctrl;
    let mut text = String::with_capacity(1024);
    text.push_str("format-1;");
    let mut push = |x: f64| {
        text.push_str(&fmt_f64(x));
        text.push(';');
    };
    for v in [p.inertia, p.d_r, p.d_t] {
        for i in 0..3 {
            push(v[i]);
        }
    }
    for x in [p.mass, p.gm_l, p.gm_t, p.g, p.rho_w, p.a_wp, p.z_eq] {
        push(x);
    }
    for v in [c.kp_r, c.kd_r, c.ki_r, c.kp_t, c.kd_t, c.ki_t, c.x_ref] {
        for i in 0..3 {
            push(v[i]);
        }
    }
    for x in [c.theta_ref.phi, c.theta_ref.theta, c.theta_ref.psi, c.t_on] {
        push(x);
    }
    push(if c.w_r2_uses_absolute_theta { 1.0 } else { 0.0 });
    for x in spec.s0.to_flat() {
        push(x);
    }
    for x in [spec.t0, spec.t_end, spec.h] {
        push(x);
    }
    text.push_str(spec.method.label());
    text.push(';');
    text.push_str(&spec.stride.to_string());
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Runs the integration, or loads its recorded trajectory from `cache_dir`.
pub fn cached_trajectory(cache_dir: &Path, spec: &RunSpec) -> Trajectory {
    let path = cache_path(cache_dir, spec);
    if let Some(traj) = load(&path) {
        return traj;
    }
    let traj = integrate(
        spec.s0,
        spec.t0,
        spec.t_end,
        spec.h,
        spec.method,
        spec.params,
        spec.ctrl,
        &IntegrateOpts {
            stride: spec.stride,
            magnus_order: None,
        },
    );
    let _ = store(&path, &traj); // cache write failure is not fatal
    traj
}

/// Endpoint-only variant for the table drivers.
pub fn cached_endpoint(cache_dir: &Path, spec: &RunSpec) -> Trajectory {
    let spec = RunSpec {
        stride: usize::MAX,
        ..*spec
    };
    cached_trajectory(cache_dir, &spec)
}

fn cache_path(cache_dir: &Path, spec: &RunSpec) -> PathBuf {
    cache_dir.join(format!("{}.ref", cache_key(spec)))
}

fn store(path: &Path, traj: &Trajectory) -> std::io::Result<()> {
    use std::io::Write;
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut out = Vec::new();
    match traj.verdict {
        Verdict::Completed => writeln!(out, "completed")?,
        Verdict::Unstable { t, reason } => {
            let tag = match reason {
                UnstableReason::NonFinite => "nonfinite",
                UnstableReason::OmegaOverflow => "omega",
                UnstableReason::StateOverflow => "state",
                UnstableReason::GimbalLock => "gimbal",
            };
            writeln!(out, "unstable {} {}", fmt_f64(t), tag)?;
        }
    }
    for i in 0..traj.times.len() {
        let mut cols = Vec::with_capacity(STATE_DIM + 4);
        cols.push(fmt_f64(traj.times[i]));
        for c in traj.states[i].to_flat() {
            cols.push(fmt_f64(c));
        }
        cols.push(fmt_f64(traj.hamiltonians[i]));
        cols.push(fmt_f64(traj.control_norms[i].0));
        cols.push(fmt_f64(traj.control_norms[i].1));
        writeln!(out, "{}", cols.join(" "))?;
    }
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    std::fs::write(&tmp, out)?;
    std::fs::rename(&tmp, path)
}

fn load(path: &Path) -> Option<Trajectory> {
    let text = std::fs::read_to_string(path).ok()?;
    let mut lines = text.lines();
    let verdict_line = lines.next()?;
    let verdict = if verdict_line == "completed" {
        Verdict::Completed
    } else {
        let mut parts = verdict_line.split_whitespace();
        if parts.next()? != "unstable" {
            return None;
        }
        let t = parts.next()?.parse().ok()?;
        let reason = match parts.next()? {
            "nonfinite" => UnstableReason::NonFinite,
            "omega" => UnstableReason::OmegaOverflow,
            "state" => UnstableReason::StateOverflow,
            "gimbal" => UnstableReason::GimbalLock,
            _ => return None,
        };
        Verdict::Unstable { t, reason }
    };
    let mut traj = Trajectory {
        times: Vec::new(),
        states: Vec::new(),
        hamiltonians: Vec::new(),
        control_norms: Vec::new(),
        verdict,
    };
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<f64> = line
            .split_whitespace()
            .map(|c| c.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .ok()?;
        if cols.len() != 1 + STATE_DIM + 3 {
            return None;
        }
        traj.times.push(cols[0]);
        let mut flat = [0.0; STATE_DIM];
        flat.copy_from_slice(&cols[1..1 + STATE_DIM]);
        traj.states.push(State::from_flat(&flat));
        traj.hamiltonians.push(cols[1 + STATE_DIM]);
        traj.control_norms
            .push((cols[2 + STATE_DIM], cols[3 + STATE_DIM]));
    }
    if traj.times.is_empty() {
        return None;
    }
    Some(traj)
}
