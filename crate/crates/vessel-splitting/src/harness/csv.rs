//! Deterministic CSV output: comma separators, `#` metadata rows, floats
//! at 17 significant digits so identical configs yield byte-identical
//! files.

use crate::integrators::{Trajectory, Verdict};
use crate::rotations::euler_from_quat;
use std::io::Write;
use std::path::Path;

/// Fixed-format float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub const TRAJECTORY_HEADER: &str = "t,omega1,omega2,omega3,q0,q1,q2,q3,v1,v2,v3,x1,x2,x3,\
phi_theta1,phi_theta2,phi_theta3,phi_x1,phi_x2,phi_x3,H,tau_r_norm,tau_t_norm,\
theta_phi,theta_theta,theta_psi";

/// Writes a trajectory as CSV, appending the extracted Euler angles for
/// plotting. Metadata (config hash, verdict) goes into `#` comment rows; an
/// unstable verdict adds an explanatory final comment row.
pub fn write_trajectory_csv(
    path: &Path,
    traj: &Trajectory,
    meta: &[(String, String)],
) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut out = Vec::with_capacity(traj.times.len() * 32);
    for (key, value) in meta {
        writeln!(out, "# {key}: {value}")?;
    }
    writeln!(out, "{TRAJECTORY_HEADER}")?;
    for i in 0..traj.times.len() {
        let s = &traj.states[i];
        let mut cols = Vec::with_capacity(26);
        cols.push(fmt_f64(traj.times[i]));
        for c in s.to_flat() {
            cols.push(fmt_f64(c));
        }
        cols.push(fmt_f64(traj.hamiltonians[i]));
        cols.push(fmt_f64(traj.control_norms[i].0));
        cols.push(fmt_f64(traj.control_norms[i].1));
        match euler_from_quat(&s.q) {
            Ok(a) => {
                cols.push(fmt_f64(a.phi));
                cols.push(fmt_f64(a.theta));
                cols.push(fmt_f64(a.psi));
            }
            Err(_) => {
                for _ in 0..3 {
                    cols.push(fmt_f64(f64::NAN));
                }
            }
        }
        writeln!(out, "{}", cols.join(","))?;
    }
    if let Verdict::Unstable { t, reason } = traj.verdict {
        writeln!(out, "# run terminated as unstable at t = {t}: {reason}")?;
    }
    std::fs::write(path, out)
}
