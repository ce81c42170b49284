//! Passivity of the damped uncontrolled vessel: with the controller off the
//! energy rate is −νᵀDν ≤ 0, so every recorded energy sequence decreases
//! monotonically. Also compares the instantaneous energy rate against a
//! finite-difference slope of H along the trajectory.
//!
//! ```bash
//! cargo run --release --example passivity
//! ```

use vessel_splitting::harness::ExperimentConfig;
use vessel_splitting::integrators::{integrate, IntegrateOpts, Method};
use vessel_splitting::vessel::supply_rate;

fn main() {
    let cfg = ExperimentConfig::default();
    let mut ctrl = cfg.ctrl;
    ctrl.t_on = f64::INFINITY; // controller never activates

    let traj = integrate(
        &cfg.s0,
        0.0,
        100.0,
        0.05,
        Method::Sp4,
        &cfg.params,
        &ctrl,
        &IntegrateOpts::default(),
    );
    let h0 = traj.hamiltonians[0];
    let mut increases = 0usize;
    for w in traj.hamiltonians.windows(2) {
        if w[1] > w[0] + 1e-9 * h0 {
            increases += 1;
        }
    }
    println!(
        "H(0) = {:.6e}, H(100) = {:.6e}, ratio {:.4}",
        h0,
        traj.last_hamiltonian(),
        traj.last_hamiltonian() / h0
    );
    println!(
        "monotone decrease: {} violations over {} steps",
        increases,
        traj.hamiltonians.len() - 1
    );

    // energy rate vs centered finite differences of H
    println!("\nenergy rate (supply rate) against dH/dt by finite differences:");
    for &i in &[200usize, 600, 1200, 1800] {
        let t = traj.times[i];
        let rate = supply_rate(&traj.states[i], &cfg.params, &ctrl, false).unwrap();
        let fd = (traj.hamiltonians[i + 1] - traj.hamiltonians[i - 1])
            / (traj.times[i + 1] - traj.times[i - 1]);
        println!(
            "  t = {t:>6.2}: analytic {rate:+.6e}, finite difference {fd:+.6e}"
        );
    }
}
