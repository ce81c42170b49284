//! Set-point maneuver: integrate the supply-vessel scenario over
//! t ∈ [0, 200] with the controller switching on at t = 50, write the
//! trajectory CSV and report the endpoint pose.
//!
//! ```bash
//! cargo run --release --example simulate [OUT_DIR]
//! ```

use vessel_splitting::harness::{run_simulation, ExperimentConfig};
use vessel_splitting::rotations::euler_from_quat;

fn main() {
    let mut cfg = ExperimentConfig::default();
    if let Some(dir) = std::env::args().nth(1) {
        cfg.output_dir = dir.into();
    }
    let traj = run_simulation(&cfg).expect("simulation failed");
    let end = traj.last_state();
    let angles = euler_from_quat(&end.q).expect("endpoint attitude is regular");
    println!("verdict: {:?}", traj.verdict);
    println!(
        "endpoint t = {}: x = {:.3} m, y = {:.3} m, z = {:.4} m, psi = {:.5} rad",
        traj.times.last().unwrap(),
        end.x.x,
        end.x.y,
        end.x.z,
        angles.psi
    );
    println!(
        "references: x = {:.1}, y = {:.1}, psi = {:.2}",
        cfg.ctrl.x_ref.x, cfg.ctrl.x_ref.y, cfg.ctrl.theta_ref.psi
    );
    println!(
        "energy: H0 = {:.4e}, H(200) = {:.4e}",
        traj.hamiltonians[0],
        traj.last_hamiltonian()
    );
    println!("trajectory CSV written under {}", cfg.output_dir.display());
}
