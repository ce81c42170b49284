//! Scaled control-norm traces: how faithfully SP4 and RK4 at a large step
//! (h = 1.95) reproduce the control inputs of the fine reference solution
//! after the controller activates.
//!
//! ```bash
//! cargo run --release --example control_norms [OUT_DIR]
//! ```

use vessel_splitting::harness::{control_norm_study, ExperimentConfig};

fn main() {
    let mut cfg = ExperimentConfig::default();
    if let Some(dir) = std::env::args().nth(1) {
        cfg.output_dir = dir.into();
    }
    let cache = cfg.output_dir.join("ref-cache");
    let curves = control_norm_study(&cfg, &cache).expect("control norm study failed");

    // compare each method curve against the reference on the common grid
    let reference = &curves.iter().find(|(l, _)| l == "reference").unwrap().1;
    for (label, traj) in &curves {
        if label == "reference" {
            continue;
        }
        let mut max_dev_r: f64 = 0.0;
        let mut peak: f64 = 0.0;
        for i in 0..traj.times.len().min(reference.times.len()) {
            assert!((traj.times[i] - reference.times[i]).abs() < 1e-9);
            peak = peak.max(reference.control_norms[i].0);
            max_dev_r = max_dev_r.max((traj.control_norms[i].0 - reference.control_norms[i].0).abs());
        }
        println!(
            "{label}: peak scaled rotational norm {:.4e}, max deviation from reference {:.4e} ({:.2}% of peak)",
            peak,
            max_dev_r,
            100.0 * max_dev_r / peak
        );
    }
    println!(
        "CSV written to {}",
        cfg.output_dir.join("control_norms.csv").display()
    );
}
