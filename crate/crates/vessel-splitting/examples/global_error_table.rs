//! Endpoint global-error benchmark: relative error of the pose/velocity
//! state at t = 780/scale against an RK4 reference at h = 1e-4.
//!
//! ```bash
//! cargo run --release --example global_error_table [SCALE] [OUT_DIR]
//! ```

use vessel_splitting::harness::{global_error_table, ExperimentConfig};
use vessel_splitting::integrators::Method;

fn main() {
    let scale: f64 = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("scale must be a number"))
        .unwrap_or(1.0);
    let mut cfg = ExperimentConfig::default();
    if let Some(dir) = std::env::args().nth(2) {
        cfg.output_dir = dir.into();
    }
    let cache = cfg.output_dir.join("ref-cache");
    let methods = [Method::ImprovedEuler, Method::Rk4, Method::Sp2, Method::Sp4];
    let table = global_error_table(&cfg, &methods, scale, &cache).expect("table failed");

    println!("relative global error at t = {}", table.t_end);
    print!("{:>8}", "h");
    for m in &table.methods {
        print!("  {:>10}", m.label());
    }
    println!();
    for (row, &h) in table.h_list.iter().enumerate() {
        print!("{h:>8.3}");
        for cell in &table.entries[row] {
            match cell {
                Some(e) => print!("  {e:>10.2e}"),
                None => print!("  {:>10}", "-"),
            }
        }
        println!();
    }
    println!(
        "CSV written to {}",
        cfg.output_dir.join("global_error_table.csv").display()
    );
}
