//! Long-run energy benchmark: relative energy error at t = 50000/scale for
//! improved Euler, RK4 and the order-2/4 splittings over the benchmark step
//! grid. Unstable cells print as "-".
//!
//! The default scale of 10 (t = 5000) runs in seconds; pass 1 for the full
//! benchmark (about a minute on first run, cached afterwards).
//!
//! ```bash
//! cargo run --release --example energy_table [SCALE] [OUT_DIR]
//! ```

use vessel_splitting::harness::{energy_table, ExperimentConfig};
use vessel_splitting::integrators::Method;

fn main() {
    let scale: f64 = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("scale must be a number"))
        .unwrap_or(10.0);
    let mut cfg = ExperimentConfig::default();
    if let Some(dir) = std::env::args().nth(2) {
        cfg.output_dir = dir.into();
    }
    let cache = cfg.output_dir.join("ref-cache");
    let methods = [Method::ImprovedEuler, Method::Rk4, Method::Sp2, Method::Sp4];
    let table = energy_table(&cfg, &methods, scale, &cache).expect("energy table failed");

    println!("relative energy error at t = {}", table.t_end);
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
        cfg.output_dir.join("energy_table.csv").display()
    );
}
