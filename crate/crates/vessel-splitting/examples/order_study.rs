//! Convergence study: endpoint relative errors of the splitting schemes
//! over h = 2⁻ᵏ against a fine RK4 reference, with fitted slopes.
//!
//! ```bash
//! cargo run --release --example order_study [OUT_DIR]
//! ```

use vessel_splitting::harness::{order_study, ErrorComponent, ExperimentConfig};
use vessel_splitting::integrators::Method;

fn main() {
    let mut cfg = ExperimentConfig::default();
    if let Some(dir) = std::env::args().nth(1) {
        cfg.output_dir = dir.into();
    }
    let cache = cfg.output_dir.join("ref-cache");
    let methods = [Method::Sp2, Method::Sp4, Method::Sp6];
    let study = order_study(&cfg, &methods, &cache).expect("order study failed");

    println!("endpoint relative errors at t = 10 (unstable cells blank):");
    print!("{:>10}", "h");
    for m in &study.methods {
        for c in ErrorComponent::ALL {
            print!("  {:>9}", format!("{}:{}", m.label(), c.label()));
        }
    }
    println!();
    for (k, &h) in study.h_list.iter().enumerate() {
        print!("{h:>10.6}");
        for (m, _) in study.methods.iter().enumerate() {
            for c in 0..4 {
                match study.errors[m][k] {
                    Some(e) => print!("  {:>9.2e}", e[c]),
                    None => print!("  {:>9}", ""),
                }
            }
        }
        println!();
    }
    println!("\nfitted slopes over the resolved range:");
    for (m, method) in study.methods.iter().enumerate() {
        print!("  {:4}", method.label());
        for (c, comp) in ErrorComponent::ALL.iter().enumerate() {
            match study.slopes[m][c] {
                Some(s) => print!("  {}={:.2}", comp.label(), s),
                None => print!("  {}=n/a", comp.label()),
            }
        }
        println!("   (design order {})", method.order());
    }
}
