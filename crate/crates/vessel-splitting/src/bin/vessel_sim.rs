//! Thin command-line front end over the experiment drivers.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use vessel_splitting::harness::{
    self, control_norm_study, energy_table, global_error_table, order_study, run_simulation,
    ErrorComponent, MethodTable,
};
use vessel_splitting::integrators::Method;

const CONFIG_KEYS: &str = "\
Configuration file format: `key = value` lines under [section] headers,
`#` comments. Unset keys fall back to the supply-vessel defaults.

  [vessel]   inertia (3), mass, d_r (3), d_t (3), gm_l, gm_t, g, rho_w,
             a_wp, z_eq
  [control]  kp_r, kd_r, ki_r, kp_t, kd_t, ki_t (diagonals, 3 each),
             theta_ref (3), x_ref (3), t_on, w_r2_uses_absolute_theta
  [initial]  theta0 (3), omega0 (3), v0 (3), x0 (3)
  [run]      t0, t_end, h_list (list), methods (list), output_stride,
             output_dir

Triples and lists are comma-separated; numbers accept exponent notation.";

#[derive(Parser)]
#[command(name = "vessel-sim", version, after_long_help = CONFIG_KEYS)]
/// Splitting-method benchmarks for a controlled marine-vessel model.
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// Configuration file; omit for the default supply-vessel scenario.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for CSV files and the reference cache.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Divide the benchmark end times by this factor (desk-scale runs).
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    /// Comma-separated methods (IE, RK4, SP2, SP4, SP6).
    #[arg(long, value_delimiter = ',')]
    methods: Option<Vec<String>>,
    /// Accepted for interface compatibility; the system is deterministic
    /// and no randomness is used.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Integrate the configured scenario and write the trajectory CSV.
    Simulate(Common),
    /// Endpoint convergence study over h = 2^-k with fitted slopes.
    OrderStudy(Common),
    /// Long-run relative energy error table.
    EnergyTable(Common),
    /// Endpoint relative global error table.
    GlobalErrorTable(Common),
    /// Scaled control-norm traces for SP4/RK4 against the reference.
    ControlNorms(Common),
}

fn main() {
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<(), Box<dyn std::error::Error>> {
    match cli.cmd {
        Cmd::Simulate(common) => {
            let cfg = setup(&common)?;
            let traj = run_simulation(&cfg)?;
            let end = traj.last_state();
            println!(
                "simulate: {} steps recorded, verdict {:?}",
                traj.times.len(),
                traj.verdict
            );
            println!(
                "endpoint t = {}: x = ({:.3}, {:.3}, {:.3}), H = {:.6e}",
                traj.times.last().unwrap(),
                end.x.x,
                end.x.y,
                end.x.z,
                traj.last_hamiltonian()
            );
            println!("wrote {}", cfg.output_dir.display());
        }
        Cmd::OrderStudy(common) => {
            let cfg = setup(&common)?;
            let methods = parse_methods(&common, &[Method::Sp2, Method::Sp4, Method::Sp6])?;
            let study = order_study(&cfg, &methods, &cache_dir(&common))?;
            println!("fitted convergence slopes (resolved range):");
            for (m, method) in study.methods.iter().enumerate() {
                for (c, comp) in ErrorComponent::ALL.iter().enumerate() {
                    match study.slopes[m][c] {
                        Some(s) => println!("  {:4} {:6} {:5.2}", method.label(), comp.label(), s),
                        None => println!("  {:4} {:6}  (unresolved)", method.label(), comp.label()),
                    }
                }
            }
            println!("wrote {}", cfg.output_dir.join("order_study.csv").display());
        }
        Cmd::EnergyTable(common) => {
            let cfg = setup(&common)?;
            let methods =
                parse_methods(&common, &[Method::ImprovedEuler, Method::Rk4, Method::Sp2, Method::Sp4])?;
            let table = energy_table(&cfg, &methods, common.scale, &cache_dir(&common))?;
            print_table(&table, "relative energy error");
            println!("wrote {}", cfg.output_dir.join("energy_table.csv").display());
        }
        Cmd::GlobalErrorTable(common) => {
            let cfg = setup(&common)?;
            let methods =
                parse_methods(&common, &[Method::ImprovedEuler, Method::Rk4, Method::Sp2, Method::Sp4])?;
            let table = global_error_table(&cfg, &methods, common.scale, &cache_dir(&common))?;
            print_table(&table, "relative global error");
            println!(
                "wrote {}",
                cfg.output_dir.join("global_error_table.csv").display()
            );
        }
        Cmd::ControlNorms(common) => {
            let cfg = setup(&common)?;
            let curves = control_norm_study(&cfg, &cache_dir(&common))?;
            for (label, traj) in &curves {
                let peak = traj
                    .control_norms
                    .iter()
                    .map(|n| n.0)
                    .fold(0.0f64, f64::max);
                println!(
                    "{label}: {} samples, peak scaled rotational norm {peak:.4e}, verdict {:?}",
                    traj.times.len(),
                    traj.verdict
                );
            }
            println!("wrote {}", cfg.output_dir.join("control_norms.csv").display());
        }
    }
    Ok(())
}

fn setup(common: &Common) -> Result<harness::ExperimentConfig, Box<dyn std::error::Error>> {
    let mut cfg = match &common.config {
        Some(path) => harness::load_config(path)?,
        None => harness::ExperimentConfig::default(),
    };
    cfg.output_dir = common.out.clone();
    if common.seed.is_some() {
        eprintln!("note: --seed is accepted but unused; runs are deterministic");
    }
    Ok(cfg)
}

fn cache_dir(common: &Common) -> PathBuf {
    common.out.join("ref-cache")
}

fn parse_methods(common: &Common, default: &[Method]) -> Result<Vec<Method>, String> {
    match &common.methods {
        None => Ok(default.to_vec()),
        Some(list) => list.iter().map(|m| m.parse::<Method>()).collect(),
    }
}

fn print_table(table: &MethodTable, title: &str) {
    println!("{title} at t = {}", table.t_end);
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
}
