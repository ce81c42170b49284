//! Benchmark experiment drivers.
//!
//! The grids, spans and reference resolutions below are the published
//! protocol of the benchmark set; the configuration supplies the physical
//! scenario (parameters, controller, initial state). Table drivers
//! parallelize over (method, h) cells and cache reference runs.

use super::cache::{cached_endpoint, cached_trajectory, RunSpec};
use super::csv::{fmt_f64, write_trajectory_csv};
use super::{cache_key, ExperimentConfig};
use crate::error::Result;
use crate::integrators::{integrate, IntegrateOpts, Method, Trajectory};
use crate::rotations::euler_from_quat;
use crate::vessel::State;
use rayon::prelude::*;
use std::io::Write;
use std::path::Path;

/// Span of the convergence study.
pub const ORDER_STUDY_T_END: f64 = 10.0;
/// Steps h = 2⁻ᵏ, k = 0..=9 for the convergence study.
pub const ORDER_STUDY_LEVELS: usize = 10;
/// Reference resolution for the convergence study and the endpoint error
/// table.
pub const FINE_REFERENCE_H: f64 = 1e-4;
/// Long-run energy benchmark: endpoint time and step grid.
pub const ENERGY_TABLE_T_END: f64 = 50_000.0;
pub const ENERGY_TABLE_H: [f64; 8] = [0.05, 0.10, 0.20, 1.00, 1.95, 2.00, 3.00, 5.00];
/// Reference resolution for the long-run energy benchmark.
pub const ENERGY_REFERENCE_H: f64 = 0.005;
/// Endpoint global-error benchmark: endpoint time and step grid.
pub const GLOBAL_TABLE_T_END: f64 = 780.0;
pub const GLOBAL_TABLE_H: [f64; 13] = [
    0.005, 0.010, 0.020, 0.050, 0.100, 0.200, 0.500, 1.000, 1.500, 1.950, 2.000, 3.000, 5.000,
];
/// Control-norm trace: span and method step size.
pub const CONTROL_NORM_T_END: f64 = 110.0;
pub const CONTROL_NORM_H: f64 = 1.95;

/// Error components reported by the convergence study.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorComponent {
    Omega,
    Theta,
    V,
    X,
}

impl ErrorComponent {
    pub const ALL: [ErrorComponent; 4] = [
        ErrorComponent::Omega,
        ErrorComponent::Theta,
        ErrorComponent::V,
        ErrorComponent::X,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            ErrorComponent::Omega => "omega",
            ErrorComponent::Theta => "theta",
            ErrorComponent::V => "v",
            ErrorComponent::X => "x",
        }
    }
}

/// Convergence-study results: endpoint relative errors per method, step
/// size and component, with fitted slopes over the resolved range.
#[derive(Debug, Clone)]
pub struct OrderStudy {
    pub methods: Vec<Method>,
    pub h_list: Vec<f64>,
    /// `errors[m][k]` is `None` when the run went unstable.
    pub errors: Vec<Vec<Option<[f64; 4]>>>,
    /// `slopes[m][c]` is `None` when fewer than two resolved points exist.
    pub slopes: Vec<[Option<f64>; 4]>,
}

/// Rectangular (h × method) table of scalar errors; `None` marks an
/// unstable cell.
#[derive(Debug, Clone)]
pub struct MethodTable {
    pub h_list: Vec<f64>,
    pub methods: Vec<Method>,
    pub entries: Vec<Vec<Option<f64>>>,
    pub t_end: f64,
}

impl MethodTable {
    pub fn entry(&self, h: f64, method: Method) -> Option<f64> {
        let row = self
            .h_list
            .iter()
            .position(|&x| (x - h).abs() < 1e-12)
            .unwrap_or_else(|| panic!("h = {h} not in table"));
        let col = self
            .methods
            .iter()
            .position(|&m| m == method)
            .unwrap_or_else(|| panic!("{} not in table", method.label()));
        self.entries[row][col]
    }
}

/// Integrates the first configured method/step over `t_span` and writes
/// the trajectory CSV (state, energy, scaled control norms, Euler angles).
pub fn run_simulation(cfg: &ExperimentConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let method = cfg.methods[0];
    let h = cfg.h_list[0];
    let traj = integrate(
        &cfg.s0,
        cfg.t_span.0,
        cfg.t_span.1,
        h,
        method,
        &cfg.params,
        &cfg.ctrl,
        &IntegrateOpts {
            stride: cfg.output_stride,
            magnus_order: None,
        },
    );
    let spec = RunSpec {
        params: &cfg.params,
        ctrl: &cfg.ctrl,
        s0: &cfg.s0,
        t0: cfg.t_span.0,
        t_end: cfg.t_span.1,
        h,
        method,
        stride: cfg.output_stride,
    };
    let path = cfg
        .output_dir
        .join(format!("simulate_{}_h{}.csv", method.label(), h));
    write_trajectory_csv(
        &path,
        &traj,
        &[
            ("config".into(), cache_key(&spec)),
            ("method".into(), method.label().into()),
            ("h".into(), h.to_string()),
            ("verdict".into(), format!("{:?}", traj.verdict)),
        ],
    )?;
    Ok(traj)
}

/// (ω, q, v, x) as a flat 13-vector.
fn pose_velocity_vector(s: &State) -> [f64; 13] {
    let mut y = [0.0; 13];
    y[..3].copy_from_slice(s.omega.as_slice());
    y[3..7].copy_from_slice(&s.q.as_array());
    y[7..10].copy_from_slice(s.v.as_slice());
    y[10..13].copy_from_slice(s.x.as_slice());
    y
}

fn endpoint_errors(end: &State, reference: &State) -> [f64; 4] {
    // fall back to the absolute error when the reference component is zero
    let rel = |a: crate::Vec3, b: crate::Vec3| {
        let d = (a - b).norm();
        if b.norm() == 0.0 {
            d
        } else {
            d / b.norm()
        }
    };
    let theta_err = match (euler_from_quat(&end.q), euler_from_quat(&reference.q)) {
        (Ok(a), Ok(b)) => rel(a.as_vec3(), b.as_vec3()),
        _ => f64::NAN,
    };
    [
        rel(end.omega, reference.omega),
        theta_err,
        rel(end.v, reference.v),
        rel(end.x, reference.x),
    ]
}

/// Endpoint convergence study over h = 2⁻ᵏ against an RK4 reference at
/// h = 1e-4, with least-squares slopes fitted where the error is resolved
/// (between 1e-12 and 1e-2).
///
/// The controller is active from t0 here: starting from rest at the
/// equilibrium elevation, the uncontrolled translational dynamics stay
/// exactly zero, which would make the velocity and position error
/// components vacuous.
pub fn order_study(
    cfg: &ExperimentConfig,
    methods: &[Method],
    cache_dir: &Path,
) -> Result<OrderStudy> {
    cfg.validate()?;
    let t_end = cfg.t_span.0 + ORDER_STUDY_T_END;
    let mut ctrl = cfg.ctrl;
    ctrl.t_on = cfg.t_span.0;
    let reference = cached_endpoint(
        cache_dir,
        &RunSpec {
            params: &cfg.params,
            ctrl: &ctrl,
            s0: &cfg.s0,
            t0: cfg.t_span.0,
            t_end,
            h: FINE_REFERENCE_H,
            method: Method::Rk4,
            stride: usize::MAX,
        },
    );
    let ref_state = *reference.last_state();

    let h_list: Vec<f64> = (0..ORDER_STUDY_LEVELS).map(|k| 0.5f64.powi(k as i32)).collect();
    let cells: Vec<(usize, usize)> = (0..methods.len())
        .flat_map(|m| (0..h_list.len()).map(move |k| (m, k)))
        .collect();
    let results: Vec<Option<[f64; 4]>> = cells
        .par_iter()
        .map(|&(m, k)| {
            let traj = integrate(
                &cfg.s0,
                cfg.t_span.0,
                t_end,
                h_list[k],
                methods[m],
                &cfg.params,
                &ctrl,
                &IntegrateOpts::endpoint_only(),
            );
            traj.verdict
                .is_stable()
                .then(|| endpoint_errors(traj.last_state(), &ref_state))
        })
        .collect();

    let mut errors = vec![vec![None; h_list.len()]; methods.len()];
    for (i, &(m, k)) in cells.iter().enumerate() {
        errors[m][k] = results[i];
    }

    let slopes = errors
        .iter()
        .map(|per_h| {
            let mut out = [None; 4];
            for (c, slot) in out.iter_mut().enumerate() {
                *slot = fit_slope(&resolved_range(per_h, &h_list, c));
            }
            out
        })
        .collect();

    let study = OrderStudy {
        methods: methods.to_vec(),
        h_list,
        errors,
        slopes,
    };
    write_order_study_csv(&cfg.output_dir.join("order_study.csv"), &study)?;
    Ok(study)
}

/// Picks the (ln h, ln e) points over which an order is actually visible:
/// the leading run, from the coarsest stable step, of strictly decreasing
/// errors inside [1e-12, 1e-2]. Unstable cells and pre-asymptotic values
/// above 1e-2 are skipped; the first non-decreasing or floor-level error
/// ends the range.
fn resolved_range(per_h: &[Option<[f64; 4]>], h_list: &[f64], c: usize) -> Vec<(f64, f64)> {
    let mut pts = Vec::new();
    let mut prev: Option<f64> = None;
    for (entry, &h) in per_h.iter().zip(h_list) {
        let e = match entry {
            Some(errs) => errs[c],
            None => continue, // unstable at this step size
        };
        if prev.is_none() && (!e.is_finite() || e > 1e-2) {
            continue;
        }
        if e < 1e-12 || prev.is_some_and(|p| e >= p) {
            break;
        }
        pts.push((h.ln(), e.ln()));
        prev = Some(e);
    }
    pts
}

fn fit_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let (sx, sy): (f64, f64) = pts.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let (num, den) = pts.iter().fold((0.0, 0.0), |(num, den), &(x, y)| {
        (num + (x - mx) * (y - my), den + (x - mx) * (x - mx))
    });
    (den > 0.0).then(|| num / den)
}

fn write_order_study_csv(path: &Path, study: &OrderStudy) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut out = Vec::new();
    for (m, method) in study.methods.iter().enumerate() {
        for (c, comp) in ErrorComponent::ALL.iter().enumerate() {
            if let Some(slope) = study.slopes[m][c] {
                writeln!(out, "# slope {} {} {}", method.label(), comp.label(), fmt_f64(slope))?;
            }
        }
    }
    writeln!(out, "method,component,h,error")?;
    for (m, method) in study.methods.iter().enumerate() {
        for (c, comp) in ErrorComponent::ALL.iter().enumerate() {
            for (k, &h) in study.h_list.iter().enumerate() {
                let cell = match study.errors[m][k] {
                    Some(e) => fmt_f64(e[c]),
                    None => "unstable".to_string(),
                };
                writeln!(out, "{},{},{},{}", method.label(), comp.label(), fmt_f64(h), cell)?;
            }
        }
    }
    std::fs::write(path, out)
}

fn method_table(
    cfg: &ExperimentConfig,
    methods: &[Method],
    h_list: &[f64],
    t_end: f64,
    cache_dir: &Path,
    cell_error: impl Fn(&Trajectory) -> f64 + Sync,
) -> MethodTable {
    let cells: Vec<(usize, usize)> = (0..h_list.len())
        .flat_map(|row| (0..methods.len()).map(move |col| (row, col)))
        .collect();
    let results: Vec<Option<f64>> = cells
        .par_iter()
        .map(|&(row, col)| {
            let traj = cached_endpoint(
                cache_dir,
                &RunSpec {
                    params: &cfg.params,
                    ctrl: &cfg.ctrl,
                    s0: &cfg.s0,
                    t0: cfg.t_span.0,
                    t_end,
                    h: h_list[row],
                    method: methods[col],
                    stride: usize::MAX,
                },
            );
            traj.verdict.is_stable().then(|| cell_error(&traj))
        })
        .collect();
    let mut entries = vec![vec![None; methods.len()]; h_list.len()];
    for (i, &(row, col)) in cells.iter().enumerate() {
        entries[row][col] = results[i];
    }
    MethodTable {
        h_list: h_list.to_vec(),
        methods: methods.to_vec(),
        entries,
        t_end,
    }
}

fn write_method_table_csv(
    path: &Path,
    table: &MethodTable,
    meta: &[(String, String)],
) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut out = Vec::new();
    for (key, value) in meta {
        writeln!(out, "# {key}: {value}")?;
    }
    let header: Vec<&str> = table.methods.iter().map(|m| m.label()).collect();
    writeln!(out, "h,{}", header.join(","))?;
    for (row, &h) in table.h_list.iter().enumerate() {
        let cells: Vec<String> = table.entries[row]
            .iter()
            .map(|e| e.map_or("unstable".to_string(), fmt_f64))
            .collect();
        writeln!(out, "{},{}", fmt_f64(h), cells.join(","))?;
    }
    std::fs::write(path, out)
}

/// Relative endpoint energy error |H_n − H_ref| / H_ref at t = 50000/scale
/// over the benchmark step grid; the reference is RK4 at h = 0.005
/// (computed once and cached). Unstable cells are `None`.
pub fn energy_table(
    cfg: &ExperimentConfig,
    methods: &[Method],
    scale: f64,
    cache_dir: &Path,
) -> Result<MethodTable> {
    cfg.validate()?;
    let t_end = cfg.t_span.0 + ENERGY_TABLE_T_END / scale;
    let reference = cached_endpoint(
        cache_dir,
        &RunSpec {
            params: &cfg.params,
            ctrl: &cfg.ctrl,
            s0: &cfg.s0,
            t0: cfg.t_span.0,
            t_end,
            h: ENERGY_REFERENCE_H,
            method: Method::Rk4,
            stride: usize::MAX,
        },
    );
    let h_ref = reference.last_hamiltonian();
    let table = method_table(cfg, methods, &ENERGY_TABLE_H, t_end, cache_dir, |traj| {
        (traj.last_hamiltonian() - h_ref).abs() / h_ref
    });
    write_method_table_csv(
        &cfg.output_dir.join("energy_table.csv"),
        &table,
        &[
            ("table".into(), "relative energy error".into()),
            ("t_end".into(), t_end.to_string()),
            ("reference".into(), format!("RK4 h={ENERGY_REFERENCE_H}")),
        ],
    )?;
    Ok(table)
}

/// Relative endpoint global error ‖y_n − y_ref‖₂/‖y_ref‖₂ at t = 780/scale,
/// where y concatenates the quaternion-form pose and velocity state
/// (ω, q, v, x) exactly as integrated, in raw SI units. The integral states
/// are excluded: they accumulate a rounding random walk that floors the
/// metric near 5e-13 and would mask the small-step entries. The reference
/// is RK4 at h = 1e-4.
pub fn global_error_table(
    cfg: &ExperimentConfig,
    methods: &[Method],
    scale: f64,
    cache_dir: &Path,
) -> Result<MethodTable> {
    cfg.validate()?;
    let t_end = cfg.t_span.0 + GLOBAL_TABLE_T_END / scale;
    let reference = cached_endpoint(
        cache_dir,
        &RunSpec {
            params: &cfg.params,
            ctrl: &cfg.ctrl,
            s0: &cfg.s0,
            t0: cfg.t_span.0,
            t_end,
            h: FINE_REFERENCE_H,
            method: Method::Rk4,
            stride: usize::MAX,
        },
    );
    let ref_flat = pose_velocity_vector(reference.last_state());
    let ref_norm = ref_flat.iter().map(|x| x * x).sum::<f64>().sqrt();
    let table = method_table(cfg, methods, &GLOBAL_TABLE_H, t_end, cache_dir, |traj| {
        let flat = pose_velocity_vector(traj.last_state());
        let diff = flat
            .iter()
            .zip(ref_flat.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        diff / ref_norm
    });
    write_method_table_csv(
        &cfg.output_dir.join("global_error_table.csv"),
        &table,
        &[
            ("table".into(), "relative global error".into()),
            ("t_end".into(), t_end.to_string()),
            ("reference".into(), format!("RK4 h={FINE_REFERENCE_H}")),
        ],
    )?;
    Ok(table)
}

/// Scaled control-norm traces for SP4 and RK4 at h = 1.95 over [0, 110],
/// together with the fine reference sampled on the same grid.
pub fn control_norm_study(
    cfg: &ExperimentConfig,
    cache_dir: &Path,
) -> Result<Vec<(String, Trajectory)>> {
    cfg.validate()?;
    let t_end = cfg.t_span.0 + CONTROL_NORM_T_END;
    let ref_stride = (CONTROL_NORM_H / FINE_REFERENCE_H).round() as usize;
    let mut curves = Vec::new();
    for (label, method, h, stride) in [
        ("SP4", Method::Sp4, CONTROL_NORM_H, 1usize),
        ("RK4", Method::Rk4, CONTROL_NORM_H, 1usize),
        ("reference", Method::Rk4, FINE_REFERENCE_H, ref_stride),
    ] {
        let traj = cached_trajectory(
            cache_dir,
            &RunSpec {
                params: &cfg.params,
                ctrl: &cfg.ctrl,
                s0: &cfg.s0,
                t0: cfg.t_span.0,
                t_end,
                h,
                method,
                stride,
            },
        );
        curves.push((label.to_string(), traj));
    }

    let path = cfg.output_dir.join("control_norms.csv");
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    let mut out = Vec::new();
    writeln!(out, "# scaled control norms, methods at h = {CONTROL_NORM_H}")?;
    writeln!(out, "curve,t,tau_r_norm,tau_t_norm")?;
    for (label, traj) in &curves {
        for i in 0..traj.times.len() {
            writeln!(
                out,
                "{},{},{},{}",
                label,
                fmt_f64(traj.times[i]),
                fmt_f64(traj.control_norms[i].0),
                fmt_f64(traj.control_norms[i].1)
            )?;
        }
    }
    std::fs::write(path, out)?;
    Ok(curves)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::load_config_str;

    fn tmp_dir(tag: &str) -> std::path::PathBuf {
        let dir = std::env::temp_dir().join(format!("vessel-exp-{tag}-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&dir);
        std::fs::create_dir_all(&dir).unwrap();
        dir
    }

    #[test]
    fn simulation_is_deterministic_and_constant_at_equilibrium() {
        let dir = tmp_dir("sim");
        let mut cfg = load_config_str(
            "[initial]\ntheta0 = 0, 0, 0\nx0 = 0, 0, 0\n\
             [control]\nt_on = 1e18\nx_ref = 0, 0, 0\ntheta_ref = 0, 0, 0\n\
             [run]\nt_end = 5\nh_list = 0.5\nmethods = SP2\n",
        )
        .unwrap();
        cfg.output_dir = dir.clone();
        let traj = run_simulation(&cfg).unwrap();
        // equilibrium: state constant along the whole run
        let first = traj.states[0].to_flat();
        for s in &traj.states {
            for (a, b) in s.to_flat().iter().zip(first.iter()) {
                assert!((a - b).abs() < 1e-12);
            }
        }
        let csv_path = dir.join("simulate_SP2_h0.5.csv");
        let first_bytes = std::fs::read(&csv_path).unwrap();
        run_simulation(&cfg).unwrap();
        let second_bytes = std::fs::read(&csv_path).unwrap();
        assert_eq!(first_bytes, second_bytes, "CSV output must be byte-identical");
        let _ = std::fs::remove_dir_all(&dir);
    }

    #[test]
    fn reference_equals_itself_in_order_metric() {
        // degenerate check: errors of the reference method/step against
        // itself vanish
        let dir = tmp_dir("selforder");
        let cfg = ExperimentConfig {
            output_dir: dir.clone(),
            ..Default::default()
        };
        let reference = cached_endpoint(
            &dir,
            &RunSpec {
                params: &cfg.params,
                ctrl: &cfg.ctrl,
                s0: &cfg.s0,
                t0: 0.0,
                t_end: 0.5,
                h: 0.01,
                method: Method::Rk4,
                stride: usize::MAX,
            },
        );
        let errs = endpoint_errors(reference.last_state(), reference.last_state());
        assert_eq!(errs, [0.0; 4]);
        let _ = std::fs::remove_dir_all(&dir);
    }

    #[test]
    fn slope_fit_recovers_exact_power_law() {
        let pts: Vec<(f64, f64)> = [(1.0f64, 1e-3f64), (0.5, 1.25e-4), (0.25, 1.5625e-5)]
            .iter()
            .map(|&(h, e)| (h.ln(), e.ln()))
            .collect();
        let slope = fit_slope(&pts).unwrap();
        assert!((slope - 3.0).abs() < 1e-12);
        assert!(fit_slope(&pts[..1]).is_none());
    }
}
