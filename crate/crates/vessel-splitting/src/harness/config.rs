//! Flat `key = value` configuration files with `[section]` headers.
//!
//! Unknown sections or keys are rejected; numeric errors name the offending
//! field and line. An empty file yields the default supply-vessel scenario.

use super::ExperimentConfig;
use crate::error::{Error, Result};
use crate::integrators::Method;
use crate::rotations::{quat_from_euler, EulerAngles};
use crate::vessel::State;
use crate::Vec3;
use std::path::Path;

pub fn load_config(path: &Path) -> Result<ExperimentConfig> {
    let text = std::fs::read_to_string(path)?;
    load_config_str(&text)
}

pub fn load_config_str(text: &str) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::default();
    // initial pose pieces are combined into s0 at the end
    let mut theta0 = EulerAngles::new(0.05, -0.02, 0.10);
    let mut omega0 = Vec3::zeros();
    let mut v0 = Vec3::zeros();
    let mut x0 = Vec3::new(723.0, 0.0, 0.0);

    let mut section = String::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or_else(|| Error::Config {
                line: line_no,
                message: format!("malformed section header '{line}'"),
            })?;
            section = name.trim().to_string();
            match section.as_str() {
                "vessel" | "control" | "initial" | "run" => {}
                other => {
                    return Err(Error::Config {
                        line: line_no,
                        message: format!("unknown section '[{other}]'"),
                    })
                }
            }
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
            line: line_no,
            message: format!("expected 'key = value', got '{line}'"),
        })?;
        let key = key.trim();
        let value = value.trim();
        let ctx = |msg: String| Error::Config {
            line: line_no,
            message: msg,
        };
        let scalar = |v: &str, field: &str| -> Result<f64> {
            v.parse::<f64>().map_err(|_| {
                ctx(format!("field '{field}': cannot parse '{v}' as a number"))
            })
        };
        let triple = |v: &str, field: &str| -> Result<Vec3> {
            let parts: Vec<&str> = v.split(',').map(str::trim).collect();
            if parts.len() != 3 {
                return Err(ctx(format!(
                    "field '{field}': expected three comma-separated numbers"
                )));
            }
            Ok(Vec3::new(
                scalar(parts[0], field)?,
                scalar(parts[1], field)?,
                scalar(parts[2], field)?,
            ))
        };

        match (section.as_str(), key) {
            ("vessel", "inertia") => cfg.params.inertia = triple(value, key)?,
            ("vessel", "mass") => cfg.params.mass = scalar(value, key)?,
            ("vessel", "d_r") => cfg.params.d_r = triple(value, key)?,
            ("vessel", "d_t") => cfg.params.d_t = triple(value, key)?,
            ("vessel", "gm_l") => cfg.params.gm_l = scalar(value, key)?,
            ("vessel", "gm_t") => cfg.params.gm_t = scalar(value, key)?,
            ("vessel", "g") => cfg.params.g = scalar(value, key)?,
            ("vessel", "rho_w") => cfg.params.rho_w = scalar(value, key)?,
            ("vessel", "a_wp") => cfg.params.a_wp = scalar(value, key)?,
            ("vessel", "z_eq") => cfg.params.z_eq = scalar(value, key)?,

            ("control", "kp_r") => cfg.ctrl.kp_r = triple(value, key)?,
            ("control", "kd_r") => cfg.ctrl.kd_r = triple(value, key)?,
            ("control", "ki_r") => cfg.ctrl.ki_r = triple(value, key)?,
            ("control", "kp_t") => cfg.ctrl.kp_t = triple(value, key)?,
            ("control", "kd_t") => cfg.ctrl.kd_t = triple(value, key)?,
            ("control", "ki_t") => cfg.ctrl.ki_t = triple(value, key)?,
            ("control", "theta_ref") => {
                cfg.ctrl.theta_ref = EulerAngles::from_vec3(&triple(value, key)?)
            }
            ("control", "x_ref") => cfg.ctrl.x_ref = triple(value, key)?,
            ("control", "t_on") => cfg.ctrl.t_on = scalar(value, key)?,
            ("control", "w_r2_uses_absolute_theta") => {
                cfg.ctrl.w_r2_uses_absolute_theta = parse_bool(value)
                    .ok_or_else(|| ctx(format!("field '{key}': expected true or false")))?
            }

            ("initial", "theta0") => theta0 = EulerAngles::from_vec3(&triple(value, key)?),
            ("initial", "omega0") => omega0 = triple(value, key)?,
            ("initial", "v0") => v0 = triple(value, key)?,
            ("initial", "x0") => x0 = triple(value, key)?,

            ("run", "t0") => cfg.t_span.0 = scalar(value, key)?,
            ("run", "t_end") => cfg.t_span.1 = scalar(value, key)?,
            ("run", "h_list") => {
                cfg.h_list = value
                    .split(',')
                    .map(|v| scalar(v.trim(), key))
                    .collect::<Result<Vec<_>>>()?
            }
            ("run", "methods") => {
                cfg.methods = value
                    .split(',')
                    .map(|m| m.trim().parse::<Method>().map_err(|e| ctx(e)))
                    .collect::<Result<Vec<_>>>()?
            }
            ("run", "output_stride") => {
                cfg.output_stride = value.parse::<usize>().map_err(|_| {
                    ctx(format!("field '{key}': cannot parse '{value}' as an integer"))
                })?
            }
            ("run", "output_dir") => cfg.output_dir = value.into(),

            ("", k) => {
                return Err(ctx(format!(
                    "key '{k}' appears before any [section] header"
                )))
            }
            (s, k) => {
                return Err(ctx(format!("unknown key '{k}' in section '[{s}]'")));
            }
        }
    }

    let mut s0 = State::at_rest(quat_from_euler(&theta0), x0);
    s0.omega = omega0;
    s0.v = v0;
    cfg.s0 = s0;
    cfg.validate()?;
    Ok(cfg)
}

fn parse_bool(v: &str) -> Option<bool> {
    match v.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" => Some(true),
        "false" | "no" | "0" => Some(false),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_supply_vessel_defaults() {
        let cfg = load_config_str("").unwrap();
        assert_eq!(cfg.params.mass, 6.3622085e6);
        assert_eq!(cfg.ctrl.x_ref, Vec3::new(780.0, 20.0, 0.0));
        assert_eq!(cfg.ctrl.theta_ref.psi, 0.54);
        assert_eq!(cfg.ctrl.t_on, 50.0);
        assert_eq!(cfg.s0.x, Vec3::new(723.0, 0.0, 0.0));
        // initial attitude round-trips to θ0 = (0.05, −0.02, 0.10)
        let angles = crate::rotations::euler_from_quat(&cfg.s0.q).unwrap();
        assert!((angles.phi - 0.05).abs() < 1e-12);
        assert!((angles.theta + 0.02).abs() < 1e-12);
        assert!((angles.psi - 0.10).abs() < 1e-12);
    }

    #[test]
    fn overrides_apply() {
        let cfg = load_config_str(
            "[run]\nh_list = 0.05\nmethods = SP2, RK4\nt_end = 10\n\n[initial]\nomega0 = 0.1, 0, 0\n",
        )
        .unwrap();
        assert_eq!(cfg.h_list, vec![0.05]);
        assert_eq!(cfg.methods, vec![Method::Sp2, Method::Rk4]);
        assert_eq!(cfg.t_span.1, 10.0);
        assert_eq!(cfg.s0.omega.x, 0.1);
    }

    #[test]
    fn malformed_numeric_names_the_field() {
        let err = load_config_str("[vessel]\nmass = twelve\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("mass"), "message was: {msg}");
        assert!(msg.contains("line 2"), "message was: {msg}");
    }

    #[test]
    fn unknown_keys_and_sections_rejected() {
        assert!(load_config_str("[vessel]\nbogus = 1\n").is_err());
        assert!(load_config_str("[warp]\nspeed = 9\n").is_err());
        assert!(load_config_str("x = 1\n").is_err());
    }

    #[test]
    fn comments_and_blank_lines_ignored() {
        let cfg = load_config_str("# scenario\n\n[run]\nt_end = 42 # end\n").unwrap();
        assert_eq!(cfg.t_span.1, 42.0);
    }
}
