//! Quaternion (Euler-parameter) algebra, Euler-angle conversions, the hat
//! map, the Euler-angle kinematic matrix Π_e and the SO(3) exponential.
//!
//! Euler angles follow the ZYX (yaw–pitch–roll) convention throughout:
//! `Q = R_z(ψ) R_y(θ) R_x(φ)`.

use crate::error::{Error, Result};
use crate::{Mat3, Vec3};

/// Distance from ±π/2 (radians) below which the pitch angle counts as
/// gimbal-locked; checked as `|cos θ| < GIMBAL_EPS`.
pub const GIMBAL_EPS: f64 = 1e-6;

/// Quaternion norms within this tolerance of 1 are renormalized silently;
/// larger deviations are an error.
pub const UNIT_NORM_TOL: f64 = 1e-8;

/// Rotation matrix in SO(3).
///
/// By convention every `Rot3` produced by this module is orthogonal with
/// determinant +1 to roundoff (‖RᵀR − I‖ ≤ 1e-12).
pub type Rot3 = Mat3;

/// Skew-symmetric matrix of `v`, so that `hat(v) * u == v × u`.
pub fn hat(v: &Vec3) -> Mat3 {
    Mat3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

/// Inverse of the hat map. Fails if `m` is not skew-symmetric to 1e-10.
pub fn vee(m: &Mat3) -> Result<Vec3> {
    let sym = m + m.transpose();
    let deviation = sym.norm();
    if deviation > 1e-10 {
        return Err(Error::NotSkewSymmetric { deviation });
    }
    Ok(Vec3::new(
        0.5 * (m[(2, 1)] - m[(1, 2)]),
        0.5 * (m[(0, 2)] - m[(2, 0)]),
        0.5 * (m[(1, 0)] - m[(0, 1)]),
    ))
}

/// Quaternion with scalar part `q0` and vector part `qv`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quat {
    pub q0: f64,
    pub qv: Vec3,
}

impl Quat {
    pub fn new(q0: f64, q1: f64, q2: f64, q3: f64) -> Self {
        Self {
            q0,
            qv: Vec3::new(q1, q2, q3),
        }
    }

    /// Identity element e = (1, 0).
    pub fn identity() -> Self {
        Self {
            q0: 1.0,
            qv: Vec3::zeros(),
        }
    }

    /// Conjugate (q0, −qv); the inverse for unit quaternions.
    pub fn conj(&self) -> Self {
        Self {
            q0: self.q0,
            qv: -self.qv,
        }
    }

    pub fn norm_squared(&self) -> f64 {
        self.q0 * self.q0 + self.qv.norm_squared()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Self {
            q0: self.q0 / n,
            qv: self.qv / n,
        }
    }

    /// Flips the sign so the scalar part is nonnegative.
    pub fn canonicalized(&self) -> Self {
        if self.q0 < 0.0 {
            Self {
                q0: -self.q0,
                qv: -self.qv,
            }
        } else {
            *self
        }
    }

    /// Exponential of the pure quaternion (0, w): (cos‖w‖, sin‖w‖ w/‖w‖).
    ///
    /// The caller supplies the half rotation vector, so
    /// `euler_rodrigues(Quat::exp(w/2)) == so3_exp(w)`.
    pub fn exp(w: &Vec3) -> Self {
        let angle = w.norm();
        if angle < 1e-8 {
            // sin x / x = 1 - x²/6 + x⁴/120
            let a2 = angle * angle;
            let sinc = 1.0 - a2 / 6.0 + a2 * a2 / 120.0;
            Self {
                q0: 1.0 - a2 / 2.0 + a2 * a2 / 24.0,
                qv: sinc * w,
            }
        } else {
            Self {
                q0: angle.cos(),
                qv: (angle.sin() / angle) * w,
            }
        }
    }

    /// Euler–Rodriguez map after defensive renormalization. Infallible;
    /// use [`euler_rodrigues`] to enforce the unit-norm precondition.
    pub fn rotation(&self) -> Rot3 {
        let q = self.normalized();
        let h = hat(&q.qv);
        Mat3::identity() + 2.0 * q.q0 * h + 2.0 * h * h
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.q0, self.qv.x, self.qv.y, self.qv.z]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }
}

/// Quaternion product `(p0 q0 − p·q, p0 q + q0 p + p × q)`.
pub fn quat_mul(p: &Quat, q: &Quat) -> Quat {
    Quat {
        q0: p.q0 * q.q0 - p.qv.dot(&q.qv),
        qv: p.q0 * q.qv + q.q0 * p.qv + p.qv.cross(&q.qv),
    }
}

impl std::ops::Mul for Quat {
    type Output = Quat;
    fn mul(self, rhs: Quat) -> Quat {
        quat_mul(&self, &rhs)
    }
}

/// Euler–Rodriguez map E(q) = I + 2 q0 ĝ(q) + 2 ĝ(q)².
///
/// Inputs within [`UNIT_NORM_TOL`] of unit norm are renormalized silently;
/// anything further off is an error (the flows preserve the norm exactly,
/// so larger drift indicates a bug upstream).
pub fn euler_rodrigues(q: &Quat) -> Result<Rot3> {
    let norm = q.norm();
    if (norm - 1.0).abs() > UNIT_NORM_TOL {
        return Err(Error::NonUnitQuaternion {
            norm,
            tol: UNIT_NORM_TOL,
        });
    }
    Ok(q.rotation())
}

/// Roll, pitch, yaw (radians) in the ZYX convention.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerAngles {
    pub phi: f64,
    pub theta: f64,
    pub psi: f64,
}

impl EulerAngles {
    pub fn new(phi: f64, theta: f64, psi: f64) -> Self {
        Self { phi, theta, psi }
    }

    pub fn as_vec3(&self) -> Vec3 {
        Vec3::new(self.phi, self.theta, self.psi)
    }

    pub fn from_vec3(v: &Vec3) -> Self {
        Self::new(v.x, v.y, v.z)
    }
}

/// Unit quaternion of the rotation `R_z(ψ) R_y(θ) R_x(φ)`, with the scalar
/// part canonicalized to be nonnegative.
pub fn quat_from_euler(angles: &EulerAngles) -> Quat {
    let (sp, cp) = (0.5 * angles.phi).sin_cos();
    let (st, ct) = (0.5 * angles.theta).sin_cos();
    let (ss, cs) = (0.5 * angles.psi).sin_cos();
    let qx = Quat::new(cp, sp, 0.0, 0.0);
    let qy = Quat::new(ct, 0.0, st, 0.0);
    let qz = Quat::new(cs, 0.0, 0.0, ss);
    (qz * qy * qx).canonicalized()
}

/// Extracts ZYX Euler angles from a unit quaternion.
///
/// Fails with [`Error::GimbalLock`] when the pitch is within
/// [`GIMBAL_EPS`] radians of ±π/2.
pub fn euler_from_quat(q: &Quat) -> Result<EulerAngles> {
    let r = euler_rodrigues(q)?;
    // Third row of R: [-sin θ, cos θ sin φ, cos θ cos φ].
    let cos_theta = r[(2, 1)].hypot(r[(2, 2)]);
    if cos_theta < GIMBAL_EPS {
        let pitch = (-r[(2, 0)]).asin();
        return Err(Error::GimbalLock {
            pitch,
            eps: GIMBAL_EPS,
        });
    }
    Ok(EulerAngles {
        phi: r[(2, 1)].atan2(r[(2, 2)]),
        theta: (-r[(2, 0)]).atan2(cos_theta),
        psi: r[(1, 0)].atan2(r[(0, 0)]),
    })
}

/// Kinematic matrix Π_e relating Euler-angle rates to the spatial frame.
pub fn pi_e(angles: &EulerAngles) -> Mat3 {
    let (st, ct) = angles.theta.sin_cos();
    let (sp, cp) = angles.psi.sin_cos();
    Mat3::new(ct * cp, -sp, 0.0, ct * sp, cp, 0.0, -st, 0.0, 1.0)
}

/// Analytic inverse of [`pi_e`]. Π_e is not invertible for θ = ±π/2.
pub fn pi_e_inv(angles: &EulerAngles) -> Result<Mat3> {
    let (st, ct) = angles.theta.sin_cos();
    if ct.abs() < GIMBAL_EPS {
        return Err(Error::GimbalLock {
            pitch: angles.theta,
            eps: GIMBAL_EPS,
        });
    }
    let (sp, cp) = angles.psi.sin_cos();
    Ok(Mat3::new(
        cp / ct,
        sp / ct,
        0.0,
        -sp,
        cp,
        0.0,
        st * cp / ct,
        st * sp / ct,
        1.0,
    ))
}

/// Rotation by angle ‖w‖ about w/‖w‖ (Rodrigues formula, with a series
/// branch for small angles).
pub fn so3_exp(w: &Vec3) -> Rot3 {
    let angle = w.norm();
    let h = hat(w);
    let (c1, c2) = if angle < 1e-4 {
        let a2 = angle * angle;
        (
            1.0 - a2 / 6.0 + a2 * a2 / 120.0,
            0.5 - a2 / 24.0 + a2 * a2 / 720.0,
        )
    } else {
        (angle.sin() / angle, (1.0 - angle.cos()) / (angle * angle))
    };
    Mat3::identity() + c1 * h + c2 * h * h
}

/// Wraps an angle into (−π, π].
pub fn wrap_angle(a: f64) -> f64 {
    use std::f64::consts::PI;
    let mut r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    r
}
