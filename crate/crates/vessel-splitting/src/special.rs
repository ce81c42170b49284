//! Scalar and small-matrix special functions: Jacobi elliptic functions and
//! elliptic integrals of the first kind, 3×3 matrix exponentials, and the
//! φ₁/φ₂ kernels of variation-of-constants formulas.
//!
//! All elliptic routines take the modulus k (not the parameter m = k²).

use crate::error::{Error, Result};
use crate::{Mat3, Vec3};
use nalgebra::SMatrix;

/// Values of the three Jacobi elliptic functions at a common argument.
///
/// Satisfies `sn² + cn² = 1` and `dn² + k² sn² = 1` to 1e-13.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticTriple {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
}

const AGM_TOL: f64 = 1e-16;
const AGM_MAX_ITER: usize = 32;

/// Complete elliptic integral of the first kind, K(k) = π / (2 AGM(1, k')).
///
/// K diverges as k → 1; arguments with `k ≥ 1 − 1e-12` (or `k < 0`) are a
/// domain error.
pub fn elliptic_k(k: f64) -> Result<f64> {
    if !(0.0..1.0 - 1e-12).contains(&k) {
        return Err(Error::Domain {
            function: "elliptic_k",
            message: format!("modulus {k} outside [0, 1 - 1e-12)"),
        });
    }
    let mut a = 1.0;
    let mut b = (1.0 - k * k).sqrt();
    for _ in 0..AGM_MAX_ITER {
        let an = 0.5 * (a + b);
        let bn = (a * b).sqrt();
        a = an;
        b = bn;
        if (a - b).abs() <= AGM_TOL * a {
            break;
        }
    }
    Ok(std::f64::consts::FRAC_PI_2 / a)
}

/// Jacobi elliptic functions sn, cn, dn by the descending Landen / AGM
/// sequence with backward amplitude recursion.
///
/// Degenerate moduli use the closed forms sn(u,0) = sin u and
/// sn(u,1) = tanh u.
pub fn jacobi_sn_cn_dn(u: f64, k: f64) -> Result<EllipticTriple> {
    if !(0.0..=1.0).contains(&k) {
        return Err(Error::Domain {
            function: "jacobi_sn_cn_dn",
            message: format!("modulus {k} outside [0, 1]"),
        });
    }
    if k == 0.0 {
        return Ok(EllipticTriple {
            sn: u.sin(),
            cn: u.cos(),
            dn: 1.0,
        });
    }
    // Separatrix modulus: hyperbolic closed forms.
    if k == 1.0 {
        let sech = 1.0 / u.cosh();
        return Ok(EllipticTriple {
            sn: u.tanh(),
            cn: sech,
            dn: sech,
        });
    }
    let kp = ((1.0 - k) * (1.0 + k)).sqrt();
    let mut a_seq = [0.0; AGM_MAX_ITER + 1];
    let mut c_seq = [0.0; AGM_MAX_ITER + 1];
    let mut a = 1.0;
    let mut b = kp;
    a_seq[0] = a;
    c_seq[0] = k;
    let mut n = 0;
    while n < AGM_MAX_ITER {
        let c = 0.5 * (a - b);
        if c.abs() <= AGM_TOL * a {
            break;
        }
        let an = 0.5 * (a + b);
        let bn = (a * b).sqrt();
        a = an;
        b = bn;
        n += 1;
        a_seq[n] = a;
        c_seq[n] = c;
    }
    // Backward recursion for the amplitude.
    let mut phi = (1u64 << n) as f64 * a_seq[n] * u;
    for i in (1..=n).rev() {
        let s = (c_seq[i] * phi.sin() / a_seq[i]).clamp(-1.0, 1.0);
        phi = 0.5 * (phi + s.asin());
    }
    let (sn, cn) = phi.sin_cos();
    // dn² = cn² + k'² sn², a cancellation-free form of 1 − k² sn².
    let dn = (cn * cn + (kp * sn) * (kp * sn)).sqrt();
    Ok(EllipticTriple { sn, cn, dn })
}

/// Incomplete elliptic integral of the first kind F(φ, k), evaluated with
/// Carlson's R_F and the quasi-periodicity F(φ + π) = F(φ) + 2K.
pub fn elliptic_f(phi: f64, k: f64) -> Result<f64> {
    use std::f64::consts::{FRAC_PI_2, PI};
    if !(0.0..=1.0).contains(&k) {
        return Err(Error::Domain {
            function: "elliptic_f",
            message: format!("modulus {k} outside [0, 1]"),
        });
    }
    if !phi.is_finite() {
        return Ok(f64::NAN);
    }
    if phi.abs() <= FRAC_PI_2 {
        let s = phi.sin();
        let c2 = phi.cos() * phi.cos();
        let q = (1.0 - k * s) * (1.0 + k * s);
        return Ok(s * carlson_rf(c2, q, 1.0));
    }
    let two_k = 2.0 * elliptic_k(k)?;
    if phi > FRAC_PI_2 {
        Ok(two_k - elliptic_f(PI - phi, k)?)
    } else {
        Ok(-two_k + elliptic_f(PI + phi, k)?)
    }
}

/// Carlson symmetric integral R_F(x, y, z) by the duplication theorem.
fn carlson_rf(mut x: f64, mut y: f64, mut z: f64) -> f64 {
    const ERRTOL: f64 = 0.0025;
    let mut mu = (x + y + z) / 3.0;
    // iteration cap guards the logarithmically singular corner x = y = 0
    for _ in 0..200 {
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lambda = sx * (sy + sz) + sy * sz;
        x = 0.25 * (x + lambda);
        y = 0.25 * (y + lambda);
        z = 0.25 * (z + lambda);
        mu = (x + y + z) / 3.0;
        let eps = (x - mu).abs().max((y - mu).abs()).max((z - mu).abs()) / mu;
        if eps < ERRTOL {
            break;
        }
    }
    let dx = 1.0 - x / mu;
    let dy = 1.0 - y / mu;
    let dz = 1.0 - z / mu;
    let e2 = dx * dy - dz * dz;
    let e3 = dx * dy * dz;
    (1.0 + (e2 / 24.0 - 0.1 - 3.0 * e3 / 44.0) * e2 + e3 / 14.0) / mu.sqrt()
}

fn inf_norm<const N: usize>(m: &SMatrix<f64, N, N>) -> f64 {
    (0..N)
        .map(|i| (0..N).map(|j| m[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with a truncated Taylor
/// series (13 terms after scaling to ‖Z‖ ≤ 1/2).
pub fn expm<const N: usize>(z: &SMatrix<f64, N, N>) -> SMatrix<f64, N, N> {
    let norm = inf_norm(z);
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let x = z / 2f64.powi(s);
    let mut term = x;
    let mut sum = SMatrix::<f64, N, N>::identity() + term;
    for j in 2..=13u32 {
        term = term * x / f64::from(j);
        sum += term;
        if inf_norm(&term) <= 1e-17 * inf_norm(&sum) {
            break;
        }
    }
    for _ in 0..s {
        sum = sum * sum;
    }
    sum
}

/// 3×3 matrix exponential.
pub fn expm3(z: &Mat3) -> Mat3 {
    expm(z)
}

// Threshold below which φ-functions use the plain Taylor series instead of
// the augmented-matrix embedding.
const PHI_TAYLOR_NORM: f64 = 1e-2;

/// exp(Z) together with φ₁(Z)u + φ₂(Z)v, from one exponential of the
/// augmented 5×5 companion matrix [[Z, v, u], [0, 0, 1], [0, 0, 0]].
pub fn expm_phi12_apply(z: &Mat3, u: &Vec3, v: &Vec3) -> (Mat3, Vec3) {
    let mut m = SMatrix::<f64, 5, 5>::zeros();
    for i in 0..3 {
        for j in 0..3 {
            m[(i, j)] = z[(i, j)];
        }
        m[(i, 3)] = v[i];
        m[(i, 4)] = u[i];
    }
    m[(3, 4)] = 1.0;
    let e = expm(&m);
    let mut exp_z = Mat3::zeros();
    let mut w = Vec3::zeros();
    for i in 0..3 {
        for j in 0..3 {
            exp_z[(i, j)] = e[(i, j)];
        }
        w[i] = e[(i, 4)];
    }
    (exp_z, w)
}

/// exp(Z) together with φ₁(Z)u, from one exponential of the augmented 4×4
/// matrix [[Z, u], [0, 0]].
pub fn expm_phi1_apply(z: &Mat3, u: &Vec3) -> (Mat3, Vec3) {
    let mut m = SMatrix::<f64, 4, 4>::zeros();
    for i in 0..3 {
        for j in 0..3 {
            m[(i, j)] = z[(i, j)];
        }
        m[(i, 3)] = u[i];
    }
    let e = expm(&m);
    let mut exp_z = Mat3::zeros();
    let mut w = Vec3::zeros();
    for i in 0..3 {
        for j in 0..3 {
            exp_z[(i, j)] = e[(i, j)];
        }
        w[i] = e[(i, 3)];
    }
    (exp_z, w)
}

/// φ₁(Z) = Z⁻¹(e^Z − I), extended to singular Z by the series
/// Σ Z^j / (j+1)!.
pub fn phi1(z: &Mat3) -> Mat3 {
    phi_matrix(z, 1)
}

/// φ₂(Z) = Z⁻¹(φ₁(Z) − I), extended to singular Z by the series
/// Σ Z^j / (j+2)!.
pub fn phi2(z: &Mat3) -> Mat3 {
    phi_matrix(z, 2)
}

fn phi_matrix(z: &Mat3, which: u32) -> Mat3 {
    if inf_norm(z) < PHI_TAYLOR_NORM {
        return phi_series(z, which);
    }
    let mut out = Mat3::zeros();
    for j in 0..3 {
        let mut e = Vec3::zeros();
        e[j] = 1.0;
        let (u, v) = if which == 1 {
            (e, Vec3::zeros())
        } else {
            (Vec3::zeros(), e)
        };
        let (_, col) = expm_phi12_apply(z, &u, &v);
        out.set_column(j, &col);
    }
    out
}

fn phi_series(z: &Mat3, shift: u32) -> Mat3 {
    let fac0: f64 = (1..=shift).map(f64::from).product();
    let mut term = Mat3::identity() / fac0;
    let mut sum = term;
    for j in 1..=10u32 {
        term = term * z / f64::from(j + shift);
        sum += term;
        if inf_norm(&term) <= 1e-17 * inf_norm(&sum) {
            break;
        }
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rotations::{hat, so3_exp};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_2;

    fn random_mat3(rng: &mut impl Rng, scale: f64) -> Mat3 {
        Mat3::from_fn(|_, _| rng.gen_range(-scale..scale))
    }

    #[test]
    fn elliptic_k_values() {
        assert_relative_eq!(elliptic_k(0.0).unwrap(), FRAC_PI_2, epsilon = 1e-15);
        assert_relative_eq!(
            elliptic_k(0.5).unwrap(),
            1.685750354812596,
            epsilon = 1e-14
        );
        assert_relative_eq!(
            elliptic_k(0.9).unwrap(),
            2.2805491384227703,
            epsilon = 1e-13
        );
        assert!(elliptic_k(1.0).is_err());
        assert!(elliptic_k(1.0 - 1e-13).is_err());
        assert!(elliptic_k(-0.1).is_err());
    }

    #[test]
    fn elliptic_k_matches_agm_oracle() {
        // independent AGM fixed-point iteration
        for &k in &[0.1f64, 0.3, 0.5, 0.7, 0.9, 0.99] {
            let (mut a, mut b) = (1.0f64, (1.0 - k * k).sqrt());
            while (a - b).abs() > f64::EPSILON * a {
                let (an, bn) = (0.5 * (a + b), (a * b).sqrt());
                a = an;
                b = bn;
            }
            let oracle = FRAC_PI_2 / a;
            assert_relative_eq!(elliptic_k(k).unwrap(), oracle, max_relative = 1e-15);
        }
    }

    #[test]
    fn jacobi_degenerate_moduli() {
        let t = jacobi_sn_cn_dn(0.0, 0.37).unwrap();
        assert_eq!((t.sn, t.cn, t.dn), (0.0, 1.0, 1.0));

        for &u in &[-2.0, -0.3, 0.0, 0.8, 3.7] {
            let t0 = jacobi_sn_cn_dn(u, 0.0).unwrap();
            assert_relative_eq!(t0.sn, u.sin(), epsilon = 1e-15);
            assert_relative_eq!(t0.cn, u.cos(), epsilon = 1e-15);
            assert_eq!(t0.dn, 1.0);

            let t1 = jacobi_sn_cn_dn(u, 1.0).unwrap();
            assert_relative_eq!(t1.sn, u.tanh(), epsilon = 1e-15);
            assert_relative_eq!(t1.cn, 1.0 / u.cosh(), epsilon = 1e-15);
            assert_relative_eq!(t1.dn, 1.0 / u.cosh(), epsilon = 1e-15);
        }
        assert!(jacobi_sn_cn_dn(0.3, 1.1).is_err());
    }

    #[test]
    fn jacobi_reference_value() {
        let t = jacobi_sn_cn_dn(0.7, 0.6).unwrap();
        assert_relative_eq!(t.sn, 0.6299171153234867, epsilon = 1e-14);
        assert_relative_eq!(t.cn, 0.7766623641084568, epsilon = 1e-14);
        assert_relative_eq!(t.dn, 0.9258258983286833, epsilon = 1e-14);
    }

    #[test]
    fn jacobi_identities_over_grid() {
        for i in 0..=10 {
            let k = if i == 10 { 1.0 } else { 0.1 * i as f64 }.min(1.0);
            let k = if i == 9 { 0.99 } else { k };
            let span = if k < 1.0 {
                4.0 * elliptic_k(k.min(0.999)).unwrap_or(10.0)
            } else {
                10.0
            };
            for j in -8..=8 {
                let u = span * j as f64 / 8.0;
                let t = jacobi_sn_cn_dn(u, k).unwrap();
                assert!(
                    (t.sn * t.sn + t.cn * t.cn - 1.0).abs() < 1e-13,
                    "sn²+cn² at u={u}, k={k}"
                );
                assert!(
                    (t.dn * t.dn + k * k * t.sn * t.sn - 1.0).abs() < 1e-13,
                    "dn²+k²sn² at u={u}, k={k}"
                );
            }
        }
    }

    #[test]
    fn jacobi_periodicity() {
        for &k in &[0.1, 0.5, 0.9, 0.99] {
            let period = 4.0 * elliptic_k(k).unwrap();
            for &u in &[-1.3, 0.0, 0.4, 2.9] {
                let a = jacobi_sn_cn_dn(u, k).unwrap();
                let b = jacobi_sn_cn_dn(u + period, k).unwrap();
                assert_relative_eq!(a.sn, b.sn, epsilon = 1e-11);
                assert_relative_eq!(a.cn, b.cn, epsilon = 1e-11);
                assert_relative_eq!(a.dn, b.dn, epsilon = 1e-11);
            }
        }
    }

    #[test]
    fn jacobi_addition_theorem_consistency() {
        // one call at u agrees with the addition theorem applied at u/2
        for &k in &[0.2, 0.6, 0.95] {
            for &u in &[-2.1, 0.7, 1.9, 4.2] {
                let h = jacobi_sn_cn_dn(0.5 * u, k).unwrap();
                let denom = 1.0 - (k * h.sn * h.sn) * (k * h.sn * h.sn);
                let sn = 2.0 * h.sn * h.cn * h.dn / denom;
                let cn = (h.cn * h.cn - h.sn * h.sn * h.dn * h.dn) / denom;
                let dn = (h.dn * h.dn - k * k * h.sn * h.sn * h.cn * h.cn) / denom;
                let t = jacobi_sn_cn_dn(u, k).unwrap();
                assert_relative_eq!(t.sn, sn, epsilon = 1e-10);
                assert_relative_eq!(t.cn, cn, epsilon = 1e-10);
                assert_relative_eq!(t.dn, dn, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn elliptic_f_values_and_inversion() {
        assert_relative_eq!(
            elliptic_f(0.5, 0.3).unwrap(),
            0.5018005151249181,
            epsilon = 1e-14
        );
        for &phi in &[-0.9, 0.0, 0.4, 1.2] {
            assert_relative_eq!(elliptic_f(phi, 0.0).unwrap(), phi, epsilon = 1e-14);
        }
        // jacobi inverts F: sn(F(φ, k), k) = sin φ
        for &k in &[0.2, 0.7, 0.95] {
            for &phi in &[-1.2, -0.3, 0.6, 1.4, 2.2, 2.9] {
                let u = elliptic_f(phi, k).unwrap();
                let t = jacobi_sn_cn_dn(u, k).unwrap();
                assert_relative_eq!(t.sn, phi.sin(), epsilon = 1e-12);
                assert_relative_eq!(t.cn, phi.cos(), epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn expm3_basics() {
        assert_eq!(expm3(&Mat3::zeros()), Mat3::identity());
        let d = Mat3::from_diagonal(&Vec3::new(0.3, -1.7, 2.2));
        let e = expm3(&d);
        for (i, &x) in [0.3f64, -1.7, 2.2].iter().enumerate() {
            assert_relative_eq!(e[(i, i)], x.exp(), max_relative = 1e-14);
        }
        // against the Rodrigues formula on so(3)
        let w = Vec3::new(0.4, -1.1, 0.8);
        assert_relative_eq!(expm3(&hat(&w)), so3_exp(&w), epsilon = 1e-13);
    }

    #[test]
    fn expm3_inverse_and_semigroup() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let z = random_mat3(&mut rng, 2.0);
            let prod = expm3(&z) * expm3(&(-z));
            assert_relative_eq!(prod, Mat3::identity(), epsilon = 1e-12);
            let (s, t) = (rng.gen_range(0.1..1.0), rng.gen_range(0.1..1.0));
            let lhs = expm3(&((s + t) * z));
            let rhs = expm3(&(s * z)) * expm3(&(t * z));
            assert_relative_eq!(lhs, rhs, max_relative = 1e-11, epsilon = 1e-11);
        }
    }

    #[test]
    fn phi_at_zero_and_scalar_case() {
        assert_relative_eq!(phi1(&Mat3::zeros()), Mat3::identity(), epsilon = 1e-16);
        assert_relative_eq!(
            phi2(&Mat3::zeros()),
            0.5 * Mat3::identity(),
            epsilon = 1e-16
        );
        let z = Mat3::identity();
        let e = std::f64::consts::E;
        assert_relative_eq!(phi1(&z)[(0, 0)], e - 1.0, epsilon = 1e-14);
        assert_relative_eq!(phi2(&z)[(1, 1)], e - 2.0, epsilon = 1e-14);
    }

    #[test]
    fn phi_recurrences_including_singular() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut cases: Vec<Mat3> = (0..10).map(|_| random_mat3(&mut rng, 2.0)).collect();
        // exactly singular matrices: nilpotent shift and random rank-one
        cases.push(Mat3::new(0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0));
        let a = Vec3::new(1.0, -2.0, 0.5);
        let b = Vec3::new(0.3, 0.0, -1.1);
        cases.push(a * b.transpose());
        cases.push(random_mat3(&mut rng, 5e-3)); // series branch
        for z in cases {
            let p1 = phi1(&z);
            let p2 = phi2(&z);
            assert_relative_eq!(
                expm3(&z),
                Mat3::identity() + z * p1,
                epsilon = 1e-12,
                max_relative = 1e-12
            );
            assert_relative_eq!(
                p1,
                Mat3::identity() + z * p2,
                epsilon = 1e-12,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn phi_matches_quadrature_of_defining_integral() {
        // composite Simpson on ∫₀¹ e^{Z(1-x)} x^{j-1}/(j-1)! dx
        let quad = |z: &Mat3, j: u32| {
            let n = 2000usize;
            let h = 1.0 / n as f64;
            let f = |x: f64| {
                let w = if j == 1 { 1.0 } else { x };
                expm3(&((1.0 - x) * z)) * w
            };
            let mut acc = f(0.0) + f(1.0);
            for i in 1..n {
                let x = i as f64 * h;
                acc += f(x) * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            acc * (h / 3.0)
        };
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let z = random_mat3(&mut rng, 5.0 / 3.0); // ‖Z‖∞ ≈ 5
        assert_relative_eq!(phi1(&z), quad(&z, 1), epsilon = 1e-10, max_relative = 1e-10);
        assert_relative_eq!(phi2(&z), quad(&z, 2), epsilon = 1e-10, max_relative = 1e-10);
    }

    #[test]
    fn augmented_apply_matches_matrix_phis() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..10 {
            let z = random_mat3(&mut rng, 1.5);
            let u = Vec3::new(rng.gen(), rng.gen(), rng.gen());
            let v = Vec3::new(rng.gen(), rng.gen(), rng.gen());
            let (e, w) = expm_phi12_apply(&z, &u, &v);
            assert_relative_eq!(e, expm3(&z), epsilon = 1e-13);
            assert_relative_eq!(
                w,
                phi1(&z) * u + phi2(&z) * v,
                epsilon = 1e-12,
                max_relative = 1e-12
            );
            let (e1, w1) = expm_phi1_apply(&z, &u);
            assert_relative_eq!(e1, expm3(&z), epsilon = 1e-13);
            assert_relative_eq!(w1, phi1(&z) * u, epsilon = 1e-12, max_relative = 1e-12);
        }
    }
}
