use std::f64::consts::PI;

use super::{Mat3, Rotation, Vec3, DEXP_MARGIN, SMALL_ANGLE};
use crate::{Error, Result};

/// Skew-symmetric cross-product matrix: `hat3(w) · u = w × u`.
pub fn hat3(w: &Vec3) -> Mat3 {
    Mat3::new(0.0, -w.z, w.y, w.z, 0.0, -w.x, -w.y, w.x, 0.0)
}

/// Inverse of [`hat3`] on the skew part of `m`.
pub fn vee3(m: &Mat3) -> Vec3 {
    Vec3::new(
        0.5 * (m[(2, 1)] - m[(1, 2)]),
        0.5 * (m[(0, 2)] - m[(2, 0)]),
        0.5 * (m[(1, 0)] - m[(0, 1)]),
    )
}

/// Rodrigues coefficients `(sin θ / θ, (1 − cos θ) / θ²)`.
pub(super) fn rodrigues_coefficients(theta: f64) -> (f64, f64) {
    if theta < SMALL_ANGLE {
        rodrigues_series(theta)
    } else {
        rodrigues_closed(theta)
    }
}

fn rodrigues_series(theta: f64) -> (f64, f64) {
    let t2 = theta * theta;
    (
        1.0 - t2 / 6.0 + t2 * t2 / 120.0,
        0.5 - t2 / 24.0 + t2 * t2 / 720.0,
    )
}

// 1 − cos θ = 2 sin²(θ/2) avoids cancellation.
fn rodrigues_closed(theta: f64) -> (f64, f64) {
    let s = (0.5 * theta).sin() / theta;
    (theta.sin() / theta, 2.0 * s * s)
}

/// Exponential map on SO(3): `I + (sin θ/θ) ŵ + ((1 − cos θ)/θ²) ŵ²`.
pub fn exp_so3(w: &Vec3) -> Rotation {
    let (a, b) = rodrigues_coefficients(w.norm());
    let wh = hat3(w);
    Rotation::from_matrix_unchecked(Mat3::identity() + wh * a + wh * wh * b)
}

/// Principal logarithm, angle in `[0, π)`.
pub fn log_so3(r: &Rotation) -> Result<Vec3> {
    let m = r.matrix();
    let tr = m.trace();
    if tr <= -1.0 + 1e-12 {
        return Err(Error::domain("log_so3", "rotation angle is π"));
    }
    let skew = vee3(m);
    let sin_theta = skew.norm();
    let cos_theta = 0.5 * (tr - 1.0);
    let theta = sin_theta.atan2(cos_theta);

    if theta < SMALL_ANGLE {
        // θ/sin θ ≈ 1 + θ²/6
        return Ok(skew * (1.0 + theta * theta / 6.0));
    }
    if theta < PI - 1e-3 {
        return Ok(skew * (theta / sin_theta));
    }

    // Near π the skew part carries little information; recover the axis
    // from the symmetric part nnᵀ = ((R + Rᵀ)/2 − cos θ I) / (1 − cos θ).
    let sym = (m + m.transpose()) * 0.5 - Mat3::identity() * cos_theta;
    let sym = sym / (1.0 - cos_theta);
    let k = (0..3)
        .max_by(|&i, &j| sym[(i, i)].total_cmp(&sym[(j, j)]))
        .unwrap_or(0);
    let mut axis: Vec3 = sym.column(k).into();
    axis /= axis.norm();
    if axis.dot(&skew) < 0.0 {
        axis = -axis;
    }
    Ok(axis * theta)
}

/// `(1 − (θ/2) cot(θ/2)) / θ²`
fn dexpinv_so3_coefficient(theta: f64) -> f64 {
    if theta < SMALL_ANGLE {
        dexpinv_so3_coefficient_series(theta)
    } else {
        dexpinv_so3_coefficient_closed(theta)
    }
}

fn dexpinv_so3_coefficient_series(theta: f64) -> f64 {
    let t2 = theta * theta;
    1.0 / 12.0 + t2 / 720.0 + t2 * t2 / 30240.0
}

fn dexpinv_so3_coefficient_closed(theta: f64) -> f64 {
    let half = 0.5 * theta;
    (1.0 - half * half.cos() / half.sin()) / (theta * theta)
}

pub(super) fn check_dexp_domain(op: &'static str, theta: f64) -> Result<()> {
    if !theta.is_finite() || theta >= 2.0 * PI - DEXP_MARGIN {
        return Err(Error::domain(
            op,
            format!("rotation magnitude {theta} is at or beyond the 2π singularity"),
        ));
    }
    Ok(())
}

/// Matrix `I − ½ξ̂ + (1 − (‖ξ‖/2) cot(‖ξ‖/2)) ξ̂² / ‖ξ‖²`.
pub fn dexpinv_so3_matrix(xi: &Vec3) -> Result<Mat3> {
    let theta = xi.norm();
    check_dexp_domain("dexpinv_so3", theta)?;
    let xh = hat3(xi);
    Ok(Mat3::identity() - xh * 0.5 + xh * xh * dexpinv_so3_coefficient(theta))
}

/// `dexp⁻¹_ξ η` on so(3).
pub fn dexpinv_so3(xi: &Vec3, eta: &Vec3) -> Result<Vec3> {
    let theta = xi.norm();
    check_dexp_domain("dexpinv_so3", theta)?;
    let c1 = xi.cross(eta);
    let c2 = xi.cross(&c1);
    Ok(eta - c1 * 0.5 + c2 * dexpinv_so3_coefficient(theta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{dexp_series, exp_series};
    use nalgebra::DMatrix;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn to_dyn(m: &Mat3) -> DMatrix<f64> {
        DMatrix::from_column_slice(3, 3, m.as_slice())
    }

    #[test]
    fn hat_of_zero_and_unit_x() {
        assert_eq!(hat3(&Vec3::zeros()), Mat3::zeros());
        assert_eq!(
            hat3(&Vec3::x()),
            Mat3::new(0.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0)
        );
    }

    #[test]
    fn exp_of_zero_and_quarter_turn() {
        assert_eq!(*exp_so3(&Vec3::zeros()).matrix(), Mat3::identity());
        let r = exp_so3(&Vec3::new(FRAC_PI_2, 0.0, 0.0));
        let expected = Mat3::new(1.0, 0.0, 0.0, 0.0, 0.0, -1.0, 0.0, 1.0, 0.0);
        assert!((r.matrix() - expected).abs().max() < 1e-15);
    }

    #[test]
    fn log_of_identity_is_zero() {
        assert_eq!(log_so3(&Rotation::identity()).unwrap(), Vec3::zeros());
    }

    #[test]
    fn log_round_trip() {
        let w = Vec3::new(0.3, -0.2, 0.1);
        assert!((log_so3(&exp_so3(&w)).unwrap() - w).norm() < 1e-12);
    }

    #[test]
    fn log_near_branch_cut() {
        let w = Vec3::new(0.0, 0.0, PI - 1e-6);
        let back = log_so3(&exp_so3(&w)).unwrap();
        assert!((back - w).norm() < 1e-6, "{back:?}");
        let w = Vec3::new(1.0, -2.0, 0.5).normalize() * (PI - 1e-4);
        assert!((log_so3(&exp_so3(&w)).unwrap() - w).norm() < 1e-8);
    }

    #[test]
    fn log_rejects_half_turn() {
        let r = exp_so3(&Vec3::new(PI, 0.0, 0.0));
        assert!(matches!(log_so3(&r), Err(Error::Domain { .. })));
    }

    #[test]
    fn dexpinv_at_zero_is_identity() {
        let eta = Vec3::new(0.4, -1.0, 2.0);
        assert_eq!(dexpinv_so3(&Vec3::zeros(), &eta).unwrap(), eta);
    }

    #[test]
    fn dexpinv_quarter_turn_against_series_inverse() {
        let xi = Vec3::new(FRAC_PI_2, 0.0, 0.0);
        let eta = Vec3::new(0.0, 1.0, 0.0);
        let series = dexp_series(&to_dyn(&hat3(&xi)), 40);
        let expected = series.lu().solve(&DMatrix::from_column_slice(3, 1, eta.as_slice())).unwrap();
        let got = dexpinv_so3(&xi, &eta).unwrap();
        for i in 0..3 {
            assert!((got[i] - expected[i]).abs() < 1e-13, "{got:?} vs {expected}");
        }
        assert_eq!(got.x, 0.0);
    }

    #[test]
    fn dexpinv_rejects_two_pi() {
        let xi = Vec3::new(0.0, 2.0 * PI, 0.0);
        assert!(matches!(
            dexpinv_so3(&xi, &Vec3::x()),
            Err(Error::Domain { .. })
        ));
        assert!(dexpinv_so3(&Vec3::new(0.0, 2.0 * PI - 1e-3, 0.0), &Vec3::x()).is_ok());
    }

    #[test]
    fn branches_agree_at_small_angle_threshold() {
        let axis = Vec3::new(0.3, -0.5, 0.8).normalize();
        let eta = Vec3::new(1.0, 2.0, -3.0);
        for t in [SMALL_ANGLE * (1.0 - 1e-3), SMALL_ANGLE * (1.0 + 1e-3)] {
            let w = axis * t;
            let wh = hat3(&w);
            let rot = |(a, b): (f64, f64)| Mat3::identity() + wh * a + wh * wh * b;
            let diff = rot(rodrigues_series(t)) - rot(rodrigues_closed(t));
            assert!(diff.abs().max() < 1e-12);

            let apply = |k: f64| eta - w.cross(&eta) * 0.5 + w.cross(&w.cross(&eta)) * k;
            let d_series = apply(dexpinv_so3_coefficient_series(t));
            let d_closed = apply(dexpinv_so3_coefficient_closed(t));
            assert!((d_series - d_closed).norm() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn hat_is_cross_product(w in prop::array::uniform3(-5.0f64..5.0), u in prop::array::uniform3(-5.0f64..5.0)) {
            let (w, u) = (Vec3::from(w), Vec3::from(u));
            prop_assert!((hat3(&w) * u - w.cross(&u)).norm() < 1e-13);
            let h = hat3(&w);
            prop_assert_eq!(h, -h.transpose());
        }

        #[test]
        fn exp_is_orthonormal(w in prop::array::uniform3(-5.7f64..5.7)) {
            let w = Vec3::from(w);
            prop_assume!(w.norm() <= 10.0);
            let r = exp_so3(&w);
            prop_assert!(r.orthonormality_error() < 1e-13);
            prop_assert!((r.matrix().determinant() - 1.0).abs() < 1e-13);
        }

        #[test]
        fn exp_matches_matrix_series(w in prop::array::uniform3(-1.8f64..1.8)) {
            let w = Vec3::from(w);
            prop_assume!(w.norm() <= PI);
            let series = exp_series(&to_dyn(&hat3(&w)), 30);
            let closed = to_dyn(exp_so3(&w).matrix());
            prop_assert!((series - closed).abs().max() < 1e-13);
        }

        #[test]
        fn dexpinv_inverts_series_dexp(xi in prop::array::uniform3(-1.15f64..1.15), eta in prop::array::uniform3(-3.0f64..3.0)) {
            let (xi, eta) = (Vec3::from(xi), Vec3::from(eta));
            prop_assume!(xi.norm() <= 2.0);
            let d = dexp_series(&to_dyn(&hat3(&xi)), 40);
            let inv = to_dyn(&dexpinv_so3_matrix(&xi).unwrap());
            prop_assert!((d * inv - DMatrix::identity(3, 3)).abs().max() < 1e-10);
            let applied = dexpinv_so3(&xi, &eta).unwrap();
            prop_assert!((applied - dexpinv_so3_matrix(&xi).unwrap() * eta).norm() < 1e-13);
        }
    }
}
