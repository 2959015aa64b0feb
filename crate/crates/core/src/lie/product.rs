use super::so3::{dexpinv_so3, exp_so3};
use super::{Formulation, Pose, Twist, Vec3};
use crate::Result;

/// Exponential on SO(3)×ℝ³: `(exp ω̂, v)`.
pub fn exp_dp(x: &Twist) -> Pose {
    Pose::new(exp_so3(&x.w), x.v, Formulation::DirectProduct)
}

/// Lie bracket on so(3)×ℝ³: `(ω₁×ω₂, 0)`.
pub fn bracket_dp(x1: &Twist, x2: &Twist) -> Twist {
    Twist::new(x1.w.cross(&x2.w), Vec3::zeros())
}

/// `(dexp⁻¹_ξ η, v)`: the translational part passes through.
pub fn dexpinv_dp(x: &Twist, y: &Twist) -> Result<Twist> {
    Ok(Twist::new(dexpinv_so3(&x.w, &y.w)?, y.v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn exp_passes_translation_through() {
        let v = Vec3::new(1.0, 0.0, 0.0);
        let c = exp_dp(&Twist::new(Vec3::new(0.0, 0.0, FRAC_PI_2), v));
        assert_eq!(c.pos, v);
        assert_eq!(c.formulation, Formulation::DirectProduct);
        assert_eq!(c.rot, exp_so3(&Vec3::new(0.0, 0.0, FRAC_PI_2)));
        assert_eq!(exp_dp(&Twist::new(Vec3::zeros(), v)).pos, v);
    }

    #[test]
    fn bracket_examples() {
        let x = Twist::new(Vec3::x(), Vec3::repeat(5.0));
        let y = Twist::new(Vec3::y(), Vec3::repeat(7.0));
        assert_eq!(bracket_dp(&x, &y), Twist::new(Vec3::z(), Vec3::zeros()));
        assert_eq!(bracket_dp(&x, &x), Twist::zero());
    }

    #[test]
    fn dexpinv_at_zero() {
        let y = Twist::new(Vec3::new(1.0, 2.0, 3.0), Vec3::new(4.0, 5.0, 6.0));
        assert_eq!(dexpinv_dp(&Twist::zero(), &y).unwrap(), y);
    }

    proptest! {
        #[test]
        fn delegates_to_so3(a in prop::array::uniform6(-1.5f64..1.5), b in prop::array::uniform6(-3.0f64..3.0)) {
            let x = Twist::new(Vec3::new(a[0], a[1], a[2]), Vec3::new(a[3], a[4], a[5]));
            let y = Twist::new(Vec3::new(b[0], b[1], b[2]), Vec3::new(b[3], b[4], b[5]));
            let out = dexpinv_dp(&x, &y).unwrap();
            prop_assert_eq!(out.v, y.v);
            prop_assert_eq!(out.w, dexpinv_so3(&x.w, &y.w).unwrap());
            prop_assert_eq!(exp_dp(&x).rot, exp_so3(&x.w));
            prop_assert_eq!(bracket_dp(&x, &y).v, Vec3::zeros());
        }
    }
}
