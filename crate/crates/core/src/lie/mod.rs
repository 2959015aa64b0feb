//! Rigid-body configuration groups.
//!
//! A [`Pose`] is a pair `(R, r)` that lives either in SE(3), where composition
//! is the frame transformation `(R_a R_b, r_a + R_a r_b)`, or in the direct
//! product SO(3)×ℝ³, where rotations and translations compose independently
//! `(R_a R_b, r_a + r_b)`. Which group a pose belongs to is a runtime tag so
//! that one mechanism description can be integrated under both.
//!
//! Twists are ordered `(ω, v)` everywhere. For SE(3) poses the pair is a
//! body-fixed twist; for direct-product poses it is the hybrid velocity
//! (body-fixed ω, spatial ṙ).
//!
//! dexp convention: `dexp_X = Σ_k ad_X^k / (k+1)!`. With this sign the
//! closed-form inverses implemented here are exact inverses of the series
//! (see the `oracle` module tests).

mod product;
mod se3;
mod so3;

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use nalgebra::{Matrix3, Matrix6, Vector3, Vector6};

pub use product::{bracket_dp, dexpinv_dp, exp_dp};
pub use se3::{ad_se3, bracket_se3, dexpinv_se3, dexpinv_se3_matrix, exp_se3, screw_pitch};
pub use so3::{dexpinv_so3, dexpinv_so3_matrix, exp_so3, hat3, log_so3, vee3};

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;
pub type Vec6 = Vector6<f64>;
pub type Mat6 = Matrix6<f64>;

/// Below this rotation angle (rad) the closed forms switch to Taylor expansions.
pub const SMALL_ANGLE: f64 = 1e-4;

/// The dexp⁻¹ maps are rejected for `‖ω‖ ≥ 2π − DEXP_MARGIN`.
pub const DEXP_MARGIN: f64 = 1e-6;

/// Which configuration group a pose is an element of.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Formulation {
    /// SE(3), body-fixed twists.
    Se3,
    /// SO(3)×ℝ³, hybrid velocities.
    DirectProduct,
}

impl Formulation {
    pub const ALL: [Formulation; 2] = [Formulation::Se3, Formulation::DirectProduct];

    pub fn name(self) -> &'static str {
        match self {
            Formulation::Se3 => "se3",
            Formulation::DirectProduct => "so3xr3",
        }
    }
}

impl fmt::Display for Formulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Formulation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "se3" => Ok(Formulation::Se3),
            "so3xr3" | "so3r3" | "dp" | "direct" => Ok(Formulation::DirectProduct),
            other => Err(format!("unknown formulation `{other}` (expected se3 or so3xr3)")),
        }
    }
}

/// Element of SO(3). Orthonormality is never re-imposed after construction;
/// drift is observable through [`Rotation::orthonormality_error`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation(Mat3);

impl Rotation {
    pub fn identity() -> Self {
        Rotation(Mat3::identity())
    }

    /// Wraps a matrix without projecting it onto SO(3).
    pub fn from_matrix_unchecked(m: Mat3) -> Self {
        Rotation(m)
    }

    pub fn matrix(&self) -> &Mat3 {
        &self.0
    }

    pub fn transpose(&self) -> Self {
        Rotation(self.0.transpose())
    }

    pub fn apply(&self, x: &Vec3) -> Vec3 {
        self.0 * x
    }

    pub fn apply_inverse(&self, x: &Vec3) -> Vec3 {
        self.0.tr_mul(x)
    }

    /// `max |RᵀR − I|`.
    pub fn orthonormality_error(&self) -> f64 {
        (self.0.tr_mul(&self.0) - Mat3::identity()).abs().max()
    }
}

impl Mul for Rotation {
    type Output = Rotation;

    fn mul(self, rhs: Rotation) -> Rotation {
        Rotation(self.0 * rhs.0)
    }
}

/// Rigid-body configuration `C = (R, r)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pose {
    pub rot: Rotation,
    pub pos: Vec3,
    pub formulation: Formulation,
}

impl Pose {
    pub fn new(rot: Rotation, pos: Vec3, formulation: Formulation) -> Self {
        Pose {
            rot,
            pos,
            formulation,
        }
    }

    pub fn identity(formulation: Formulation) -> Self {
        Pose::new(Rotation::identity(), Vec3::zeros(), formulation)
    }

    /// Group product `self · other`.
    ///
    /// Panics if the two poses carry different formulation tags.
    pub fn compose(&self, other: &Pose) -> Pose {
        assert_eq!(
            self.formulation, other.formulation,
            "composition of poses from different groups"
        );
        let pos = match self.formulation {
            Formulation::Se3 => self.pos + self.rot.apply(&other.pos),
            Formulation::DirectProduct => self.pos + other.pos,
        };
        Pose::new(self.rot * other.rot, pos, self.formulation)
    }

    pub fn inverse(&self) -> Pose {
        let rt = self.rot.transpose();
        let pos = match self.formulation {
            Formulation::Se3 => -rt.apply(&self.pos),
            Formulation::DirectProduct => -self.pos,
        };
        Pose::new(rt, pos, self.formulation)
    }

    /// Homogeneous 4×4 matrix `[[R, r], [0, 1]]`.
    pub fn to_homogeneous(&self) -> nalgebra::Matrix4<f64> {
        let mut m = nalgebra::Matrix4::identity();
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(self.rot.matrix());
        m.fixed_view_mut::<3, 1>(0, 3).copy_from(&self.pos);
        m
    }

    /// Same `(R, r)` reinterpreted as an element of the other group.
    pub fn with_formulation(&self, formulation: Formulation) -> Pose {
        Pose::new(self.rot, self.pos, formulation)
    }
}

/// Group product of two poses, see [`Pose::compose`].
pub fn compose(a: &Pose, b: &Pose) -> Pose {
    a.compose(b)
}

pub fn inverse(a: &Pose) -> Pose {
    a.inverse()
}

/// Six-vector `(ω, v)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Twist {
    pub w: Vec3,
    pub v: Vec3,
}

impl Twist {
    pub fn new(w: Vec3, v: Vec3) -> Self {
        Twist { w, v }
    }

    pub fn zero() -> Self {
        Twist::default()
    }

    pub fn from_vec6(x: &Vec6) -> Self {
        Twist::new(x.fixed_rows::<3>(0).into(), x.fixed_rows::<3>(3).into())
    }

    pub fn to_vec6(&self) -> Vec6 {
        Vec6::new(self.w.x, self.w.y, self.w.z, self.v.x, self.v.y, self.v.z)
    }

    pub fn norm(&self) -> f64 {
        (self.w.norm_squared() + self.v.norm_squared()).sqrt()
    }
}

impl Add for Twist {
    type Output = Twist;
    fn add(self, rhs: Twist) -> Twist {
        Twist::new(self.w + rhs.w, self.v + rhs.v)
    }
}

impl AddAssign for Twist {
    fn add_assign(&mut self, rhs: Twist) {
        self.w += rhs.w;
        self.v += rhs.v;
    }
}

impl Sub for Twist {
    type Output = Twist;
    fn sub(self, rhs: Twist) -> Twist {
        Twist::new(self.w - rhs.w, self.v - rhs.v)
    }
}

impl Neg for Twist {
    type Output = Twist;
    fn neg(self) -> Twist {
        Twist::new(-self.w, -self.v)
    }
}

impl Mul<f64> for Twist {
    type Output = Twist;
    fn mul(self, s: f64) -> Twist {
        Twist::new(self.w * s, self.v * s)
    }
}

/// Exponential of the configuration group selected by `formulation`.
pub fn exp(x: &Twist, formulation: Formulation) -> Pose {
    match formulation {
        Formulation::Se3 => exp_se3(x),
        Formulation::DirectProduct => exp_dp(x),
    }
}

/// dexp⁻¹ of the configuration group selected by `formulation`.
pub fn dexpinv(x: &Twist, y: &Twist, formulation: Formulation) -> crate::Result<Twist> {
    match formulation {
        Formulation::Se3 => dexpinv_se3(x, y),
        Formulation::DirectProduct => dexpinv_dp(x, y),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn rz90() -> Rotation {
        exp_so3(&Vec3::new(0.0, 0.0, FRAC_PI_2))
    }

    #[test]
    fn identity_is_neutral() {
        for f in Formulation::ALL {
            let c = Pose::new(rz90(), Vec3::new(1.0, -2.0, 0.5), f);
            let id = Pose::identity(f);
            assert_eq!(id.compose(&c), c);
            assert_eq!(c.compose(&id), c);
        }
    }

    #[test]
    fn quarter_turn_composition() {
        let a = |f| Pose::new(rz90(), Vec3::new(1.0, 0.0, 0.0), f);
        let b = |f| Pose::new(Rotation::identity(), Vec3::new(1.0, 0.0, 0.0), f);

        let se3 = a(Formulation::Se3).compose(&b(Formulation::Se3));
        assert!((se3.pos - Vec3::new(1.0, 1.0, 0.0)).norm() < 1e-15);
        assert!((se3.rot.matrix() - rz90().matrix()).norm() < 1e-15);

        let dp = a(Formulation::DirectProduct).compose(&b(Formulation::DirectProduct));
        assert!((dp.pos - Vec3::new(2.0, 0.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn direct_product_inverse_negates_translation() {
        let c = Pose::new(rz90(), Vec3::new(1.0, 2.0, 3.0), Formulation::DirectProduct);
        let inv = c.inverse();
        assert_eq!(inv.pos, Vec3::new(-1.0, -2.0, -3.0));
        assert_eq!(inv.rot, rz90().transpose());
        assert_eq!(
            Pose::identity(Formulation::Se3).inverse(),
            Pose::identity(Formulation::Se3)
        );
    }

    #[test]
    fn se3_inverse_composes_to_identity() {
        let c = exp_se3(&Twist::new(Vec3::new(0.3, -1.1, 0.7), Vec3::new(2.0, 0.1, -0.4)));
        let e = c.compose(&c.inverse());
        assert!((e.rot.matrix() - Mat3::identity()).abs().max() < 1e-12);
        assert!(e.pos.norm() < 1e-12);
    }

    #[test]
    #[should_panic(expected = "different groups")]
    fn mixed_formulation_composition_panics() {
        let _ = Pose::identity(Formulation::Se3).compose(&Pose::identity(Formulation::DirectProduct));
    }

    #[test]
    fn formulation_names_round_trip() {
        for f in Formulation::ALL {
            assert_eq!(f.name().parse::<Formulation>().unwrap(), f);
        }
        assert!("se2".parse::<Formulation>().is_err());
    }
}
