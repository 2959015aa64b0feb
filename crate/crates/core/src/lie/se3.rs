use super::so3::{check_dexp_domain, exp_so3, hat3, rodrigues_coefficients};
use super::{Formulation, Mat6, Pose, Twist, SMALL_ANGLE};
use crate::{Error, Result};

/// Exponential map on SE(3).
///
/// Rotation `exp ω̂`; translation `(1/‖ω‖²)(I − exp ω̂)(ω × v) + h ω` with the
/// pitch `h = ω·v/‖ω‖²`. `I − exp ω̂` is expanded as `−(a ω̂ + b ω̂²)` using the
/// Rodrigues coefficients so no matrix subtraction is needed.
pub fn exp_se3(x: &Twist) -> Pose {
    let w = &x.w;
    let v = &x.v;
    let theta = w.norm();
    let rot = exp_so3(w);
    let pos = if theta < SMALL_ANGLE {
        // V(ω) v with V = I + b ω̂ + c ω̂², Taylor to O(θ⁴)
        let t2 = theta * theta;
        let b = 0.5 - t2 / 24.0 + t2 * t2 / 720.0;
        let c = 1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0;
        let wv = w.cross(v);
        v + wv * b + w.cross(&wv) * c
    } else {
        let (a, b) = rodrigues_coefficients(theta);
        let t2 = theta * theta;
        let u = w.cross(v);
        let wu = w.cross(&u);
        let i_minus_r_u = -(wu * a + w.cross(&wu) * b);
        let pitch = w.dot(v) / t2;
        i_minus_r_u / t2 + w * pitch
    };
    Pose::new(rot, pos, Formulation::Se3)
}

/// Screw product `[X₁, X₂] = (ω₁×ω₂, ω₁×v₂ − ω₂×v₁)`.
pub fn bracket_se3(x1: &Twist, x2: &Twist) -> Twist {
    Twist::new(x1.w.cross(&x2.w), x1.w.cross(&x2.v) - x2.w.cross(&x1.v))
}

/// `ad_X = [[ω̂, 0], [v̂, ω̂]]`.
pub fn ad_se3(x: &Twist) -> Mat6 {
    let wh = hat3(&x.w);
    let vh = hat3(&x.v);
    let mut m = Mat6::zeros();
    m.fixed_view_mut::<3, 3>(0, 0).copy_from(&wh);
    m.fixed_view_mut::<3, 3>(3, 0).copy_from(&vh);
    m.fixed_view_mut::<3, 3>(3, 3).copy_from(&wh);
    m
}

/// Pitch `h = ω·v/‖ω‖²` of the screw `X`.
pub fn screw_pitch(x: &Twist) -> Result<f64> {
    let t2 = x.w.norm_squared();
    if t2 == 0.0 {
        return Err(Error::domain("screw_pitch", "pure translation has no finite pitch"));
    }
    Ok(x.w.dot(&x.v) / t2)
}

/// Above this angle the closed-form dexp⁻¹ coefficients are used, below it
/// their Bernoulli series. The closed forms divide by ‖ω‖⁴.
const DEXPINV_SERIES_LIMIT: f64 = 0.5;

/// `B_{2k} / (2k)!` for k = 1..=12, the Taylor coefficients of `(x/2) coth(x/2)`.
fn bernoulli_coefficients() -> [f64; 12] {
    const B: [(f64, f64); 12] = [
        (1.0, 6.0),
        (-1.0, 30.0),
        (1.0, 42.0),
        (-1.0, 30.0),
        (5.0, 66.0),
        (-691.0, 2730.0),
        (7.0, 6.0),
        (-3617.0, 510.0),
        (43867.0, 798.0),
        (-174611.0, 330.0),
        (854513.0, 138.0),
        (-236364091.0, 2730.0),
    ];
    let mut out = [0.0; 12];
    let mut fact = 1.0;
    for (k, (num, den)) in B.iter().enumerate() {
        let n = 2 * (k + 1);
        fact *= ((n - 1) * n) as f64;
        out[k] = num / den / fact;
    }
    out
}

fn dexpinv_se3_coefficients_series(theta: f64) -> (f64, f64) {
    // With g_k = B_{2k}/(2k)! and y = −θ²:
    //   c2 = −Σ_{k≥1} (k−2) g_k y^(k−1)
    //   c4 =  Σ_{k≥2} (k−1) g_k y^(k−2)
    let g = bernoulli_coefficients();
    let y = -theta * theta;
    let mut c2 = 0.0;
    let mut c4 = 0.0;
    let mut y_pow = 1.0;
    for (i, gk) in g.iter().enumerate() {
        let k = (i + 1) as f64;
        c2 -= (k - 2.0) * gk * y_pow;
        if let Some(next) = g.get(i + 1) {
            c4 += k * next * y_pow;
        }
        y_pow *= y;
    }
    (c2, c4)
}

fn dexpinv_se3_coefficients_closed(theta: f64) -> (f64, f64) {
    let (s, c) = theta.sin_cos();
    let t2 = theta * theta;
    let c2 = 2.0 / t2 + (theta + 3.0 * s) / (4.0 * theta * (c - 1.0));
    let c4 = 1.0 / (t2 * t2) + (theta + s) / (4.0 * t2 * theta * (c - 1.0));
    (c2, c4)
}

fn dexpinv_se3_coefficients(theta: f64) -> (f64, f64) {
    if theta < DEXPINV_SERIES_LIMIT {
        dexpinv_se3_coefficients_series(theta)
    } else {
        dexpinv_se3_coefficients_closed(theta)
    }
}

/// `dexp⁻¹_X = I − ½ad_X + c₂(‖ω‖) ad_X² + c₄(‖ω‖) ad_X⁴` as a 6×6 matrix.
pub fn dexpinv_se3_matrix(x: &Twist) -> Result<Mat6> {
    let theta = x.w.norm();
    check_dexp_domain("dexpinv_se3", theta)?;
    let (c2, c4) = dexpinv_se3_coefficients(theta);
    let ad = ad_se3(x);
    let ad2 = ad * ad;
    Ok(Mat6::identity() - ad * 0.5 + ad2 * c2 + ad2 * ad2 * c4)
}

/// `dexp⁻¹_X Y` on se(3), evaluated with nested brackets.
pub fn dexpinv_se3(x: &Twist, y: &Twist) -> Result<Twist> {
    let theta = x.w.norm();
    check_dexp_domain("dexpinv_se3", theta)?;
    let (c2, c4) = dexpinv_se3_coefficients(theta);
    let a1 = bracket_se3(x, y);
    let a2 = bracket_se3(x, &a1);
    let a3 = bracket_se3(x, &a2);
    let a4 = bracket_se3(x, &a3);
    Ok(*y - a1 * 0.5 + a2 * c2 + a4 * c4)
}
