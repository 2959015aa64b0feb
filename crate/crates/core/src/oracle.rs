//! Independent reference computations for tests and benchmarks.
//!
//! Nothing here shares code with the Lie-group integrator: the heavy-top
//! reference integrates Euler's equations in unit quaternions with an adaptive
//! Dormand–Prince 5(4) pair, and the series maps sum matrix powers directly.

use nalgebra::{DMatrix, Matrix3, Vector3};

use crate::dae::DaeModel;
use crate::lie::Twist;
use crate::state::{MbsConfig, MbsVelocity};
use crate::{Error, Result};

/// `Σ Aᵏ/k!` truncated after `terms` terms, with scaling and squaring so the
/// scaled matrix has 1-norm at most ½.
pub fn exp_series(a: &DMatrix<f64>, terms: usize) -> DMatrix<f64> {
    assert!(a.is_square(), "exp_series needs a square matrix");
    let n = a.nrows();
    let norm = a
        .column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let mut squarings = 0;
    while norm / 2f64.powi(squarings) > 0.5 {
        squarings += 1;
    }
    let scaled = a / 2f64.powi(squarings);
    let mut sum = DMatrix::identity(n, n);
    let mut term = DMatrix::identity(n, n);
    for k in 1..terms {
        term = &term * &scaled / k as f64;
        sum += &term;
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// `Σ_{k<terms} adXᵏ/(k+1)!`, the differential of the exponential in the sign
/// convention inverted by [`crate::lie::dexpinv_se3`] and
/// [`crate::lie::dexpinv_so3`].
pub fn dexp_series(ad_x: &DMatrix<f64>, terms: usize) -> DMatrix<f64> {
    assert!(ad_x.is_square(), "dexp_series needs a square matrix");
    let n = ad_x.nrows();
    let mut sum = DMatrix::identity(n, n);
    let mut term = DMatrix::identity(n, n);
    for k in 1..terms {
        term = &term * ad_x / (k + 1) as f64;
        sum += &term;
    }
    sum
}

/// Central-difference Jacobian of `g` along right-multiplied group
/// perturbations `q_i ← q_i exp(±ε e_k)`.
pub fn fd_constraint_jacobian(model: &dyn DaeModel, q: &MbsConfig, eps: f64) -> DMatrix<f64> {
    let n = model.n_bodies();
    let mut out = DMatrix::zeros(model.n_constraints(), 6 * n);
    for body in 0..n {
        for k in 0..6 {
            let mut e = crate::lie::Vec6::zeros();
            e[k] = eps;
            let tw = Twist::from_vec6(&e);
            let diff = model.constraint(&q.perturbed(body, &tw)) - model.constraint(&q.perturbed(body, &-tw));
            out.column_mut(6 * body + k).copy_from(&(diff / (2.0 * eps)));
        }
    }
    out
}

/// `−(d/dt J(q exp(tV)) V)` at `t = 0` by central differences, the value
/// `acc_rhs` must return.
pub fn fd_acc_rhs(model: &dyn DaeModel, q: &MbsConfig, vel: &MbsVelocity, eps: f64) -> nalgebra::DVector<f64> {
    let flow = |t: f64| {
        let mut out = q.clone();
        for (i, tw) in vel.twists.iter().enumerate() {
            out = out.perturbed(i, &(*tw * t));
        }
        out
    };
    let v = vel.to_dvector();
    let plus = model.jacobian(&flow(eps)) * &v;
    let minus = model.jacobian(&flow(-eps)) * &v;
    -(plus - minus) / (2.0 * eps)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const IDENTITY: Quaternion = Quaternion {
        w: 1.0,
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quaternion { w, x, y, z }
    }

    pub fn norm(&self) -> f64 {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Quaternion::new(self.w / n, self.x / n, self.y / n, self.z / n)
    }

    /// Hamilton product.
    pub fn mul(&self, o: &Quaternion) -> Quaternion {
        Quaternion::new(
            self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        )
    }

    /// Rotation matrix of a unit quaternion.
    pub fn to_matrix(&self) -> Matrix3<f64> {
        let Quaternion { w, x, y, z } = *self;
        Matrix3::new(
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdaptiveSolverSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub initial_step: f64,
    pub max_steps: usize,
}

impl Default for AdaptiveSolverSettings {
    fn default() -> Self {
        AdaptiveSolverSettings {
            rel_tol: 1e-6,
            abs_tol: 1e-9,
            initial_step: 1e-4,
            max_steps: 10_000_000,
        }
    }
}

impl AdaptiveSolverSettings {
    pub fn with_tolerances(rel_tol: f64, abs_tol: f64) -> Self {
        AdaptiveSolverSettings {
            rel_tol,
            abs_tol,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = self.rel_tol > 0.0 && self.abs_tol > 0.0 && self.initial_step > 0.0 && self.max_steps > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!("invalid adaptive solver settings {self:?}")))
        }
    }
}

/// Rigid body turning about a fixed pivot.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PivotedBody {
    /// Inertia about the pivot, body axes.
    pub inertia: Matrix3<f64>,
    /// COM position relative to the pivot, body axes.
    pub com: Vector3<f64>,
    pub mass: f64,
    /// Spatial gravity.
    pub gravity: Vector3<f64>,
}

impl PivotedBody {
    /// The heavy-top parameters, derived independently of `models`.
    pub fn heavy_top() -> Self {
        let (a, b, c) = (0.1, 0.2, 0.4);
        let mass = 2700.0 * a * b * c;
        let com = Vector3::new(0.5, 0.0, 0.0);
        let theta0 = Matrix3::from_diagonal(&Vector3::new(b * b + c * c, a * a + c * c, a * a + b * b)) * (mass / 12.0);
        PivotedBody {
            inertia: theta0 + (Matrix3::identity() * com.norm_squared() - com * com.transpose()) * mass,
            com,
            mass,
            gravity: Vector3::new(0.0, 0.0, -9.81),
        }
    }

    pub fn without_gravity(self) -> Self {
        PivotedBody {
            gravity: Vector3::zeros(),
            ..self
        }
    }

    /// `½ωᵀΘω − m g·(R c)`.
    pub fn energy(&self, q: &Quaternion, w: &Vector3<f64>) -> f64 {
        0.5 * w.dot(&(self.inertia * w)) - self.mass * self.gravity.dot(&(q.to_matrix() * self.com))
    }

    fn rhs(&self, y: &[f64; 7]) -> [f64; 7] {
        let q = Quaternion::new(y[0], y[1], y[2], y[3]);
        let w = Vector3::new(y[4], y[5], y[6]);
        let qd = q.mul(&Quaternion::new(0.0, w.x, w.y, w.z));
        let weight = q.to_matrix().transpose() * self.gravity * self.mass;
        let torque = self.com.cross(&weight) - w.cross(&(self.inertia * w));
        let wd = self
            .inertia
            .try_inverse()
            .expect("pivot inertia is invertible")
            * torque;
        [0.5 * qd.w, 0.5 * qd.x, 0.5 * qd.y, 0.5 * qd.z, wd.x, wd.y, wd.z]
    }
}

/// Accepted-step nodes of an adaptive run with cubic Hermite interpolation.
#[derive(Clone, Debug)]
pub struct ReferenceTrajectory {
    pub body: PivotedBody,
    pub times: Vec<f64>,
    states: Vec<[f64; 7]>,
    slopes: Vec<[f64; 7]>,
}

impl ReferenceTrajectory {
    pub fn t_end(&self) -> f64 {
        *self.times.last().unwrap()
    }

    pub fn steps(&self) -> usize {
        self.times.len() - 1
    }

    fn node(&self, i: usize) -> (Quaternion, Vector3<f64>) {
        let y = &self.states[i];
        (Quaternion::new(y[0], y[1], y[2], y[3]), Vector3::new(y[4], y[5], y[6]))
    }

    pub fn nodes(&self) -> impl Iterator<Item = (f64, Quaternion, Vector3<f64>)> + '_ {
        (0..self.times.len()).map(|i| {
            let (q, w) = self.node(i);
            (self.times[i], q, w)
        })
    }

    /// Orientation and body angular velocity at `t`; the quaternion is
    /// renormalized after interpolation.
    pub fn sample(&self, t: f64) -> Result<(Quaternion, Vector3<f64>)> {
        let (t0, t1) = (self.times[0], self.t_end());
        if !(t0..=t1).contains(&t) {
            return Err(Error::InvalidArgument(format!("t = {t} outside [{t0}, {t1}]")));
        }
        let i = match self.times.binary_search_by(|x| x.total_cmp(&t)) {
            Ok(i) => return Ok(self.node(i)),
            Err(i) => i - 1,
        };
        let (ta, tb) = (self.times[i], self.times[i + 1]);
        let h = tb - ta;
        let s = (t - ta) / h;
        let (h00, h10) = (2.0 * s * s * s - 3.0 * s * s + 1.0, s * s * s - 2.0 * s * s + s);
        let (h01, h11) = (-2.0 * s * s * s + 3.0 * s * s, s * s * s - s * s);
        let y: [f64; 7] = std::array::from_fn(|k| {
            h00 * self.states[i][k]
                + h10 * h * self.slopes[i][k]
                + h01 * self.states[i + 1][k]
                + h11 * h * self.slopes[i + 1][k]
        });
        let q = Quaternion::new(y[0], y[1], y[2], y[3]).normalized();
        Ok((q, Vector3::new(y[4], y[5], y[6])))
    }

    /// COM position `R(q) c`.
    pub fn com_position(&self, t: f64) -> Result<Vector3<f64>> {
        let (q, _) = self.sample(t)?;
        Ok(q.to_matrix() * self.body.com)
    }
}

// Dormand–Prince 5(4) coefficients; the system is autonomous so the nodes are not needed
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Reference motion of `body` from identity orientation with body angular
/// velocity `w0`, integrated to `t_end` under `settings`.
pub fn pivoted_body_reference(
    body: PivotedBody,
    w0: Vector3<f64>,
    t_end: f64,
    settings: &AdaptiveSolverSettings,
) -> Result<ReferenceTrajectory> {
    settings.validate()?;
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::InvalidArgument(format!("t_end = {t_end}")));
    }
    let mut y = [1.0, 0.0, 0.0, 0.0, w0.x, w0.y, w0.z];
    let mut t = 0.0;
    let mut f = body.rhs(&y);
    let mut out = ReferenceTrajectory {
        body,
        times: vec![t],
        states: vec![y],
        slopes: vec![f],
    };
    let mut h = settings.initial_step.min(t_end);
    let mut steps = 0;
    while t < t_end {
        if steps >= settings.max_steps {
            return Err(Error::StepControl {
                t,
                detail: format!("exceeded {} steps", settings.max_steps),
            });
        }
        steps += 1;
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }
        let mut k = [[0.0; 7]; 7];
        k[0] = f;
        for s in 1..7 {
            let mut ys = y;
            for (l, kl) in k.iter().enumerate().take(s) {
                for i in 0..7 {
                    ys[i] += h * A[s][l] * kl[i];
                }
            }
            k[s] = body.rhs(&ys);
        }
        let mut y5 = y;
        let mut err = 0.0f64;
        for i in 0..7 {
            let mut d5 = 0.0;
            let mut d4 = 0.0;
            for s in 0..7 {
                d5 += B5[s] * k[s][i];
                d4 += B4[s] * k[s][i];
            }
            y5[i] += h * d5;
            let scale = settings.abs_tol + settings.rel_tol * y[i].abs().max(y5[i].abs());
            err = err.max((h * (d5 - d4) / scale).abs());
        }
        if !err.is_finite() {
            return Err(Error::StepControl {
                t,
                detail: "non-finite error estimate".into(),
            });
        }
        if err <= 1.0 {
            t = if last { t_end } else { t + h };
            let n = (y5[0] * y5[0] + y5[1] * y5[1] + y5[2] * y5[2] + y5[3] * y5[3]).sqrt();
            for v in &mut y5[..4] {
                *v /= n;
            }
            y = y5;
            // FSAL slot is the derivative at the unnormalized point; recompute after renormalizing
            f = body.rhs(&y);
            out.times.push(t);
            out.states.push(y);
            out.slopes.push(f);
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        let next = h * factor;
        if next < 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepControl {
                t,
                detail: format!("step size underflow at h = {next:e}"),
            });
        }
        h = next;
    }
    Ok(out)
}

/// Heavy-top reference from the standard initial spin `ω₀ = (0, 20π, 10π)`.
pub fn heavy_top_reference(t_end: f64, settings: &AdaptiveSolverSettings) -> Result<ReferenceTrajectory> {
    use std::f64::consts::PI;
    pivoted_body_reference(PivotedBody::heavy_top(), Vector3::new(0.0, 20.0 * PI, 10.0 * PI), t_end, settings)
}
