//! C interface to the multibody integrator.
//!
//! Models and trajectories are opaque heap handles released with their
//! `*_free` function. Every fallible call returns an [`MbsStatus`]; the
//! message of the most recent failure on the calling thread is available
//! through [`mbs_last_error_message`]. Panics never cross the boundary.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use mbs_lie::dae::DaeModel;
use mbs_lie::integrator::{integrate_with, ButcherTableau, IntegrationOptions, Trajectory};
use mbs_lie::lie::{self, Formulation, Pose, Twist, Vec3};
use mbs_lie::models::{self, ModelKind, MultibodyModel};
use mbs_lie::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MbsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Argument outside the domain of a Lie-group map.
    Domain = 3,
    /// Singular or ill-conditioned constraint system.
    Singular = 4,
    IntegrationFailed = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MbsModelKind {
    HeavyTop = 0,
    DoublePendulum = 1,
    FloatingPair = 2,
    ThreeBar = 3,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MbsFormulation {
    Se3 = 0,
    So3R3 = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MbsTableau {
    Euler = 0,
    Heun = 1,
    Rk4 = 2,
}

/// Angular part `w` and linear part `v`.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MbsTwist {
    pub w: [f64; 3],
    pub v: [f64; 3],
}

/// Rotation matrix in row-major order and position.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MbsPose {
    pub rot: [f64; 9],
    pub pos: [f64; 3],
}

/// Diagnostics of one trajectory sample.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MbsSample {
    pub t: f64,
    pub max_abs_constraint: f64,
    pub kinetic: f64,
    pub potential: f64,
    pub ortho_err: f64,
}

/// Opaque model handle.
pub struct MbsModel {
    inner: MultibodyModel,
}

/// Opaque trajectory handle.
pub struct MbsTrajectory {
    inner: Trajectory,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

struct Failure(MbsStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e.root_cause() {
            Error::Domain { .. } => MbsStatus::Domain,
            Error::SingularSaddle { .. } | Error::SaddleResidual { .. } | Error::RankDeficient => MbsStatus::Singular,
            _ => MbsStatus::InvalidArgument,
        };
        let status = if matches!(e, Error::Integration { .. }) {
            MbsStatus::IntegrationFailed
        } else {
            status
        };
        Failure(status, e.to_string())
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(MbsStatus::InvalidArgument, msg.into())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> MbsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => MbsStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            MbsStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    // SAFETY: the caller guarantees that non-null pointers are valid for reads
    unsafe { p.as_ref() }.ok_or_else(|| Failure(MbsStatus::NullPointer, format!("{what} is null")))
}

unsafe fn write<T>(p: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(Failure(MbsStatus::NullPointer, format!("{what} is null")));
    }
    // SAFETY: non-null and, by contract, valid for writes
    unsafe { p.write(value) };
    Ok(())
}

fn twist_in(t: &MbsTwist) -> Twist {
    Twist::new(Vec3::from(t.w), Vec3::from(t.v))
}

fn twist_out(t: &Twist) -> MbsTwist {
    MbsTwist {
        w: t.w.into(),
        v: t.v.into(),
    }
}

fn pose_out(p: &Pose) -> MbsPose {
    let r = p.rot.matrix();
    let mut rot = [0.0; 9];
    for i in 0..3 {
        for j in 0..3 {
            rot[3 * i + j] = r[(i, j)];
        }
    }
    MbsPose { rot, pos: p.pos.into() }
}

fn formulation(f: MbsFormulation) -> Formulation {
    match f {
        MbsFormulation::Se3 => Formulation::Se3,
        MbsFormulation::So3R3 => Formulation::DirectProduct,
    }
}

/// Copies the last error message of this thread into `buf` (NUL-terminated,
/// truncated to `len` bytes) and returns the length of the full message
/// without the terminator. `buf` may be null to query the length.
#[no_mangle]
pub unsafe extern "C" fn mbs_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            // SAFETY: caller provides `len` writable bytes at `buf`
            unsafe {
                ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
                *buf.add(n) = 0;
            }
        }
        msg.len()
    })
}

/// Builds a benchmark model with its consistent initial state.
#[no_mangle]
pub unsafe extern "C" fn mbs_model_new(
    kind: MbsModelKind,
    form: MbsFormulation,
    out: *mut *mut MbsModel,
) -> MbsStatus {
    guard(|| {
        let kind = match kind {
            MbsModelKind::HeavyTop => ModelKind::HeavyTop,
            MbsModelKind::DoublePendulum => ModelKind::DoublePendulum,
            MbsModelKind::FloatingPair => ModelKind::FloatingPair,
            MbsModelKind::ThreeBar => ModelKind::ThreeBar,
        };
        if out.is_null() {
            return Err(Failure(MbsStatus::NullPointer, "out is null".into()));
        }
        let model = Box::new(MbsModel {
            inner: models::build(kind, formulation(form)),
        });
        unsafe { write(out, Box::into_raw(model), "out") }
    })
}

/// Releases a model; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn mbs_model_free(model: *mut MbsModel) {
    if !model.is_null() {
        // SAFETY: created by `mbs_model_new` and not freed before
        drop(unsafe { Box::from_raw(model) });
    }
}

#[no_mangle]
pub unsafe extern "C" fn mbs_model_num_bodies(model: *const MbsModel, out: *mut usize) -> MbsStatus {
    guard(|| {
        let m = unsafe { deref(model, "model")? };
        unsafe { write(out, m.inner.n_bodies(), "out") }
    })
}

#[no_mangle]
pub unsafe extern "C" fn mbs_model_num_constraints(model: *const MbsModel, out: *mut usize) -> MbsStatus {
    guard(|| {
        let m = unsafe { deref(model, "model")? };
        unsafe { write(out, m.inner.n_constraints(), "out") }
    })
}

/// Integrates from the model's initial state over `[0, t_end]` with fixed
/// step `dt`, recording every `output_stride`-th step.
#[no_mangle]
pub unsafe extern "C" fn mbs_integrate(
    model: *const MbsModel,
    tableau: MbsTableau,
    t_end: f64,
    dt: f64,
    output_stride: usize,
    out: *mut *mut MbsTrajectory,
) -> MbsStatus {
    guard(|| {
        let m = unsafe { deref(model, "model")? };
        if out.is_null() {
            return Err(Failure(MbsStatus::NullPointer, "out is null".into()));
        }
        let tableau = match tableau {
            MbsTableau::Euler => ButcherTableau::euler(),
            MbsTableau::Heun => ButcherTableau::heun(),
            MbsTableau::Rk4 => ButcherTableau::rk4(),
        };
        let traj = integrate_with(
            &m.inner,
            &tableau,
            m.inner.initial_state(),
            0.0,
            t_end,
            dt,
            IntegrationOptions { output_stride },
        )?;
        let handle = Box::new(MbsTrajectory { inner: traj });
        unsafe { write(out, Box::into_raw(handle), "out") }
    })
}

/// Releases a trajectory; null is ignored.
#[no_mangle]
pub unsafe extern "C" fn mbs_trajectory_free(traj: *mut MbsTrajectory) {
    if !traj.is_null() {
        // SAFETY: created by `mbs_integrate` and not freed before
        drop(unsafe { Box::from_raw(traj) });
    }
}

#[no_mangle]
pub unsafe extern "C" fn mbs_trajectory_len(traj: *const MbsTrajectory, out: *mut usize) -> MbsStatus {
    guard(|| {
        let t = unsafe { deref(traj, "trajectory")? };
        unsafe { write(out, t.inner.len(), "out") }
    })
}

fn sample_index(t: &MbsTrajectory, index: usize) -> Result<(), Failure> {
    if index >= t.inner.len() {
        return Err(invalid(format!("sample {index} out of range (length {})", t.inner.len())));
    }
    Ok(())
}

#[no_mangle]
pub unsafe extern "C" fn mbs_trajectory_sample(
    traj: *const MbsTrajectory,
    index: usize,
    out: *mut MbsSample,
) -> MbsStatus {
    guard(|| {
        let t = unsafe { deref(traj, "trajectory")? };
        sample_index(t, index)?;
        let d = &t.inner.diagnostics[index];
        let sample = MbsSample {
            t: t.inner.times[index],
            max_abs_constraint: d.max_abs_constraint(),
            kinetic: d.kinetic,
            potential: d.potential,
            ortho_err: d.ortho_err,
        };
        unsafe { write(out, sample, "out") }
    })
}

/// Euclidean norm of joint `joint`'s constraint block at sample `index`.
#[no_mangle]
pub unsafe extern "C" fn mbs_trajectory_joint_violation(
    traj: *const MbsTrajectory,
    index: usize,
    joint: usize,
    out: *mut f64,
) -> MbsStatus {
    guard(|| {
        let t = unsafe { deref(traj, "trajectory")? };
        sample_index(t, index)?;
        let joints = &t.inner.diagnostics[index].joints;
        let v = *joints
            .get(joint)
            .ok_or_else(|| invalid(format!("joint {joint} out of range ({} joints)", joints.len())))?;
        unsafe { write(out, v, "out") }
    })
}

/// Pose and velocity of `body` at sample `index`. The linear velocity is
/// body-fixed for SE(3) models and spatial for SO(3)×ℝ³ models.
#[no_mangle]
pub unsafe extern "C" fn mbs_trajectory_state(
    traj: *const MbsTrajectory,
    index: usize,
    body: usize,
    pose: *mut MbsPose,
    twist: *mut MbsTwist,
) -> MbsStatus {
    guard(|| {
        let t = unsafe { deref(traj, "trajectory")? };
        sample_index(t, index)?;
        let state = &t.inner.states[index];
        if body >= state.n_bodies() {
            return Err(invalid(format!("body {body} out of range ({} bodies)", state.n_bodies())));
        }
        unsafe {
            write(pose, pose_out(&state.q.poses()[body]), "pose")?;
            write(twist, twist_out(&state.vel.twists[body]), "twist")
        }
    })
}

/// SE(3) exponential.
#[no_mangle]
pub unsafe extern "C" fn mbs_exp_se3(x: *const MbsTwist, out: *mut MbsPose) -> MbsStatus {
    guard(|| {
        let x = unsafe { deref(x, "x")? };
        unsafe { write(out, pose_out(&lie::exp_se3(&twist_in(x))), "out") }
    })
}

/// SO(3)×ℝ³ exponential.
#[no_mangle]
pub unsafe extern "C" fn mbs_exp_so3xr3(x: *const MbsTwist, out: *mut MbsPose) -> MbsStatus {
    guard(|| {
        let x = unsafe { deref(x, "x")? };
        unsafe { write(out, pose_out(&lie::exp_dp(&twist_in(x))), "out") }
    })
}

/// `dexp⁻¹_x y` on se(3); fails with `Domain` when `‖x.w‖` reaches `2π`.
#[no_mangle]
pub unsafe extern "C" fn mbs_dexpinv_se3(x: *const MbsTwist, y: *const MbsTwist, out: *mut MbsTwist) -> MbsStatus {
    guard(|| {
        let (x, y) = unsafe { (deref(x, "x")?, deref(y, "y")?) };
        let z = lie::dexpinv_se3(&twist_in(x), &twist_in(y))?;
        unsafe { write(out, twist_out(&z), "out") }
    })
}
