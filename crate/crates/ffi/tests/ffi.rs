use std::ffi::CStr;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use mbs_lie_ffi::*;

fn last_error() -> String {
    let mut buf = [0 as std::ffi::c_char; 256];
    unsafe { mbs_last_error_message(buf.as_mut_ptr(), buf.len()) };
    unsafe { CStr::from_ptr(buf.as_ptr()) }.to_string_lossy().into_owned()
}

fn model(kind: MbsModelKind, form: MbsFormulation) -> *mut MbsModel {
    let mut m = ptr::null_mut();
    assert_eq!(unsafe { mbs_model_new(kind, form, &mut m) }, MbsStatus::Ok);
    assert!(!m.is_null());
    m
}

#[test]
fn model_sizes() {
    for (kind, bodies, constraints) in [
        (MbsModelKind::HeavyTop, 1, 3),
        (MbsModelKind::DoublePendulum, 2, 6),
        (MbsModelKind::FloatingPair, 2, 3),
        (MbsModelKind::ThreeBar, 2, 9),
    ] {
        let m = model(kind, MbsFormulation::Se3);
        let (mut n, mut c) = (0, 0);
        unsafe {
            assert_eq!(mbs_model_num_bodies(m, &mut n), MbsStatus::Ok);
            assert_eq!(mbs_model_num_constraints(m, &mut c), MbsStatus::Ok);
            mbs_model_free(m);
        }
        assert_eq!((n, c), (bodies, constraints), "{kind:?}");
    }
}

#[test]
fn integrate_heavy_top() {
    let m = model(MbsModelKind::HeavyTop, MbsFormulation::Se3);
    let mut traj = ptr::null_mut();
    unsafe {
        assert_eq!(mbs_integrate(m, MbsTableau::Rk4, 0.1, 1e-3, 10, &mut traj), MbsStatus::Ok);
        let mut len = 0;
        assert_eq!(mbs_trajectory_len(traj, &mut len), MbsStatus::Ok);
        assert_eq!(len, 11);
        let mut s = MbsSample::default();
        assert_eq!(mbs_trajectory_sample(traj, len - 1, &mut s), MbsStatus::Ok);
        assert!((s.t - 0.1).abs() < 1e-12);
        assert!(s.max_abs_constraint < 1e-9);
        assert!(s.ortho_err < 1e-12);
        let mut j = f64::NAN;
        assert_eq!(mbs_trajectory_joint_violation(traj, len - 1, 0, &mut j), MbsStatus::Ok);
        assert!(j <= s.max_abs_constraint * 3f64.sqrt() + 1e-15);
        let (mut pose, mut twist) = (MbsPose::default(), MbsTwist::default());
        assert_eq!(mbs_trajectory_state(traj, 0, 0, &mut pose, &mut twist), MbsStatus::Ok);
        assert_eq!(pose.rot, [1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
        assert!((twist.w[1] - 20.0 * std::f64::consts::PI).abs() < 1e-12);

        assert_eq!(mbs_trajectory_sample(traj, len, &mut s), MbsStatus::InvalidArgument);
        assert!(last_error().contains("out of range"));
        assert_eq!(mbs_trajectory_joint_violation(traj, 0, 1, &mut j), MbsStatus::InvalidArgument);
        assert_eq!(mbs_trajectory_state(traj, 0, 1, &mut pose, &mut twist), MbsStatus::InvalidArgument);
        mbs_trajectory_free(traj);
        mbs_model_free(m);
    }
}

#[test]
fn formulations_share_initial_pose() {
    let a = model(MbsModelKind::ThreeBar, MbsFormulation::Se3);
    let b = model(MbsModelKind::ThreeBar, MbsFormulation::So3R3);
    unsafe {
        let (mut ta, mut tb) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(mbs_integrate(a, MbsTableau::Heun, 0.0, 1e-3, 1, &mut ta), MbsStatus::Ok);
        assert_eq!(mbs_integrate(b, MbsTableau::Heun, 0.0, 1e-3, 1, &mut tb), MbsStatus::Ok);
        for body in 0..2 {
            let (mut pa, mut pb) = (MbsPose::default(), MbsPose::default());
            let mut w = MbsTwist::default();
            mbs_trajectory_state(ta, 0, body, &mut pa, &mut w);
            mbs_trajectory_state(tb, 0, body, &mut pb, &mut w);
            for i in 0..9 {
                assert!((pa.rot[i] - pb.rot[i]).abs() < 1e-14);
            }
            for i in 0..3 {
                assert!((pa.pos[i] - pb.pos[i]).abs() < 1e-14);
            }
        }
        mbs_trajectory_free(ta);
        mbs_trajectory_free(tb);
        mbs_model_free(a);
        mbs_model_free(b);
    }
}

#[test]
fn null_handles() {
    let mut n = 0;
    let mut out = ptr::null_mut();
    unsafe {
        assert_eq!(mbs_model_num_bodies(ptr::null(), &mut n), MbsStatus::NullPointer);
        assert!(last_error().contains("model is null"));
        assert_eq!(
            mbs_model_new(MbsModelKind::HeavyTop, MbsFormulation::Se3, ptr::null_mut()),
            MbsStatus::NullPointer
        );
        assert_eq!(
            mbs_integrate(ptr::null(), MbsTableau::Rk4, 1.0, 1e-3, 1, &mut out),
            MbsStatus::NullPointer
        );
        assert_eq!(mbs_trajectory_len(ptr::null(), &mut n), MbsStatus::NullPointer);
        assert_eq!(mbs_exp_se3(ptr::null(), &mut MbsPose::default()), MbsStatus::NullPointer);
        let m = model(MbsModelKind::HeavyTop, MbsFormulation::Se3);
        assert_eq!(mbs_model_num_bodies(m, ptr::null_mut()), MbsStatus::NullPointer);
        mbs_model_free(m);
        mbs_model_free(ptr::null_mut());
        mbs_trajectory_free(ptr::null_mut());
    }
}

#[test]
fn bad_steps_report_errors() {
    let m = model(MbsModelKind::HeavyTop, MbsFormulation::Se3);
    let mut traj = ptr::null_mut();
    unsafe {
        assert_eq!(mbs_integrate(m, MbsTableau::Rk4, 1.0, 0.0, 1, &mut traj), MbsStatus::InvalidArgument);
        assert!(traj.is_null());
        assert_eq!(mbs_integrate(m, MbsTableau::Rk4, 1.0, 0.2, 1, &mut traj), MbsStatus::IntegrationFailed);
        assert!(traj.is_null());
        assert!(last_error().contains("step 1"));
        mbs_model_free(m);
    }
}

#[test]
fn error_message_truncation() {
    let mut n = 0;
    unsafe {
        mbs_model_num_bodies(ptr::null(), &mut n);
        let full = mbs_last_error_message(ptr::null_mut(), 0);
        assert_eq!(full, "model is null".len());
        let mut buf = [1 as std::ffi::c_char; 6];
        assert_eq!(mbs_last_error_message(buf.as_mut_ptr(), buf.len()), full);
        assert_eq!(CStr::from_ptr(buf.as_ptr()).to_str().unwrap(), "model");
    }
}

#[test]
fn group_maps() {
    let x = MbsTwist {
        w: [0.0, 0.0, std::f64::consts::FRAC_PI_2],
        v: [1.0, 0.0, 0.0],
    };
    let (mut se3, mut dp) = (MbsPose::default(), MbsPose::default());
    unsafe {
        assert_eq!(mbs_exp_se3(&x, &mut se3), MbsStatus::Ok);
        assert_eq!(mbs_exp_so3xr3(&x, &mut dp), MbsStatus::Ok);
    }
    let rot = [0.0, -1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 1.0];
    for (i, r) in rot.iter().enumerate() {
        assert!((se3.rot[i] - r).abs() < 1e-15 && (dp.rot[i] - r).abs() < 1e-15);
    }
    // screw motion: translation along a quarter arc
    let s = 2.0 / std::f64::consts::PI;
    assert!((se3.pos[0] - s).abs() < 1e-15 && (se3.pos[1] - s).abs() < 1e-15);
    assert_eq!(dp.pos, [1.0, 0.0, 0.0]);

    let y = MbsTwist { w: [0.3, -0.1, 0.2], v: [0.5, 0.4, -0.7] };
    let zero = MbsTwist::default();
    let mut z = MbsTwist::default();
    unsafe {
        assert_eq!(mbs_dexpinv_se3(&zero, &y, &mut z), MbsStatus::Ok);
        assert_eq!(z, y);
        let big = MbsTwist { w: [0.0, 0.0, 7.0], v: [0.0; 3] };
        assert_eq!(mbs_dexpinv_se3(&big, &y, &mut z), MbsStatus::Domain);
    }
}

fn header() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("include/mbs_lie.h")
}

#[test]
fn header_declares_api() {
    let h = std::fs::read_to_string(header()).unwrap();
    for sym in [
        "MBS_LIE_H",
        "typedef struct MbsModel MbsModel;",
        "typedef struct MbsTrajectory MbsTrajectory;",
        "MBS_STATUS_OK = 0",
        "MBS_STATUS_PANIC = 6",
        "MBS_FORMULATION_SO3_R3",
        "mbs_last_error_message(",
        "mbs_model_new(",
        "mbs_model_free(",
        "mbs_model_num_bodies(",
        "mbs_model_num_constraints(",
        "mbs_integrate(",
        "mbs_trajectory_len(",
        "mbs_trajectory_sample(",
        "mbs_trajectory_joint_violation(",
        "mbs_trajectory_state(",
        "mbs_trajectory_free(",
        "mbs_exp_se3(",
        "mbs_exp_so3xr3(",
        "mbs_dexpinv_se3(",
    ] {
        assert!(h.contains(sym), "missing {sym}");
    }
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include "mbs_lie.h"

int main(void) {
    MbsModel *m = NULL;
    MbsTrajectory *t = NULL;
    size_t len = 0;
    MbsSample s;
    if (mbs_model_new(MBS_MODEL_KIND_DOUBLE_PENDULUM, MBS_FORMULATION_SE3, &m) != MBS_STATUS_OK) return 1;
    if (mbs_integrate(m, MBS_TABLEAU_RK4, 0.05, 1e-3, 5, &t) != MBS_STATUS_OK) return 2;
    if (mbs_trajectory_len(t, &len) != MBS_STATUS_OK || len != 11) return 3;
    if (mbs_trajectory_sample(t, len - 1, &s) != MBS_STATUS_OK) return 4;
    if (mbs_model_num_bodies(NULL, &len) != MBS_STATUS_NULL_POINTER) return 5;
    char msg[64];
    mbs_last_error_message(msg, sizeof msg);
    printf("t=%.3f g=%.1e err=%s\n", s.t, s.max_abs_constraint, msg);
    mbs_trajectory_free(t);
    mbs_model_free(m);
    return 0;
}
"#;

/// Compiles a small C client against the generated header and static library.
#[test]
fn c_client_links_and_runs() {
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().and_then(Path::parent).unwrap();
    let lib = profile_dir.join("libmbs_lie_ffi.a");
    assert!(lib.exists(), "static library not found at {}", lib.display());
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("client.c");
    let bin = dir.path().join("client");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let status = Command::new(&cc)
        .arg(&src)
        .arg("-I")
        .arg(header().parent().unwrap())
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "client exited with {:?}", out.status.code());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.starts_with("t=0.050") && stdout.contains("err=model is null"), "{stdout}");
}
