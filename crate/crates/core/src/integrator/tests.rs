use super::*;
use crate::lie::{exp_so3, log_so3, Formulation, Mat3, Twist, Vec3};
use crate::models::{self, ModelKind, MultibodyModel};
use crate::state::{MbsConfig, MbsVelocity};

fn top_about_z(f: Formulation, rate: f64) -> MultibodyModel {
    let base = models::heavy_top(Formulation::Se3);
    let mut preset = base.preset().clone();
    preset.gravity = Vec3::zeros();
    preset.initial_seed = MbsVelocity::new(vec![Twist::new(Vec3::new(0.0, 0.0, rate), Vec3::zeros())]);
    MultibodyModel::new(None, preset, base.joints().to_vec(), f).unwrap()
}

#[test]
fn builtin_tableaus_are_valid() {
    for t in builtin_tableaus() {
        t.validate().unwrap();
        assert_eq!(t.name.parse::<ButcherTableau>().unwrap(), t);
    }
    let rk4 = ButcherTableau::rk4();
    assert_eq!(rk4.b, vec![1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0]);
    assert_eq!(rk4.c, vec![0.0, 0.5, 0.5, 1.0]);
    assert!("rk5".parse::<ButcherTableau>().is_err());
}

#[test]
fn invalid_tableaus_rejected() {
    let implicit = ButcherTableau::new("x", vec![vec![1.0]], vec![1.0], vec![1.0]);
    assert!(implicit.is_err());
    let weights = ButcherTableau::new("x", vec![vec![0.0]], vec![0.9], vec![0.0]);
    assert!(weights.is_err());
    let nodes = ButcherTableau::new("x", vec![vec![0.0, 0.0], vec![1.0, 0.0]], vec![0.5, 0.5], vec![0.0, 0.5]);
    assert!(nodes.is_err());
}

#[test]
fn equilibrium_is_fixed_point() {
    let model = models::floating_pair(Formulation::Se3);
    let x = MbsState::new(model.initial_state().q.clone(), MbsVelocity::zeros(2)).unwrap();
    let y = mk_step(&model, &ButcherTableau::rk4(), 0.0, &x, 1e-3).unwrap();
    for (a, b) in x.q.poses().iter().zip(y.q.poses()) {
        assert!((a.rot.matrix() - b.rot.matrix()).abs().max() <= 1e-15);
        assert!((a.pos - b.pos).norm() <= 1e-15);
    }
    assert!(y.vel.to_dvector().norm() <= 1e-15);
}

#[test]
fn pure_translation_matches_classical_rk() {
    let v = Vec3::new(0.3, -1.2, 2.5);
    for f in Formulation::ALL {
        let model = models::free_body(2.0, Mat3::identity(), f);
        let x = MbsState::new(MbsConfig::identity(1, f), MbsVelocity::new(vec![Twist::new(Vec3::zeros(), v)])).unwrap();
        let h = 1e-2;
        let traj = integrate(&model, &ButcherTableau::rk4(), &x, 0.0, 1.0, h).unwrap();
        assert_eq!(traj.len(), 101);
        let end = traj.last_state();
        assert!((end.q.poses()[0].pos - v).norm() < 1e-14);
        assert_eq!(*end.q.poses()[0].rot.matrix(), Mat3::identity());
        assert_eq!(end.vel.twists[0].v, v);
    }
}

#[test]
fn free_symmetric_top_rotates_exactly() {
    let w = Vec3::new(0.0, 0.0, 1.0);
    for f in Formulation::ALL {
        let model = models::free_body(1.0, Mat3::identity(), f);
        let x = MbsState::new(MbsConfig::identity(1, f), MbsVelocity::new(vec![Twist::new(w, Vec3::zeros())])).unwrap();
        for h in [1e-1, 1e-2] {
            let y = mk_step(&model, &ButcherTableau::rk4(), 0.0, &x, h).unwrap();
            let err = log_so3(&(exp_so3(&(w * h)).transpose() * y.q.poses()[0].rot)).unwrap();
            assert!(err.norm() < h.powi(5), "{f} h={h}: {}", err.norm());
        }
    }
}

#[test]
fn pivot_is_exact_under_se3_for_steady_rotation() {
    let model = top_about_z(Formulation::Se3, 25.0);
    let x = model.initial_state().clone();
    let mut y = x.clone();
    for i in 0..200 {
        y = mk_step(&model, &ButcherTableau::rk4(), i as f64 * 1e-3, &y, 1e-3).unwrap();
        assert!(model.constraint(&y.q).norm() <= 1e-12 * (i + 1) as f64);
    }
    // the rotation itself is the exact screw motion
    let err = log_so3(&(exp_so3(&Vec3::new(0.0, 0.0, 25.0 * 0.2)).transpose() * y.q.poses()[0].rot)).unwrap();
    assert!(err.norm() < 1e-12);
}

#[test]
fn t_end_equal_t0_gives_single_sample() {
    let model = models::heavy_top(Formulation::Se3);
    let x = model.initial_state();
    let traj = integrate(&model, &ButcherTableau::rk4(), x, 0.5, 0.5, 1e-3).unwrap();
    assert_eq!(traj.times, vec![0.5]);
    assert_eq!(&traj.states[0], x);
    assert_eq!(traj.max_joint_violations().len(), 1);
}

#[test]
fn output_stride_and_final_time() {
    let model = models::double_pendulum(Formulation::Se3);
    let x = model.initial_state();
    let opts = IntegrationOptions { output_stride: 3 };
    let traj = integrate_with(&model, &ButcherTableau::heun(), x, 0.0, 0.01, 1e-3, opts).unwrap();
    // samples at steps 0, 3, 6, 9 and the final step 10
    assert_eq!(traj.len(), 5);
    assert!((traj.times[4] - 0.01).abs() < 1e-15);
    assert_eq!(traj.diagnostics.len(), traj.states.len());
    assert!(traj.times.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn runs_are_bitwise_deterministic() {
    let model = models::double_pendulum(Formulation::DirectProduct);
    let x = model.initial_state();
    let a = integrate(&model, &ButcherTableau::rk4(), x, 0.0, 0.2, 1e-3).unwrap();
    let b = integrate(&model, &ButcherTableau::rk4(), x, 0.0, 0.2, 1e-3).unwrap();
    assert_eq!(a, b);
}

#[test]
fn group_closure_over_ten_thousand_steps() {
    for f in Formulation::ALL {
        let model = models::heavy_top(f);
        let opts = IntegrationOptions { output_stride: 100 };
        let traj = integrate_with(&model, &ButcherTableau::rk4(), model.initial_state(), 0.0, 10.0, 1e-3, opts).unwrap();
        assert_eq!(traj.len(), 101);
        for d in &traj.diagnostics {
            assert!(d.ortho_err <= 1e-11, "{f}: {}", d.ortho_err);
        }
    }
}

#[test]
fn oversized_step_reports_stage() {
    let model = models::heavy_top(Formulation::Se3);
    let err = integrate(&model, &ButcherTableau::rk4(), model.initial_state(), 0.0, 1.0, 0.2).unwrap_err();
    match &err {
        Error::Integration { step: 1, source, .. } => {
            assert!(matches!(**source, Error::Stage { .. }), "{source}");
        }
        other => panic!("unexpected error {other}"),
    }
    assert!(matches!(err.root_cause(), Error::Domain { .. }));
}

#[test]
fn rejects_bad_arguments() {
    let model = models::build(ModelKind::HeavyTop, Formulation::Se3);
    let x = model.initial_state();
    let rk4 = ButcherTableau::rk4();
    assert!(integrate(&model, &rk4, x, 0.0, 1.0, 0.0).is_err());
    assert!(integrate(&model, &rk4, x, 1.0, 0.0, 1e-3).is_err());
    let other = models::heavy_top(Formulation::DirectProduct);
    assert!(matches!(
        integrate(&model, &rk4, other.initial_state(), 0.0, 1.0, 1e-3),
        Err(Error::FormulationMismatch { .. })
    ));
    let opts = IntegrationOptions { output_stride: 0 };
    assert!(integrate_with(&model, &rk4, x, 0.0, 1.0, 1e-3, opts).is_err());
}
