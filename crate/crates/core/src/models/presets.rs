//! Parameter sets and initial conditions of the benchmark mechanisms.

use std::f64::consts::PI;

use super::{pose, BodyParams, Joint, JointKind, ModelKind, ModelPreset, MultibodyModel};
use crate::lie::{exp_so3, Formulation, Mat3, Rotation, Twist, Vec3};
use crate::state::{MbsConfig, MbsVelocity};

/// kg/m³
pub const ALUMINIUM_DENSITY: f64 = 2700.0;
/// m/s²
pub const STANDARD_GRAVITY: f64 = 9.81;

/// COM inertia of a homogeneous box with edges `a`, `b`, `c` along x, y, z.
pub fn box_inertia(mass: f64, a: f64, b: f64, c: f64) -> Mat3 {
    let k = mass / 12.0;
    Mat3::from_diagonal(&Vec3::new(
        k * (b * b + c * c),
        k * (a * a + c * c),
        k * (a * a + b * b),
    ))
}

fn box_body(a: f64, b: f64, c: f64, attachments: Vec<Vec3>) -> BodyParams {
    let mass = ALUMINIUM_DENSITY * a * b * c;
    BodyParams {
        mass,
        inertia: box_inertia(mass, a, b, c),
        attachments,
    }
}

fn link(attachments: Vec<Vec3>) -> BodyParams {
    box_body(0.2, 0.1, 0.05, attachments)
}

fn ground(body: usize, attach: Vec3, anchor: Vec3, sign: f64) -> Joint {
    Joint {
        kind: JointKind::Ground { body, attach, anchor },
        sign,
    }
}

fn pair(body_a: usize, attach_a: Vec3, body_b: usize, attach_b: Vec3) -> Joint {
    Joint {
        kind: JointKind::Pair {
            body_a,
            attach_a,
            body_b,
            attach_b,
        },
        sign: 1.0,
    }
}

fn spin(w: [f64; 3], v: [f64; 3]) -> Twist {
    Twist::new(Vec3::from(w), Vec3::from(v))
}

fn finish(
    kind: Option<ModelKind>,
    preset: ModelPreset,
    joints: Vec<Joint>,
    formulation: Formulation,
) -> MultibodyModel {
    MultibodyModel::new(kind, preset, joints, formulation)
        .expect("preset initial state is consistent")
}

/// Builds one of the benchmark mechanisms with its default gravity.
pub fn build(kind: ModelKind, formulation: Formulation) -> MultibodyModel {
    match kind {
        ModelKind::HeavyTop => heavy_top(formulation),
        ModelKind::DoublePendulum => double_pendulum(formulation),
        ModelKind::FloatingPair => floating_pair(formulation),
        ModelKind::ThreeBar => three_bar(formulation),
    }
}

/// Like [`build`] with the gravity vector replaced.
pub fn build_with_gravity(
    kind: ModelKind,
    formulation: Formulation,
    gravity: Vec3,
) -> crate::Result<MultibodyModel> {
    let base = build(kind, Formulation::Se3);
    let mut preset = base.preset().clone();
    preset.gravity = gravity;
    MultibodyModel::new(Some(kind), preset, base.joints().to_vec(), formulation)
}

/// Aluminium box 0.1×0.2×0.4 m spinning about a fixed pivot; COM at
/// `r⁰ = (0.5, 0, 0)` in body axes.
pub fn heavy_top(formulation: Formulation) -> MultibodyModel {
    let body = box_body(0.1, 0.2, 0.4, vec![]);
    let mut model = heavy_top_with(body.mass, body.inertia, Vec3::new(0.5, 0.0, 0.0), formulation);
    model.kind = Some(ModelKind::HeavyTop);
    model
}

/// A single body with COM offset `r0` from a pivot at the origin, under
/// gravity `−9.81 e_z`, released with `ω = (0, 20π, 10π)` rad/s.
pub fn heavy_top_with(mass: f64, inertia: Mat3, r0: Vec3, formulation: Formulation) -> MultibodyModel {
    let preset = ModelPreset {
        name: "heavy_top".into(),
        bodies: vec![BodyParams {
            mass,
            inertia,
            attachments: vec![-r0],
        }],
        anchors: vec![Vec3::zeros()],
        gravity: Vec3::new(0.0, 0.0, -STANDARD_GRAVITY),
        initial_config: MbsConfig::new(vec![pose(Rotation::identity(), r0)]).unwrap(),
        initial_seed: MbsVelocity::new(vec![spin([0.0, 20.0 * PI, 10.0 * PI], [0.0; 3])]),
    };
    let joints = vec![ground(0, -r0, Vec3::zeros(), -1.0)];
    finish(None, preset, joints, formulation)
}

fn pendulum_preset(name: &str, gravity: Vec3, w1: [f64; 3], w2: [f64; 3]) -> ModelPreset {
    let ends = vec![Vec3::new(-0.1, 0.0, 0.0), Vec3::new(0.1, 0.0, 0.0)];
    ModelPreset {
        name: name.into(),
        bodies: vec![link(ends.clone()), link(ends)],
        anchors: vec![Vec3::zeros()],
        gravity,
        initial_config: MbsConfig::new(vec![
            pose(Rotation::identity(), Vec3::new(0.1, 0.0, 0.0)),
            pose(Rotation::identity(), Vec3::new(0.3, 0.0, 0.0)),
        ])
        .unwrap(),
        initial_seed: MbsVelocity::new(vec![spin(w1, [0.0; 3]), spin(w2, [0.0; 3])]),
    }
}

fn pendulum_pair_joint() -> Joint {
    pair(0, Vec3::new(0.1, 0.0, 0.0), 1, Vec3::new(-0.1, 0.0, 0.0))
}

/// Two aluminium links 0.2×0.1×0.05 m in a chain hanging from the origin.
pub fn double_pendulum(formulation: Formulation) -> MultibodyModel {
    let preset = pendulum_preset(
        "double_pendulum",
        Vec3::new(0.0, 0.0, -STANDARD_GRAVITY),
        [10.0, 0.0, 0.0],
        [10.0 * PI, 10.0 * PI, 20.0 * PI],
    );
    let joints = vec![
        ground(0, Vec3::new(-0.1, 0.0, 0.0), Vec3::zeros(), 1.0),
        pendulum_pair_joint(),
    ];
    finish(Some(ModelKind::DoublePendulum), preset, joints, formulation)
}

/// The double pendulum's links joined to each other only, without gravity.
pub fn floating_pair(formulation: Formulation) -> MultibodyModel {
    let preset = pendulum_preset(
        "floating_pair",
        Vec3::zeros(),
        [0.0, 0.0, -10.0],
        [1.0, -1.0, 2.0 * PI],
    );
    finish(
        Some(ModelKind::FloatingPair),
        preset,
        vec![pendulum_pair_joint()],
        formulation,
    )
}

/// Closed loop: link 1 from the origin to a knee at `(0.15, 0, √0.0175)`,
/// link 2 from the knee to the ground point `(0.3, 0, 0)`.
pub fn three_bar(formulation: Formulation) -> MultibodyModel {
    let base = Vec3::new(0.3, 0.0, 0.0);
    let knee = Vec3::new(0.15, 0.0, 0.0175f64.sqrt());
    // body x axes run along each link; a rotation about y by φ maps e_x to (cos φ, 0, −sin φ)
    let axis_angle = |from: Vec3, to: Vec3| {
        let d = (to - from) / 0.2;
        exp_so3(&(Vec3::y() * (-d.z).atan2(d.x)))
    };
    let ends = vec![Vec3::new(-0.1, 0.0, 0.0), Vec3::new(0.1, 0.0, 0.0)];
    let preset = ModelPreset {
        name: "three_bar".into(),
        bodies: vec![link(ends.clone()), link(ends)],
        anchors: vec![Vec3::zeros(), base],
        gravity: Vec3::zeros(),
        initial_config: MbsConfig::new(vec![
            pose(axis_angle(Vec3::zeros(), knee), knee * 0.5),
            pose(axis_angle(knee, base), (knee + base) * 0.5),
        ])
        .unwrap(),
        initial_seed: MbsVelocity::new(vec![
            spin([10.0, 0.0, 0.0], [0.0; 3]),
            spin([10.0 * PI, 10.0 * PI, 20.0 * PI], [0.0; 3]),
        ]),
    };
    let joints = vec![
        ground(0, Vec3::new(-0.1, 0.0, 0.0), Vec3::zeros(), 1.0),
        pair(0, Vec3::new(0.1, 0.0, 0.0), 1, Vec3::new(-0.1, 0.0, 0.0)),
        ground(1, Vec3::new(0.1, 0.0, 0.0), base, 1.0),
    ];
    finish(Some(ModelKind::ThreeBar), preset, joints, formulation)
}

/// Free rigid body, no joints and no gravity, at rest at the origin.
pub fn free_body(mass: f64, inertia: Mat3, formulation: Formulation) -> MultibodyModel {
    let preset = ModelPreset {
        name: "free_body".into(),
        bodies: vec![BodyParams {
            mass,
            inertia,
            attachments: vec![],
        }],
        anchors: vec![],
        gravity: Vec3::zeros(),
        initial_config: MbsConfig::identity(1, Formulation::Se3),
        initial_seed: MbsVelocity::zeros(1),
    };
    finish(None, preset, vec![], formulation)
}

/// Heavy top held by two identical pivots; the constraint Jacobian has rank 3
/// out of 6 rows. The initial state is built without projection.
pub fn duplicated_pivot(formulation: Formulation) -> MultibodyModel {
    let top = heavy_top(Formulation::Se3);
    let mut preset = top.preset().clone();
    preset.name = "duplicated_pivot".into();
    let mut joints = top.joints().to_vec();
    joints.push(joints[0].clone());
    let vel = top.initial_state().vel.clone();
    MultibodyModel {
        kind: None,
        formulation,
        bodies: preset.bodies.clone(),
        joints,
        gravity: preset.gravity,
        initial: crate::state::MbsState::new(preset.initial_config.clone(), vel)
            .unwrap()
            .to_formulation(formulation),
        preset,
    }
}
