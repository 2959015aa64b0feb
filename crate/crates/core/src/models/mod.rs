//! Rigid bodies connected by spherical joints, expressed in either formulation.
//!
//! Every benchmark mechanism is a [`MultibodyModel`]: COM-frame Newton–Euler
//! bodies plus a list of spherical joints, each joint either tying a body
//! point to a fixed world anchor or tying two body points together. The
//! constraint of each joint is written so that its Jacobian is exactly the
//! derivative of `g` along `q̇ = qV`:
//!
//! * ground joint, SE(3): `g = −s − Rᵀ(r − a)`, `J = (−p̂, −I)` with `p = Rᵀ(r − a)`,
//!   `η = ω̂ω̂p − ω̂v`;
//! * ground joint, SO(3)×ℝ³: `g = −(Rs + r − a)`, `J = (Rŝ, −I)`, `η = Rω̂ω̂s`;
//! * body pair, SE(3): `g = −(R₁s₁ + r₁ − R₂s₂ − r₂)`,
//!   `J = (R₁ŝ₁, −R₁, −R₂ŝ₂, R₂)`, `η = R₁ω̂₁(ω̂₁s₁ + v₁) − R₂ω̂₂(ω̂₂s₂ + v₂)`;
//! * body pair, SO(3)×ℝ³: `J = (R₁ŝ₁, −I, −R₂ŝ₂, I)`, `η = R₁ω̂₁ω̂₁s₁ − R₂ω̂₂ω̂₂s₂`.
//!
//! On feasible configurations (`p = −s`) these reduce to the familiar
//! `(ŝ, −I)` blocks. A per-joint sign flips `g`, `J` and `η` together; the
//! heavy top uses `−1`, which yields `J = (r̂⁰, I)` and `g = Rᵀrˢ − r⁰`.

mod presets;

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};

use crate::dae::{self, DaeModel};
use crate::lie::{hat3, Formulation, Mat3, Pose, Rotation, Vec3};
use crate::state::{MbsConfig, MbsState, MbsVelocity};

pub use presets::{
    box_inertia, build, build_with_gravity, double_pendulum, duplicated_pivot, floating_pair,
    free_body, heavy_top, heavy_top_with, three_bar, ALUMINIUM_DENSITY, STANDARD_GRAVITY,
};

/// The four benchmark mechanisms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ModelKind {
    HeavyTop,
    DoublePendulum,
    FloatingPair,
    ThreeBar,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [
        ModelKind::HeavyTop,
        ModelKind::DoublePendulum,
        ModelKind::FloatingPair,
        ModelKind::ThreeBar,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::HeavyTop => "heavy_top",
            ModelKind::DoublePendulum => "double_pendulum",
            ModelKind::FloatingPair => "floating_pair",
            ModelKind::ThreeBar => "three_bar",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        ModelKind::ALL
            .into_iter()
            .find(|k| k.name() == key)
            .ok_or_else(|| {
                format!("unknown model `{s}` (expected heavy_top, double_pendulum, floating_pair or three_bar)")
            })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BodyParams {
    /// kg
    pub mass: f64,
    /// kg·m², about the COM in body axes
    pub inertia: Mat3,
    /// Joint points measured from the COM, body axes (m).
    pub attachments: Vec<Vec3>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum JointKind {
    /// Body point `attach` coincides with the world point `anchor`.
    Ground {
        body: usize,
        attach: Vec3,
        anchor: Vec3,
    },
    /// Body points `attach_a` on `body_a` and `attach_b` on `body_b` coincide.
    Pair {
        body_a: usize,
        attach_a: Vec3,
        body_b: usize,
        attach_b: Vec3,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Joint {
    pub kind: JointKind,
    /// `±1`, applied to `g`, `J` and `η` of this joint.
    pub sign: f64,
}

/// Parameters and initial conditions of one mechanism.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelPreset {
    pub name: String,
    pub bodies: Vec<BodyParams>,
    /// World-frame ground points.
    pub anchors: Vec<Vec3>,
    /// m/s²
    pub gravity: Vec3,
    /// SE(3)-tagged initial configuration.
    pub initial_config: MbsConfig,
    /// Body-fixed velocity seed, projected onto the constraints before use.
    pub initial_seed: MbsVelocity,
}

/// Spherical-joint multibody system in one formulation.
#[derive(Clone, Debug)]
pub struct MultibodyModel {
    kind: Option<ModelKind>,
    formulation: Formulation,
    bodies: Vec<BodyParams>,
    joints: Vec<Joint>,
    gravity: Vec3,
    preset: ModelPreset,
    initial: MbsState,
}

impl MultibodyModel {
    /// Builds the model and its consistent initial state.
    ///
    /// The velocity seed is projected with the SE(3) form of the model and the
    /// resulting physical state is then expressed in `formulation`, so both
    /// formulations start from the same motion.
    pub fn new(
        kind: Option<ModelKind>,
        preset: ModelPreset,
        joints: Vec<Joint>,
        formulation: Formulation,
    ) -> crate::Result<Self> {
        let mut model = MultibodyModel {
            kind,
            formulation: Formulation::Se3,
            bodies: preset.bodies.clone(),
            joints,
            gravity: preset.gravity,
            initial: MbsState::identity(preset.bodies.len(), Formulation::Se3),
            preset,
        };
        let q = model.preset.initial_config.with_formulation(Formulation::Se3);
        let vel = dae::consistent_velocity(&model, &q, &model.preset.initial_seed)?;
        let state = MbsState::new(q, vel)?;
        model.initial = state.to_formulation(formulation);
        model.formulation = formulation;
        Ok(model)
    }

    pub fn kind(&self) -> Option<ModelKind> {
        self.kind
    }

    pub fn name(&self) -> &str {
        &self.preset.name
    }

    pub fn preset(&self) -> &ModelPreset {
        &self.preset
    }

    pub fn bodies(&self) -> &[BodyParams] {
        &self.bodies
    }

    pub fn joints(&self) -> &[Joint] {
        &self.joints
    }

    pub fn gravity(&self) -> Vec3 {
        self.gravity
    }

    /// Consistent initial state in this model's formulation.
    pub fn initial_state(&self) -> &MbsState {
        &self.initial
    }

    /// The same mechanism and physical initial state in the other formulation.
    pub fn with_formulation(&self, formulation: Formulation) -> MultibodyModel {
        MultibodyModel {
            formulation,
            initial: self.initial.to_formulation(formulation),
            ..self.clone()
        }
    }

    fn joint_blocks(
        &self,
        joint: &Joint,
        q: &MbsConfig,
    ) -> (Vec3, Vec<(usize, Mat3, Mat3)>) {
        let poses = q.poses();
        let s = joint.sign;
        match (&joint.kind, self.formulation) {
            (JointKind::Ground { body, attach, anchor }, Formulation::Se3) => {
                let pose = &poses[*body];
                let p = pose.rot.apply_inverse(&(pose.pos - anchor));
                let g = -attach - p;
                (g * s, vec![(*body, -hat3(&p) * s, -Mat3::identity() * s)])
            }
            (JointKind::Ground { body, attach, anchor }, Formulation::DirectProduct) => {
                let pose = &poses[*body];
                let g = -(pose.rot.apply(attach) + pose.pos - anchor);
                let jw = pose.rot.matrix() * hat3(attach);
                (g * s, vec![(*body, jw * s, -Mat3::identity() * s)])
            }
            (
                JointKind::Pair {
                    body_a,
                    attach_a,
                    body_b,
                    attach_b,
                },
                f,
            ) => {
                let (pa, pb) = (&poses[*body_a], &poses[*body_b]);
                let g = -(pa.rot.apply(attach_a) + pa.pos - pb.rot.apply(attach_b) - pb.pos);
                let (ra, rb) = (pa.rot.matrix(), pb.rot.matrix());
                let (jva, jvb) = match f {
                    Formulation::Se3 => (-ra, *rb),
                    Formulation::DirectProduct => (-Mat3::identity(), Mat3::identity()),
                };
                (
                    g * s,
                    vec![
                        (*body_a, ra * hat3(attach_a) * s, jva * s),
                        (*body_b, -rb * hat3(attach_b) * s, jvb * s),
                    ],
                )
            }
        }
    }

    fn joint_eta(&self, joint: &Joint, q: &MbsConfig, vel: &MbsVelocity) -> Vec3 {
        let poses = q.poses();
        let tw = &vel.twists;
        let value = match (&joint.kind, self.formulation) {
            (JointKind::Ground { body, anchor, .. }, Formulation::Se3) => {
                let pose = &poses[*body];
                let (w, v) = (tw[*body].w, tw[*body].v);
                let p = pose.rot.apply_inverse(&(pose.pos - anchor));
                w.cross(&w.cross(&p)) - w.cross(&v)
            }
            (JointKind::Ground { body, attach, .. }, Formulation::DirectProduct) => {
                let w = tw[*body].w;
                poses[*body].rot.apply(&w.cross(&w.cross(attach)))
            }
            (
                JointKind::Pair {
                    body_a,
                    attach_a,
                    body_b,
                    attach_b,
                },
                f,
            ) => {
                let term = |i: usize, s: &Vec3| {
                    let (w, v) = (tw[i].w, tw[i].v);
                    let inner = match f {
                        Formulation::Se3 => w.cross(s) + v,
                        Formulation::DirectProduct => w.cross(s),
                    };
                    poses[i].rot.apply(&w.cross(&inner))
                };
                term(*body_a, attach_a) - term(*body_b, attach_b)
            }
        };
        value * joint.sign
    }
}

impl DaeModel for MultibodyModel {
    fn formulation(&self) -> Formulation {
        self.formulation
    }

    fn n_bodies(&self) -> usize {
        self.bodies.len()
    }

    fn n_constraints(&self) -> usize {
        3 * self.joints.len()
    }

    fn mass_matrix(&self, _q: &MbsConfig) -> DMatrix<f64> {
        let n = self.bodies.len();
        let mut m = DMatrix::zeros(6 * n, 6 * n);
        for (i, b) in self.bodies.iter().enumerate() {
            m.fixed_view_mut::<3, 3>(6 * i, 6 * i).copy_from(&b.inertia);
            m.fixed_view_mut::<3, 3>(6 * i + 3, 6 * i + 3)
                .copy_from(&(Mat3::identity() * b.mass));
        }
        m
    }

    fn forces(&self, q: &MbsConfig, vel: &MbsVelocity, _t: f64) -> DVector<f64> {
        let mut out = DVector::zeros(6 * self.bodies.len());
        for (i, ((b, pose), tw)) in self
            .bodies
            .iter()
            .zip(q.poses())
            .zip(&vel.twists)
            .enumerate()
        {
            let torque = -tw.w.cross(&(b.inertia * tw.w));
            let weight = self.gravity * b.mass;
            let force = match self.formulation {
                Formulation::Se3 => pose.rot.apply_inverse(&weight) - tw.w.cross(&tw.v) * b.mass,
                Formulation::DirectProduct => weight,
            };
            out.fixed_rows_mut::<3>(6 * i).copy_from(&torque);
            out.fixed_rows_mut::<3>(6 * i + 3).copy_from(&force);
        }
        out
    }

    fn constraint(&self, q: &MbsConfig) -> DVector<f64> {
        let mut g = DVector::zeros(self.n_constraints());
        for (k, joint) in self.joints.iter().enumerate() {
            let (gk, _) = self.joint_blocks(joint, q);
            g.fixed_rows_mut::<3>(3 * k).copy_from(&gk);
        }
        g
    }

    fn jacobian(&self, q: &MbsConfig) -> DMatrix<f64> {
        let mut jac = DMatrix::zeros(self.n_constraints(), 6 * self.bodies.len());
        for (k, joint) in self.joints.iter().enumerate() {
            let (_, blocks) = self.joint_blocks(joint, q);
            for (body, jw, jv) in blocks {
                jac.fixed_view_mut::<3, 3>(3 * k, 6 * body).copy_from(&jw);
                jac.fixed_view_mut::<3, 3>(3 * k, 6 * body + 3).copy_from(&jv);
            }
        }
        jac
    }

    fn acc_rhs(&self, q: &MbsConfig, vel: &MbsVelocity) -> DVector<f64> {
        let mut eta = DVector::zeros(self.n_constraints());
        for (k, joint) in self.joints.iter().enumerate() {
            eta.fixed_rows_mut::<3>(3 * k)
                .copy_from(&self.joint_eta(joint, q, vel));
        }
        eta
    }

    /// `T = Σ ½(ωᵀΘω + m‖v‖²)`, `U = −Σ m gˢ·r`. `‖v‖` is the COM speed in
    /// both formulations.
    fn energies(&self, q: &MbsConfig, vel: &MbsVelocity) -> (f64, f64) {
        let mut kinetic = 0.0;
        let mut potential = 0.0;
        for ((b, pose), tw) in self.bodies.iter().zip(q.poses()).zip(&vel.twists) {
            kinetic += 0.5 * (tw.w.dot(&(b.inertia * tw.w)) + b.mass * tw.v.norm_squared());
            potential -= b.mass * self.gravity.dot(&pose.pos);
        }
        (kinetic, potential)
    }

    fn joint_rows(&self) -> Vec<Range<usize>> {
        (0..self.joints.len()).map(|j| 3 * j..3 * j + 3).collect()
    }
}

/// Pose with rotation `exp(ŵ)` and position `r`, tagged SE(3).
pub(crate) fn pose(rot: Rotation, pos: Vec3) -> Pose {
    Pose::new(rot, pos, Formulation::Se3)
}
