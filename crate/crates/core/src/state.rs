//! Composite multibody state spaces `Gⁿ × (ℝ⁶)ⁿ` with `G = SE(3)` or `SO(3)×ℝ³`.
//!
//! Group operations act body by body; velocity slots form an abelian factor
//! that adds. Algebra elements carry `n` twists (the increments of the
//! configuration) and `n` raw six-vectors (the increments of the velocities).

use std::ops::{Add, Mul, Neg};

use crate::lie::{self, Formulation, Pose, Twist, Vec6};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct MbsConfig {
    poses: Vec<Pose>,
}

impl MbsConfig {
    /// All poses must carry the same formulation tag and there must be at least one.
    pub fn new(poses: Vec<Pose>) -> Result<Self> {
        let first = poses
            .first()
            .ok_or_else(|| Error::InvalidArgument("configuration with zero bodies".into()))?
            .formulation;
        if let Some(p) = poses.iter().find(|p| p.formulation != first) {
            return Err(Error::FormulationMismatch {
                expected: first,
                found: p.formulation,
            });
        }
        Ok(MbsConfig { poses })
    }

    pub fn identity(n: usize, formulation: Formulation) -> Self {
        MbsConfig {
            poses: vec![Pose::identity(formulation); n.max(1)],
        }
    }

    pub fn poses(&self) -> &[Pose] {
        &self.poses
    }

    pub fn len(&self) -> usize {
        self.poses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poses.is_empty()
    }

    pub fn formulation(&self) -> Formulation {
        self.poses[0].formulation
    }

    /// Same `(R, r)` pairs tagged with another group.
    pub fn with_formulation(&self, formulation: Formulation) -> Self {
        MbsConfig {
            poses: self
                .poses
                .iter()
                .map(|p| p.with_formulation(formulation))
                .collect(),
        }
    }

    /// Largest `max |RᵀR − I|` over all bodies.
    pub fn orthonormality_error(&self) -> f64 {
        self.poses
            .iter()
            .map(|p| p.rot.orthonormality_error())
            .fold(0.0, f64::max)
    }

    /// Right-multiplies body `body` by `exp(x)` in its own group.
    pub fn perturbed(&self, body: usize, x: &Twist) -> Self {
        let mut poses = self.poses.clone();
        poses[body] = poses[body].compose(&lie::exp(x, poses[body].formulation));
        MbsConfig { poses }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MbsVelocity {
    pub twists: Vec<Twist>,
}

impl MbsVelocity {
    pub fn new(twists: Vec<Twist>) -> Self {
        MbsVelocity { twists }
    }

    pub fn zeros(n: usize) -> Self {
        MbsVelocity {
            twists: vec![Twist::zero(); n],
        }
    }

    pub fn len(&self) -> usize {
        self.twists.len()
    }

    pub fn is_empty(&self) -> bool {
        self.twists.is_empty()
    }

    /// Stacked `(ω₁, v₁, …, ωₙ, vₙ)`.
    pub fn to_dvector(&self) -> nalgebra::DVector<f64> {
        nalgebra::DVector::from_iterator(
            6 * self.twists.len(),
            self.twists.iter().flat_map(|t| t.to_vec6().into_iter().copied().collect::<Vec<_>>()),
        )
    }

    pub fn from_slice(x: &[f64]) -> Result<Self> {
        if x.len() % 6 != 0 {
            return Err(Error::DimensionMismatch {
                what: "stacked velocity",
                expected: 6 * (x.len() / 6 + 1),
                found: x.len(),
            });
        }
        Ok(MbsVelocity {
            twists: x
                .chunks_exact(6)
                .map(|c| Twist::from_vec6(&Vec6::from_column_slice(c)))
                .collect(),
        })
    }
}

/// Multibody state `X = (q, V)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MbsState {
    pub q: MbsConfig,
    pub vel: MbsVelocity,
}

impl MbsState {
    pub fn new(q: MbsConfig, vel: MbsVelocity) -> Result<Self> {
        if q.len() != vel.len() {
            return Err(Error::DimensionMismatch {
                what: "velocity slots",
                expected: q.len(),
                found: vel.len(),
            });
        }
        Ok(MbsState { q, vel })
    }

    pub fn identity(n: usize, formulation: Formulation) -> Self {
        MbsState {
            q: MbsConfig::identity(n, formulation),
            vel: MbsVelocity::zeros(n.max(1)),
        }
    }

    pub fn n_bodies(&self) -> usize {
        self.q.len()
    }

    pub fn formulation(&self) -> Formulation {
        self.q.formulation()
    }

    /// Expresses the same physical state in the other formulation.
    ///
    /// Angular velocities are body-fixed in both. The linear part is the
    /// body-frame COM velocity `v` for SE(3) and the spatial `vˢ = R v` for
    /// SO(3)×ℝ³.
    pub fn to_formulation(&self, target: Formulation) -> MbsState {
        let from = self.formulation();
        let twists = self
            .q
            .poses()
            .iter()
            .zip(&self.vel.twists)
            .map(|(p, t)| match (from, target) {
                (Formulation::Se3, Formulation::DirectProduct) => Twist::new(t.w, p.rot.apply(&t.v)),
                (Formulation::DirectProduct, Formulation::Se3) => {
                    Twist::new(t.w, p.rot.apply_inverse(&t.v))
                }
                _ => *t,
            })
            .collect();
        MbsState {
            q: self.q.with_formulation(target),
            vel: MbsVelocity::new(twists),
        }
    }
}

/// Element `x = (V₁, …, Vₙ, A₁, …, Aₙ)` of the state-space algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    pub vel: Vec<Twist>,
    pub acc: Vec<Vec6>,
}

impl AlgebraElement {
    pub fn new(vel: Vec<Twist>, acc: Vec<Vec6>) -> Result<Self> {
        if vel.len() != acc.len() {
            return Err(Error::DimensionMismatch {
                what: "acceleration slots",
                expected: vel.len(),
                found: acc.len(),
            });
        }
        Ok(AlgebraElement { vel, acc })
    }

    pub fn zeros(n: usize) -> Self {
        AlgebraElement {
            vel: vec![Twist::zero(); n],
            acc: vec![Vec6::zeros(); n],
        }
    }

    pub fn len(&self) -> usize {
        self.vel.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vel.is_empty()
    }

    /// `self += s · other`
    pub fn axpy(&mut self, s: f64, other: &AlgebraElement) {
        debug_assert_eq!(self.len(), other.len());
        for (a, b) in self.vel.iter_mut().zip(&other.vel) {
            *a += *b * s;
        }
        for (a, b) in self.acc.iter_mut().zip(&other.acc) {
            *a += b * s;
        }
    }

    pub fn norm(&self) -> f64 {
        let v: f64 = self.vel.iter().map(|t| t.norm().powi(2)).sum();
        let a: f64 = self.acc.iter().map(|x| x.norm_squared()).sum();
        (v + a).sqrt()
    }
}

impl Add for &AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: &AlgebraElement) -> AlgebraElement {
        let mut out = self.clone();
        out.axpy(1.0, rhs);
        out
    }
}

impl Mul<f64> for &AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, s: f64) -> AlgebraElement {
        AlgebraElement {
            vel: self.vel.iter().map(|t| *t * s).collect(),
            acc: self.acc.iter().map(|a| a * s).collect(),
        }
    }
}

impl Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        self * -1.0
    }
}

fn check_same_shape(expected: usize, found: usize, what: &'static str) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch {
            what,
            expected,
            found,
        });
    }
    Ok(())
}

/// `X′·X″ = (C₁′C₁″, …, V₁′+V₁″, …)`.
pub fn state_compose(a: &MbsState, b: &MbsState) -> Result<MbsState> {
    check_same_shape(a.n_bodies(), b.n_bodies(), "bodies")?;
    if a.formulation() != b.formulation() {
        return Err(Error::FormulationMismatch {
            expected: a.formulation(),
            found: b.formulation(),
        });
    }
    let poses = a
        .q
        .poses()
        .iter()
        .zip(b.q.poses())
        .map(|(x, y)| x.compose(y))
        .collect();
    let twists = a
        .vel
        .twists
        .iter()
        .zip(&b.vel.twists)
        .map(|(x, y)| *x + *y)
        .collect();
    Ok(MbsState {
        q: MbsConfig { poses },
        vel: MbsVelocity::new(twists),
    })
}

/// `exp x = (exp V₁, …, exp Vₙ, A₁, …, Aₙ)`.
pub fn state_exp(x: &AlgebraElement, formulation: Formulation) -> MbsState {
    let poses = x.vel.iter().map(|v| lie::exp(v, formulation)).collect();
    let twists = x.acc.iter().map(Twist::from_vec6).collect();
    MbsState {
        q: MbsConfig { poses },
        vel: MbsVelocity::new(twists),
    }
}

/// `X · exp x`, the update used by the integrator.
pub fn state_retract(state: &MbsState, x: &AlgebraElement) -> Result<MbsState> {
    check_same_shape(state.n_bodies(), x.len(), "algebra slots")?;
    state_compose(state, &state_exp(x, state.formulation()))
}

/// `dexp⁻¹_x y`: componentwise dexp⁻¹ on the velocity slots, acceleration
/// slots of `y` unchanged.
pub fn state_dexpinv(
    x: &AlgebraElement,
    y: &AlgebraElement,
    formulation: Formulation,
) -> Result<AlgebraElement> {
    check_same_shape(x.len(), y.len(), "algebra slots")?;
    let vel = x
        .vel
        .iter()
        .zip(&y.vel)
        .map(|(a, b)| lie::dexpinv(a, b, formulation))
        .collect::<Result<Vec<_>>>()?;
    Ok(AlgebraElement {
        vel,
        acc: y.acc.clone(),
    })
}
