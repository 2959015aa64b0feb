//! Explicit Munthe-Kaas Runge–Kutta stepping on the multibody state space.
//!
//! With `F(t, X)` the state-space vector field, one step of size `h` is
//!
//! ```text
//! Ψ₁ = 0,  Ψⱼ = h Σ_{l<j} aⱼₗ kₗ
//! kⱼ = dexp⁻¹_{−Ψⱼ} F(t + cⱼh, X·exp Ψⱼ)
//! X ← X·exp(h Σ bⱼ kⱼ)
//! ```
//!
//! No projection or stabilization is applied after the update.

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;

use crate::dae::{self, DaeModel};
use crate::state::{state_dexpinv, state_retract, AlgebraElement, MbsState};
use crate::{Error, Result};

/// Upper bound on the number of fixed steps of one [`integrate`] call.
pub const MAX_STEPS: usize = 100_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct ButcherTableau {
    pub name: String,
    /// Row-major, strictly lower triangular.
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

impl ButcherTableau {
    pub fn new(name: impl Into<String>, a: Vec<Vec<f64>>, b: Vec<f64>, c: Vec<f64>) -> Result<Self> {
        let t = ButcherTableau {
            name: name.into(),
            a,
            b,
            c,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn stages(&self) -> usize {
        self.b.len()
    }

    pub fn validate(&self) -> Result<()> {
        let s = self.b.len();
        let bad = |msg: String| Err(Error::InvalidArgument(format!("tableau {}: {msg}", self.name)));
        if s == 0 || self.c.len() != s || self.a.len() != s {
            return bad("inconsistent stage counts".into());
        }
        for (j, row) in self.a.iter().enumerate() {
            if row.len() != s {
                return bad(format!("row {j} has {} entries", row.len()));
            }
            if row[j..].iter().any(|&x| x != 0.0) {
                return bad(format!("row {j} is not strictly lower triangular"));
            }
            let sum: f64 = row.iter().sum();
            if (sum - self.c[j]).abs() > 1e-14 {
                return bad(format!("c[{j}] = {} but row sum is {sum}", self.c[j]));
            }
        }
        let sum_b: f64 = self.b.iter().sum();
        if (sum_b - 1.0).abs() > 1e-14 {
            return bad(format!("weights sum to {sum_b}"));
        }
        Ok(())
    }

    pub fn euler() -> Self {
        ButcherTableau {
            name: "euler".into(),
            a: vec![vec![0.0]],
            b: vec![1.0],
            c: vec![0.0],
        }
    }

    pub fn heun() -> Self {
        ButcherTableau {
            name: "heun".into(),
            a: vec![vec![0.0, 0.0], vec![1.0, 0.0]],
            b: vec![0.5, 0.5],
            c: vec![0.0, 1.0],
        }
    }

    pub fn rk4() -> Self {
        ButcherTableau {
            name: "rk4".into(),
            a: vec![
                vec![0.0, 0.0, 0.0, 0.0],
                vec![0.5, 0.0, 0.0, 0.0],
                vec![0.0, 0.5, 0.0, 0.0],
                vec![0.0, 0.0, 1.0, 0.0],
            ],
            b: vec![1.0 / 6.0, 1.0 / 3.0, 1.0 / 3.0, 1.0 / 6.0],
            c: vec![0.0, 0.5, 0.5, 1.0],
        }
    }
}

impl fmt::Display for ButcherTableau {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl FromStr for ButcherTableau {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        builtin_tableaus()
            .into_iter()
            .find(|t| t.name == s.trim().to_ascii_lowercase())
            .ok_or_else(|| format!("unknown tableau `{s}` (expected euler, heun or rk4)"))
    }
}

/// Explicit Euler, Heun and classical RK4.
pub fn builtin_tableaus() -> Vec<ButcherTableau> {
    vec![ButcherTableau::euler(), ButcherTableau::heun(), ButcherTableau::rk4()]
}

/// One MK step from `(t, state)`.
pub fn mk_step(
    model: &dyn DaeModel,
    tableau: &ButcherTableau,
    t: f64,
    state: &MbsState,
    h: f64,
) -> Result<MbsState> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!("step size {h}")));
    }
    let f = state.formulation();
    let n = state.n_bodies();
    let s = tableau.stages();
    let mut k: Vec<AlgebraElement> = Vec::with_capacity(s);
    for j in 0..s {
        let stage = |e: Error| Error::Stage {
            stage: j + 1,
            source: Box::new(e),
        };
        let mut psi = AlgebraElement::zeros(n);
        for (l, kl) in k.iter().enumerate() {
            let a = tableau.a[j][l];
            if a != 0.0 {
                psi.axpy(h * a, kl);
            }
        }
        let kj = if j == 0 {
            dae::vector_field(model, t, state).map_err(stage)?
        } else {
            let x = state_retract(state, &psi).map_err(stage)?;
            let field = dae::vector_field(model, t + tableau.c[j] * h, &x).map_err(stage)?;
            state_dexpinv(&-&psi, &field, f).map_err(stage)?
        };
        k.push(kj);
    }
    let mut phi = AlgebraElement::zeros(n);
    for (bj, kj) in tableau.b.iter().zip(&k) {
        phi.axpy(h * bj, kj);
    }
    state_retract(state, &phi)
}

/// Quantities recorded at each output sample.
#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostics {
    /// Constraint vector `g(q)`.
    pub constraint: DVector<f64>,
    /// Euclidean norm of each joint's block of `g`.
    pub joints: Vec<f64>,
    pub kinetic: f64,
    pub potential: f64,
    /// Largest `max |RᵀR − I|` over the bodies.
    pub ortho_err: f64,
}

impl Diagnostics {
    pub fn of(model: &dyn DaeModel, state: &MbsState) -> Self {
        let constraint = model.constraint(&state.q);
        let joints = model
            .joint_rows()
            .into_iter()
            .map(|r| constraint.rows(r.start, r.len()).norm())
            .collect();
        let (kinetic, potential) = model.energies(&state.q, &state.vel);
        Diagnostics {
            constraint,
            joints,
            kinetic,
            potential,
            ortho_err: state.q.orthonormality_error(),
        }
    }

    pub fn max_abs_constraint(&self) -> f64 {
        self.constraint.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn energy(&self) -> f64 {
        self.kinetic + self.potential
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<MbsState>,
    pub diagnostics: Vec<Diagnostics>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn last_state(&self) -> &MbsState {
        self.states.last().expect("trajectory has at least one sample")
    }

    /// Largest constraint norm of each joint over the recorded samples.
    pub fn max_joint_violations(&self) -> Vec<f64> {
        let joints = self.diagnostics.first().map_or(0, |d| d.joints.len());
        (0..joints)
            .map(|j| self.diagnostics.iter().map(|d| d.joints[j]).fold(0.0, f64::max))
            .collect()
    }

    /// Largest `‖g(q)‖` over the recorded samples.
    pub fn max_violation(&self) -> f64 {
        self.diagnostics
            .iter()
            .map(|d| d.constraint.norm())
            .fold(0.0, f64::max)
    }

    /// `|T(t_end) − T₀| / T₀`.
    pub fn final_kinetic_drift(&self) -> f64 {
        let t0 = self.diagnostics[0].kinetic;
        let t1 = self.diagnostics.last().unwrap().kinetic;
        relative_drift(t1, t0)
    }
}

/// `|x − x₀| / |x₀|`, or the absolute difference when `x₀ = 0`.
pub fn relative_drift(x: f64, x0: f64) -> f64 {
    if x0 == 0.0 {
        (x - x0).abs()
    } else {
        ((x - x0) / x0).abs()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegrationOptions {
    /// Record every `output_stride`-th step; the final step is always recorded.
    pub output_stride: usize,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        IntegrationOptions { output_stride: 1 }
    }
}

/// Fixed-step integration over `N = round((t_end − t0)/h)` steps.
pub fn integrate(
    model: &dyn DaeModel,
    tableau: &ButcherTableau,
    x0: &MbsState,
    t0: f64,
    t_end: f64,
    h: f64,
) -> Result<Trajectory> {
    integrate_with(model, tableau, x0, t0, t_end, h, IntegrationOptions::default())
}

pub fn integrate_with(
    model: &dyn DaeModel,
    tableau: &ButcherTableau,
    x0: &MbsState,
    t0: f64,
    t_end: f64,
    h: f64,
    options: IntegrationOptions,
) -> Result<Trajectory> {
    tableau.validate()?;
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidArgument(format!("step size {h}")));
    }
    if !(t_end >= t0 && t0.is_finite() && t_end.is_finite()) {
        return Err(Error::InvalidArgument(format!("time span [{t0}, {t_end}]")));
    }
    if options.output_stride == 0 {
        return Err(Error::InvalidArgument("output_stride must be at least 1".into()));
    }
    let steps = ((t_end - t0) / h).round();
    if steps > MAX_STEPS as f64 {
        return Err(Error::InvalidArgument(format!("{steps} steps exceed the cap of {MAX_STEPS}")));
    }
    let steps = steps as usize;
    if x0.n_bodies() != model.n_bodies() {
        return Err(Error::DimensionMismatch {
            what: "bodies",
            expected: model.n_bodies(),
            found: x0.n_bodies(),
        });
    }
    if x0.formulation() != model.formulation() {
        return Err(Error::FormulationMismatch {
            expected: model.formulation(),
            found: x0.formulation(),
        });
    }

    let mut traj = Trajectory {
        times: vec![t0],
        states: vec![x0.clone()],
        diagnostics: vec![Diagnostics::of(model, x0)],
    };
    let mut state = x0.clone();
    for i in 0..steps {
        let t = t0 + i as f64 * h;
        state = mk_step(model, tableau, t, &state, h).map_err(|e| Error::Integration {
            step: i + 1,
            t,
            source: Box::new(e),
        })?;
        let done = i + 1;
        if done % options.output_stride == 0 || done == steps {
            traj.times.push(t0 + done as f64 * h);
            traj.diagnostics.push(Diagnostics::of(model, &state));
            traj.states.push(state.clone());
        }
    }
    Ok(traj)
}

#[cfg(test)]
mod tests;
