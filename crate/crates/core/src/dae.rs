//! Index-1 formulation of the constrained equations of motion.
//!
//! At a state `X = (q, V)` the accelerations and multipliers solve
//!
//! ```text
//! [ M  Jᵀ ] [ V̇ ]   [ Q ]
//! [ J  0  ] [ λ ] = [ η ]
//! ```
//!
//! and the state-space vector field is `F(t, X) = (V, V̇)`. No constraint
//! stabilization is applied; the drift of `g(q)` is what the benchmarks measure.

use std::ops::Range;

use nalgebra::{DMatrix, DVector};

use crate::lie::{Formulation, Vec6};
use crate::state::{AlgebraElement, MbsConfig, MbsState, MbsVelocity};
use crate::{Error, Result};

/// Saddle matrices with a 1-norm condition estimate above this are rejected.
pub const MAX_CONDITION: f64 = 1e12;

/// Relative residual accepted for each block row of the saddle solve.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// A constrained multibody model in one formulation.
///
/// Vectors are stacked body by body as `(ω₁, v₁, …, ωₙ, vₙ)`; the meaning of
/// `v` follows [`DaeModel::formulation`].
pub trait DaeModel: Send + Sync {
    fn formulation(&self) -> Formulation;
    fn n_bodies(&self) -> usize;
    fn n_constraints(&self) -> usize;

    /// `6n × 6n`, symmetric positive definite.
    fn mass_matrix(&self, q: &MbsConfig) -> DMatrix<f64>;
    /// Generalized forces including gyroscopic terms.
    fn forces(&self, q: &MbsConfig, vel: &MbsVelocity, t: f64) -> DVector<f64>;
    /// Geometric constraints `g(q)`.
    fn constraint(&self, q: &MbsConfig) -> DVector<f64>;
    /// `m × 6n` constraint Jacobian with `J V = ġ` along `q̇ = qV`.
    fn jacobian(&self, q: &MbsConfig) -> DMatrix<f64>;
    /// Right-hand side of the acceleration constraints `J V̇ = η(q, V)`.
    fn acc_rhs(&self, q: &MbsConfig, vel: &MbsVelocity) -> DVector<f64>;
    /// `(T, U)`: kinetic and potential energy.
    fn energies(&self, q: &MbsConfig, vel: &MbsVelocity) -> (f64, f64);

    /// Constraint rows grouped by joint. Defaults to one group of three rows
    /// per spherical joint.
    fn joint_rows(&self) -> Vec<Range<usize>> {
        (0..self.n_constraints() / 3).map(|j| 3 * j..3 * j + 3).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SaddleSolution {
    pub vdot: DVector<f64>,
    pub lambda: DVector<f64>,
}

fn one_norm(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn check_dims(model: &dyn DaeModel, state: &MbsState) -> Result<()> {
    if state.n_bodies() != model.n_bodies() {
        return Err(Error::DimensionMismatch {
            what: "bodies",
            expected: model.n_bodies(),
            found: state.n_bodies(),
        });
    }
    if state.formulation() != model.formulation() {
        return Err(Error::FormulationMismatch {
            expected: model.formulation(),
            found: state.formulation(),
        });
    }
    Ok(())
}

/// Solves the saddle-point system by LU with partial pivoting.
pub fn solve_index1(model: &dyn DaeModel, t: f64, state: &MbsState) -> Result<SaddleSolution> {
    check_dims(model, state)?;
    let n = 6 * model.n_bodies();
    let m = model.n_constraints();
    let q = &state.q;
    let mass = model.mass_matrix(q);
    let forces = model.forces(q, &state.vel, t);

    let mut a = DMatrix::zeros(n + m, n + m);
    let mut rhs = DVector::zeros(n + m);
    a.view_mut((0, 0), (n, n)).copy_from(&mass);
    rhs.rows_mut(0, n).copy_from(&forces);
    let (jac, eta) = if m > 0 {
        let jac = model.jacobian(q);
        let eta = model.acc_rhs(q, &state.vel);
        a.view_mut((0, n), (n, m)).copy_from(&jac.transpose());
        a.view_mut((n, 0), (m, n)).copy_from(&jac);
        rhs.rows_mut(n, m).copy_from(&eta);
        (jac, eta)
    } else {
        (DMatrix::zeros(0, n), DVector::zeros(0))
    };

    let lu = a.clone().lu();
    let inv = lu
        .try_inverse()
        .ok_or(Error::SingularSaddle { t, condition: f64::INFINITY })?;
    let condition = one_norm(&a) * one_norm(&inv);
    if !condition.is_finite() || condition > MAX_CONDITION {
        return Err(Error::SingularSaddle { t, condition });
    }
    let mut x = lu
        .solve(&rhs)
        .ok_or(Error::SingularSaddle { t, condition })?;
    // one pass of iterative refinement
    if let Some(dx) = lu.solve(&(&rhs - &a * &x)) {
        x += dx;
    }
    let vdot = x.rows(0, n).into_owned();
    let lambda = x.rows(n, m).into_owned();

    let dyn_res = (&mass * &vdot + jac.transpose() * &lambda - &forces).norm();
    let dyn_tol = RESIDUAL_TOL * (1.0 + forces.norm());
    if dyn_res > dyn_tol {
        return Err(Error::SaddleResidual {
            t,
            residual: dyn_res,
            tolerance: dyn_tol,
        });
    }
    if m > 0 {
        let con_res = (&jac * &vdot - &eta).norm();
        let con_tol = RESIDUAL_TOL * (1.0 + eta.norm());
        if con_res > con_tol {
            return Err(Error::SaddleResidual {
                t,
                residual: con_res,
                tolerance: con_tol,
            });
        }
    }
    Ok(SaddleSolution { vdot, lambda })
}

/// `F(t, X) = (V, V̇)`.
pub fn vector_field(model: &dyn DaeModel, t: f64, state: &MbsState) -> Result<AlgebraElement> {
    let sol = solve_index1(model, t, state)?;
    let acc = sol
        .vdot
        .as_slice()
        .chunks_exact(6)
        .map(Vec6::from_column_slice)
        .collect();
    AlgebraElement::new(state.vel.twists.clone(), acc)
}

pub fn constraint_violation(model: &dyn DaeModel, q: &MbsConfig) -> DVector<f64> {
    model.constraint(q)
}

/// Euclidean norm of each joint's constraint block.
pub fn joint_violations(model: &dyn DaeModel, q: &MbsConfig) -> Vec<f64> {
    let g = model.constraint(q);
    model
        .joint_rows()
        .into_iter()
        .map(|r| g.rows(r.start, r.len()).norm())
        .collect()
}

fn numerical_rank(m: &DMatrix<f64>) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.clone().svd(false, false).singular_values;
    let largest = sv.max();
    if largest == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > 1e-10 * largest).count()
}

/// Minimum-norm correction of `seed` onto `ker J(q)`.
///
/// When the linear-velocity columns of `J` alone have full row rank, only the
/// linear slots are corrected (angular velocities are kept as prescribed);
/// otherwise the correction `V = seed − Jᵀ(JJᵀ)⁻¹J seed` acts on all slots.
pub fn consistent_velocity(
    model: &dyn DaeModel,
    q: &MbsConfig,
    seed: &MbsVelocity,
) -> Result<MbsVelocity> {
    if seed.len() != model.n_bodies() {
        return Err(Error::DimensionMismatch {
            what: "velocity slots",
            expected: model.n_bodies(),
            found: seed.len(),
        });
    }
    let m = model.n_constraints();
    if m == 0 {
        return Ok(seed.clone());
    }
    let jac = model.jacobian(q);
    let n = jac.ncols();
    let linear_cols: Vec<usize> = (0..n).filter(|c| c % 6 >= 3).collect();
    let jac_lin = jac.select_columns(linear_cols.iter());

    let (basis, cols): (DMatrix<f64>, Vec<usize>) = if numerical_rank(&jac_lin) == m {
        (jac_lin, linear_cols)
    } else if numerical_rank(&jac) == m {
        (jac.clone(), (0..n).collect())
    } else {
        return Err(Error::RankDeficient);
    };
    let gram = (&basis * basis.transpose())
        .cholesky()
        .ok_or(Error::RankDeficient)?;

    let mut x = seed.to_dvector();
    // one refinement pass keeps ‖J V‖ at roundoff level for ill-scaled seeds
    for _ in 0..2 {
        let r = &jac * &x;
        let delta = basis.transpose() * gram.solve(&r);
        for (k, &c) in cols.iter().enumerate() {
            x[c] -= delta[k];
        }
    }
    MbsVelocity::from_slice(x.as_slice())
}
