#ifndef MBS_LIE_H
#define MBS_LIE_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MbsStatus {
  MBS_STATUS_OK = 0,
  MBS_STATUS_NULL_POINTER = 1,
  MBS_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Argument outside the domain of a Lie-group map.
   */
  MBS_STATUS_DOMAIN = 3,
  /**
   * Singular or ill-conditioned constraint system.
   */
  MBS_STATUS_SINGULAR = 4,
  MBS_STATUS_INTEGRATION_FAILED = 5,
  MBS_STATUS_PANIC = 6,
} MbsStatus;

typedef enum MbsModelKind {
  MBS_MODEL_KIND_HEAVY_TOP = 0,
  MBS_MODEL_KIND_DOUBLE_PENDULUM = 1,
  MBS_MODEL_KIND_FLOATING_PAIR = 2,
  MBS_MODEL_KIND_THREE_BAR = 3,
} MbsModelKind;

typedef enum MbsFormulation {
  MBS_FORMULATION_SE3 = 0,
  MBS_FORMULATION_SO3_R3 = 1,
} MbsFormulation;

typedef enum MbsTableau {
  MBS_TABLEAU_EULER = 0,
  MBS_TABLEAU_HEUN = 1,
  MBS_TABLEAU_RK4 = 2,
} MbsTableau;

/**
 * Opaque model handle.
 */
typedef struct MbsModel MbsModel;

/**
 * Opaque trajectory handle.
 */
typedef struct MbsTrajectory MbsTrajectory;

/**
 * Diagnostics of one trajectory sample.
 */
typedef struct MbsSample {
  double t;
  double max_abs_constraint;
  double kinetic;
  double potential;
  double ortho_err;
} MbsSample;

/**
 * Rotation matrix in row-major order and position.
 */
typedef struct MbsPose {
  double rot[9];
  double pos[3];
} MbsPose;

/**
 * Angular part `w` and linear part `v`.
 */
typedef struct MbsTwist {
  double w[3];
  double v[3];
} MbsTwist;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the last error message of this thread into `buf` (NUL-terminated,
 * truncated to `len` bytes) and returns the length of the full message
 * without the terminator. `buf` may be null to query the length.
 */
size_t mbs_last_error_message(char *buf, size_t len);

/**
 * Builds a benchmark model with its consistent initial state.
 */
enum MbsStatus mbs_model_new(enum MbsModelKind kind,
                             enum MbsFormulation form,
                             struct MbsModel **out);

/**
 * Releases a model; null is ignored.
 */
void mbs_model_free(struct MbsModel *model);

enum MbsStatus mbs_model_num_bodies(const struct MbsModel *model, size_t *out);

enum MbsStatus mbs_model_num_constraints(const struct MbsModel *model, size_t *out);

/**
 * Integrates from the model's initial state over `[0, t_end]` with fixed
 * step `dt`, recording every `output_stride`-th step.
 */
enum MbsStatus mbs_integrate(const struct MbsModel *model,
                             enum MbsTableau tableau,
                             double t_end,
                             double dt,
                             size_t output_stride,
                             struct MbsTrajectory **out);

/**
 * Releases a trajectory; null is ignored.
 */
void mbs_trajectory_free(struct MbsTrajectory *traj);

enum MbsStatus mbs_trajectory_len(const struct MbsTrajectory *traj, size_t *out);

enum MbsStatus mbs_trajectory_sample(const struct MbsTrajectory *traj,
                                     size_t index,
                                     struct MbsSample *out);

/**
 * Euclidean norm of joint `joint`'s constraint block at sample `index`.
 */
enum MbsStatus mbs_trajectory_joint_violation(const struct MbsTrajectory *traj,
                                              size_t index,
                                              size_t joint,
                                              double *out);

/**
 * Pose and velocity of `body` at sample `index`. The linear velocity is
 * body-fixed for SE(3) models and spatial for SO(3)×ℝ³ models.
 */
enum MbsStatus mbs_trajectory_state(const struct MbsTrajectory *traj,
                                    size_t index,
                                    size_t body,
                                    struct MbsPose *pose,
                                    struct MbsTwist *twist);

/**
 * SE(3) exponential.
 */
enum MbsStatus mbs_exp_se3(const struct MbsTwist *x, struct MbsPose *out);

/**
 * SO(3)×ℝ³ exponential.
 */
enum MbsStatus mbs_exp_so3xr3(const struct MbsTwist *x, struct MbsPose *out);

/**
 * `dexp⁻¹_x y` on se(3); fails with `Domain` when `‖x.w‖` reaches `2π`.
 */
enum MbsStatus mbs_dexpinv_se3(const struct MbsTwist *x,
                               const struct MbsTwist *y,
                               struct MbsTwist *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MBS_LIE_H */
