#pragma once

#include "ardpg/types.hpp"

namespace ardpg {

/// Linear-Gaussian dynamics x' = A x + B a + diag(noise_std) xi with
/// quadratic stage reward -(x'Qx + a'Ra). Constructor-level validation lives
/// in validate_lqr; a supplied stabilizing gain witnesses controllability of
/// the average-reward problem.
struct LQRSpec {
  Mat A_dyn;
  Mat B_dyn;
  Mat Q_cost;   // symmetric PSD
  Mat R_cost;   // symmetric PD
  Vec noise_std;

  int state_dim() const { return static_cast<int>(A_dyn.rows()); }
  int action_dim() const { return static_cast<int>(B_dyn.cols()); }
  Mat noise_cov() const { return noise_std.array().square().matrix().asDiagonal(); }
};

/// Checks shapes, symmetry/definiteness of the cost matrices, and that
/// spectral_radius(A + B K_witness) < 1. Throws rejected_input otherwise.
void validate_lqr(const LQRSpec& spec, const Mat& stabilizing_gain);

double spectral_radius(const Mat& m);

/// Solves X = M X M' + W (discrete Lyapunov) by Kronecker linearization.
Mat dlyap(const Mat& m, const Mat& w);

/// Stationary state covariance under a = K x; requires a stable closed loop.
Mat lqr_stationary_cov(const LQRSpec& spec, const Mat& gain);

/// Quadratic coefficient P of the differential cost-to-go:
/// P = Q + K'RK + (A+BK)' P (A+BK).
Mat lqr_value_matrix(const LQRSpec& spec, const Mat& gain);

/// Long-run average reward of the linear policy: -tr((Q + K'RK) Sigma).
double lqr_average_reward(const LQRSpec& spec, const Mat& gain);

/// Exact gradient of lqr_average_reward w.r.t. the gain:
/// -2 (R K + B' P (A+BK)) Sigma, returned with the same shape as K.
Mat lqr_policy_gradient(const LQRSpec& spec, const Mat& gain);

/// Optimal gain via fixed-point iteration on the Riccati equation.
Mat lqr_optimal_gain(const LQRSpec& spec, int max_iter = 10000, double tol = 1e-14);

/// Row-major flattening of an m x n gain into a length-mn parameter vector,
/// matching LinearPolicy's layout.
Vec flatten_gain(const Mat& gain);
Mat unflatten_gain(const Vec& theta, int action_dim, int state_dim);

}  // namespace ardpg
