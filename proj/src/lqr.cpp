#include "ardpg/lqr.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

namespace ardpg {

double spectral_radius(const Mat& m) {
  Eigen::EigenSolver<Mat> es(m, /*computeEigenvectors=*/false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

namespace {

bool is_symmetric(const Mat& m, double tol = 1e-10) {
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= tol * (1.0 + m.cwiseAbs().maxCoeff());
}

double min_eigenvalue_sym(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(m);
  return es.eigenvalues().minCoeff();
}

}  // namespace

void validate_lqr(const LQRSpec& spec, const Mat& stabilizing_gain) {
  const int n = spec.state_dim();
  const int m = spec.action_dim();
  require(n >= 1 && m >= 1, "lqr: empty dynamics");
  require(spec.A_dyn.rows() == n && spec.A_dyn.cols() == n, "lqr: A must be n x n");
  require(spec.B_dyn.rows() == n, "lqr: B row count must match A");
  require(spec.Q_cost.rows() == n && spec.Q_cost.cols() == n, "lqr: Q must be n x n");
  require(spec.R_cost.rows() == m && spec.R_cost.cols() == m, "lqr: R must be m x m");
  require(spec.noise_std.size() == n, "lqr: noise_std must have one entry per state dim");
  require((spec.noise_std.array() >= 0.0).all(), "lqr: noise_std must be nonnegative");
  require(is_symmetric(spec.Q_cost), "lqr: Q must be symmetric");
  require(is_symmetric(spec.R_cost), "lqr: R must be symmetric");
  require(min_eigenvalue_sym(spec.Q_cost) >= -1e-12, "lqr: Q must be positive semidefinite");
  require(min_eigenvalue_sym(spec.R_cost) > 0.0, "lqr: R must be positive definite");
  require(stabilizing_gain.rows() == m && stabilizing_gain.cols() == n,
          "lqr: stabilizing gain must be m x n");
  require(spectral_radius(spec.A_dyn + spec.B_dyn * stabilizing_gain) < 1.0,
          "lqr: supplied gain does not stabilize the dynamics");
}

Mat dlyap(const Mat& m, const Mat& w) {
  const int n = static_cast<int>(m.rows());
  // vec(X) = (I - M (x) M)^{-1} vec(W), column-major vec.
  Mat kron(n * n, n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) kron.block(i * n, j * n, n, n) = m(i, j) * m;
  Mat lhs = Mat::Identity(n * n, n * n) - kron;
  Eigen::Map<const Vec> w_vec(w.data(), n * n);
  Vec x_vec = lhs.partialPivLu().solve(w_vec);
  Mat x = Eigen::Map<const Mat>(x_vec.data(), n, n);
  // Symmetrize away roundoff.
  return 0.5 * (x + x.transpose());
}

Mat lqr_stationary_cov(const LQRSpec& spec, const Mat& gain) {
  const Mat closed = spec.A_dyn + spec.B_dyn * gain;
  require(spectral_radius(closed) < 1.0, "lqr: unstable gain");
  return dlyap(closed, spec.noise_cov());
}

Mat lqr_value_matrix(const LQRSpec& spec, const Mat& gain) {
  const Mat closed = spec.A_dyn + spec.B_dyn * gain;
  require(spectral_radius(closed) < 1.0, "lqr: unstable gain");
  const Mat stage = spec.Q_cost + gain.transpose() * spec.R_cost * gain;
  // P = stage + M' P M  <=>  P = dlyap(M', stage).
  return dlyap(closed.transpose(), stage);
}

double lqr_average_reward(const LQRSpec& spec, const Mat& gain) {
  const Mat sigma = lqr_stationary_cov(spec, gain);
  const Mat stage = spec.Q_cost + gain.transpose() * spec.R_cost * gain;
  return -(stage * sigma).trace();
}

Mat lqr_policy_gradient(const LQRSpec& spec, const Mat& gain) {
  const Mat closed = spec.A_dyn + spec.B_dyn * gain;
  const Mat sigma = lqr_stationary_cov(spec, gain);
  const Mat p = lqr_value_matrix(spec, gain);
  return -2.0 * (spec.R_cost * gain + spec.B_dyn.transpose() * p * closed) * sigma;
}

Mat lqr_optimal_gain(const LQRSpec& spec, int max_iter, double tol) {
  const Mat& a = spec.A_dyn;
  const Mat& b = spec.B_dyn;
  Mat p = spec.Q_cost;
  for (int it = 0; it < max_iter; ++it) {
    const Mat gain_term = (spec.R_cost + b.transpose() * p * b)
                              .ldlt()
                              .solve(b.transpose() * p * a);
    const Mat p_next = spec.Q_cost + a.transpose() * p * (a - b * gain_term);
    const double delta = (p_next - p).cwiseAbs().maxCoeff();
    p = 0.5 * (p_next + p_next.transpose());
    if (delta < tol) break;
  }
  return -(spec.R_cost + b.transpose() * p * b).ldlt().solve(b.transpose() * p * a);
}

Vec flatten_gain(const Mat& gain) {
  Vec theta(gain.size());
  int idx = 0;
  for (int p = 0; p < gain.rows(); ++p)
    for (int q = 0; q < gain.cols(); ++q) theta[idx++] = gain(p, q);
  return theta;
}

Mat unflatten_gain(const Vec& theta, int action_dim, int state_dim) {
  require(theta.size() == action_dim * state_dim, "gain: parameter size mismatch");
  Mat gain(action_dim, state_dim);
  int idx = 0;
  for (int p = 0; p < action_dim; ++p)
    for (int q = 0; q < state_dim; ++q) gain(p, q) = theta[idx++];
  return gain;
}

}  // namespace ardpg
