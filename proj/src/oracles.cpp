#include "ardpg/oracles.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>

namespace ardpg {

FixedPointResult td_fixed_point(const TabularMDP& mdp, const Mat& phi, double eta,
                                double rho_star) {
  require(phi.rows() == mdp.n_states(), "oracle: one feature row per state required");
  const Vec d = stationary_distribution(mdp);
  const int k = static_cast<int>(phi.cols());
  const Mat weighted = d.asDiagonal() * phi;  // D Phi
  FixedPointResult out;
  out.rho_star = rho_star;
  out.A_mat = phi.transpose() * d.asDiagonal() * (mdp.P * phi - phi) - eta * Mat::Identity(k, k);
  out.b_vec = weighted.transpose() * (mdp.R - Vec::Constant(mdp.n_states(), rho_star));
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(out.A_mat);
  cod.setThreshold(1e-10);
  out.degenerate = cod.rank() < k;
  out.w_star = cod.solve(-out.b_vec);
  return out;
}

double lambda_max_sym(const TabularMDP& mdp, const Mat& phi) {
  require(phi.rows() == mdp.n_states(), "oracle: one feature row per state required");
  const Vec d = stationary_distribution(mdp);
  const Mat a_prime = phi.transpose() * d.asDiagonal() * (mdp.P * phi - phi);
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (a_prime + a_prime.transpose()));
  return es.eigenvalues().maxCoeff();
}

Vec fd_gradient(const std::function<double(const Vec&)>& rho_fn, const Vec& theta,
                double delta) {
  require(delta > 0.0, "fd: delta must be positive");
  Vec grad(theta.size());
  for (int i = 0; i < theta.size(); ++i) {
    Vec hi = theta;
    Vec lo = theta;
    hi[i] += delta;
    lo[i] -= delta;
    grad[i] = (rho_fn(hi) - rho_fn(lo)) / (2.0 * delta);
  }
  return grad;
}

CompatibleCriticResult solve_compatible_critic(const Mat& h, const Vec& grad_rho) {
  CompatibleCriticResult out;
  out.H_mat = h;
  Eigen::CompleteOrthogonalDecomposition<Mat> cod(h);
  cod.setThreshold(1e-10);
  out.degenerate = cod.rank() < h.cols();
  out.w_eps_star = cod.solve(grad_rho);
  return out;
}

// ---------------------------------------------------------------------------
// Grid oracles

double grid_dq_da(const Grid1DModel& model, int i, double action, const Vec& v_diff) {
  return model.dreward_da(i, action) + model.dtransition_da(i, action).dot(v_diff);
}

namespace {

Vec grid_gradient_with_weights(const Grid1DModel& model, const Policy& policy,
                               const Vec& theta, const Vec& weights, const Vec& v_diff) {
  Vec grad = Vec::Zero(policy.param_dim());
  for (int i = 0; i < model.n_states(); ++i) {
    Vec s(1);
    s[0] = model.center(i);
    const double a = policy.eval(theta, s)[0];
    const double dq = grid_dq_da(model, i, a, v_diff);
    grad += weights[i] * dq * policy.jacobian(theta, s).col(0);
  }
  return grad;
}

}  // namespace

Vec grid_exact_gradient(const Grid1DModel& model, const Policy& policy, const Vec& theta) {
  const TabularMDP chain = model.induced_chain(policy, theta);
  const Vec d = stationary_distribution(chain);
  const PoissonSolution poisson = solve_poisson(chain);
  return grid_gradient_with_weights(model, policy, theta, d, poisson.v_diff);
}

Vec grid_offpolicy_gradient_hat(const Grid1DModel& model, const Policy& policy,
                                const Vec& theta, const Vec& theta_mu) {
  const TabularMDP target_chain = model.induced_chain(policy, theta);
  const TabularMDP behavior_chain = model.induced_chain(policy, theta_mu);
  const Vec d_mu = stationary_distribution(behavior_chain);
  const PoissonSolution poisson = solve_poisson(target_chain);
  return grid_gradient_with_weights(model, policy, theta, d_mu, poisson.v_diff);
}

Mat grid_jacobian_moment(const Grid1DModel& model, const Policy& policy, const Vec& theta) {
  const TabularMDP chain = model.induced_chain(policy, theta);
  const Vec d = stationary_distribution(chain);
  Mat h = Mat::Zero(policy.param_dim(), policy.param_dim());
  for (int i = 0; i < model.n_states(); ++i) {
    Vec s(1);
    s[0] = model.center(i);
    const Vec j = policy.jacobian(theta, s).col(0);
    h += d[i] * j * j.transpose();
  }
  return h;
}

double grid_average_reward(const Grid1DModel& model, const Policy& policy, const Vec& theta) {
  return average_reward(model.induced_chain(policy, theta));
}

// ---------------------------------------------------------------------------
// LQR oracles

Mat lqr_jacobian_moment(const LQRSpec& spec, const Mat& gain) {
  const Mat sigma = lqr_stationary_cov(spec, gain);
  const int n = spec.state_dim();
  const int m = spec.action_dim();
  Mat h = Mat::Zero(n * m, n * m);
  for (int p = 0; p < m; ++p) h.block(p * n, p * n, n, n) = sigma;
  return h;
}

CompatibleCriticResult lqr_compatible_solution(const LQRSpec& spec, const Mat& gain) {
  const Mat h = lqr_jacobian_moment(spec, gain);
  const Vec grad = flatten_gain(lqr_policy_gradient(spec, gain));
  return solve_compatible_critic(h, grad);
}

void gauss_hermite(int n, Vec* nodes, Vec* weights) {
  require(n >= 1, "gauss-hermite: order must be >= 1");
  // Golub-Welsch on the Hermite Jacobi matrix.
  Mat jacobi = Mat::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    const double off = std::sqrt(0.5 * (i + 1));
    jacobi(i, i + 1) = off;
    jacobi(i + 1, i) = off;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(jacobi);
  *nodes = es.eigenvalues();
  weights->resize(n);
  const double sqrt_pi = std::sqrt(3.14159265358979323846);
  for (int i = 0; i < n; ++i) {
    const double first = es.eigenvectors()(0, i);
    (*weights)[i] = sqrt_pi * first * first;
  }
}

}  // namespace ardpg
