#include "ardpg/policy.hpp"

#include <cmath>

namespace ardpg {

LinearPolicy::LinearPolicy(int state_dim, int action_dim) : n_(state_dim), m_(action_dim) {
  require(state_dim >= 1 && action_dim >= 1, "policy: dimensions must be positive");
}

Vec LinearPolicy::eval(const Vec& theta, const Vec& state) const {
  check_dims(theta, state);
  Vec action(m_);
  for (int p = 0; p < m_; ++p) action[p] = theta.segment(p * n_, n_).dot(state);
  return action;
}

Mat LinearPolicy::jacobian(const Vec& theta, const Vec& state) const {
  check_dims(theta, state);
  Mat jac = Mat::Zero(param_dim(), m_);
  for (int p = 0; p < m_; ++p) jac.block(p * n_, p, n_, 1) = state;
  return jac;
}

std::unique_ptr<Policy> LinearPolicy::clone() const {
  return std::make_unique<LinearPolicy>(*this);
}

RbfPolicy::RbfPolicy(Mat centers, double width, int action_dim)
    : centers_(std::move(centers)), width_(width), m_(action_dim) {
  require(centers_.rows() >= 1, "rbf policy: needs at least one center");
  require(width > 0.0, "rbf policy: width must be positive");
  require(action_dim >= 1, "rbf policy: action dim must be positive");
}

Vec RbfPolicy::kernel(const Vec& state) const {
  const int nc = static_cast<int>(centers_.rows());
  Vec k(nc);
  for (int c = 0; c < nc; ++c) {
    const double d2 = (state - centers_.row(c).transpose()).squaredNorm();
    k[c] = std::exp(-d2 / (2.0 * width_ * width_));
  }
  return k;
}

Vec RbfPolicy::eval(const Vec& theta, const Vec& state) const {
  check_dims(theta, state);
  const Vec k = kernel(state);
  const int nc = static_cast<int>(centers_.rows());
  Vec action(m_);
  for (int j = 0; j < m_; ++j) action[j] = theta.segment(j * nc, nc).dot(k);
  return action;
}

Mat RbfPolicy::jacobian(const Vec& theta, const Vec& state) const {
  check_dims(theta, state);
  const Vec k = kernel(state);
  const int nc = static_cast<int>(centers_.rows());
  Mat jac = Mat::Zero(param_dim(), m_);
  for (int j = 0; j < m_; ++j) jac.block(j * nc, j, nc, 1) = k;
  return jac;
}

std::unique_ptr<Policy> RbfPolicy::clone() const {
  return std::make_unique<RbfPolicy>(*this);
}

}  // namespace ardpg
