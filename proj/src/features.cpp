#include "ardpg/features.hpp"

#include <cmath>
#include <vector>

namespace ardpg {

Vec project_ball(const Vec& x, const ProjectionBall& ball) {
  require(ball.radius > 0.0, "projection: radius must be positive");
  const double norm = x.norm();
  if (norm <= ball.radius) return x;
  return x * (ball.radius / norm);
}

namespace {

/// Tensor grid of n^d points over the box.
Mat grid_centers(const Box& box, int per_dim) {
  const int d = box.dim();
  int total = 1;
  for (int i = 0; i < d; ++i) total *= per_dim;
  Mat centers(total, d);
  for (int idx = 0; idx < total; ++idx) {
    int rem = idx;
    for (int i = 0; i < d; ++i) {
      const int cell = rem % per_dim;
      rem /= per_dim;
      const double frac = per_dim == 1 ? 0.5 : static_cast<double>(cell) / (per_dim - 1);
      centers(idx, i) = box.lo[i] + frac * (box.hi[i] - box.lo[i]);
    }
  }
  return centers;
}

double grid_width(const Box& box, int per_dim, double width_factor) {
  double spacing = 0.0;
  for (int i = 0; i < box.dim(); ++i)
    spacing = std::max(spacing, (box.hi[i] - box.lo[i]) / std::max(1, per_dim - 1));
  return width_factor * std::max(spacing, 1e-6);
}

Vec gaussian_bumps(const Mat& centers, double width, const Vec& x) {
  const int nc = static_cast<int>(centers.rows());
  Vec g(nc);
  for (int c = 0; c < nc; ++c)
    g[c] = std::exp(-(x - centers.row(c).transpose()).squaredNorm() / (2.0 * width * width));
  return g;
}

}  // namespace

RbfGridBasis::RbfGridBasis(const Box& state_box, int per_dim, double width_factor)
    : centers_(grid_centers(state_box, per_dim)),
      width_(grid_width(state_box, per_dim, width_factor)) {
  require(per_dim >= 1, "rbf basis: per_dim must be >= 1");
}

Vec RbfGridBasis::eval(const Vec& state) const {
  Vec g = gaussian_bumps(centers_, width_, state);
  const double total = g.sum();
  if (total > 0.0) g /= total;
  Vec psi(dim());
  psi.head(g.size()) = g;
  psi[g.size()] = 1.0;
  // ||g||_2 <= ||g||_1 = 1 and the constant adds 1, so this cap keeps
  // ||psi|| <= 1/2.
  return psi * (0.5 / std::sqrt(2.0));
}

std::unique_ptr<StateBasis> RbfGridBasis::clone() const {
  return std::make_unique<RbfGridBasis>(*this);
}

PolyBasis::PolyBasis(int degree) : degree_(degree) {
  require(degree >= 0, "poly basis: degree must be >= 0");
}

Vec PolyBasis::eval(const Vec& state) const {
  require(state.size() == 1, "poly basis: 1-D states only");
  Vec psi(degree_ + 1);
  double p = 1.0;
  for (int i = 0; i <= degree_; ++i) {
    psi[i] = p;
    p *= state[0];
  }
  return psi;
}

std::unique_ptr<StateBasis> PolyBasis::clone() const {
  return std::make_unique<PolyBasis>(*this);
}

CompatibleFeatureMap::CompatibleFeatureMap(const Policy& policy,
                                           std::unique_ptr<StateBasis> basis, double scale)
    : policy_(policy.clone()), basis_(std::move(basis)), scale_(scale) {
  require(scale > 0.0, "compatible features: scale must be positive");
  if (!basis_) basis_ = std::make_unique<ZeroBasis>();
}

CompatibleFeatureMap::CompatibleFeatureMap(const CompatibleFeatureMap& other)
    : policy_(other.policy_->clone()), basis_(other.basis_->clone()), scale_(other.scale_) {}

Vec CompatibleFeatureMap::phi(const Vec& theta, const Vec& state, const Vec& action) const {
  require(action.size() == policy_->action_dim(), "compatible features: action dim mismatch");
  const Mat jac = policy_->jacobian(theta, state);
  const Vec excess = action - policy_->eval(theta, state);
  Vec out(dim());
  out.head(advantage_dim()) = scale_ * (jac * excess);
  out.tail(basis_->dim()) = basis_->eval(state);
  return out;
}

Mat CompatibleFeatureMap::dphi_da(const Vec& theta, const Vec& state, const Vec&) const {
  Mat out = Mat::Zero(dim(), policy_->action_dim());
  out.topRows(advantage_dim()) = scale_ * policy_->jacobian(theta, state);
  return out;
}

std::unique_ptr<FeatureMap> CompatibleFeatureMap::clone() const {
  return std::make_unique<CompatibleFeatureMap>(*this);
}

double CompatibleFeatureMap::bounded_scale(const Policy& policy, const Vec& theta_ref,
                                           const Box& state_box, const Box& action_box,
                                           int samples) {
  CounterRng rng(0x5ca1eull);
  double sup = 1e-12;
  for (int i = 0; i < samples; ++i) {
    const Vec s = state_box.sample(rng);
    const Vec a = action_box.sample(rng);
    const Vec v = policy.jacobian(theta_ref, s) * (a - policy.eval(theta_ref, s));
    sup = std::max(sup, v.norm());
  }
  return 0.5 / sup;
}

GenericRbfFeatureMap::GenericRbfFeatureMap(const Box& state_box, const Box& action_box,
                                           int per_dim, double width_factor)
    : state_dim_(state_box.dim()), action_dim_(action_box.dim()) {
  Box joint;
  joint.lo = Vec(state_dim_ + action_dim_);
  joint.hi = Vec(state_dim_ + action_dim_);
  joint.lo << state_box.lo, action_box.lo;
  joint.hi << state_box.hi, action_box.hi;
  centers_ = grid_centers(joint, per_dim);
  width_ = grid_width(joint, per_dim, width_factor);
}

Vec GenericRbfFeatureMap::raw(const Vec& joint) const {
  return gaussian_bumps(centers_, width_, joint);
}

Vec GenericRbfFeatureMap::phi(const Vec&, const Vec& state, const Vec& action) const {
  require(state.size() == state_dim_ && action.size() == action_dim_,
          "generic features: dimension mismatch");
  Vec joint(state_dim_ + action_dim_);
  joint << state, action;
  Vec g = raw(joint);
  const double total = g.sum();
  if (total > 0.0) g /= total;
  return g;
}

Mat GenericRbfFeatureMap::dphi_da(const Vec&, const Vec& state, const Vec& action) const {
  Vec joint(state_dim_ + action_dim_);
  joint << state, action;
  const Vec g = raw(joint);
  const double total = g.sum();
  const int nc = dim();
  // d/dx of g_c is g_c (c_x - x) / h^2; quotient rule for the normalization.
  Mat dg(nc, action_dim_);
  for (int c = 0; c < nc; ++c)
    for (int j = 0; j < action_dim_; ++j)
      dg(c, j) = g[c] * (centers_(c, state_dim_ + j) - action[j]) / (width_ * width_);
  if (total <= 0.0) return Mat::Zero(nc, action_dim_);
  Mat out(nc, action_dim_);
  const Vec colsum = dg.colwise().sum();
  for (int c = 0; c < nc; ++c)
    for (int j = 0; j < action_dim_; ++j)
      out(c, j) = (dg(c, j) * total - g[c] * colsum[j]) / (total * total);
  return out;
}

std::unique_ptr<FeatureMap> GenericRbfFeatureMap::clone() const {
  return std::make_unique<GenericRbfFeatureMap>(*this);
}

}  // namespace ardpg
