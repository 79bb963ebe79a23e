#pragma once

#include <memory>

#include "ardpg/policy.hpp"
#include "ardpg/types.hpp"

namespace ardpg {

/// Euclidean ball used by the projection operators on critic and actor
/// parameters.
struct ProjectionBall {
  double radius = 1.0;
};

/// Radial projection onto the ball: identity inside, rescale to the surface
/// outside. Idempotent and non-expansive.
Vec project_ball(const Vec& x, const ProjectionBall& ball);

/// State-only basis psi(s).
class StateBasis {
 public:
  virtual ~StateBasis() = default;
  virtual int dim() const = 0;
  virtual Vec eval(const Vec& state) const = 0;
  virtual std::unique_ptr<StateBasis> clone() const = 0;
};

/// Normalized Gaussian bumps on a uniform grid over the state box, padded
/// with a constant feature, scaled so ||psi(s)|| <= 1/2 everywhere.
class RbfGridBasis : public StateBasis {
 public:
  RbfGridBasis(const Box& state_box, int per_dim, double width_factor = 1.5);

  int dim() const override { return static_cast<int>(centers_.rows()) + 1; }
  Vec eval(const Vec& state) const override;
  std::unique_ptr<StateBasis> clone() const override;

 private:
  Mat centers_;
  double width_;
};

/// Monomials of a 1-D state up to the given degree: (1, s, s^2, ...).
/// Exact low-order value representation; no norm cap.
class PolyBasis : public StateBasis {
 public:
  explicit PolyBasis(int degree);

  int dim() const override { return degree_ + 1; }
  Vec eval(const Vec& state) const override;
  std::unique_ptr<StateBasis> clone() const override;

 private:
  int degree_;
};

class ZeroBasis : public StateBasis {
 public:
  int dim() const override { return 0; }
  Vec eval(const Vec&) const override { return Vec(0); }
  std::unique_ptr<StateBasis> clone() const override { return std::make_unique<ZeroBasis>(); }
};

/// State-action feature map phi(s, a; theta) for the linear critic.
class FeatureMap {
 public:
  virtual ~FeatureMap() = default;
  virtual int dim() const = 0;
  virtual Vec phi(const Vec& theta, const Vec& state, const Vec& action) const = 0;
  /// k x m Jacobian of phi w.r.t. the action.
  virtual Mat dphi_da(const Vec& theta, const Vec& state, const Vec& action) const = 0;
  virtual std::unique_ptr<FeatureMap> clone() const = 0;
};

/// Critic features paired with a deterministic policy:
///   phi(s, a) = [ scale * J_theta(s) (a - pi(s, theta)) ; psi(s) ],
/// with J the policy Jacobian. The action block is affine in a, so the
/// action gradient of phi' w at a = pi(s) is exactly scale * J' w restricted
/// to the advantage block, and the state block acts as a baseline the TD
/// recursion can fit.
class CompatibleFeatureMap : public FeatureMap {
 public:
  CompatibleFeatureMap(const Policy& policy, std::unique_ptr<StateBasis> basis,
                       double scale = 1.0);
  CompatibleFeatureMap(const CompatibleFeatureMap& other);

  int dim() const override { return policy_->param_dim() + basis_->dim(); }
  int advantage_dim() const { return policy_->param_dim(); }
  double scale() const { return scale_; }
  const Policy& policy() const { return *policy_; }

  Vec phi(const Vec& theta, const Vec& state, const Vec& action) const override;
  Mat dphi_da(const Vec& theta, const Vec& state, const Vec& action) const override;
  std::unique_ptr<FeatureMap> clone() const override;

  /// Scale making the advantage block's norm stay below 1/2 over the given
  /// boxes (sampled sup of |J(s)| * action diameter).
  static double bounded_scale(const Policy& policy, const Vec& theta_ref, const Box& state_box,
                              const Box& action_box, int samples = 4096);

 private:
  std::unique_ptr<Policy> policy_;
  std::unique_ptr<StateBasis> basis_;
  double scale_;
};

/// Generic normalized RBF features over the joint (state, action) box;
/// ignores the policy parameter. Exercises the function-approximation error
/// path: compatibility does not hold for this map.
class GenericRbfFeatureMap : public FeatureMap {
 public:
  GenericRbfFeatureMap(const Box& state_box, const Box& action_box, int per_dim,
                       double width_factor = 1.5);

  int dim() const override { return static_cast<int>(centers_.rows()); }
  Vec phi(const Vec& theta, const Vec& state, const Vec& action) const override;
  Mat dphi_da(const Vec& theta, const Vec& state, const Vec& action) const override;
  std::unique_ptr<FeatureMap> clone() const override;

 private:
  Vec raw(const Vec& joint) const;

  Mat centers_;  // n_centers x (state_dim + action_dim)
  double width_;
  int state_dim_;
  int action_dim_;
};

}  // namespace ardpg
