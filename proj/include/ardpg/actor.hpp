#pragma once

#include <optional>
#include <vector>

#include "ardpg/critic.hpp"

namespace ardpg {

struct GradientEstimate {
  Vec vector;                            // length param_dim
  std::vector<double> per_sample_norms;  // diagnostics
};

/// Batch estimate of the deterministic policy gradient:
///   (1/M) sum_i J_theta(s_i) * dQ/da(s_i, a)|_{a = pi(s_i, theta)},
/// with dQ/da = dphi/da' w from the linear critic (single head, or the
/// per-sample min head when the critic is double-headed).
GradientEstimate dpg_gradient(const std::vector<Transition>& batch, const CriticState& critic,
                              const Vec& theta, const FeatureMap& fmap, const Policy& policy);

/// Ascent step theta + gamma * grad, projected when a ball is supplied.
Vec actor_update(const Vec& theta, const GradientEstimate& grad, double gamma,
                 const std::optional<ProjectionBall>& ball = std::nullopt);

}  // namespace ardpg
