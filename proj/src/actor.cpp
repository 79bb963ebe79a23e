#include "ardpg/actor.hpp"

namespace ardpg {

GradientEstimate dpg_gradient(const std::vector<Transition>& batch, const CriticState& critic,
                              const Vec& theta, const FeatureMap& fmap, const Policy& policy) {
  require(!batch.empty(), "actor: empty batch");
  const double inv_m = 1.0 / static_cast<double>(batch.size());
  GradientEstimate est;
  est.vector = Vec::Zero(policy.param_dim());
  est.per_sample_norms.reserve(batch.size());
  for (const Transition& tr : batch) {
    const Vec action = policy.eval(theta, tr.state);
    const Mat dphi = fmap.dphi_da(theta, tr.state, action);
    Vec dq_da;
    if (critic.double_head) {
      const Vec phi = fmap.phi(theta, tr.state, action);
      const bool use_first = phi.dot(critic.w1) <= phi.dot(critic.w2);
      dq_da = dphi.transpose() * (use_first ? critic.w1 : critic.w2);
    } else {
      dq_da = dphi.transpose() * critic.w1;
    }
    const Vec nu = policy.jacobian(theta, tr.state) * dq_da;
    est.per_sample_norms.push_back(nu.norm());
    est.vector += nu;
  }
  est.vector *= inv_m;
  return est;
}

Vec actor_update(const Vec& theta, const GradientEstimate& grad, double gamma,
                 const std::optional<ProjectionBall>& ball) {
  Vec out = theta + gamma * grad.vector;
  if (ball) out = project_ball(out, *ball);
  return out;
}

}  // namespace ardpg
