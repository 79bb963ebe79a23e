#include "ardpg/critic.hpp"

namespace ardpg {

CriticState make_critic(int feature_dim, double eta, double c_w, bool double_head) {
  require(feature_dim >= 1, "critic: feature dimension must be >= 1");
  require(eta >= 0.0, "critic: eta must be nonnegative");
  require(c_w > 0.0, "critic: C_w must be positive");
  CriticState cs;
  cs.w1 = Vec::Zero(feature_dim);
  cs.w2 = Vec::Zero(feature_dim);
  cs.w1_target = Vec::Zero(feature_dim);
  cs.w2_target = Vec::Zero(feature_dim);
  cs.eta = eta;
  cs.ball.radius = c_w;
  cs.double_head = double_head;
  return cs;
}

namespace {

Vec current_features(const FeatureMap& fmap, const Transition& tr, const Vec& theta,
                     FeatureEval mode, const CompatibleFeatureMap* compat) {
  if (mode == FeatureEval::stored_action || compat == nullptr)
    return fmap.phi(theta, tr.state, tr.action);
  return fmap.phi(theta, tr.state, compat->policy().eval(theta, tr.state));
}

Vec next_features(const FeatureMap& fmap, const Transition& tr, const Vec& theta_target,
                  const CompatibleFeatureMap* compat) {
  if (compat == nullptr) return fmap.phi(theta_target, tr.next_state, tr.action);
  return fmap.phi(theta_target, tr.next_state,
                  compat->policy().eval(theta_target, tr.next_state));
}

}  // namespace

CriticState critic_td_update(const CriticState& cs, const std::vector<Transition>& batch,
                             const FeatureMap& fmap, const Vec& theta, const Vec& theta_target,
                             double alpha, FeatureEval mode) {
  require(!batch.empty(), "critic: empty batch");
  const auto* compat = dynamic_cast<const CompatibleFeatureMap*>(&fmap);
  const double inv_m = 1.0 / static_cast<double>(batch.size());
  Vec g = Vec::Zero(cs.dim());
  for (const Transition& tr : batch) {
    const Vec phi = current_features(fmap, tr, theta, mode, compat);
    const Vec phi_next = next_features(fmap, tr, theta_target, compat);
    const double delta =
        tr.reward - cs.rho_target + phi_next.dot(cs.w1_target) - phi.dot(cs.w1);
    g += delta * phi;
  }
  CriticState out = cs;
  out.w1 = project_ball(cs.w1 + alpha * inv_m * g - alpha * cs.eta * cs.w1, cs.ball);
  if (!cs.double_head) out.w2 = out.w1;
  return out;
}

CriticState rho_update(const CriticState& cs, const std::vector<Transition>& batch,
                       const FeatureMap& fmap, const Vec& theta, const Vec& theta_target,
                       double alpha, FeatureEval mode) {
  require(!batch.empty(), "critic: empty batch");
  const auto* compat = dynamic_cast<const CompatibleFeatureMap*>(&fmap);
  const double inv_m = 1.0 / static_cast<double>(batch.size());
  double g = 0.0;
  for (const Transition& tr : batch) {
    const Vec phi = current_features(fmap, tr, theta, mode, compat);
    const Vec phi_next = next_features(fmap, tr, theta_target, compat);
    g += tr.reward - cs.rho + phi_next.dot(cs.w1_target) - phi.dot(cs.w1_target);
  }
  CriticState out = cs;
  out.rho = cs.rho + alpha * inv_m * g;
  return out;
}

Vec target_polyak(const Vec& current, const Vec& target, double beta) {
  require(beta >= 0.0 && beta <= 1.0, "polyak: beta must lie in [0,1]");
  return target + beta * (current - target);
}

double target_polyak(double current, double target, double beta) {
  require(beta >= 0.0 && beta <= 1.0, "polyak: beta must lie in [0,1]");
  return target + beta * (current - target);
}

CriticState advance_critic_targets(const CriticState& cs, double beta) {
  CriticState out = cs;
  out.w1_target = target_polyak(cs.w1, cs.w1_target, beta);
  out.w2_target = cs.double_head ? target_polyak(cs.w2, cs.w2_target, beta) : out.w1_target;
  out.rho_target = target_polyak(cs.rho, cs.rho_target, beta);
  return out;
}

double double_q_min(double q1, double q2) { return q1 <= q2 ? q1 : q2; }

double critic_value(const CriticState& cs, const Vec& feature) {
  const double q1 = feature.dot(cs.w1);
  if (!cs.double_head) return q1;
  return double_q_min(q1, feature.dot(cs.w2));
}

}  // namespace ardpg
