#pragma once

#include <vector>

#include "ardpg/features.hpp"
#include "ardpg/types.hpp"

namespace ardpg {

/// Which action the current-state features are evaluated at.
///  - policy_action: phi(s, pi(s, theta)); the advantage block vanishes and
///    the update reduces to TD(0) on the state basis (evaluation setting).
///  - stored_action: phi(s, a_i) with the logged action; exploration noise
///    excites the advantage block (training setting).
/// Next-state features always use the target actor's action, where the
/// advantage block vanishes by construction.
enum class FeatureEval { policy_action, stored_action };

/// Linear critic with an l2-regularized TD(0) update, a scalar average-reward
/// estimator, and slowly tracking target copies of both.
struct CriticState {
  Vec w1;
  Vec w2;  // second head; mirrors w1 in single-head mode
  double rho = 0.0;
  Vec w1_target;
  Vec w2_target;
  double rho_target = 0.0;
  double eta = 0.0;          // l2 coefficient
  ProjectionBall ball;       // radius C_w
  bool double_head = false;

  int dim() const { return static_cast<int>(w1.size()); }
};

CriticState make_critic(int feature_dim, double eta, double c_w, bool double_head = false);

/// One regularized TD(0) step on the batch:
///   w <- Gamma_{C_w}( w + (alpha/M) sum_i delta_i phi_i - alpha eta w ),
/// with delta_i = r_i - rho_target + phi(s_i')' w_target - phi(s_i)' w.
/// Target parameters are left untouched.
CriticState critic_td_update(const CriticState& cs, const std::vector<Transition>& batch,
                             const FeatureMap& fmap, const Vec& theta, const Vec& theta_target,
                             double alpha, FeatureEval mode = FeatureEval::policy_action);

/// Average-reward step; both bootstrap terms use the target critic:
///   rho <- rho + (alpha/M) sum_i (r_i - rho + phi(s_i')' w_tgt - phi(s_i)' w_tgt).
CriticState rho_update(const CriticState& cs, const std::vector<Transition>& batch,
                       const FeatureMap& fmap, const Vec& theta, const Vec& theta_target,
                       double alpha, FeatureEval mode = FeatureEval::policy_action);

/// target + beta (current - target); beta must lie in [0, 1].
Vec target_polyak(const Vec& current, const Vec& target, double beta);
double target_polyak(double current, double target, double beta);

/// Moves all critic targets toward the online parameters.
CriticState advance_critic_targets(const CriticState& cs, double beta);

double double_q_min(double q1, double q2);

/// phi' w for the head(s) in use; min over heads in double-head mode.
double critic_value(const CriticState& cs, const Vec& feature);

}  // namespace ardpg
