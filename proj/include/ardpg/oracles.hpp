#pragma once

#include <functional>

#include "ardpg/lqr.hpp"
#include "ardpg/tabular.hpp"

namespace ardpg {

struct FixedPointResult {
  Vec w_star;
  double rho_star = 0.0;
  Mat A_mat;
  Vec b_vec;
  bool degenerate = false;  // A rank-deficient; w_star is the min-norm solution
};

/// TD(0) fixed point of the regularized, target-stabilized evaluation
/// operator: A w + b = 0 with
///   A = Phi' D (P Phi - Phi) - eta I,   b = Phi' D (R - rho* 1),
/// where D = diag(d) and Phi stacks the per-state features row-wise.
FixedPointResult td_fixed_point(const TabularMDP& mdp, const Mat& phi, double eta,
                                double rho_star);

/// Largest eigenvalue of the symmetrized unregularized operator
/// (A' + A'^T)/2 with A' = Phi' D (P Phi - Phi). Any eta above this value
/// makes the regularized A negative definite.
double lambda_max_sym(const TabularMDP& mdp, const Mat& phi);

/// Central finite differences of a scalar function of theta.
Vec fd_gradient(const std::function<double(const Vec&)>& rho_fn, const Vec& theta,
                double delta);

struct CompatibleCriticResult {
  Vec w_eps_star;
  Mat H_mat;
  bool degenerate = false;
};

/// Solves H w = grad with H = E_d[J J'] (policy Jacobian outer products under
/// the stationary distribution). Flags near-singular H instead of failing.
CompatibleCriticResult solve_compatible_critic(const Mat& h, const Vec& grad_rho);

// --- Grid-backed oracles (1-D continuous-action models) --------------------

/// d/da of the differential Q at (cell i, action a) against the supplied
/// differential value function: dR/da + sum_j dP/da(j|i,a) V(j).
double grid_dq_da(const Grid1DModel& model, int i, double action, const Vec& v_diff);

/// Exact on-policy gradient: sum_s d(s) dQ/da|_{a=pi(s)} J(s).
Vec grid_exact_gradient(const Grid1DModel& model, const Policy& policy, const Vec& theta);

/// Off-policy surrogate: the behavior policy's stationary distribution
/// replaces the target policy's; the differential Q stays the target's.
Vec grid_offpolicy_gradient_hat(const Grid1DModel& model, const Policy& policy,
                                const Vec& theta, const Vec& theta_mu);

/// E_d[J J'] on the grid.
Mat grid_jacobian_moment(const Grid1DModel& model, const Policy& policy, const Vec& theta);

/// rho(theta) of the induced chain, as a plain function for differentiation.
double grid_average_reward(const Grid1DModel& model, const Policy& policy, const Vec& theta);

// --- LQR-backed oracles -----------------------------------------------------

/// E_d[J J'] for the linear policy under the stationary Gaussian: with the
/// row-major gain layout this is I_m (x) Sigma.
Mat lqr_jacobian_moment(const LQRSpec& spec, const Mat& gain);

/// w_eps* = H^{-1} grad for the LQR instance.
CompatibleCriticResult lqr_compatible_solution(const LQRSpec& spec, const Mat& gain);

/// Gauss-Hermite nodes/weights for integrals against exp(-x^2).
void gauss_hermite(int n, Vec* nodes, Vec* weights);

}  // namespace ardpg
