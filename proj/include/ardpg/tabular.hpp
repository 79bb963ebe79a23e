#pragma once

#include <functional>
#include <vector>

#include "ardpg/policy.hpp"
#include "ardpg/types.hpp"

namespace ardpg {

/// Finite ergodic Markov chain under a fixed policy: row-stochastic P and a
/// per-state reward. The constructor-level check rejects chains that are not
/// irreducible and aperiodic.
struct TabularMDP {
  Mat P;  // n x n, rows sum to 1
  Vec R;  // length n

  int n_states() const { return static_cast<int>(P.rows()); }
};

/// Verifies row sums, irreducibility (reachability) and aperiodicity
/// (cycle-length gcd); throws rejected_input on failure.
void validate_ergodic(const TabularMDP& mdp);
bool is_ergodic(const Mat& P);

/// Unique stationary distribution: d' P = d', sum d = 1, all entries > 0.
/// Direct linear solve for n <= 512 states, power iteration beyond.
Vec stationary_distribution(const TabularMDP& mdp);

/// rho = sum_s d(s) R(s).
double average_reward(const TabularMDP& mdp);

struct PoissonSolution {
  Vec v_diff;  // differential value, d-weighted zero mean
  double k;    // the unique constant; equals the average reward
};

/// Solves V = R - k 1 + P V with the d-weighted zero-mean normalization via
/// the fundamental matrix (I - P + 1 d')^{-1}.
PoissonSolution solve_poisson(const TabularMDP& mdp);

/// Least-squares residual of V = R - k 1 + P V for an arbitrary k; nonzero
/// whenever k differs from the average reward.
double poisson_inconsistency(const TabularMDP& mdp, double k);

/// Finite state, finite action MDP for exact differential-Q tables.
struct FiniteActionMDP {
  std::vector<Mat> P;  // per action: n x n
  Mat R;               // n x n_actions

  int n_states() const { return static_cast<int>(R.rows()); }
  int n_actions() const { return static_cast<int>(R.cols()); }

  TabularMDP under_policy(const std::vector<int>& action_of_state) const;
};

struct DifferentialQResult {
  Mat q;       // n x n_actions
  Vec v_diff;  // under the evaluated policy
  double rho;
};

/// Q(s,a) = R(s,a) - rho + sum_s' P(s'|s,a) V(s'), with (V, rho) from the
/// Poisson solve of the induced chain. Q(s, pi(s)) = V(s) by construction.
DifferentialQResult differential_q(const FiniteActionMDP& mdp,
                                   const std::vector<int>& action_of_state);

/// Continuous-action, finite-state model on a uniform 1-D grid. Cell-to-cell
/// transition mass is the exact Gaussian integral over the destination cell
/// (tails lumped into the boundary cells), so rows sum to one and every
/// quantity is smooth in the action.
class Grid1DModel {
 public:
  Grid1DModel(double lo, double hi, int n_cells, double noise_std,
              std::function<double(double, double)> mean_next,
              std::function<double(double, double)> reward);

  int n_states() const { return n_; }
  double center(int i) const { return centers_[i]; }
  const Vec& centers() const { return centers_; }

  Vec transition_row(int i, double action) const;
  /// Analytic derivative of the transition row w.r.t. the action.
  Vec dtransition_da(int i, double action) const;
  double reward_at(int i, double action) const { return reward_(centers_[i], action); }
  double dreward_da(int i, double action) const;

  /// Chain induced by a deterministic policy evaluated at cell centers.
  TabularMDP induced_chain(const Policy& policy, const Vec& theta) const;

 private:
  double lo_, hi_;
  int n_;
  double sigma_;
  Vec centers_;
  Vec edges_;  // n+1 boundaries
  std::function<double(double, double)> mean_next_;
  std::function<double(double, double)> reward_;
};

}  // namespace ardpg
