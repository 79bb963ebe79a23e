#include "ardpg/tabular.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numeric>
#include <queue>

namespace ardpg {

namespace {

constexpr double kEdgeTol = 1e-15;

std::vector<std::vector<int>> adjacency(const Mat& p) {
  const int n = static_cast<int>(p.rows());
  std::vector<std::vector<int>> adj(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (p(i, j) > kEdgeTol) adj[i].push_back(j);
  return adj;
}

bool all_reachable(const std::vector<std::vector<int>>& adj, int from) {
  const int n = static_cast<int>(adj.size());
  std::vector<char> seen(n, 0);
  std::queue<int> q;
  q.push(from);
  seen[from] = 1;
  int found = 1;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (int v : adj[u])
      if (!seen[v]) {
        seen[v] = 1;
        ++found;
        q.push(v);
      }
  }
  return found == n;
}

/// Period of an irreducible chain: gcd over edges (u,v) of
/// level(u) + 1 - level(v) with BFS levels from state 0.
int chain_period(const std::vector<std::vector<int>>& adj) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> level(n, -1);
  std::queue<int> q;
  q.push(0);
  level[0] = 0;
  while (!q.empty()) {
    const int u = q.front();
    q.pop();
    for (int v : adj[u])
      if (level[v] < 0) {
        level[v] = level[u] + 1;
        q.push(v);
      }
  }
  int g = 0;
  for (int u = 0; u < n; ++u)
    for (int v : adj[u]) g = std::gcd(g, std::abs(level[u] + 1 - level[v]));
  return g == 0 ? 1 : g;
}

}  // namespace

bool is_ergodic(const Mat& p) {
  const int n = static_cast<int>(p.rows());
  if (n < 1 || p.cols() != n) return false;
  for (int i = 0; i < n; ++i) {
    if (std::abs(p.row(i).sum() - 1.0) > 1e-12) return false;
    for (int j = 0; j < n; ++j)
      if (p(i, j) < -1e-15) return false;
  }
  const auto adj = adjacency(p);
  for (int i = 0; i < n; ++i)
    if (!all_reachable(adj, i)) return false;
  return chain_period(adj) == 1;
}

void validate_ergodic(const TabularMDP& mdp) {
  require(mdp.R.size() == mdp.P.rows(), "tabular: reward length must match state count");
  require(is_ergodic(mdp.P), "tabular: chain is not ergodic (irreducible + aperiodic)");
}

Vec stationary_distribution(const TabularMDP& mdp) {
  validate_ergodic(mdp);
  const int n = mdp.n_states();
  if (n <= 512) {
    // Replace one equation of (P' - I) d = 0 with the normalization row.
    Mat m = mdp.P.transpose() - Mat::Identity(n, n);
    m.row(n - 1) = Eigen::RowVectorXd::Ones(n);
    Vec rhs = Vec::Zero(n);
    rhs[n - 1] = 1.0;
    Vec d = m.partialPivLu().solve(rhs);
    return d.cwiseMax(0.0) / d.cwiseMax(0.0).sum();
  }
  Vec d = Vec::Constant(n, 1.0 / n);
  for (int it = 0; it < 100000; ++it) {
    Vec next = mdp.P.transpose() * d;
    next /= next.sum();
    const double delta = (next - d).cwiseAbs().maxCoeff();
    d = next;
    if (delta < 1e-13) break;
  }
  return d;
}

double average_reward(const TabularMDP& mdp) {
  return stationary_distribution(mdp).dot(mdp.R);
}

PoissonSolution solve_poisson(const TabularMDP& mdp) {
  const Vec d = stationary_distribution(mdp);
  const double rho = d.dot(mdp.R);
  const int n = mdp.n_states();
  // (I - P + 1 d') V = R - rho 1 has a unique solution with d'V = 0.
  const Mat fundamental = Mat::Identity(n, n) - mdp.P + Vec::Ones(n) * d.transpose();
  const Vec v = fundamental.partialPivLu().solve(mdp.R - Vec::Constant(n, rho));
  return {v, rho};
}

double poisson_inconsistency(const TabularMDP& mdp, double k) {
  const int n = mdp.n_states();
  const Mat lhs = Mat::Identity(n, n) - mdp.P;
  const Vec rhs = mdp.R - Vec::Constant(n, k);
  const Vec v = lhs.completeOrthogonalDecomposition().solve(rhs);
  return (lhs * v - rhs).norm();
}

TabularMDP FiniteActionMDP::under_policy(const std::vector<int>& action_of_state) const {
  require(static_cast<int>(action_of_state.size()) == n_states(),
          "tabular: policy must pick one action per state");
  TabularMDP chain;
  chain.P = Mat(n_states(), n_states());
  chain.R = Vec(n_states());
  for (int s = 0; s < n_states(); ++s) {
    const int a = action_of_state[s];
    require(a >= 0 && a < n_actions(), "tabular: action index out of range");
    chain.P.row(s) = P[a].row(s);
    chain.R[s] = R(s, a);
  }
  return chain;
}

DifferentialQResult differential_q(const FiniteActionMDP& mdp,
                                   const std::vector<int>& action_of_state) {
  const TabularMDP chain = mdp.under_policy(action_of_state);
  const PoissonSolution poisson = solve_poisson(chain);
  DifferentialQResult out;
  out.v_diff = poisson.v_diff;
  out.rho = poisson.k;
  out.q = Mat(mdp.n_states(), mdp.n_actions());
  for (int a = 0; a < mdp.n_actions(); ++a)
    out.q.col(a) = mdp.R.col(a) - Vec::Constant(mdp.n_states(), poisson.k) +
                   mdp.P[a] * poisson.v_diff;
  return out;
}

// ---------------------------------------------------------------------------
// Grid1DModel

namespace {
double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }
double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * 3.14159265358979323846);
}
}  // namespace

Grid1DModel::Grid1DModel(double lo, double hi, int n_cells, double noise_std,
                         std::function<double(double, double)> mean_next,
                         std::function<double(double, double)> reward)
    : lo_(lo), hi_(hi), n_(n_cells), sigma_(noise_std), mean_next_(std::move(mean_next)),
      reward_(std::move(reward)) {
  require(hi > lo, "grid: empty interval");
  require(n_cells >= 2, "grid: need at least two cells");
  require(noise_std > 0.0, "grid: discretization requires process noise");
  centers_ = Vec(n_);
  edges_ = Vec(n_ + 1);
  const double h = (hi - lo) / n_;
  for (int i = 0; i <= n_; ++i) edges_[i] = lo + i * h;
  for (int i = 0; i < n_; ++i) centers_[i] = lo + (i + 0.5) * h;
}

Vec Grid1DModel::transition_row(int i, double action) const {
  const double m = mean_next_(centers_[i], action);
  Vec row(n_);
  // Tail mass on either side folds into the boundary cells: the running CDF
  // starts at 0 (= cdf at -inf) and is pinned to 1 at the top edge.
  double prev_cdf = 0.0;
  for (int j = 0; j < n_; ++j) {
    const double cdf = j + 1 == n_ ? 1.0 : normal_cdf((edges_[j + 1] - m) / sigma_);
    row[j] = cdf - prev_cdf;
    prev_cdf = cdf;
  }
  return row;
}

Vec Grid1DModel::dtransition_da(int i, double action) const {
  // d/da of the cell masses; the interior edges contribute density terms,
  // and the folded tails make the row derivative sum to zero.
  const double m = mean_next_(centers_[i], action);
  const double eps = 1e-6;
  const double dm_da =
      (mean_next_(centers_[i], action + eps) - mean_next_(centers_[i], action - eps)) /
      (2.0 * eps);
  Vec drow(n_);
  double prev_pdf = 0.0;
  for (int j = 0; j < n_; ++j) {
    const double pdf =
        j + 1 == n_ ? 0.0 : normal_pdf((edges_[j + 1] - m) / sigma_) / sigma_;
    drow[j] = -(pdf - prev_pdf) * dm_da;
    prev_pdf = pdf;
  }
  return drow;
}

double Grid1DModel::dreward_da(int i, double action) const {
  const double eps = 1e-6;
  return (reward_(centers_[i], action + eps) - reward_(centers_[i], action - eps)) /
         (2.0 * eps);
}

TabularMDP Grid1DModel::induced_chain(const Policy& policy, const Vec& theta) const {
  TabularMDP chain;
  chain.P = Mat(n_, n_);
  chain.R = Vec(n_);
  for (int i = 0; i < n_; ++i) {
    Vec s(1);
    s[0] = centers_[i];
    const double a = policy.eval(theta, s)[0];
    chain.P.row(i) = transition_row(i, a);
    chain.R[i] = reward_(centers_[i], a);
  }
  return chain;
}

}  // namespace ardpg
