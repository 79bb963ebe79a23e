#include <doctest.h>

#include <cmath>

#include "ardpg/policy.hpp"
#include "ardpg/tabular.hpp"

using namespace ardpg;

namespace {

TabularMDP symmetric_two_chain() {
  TabularMDP mdp;
  mdp.P = (Mat(2, 2) << 0.9, 0.1, 0.1, 0.9).finished();
  mdp.R = (Vec(2) << 0.0, 1.0).finished();
  return mdp;
}

TabularMDP random_chain(int n, CounterRng& rng) {
  TabularMDP mdp;
  mdp.P = Mat(n, n);
  mdp.R = Vec(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) mdp.P(i, j) = 0.05 + rng.uniform();
    mdp.P.row(i) /= mdp.P.row(i).sum();
    mdp.R[i] = rng.uniform_range(-1.0, 1.0);
  }
  return mdp;
}

int draw_from_row(const Mat& p, int i, double u) {
  double acc = 0.0;
  for (int j = 0; j < p.cols(); ++j) {
    acc += p(i, j);
    if (u <= acc) return j;
  }
  return static_cast<int>(p.cols()) - 1;
}

}  // namespace

TEST_CASE("symmetric chain has the uniform stationary distribution") {
  const Vec d = stationary_distribution(symmetric_two_chain());
  CHECK(d[0] == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(d[1] == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("a deterministic cycle is rejected as periodic") {
  TabularMDP mdp;
  mdp.P = Mat::Zero(3, 3);
  mdp.P(0, 1) = 1.0;
  mdp.P(1, 2) = 1.0;
  mdp.P(2, 0) = 1.0;
  mdp.R = Vec::Zero(3);
  CHECK_THROWS_AS(stationary_distribution(mdp), rejected_input);
}

TEST_CASE("a reducible chain is rejected") {
  TabularMDP mdp;
  mdp.P = (Mat(2, 2) << 1.0, 0.0, 0.5, 0.5).finished();
  mdp.R = Vec::Zero(2);
  CHECK_THROWS_AS(stationary_distribution(mdp), rejected_input);
}

TEST_CASE("stationarity residual on random chains") {
  CounterRng rng(2);
  for (int rep = 0; rep < 20; ++rep) {
    const TabularMDP mdp = random_chain(6, rng);
    const Vec d = stationary_distribution(mdp);
    CHECK((mdp.P.transpose() * d - d).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(d.sum() - 1.0) < 1e-12);
    CHECK((d.array() > 0.0).all());
  }
}

TEST_CASE("average reward basics") {
  CHECK(average_reward(symmetric_two_chain()) == doctest::Approx(0.5).epsilon(1e-13));
  CounterRng rng(3);
  TabularMDP mdp = random_chain(5, rng);
  mdp.R = Vec::Constant(5, 0.73);
  CHECK(average_reward(mdp) == doctest::Approx(0.73).epsilon(1e-12));
}

TEST_CASE("oracle average reward matches a long simulation") {
  CounterRng rng(4);
  const TabularMDP mdp = random_chain(6, rng);
  const double rho = average_reward(mdp);
  int state = 0;
  double total = 0.0;
  const int steps = 1000000;
  for (int t = 0; t < steps; ++t) {
    total += mdp.R[state];
    state = draw_from_row(mdp.P, state, rng.uniform());
  }
  CHECK(std::abs(total / steps - rho) < 5e-3);
}

TEST_CASE("poisson solve on the symmetric two-chain") {
  const PoissonSolution sol = solve_poisson(symmetric_two_chain());
  CHECK(sol.k == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(sol.v_diff[0] == doctest::Approx(-2.5).epsilon(1e-12));
  CHECK(sol.v_diff[1] == doctest::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("constant rewards give a zero differential value") {
  CounterRng rng(5);
  TabularMDP mdp = random_chain(4, rng);
  mdp.R = Vec::Constant(4, 0.2);
  const PoissonSolution sol = solve_poisson(mdp);
  CHECK(sol.k == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(sol.v_diff.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("poisson residual and the uniqueness of the constant") {
  CounterRng rng(6);
  for (int rep = 0; rep < 20; ++rep) {
    const TabularMDP mdp = random_chain(4 + rep % 8, rng);
    const PoissonSolution sol = solve_poisson(mdp);
    const Vec res = sol.v_diff -
                    (mdp.R - Vec::Constant(mdp.n_states(), sol.k) + mdp.P * sol.v_diff);
    CHECK(res.cwiseAbs().maxCoeff() < 1e-10);
    const Vec d = stationary_distribution(mdp);
    CHECK(std::abs(d.dot(sol.v_diff)) < 1e-10);  // normalization
    CHECK(poisson_inconsistency(mdp, sol.k + 0.01) > 1e-3);
    CHECK(poisson_inconsistency(mdp, sol.k - 0.01) > 1e-3);
    CHECK(poisson_inconsistency(mdp, sol.k) < 1e-10);
  }
}

TEST_CASE("differential q agrees with the value at on-policy actions") {
  CounterRng rng(7);
  FiniteActionMDP mdp;
  const int n = 5, na = 3;
  mdp.R = Mat(n, na);
  for (int a = 0; a < na; ++a) {
    TabularMDP part = random_chain(n, rng);
    mdp.P.push_back(part.P);
    for (int s = 0; s < n; ++s) mdp.R(s, a) = rng.uniform_range(-1.0, 1.0);
  }
  std::vector<int> policy = {0, 2, 1, 0, 2};
  const DifferentialQResult out = differential_q(mdp, policy);
  for (int s = 0; s < n; ++s)
    CHECK(out.q(s, policy[s]) == doctest::Approx(out.v_diff[s]).epsilon(1e-10));
}

TEST_CASE("single-action mdp reduces to the poisson solve") {
  CounterRng rng(8);
  FiniteActionMDP mdp;
  const TabularMDP chain = random_chain(4, rng);
  mdp.P.push_back(chain.P);
  mdp.R = chain.R;
  const DifferentialQResult out = differential_q(mdp, {0, 0, 0, 0});
  const PoissonSolution sol = solve_poisson(chain);
  CHECK((out.q.col(0) - sol.v_diff).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("differential q matches a truncated monte-carlo estimate") {
  CounterRng rng(9);
  FiniteActionMDP mdp;
  const int n = 4, na = 2;
  mdp.R = Mat(n, na);
  for (int a = 0; a < na; ++a) {
    TabularMDP part = random_chain(n, rng);
    mdp.P.push_back(part.P);
    for (int s = 0; s < n; ++s) mdp.R(s, a) = rng.uniform_range(-1.0, 1.0);
  }
  const std::vector<int> policy = {1, 0, 1, 0};
  const DifferentialQResult out = differential_q(mdp, policy);

  const int start_state = 2, start_action = 0;
  const int horizon = 10000, reps = 1000;
  double mean = 0.0, m2 = 0.0;
  for (int rep = 0; rep < reps; ++rep) {
    double sum = 0.0;
    int s = start_state;
    int a = start_action;
    for (int t = 0; t < horizon; ++t) {
      sum += mdp.R(s, a) - out.rho;
      s = draw_from_row(mdp.P[a], s, rng.uniform());
      a = policy[s];
    }
    mean += sum;
    m2 += sum * sum;
  }
  mean /= reps;
  const double var = m2 / reps - mean * mean;
  const double stderr_mean = std::sqrt(var / reps);
  // The truncated return estimates Q up to the (bounded) tail bias; compare
  // against the value-function offset at the start of the recurrence.
  CHECK(std::abs(mean - out.q(start_state, start_action)) < 3.0 * stderr_mean + 1e-3);
}

TEST_CASE("grid model rows are stochastic and smooth in the action") {
  Grid1DModel model(-2.0, 2.0, 32, 0.3,
                    [](double s, double a) { return 0.8 * s + 0.5 * a; },
                    [](double s, double a) { return std::cos(s) - 0.1 * a * a; });
  for (double a : {-1.0, 0.0, 0.7}) {
    for (int i = 0; i < model.n_states(); i += 5) {
      const Vec row = model.transition_row(i, a);
      CHECK(std::abs(row.sum() - 1.0) < 1e-12);
      CHECK((row.array() >= 0.0).all());
      // Analytic action derivative against central differences.
      const Vec drow = model.dtransition_da(i, a);
      const Vec fd =
          (model.transition_row(i, a + 1e-6) - model.transition_row(i, a - 1e-6)) / 2e-6;
      CHECK((drow - fd).cwiseAbs().maxCoeff() < 1e-7);
      CHECK(std::abs(drow.sum()) < 1e-10);  // row derivative sums to zero
    }
  }
  LinearPolicy policy(1, 1);
  const TabularMDP chain = model.induced_chain(policy, Vec::Constant(1, 0.2));
  CHECK_NOTHROW(validate_ergodic(chain));
}

TEST_CASE("simulated visit frequencies match the stationary distribution") {
  CounterRng rng(10);
  const TabularMDP mdp = random_chain(6, rng);
  const Vec d = stationary_distribution(mdp);
  Vec counts = Vec::Zero(6);
  int state = 0;
  const int steps = 1000000;
  for (int t2 = 0; t2 < steps; ++t2) {
    counts[state] += 1.0;
    state = draw_from_row(mdp.P, state, rng.uniform());
  }
  counts /= steps;
  const double tv = 0.5 * (counts - d).cwiseAbs().sum();
  CHECK(tv < 0.01);
}

TEST_CASE("large chains use power iteration and still satisfy stationarity") {
  CounterRng rng(11);
  const int n = 600;  // beyond the direct-solve cutoff
  TabularMDP mdp;
  mdp.P = Mat(n, n);
  mdp.R = Vec::Zero(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) mdp.P(i, j) = 0.01 + rng.uniform();
    mdp.P.row(i) /= mdp.P.row(i).sum();
  }
  const Vec d = stationary_distribution(mdp);
  CHECK(std::abs(d.sum() - 1.0) < 1e-12);
  CHECK((mdp.P.transpose() * d - d).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((d.array() > 0.0).all());
}
