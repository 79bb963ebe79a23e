#include <doctest.h>

#include <cmath>

#include "ardpg/actor.hpp"
#include "ardpg/env.hpp"
#include "ardpg/oracles.hpp"

using namespace ardpg;

TEST_CASE("zero critic gives a zero gradient") {
  LinearPolicy policy(2, 1);
  CompatibleFeatureMap fmap(policy, std::make_unique<ZeroBasis>(), 1.0);
  CriticState cs = make_critic(fmap.dim(), 0.0, 1.0);
  CounterRng rng(1);
  std::vector<Transition> batch{{rng.normal_vec(2), Vec::Zero(1), 0.0, rng.normal_vec(2)}};
  const GradientEstimate est = dpg_gradient(batch, cs, rng.normal_vec(2), fmap, policy);
  CHECK(est.vector.isZero());
}

TEST_CASE("scalar one-sample gradient value") {
  LinearPolicy policy(1, 1);
  CompatibleFeatureMap fmap(policy, std::make_unique<ZeroBasis>(), 1.0);
  CriticState cs = make_critic(1, 0.0, 10.0);
  cs.w1 << 3.0;
  cs.w2 = cs.w1;
  Vec theta(1), s(1);
  theta << 0.5;
  s << 2.0;
  std::vector<Transition> batch{{s, Vec::Zero(1), 0.0, s}};
  const GradientEstimate est = dpg_gradient(batch, cs, theta, fmap, policy);
  CHECK(est.vector[0] == doctest::Approx(12.0).epsilon(1e-15));  // s^2 w = 4 * 3
  REQUIRE(est.per_sample_norms.size() == 1);
  CHECK(est.per_sample_norms[0] == doctest::Approx(12.0));
}

TEST_CASE("batch gradient matches a scalar-loop recomputation") {
  LinearPolicy policy(2, 1);
  CompatibleFeatureMap fmap(policy, std::make_unique<PolyBasis>(1), 0.7);
  CounterRng rng(3);
  for (int rep = 0; rep < 25; ++rep) {
    CriticState cs = make_critic(fmap.dim(), 0.0, 100.0);
    cs.w1 = rng.normal_vec(fmap.dim());
    cs.w2 = cs.w1;
    const Vec theta = rng.normal_vec(2);
    std::vector<Transition> batch;
    const int m = 4;
    for (int i = 0; i < m; ++i)
      batch.push_back({rng.normal_vec(2), Vec::Zero(1), 0.0, rng.normal_vec(2)});

    double acc[2] = {0.0, 0.0};
    for (const auto& tr : batch) {
      // dQ/da at the policy action: scale * (J' w_adv); J column is the state.
      double dq = 0.0;
      for (int j = 0; j < 2; ++j) dq += 0.7 * tr.state[j] * cs.w1[j];
      for (int j = 0; j < 2; ++j) acc[j] += tr.state[j] * dq;
    }
    const GradientEstimate est = dpg_gradient(batch, cs, theta, fmap, policy);
    for (int j = 0; j < 2; ++j)
      CHECK(est.vector[j] == doctest::Approx(acc[j] / m).epsilon(1e-12));
  }
}

TEST_CASE("PolyBasis rejects multi-dimensional states") {
  LinearPolicy policy(2, 1);
  CompatibleFeatureMap fmap(policy, std::make_unique<PolyBasis>(1), 1.0);
  CHECK_THROWS_AS(fmap.phi(Vec::Zero(2), Vec::Zero(2), Vec::Zero(1)), rejected_input);
}

TEST_CASE("actor update endpoints and projection") {
  GradientEstimate zero{Vec::Zero(2), {}};
  Vec theta(2);
  theta << 1.0, 0.0;
  CHECK(actor_update(theta, zero, 0.5) == theta);

  GradientEstimate g{Vec::Zero(2), {}};
  g.vector << 0.0, 1.0;
  CHECK(actor_update(theta, g, 0.0) == theta);

  const Vec stepped = actor_update(theta, g, 0.5, ProjectionBall{10.0});
  CHECK(stepped[0] == 1.0);
  CHECK(stepped[1] == 0.5);

  const Vec clipped = actor_update(theta, g, 100.0, ProjectionBall{1.0});
  CHECK(clipped.norm() == doctest::Approx(1.0));
}

TEST_CASE("a small exact-gradient step never decreases the lqr objective") {
  CounterRng rng(5);
  const LQRSpec spec = scalar_lqr_spec();
  int checked = 0;
  for (int rep = 0; rep < 300 && checked < 100; ++rep) {
    const double k = rng.uniform_range(-1.4, 0.4);
    Mat gain = Mat::Constant(1, 1, k);
    if (spectral_radius(spec.A_dyn + spec.B_dyn * gain) >= 0.995) continue;
    ++checked;
    const double rho = lqr_average_reward(spec, gain);
    const Mat grad = lqr_policy_gradient(spec, gain);
    const Mat next_gain = gain + 1e-4 * grad;
    const double rho_next = lqr_average_reward(spec, next_gain);
    CHECK(rho_next >= rho - 1e-8);
  }
  CHECK(checked == 100);
}

TEST_CASE("compatible fixed point reproduces the finite-difference gradient") {
  // Expected gradient through the compatible critic at w_eps*, integrated
  // exactly over the stationary Gaussian, against central differences.
  const LQRSpec spec = scalar_lqr_spec();
  const Mat gain = Mat::Constant(1, 1, -0.35);
  const CompatibleCriticResult compat = lqr_compatible_solution(spec, gain);
  const double sigma = lqr_stationary_cov(spec, gain)(0, 0);
  // E[s^2] w_eps in closed form for the scalar instance.
  const double expected_grad = sigma * compat.w_eps_star[0];
  auto rho_fn = [&](const Vec& theta) {
    return lqr_average_reward(spec, unflatten_gain(theta, 1, 1));
  };
  const Vec fd = fd_gradient(rho_fn, flatten_gain(gain), 1e-5);
  CHECK(std::abs(expected_grad - fd[0]) / std::abs(fd[0]) < 1e-3);
}

TEST_CASE("generic-feature gradient decomposes into exact gradient plus bias") {
  // On a grid model with non-compatible features, the expected update
  // direction at the TD fixed point equals the exact gradient plus the
  // directly computed approximation bias.
  SlideEnv env(0.3);
  Grid1DModel model(-3.0, 3.0, 48, 0.3,
                    [&env](double s, double a) { return env.mean_next(s, a); },
                    [&env](double s, double a) { return env.reward_at(s, a); });
  LinearPolicy policy(1, 1);
  const Vec theta = Vec::Constant(1, 0.25);
  const TabularMDP chain = model.induced_chain(policy, theta);
  const Vec d = stationary_distribution(chain);
  const PoissonSolution poisson = solve_poisson(chain);

  GenericRbfFeatureMap fmap(Box::symmetric(1, 3.0), Box::symmetric(1, 1.0), 5);
  Mat phi(chain.n_states(), fmap.dim());
  for (int i = 0; i < chain.n_states(); ++i) {
    Vec s(1);
    s[0] = model.center(i);
    phi.row(i) = fmap.phi(theta, s, policy.eval(theta, s)).transpose();
  }
  const double eta = lambda_max_sym(chain, phi) + 0.3;
  const FixedPointResult fp = td_fixed_point(chain, phi, eta, poisson.k);

  Vec expected_grad = Vec::Zero(1);
  Vec bias = Vec::Zero(1);
  for (int i = 0; i < chain.n_states(); ++i) {
    Vec s(1);
    s[0] = model.center(i);
    const Vec a = policy.eval(theta, s);
    const double dq_w = (fmap.dphi_da(theta, s, a).transpose() * fp.w_star)[0];
    const double dq_pi = grid_dq_da(model, i, a[0], poisson.v_diff);
    const double jac = policy.jacobian(theta, s)(0, 0);
    expected_grad[0] += d[i] * dq_w * jac;
    bias[0] += d[i] * (dq_w - dq_pi) * jac;
  }
  auto rho_fn = [&](const Vec& th) { return grid_average_reward(model, policy, th); };
  const Vec exact = fd_gradient(rho_fn, theta, 1e-4);
  CHECK(std::abs(expected_grad[0] - (exact[0] + bias[0])) < 1e-6);
}

TEST_CASE("double-head critics route the gradient through the smaller head") {
  LinearPolicy policy(1, 1);
  CompatibleFeatureMap fmap(policy, std::make_unique<PolyBasis>(1), 1.0);
  CriticState cs = make_critic(fmap.dim(), 0.0, 100.0, /*double_head=*/true);
  // Head values at (s, pi(s)) depend only on the state block here.
  cs.w1 << 0.0, 5.0, 0.0;   // q1 = 5
  cs.w2 << 2.0, -1.0, 0.0;  // q2 = -1 -> the min head, advantage weight 2
  Vec theta(1), s(1);
  theta << 0.5;
  s << 2.0;
  std::vector<Transition> batch{{s, Vec::Zero(1), 0.0, s}};
  const GradientEstimate est = dpg_gradient(batch, cs, theta, fmap, policy);
  CHECK(est.vector[0] == doctest::Approx(2.0 * 2.0 * 2.0).epsilon(1e-14));  // s^2 w2_adv

  // Swap the ordering: now head one is smaller and its weight drives nu.
  cs.w1 << -3.0, -5.0, 0.0;
  cs.w2 << 2.0, -1.0, 0.0;
  const GradientEstimate est2 = dpg_gradient(batch, cs, theta, fmap, policy);
  CHECK(est2.vector[0] == doctest::Approx(2.0 * 2.0 * -3.0).epsilon(1e-14));

  CHECK(critic_value(cs, fmap.phi(theta, s, policy.eval(theta, s))) ==
        doctest::Approx(-5.0));
}
