#include <doctest.h>

#include <cmath>

#include "ardpg/env.hpp"
#include "ardpg/lqr.hpp"

using namespace ardpg;

namespace {
LqrEnv make_scalar_env(double noise = 0.0) {
  return LqrEnv(scalar_lqr_spec(0.5, 1.0, 1.0, 0.1, noise), Mat::Constant(1, 1, -0.2));
}
}  // namespace

TEST_CASE("scalar lqr step matches the declared dynamics") {
  LqrEnv env = make_scalar_env(0.0);
  env.reset(0);
  Vec s(1), a(1);
  s << 1.0;
  a << -0.3;
  const auto [next, reward] = env.step(s, a);
  CHECK(next[0] == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(reward == doctest::Approx(-1.009).epsilon(1e-14));
}

TEST_CASE("zero state and action are a fixed point of noiseless lqr") {
  LqrEnv env = make_scalar_env(0.0);
  env.reset(1);
  const auto [next, reward] = env.step(Vec::Zero(1), Vec::Zero(1));
  CHECK(next[0] == 0.0);
  CHECK(reward == 0.0);
}

TEST_CASE("zero-initialization option starts at the origin") {
  LqrEnv env(scalar_lqr_spec(), Mat::Constant(1, 1, -0.2), 10.0, 1.0, /*zero_init=*/true);
  CHECK(env.reset(123).isZero());
}

TEST_CASE("reset with the same seed is bit-identical") {
  PointMassEnv env;
  const Vec a = env.reset(0);
  const Vec b = env.reset(0);
  CHECK(a == b);
}

TEST_CASE("distinct seeds give distinct initial states") {
  PointMassEnv env;
  int collisions = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Vec a = env.reset(2 * seed);
    const Vec b = env.reset(2 * seed + 1);
    if (a == b) ++collisions;
  }
  CHECK(collisions == 0);
}

TEST_CASE("same seed and action sequence reproduce the trajectory bit-exactly") {
  for (const char* name : {"lqr1d", "pointmass", "slide"}) {
    auto env1 = make_env(name, {{"noise_std", 0.1}});
    auto env2 = make_env(name, {{"noise_std", 0.1}});
    CounterRng actions(77);
    Vec s1 = env1->reset(5);
    Vec s2 = env2->reset(5);
    REQUIRE(s1 == s2);
    for (int t = 0; t < 200; ++t) {
      const Vec a = actions.normal_vec(env1->spec().action_dim);
      auto [n1, r1] = env1->step(s1, a);
      auto [n2, r2] = env2->step(s2, a);
      CHECK(n1 == n2);
      CHECK(r1 == r2);
      s1 = n1;
      s2 = n2;
    }
  }
}

TEST_CASE("reward bound holds over a million random pairs per environment") {
  for (const char* name : {"lqr1d", "pointmass", "slide"}) {
    auto env = make_env(name);
    const EnvSpec& spec = env->spec();
    CounterRng rng(name[0]);
    env->reset(0);
    Vec wide_lo = spec.state_box.lo * 1.0;
    Vec wide_hi = spec.state_box.hi * 1.0;
    const Box wide{wide_lo, wide_hi};
    for (int i = 0; i < 1000000; ++i) {
      const Vec s = wide.sample(rng);
      Vec a(spec.action_dim);
      for (int j = 0; j < spec.action_dim; ++j) a[j] = rng.uniform_range(-2.0, 2.0);
      const auto [next, reward] = env->step(s, a);
      REQUIRE(std::abs(reward) <= spec.reward_bound);
    }
  }
}

TEST_CASE("point mass stays inside the state box from every action corner") {
  PointMassEnv env(0.0);
  env.reset(0);
  const Box& box = env.spec().state_box;
  const double corners[2] = {-1.0, 1.0};
  for (double x0 = -2.0; x0 <= 2.0; x0 += 0.5)
    for (double x1 = -2.0; x1 <= 2.0; x1 += 0.5)
      for (double v0 = -2.0; v0 <= 2.0; v0 += 0.5)
        for (double v1 = -2.0; v1 <= 2.0; v1 += 0.5)
          for (double a0 : corners)
            for (double a1 : corners) {
              Vec s(4), a(2);
              s << x0, x1, v0, v1;
              a << a0, a1;
              const auto [next, reward] = env.step(s, a);
              (void)reward;
              CHECK(box.contains(next, 1e-12));
            }
}

TEST_CASE("lqr empirical second moment matches the lyapunov solution") {
  const LQRSpec spec = scalar_lqr_spec(0.5, 1.0, 1.0, 0.1, 0.1);
  const Mat gain = Mat::Constant(1, 1, -0.2);
  LqrEnv env(spec, gain);
  Vec s = env.reset(3);
  double second_moment = 0.0;
  const int n = 100000;
  for (int t = 0; t < n; ++t) {
    const Vec a = gain * s;
    auto [next, reward] = env.step(s, a);
    (void)reward;
    s = next;
    second_moment += s[0] * s[0];
  }
  second_moment /= n;
  const double sigma = lqr_stationary_cov(spec, gain)(0, 0);
  CHECK(std::abs(second_moment - sigma) / sigma < 0.05);
}

TEST_CASE("non-finite inputs are rejected") {
  LqrEnv env = make_scalar_env();
  env.reset(0);
  Vec bad(1), good(1);
  bad << std::numeric_limits<double>::quiet_NaN();
  good << 0.5;
  CHECK_THROWS_AS(env.step(bad, good), rejected_input);
  CHECK_THROWS_AS(env.step(good, bad), rejected_input);
}

TEST_CASE("actions are clipped before the dynamics apply") {
  SlideEnv env(0.0);
  env.reset(0);
  Vec s(1), a(1);
  s << 0.0;
  a << 100.0;  // clips to 1
  const auto [next, reward] = env.step(s, a);
  CHECK(next[0] == doctest::Approx(0.5));
  CHECK(reward == doctest::Approx(env.reward_at(0.0, 1.0)));
}

TEST_CASE("lqr model validation rejects bad instances") {
  LQRSpec spec = scalar_lqr_spec();
  CHECK_THROWS_AS(LqrEnv(spec, Mat::Constant(1, 1, 0.6)), rejected_input);  // unstable witness
  LQRSpec bad_r = spec;
  bad_r.R_cost = Mat::Constant(1, 1, 0.0);  // not positive definite
  CHECK_THROWS_AS(LqrEnv(bad_r, Mat::Constant(1, 1, -0.2)), rejected_input);
  LQRSpec bad_q = spec;
  bad_q.Q_cost = Mat::Constant(1, 1, -1.0);
  CHECK_THROWS_AS(LqrEnv(bad_q, Mat::Constant(1, 1, -0.2)), rejected_input);
}

TEST_CASE("unknown environment name is rejected") {
  CHECK_THROWS_AS(make_env("nope"), rejected_input);
}
