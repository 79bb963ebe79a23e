#include <doctest.h>

#include <filesystem>

#include "ardpg/checkpoint.hpp"

using namespace ardpg;

TEST_CASE("linear critic checkpoints round-trip exactly") {
  CounterRng rng(1);
  CriticState cs = make_critic(4, 0.3, 7.5, true);
  cs.w1 = rng.normal_vec(4);
  cs.w2 = rng.normal_vec(4);
  cs.w1_target = rng.normal_vec(4);
  cs.w2_target = rng.normal_vec(4);
  cs.rho = 0.123456789012345;
  cs.rho_target = -0.5;
  save_critic(cs, 4242, "test_critic.ckpt");
  std::uint64_t step = 0;
  const CriticState loaded = load_critic("test_critic.ckpt", &step);
  CHECK(step == 4242);
  CHECK(loaded.w1 == cs.w1);
  CHECK(loaded.w2 == cs.w2);
  CHECK(loaded.w1_target == cs.w1_target);
  CHECK(loaded.w2_target == cs.w2_target);
  CHECK(loaded.rho == cs.rho);
  CHECK(loaded.rho_target == cs.rho_target);
  CHECK(loaded.eta == cs.eta);
  CHECK(loaded.ball.radius == cs.ball.radius);
  CHECK(loaded.double_head == cs.double_head);
  std::filesystem::remove("test_critic.ckpt");
}

TEST_CASE("agent checkpoints preserve the forward map") {
  PointMassEnv env;
  AgentConfig cfg;
  cfg.hidden = {8, 8};
  AroDdpgAgent agent = make_agent(env.spec(), cfg, 5);
  agent.rho = 0.25;
  agent.t = 999;
  save_agent(agent, "test_agent.ckpt");
  const AroDdpgAgent loaded = load_agent("test_agent.ckpt");
  CHECK(loaded.t == 999);
  CHECK(loaded.rho == agent.rho);
  CounterRng rng(6);
  for (int i = 0; i < 10; ++i) {
    const Vec s = rng.normal_vec(4);
    CHECK(loaded.actor.forward(s) == agent.actor.forward(s));
    Vec x(6);
    x << s, agent.actor.forward(s);
    CHECK(loaded.q1.forward(x) == agent.q1.forward(x));
    CHECK(loaded.q2_target.forward(x) == agent.q2_target.forward(x));
  }
  std::filesystem::remove("test_agent.ckpt");
}

TEST_CASE("wrong headers are rejected") {
  CounterRng rng(2);
  CriticState cs = make_critic(2, 0.0, 1.0);
  save_critic(cs, 0, "test_kind.ckpt");
  CHECK_THROWS(load_agent("test_kind.ckpt"));
  CHECK_THROWS(load_critic("does_not_exist.ckpt"));
  std::filesystem::remove("test_kind.ckpt");
}
