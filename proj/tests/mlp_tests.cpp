#include <doctest.h>

#include <cmath>

#include "ardpg/mlp.hpp"

using namespace ardpg;

namespace {

Vec flatten_grads(const Mlp& net, const MlpGrads& grads) {
  Vec flat(net.param_count());
  int idx = 0;
  for (int l = 0; l < net.n_layers(); ++l) {
    for (int i = 0; i < grads.dW[l].rows(); ++i)
      for (int j = 0; j < grads.dW[l].cols(); ++j) flat[idx++] = grads.dW[l](i, j);
    for (int i = 0; i < grads.db[l].size(); ++i) flat[idx++] = grads.db[l][i];
  }
  return flat;
}

/// Network whose pre-activations stay away from the ReLU kink on the probe.
Mlp kink_free_net(const std::vector<int>& widths, const Mat& probe, Act act) {
  for (std::uint64_t seed = 0;; ++seed) {
    CounterRng rng(seed);
    Mlp net(widths, act, rng);
    if (act == Act::gelu) return net;
    const Mlp::Trace tr = net.forward_trace(probe);
    double min_pre = 1e300;
    for (int l = 0; l + 1 < net.n_layers(); ++l)
      min_pre = std::min(min_pre, tr.preact[l].cwiseAbs().minCoeff());
    if (min_pre > 2e-3) return net;
  }
}

}  // namespace

TEST_CASE("identity single layer passes input and gradient through") {
  CounterRng rng(0);
  Mlp net({3, 3}, Act::relu, rng);
  net.W[0] = Mat::Identity(3, 3);
  net.b[0] = Vec::Zero(3);
  Vec x(3);
  x << 0.5, -1.0, 2.0;
  CHECK(net.forward(x) == x);  // final layer has no activation
  const Mlp::Trace tr = net.forward_trace(Mat(x));
  Mat upstream(3, 1);
  upstream << 1.0, 2.0, 3.0;
  Mat input_grad;
  net.backward(tr, upstream, &input_grad);
  CHECK(input_grad == upstream);
}

TEST_CASE("relu uses subgradient zero at exactly zero") {
  CHECK(act_derivative(Act::relu, 0.0) == 0.0);
  CHECK(act_derivative(Act::relu, 1e-12) == 1.0);
  CHECK(act_forward(Act::relu, 0.0) == 0.0);
}

TEST_CASE("gelu value and derivative") {
  CHECK(act_forward(Act::gelu, 0.0) == 0.0);
  for (double z : {-1.5, -0.3, 0.0, 0.7, 2.0}) {
    const double fd =
        (act_forward(Act::gelu, z + 1e-6) - act_forward(Act::gelu, z - 1e-6)) / 2e-6;
    CHECK(act_derivative(Act::gelu, z) == doctest::Approx(fd).epsilon(1e-7));
  }
}

TEST_CASE("every parameter gradient of a tiny net matches finite differences") {
  const std::vector<int> widths = {4, 8, 2};
  Mat probe(4, 6);
  CounterRng data_rng(1);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 6; ++j) probe(i, j) = data_rng.uniform_range(-1.0, 1.0);
  for (Act act : {Act::relu, Act::gelu}) {
    Mlp net = kink_free_net(widths, probe, act);
    Mat upstream(2, 6);
    CounterRng up_rng(2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 6; ++j) upstream(i, j) = up_rng.uniform_range(-1.0, 1.0);
    const Mlp::Trace tr = net.forward_trace(probe);
    const Vec analytic = flatten_grads(net, net.backward(tr, upstream));
    const Vec params = net.flatten();
    const double delta = 1e-4;
    for (int p = 0; p < params.size(); ++p) {
      Vec hi = params, lo = params;
      hi[p] += delta;
      lo[p] -= delta;
      Mlp nh = net, nl = net;
      nh.unflatten(hi);
      nl.unflatten(lo);
      const double fh = (upstream.array() * nh.forward(probe).array()).sum();
      const double fl = (upstream.array() * nl.forward(probe).array()).sum();
      const double fd = (fh - fl) / (2.0 * delta);
      CHECK(std::abs(fd - analytic[p]) <= 1e-4 * std::max(std::abs(analytic[p]), 1e-6));
    }
  }
}

TEST_CASE("input gradients match finite differences") {
  const std::vector<int> widths = {3, 6, 2};
  Mat probe(3, 1);
  probe << 0.3, -0.8, 0.5;
  Mlp net = kink_free_net(widths, probe, Act::gelu);
  Mat upstream(2, 1);
  upstream << 0.7, -0.4;
  const Mlp::Trace tr = net.forward_trace(probe);
  Mat input_grad;
  net.backward(tr, upstream, &input_grad);
  for (int i = 0; i < 3; ++i) {
    Mat hi = probe, lo = probe;
    hi(i, 0) += 1e-6;
    lo(i, 0) -= 1e-6;
    const double fd = ((upstream.array() * net.forward(hi).array()).sum() -
                       (upstream.array() * net.forward(lo).array()).sum()) /
                      2e-6;
    CHECK(input_grad(i, 0) == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("flatten and unflatten round trip") {
  CounterRng rng(3);
  Mlp net({2, 5, 3}, Act::relu, rng);
  const Vec params = net.flatten();
  Mlp other({2, 5, 3}, Act::relu, rng);
  other.unflatten(params);
  CHECK(other.flatten() == params);
  CHECK_THROWS_AS(other.unflatten(Vec::Zero(3)), rejected_input);
}

TEST_CASE("moment optimizer ascends along persistent gradients") {
  CounterRng rng(4);
  Mlp net({1, 1}, Act::relu, rng);
  MomentOptimizer opt;
  opt.init(net);
  MlpGrads grads = net.zero_grads();
  grads.dW[0](0, 0) = 1.0;  // constant positive gradient
  const double before = net.W[0](0, 0);
  for (int i = 0; i < 10; ++i) opt.apply(net, grads, 0.1);
  CHECK(net.W[0](0, 0) > before);
}
