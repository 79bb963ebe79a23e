#pragma once

#include <vector>

#include "ardpg/rng.hpp"
#include "ardpg/types.hpp"

namespace ardpg {

enum class Act { relu, gelu };

struct MlpGrads {
  std::vector<Mat> dW;
  std::vector<Vec> db;
};

/// Fully connected network with hand-written backward pass. Columns of the
/// input/output matrices are batch items. The activation is applied after
/// every layer except the last; ReLU uses subgradient 0 at exactly 0.
class Mlp {
 public:
  Mlp() = default;
  /// widths = {in, hidden..., out}; weights init uniform in +-1/sqrt(fan_in).
  Mlp(const std::vector<int>& widths, Act act, CounterRng& rng);

  int in_dim() const { return W.empty() ? 0 : static_cast<int>(W.front().cols()); }
  int out_dim() const { return W.empty() ? 0 : static_cast<int>(W.back().rows()); }
  int n_layers() const { return static_cast<int>(W.size()); }

  Mat forward(const Mat& x) const;
  Vec forward(const Vec& x) const;

  /// Layer inputs cached during the forward pass; feeds backward().
  struct Trace {
    std::vector<Mat> inputs;  // inputs[l] is the input to layer l
    std::vector<Mat> preact;  // preact[l] = W_l inputs[l] + b_l
    Mat output;
  };
  Trace forward_trace(const Mat& x) const;

  /// Exact gradients of sum_batch upstream . output w.r.t. parameters and
  /// the network input.
  MlpGrads backward(const Trace& trace, const Mat& upstream, Mat* input_grad = nullptr) const;

  MlpGrads zero_grads() const;
  void apply(const MlpGrads& grads, double step);  // params += step * grads

  int param_count() const;
  Vec flatten() const;
  void unflatten(const Vec& params);

  std::vector<Mat> W;
  std::vector<Vec> b;
  Act act = Act::relu;
};

double act_forward(Act act, double z);
double act_derivative(Act act, double z);

/// Adam-style first/second moment optimizer state for one network.
struct MomentOptimizer {
  std::vector<Mat> mW, vW;
  std::vector<Vec> mb, vb;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::uint64_t steps = 0;

  void init(const Mlp& net);
  void apply(Mlp& net, const MlpGrads& grads, double lr);  // ascent when lr > 0
};

}  // namespace ardpg
