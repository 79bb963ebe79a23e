#include "ardpg/mlp.hpp"

#include <cmath>

namespace ardpg {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;
}  // namespace

double act_forward(Act act, double z) {
  switch (act) {
    case Act::relu:
      return z > 0.0 ? z : 0.0;
    case Act::gelu:
      return 0.5 * z * (1.0 + std::erf(z * kInvSqrt2));
  }
  return z;
}

double act_derivative(Act act, double z) {
  switch (act) {
    case Act::relu:
      return z > 0.0 ? 1.0 : 0.0;
    case Act::gelu:
      return 0.5 * (1.0 + std::erf(z * kInvSqrt2)) + z * kInvSqrt2Pi * std::exp(-0.5 * z * z);
  }
  return 1.0;
}

Mlp::Mlp(const std::vector<int>& widths, Act activation, CounterRng& rng) {
  require(widths.size() >= 2, "mlp: need at least input and output widths");
  act = activation;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const int fan_in = widths[l];
    const int fan_out = widths[l + 1];
    require(fan_in >= 1 && fan_out >= 1, "mlp: widths must be positive");
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    Mat w(fan_out, fan_in);
    for (int i = 0; i < fan_out; ++i)
      for (int j = 0; j < fan_in; ++j) w(i, j) = rng.uniform_range(-bound, bound);
    Vec bias(fan_out);
    for (int i = 0; i < fan_out; ++i) bias[i] = rng.uniform_range(-bound, bound);
    W.push_back(std::move(w));
    b.push_back(std::move(bias));
  }
}

Mlp::Trace Mlp::forward_trace(const Mat& x) const {
  require(x.rows() == in_dim(), "mlp: input dimension mismatch");
  Trace trace;
  trace.inputs.reserve(W.size());
  trace.preact.reserve(W.size());
  Mat h = x;
  for (std::size_t l = 0; l < W.size(); ++l) {
    trace.inputs.push_back(h);
    Mat z = (W[l] * h).colwise() + b[l];
    trace.preact.push_back(z);
    if (l + 1 < W.size())
      h = z.unaryExpr([this](double v) { return act_forward(act, v); });
    else
      h = z;
  }
  trace.output = h;
  return trace;
}

Mat Mlp::forward(const Mat& x) const { return forward_trace(x).output; }

Vec Mlp::forward(const Vec& x) const {
  return forward_trace(Mat(x)).output.col(0);
}

MlpGrads Mlp::backward(const Trace& trace, const Mat& upstream, Mat* input_grad) const {
  require(upstream.rows() == out_dim() && upstream.cols() == trace.output.cols(),
          "mlp: upstream shape mismatch");
  MlpGrads grads = zero_grads();
  Mat delta = upstream;  // gradient at the current layer's pre-activation
  for (int l = n_layers() - 1; l >= 0; --l) {
    grads.dW[l] = delta * trace.inputs[l].transpose();
    grads.db[l] = delta.rowwise().sum();
    if (l > 0) {
      Mat back = W[l].transpose() * delta;
      const Mat& z = trace.preact[l - 1];
      delta = back.binaryExpr(z, [this](double g, double zv) {
        return g * act_derivative(act, zv);
      });
    } else if (input_grad != nullptr) {
      *input_grad = W[0].transpose() * delta;
    }
  }
  return grads;
}

MlpGrads Mlp::zero_grads() const {
  MlpGrads grads;
  for (std::size_t l = 0; l < W.size(); ++l) {
    grads.dW.push_back(Mat::Zero(W[l].rows(), W[l].cols()));
    grads.db.push_back(Vec::Zero(b[l].size()));
  }
  return grads;
}

void Mlp::apply(const MlpGrads& grads, double step) {
  for (std::size_t l = 0; l < W.size(); ++l) {
    W[l] += step * grads.dW[l];
    b[l] += step * grads.db[l];
  }
}

int Mlp::param_count() const {
  int count = 0;
  for (std::size_t l = 0; l < W.size(); ++l)
    count += static_cast<int>(W[l].size() + b[l].size());
  return count;
}

Vec Mlp::flatten() const {
  Vec params(param_count());
  int idx = 0;
  for (std::size_t l = 0; l < W.size(); ++l) {
    for (int i = 0; i < W[l].rows(); ++i)
      for (int j = 0; j < W[l].cols(); ++j) params[idx++] = W[l](i, j);
    for (int i = 0; i < b[l].size(); ++i) params[idx++] = b[l][i];
  }
  return params;
}

void Mlp::unflatten(const Vec& params) {
  require(params.size() == param_count(), "mlp: parameter count mismatch");
  int idx = 0;
  for (std::size_t l = 0; l < W.size(); ++l) {
    for (int i = 0; i < W[l].rows(); ++i)
      for (int j = 0; j < W[l].cols(); ++j) W[l](i, j) = params[idx++];
    for (int i = 0; i < b[l].size(); ++i) b[l][i] = params[idx++];
  }
}

void MomentOptimizer::init(const Mlp& net) {
  mW.clear();
  vW.clear();
  mb.clear();
  vb.clear();
  for (std::size_t l = 0; l < net.W.size(); ++l) {
    mW.push_back(Mat::Zero(net.W[l].rows(), net.W[l].cols()));
    vW.push_back(Mat::Zero(net.W[l].rows(), net.W[l].cols()));
    mb.push_back(Vec::Zero(net.b[l].size()));
    vb.push_back(Vec::Zero(net.b[l].size()));
  }
  steps = 0;
}

void MomentOptimizer::apply(Mlp& net, const MlpGrads& grads, double lr) {
  ++steps;
  const double c1 = 1.0 - std::pow(beta1, static_cast<double>(steps));
  const double c2 = 1.0 - std::pow(beta2, static_cast<double>(steps));
  for (std::size_t l = 0; l < net.W.size(); ++l) {
    mW[l] = beta1 * mW[l] + (1.0 - beta1) * grads.dW[l];
    vW[l] = beta2 * vW[l] + (1.0 - beta2) * grads.dW[l].cwiseProduct(grads.dW[l]);
    mb[l] = beta1 * mb[l] + (1.0 - beta1) * grads.db[l];
    vb[l] = beta2 * vb[l] + (1.0 - beta2) * grads.db[l].cwiseProduct(grads.db[l]);
    net.W[l] += lr * (mW[l] / c1).cwiseQuotient(((vW[l] / c2).cwiseSqrt().array() + eps).matrix());
    net.b[l] += lr * (mb[l] / c1).cwiseQuotient(((vb[l] / c2).cwiseSqrt().array() + eps).matrix());
  }
}

}  // namespace ardpg
