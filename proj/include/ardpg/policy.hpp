#pragma once

#include <memory>

#include "ardpg/types.hpp"

namespace ardpg {

/// Deterministic parameterized policy pi(s, theta). Implementations are
/// immutable after construction; parameters travel separately so one policy
/// object serves many parameter vectors.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual int state_dim() const = 0;
  virtual int action_dim() const = 0;
  virtual int param_dim() const = 0;

  virtual Vec eval(const Vec& theta, const Vec& state) const = 0;

  /// d x m matrix whose column j is the gradient of action component j.
  virtual Mat jacobian(const Vec& theta, const Vec& state) const = 0;

  virtual std::unique_ptr<Policy> clone() const = 0;

 protected:
  void check_dims(const Vec& theta, const Vec& state) const {
    require(theta.size() == param_dim(), "policy: parameter dimension mismatch");
    require(state.size() == state_dim(), "policy: state dimension mismatch");
  }
};

/// pi(s) = K s with K an m x n gain; theta is the row-major flattening of K.
class LinearPolicy : public Policy {
 public:
  LinearPolicy(int state_dim, int action_dim);

  int state_dim() const override { return n_; }
  int action_dim() const override { return m_; }
  int param_dim() const override { return n_ * m_; }

  Vec eval(const Vec& theta, const Vec& state) const override;
  Mat jacobian(const Vec& theta, const Vec& state) const override;
  std::unique_ptr<Policy> clone() const override;

 private:
  int n_;
  int m_;
};

/// pi_j(s) = sum_c theta[j * n_centers + c] * exp(-|s - c|^2 / (2 h^2)).
/// Kernels are unnormalized, so a unit weight at a center reproduces itself.
class RbfPolicy : public Policy {
 public:
  RbfPolicy(Mat centers, double width, int action_dim);

  int state_dim() const override { return static_cast<int>(centers_.cols()); }
  int action_dim() const override { return m_; }
  int param_dim() const override { return m_ * static_cast<int>(centers_.rows()); }

  Vec eval(const Vec& theta, const Vec& state) const override;
  Mat jacobian(const Vec& theta, const Vec& state) const override;
  std::unique_ptr<Policy> clone() const override;

  Vec kernel(const Vec& state) const;

 private:
  Mat centers_;  // n_centers x state_dim
  double width_;
  int m_;
};

}  // namespace ardpg
