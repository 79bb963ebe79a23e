#pragma once

#include <stdexcept>

#include "ardpg/rng.hpp"

namespace ardpg {

/// One (state, action, reward, next-state) sample; the unit of replay storage.
struct Transition {
  Vec state;
  Vec action;
  double reward = 0.0;
  Vec next_state;
};

/// Axis-aligned box, one interval per dimension.
struct Box {
  Vec lo;
  Vec hi;

  int dim() const { return static_cast<int>(lo.size()); }
  Vec clip(const Vec& x) const { return x.cwiseMax(lo).cwiseMin(hi); }
  bool contains(const Vec& x, double tol = 0.0) const {
    return (x.array() >= lo.array() - tol).all() && (x.array() <= hi.array() + tol).all();
  }
  Vec sample(CounterRng& rng) const {
    Vec x(dim());
    for (int i = 0; i < dim(); ++i) x[i] = rng.uniform_range(lo[i], hi[i]);
    return x;
  }
  static Box symmetric(int n, double half_width) {
    return Box{Vec::Constant(n, -half_width), Vec::Constant(n, half_width)};
  }
};

struct EnvSpec {
  int state_dim = 0;
  int action_dim = 0;
  double reward_bound = 0.0;  // |reward| <= reward_bound, everywhere
  Box action_box;             // actions are clipped here before dynamics
  Box state_box;              // operating region; states stay inside
};

struct rejected_input : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

inline void require(bool cond, const char* msg) {
  if (!cond) throw rejected_input(msg);
}

}  // namespace ardpg
