#pragma once

#include <vector>

#include "ardpg/types.hpp"

namespace ardpg {

/// Fixed-capacity FIFO ring of transitions with uniform with-replacement
/// sampling. Exclusively owned by one run loop; no locking.
class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, int state_dim, int action_dim);

  void push(Transition tr);
  std::vector<Transition> sample_uniform(int batch_size, CounterRng& rng) const;
  void clear();

  std::size_t size() const { return count_; }
  std::size_t capacity() const { return capacity_; }
  const Transition& at(std::size_t logical_index) const;

 private:
  std::size_t capacity_;
  int state_dim_;
  int action_dim_;
  std::vector<Transition> storage_;
  std::size_t head_ = 0;  // next write slot
  std::size_t count_ = 0;
};

}  // namespace ardpg
