#include "ardpg/replay.hpp"

namespace ardpg {

ReplayBuffer::ReplayBuffer(std::size_t capacity, int state_dim, int action_dim)
    : capacity_(capacity), state_dim_(state_dim), action_dim_(action_dim) {
  require(capacity >= 1, "replay: capacity must be >= 1");
  storage_.reserve(std::min<std::size_t>(capacity, 1 << 20));
}

void ReplayBuffer::push(Transition tr) {
  require(tr.state.size() == state_dim_ && tr.next_state.size() == state_dim_,
          "replay: state dimension mismatch");
  require(tr.action.size() == action_dim_, "replay: action dimension mismatch");
  if (storage_.size() < capacity_) {
    storage_.push_back(std::move(tr));
    count_ = storage_.size();
    head_ = count_ % capacity_;
    return;
  }
  storage_[head_] = std::move(tr);  // overwrite oldest
  head_ = (head_ + 1) % capacity_;
}

const Transition& ReplayBuffer::at(std::size_t logical_index) const {
  require(logical_index < count_, "replay: index out of range");
  if (count_ < capacity_) return storage_[logical_index];
  return storage_[(head_ + logical_index) % capacity_];
}

std::vector<Transition> ReplayBuffer::sample_uniform(int batch_size, CounterRng& rng) const {
  require(count_ >= 1, "replay: cannot sample from an empty buffer");
  require(batch_size >= 1, "replay: batch size must be >= 1");
  std::vector<Transition> batch;
  batch.reserve(batch_size);
  for (int i = 0; i < batch_size; ++i)
    batch.push_back(storage_[static_cast<std::size_t>(rng.uniform_int(count_))]);
  return batch;
}

void ReplayBuffer::clear() {
  storage_.clear();
  head_ = 0;
  count_ = 0;
}

}  // namespace ardpg
