#include <doctest.h>

#include "ardpg/replay.hpp"

using namespace ardpg;

namespace {
Transition tagged(double id) {
  return {Vec::Constant(1, id), Vec::Constant(1, 0.0), id, Vec::Constant(1, id)};
}
}  // namespace

TEST_CASE("fifo eviction keeps the newest items") {
  ReplayBuffer buf(3, 1, 1);
  for (int i = 1; i <= 4; ++i) buf.push(tagged(i));
  CHECK(buf.size() == 3);
  CHECK(buf.at(0).reward == 2.0);
  CHECK(buf.at(1).reward == 3.0);
  CHECK(buf.at(2).reward == 4.0);
}

TEST_CASE("push into empty gives count one") {
  ReplayBuffer buf(8, 1, 1);
  buf.push(tagged(1));
  CHECK(buf.size() == 1);
}

TEST_CASE("a million-slot buffer is accepted") {
  ReplayBuffer buf(1000000, 1, 1);
  CHECK(buf.capacity() == 1000000);
}

TEST_CASE("sampling a one-item buffer repeats that item") {
  ReplayBuffer buf(4, 1, 1);
  buf.push(tagged(7));
  CounterRng rng(0);
  const auto batch = buf.sample_uniform(5, rng);
  REQUIRE(batch.size() == 5);
  for (const auto& tr : batch) CHECK(tr.reward == 7.0);
}

TEST_CASE("default-sized batches sample fine") {
  ReplayBuffer buf(1024, 1, 1);
  for (int i = 0; i < 300; ++i) buf.push(tagged(i));
  CounterRng rng(1);
  CHECK(buf.sample_uniform(256, rng).size() == 256);
}

TEST_CASE("uniformity: chi-square over a hundred-item buffer") {
  ReplayBuffer buf(128, 1, 1);
  for (int i = 0; i < 100; ++i) buf.push(tagged(i));
  CounterRng rng(12345);
  std::vector<int> counts(100, 0);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const auto batch = buf.sample_uniform(1, rng);
    ++counts[static_cast<int>(batch[0].reward)];
  }
  const double expected = draws / 100.0;
  double stat = 0.0;
  for (int c : counts) stat += (c - expected) * (c - expected) / expected;
  // 0.999 quantile of chi-square with 99 degrees of freedom.
  CHECK(stat < 148.230359);
}

TEST_CASE("clear empties the buffer and sampling then fails") {
  ReplayBuffer buf(4, 1, 1);
  buf.push(tagged(1));
  buf.clear();
  CHECK(buf.size() == 0);
  CounterRng rng(0);
  CHECK_THROWS_AS(buf.sample_uniform(1, rng), rejected_input);
  buf.clear();  // clearing an empty buffer is a no-op
  CHECK(buf.size() == 0);
  buf.push(tagged(2));
  CHECK(buf.size() == 1);
}

TEST_CASE("dimension mismatches are rejected") {
  ReplayBuffer buf(4, 2, 1);
  CHECK_THROWS_AS(buf.push(tagged(1)), rejected_input);
}

TEST_CASE("randomized scripts never sample an evicted item") {
  CounterRng rng(99);
  for (int script = 0; script < 20; ++script) {
    const std::size_t capacity = 1 + rng.uniform_int(16);
    ReplayBuffer buf(capacity, 1, 1);
    double next_id = 0.0;
    for (int op = 0; op < 200; ++op) {
      buf.push(tagged(next_id++));
      const double oldest = next_id - static_cast<double>(buf.size());
      // Logical order is oldest-first.
      for (std::size_t i = 0; i < buf.size(); ++i) CHECK(buf.at(i).reward == oldest + i);
      const auto batch = buf.sample_uniform(4, rng);
      for (const auto& tr : batch) {
        CHECK(tr.reward >= oldest);
        CHECK(tr.reward < next_id);
      }
    }
  }
}
