#include "ardpg/rng.hpp"

#include <cmath>

namespace ardpg {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
constexpr double kTwoPi = 6.283185307179586476925286766559;
}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

CounterRng::CounterRng(std::uint64_t seed) : key_(splitmix64(seed)), counter_(0) {}

std::uint64_t CounterRng::next_u64() {
  return splitmix64(key_ ^ (counter_++ * kGolden));
}

double CounterRng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::uniform_pos() {
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double CounterRng::normal() {
  const double u1 = uniform_pos();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

Vec CounterRng::normal_vec(int n) {
  Vec out(n);
  for (int i = 0; i < n; ++i) out[i] = normal();
  return out;
}

double CounterRng::uniform_range(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

std::uint64_t CounterRng::uniform_int(std::uint64_t n) {
  if (n == 0) return 0;
  // Multiply-shift; bias is < 2^-64 * n, negligible for the sizes used here.
  const unsigned __int128 wide =
      static_cast<unsigned __int128>(next_u64()) * static_cast<unsigned __int128>(n);
  return static_cast<std::uint64_t>(wide >> 64);
}

CounterRng CounterRng::split() {
  const std::uint64_t child_seed = splitmix64(key_ ^ splitmix64(counter_ ^ 0xD6E8FEB86659FD93ull));
  ++counter_;
  CounterRng child(child_seed);
  return child;
}

}  // namespace ardpg
