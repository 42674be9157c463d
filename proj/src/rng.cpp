#include "ladpm/rng.hpp"

namespace ladpm {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t CounterRng::mix(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key_(mix(mix(seed + kGolden) ^ (stream * 0xD2B74407B1CE6E93ULL + 0x632BE59BD9B4E019ULL))) {}

CounterRng::result_type CounterRng::operator()() {
  ++counter_;
  return mix(key_ + counter_ * kGolden);
}

Eigen::VectorXd NormalStream::vector(Eigen::Index dim) {
  Eigen::VectorXd v(dim);
  for (Eigen::Index k = 0; k < dim; ++k) v[k] = next();
  return v;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t purpose) {
  return CounterRng::mix(seed ^ CounterRng::mix(purpose + kGolden));
}

}  // namespace ladpm
