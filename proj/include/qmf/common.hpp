#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace qmf {

using BitVector = std::vector<std::uint8_t>;
using Rng = std::mt19937_64;

/// Thrown when inputs violate a documented precondition (sizes, ranges).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when an operation is asked for a dimension it has no closed form for.
class UnsupportedDimension : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// SplitMix64 finalizer. Used to derive independent stream seeds from a
/// master seed and a counter tuple, so parallel trials stay reproducible.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                    std::uint64_t b = 0,
                                    std::uint64_t c = 0) noexcept {
  return splitmix64(splitmix64(splitmix64(master ^ splitmix64(a)) ^ b) ^ c);
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double x) { return 10.0 * std::log10(x); }

inline std::size_t hamming_distance(const BitVector& a, const BitVector& b) {
  if (a.size() != b.size()) throw InvalidArgument("hamming_distance: length mismatch");
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] != b[i]);
  return d;
}

inline BitVector random_bits(std::size_t n, Rng& rng) {
  BitVector out(n);
  std::uniform_int_distribution<int> coin(0, 1);
  for (auto& b : out) b = static_cast<std::uint8_t>(coin(rng));
  return out;
}

}  // namespace qmf
