#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace rdet {

/// Deterministic 64-bit generator (splitmix64).
///
/// The standard library's distributions and std::shuffle are
/// implementation-defined, so reproducing a model bit-for-bit across
/// platforms requires a fixed generator with fixed derivation rules.
/// Every seeded operation in the toolkit draws from this class.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Unbiased integer in [0, n). n must be >= 1.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % n;
    std::uint64_t r;
    do {
      r = next_u64();
    } while (r >= limit);
    return r % n;
  }

  /// Integer in [lo, hi], both inclusive.
  std::int64_t next_int(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(
                    next_below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  /// Real in [0, 1) with 53 random bits.
  double next_real() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Fisher-Yates shuffle.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(next_below(i));
      using std::swap;
      swap(v[i - 1], v[j]);
    }
  }

  /// k distinct integers from [0, n), in draw order. k must be <= n.
  std::vector<int> sample_without_replacement(int n, int k) {
    std::vector<int> pool(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
      std::size_t j = static_cast<std::size_t>(
          next_below(static_cast<std::uint64_t>(n - i)));
      out.push_back(pool[j]);
      pool[j] = pool[static_cast<std::size_t>(n - 1 - i)];
    }
    return out;
  }

 private:
  std::uint64_t state_;
};

/// Derives an independent child seed from a master seed and a stream index
/// (per-tree seeds, per-class shuffles). The constants are fixed and part of
/// the persistence contract: the same master seed must reproduce the same
/// streams forever.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  Rng r(master ^ (stream * 0xD1B54A32D192ED03ull + 0x8CB92BA72F3D8DD7ull));
  return r.next_u64();
}

}  // namespace rdet
