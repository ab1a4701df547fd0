#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

namespace vreg {

/// Neighbor-to-neighbor message channel with independent per-message drops.
/// Every delivery is a Bernoulli(1 - p) draw from a seeded generator, so a
/// fixed (p, seed) pair reproduces the exact delivery sequence. Payloads
/// pass through unmodified; loss delays, it never corrupts.
class LossyChannel {
 public:
  LossyChannel() : LossyChannel(0.0, 0) {}
  LossyChannel(double loss_probability, uint64_t seed, bool keep_log = false)
      : p_(loss_probability), seed_(seed), rng_(seed), keep_log_(keep_log) {
    if (!(p_ >= 0.0) || !(p_ < 1.0)) {
      throw std::invalid_argument("loss probability must lie in [0, 1)");
    }
  }

  /// One delivery trial.
  bool deliver() {
    // Top 53 bits -> uniform double in [0, 1); avoids the distribution
    // objects whose sequences differ across standard libraries.
    const double u =
        static_cast<double>(rng_() >> 11) * 0x1.0p-53;
    const bool delivered = u >= p_;
    if (keep_log_) {
      log_.push_back(delivered);
    }
    return delivered;
  }

  /// Delivery trial carrying a payload.
  template <class T>
  std::optional<T> deliver(const T& payload) {
    return deliver() ? std::optional<T>(payload) : std::nullopt;
  }

  double loss_probability() const { return p_; }
  uint64_t seed() const { return seed_; }
  const std::vector<bool>& log() const { return log_; }

 private:
  double p_;
  uint64_t seed_;
  std::mt19937_64 rng_;
  bool keep_log_;
  std::vector<bool> log_;
};

}  // namespace vreg
