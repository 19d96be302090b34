#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace asc {

enum class Status {
  ok = 0,
  invalid_argument,
  dimension_mismatch,
  io_error,
  parse_error,
  numeric_error,
};

const char* status_name(Status s);

/// Library error: a status code plus the pipeline stage that raised it.
class Error : public std::runtime_error {
 public:
  Error(Status status, std::string message, std::string stage = {})
      : std::runtime_error(std::move(message)),
        status_(status),
        stage_(std::move(stage)) {}

  Status status() const { return status_; }
  const std::string& stage() const { return stage_; }
  void set_stage(std::string stage) { stage_ = std::move(stage); }

 private:
  Status status_;
  std::string stage_;
};

/// Collects non-fatal warnings raised along a run. Degenerate inputs are
/// handled with documented fallbacks instead of hard failures; every fallback
/// leaves a note here so reports can surface what happened.
class Diagnostics {
 public:
  void note(std::string message) { notes_.push_back(std::move(message)); }
  const std::vector<std::string>& messages() const { return notes_; }
  bool empty() const { return notes_.empty(); }
  std::size_t size() const { return notes_.size(); }

 private:
  std::vector<std::string> notes_;
};

inline void note(Diagnostics* diag, std::string message) {
  if (diag) diag->note(std::move(message));
}

/// Deterministic random source. All randomized code in the library draws
/// through this wrapper (never through std:: distributions, whose output is
/// implementation defined), so a fixed seed reproduces bit-for-bit.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {
    // splitmix64 warm-up decorrelates small consecutive seeds
    next_u64();
  }

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform index in [0, n). n must be positive.
  std::size_t next_index(std::size_t n) {
    std::size_t i = static_cast<std::size_t>(next_double() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }

  /// Standard normal via Box-Muller.
  double next_normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1;
    do {
      u1 = next_double();
    } while (u1 <= 0.0);
    double u2 = next_double();
    double mag = std::sqrt(-2.0 * std::log(u1));
    constexpr double two_pi = 6.283185307179586476925286766559;
    spare_ = mag * std::sin(two_pi * u2);
    has_spare_ = true;
    return mag * std::cos(two_pi * u2);
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = next_index(i);
      std::swap(v[i - 1], v[j]);
    }
  }

  /// Derives an independent deterministic stream from (seed, salt).
  static Rng stream(std::uint64_t seed, std::uint64_t salt) {
    return Rng(seed ^ (salt * 0xD1342543DE82EF95ULL + 0x2545F4914F6CDD1DULL));
  }

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

double squared_distance(const std::vector<double>& a, const std::vector<double>& b);
double squared_distance(const double* a, const double* b, std::size_t n);

}  // namespace asc
