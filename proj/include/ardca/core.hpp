#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace ardca {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Invalid input or an inconsistent problem configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A solve produced NaN/Inf or an iterative routine failed to converge.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Momentum sequence
// ---------------------------------------------------------------------------

enum class ScheduleMode { accelerated, fixed };

/// theta' = (sqrt(theta^4 + 4 theta^2) - theta^2) / 2, the positive root of
/// (1 - x) / x^2 = 1 / theta^2.
double theta_next(double theta);

/// Momentum parameter of the accelerated coordinate method.
///
/// Accelerated mode starts at 1/n_hat and follows theta_next; fixed mode keeps
/// 1/n_hat forever (plain randomized coordinate ascent).
class ThetaSchedule {
 public:
  ThetaSchedule(Index n_hat, ScheduleMode mode);

  double theta() const { return theta_; }
  std::int64_t k() const { return k_; }
  Index n_hat() const { return n_hat_; }
  ScheduleMode mode() const { return mode_; }

  void advance();

  /// Value preceding theta_0 in the accelerated recurrence, 1/sqrt(n^2 - n).
  /// Only defined for n_hat >= 2.
  static double theta_minus_one(Index n_hat);

 private:
  double theta_;
  std::int64_t k_ = 0;
  Index n_hat_;
  ScheduleMode mode_;
};

// ---------------------------------------------------------------------------
// Weighted norms
// ---------------------------------------------------------------------------

/// sqrt(sum_i L_i x_i^2).
double weighted_norm(const Vector& x, const Vector& weights);

/// sqrt(sum_i x_i^2 / L_i). Throws ConfigError when x_i != 0 at a zero weight.
double weighted_dual_norm(const Vector& x, const Vector& weights);

// ---------------------------------------------------------------------------
// Random numbers
// ---------------------------------------------------------------------------

/// xoshiro256** generator keyed by (seed, stream_id).
///
/// State initialization: a splitmix64 sequence started at
/// seed ^ (stream_id * 0xD1342543DE82EF95) + stream_id produces the four state
/// words. The output function and state update are the reference xoshiro256**
/// ones, so sequences are identical on every platform.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi);
  /// Unbiased integer in [0, bound) via multiply-and-reject.
  std::uint64_t below(std::uint64_t bound);
  /// Standard normal via the Marsaglia polar method (caches the second value).
  double normal();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  std::uint64_t s_[4];
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Uniform coordinate in {0, ..., n_hat - 1}.
Index sample_coordinate(RngStream& rng, Index n_hat);

/// 64-bit FNV-1a, used to derive per-solver stream ids.
std::uint64_t fnv1a64(std::string_view text);

}  // namespace ardca
