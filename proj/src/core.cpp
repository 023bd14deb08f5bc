#include "ardca/core.hpp"

#include <cmath>

namespace ardca {

double theta_next(double theta) {
  if (!(theta > 0.0 && theta <= 1.0)) {
    throw ConfigError("theta_next: theta must lie in (0, 1], got " + std::to_string(theta));
  }
  const double t2 = theta * theta;
  return (std::sqrt(t2 * t2 + 4.0 * t2) - t2) / 2.0;
}

ThetaSchedule::ThetaSchedule(Index n_hat, ScheduleMode mode) : n_hat_(n_hat), mode_(mode) {
  if (n_hat < 1) throw ConfigError("ThetaSchedule: n_hat must be positive");
  theta_ = 1.0 / static_cast<double>(n_hat);
}

void ThetaSchedule::advance() {
  if (mode_ == ScheduleMode::accelerated) theta_ = theta_next(theta_);
  ++k_;
}

double ThetaSchedule::theta_minus_one(Index n_hat) {
  if (n_hat < 2) throw ConfigError("theta_{-1} requires n_hat >= 2");
  const double n = static_cast<double>(n_hat);
  return 1.0 / std::sqrt(n * n - n);
}

double weighted_norm(const Vector& x, const Vector& weights) {
  if (x.size() != weights.size()) throw ConfigError("weighted_norm: length mismatch");
  return std::sqrt((weights.array() * x.array().square()).sum());
}

double weighted_dual_norm(const Vector& x, const Vector& weights) {
  if (x.size() != weights.size()) throw ConfigError("weighted_dual_norm: length mismatch");
  double acc = 0.0;
  for (Index i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) continue;
    if (weights[i] <= 0.0) {
      throw ConfigError("weighted_dual_norm: nonzero entry " + std::to_string(i) +
                        " at a zero weight");
    }
    acc += x[i] * x[i] / weights[i];
  }
  return std::sqrt(acc);
}

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  std::uint64_t x = (seed ^ (stream_id * 0xD1342543DE82EF95ULL)) + stream_id;
  for (auto& w : s_) w = splitmix64(x);
}

std::uint64_t RngStream::next_u64() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double RngStream::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double RngStream::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

std::uint64_t RngStream::below(std::uint64_t bound) {
  // Lemire's nearly-divisionless method.
  unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>(next_u64()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double RngStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double scale = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * scale;
  has_spare_ = true;
  return u * scale;
}

Index sample_coordinate(RngStream& rng, Index n_hat) {
  if (n_hat < 1) throw ConfigError("sample_coordinate: n_hat must be positive");
  return static_cast<Index>(rng.below(static_cast<std::uint64_t>(n_hat)));
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace ardca
