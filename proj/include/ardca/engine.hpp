#pragma once

#include "ardca/core.hpp"
#include "ardca/dual_model.hpp"
#include "ardca/trace.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace ardca {

/// Coordinate prox step: `conservative` uses tau = 1/(2 n_hat theta L_i), `standard`
/// the larger tau = 1/(n_hat theta L_i) of plain accelerated coordinate descent.
enum class StepVariant { conservative, standard };

/// Which primal point a trace reports.
enum class PrimalChoice { averaged, last };

/// Start index of the primal average.
struct K0Policy {
  enum class Kind { checkpoint, fixed };

  Kind kind = Kind::checkpoint;
  double nu = 1.1;
  std::int64_t k0 = 1;

  static K0Policy checkpoint(double nu = 1.1);
  static K0Policy fixed(std::int64_t k0, double nu = 1.1);

  /// ceil(nu (1 + 1/n_hat)), the geometric base of the checkpoint indices.
  std::int64_t base(Index n_hat) const;
  /// floor(K / (nu (1 + 1/n_hat)) + 1), the largest admissible K0.
  std::int64_t max_k0(std::int64_t K, Index n_hat) const;
};

/// Running sums for the 1/theta-weighted primal average.
///
/// Snapshots of the prefix sums are kept at k = 1, c, c^2, ... (and at an
/// explicit K0 when given). A snapshot at index k holds the sums over all
/// indices strictly below k, so average(K) covers [K0, K] inclusive.
class AveragingAccumulator {
 public:
  AveragingAccumulator() = default;
  AveragingAccumulator(Index dim, std::int64_t base, std::optional<std::int64_t> explicit_k0);

  /// Adds x/theta_k for index k; indices must arrive as 0, 1, 2, ...
  void add(std::int64_t k, const Vector& x, double theta);

  /// K0 = c^p with c^{p+1} <= K < c^{p+2}, or 1 when K < c^2, or the explicit
  /// K0 when K >= K0. Returns 0 when K = 0.
  std::int64_t select_k0(std::int64_t K) const;

  /// Weighted average over [select_k0(K), K]. K must be the last added index.
  Vector average(std::int64_t K) const;
  /// Plain mean of every added x.
  Vector uniform_average() const;

  struct Checkpoint {
    std::int64_t k;
    Vector sum_x;
    double sum_inv_theta;
  };
  const std::vector<Checkpoint>& checkpoints() const { return checkpoints_; }
  const Vector& sum_x() const { return sum_x_; }
  double sum_inv_theta() const { return sum_inv_theta_; }
  std::int64_t last_index() const { return next_k_ - 1; }

 private:
  const Checkpoint* find(std::int64_t k) const;

  std::int64_t base_ = 2;
  std::optional<std::int64_t> explicit_k0_;
  std::int64_t next_checkpoint_ = 1;
  std::int64_t next_k_ = 0;
  Vector sum_x_;
  double sum_inv_theta_ = 0.0;
  Vector sum_uniform_;
  std::vector<Checkpoint> checkpoints_;
};

struct EngineOptions {
  ScheduleMode mode = ScheduleMode::accelerated;
  StepVariant variant = StepVariant::conservative;
  K0Policy k0 = K0Policy::checkpoint();
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
};

/// Iterate bundle of the change-of-variables accelerated coordinate method.
/// Invariants: s_z = S z, s_u_hat = S u_hat, z in the dual domain.
struct EngineState {
  Vector z;
  Vector u_hat;
  Vector s_z;
  Vector s_u_hat;
  ThetaSchedule schedule{1, ScheduleMode::fixed};
  double theta_last = 1.0;  // theta used by the most recent step
  std::int64_t k = 0;       // completed steps
  AveragingAccumulator avg;
  RngStream rng{0, 0};
  StepVariant variant = StepVariant::conservative;
  K0Policy k0;
  Vector x_last;            // x^*(v^k) of the most recent step

  /// v = theta^2 u_hat + z for the current theta.
  Vector current_v() const;
  /// u^{k} = theta_{k-1}^2 u_hat + z, the dual point after the last step.
  Vector current_u() const;
};

/// z = u0 (loss coordinates clamped into their conjugate domain), u_hat = 0,
/// s_z = S u0, theta = 1/n_hat. Throws ConfigError if an inequality multiplier
/// is negative or u0 has the wrong length / non-finite entries.
EngineState init(const DualModel& model, const Vector& u0, const EngineOptions& options);

/// One iteration. Returns the sampled coordinate.
Index step(EngineState& state, const DualModel& model);

struct RunOptions {
  Tracer* tracer = nullptr;
  PrimalChoice report = PrimalChoice::averaged;
  /// Iterations already performed by earlier runs (restarts / warm starts);
  /// measurements fire whenever the global count is a multiple of n_hat.
  std::int64_t iteration_offset = 0;
  bool record_initial = true;
};

struct SolveReport {
  Vector u_final;
  Vector x_avg;
  Vector x_last;
  Vector x_uniform;
  std::int64_t K0_used = 0;
  std::int64_t iterations = 0;
  std::vector<TraceRecord> trace;
  /// Warm-start schedules: x^*(v^{K'}) at the end of the fixed-theta phase.
  std::optional<Vector> warm_start_primal;
  std::string status = "ok";
};

/// Runs steps k = 0..K (K + 1 steps) and forms the outputs. Throws ConfigError
/// if an explicit K0 exceeds floor(K / (nu (1 + 1/n_hat)) + 1).
SolveReport run(EngineState& state, const DualModel& model, std::int64_t K,
                const RunOptions& options = {});

}  // namespace ardca
