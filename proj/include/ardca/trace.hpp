#pragma once

#include "ardca/dual_model.hpp"

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ardca {

/// Reference optimum of a problem. By strong duality F_star = -D_star.
struct Reference {
  double F_star = 0.0;
  double D_star = 0.0;
};

/// One measurement along a solve. pass = iterations / n_hat for coordinate
/// methods and the iteration count for full-gradient methods.
struct TraceRecord {
  std::string solver;
  std::uint64_t seed = 0;
  double pass = 0.0;
  double primal_obj = 0.0;
  double dual_obj = 0.0;
  double primal_gap = 0.0;  // primal_obj - F_star, NaN without a reference
  double dual_gap = 0.0;    // dual_obj - D_star, NaN without a reference
  double eq_violation = 0.0;    // ||B x + b||_2
  double ineq_violation = 0.0;  // ||max(0, J x + q)||_L^*
  double wall_ms = 0.0;
  std::string status = "ok";
};

/// Builds TraceRecords for one solve. Time spent inside record() is excluded
/// from the reported wall clock.
class Tracer {
 public:
  Tracer(const DualModel& model, std::string solver, std::uint64_t seed,
         std::optional<Reference> reference = std::nullopt);

  /// Evaluates the dual at u (needs S u, one pass over S) and the primal at x.
  void record(double pass, const Vector& u, const Vector& x);
  /// Same, with x = x^*(u).
  void record_last_iterate(double pass, const Vector& u);

  void mark_status(const std::string& status);

  const std::vector<TraceRecord>& records() const { return records_; }
  std::vector<TraceRecord> take() { return std::move(records_); }

 private:
  using Clock = std::chrono::steady_clock;

  void push(double pass, double dual, const Vector& x, double t_enter);
  double elapsed_ms() const;

  const DualModel* model_;
  std::string solver_;
  std::uint64_t seed_;
  std::optional<Reference> reference_;
  Vector ineq_w_;
  Clock::time_point start_;
  double excluded_ms_ = 0.0;
  std::vector<TraceRecord> records_;
};

}  // namespace ardca
