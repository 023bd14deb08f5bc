#pragma once

#include "ardca/engine.hpp"

#include <functional>
#include <optional>

namespace ardca {

/// N sequential accelerated runs of K + 1 steps, each started from the
/// previous run's dual output. No condition number is needed; K >= n_hat is
/// the useful range (sweeps over {2, 10, 40, 80} x n_hat work well).
struct RestartPlan {
  std::int64_t outer = 1;    // N
  std::int64_t inner_k = 1;  // K
  K0Policy k0 = K0Policy::checkpoint();
  StepVariant variant = StepVariant::conservative;
};

/// Two-phase schedule for unconstrained ERM: K' fixed-theta steps to reach a
/// warm start, then one accelerated run.
struct ErmPlan {
  /// Warm-start length. Unset means: computed by kprime_formula from eps, M.
  std::optional<std::int64_t> k_prime;
  std::int64_t K = 1;
  K0Policy k0 = K0Policy::checkpoint();
  StepVariant variant = StepVariant::conservative;
  double eps = 1e-3;
  /// Lipschitz constant of the losses; required when a loss is not Lipschitz
  /// (squared) and k_prime is unset.
  std::optional<double> M;
};

struct ScheduleOptions {
  std::uint64_t seed = 0;
  std::uint64_t stream_id = 0;
  Tracer* tracer = nullptr;
  PrimalChoice report = PrimalChoice::averaged;
  /// Called after every outer run with its index and report.
  std::function<void(std::int64_t, const SolveReport&)> on_outer;
};

SolveReport restart_run(const DualModel& model, const Vector& u0, const RestartPlan& plan,
                        const ScheduleOptions& options = {});

SolveReport erm_run(const DualModel& model, const Vector& u0, const ErmPlan& plan,
                    const ScheduleOptions& options = {});

struct KPrime {
  std::int64_t count = 0;
  bool log_arg_nonpositive = false;
};

/// ceil(n log(min{1/eps, n mu / M^2} (D(u0) + F(x^*(u0)))) - 1), clamped at 0.
KPrime kprime_formula(std::int64_t n, double mu, double M, double eps, double D0_plus_F0);

}  // namespace ardca
