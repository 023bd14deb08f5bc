#include "ardca/schedules.hpp"

#include <cmath>

namespace ardca {

SolveReport restart_run(const DualModel& model, const Vector& u0, const RestartPlan& plan,
                        const ScheduleOptions& options) {
  if (plan.outer < 1) throw ConfigError("restart: outer iteration count must be at least 1");
  if (plan.inner_k < 1) throw ConfigError("restart: inner budget K must be at least 1");

  EngineOptions eo;
  eo.mode = ScheduleMode::accelerated;
  eo.variant = plan.variant;
  eo.k0 = plan.k0;
  eo.seed = options.seed;
  eo.stream_id = options.stream_id;

  Vector u = u0;
  RngStream rng(options.seed, options.stream_id);
  SolveReport last;
  std::int64_t done = 0;
  for (std::int64_t t = 0; t < plan.outer; ++t) {
    EngineState st = init(model, u, eo);
    st.rng = rng;
    RunOptions ro;
    ro.tracer = options.tracer;
    ro.report = options.report;
    ro.iteration_offset = done;
    ro.record_initial = t == 0;
    last = run(st, model, plan.inner_k, ro);
    rng = st.rng;
    done += last.iterations;
    u = last.u_final;
    if (options.on_outer) options.on_outer(t, last);
  }
  last.iterations = done;
  if (options.tracer) last.trace = options.tracer->records();
  return last;
}

KPrime kprime_formula(std::int64_t n, double mu, double M, double eps, double D0_plus_F0) {
  if (n < 1 || !(mu > 0.0) || !(M > 0.0) || !(eps > 0.0)) {
    throw ConfigError("kprime_formula: n, mu, M and eps must be positive");
  }
  const double nd = static_cast<double>(n);
  const double arg = std::min(1.0 / eps, nd * mu / (M * M)) * D0_plus_F0;
  if (!(arg > 0.0)) return {0, true};
  const double value = std::ceil(nd * std::log(arg) - 1.0);
  return {value > 0.0 ? static_cast<std::int64_t>(value) : 0, false};
}

namespace {

double losses_lipschitz(const ProblemSpec& spec) {
  double M = 0.0;
  for (const Loss& l : spec.losses) M = std::max(M, l.lipschitz());
  return M;
}

}  // namespace

SolveReport erm_run(const DualModel& model, const Vector& u0, const ErmPlan& plan,
                    const ScheduleOptions& options) {
  if (model.p_eq != 0 || model.m != 0) {
    throw ConfigError("erm_run: the warm-start schedule needs an unconstrained problem");
  }
  if (plan.K < 1) throw ConfigError("erm_run: K must be at least 1");

  std::int64_t k_prime = 0;
  if (plan.k_prime) {
    if (*plan.k_prime < 0) throw ConfigError("erm_run: K' must be non-negative");
    k_prime = *plan.k_prime;
  } else {
    const double M = plan.M ? *plan.M : losses_lipschitz(*model.spec);
    if (!std::isfinite(M)) {
      throw ConfigError("erm_run: losses are not Lipschitz; supply an explicit M or K'");
    }
    EngineOptions probe;
    EngineState st0 = init(model, u0, probe);
    const Vector x0 = primal_from_dual(model, st0.s_z);
    const double gap0 = dual_value(model, st0.z) + primal_value_and_residuals(*model.spec, x0).objective;
    k_prime = kprime_formula(model.n, model.mu, M, plan.eps, gap0).count;
  }

  EngineOptions eo;
  eo.variant = plan.variant;
  eo.k0 = plan.k0;
  eo.seed = options.seed;
  eo.stream_id = options.stream_id;
  RngStream rng(options.seed, options.stream_id);

  Vector u = u0;
  std::int64_t done = 0;
  std::optional<Vector> warm_primal;
  if (k_prime > 0) {
    eo.mode = ScheduleMode::fixed;
    EngineState st = init(model, u, eo);
    st.rng = rng;
    RunOptions ro;
    ro.tracer = options.tracer;
    ro.report = PrimalChoice::last;
    const SolveReport phase1 = run(st, model, k_prime, ro);
    rng = st.rng;
    done = phase1.iterations;
    u = phase1.u_final;
    warm_primal = phase1.x_last;
    if (options.on_outer) options.on_outer(0, phase1);
  }

  eo.mode = ScheduleMode::accelerated;
  EngineState st = init(model, u, eo);
  st.rng = rng;
  RunOptions ro;
  ro.tracer = options.tracer;
  ro.report = options.report;
  ro.iteration_offset = done;
  ro.record_initial = k_prime == 0;
  SolveReport rep = run(st, model, plan.K, ro);
  if (options.on_outer) options.on_outer(k_prime > 0 ? 1 : 0, rep);
  rep.iterations += done;
  rep.warm_start_primal = std::move(warm_primal);
  if (options.tracer) rep.trace = options.tracer->records();
  return rep;
}

}  // namespace ardca
