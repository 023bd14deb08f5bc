#include "ardca/baselines.hpp"

#include <cmath>
#include <string>

namespace ardca {

SolveReport rdca_run(const DualModel& model, const Vector& u0, std::int64_t K,
                     const BaselineOptions& options) {
  EngineOptions eo;
  eo.mode = ScheduleMode::fixed;
  eo.seed = options.seed;
  eo.stream_id = options.stream_id;
  EngineState st = init(model, u0, eo);
  RunOptions ro;
  ro.tracer = options.tracer;
  ro.report = PrimalChoice::last;
  return run(st, model, K, ro);
}

Vector prox_all(const DualModel& model, const Vector& v, double tau) {
  Vector out(v.size());
  for (Index j = 0; j < v.size(); ++j) {
    out[j] = term_prox(model.terms[static_cast<std::size_t>(j)], v[j], tau);
  }
  return out;
}

namespace {

Vector project_start(const DualModel& model, const Vector& u0) {
  // Same admissibility rules as the coordinate engine.
  return init(model, u0, EngineOptions{}).z;
}

void check_finite(const Vector& v, std::int64_t k) {
  if (!v.allFinite()) throw NumericError("non-finite iterate at iteration " + std::to_string(k));
}

}  // namespace

SolveReport dga_run(const DualModel& model, const Vector& u0, std::int64_t K,
                    const BaselineOptions& options) {
  if (K < 1) throw ConfigError("dga: K must be at least 1");
  const double L = global_L(model);
  if (!(L > 0.0)) throw ConfigError("dga: the dual has no smooth part (S = 0)");
  const double step = 1.0 / L;

  Vector u = project_start(model, u0);
  Vector sum_x = Vector::Zero(model.dim());
  Vector x_last = Vector::Zero(model.dim());
  Tracer* tr = options.tracer;
  if (tr) tr->record_last_iterate(0.0, u);
  try {
    for (std::int64_t k = 0; k < K; ++k) {
      const Vector x = primal_from_dual(model, model.S * u);
      check_finite(x, k);
      sum_x += x;
      const Vector g = -(model.S.transpose() * x) - model.p;
      u = prox_all(model, u - step * g, step);
      check_finite(u, k);
      x_last = x;
      if (tr) tr->record(static_cast<double>(k + 1), u, sum_x / static_cast<double>(k + 1));
    }
  } catch (const NumericError&) {
    if (tr) tr->mark_status("abort");
    throw;
  }

  SolveReport rep;
  rep.u_final = u;
  rep.x_avg = sum_x / static_cast<double>(K);
  rep.x_uniform = rep.x_avg;
  rep.x_last = x_last;
  rep.iterations = K;
  if (tr) rep.trace = tr->records();
  return rep;
}

SolveReport adfga_run(const DualModel& model, const Vector& u0, std::int64_t K, K0Policy k0,
                      const BaselineOptions& options) {
  if (K < 1) throw ConfigError("adfga: K must be at least 1");
  const double L = global_L(model);
  if (!(L > 0.0)) throw ConfigError("adfga: the dual has no smooth part (S = 0)");
  const std::int64_t last = K - 1;
  if (k0.kind == K0Policy::Kind::fixed && k0.k0 > k0.max_k0(last, 1)) {
    throw ConfigError("adfga: explicit K0 exceeds the admissible bound");
  }
  const std::optional<std::int64_t> explicit_k0 =
      k0.kind == K0Policy::Kind::fixed ? std::optional<std::int64_t>(k0.k0) : std::nullopt;
  AveragingAccumulator avg(model.dim(), k0.base(1), explicit_k0);

  Vector u = project_start(model, u0);
  Vector z = u;
  double theta = 1.0;
  Vector x_last = Vector::Zero(model.dim());
  Tracer* tr = options.tracer;
  if (tr) tr->record_last_iterate(0.0, u);
  try {
    for (std::int64_t k = 0; k < K; ++k) {
      const Vector v = (1.0 - theta) * u + theta * z;
      const Vector x = primal_from_dual(model, model.S * v);
      check_finite(x, k);
      avg.add(k, x, theta);
      const Vector g = -(model.S.transpose() * x) - model.p;
      const double tau = 1.0 / (theta * L);
      z = prox_all(model, z - tau * g, tau);
      u = (1.0 - theta) * u + theta * z;
      check_finite(u, k);
      x_last = x;
      theta = theta_next(theta);
      if (tr) tr->record(static_cast<double>(k + 1), u, avg.average(k));
    }
  } catch (const NumericError&) {
    if (tr) tr->mark_status("abort");
    throw;
  }

  SolveReport rep;
  rep.u_final = u;
  rep.x_avg = avg.average(last);
  rep.K0_used = avg.select_k0(last);
  rep.x_uniform = avg.uniform_average();
  rep.x_last = x_last;
  rep.iterations = K;
  if (tr) rep.trace = tr->records();
  return rep;
}

}  // namespace ardca
