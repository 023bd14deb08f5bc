#include "ardca/engine.hpp"

#include <cmath>
#include <string>

namespace ardca {

K0Policy K0Policy::checkpoint(double nu) {
  if (!(nu > 1.0)) throw ConfigError("K0 policy: nu must exceed 1");
  return {Kind::checkpoint, nu, 1};
}

K0Policy K0Policy::fixed(std::int64_t k0, double nu) {
  if (k0 < 1) throw ConfigError("K0 policy: explicit K0 must be at least 1");
  if (!(nu > 1.0)) throw ConfigError("K0 policy: nu must exceed 1");
  return {Kind::fixed, nu, k0};
}

std::int64_t K0Policy::base(Index n_hat) const {
  return static_cast<std::int64_t>(std::ceil(nu * (1.0 + 1.0 / static_cast<double>(n_hat))));
}

std::int64_t K0Policy::max_k0(std::int64_t K, Index n_hat) const {
  const double denom = nu * (1.0 + 1.0 / static_cast<double>(n_hat));
  return static_cast<std::int64_t>(std::floor(static_cast<double>(K) / denom + 1.0));
}

AveragingAccumulator::AveragingAccumulator(Index dim, std::int64_t base,
                                           std::optional<std::int64_t> explicit_k0)
    : base_(base),
      explicit_k0_(explicit_k0),
      sum_x_(Vector::Zero(dim)),
      sum_uniform_(Vector::Zero(dim)) {
  if (base < 2) throw ConfigError("averaging: checkpoint base must be at least 2");
}

void AveragingAccumulator::add(std::int64_t k, const Vector& x, double theta) {
  if (k != next_k_) throw ConfigError("averaging: indices must be added in order");
  const bool geometric = k == next_checkpoint_;
  const bool explicit_hit = explicit_k0_ && k == *explicit_k0_;
  if (geometric || explicit_hit) checkpoints_.push_back({k, sum_x_, sum_inv_theta_});
  if (geometric) next_checkpoint_ = (k == 1) ? base_ : next_checkpoint_ * base_;
  sum_x_ += x / theta;
  sum_inv_theta_ += 1.0 / theta;
  sum_uniform_ += x;
  ++next_k_;
}

std::int64_t AveragingAccumulator::select_k0(std::int64_t K) const {
  if (K <= 0) return 0;
  if (explicit_k0_ && K >= *explicit_k0_) return *explicit_k0_;
  // Largest p with c^{p+1} <= K.
  std::int64_t k0 = 1;
  while (k0 * base_ * base_ <= K) k0 *= base_;
  return k0;
}

const AveragingAccumulator::Checkpoint* AveragingAccumulator::find(std::int64_t k) const {
  for (const auto& c : checkpoints_) {
    if (c.k == k) return &c;
  }
  return nullptr;
}

Vector AveragingAccumulator::average(std::int64_t K) const {
  if (K != last_index()) throw ConfigError("averaging: K must be the last added index");
  const std::int64_t k0 = select_k0(K);
  if (k0 == 0) return sum_x_ / sum_inv_theta_;
  const Checkpoint* c = find(k0);
  if (c == nullptr) throw ConfigError("averaging: missing checkpoint for K0=" + std::to_string(k0));
  return (sum_x_ - c->sum_x) / (sum_inv_theta_ - c->sum_inv_theta);
}

Vector AveragingAccumulator::uniform_average() const {
  if (next_k_ == 0) return sum_uniform_;
  return sum_uniform_ / static_cast<double>(next_k_);
}

Vector EngineState::current_v() const {
  const double th = schedule.theta();
  return th * th * u_hat + z;
}

Vector EngineState::current_u() const {
  if (k == 0) return z;
  return theta_last * theta_last * u_hat + z;
}

EngineState init(const DualModel& model, const Vector& u0, const EngineOptions& options) {
  const Index n_hat = model.n_hat();
  if (u0.size() != n_hat) throw ConfigError("init: u0 must have length n_hat");
  if (!u0.allFinite()) throw ConfigError("init: u0 has non-finite entries");

  EngineState st;
  st.z = u0;
  for (Index j = 0; j < n_hat; ++j) {
    const SeparableTerm& term = model.terms[static_cast<std::size_t>(j)];
    if (term.kind == SeparableTerm::Kind::nonneg_indicator) {
      if (u0[j] < 0.0) {
        throw ConfigError("init: inequality multiplier " + std::to_string(j) + " is negative");
      }
    } else {
      st.z[j] = term_domain(term).clamp(u0[j]);
    }
  }
  st.u_hat = Vector::Zero(n_hat);
  st.s_z = st.z.isZero(0.0) ? Vector(Vector::Zero(model.dim())) : Vector(model.S * st.z);
  st.s_u_hat = Vector::Zero(model.dim());
  st.schedule = ThetaSchedule(n_hat, options.mode);
  st.theta_last = st.schedule.theta();
  st.k = 0;
  const std::optional<std::int64_t> explicit_k0 =
      options.k0.kind == K0Policy::Kind::fixed ? std::optional<std::int64_t>(options.k0.k0)
                                               : std::nullopt;
  st.avg = AveragingAccumulator(model.dim(), options.k0.base(n_hat), explicit_k0);
  st.rng = RngStream(options.seed, options.stream_id);
  st.variant = options.variant;
  st.k0 = options.k0;
  st.x_last = Vector::Zero(model.dim());
  return st;
}

Index step(EngineState& st, const DualModel& model) {
  const double theta = st.schedule.theta();
  const double n_hat = static_cast<double>(model.n_hat());

  Vector s_v = st.s_z;
  if (st.schedule.mode() == ScheduleMode::accelerated) s_v += (theta * theta) * st.s_u_hat;
  Vector x = primal_from_dual(model, s_v);
  if (!x.allFinite()) {
    throw NumericError("non-finite primal iterate at iteration " + std::to_string(st.k));
  }
  st.avg.add(st.k, x, theta);

  const Index i = sample_coordinate(st.rng, model.n_hat());
  const double g = coord_grad(model, i, x);
  const SeparableTerm& term = model.terms[static_cast<std::size_t>(i)];
  const double Li = model.L[i];
  const double z_old = st.z[i];
  double z_new;
  if (Li > 0.0) {
    const double coef = st.variant == StepVariant::conservative ? 2.0 : 1.0;
    const double tau = 1.0 / (coef * n_hat * theta * Li);
    z_new = term_prox(term, z_old - tau * g, tau);
  } else {
    z_new = term_linear_argmin(term, g, z_old);
  }
  if (!std::isfinite(z_new)) {
    throw NumericError("non-finite dual coordinate at iteration " + std::to_string(st.k));
  }

  const double dz = z_new - z_old;
  if (dz != 0.0) {
    st.s_z += model.S.col(i) * dz;
    // Fixed mode has n_hat theta = 1, so u_hat never moves.
    const double du = st.schedule.mode() == ScheduleMode::accelerated
                          ? -(1.0 - n_hat * theta) / (theta * theta) * dz
                          : 0.0;
    if (du != 0.0) {
      st.u_hat[i] += du;
      st.s_u_hat += model.S.col(i) * du;
    }
    st.z[i] = z_new;
  }
  st.x_last = std::move(x);
  st.theta_last = theta;
  st.schedule.advance();
  ++st.k;
  return i;
}

SolveReport run(EngineState& st, const DualModel& model, std::int64_t K, const RunOptions& opt) {
  if (K < 0) throw ConfigError("run: K must be non-negative");
  const Index n_hat = model.n_hat();
  if (st.k0.kind == K0Policy::Kind::fixed && st.k0.k0 > st.k0.max_k0(K, n_hat)) {
    throw ConfigError("run: explicit K0=" + std::to_string(st.k0.k0) +
                      " exceeds the admissible bound " + std::to_string(st.k0.max_k0(K, n_hat)));
  }

  const auto measure = [&](std::int64_t global_iter) {
    const double pass = static_cast<double>(global_iter) / static_cast<double>(n_hat);
    const Vector u = st.current_u();
    if (opt.report == PrimalChoice::last || st.k == 0) {
      opt.tracer->record_last_iterate(pass, u);
    } else {
      opt.tracer->record(pass, u, st.avg.average(st.k - 1));
    }
  };

  if (opt.tracer && opt.record_initial) measure(opt.iteration_offset + st.k);

  SolveReport rep;
  const std::int64_t start = st.k;
  try {
    for (std::int64_t s = 0; s <= K; ++s) {
      step(st, model);
      const std::int64_t global_iter = opt.iteration_offset + st.k;
      if (opt.tracer && global_iter % n_hat == 0) measure(global_iter);
    }
  } catch (const NumericError&) {
    if (opt.tracer) opt.tracer->mark_status("abort");
    throw;
  }

  rep.iterations = st.k - start;
  rep.u_final = st.current_u();
  rep.x_last = st.x_last;
  rep.K0_used = st.avg.select_k0(st.k - 1);
  rep.x_avg = st.avg.average(st.k - 1);
  rep.x_uniform = st.avg.uniform_average();
  if (opt.tracer) rep.trace = opt.tracer->records();
  return rep;
}

}  // namespace ardca
