#include "ardca/trace.hpp"

#include <cmath>
#include <limits>

namespace ardca {

Tracer::Tracer(const DualModel& model, std::string solver, std::uint64_t seed,
               std::optional<Reference> reference)
    : model_(&model),
      solver_(std::move(solver)),
      seed_(seed),
      reference_(reference),
      ineq_w_(ineq_weights(model)),
      start_(Clock::now()) {}

double Tracer::elapsed_ms() const {
  return std::chrono::duration<double, std::milli>(Clock::now() - start_).count();
}

void Tracer::push(double pass, double dual, const Vector& x, double t_enter) {
  const PrimalEval pe = primal_value_and_residuals(*model_->spec, x);
  TraceRecord r;
  r.solver = solver_;
  r.seed = seed_;
  r.pass = pass;
  r.primal_obj = pe.objective;
  r.dual_obj = dual;
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  r.primal_gap = reference_ ? pe.objective - reference_->F_star : nan;
  r.dual_gap = reference_ ? dual - reference_->D_star : nan;
  r.eq_violation = pe.eq_residual.norm();
  try {
    r.ineq_violation = weighted_dual_norm(pe.ineq_residual, ineq_w_);
  } catch (const ConfigError&) {
    r.ineq_violation = kInfinity;
  }
  r.wall_ms = t_enter - excluded_ms_;
  records_.push_back(std::move(r));
  excluded_ms_ += elapsed_ms() - t_enter;
}

void Tracer::record(double pass, const Vector& u, const Vector& x) {
  const double t_enter = elapsed_ms();
  push(pass, dual_value(*model_, u), x, t_enter);
}

void Tracer::record_last_iterate(double pass, const Vector& u) {
  const double t_enter = elapsed_ms();
  const Vector su = model_->S * u;
  const Vector x = primal_from_dual(*model_, su);
  // D(u) from the already computed S u.
  double h = 0.0;
  bool finite = true;
  for (Index j = 0; j < u.size() && finite; ++j) {
    const double hj = term_value(model_->terms[static_cast<std::size_t>(j)], u[j]);
    if (is_infinite(hj)) finite = false;
    h += hj;
  }
  const double dual = finite ? reg_conj_value(model_->reg(), -su) - model_->p.dot(u) + h : kInfinity;
  push(pass, dual, x, t_enter);
}

void Tracer::mark_status(const std::string& status) {
  if (!records_.empty()) records_.back().status = status;
}

}  // namespace ardca
