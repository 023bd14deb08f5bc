#include "ardca/dual_model.hpp"

#include <cmath>
#include <string>

namespace ardca {

void ProblemSpec::validate() const {
  const Index t = dim();
  if (t < 1) throw ConfigError("problem: primal dimension must be positive");
  if (static_cast<Index>(losses.size()) != A.cols()) {
    throw ConfigError("problem: need one loss per column of A (" + std::to_string(A.cols()) +
                      " columns, " + std::to_string(losses.size()) + " losses)");
  }
  if (B.rows() > 0 && B.cols() != t) throw ConfigError("problem: B must have t columns");
  if (J.rows() > 0 && J.cols() != t) throw ConfigError("problem: J must have t columns");
  if (b.size() != B.rows()) throw ConfigError("problem: b must have one entry per row of B");
  if (q.size() != J.rows()) throw ConfigError("problem: q must have one entry per row of J");
  if (n_hat() < 1) throw ConfigError("problem: dual dimension n + p + m must be positive");
  if (!(reg.mu > 0.0)) throw ConfigError("problem: regularizer mu must be positive");
  if (reg.kind == Regularizer::Kind::l1_plus_l2 && !(reg.sigma >= 0.0)) {
    throw ConfigError("problem: l1 weight must be non-negative");
  }
}

DualModel build_dual(ProblemSpec spec_in) {
  spec_in.validate();
  auto spec = std::make_shared<const ProblemSpec>(std::move(spec_in));

  DualModel model;
  model.n = spec->num_samples();
  model.p_eq = spec->num_eq();
  model.m = spec->num_ineq();
  model.mu = spec->reg.mu;
  const Index t = spec->dim();
  const Index n_hat = spec->n_hat();
  const double n = static_cast<double>(model.n);

  model.S.resize(t, n_hat);
  model.p = Vector::Zero(n_hat);
  model.L.resize(n_hat);
  model.terms.reserve(static_cast<std::size_t>(n_hat));

  for (Index j = 0; j < model.n; ++j) {
    model.S.col(j) = spec->A.col(j) / n;
    model.terms.push_back(SeparableTerm::conjugate_of(spec->losses[static_cast<std::size_t>(j)], 1.0 / n));
  }
  for (Index r = 0; r < model.p_eq; ++r) {
    const Index j = model.n + r;
    model.S.col(j) = spec->B.row(r).transpose();
    model.p[j] = spec->b[r];
    model.terms.push_back(SeparableTerm::zero());
  }
  for (Index r = 0; r < model.m; ++r) {
    const Index j = model.n + model.p_eq + r;
    model.S.col(j) = spec->J.row(r).transpose();
    model.p[j] = spec->q[r];
    model.terms.push_back(SeparableTerm::nonneg());
  }
  // ||S_j||^2 / mu reproduces ||A_j||^2/(n^2 mu), ||B_r||^2/mu and ||J_r||^2/mu.
  for (Index j = 0; j < n_hat; ++j) model.L[j] = model.S.col(j).squaredNorm() / model.mu;

  for (Index j = 0; j < n_hat; ++j) {
    if (model.L[j] > 0.0) continue;
    const SeparableTerm& term = model.terms[static_cast<std::size_t>(j)];
    const bool bounded = term_domain(term).bounded();
    if (bounded) continue;
    if (term.kind == SeparableTerm::Kind::nonneg_indicator && model.p[j] <= 0.0) {
      // Constant constraint q_j <= 0: the multiplier stays at 0.
      continue;
    }
    throw ConfigError("dual coordinate " + std::to_string(j) +
                      " has a zero column and an unbounded separable term; the coordinate "
                      "step is undefined");
  }
  model.spec = std::move(spec);
  return model;
}

Vector primal_from_dual(const DualModel& model, const Vector& s_v) {
  return reg_conj_grad(model.reg(), -s_v);
}

double coord_grad(const DualModel& model, Index i, const Vector& x_star) {
  return -model.S.col(i).dot(x_star) - model.p[i];
}

Vector full_grad(const DualModel& model, const Vector& u) {
  const Vector x = primal_from_dual(model, model.S * u);
  return -(model.S.transpose() * x) - model.p;
}

bool in_dual_domain(const DualModel& model, const Vector& u) {
  for (Index j = 0; j < u.size(); ++j) {
    if (!term_domain(model.terms[static_cast<std::size_t>(j)]).contains(u[j])) return false;
  }
  return true;
}

double dual_value(const DualModel& model, const Vector& u) {
  double h = 0.0;
  for (Index j = 0; j < u.size(); ++j) {
    const double hj = term_value(model.terms[static_cast<std::size_t>(j)], u[j]);
    if (is_infinite(hj)) return kInfinity;
    h += hj;
  }
  const Vector su = model.S * u;
  return reg_conj_value(model.reg(), -su) - model.p.dot(u) + h;
}

double spectral_norm(const Matrix& M) {
  constexpr int kMaxIter = 1000;
  constexpr double kTol = 1e-10;
  if (M.size() == 0) return 0.0;

  auto run_from = [&M](Vector v, double& sigma_sq) -> bool {
    double prev = 0.0;
    for (int it = 0; it < kMaxIter; ++it) {
      const double vn = v.norm();
      if (vn == 0.0) {
        sigma_sq = 0.0;
        return true;
      }
      v /= vn;
      const Vector w = M * v;
      const double est = w.squaredNorm();  // Rayleigh quotient of M^T M
      if (it > 0 && std::abs(est - prev) <= kTol * std::max(est, 1e-300)) {
        sigma_sq = est;
        return true;
      }
      prev = est;
      v = M.transpose() * w;
    }
    sigma_sq = prev;
    return false;
  };

  double sigma_sq = 0.0;
  bool ok = run_from(Vector::Ones(M.cols()), sigma_sq);
  if (ok && sigma_sq == 0.0 && !M.isZero(0.0)) {
    // All-ones start lies in the null space; retry from a fixed random vector.
    RngStream rng(0x5EED, 0);
    Vector v(M.cols());
    for (Index i = 0; i < v.size(); ++i) v[i] = rng.uniform(-1.0, 1.0);
    ok = run_from(v, sigma_sq);
  }
  if (!ok) throw NumericError("spectral_norm: power iteration did not converge in 1000 steps");
  return std::sqrt(sigma_sq);
}

double global_L(const DualModel& model) {
  const double s = spectral_norm(model.S);
  return s * s / model.mu;
}

double global_L_bound(const DualModel& model) {
  const double a_norm = spectral_norm(model.S.leftCols(model.n + model.p_eq));
  double max_lg = 0.0;
  double sum_lg_sq = 0.0;
  for (Index r = 0; r < model.m; ++r) {
    const double lg = model.S.col(model.ineq_begin() + r).norm();
    max_lg = std::max(max_lg, lg);
    sum_lg_sq += lg * lg;
  }
  const double m1 = std::sqrt(static_cast<double>(model.m + 1));
  return m1 * std::max(a_norm, max_lg) / model.mu * std::sqrt(a_norm * a_norm + sum_lg_sq);
}

PrimalEval primal_value_and_residuals(const ProblemSpec& spec, const Vector& x) {
  PrimalEval out;
  out.objective = spec.reg.value(x);
  const Index n = spec.num_samples();
  if (n > 0) {
    const Vector margins = spec.A.transpose() * x;
    double acc = 0.0;
    for (Index i = 0; i < n; ++i) acc += loss_value(spec.losses[static_cast<std::size_t>(i)], margins[i]);
    out.objective += acc / static_cast<double>(n);
  }
  out.eq_residual = spec.num_eq() > 0 ? Vector(spec.B * x + spec.b) : Vector(0);
  if (spec.num_ineq() > 0) {
    out.ineq_residual = (spec.J * x + spec.q).cwiseMax(0.0);
  } else {
    out.ineq_residual = Vector(0);
  }
  return out;
}

Vector ineq_weights(const DualModel& model) { return model.L.segment(model.ineq_begin(), model.m); }

}  // namespace ardca
