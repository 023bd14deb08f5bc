#include "ardca/prox.hpp"

#include <cmath>

namespace ardca {

Regularizer Regularizer::l2(double mu) {
  if (!(mu > 0.0)) throw ConfigError("Regularizer: mu must be positive");
  return {Kind::l2, mu, 0.0};
}

Regularizer Regularizer::l1_plus_l2(double mu, double sigma) {
  if (!(mu > 0.0)) throw ConfigError("Regularizer: mu must be positive");
  if (!(sigma >= 0.0)) throw ConfigError("Regularizer: sigma must be non-negative");
  return {Kind::l1_plus_l2, mu, sigma};
}

double Regularizer::value(const Vector& x) const {
  double v = 0.5 * mu * x.squaredNorm();
  if (kind == Kind::l1_plus_l2) v += sigma * x.lpNorm<1>();
  return v;
}

Vector reg_conj_grad(const Regularizer& reg, const Vector& w) {
  if (reg.kind == Regularizer::Kind::l2) return w / reg.mu;
  const double s = reg.sigma;
  const double inv_mu = 1.0 / reg.mu;
  return w.unaryExpr([s, inv_mu](double wj) {
    const double mag = std::abs(wj) - s;
    if (mag <= 0.0) return 0.0;
    return std::copysign(mag, wj) * inv_mu;
  });
}

double reg_conj_value(const Regularizer& reg, const Vector& w) {
  if (reg.kind == Regularizer::Kind::l2) return w.squaredNorm() / (2.0 * reg.mu);
  double acc = 0.0;
  for (Index j = 0; j < w.size(); ++j) {
    const double mag = std::abs(w[j]) - reg.sigma;
    if (mag > 0.0) acc += mag * mag;
  }
  return acc / (2.0 * reg.mu);
}

Loss Loss::squared(double b) { return {Kind::squared, b, 1.0}; }
Loss Loss::absolute(double b) { return {Kind::absolute, b, 1.0}; }
Loss Loss::hinge(double label) {
  if (label != 1.0 && label != -1.0) throw ConfigError("hinge loss label must be +1 or -1");
  return {Kind::hinge, 0.0, label};
}

double Loss::lipschitz() const { return kind == Kind::squared ? kInfinity : 1.0; }

double loss_value(const Loss& loss, double y) {
  switch (loss.kind) {
    case Loss::Kind::squared: {
      const double r = y - loss.offset;
      return 0.5 * r * r;
    }
    case Loss::Kind::absolute:
      return std::abs(y - loss.offset);
    case Loss::Kind::hinge:
      return std::max(0.0, 1.0 - loss.label * y);
  }
  return 0.0;
}

Interval loss_conj_domain(const Loss& loss) {
  switch (loss.kind) {
    case Loss::Kind::squared:
      return {};
    case Loss::Kind::absolute:
      return {-1.0, 1.0};
    case Loss::Kind::hinge:
      return loss.label > 0 ? Interval{-1.0, 0.0} : Interval{0.0, 1.0};
  }
  return {};
}

double loss_conj_value(const Loss& loss, double u) {
  switch (loss.kind) {
    case Loss::Kind::squared:
      return 0.5 * u * u + loss.offset * u;
    case Loss::Kind::absolute:
      return loss_conj_domain(loss).contains(u) ? loss.offset * u : kInfinity;
    case Loss::Kind::hinge:
      return loss_conj_domain(loss).contains(u) ? loss.label * u : kInfinity;
  }
  return kInfinity;
}

double loss_prox(const Loss& loss, double v, double tau) {
  if (!(tau > 0.0)) throw ConfigError("loss_prox: tau must be positive");
  switch (loss.kind) {
    case Loss::Kind::squared:
      return (v + tau * loss.offset) / (1.0 + tau);
    case Loss::Kind::absolute: {
      const double r = v - loss.offset;
      const double mag = std::max(std::abs(r) - tau, 0.0);
      return loss.offset + std::copysign(mag, r);
    }
    case Loss::Kind::hinge: {
      // Work with w = l y, where the loss is max(0, 1 - w).
      const double w = loss.label * v;
      double p;
      if (w < 1.0 - tau) {
        p = w + tau;
      } else if (w > 1.0) {
        p = w;
      } else {
        p = 1.0;
      }
      return loss.label * p;
    }
  }
  return v;
}

double loss_conj_prox(const Loss& loss, double v, double tau) {
  if (!(tau > 0.0)) throw ConfigError("loss_conj_prox: tau must be positive");
  switch (loss.kind) {
    case Loss::Kind::squared:
      return (v - tau * loss.offset) / (1.0 + tau);
    case Loss::Kind::absolute:
      return loss_conj_domain(loss).clamp(v - tau * loss.offset);
    case Loss::Kind::hinge:
      return loss_conj_domain(loss).clamp(v - tau * loss.label);
  }
  return v;
}

SeparableTerm SeparableTerm::conjugate_of(const Loss& loss, double scale) {
  if (!(scale > 0.0)) throw ConfigError("SeparableTerm: scale must be positive");
  return {Kind::loss_conjugate, loss, scale};
}
SeparableTerm SeparableTerm::zero() { return {Kind::zero, Loss{}, 1.0}; }
SeparableTerm SeparableTerm::nonneg() { return {Kind::nonneg_indicator, Loss{}, 1.0}; }

double term_value(const SeparableTerm& term, double u) {
  switch (term.kind) {
    case SeparableTerm::Kind::zero:
      return 0.0;
    case SeparableTerm::Kind::nonneg_indicator:
      return u >= 0.0 ? 0.0 : kInfinity;
    case SeparableTerm::Kind::loss_conjugate: {
      const double v = loss_conj_value(term.loss, u);
      return is_infinite(v) ? kInfinity : term.scale * v;
    }
  }
  return kInfinity;
}

Interval term_domain(const SeparableTerm& term) {
  switch (term.kind) {
    case SeparableTerm::Kind::zero:
      return {};
    case SeparableTerm::Kind::nonneg_indicator:
      return {0.0, kInfinity};
    case SeparableTerm::Kind::loss_conjugate:
      return loss_conj_domain(term.loss);
  }
  return {};
}

double term_prox(const SeparableTerm& term, double v, double tau) {
  if (!(tau > 0.0)) throw ConfigError("term_prox: tau must be positive");
  switch (term.kind) {
    case SeparableTerm::Kind::zero:
      return v;
    case SeparableTerm::Kind::nonneg_indicator:
      return v > 0.0 ? v : 0.0;
    case SeparableTerm::Kind::loss_conjugate:
      return loss_conj_prox(term.loss, v, tau * term.scale);
  }
  return v;
}

double term_linear_argmin(const SeparableTerm& term, double g, double current) {
  // h is linear on its domain for every kind except the squared conjugate,
  // so the minimizer sits at an endpoint selected by the total slope.
  double slope = g;
  if (term.kind == SeparableTerm::Kind::loss_conjugate) {
    switch (term.loss.kind) {
      case Loss::Kind::squared: {
        // scale*(u^2/2 + b u) + g u has a finite minimizer.
        return -(g / term.scale + term.loss.offset);
      }
      case Loss::Kind::absolute:
        slope += term.scale * term.loss.offset;
        break;
      case Loss::Kind::hinge:
        slope += term.scale * term.loss.label;
        break;
    }
  }
  const Interval dom = term_domain(term);
  if (slope > 0.0) {
    if (dom.lo == -kInfinity) throw NumericError("coordinate subproblem unbounded below");
    return dom.lo;
  }
  if (slope < 0.0) {
    if (dom.hi == kInfinity) throw NumericError("coordinate subproblem unbounded below");
    return dom.hi;
  }
  return dom.clamp(current);
}

}  // namespace ardca
