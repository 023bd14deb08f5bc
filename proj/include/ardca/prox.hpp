#pragma once

#include "ardca/core.hpp"

#include <limits>

namespace ardca {

/// Marker for conjugate values outside the conjugate's domain.
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline bool is_infinite(double v) { return v == kInfinity; }

// ---------------------------------------------------------------------------
// Regularizer f(x) = (mu/2)||x||^2 + sigma ||x||_1
// ---------------------------------------------------------------------------

struct Regularizer {
  enum class Kind { l2, l1_plus_l2 };

  Kind kind = Kind::l2;
  double mu = 1.0;
  double sigma = 0.0;  // l1 weight, used by l1_plus_l2 only

  static Regularizer l2(double mu);
  static Regularizer l1_plus_l2(double mu, double sigma);

  double value(const Vector& x) const;
};

/// Gradient of f^* at w: w/mu for l2, soft_threshold(w, sigma)/mu otherwise.
Vector reg_conj_grad(const Regularizer& reg, const Vector& w);
double reg_conj_value(const Regularizer& reg, const Vector& w);

// ---------------------------------------------------------------------------
// Scalar losses
// ---------------------------------------------------------------------------

/// phi(y) for a single sample.
///   squared:  (y - b)^2 / 2,   phi^*(u) = u^2/2 + b u
///   absolute: |y - b|,         phi^*(u) = b u + I_[-1,1](u)
///   hinge:    max(0, 1 - l y), phi^*(u) = l u on {u : l u in [-1, 0]}
struct Loss {
  enum class Kind { squared, absolute, hinge };

  Kind kind = Kind::squared;
  double offset = 0.0;  // b for squared/absolute
  double label = 1.0;   // l in {-1, +1} for hinge

  static Loss squared(double b);
  static Loss absolute(double b);
  static Loss hinge(double label);

  /// Lipschitz constant of phi; infinite for the squared loss.
  double lipschitz() const;
};

struct Interval {
  double lo = -kInfinity;
  double hi = kInfinity;

  bool bounded() const { return lo > -kInfinity && hi < kInfinity; }
  double clamp(double v) const { return v < lo ? lo : (v > hi ? hi : v); }
  bool contains(double v) const { return v >= lo && v <= hi; }
};

double loss_value(const Loss& loss, double y);
double loss_conj_value(const Loss& loss, double u);
Interval loss_conj_domain(const Loss& loss);
/// Prox_{tau phi}(v).
double loss_prox(const Loss& loss, double v, double tau);
/// Prox_{tau phi^*}(v).
double loss_conj_prox(const Loss& loss, double v, double tau);

// ---------------------------------------------------------------------------
// Separable dual terms h_i
// ---------------------------------------------------------------------------

/// One entry of the separable part of the dual: a scaled loss conjugate for
/// sample coordinates, zero for equality multipliers and the indicator of
/// [0, inf) for inequality multipliers.
struct SeparableTerm {
  enum class Kind { loss_conjugate, zero, nonneg_indicator };

  Kind kind = Kind::zero;
  Loss loss;           // loss_conjugate only
  double scale = 1.0;  // 1/n for loss conjugates

  static SeparableTerm conjugate_of(const Loss& loss, double scale);
  static SeparableTerm zero();
  static SeparableTerm nonneg();
};

double term_value(const SeparableTerm& term, double u);
Interval term_domain(const SeparableTerm& term);

/// argmin_u (1/(2 tau)) (u - v)^2 + h(u). The 1/n scale of loss terms is
/// applied internally, callers pass the unscaled step.
double term_prox(const SeparableTerm& term, double v, double tau);

/// argmin_u g u + h(u): the coordinate step with an infinite step size.
/// Ties (zero effective slope) keep `current`. Throws NumericError if the
/// subproblem is unbounded below.
double term_linear_argmin(const SeparableTerm& term, double g, double current);

}  // namespace ardca
