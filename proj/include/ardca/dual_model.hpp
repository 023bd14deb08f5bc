#pragma once

#include "ardca/core.hpp"
#include "ardca/prox.hpp"

#include <memory>
#include <vector>

namespace ardca {

/// Primal problem
///
///   min_x  f(x) + (1/n) sum_i phi_i(A_i^T x)
///   s.t.   B x + b = 0,  J x + q <= 0
///
/// A is t x n with one column per sample. B (p x t) and J (m x t) may have
/// zero rows.
struct ProblemSpec {
  Matrix A;
  Matrix B;
  Vector b;
  Matrix J;
  Vector q;
  Regularizer reg;
  std::vector<Loss> losses;

  Index dim() const { return A.rows(); }
  Index num_samples() const { return A.cols(); }
  Index num_eq() const { return B.rows(); }
  Index num_ineq() const { return J.rows(); }
  Index n_hat() const { return num_samples() + num_eq() + num_ineq(); }

  /// Throws ConfigError on inconsistent dimensions or an invalid regularizer.
  void validate() const;
};

/// Dual of a ProblemSpec, assembled into the form
///
///   D(u) = f^*(-S u) - <p, u> + sum_j h_j(u_j)
///
/// with S = [A/n, B^T, J^T] and p = [0; b; q]. Immutable once built.
struct DualModel {
  std::shared_ptr<const ProblemSpec> spec;
  Matrix S;          // t x n_hat, column-major
  Vector p;          // length n_hat
  std::vector<SeparableTerm> terms;
  Vector L;          // coordinate Lipschitz constants
  double mu = 1.0;
  Index n = 0;       // samples
  Index p_eq = 0;    // equality rows
  Index m = 0;       // inequality rows

  Index n_hat() const { return S.cols(); }
  Index dim() const { return S.rows(); }
  const Regularizer& reg() const { return spec->reg; }

  /// Coordinates of the inequality multipliers, [n + p_eq, n_hat).
  Index ineq_begin() const { return n + p_eq; }
};

DualModel build_dual(ProblemSpec spec);

/// x^*(v) = grad f^*(-s_v) with s_v = S v.
Vector primal_from_dual(const DualModel& model, const Vector& s_v);

/// -S_i^T x^* - p_i, touching column i only.
double coord_grad(const DualModel& model, Index i, const Vector& x_star);

/// -S^T x^*(u) - p.
Vector full_grad(const DualModel& model, const Vector& u);

/// f^*(-S u) - <p, u> + sum_j h_j(u_j), or kInfinity outside dom h.
double dual_value(const DualModel& model, const Vector& u);

/// True when every coordinate lies in the domain of its separable term.
bool in_dual_domain(const DualModel& model, const Vector& u);

/// ||S||_2^2 / mu, the smoothness constant of d used by full-gradient methods.
double global_L(const DualModel& model);

/// The looser constant sqrt(m+1) max{||[A^T/n; B]||, max_i ||J_i||} / mu *
/// sqrt(||[A^T/n; B]||^2 + sum_i ||J_i||^2). Not used by the solvers.
double global_L_bound(const DualModel& model);

/// Largest singular value by power iteration on M^T M. Starts from the
/// all-ones vector (falling back to a fixed pseudo-random vector if that lies
/// in the null space), at most 1000 iterations, relative tolerance 1e-10.
/// Throws NumericError if the estimate does not settle.
double spectral_norm(const Matrix& M);

struct PrimalEval {
  double objective = 0.0;  // f(x) + (1/n) sum phi_i(A_i^T x)
  Vector eq_residual;      // B x + b
  Vector ineq_residual;    // max(0, J x + q)
};

PrimalEval primal_value_and_residuals(const ProblemSpec& spec, const Vector& x);

/// Coordinate weights of the inequality block (for the weighted dual norm of
/// the inequality residual).
Vector ineq_weights(const DualModel& model);

}  // namespace ardca
