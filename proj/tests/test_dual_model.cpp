#include "oracles.hpp"

#include <doctest.h>

using namespace ardca;

namespace {

ProblemSpec erm_spec(const Matrix& A, std::vector<Loss> losses, Regularizer reg) {
  ProblemSpec s;
  s.A = A;
  s.B = Matrix(0, A.rows());
  s.b = Vector(0);
  s.J = Matrix(0, A.rows());
  s.q = Vector(0);
  s.reg = reg;
  s.losses = std::move(losses);
  return s;
}

}  // namespace

TEST_CASE("coordinate Lipschitz constants") {
  Matrix A = Matrix::Zero(3, 4);
  for (int j = 0; j < 4; ++j) A(j % 3, j) = 1.0;
  ProblemSpec s = erm_spec(A, std::vector<Loss>(4, Loss::absolute(0)), Regularizer::l2(0.1));
  const DualModel m = build_dual(s);
  for (int j = 0; j < 4; ++j) CHECK(m.L[j] == doctest::Approx(0.625));
  CHECK(m.n_hat() == 4);
  CHECK(m.p.isZero());
  CHECK(m.S.isApprox(A / 4.0));

  ProblemSpec e;
  e.A = Matrix(2, 0);
  e.B = Matrix(1, 2);
  e.B << 2.0, 0.0;
  e.b = Vector::Constant(1, 1.0);
  e.J = Matrix(0, 2);
  e.q = Vector(0);
  e.reg = Regularizer::l2(0.5);
  const DualModel me = build_dual(e);
  CHECK(me.L[0] == doctest::Approx(8.0));
  CHECK(me.terms[0].kind == SeparableTerm::Kind::zero);
}

TEST_CASE("block layout of S, p and terms") {
  RngStream rng(1, 1);
  const ProblemSpec s = oracle::random_spec(rng, 4, 3, 2, 2, false);
  const DualModel m = build_dual(s);
  CHECK(m.n_hat() == 7);
  CHECK(m.S.leftCols(3).isApprox(s.A / 3.0));
  CHECK(m.S.middleCols(3, 2).isApprox(s.B.transpose()));
  CHECK(m.S.rightCols(2).isApprox(s.J.transpose()));
  CHECK(m.p.head(3).isZero());
  CHECK(m.p.segment(3, 2) == s.b);
  CHECK(m.p.tail(2) == s.q);
  CHECK(m.terms[2].kind == SeparableTerm::Kind::loss_conjugate);
  CHECK(m.terms[3].kind == SeparableTerm::Kind::zero);
  CHECK(m.terms[6].kind == SeparableTerm::Kind::nonneg_indicator);
  CHECK(m.ineq_begin() == 5);
}

TEST_CASE("build rejects a zero column with an unbounded term") {
  Matrix A = Matrix::Identity(2, 2);
  A.col(1).setZero();
  CHECK_THROWS_AS(build_dual(erm_spec(A, {Loss::squared(0), Loss::squared(0)}, Regularizer::l2(1))), ConfigError);
  CHECK_NOTHROW(build_dual(erm_spec(A, {Loss::squared(0), Loss::absolute(0)}, Regularizer::l2(1))));
  ProblemSpec s = erm_spec(Matrix::Identity(2, 2), {Loss::squared(0), Loss::squared(0)}, Regularizer::l2(1));
  s.B = Matrix::Zero(1, 2);
  s.b = Vector::Constant(1, 1.0);
  CHECK_THROWS_AS(build_dual(s), ConfigError);
  s.B = Matrix(0, 2);
  s.b = Vector(0);
  s.J = Matrix::Zero(1, 2);
  s.q = Vector::Constant(1, -1.0);  // 0 x - 1 <= 0 always holds
  CHECK_NOTHROW(build_dual(s));
  s.q[0] = 1.0;  // infeasible constant row
  CHECK_THROWS_AS(build_dual(s), ConfigError);
}

TEST_CASE("validate rejects inconsistent dimensions") {
  RngStream rng(2, 2);
  ProblemSpec s = oracle::random_spec(rng, 3, 2, 1, 1, false);
  s.b = Vector(2);
  CHECK_THROWS_AS(build_dual(s), ConfigError);
  s = oracle::random_spec(rng, 3, 2, 0, 0, false);
  s.losses.pop_back();
  CHECK_THROWS_AS(build_dual(s), ConfigError);
}

TEST_CASE("primal_from_dual examples") {
  const DualModel m = build_dual(erm_spec(Matrix::Identity(2, 2), {Loss::absolute(0), Loss::absolute(0)}, Regularizer::l2(1)));
  Vector sv(2);
  sv << 2, -1;
  const Vector x = primal_from_dual(m, sv);
  CHECK(x[0] == -2.0);
  CHECK(x[1] == 1.0);
  CHECK(primal_from_dual(m, Vector::Zero(2)).isZero());
  const DualModel m1 = build_dual(erm_spec(Matrix::Identity(1, 1), {Loss::absolute(0)}, Regularizer::l1_plus_l2(1, 1)));
  CHECK(primal_from_dual(m1, Vector::Constant(1, -0.5))[0] == 0.0);
}

TEST_CASE("coord_grad hand example") {
  Matrix A(2, 1);
  A << 1, 0;
  const DualModel m = build_dual(erm_spec(A, {Loss::squared(0)}, Regularizer::l2(1)));
  const Vector v = Vector::Constant(1, 2.0);
  const Vector x = primal_from_dual(m, m.S * v);
  CHECK(x[0] == -2.0);
  CHECK(coord_grad(m, 0, x) == doctest::Approx(2.0));
}

TEST_CASE("gradients match finite differences and the independent dual") {
  RngStream rng(7, 3);
  int instances = 0;
  for (int trial = 0; trial < 24; ++trial) {
    const bool l1 = trial % 2;
    const Index t = 2 + trial % 8, n = 1 + trial % 4, p = trial % 3, m = (trial / 3) % 3;
    ProblemSpec spec = oracle::random_spec(rng, t, n, p, m, l1);
    // Keep the loss domains open around the evaluation point: squared losses.
    for (auto& l : spec.losses) l = Loss::squared(rng.uniform(-1, 1));
    const DualModel model = build_dual(spec);
    Vector u = oracle::random_vector(rng, model.n_hat());
    for (Index j = model.ineq_begin(); j < model.n_hat(); ++j) u[j] = rng.uniform(0.5, 1.5);

    // d(u) = D(u) minus the separable part, written from the spec blocks.
    const auto d_smooth = [&](const Vector& w) {
      double h = 0.0;
      for (Index i = 0; i < n; ++i) h += oracle::conj_loss(spec.losses[size_t(i)], w[i]) / double(n);
      return oracle::dual(spec, w) - h;
    };
    const Vector g = full_grad(model, u);
    const Vector fd = oracle::fd_grad(d_smooth, u);
    const Vector x = primal_from_dual(model, model.S * u);
    for (Index j = 0; j < u.size(); ++j) {
      CHECK(std::abs(coord_grad(model, j, x) - g[j]) <= 1e-12 * (1.0 + std::abs(g[j])));
      CHECK(std::abs(fd[j] - g[j]) <= 1e-6 * std::max(1.0, std::abs(g[j])));
    }
    CHECK(dual_value(model, u) == doctest::Approx(oracle::dual(spec, u)).epsilon(1e-12));
    ++instances;
  }
  CHECK(instances >= 20);
}

TEST_CASE("coordinate smoothness, tight for l2") {
  RngStream rng(8, 1);
  for (int trial = 0; trial < 50; ++trial) {
    const bool l1 = trial % 2;
    const DualModel model = build_dual(oracle::random_spec(rng, 5, 3, 1, 2, l1));
    const Vector u = oracle::random_vector(rng, model.n_hat(), 0.0, 1.0);
    const Index j = Index(rng.below(std::uint64_t(model.n_hat())));
    Vector v = u;
    v[j] += rng.uniform(0.1, 1.0);
    const double lhs = std::abs(full_grad(model, u)[j] - full_grad(model, v)[j]);
    const double rhs = model.L[j] * std::abs(u[j] - v[j]);
    CHECK(lhs <= rhs * (1 + 1e-12) + 1e-14);
    if (!l1) CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("dual value examples") {
  Matrix A(2, 2);
  A << 1, 2, 3, 4;
  ProblemSpec s = erm_spec(A, {Loss::absolute(0), Loss::absolute(0)}, Regularizer::l2(0.5));
  DualModel m = build_dual(s);
  CHECK(dual_value(m, Vector::Zero(2)) == 0.0);
  // LAD form: D(u) = ||A u||^2/(2 mu n^2) + <u, b>/n on [-1,1]^n in the raw
  // multiplier scaling used here.
  s.losses = {Loss::absolute(0.7), Loss::absolute(-0.2)};
  m = build_dual(s);
  Vector u(2);
  u << 0.3, -0.9;
  const Vector Au = A * u;
  const double expect = Au.squaredNorm() / (2 * 0.5 * 4) + (0.7 * 0.3 + (-0.2) * (-0.9)) / 2.0;
  CHECK(dual_value(m, u) == doctest::Approx(expect));
  u[1] = -1.2;
  CHECK(is_infinite(dual_value(m, u)));

  RngStream rng(1, 5);
  const DualModel mc = build_dual(oracle::random_spec(rng, 3, 0, 0, 2, false));
  Vector w(2);
  w << 1.0, -0.1;
  CHECK(is_infinite(dual_value(mc, w)));
  CHECK_FALSE(in_dual_domain(mc, w));
}

TEST_CASE("global_L examples and properties") {
  const DualModel one = build_dual(erm_spec(Matrix::Identity(1, 1), {Loss::absolute(0)}, Regularizer::l2(1)));
  CHECK(global_L(one) == doctest::Approx(1.0));

  ProblemSpec s;
  s.A = Matrix(3, 0);
  s.B = Matrix::Zero(2, 3);
  s.B(0, 0) = 3.0;
  s.B(1, 1) = 1.0;
  s.b = Vector::Zero(2);
  s.J = Matrix(0, 3);
  s.q = Vector(0);
  s.reg = Regularizer::l2(0.5);
  CHECK(global_L(build_dual(s)) == doctest::Approx(18.0).epsilon(1e-9));

  RngStream rng(4, 4);
  for (int trial = 0; trial < 20; ++trial) {
    const DualModel m = build_dual(oracle::random_spec(rng, 6, 4, 1, 2, trial % 2));
    const double L = global_L(m);
    CHECK(L >= m.L.maxCoeff() * (1 - 1e-12));
    const Eigen::JacobiSVD<Matrix> svd(m.S);
    CHECK(L == doctest::Approx(svd.singularValues()[0] * svd.singularValues()[0] / m.mu).epsilon(1e-8));
    CHECK(global_L_bound(m) >= L * (1 - 1e-9));
  }
}

TEST_CASE("spectral norm when the all-ones start is in the null space") {
  Matrix M(2, 2);
  M << 1, -1, 2, -2;  // M * ones = 0
  CHECK(spectral_norm(M) == doctest::Approx(std::sqrt(10.0)).epsilon(1e-9));
  CHECK(spectral_norm(Matrix::Zero(3, 3)) == 0.0);
}

TEST_CASE("primal value and residuals") {
  RngStream rng(6, 6);
  ProblemSpec s = oracle::random_spec(rng, 3, 2, 1, 2, true);
  const PrimalEval z = primal_value_and_residuals(s, Vector::Zero(3));
  double F0 = 0.0;
  for (const Loss& l : s.losses) F0 += oracle::primal_loss(l, 0.0) / 2.0;
  CHECK(z.objective == doctest::Approx(F0));
  CHECK(z.eq_residual == s.b);
  CHECK(z.ineq_residual == s.q.cwiseMax(0.0));

  // LAD at x = 0 with b = [1, -2]: (|1| + |-2|)/2.
  ProblemSpec lad = erm_spec(Matrix::Identity(2, 2), {Loss::absolute(1), Loss::absolute(-2)}, Regularizer::l2(0.1));
  CHECK(primal_value_and_residuals(lad, Vector::Zero(2)).objective == doctest::Approx(1.5));

  // A feasible point: choose x then set b and q around it.
  const Vector x = oracle::random_vector(rng, 3);
  s.b = -(s.B * x);
  s.q = -(s.J * x) - Vector::Constant(2, 0.1);
  const PrimalEval f = primal_value_and_residuals(s, x);
  CHECK(f.eq_residual.norm() <= 1e-15);
  CHECK(f.ineq_residual.isZero());
  CHECK(f.objective == doctest::Approx(oracle::primal(s, x)));
}

TEST_CASE("weak duality on random feasible pairs") {
  RngStream rng(10, 1);
  for (int trial = 0; trial < 200; ++trial) {
    ProblemSpec s = oracle::random_spec(rng, 3, 2, 1, 2, trial % 2);
    const Vector x = oracle::random_vector(rng, 3);
    s.b = -(s.B * x);
    s.q = -(s.J * x) - oracle::random_vector(rng, 2, 0.0, 0.5);
    const DualModel m = build_dual(s);
    Vector u = oracle::random_vector(rng, m.n_hat(), -3, 3);
    for (Index j = 0; j < m.n_hat(); ++j) u[j] = term_domain(m.terms[size_t(j)]).clamp(u[j]);
    CHECK(-dual_value(m, u) <= primal_value_and_residuals(s, x).objective + 1e-12);
  }
}
