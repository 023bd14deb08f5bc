#include "oracles.hpp"

#include <doctest.h>

using namespace ardca;

namespace {

DualModel random_model(std::uint64_t seed, Index t, Index n, Index p, Index m, bool l1 = false) {
  RngStream rng(seed, 77);
  return build_dual(oracle::random_spec(rng, t, n, p, m, l1));
}

}  // namespace

TEST_CASE("init examples") {
  const DualModel model = random_model(1, 4, 2, 0, 0);
  EngineState st = init(model, Vector::Zero(2), {});
  CHECK(st.s_z.isZero(0.0));
  CHECK(st.schedule.theta() == 0.5);
  CHECK(st.u_hat.isZero());
  CHECK(st.k == 0);

  const DualModel big = random_model(2, 5, 3, 1, 2);
  RngStream rng(3, 3);
  Vector u0 = oracle::random_vector(rng, big.n_hat(), 0.0, 1.0);
  st = init(big, u0, {});
  // Loss coordinates may be clamped into their domain, compare with the clamped z.
  CHECK((st.s_z - big.S * st.z).norm() == 0.0);
  u0[big.n_hat() - 1] = -0.1;
  CHECK_THROWS_AS(init(big, u0, {}), ConfigError);
  CHECK_THROWS_AS(init(big, Vector::Zero(2), {}), ConfigError);
}

TEST_CASE("init clamps loss coordinates into the conjugate domain") {
  Matrix A = Matrix::Identity(2, 2);
  ProblemSpec s;
  s.A = A;
  s.B = Matrix(0, 2);
  s.b = Vector(0);
  s.J = Matrix(0, 2);
  s.q = Vector(0);
  s.reg = Regularizer::l2(1);
  s.losses = {Loss::absolute(0), Loss::hinge(1)};
  const DualModel m = build_dual(s);
  Vector u0(2);
  u0 << 3.0, 0.5;
  const EngineState st = init(m, u0, {});
  CHECK(st.z[0] == 1.0);
  CHECK(st.z[1] == 0.0);
}

TEST_CASE("zero gradient on a zero-term coordinate is a fixed point") {
  ProblemSpec s;
  s.A = Matrix(2, 0);
  s.B = Matrix::Identity(1, 2);
  s.b = Vector::Zero(1);
  s.J = Matrix(0, 2);
  s.q = Vector(0);
  s.reg = Regularizer::l2(1);
  const DualModel m = build_dual(s);
  EngineState st = init(m, Vector::Zero(1), {});
  for (int k = 0; k < 10; ++k) step(st, m);
  CHECK(st.z.isZero(0.0));
  CHECK(st.u_hat.isZero(0.0));
  CHECK(st.s_z.isZero(0.0));
  CHECK(st.s_u_hat.isZero(0.0));
}

TEST_CASE("single step reproduces a hand trace") {
  // t = 1, one absolute sample: S = [a/1], L = a^2/mu.
  ProblemSpec s;
  s.A = Matrix::Constant(1, 1, 2.0);
  s.B = Matrix(0, 1);
  s.b = Vector(0);
  s.J = Matrix(0, 1);
  s.q = Vector(0);
  s.reg = Regularizer::l2(0.5);
  s.losses = {Loss::absolute(0.3)};
  const DualModel m = build_dual(s);
  EngineState st = init(m, Vector::Constant(1, 0.2), {});
  step(st, m);
  // x = -S v / mu = -2*0.2/0.5 = -0.8; g = -S x = 1.6; L = 8; tau = 1/(2*1*1*8).
  const double tau = 1.0 / 16.0;
  const double z1 = std::clamp(0.2 - tau * 1.6 - tau * 0.3, -1.0, 1.0);
  CHECK(st.z[0] == doctest::Approx(z1).epsilon(1e-12));
  CHECK(st.u_hat[0] == 0.0);  // n theta = 1
  CHECK(st.current_u()[0] == doctest::Approx(z1).epsilon(1e-12));
}

TEST_CASE("fixed theta with n_hat = 1 is proximal gradient with step 1/(2L)") {
  ProblemSpec s;
  s.A = Matrix::Constant(3, 1, 0.6);
  s.B = Matrix(0, 3);
  s.b = Vector(0);
  s.J = Matrix(0, 3);
  s.q = Vector(0);
  s.reg = Regularizer::l1_plus_l2(0.4, 0.1);
  s.losses = {Loss::hinge(-1)};
  const DualModel m = build_dual(s);
  EngineOptions eo;
  eo.mode = ScheduleMode::fixed;
  EngineState st = init(m, Vector::Zero(1), eo);
  double u = 0.0;
  const double L = m.L[0];
  for (int k = 0; k < 200; ++k) {
    step(st, m);
    const Vector x = oracle::conj_reg_grad(s.reg, -(m.S * Vector::Constant(1, u)));
    const double g = -m.S.col(0).dot(x);
    const double tau = 1.0 / (2.0 * L);
    // prox of (1/n) * hinge conjugate with l = -1: domain [0, 1], slope -1.
    u = std::clamp(u - tau * g + tau, 0.0, 1.0);
    REQUIRE(std::abs(st.current_u()[0] - u) <= 1e-12);
  }
}

TEST_CASE("change of variables matches the direct recursion") {
  for (bool fixed : {false, true}) {
    for (bool halved : {true, false}) {
      CAPTURE(fixed);
      CAPTURE(halved);
      const DualModel model = random_model(5, 6, 12, 3, 5, true);
      REQUIRE(model.n_hat() == 20);
      RngStream rng(9, 1);
      Vector u0 = oracle::random_vector(rng, 20, 0.0, 0.5);
      EngineOptions eo;
      eo.mode = fixed ? ScheduleMode::fixed : ScheduleMode::accelerated;
      eo.variant = halved ? StepVariant::conservative : StepVariant::standard;
      eo.seed = 17;
      eo.stream_id = 4;
      EngineState st = init(model, u0, eo);
      oracle::Shadow sh(model, st.z, fixed, halved, RngStream(17, 4));
      double worst = 0.0;
      CHECK((st.current_v() - sh.v).cwiseAbs().maxCoeff() <= 1e-15);
      for (int k = 0; k < 500; ++k) {
        const Vector v_engine = st.current_v();
        step(st, model);
        sh.step();
        worst = std::max(worst, (v_engine - sh.v).cwiseAbs().maxCoeff());
        worst = std::max(worst, (st.current_u() - sh.u).cwiseAbs().maxCoeff());
      }
      CHECK(worst <= 1e-8);
    }
  }
}

TEST_CASE("s-vector drift stays small over long runs") {
  const DualModel model = random_model(6, 8, 10, 2, 3);
  EngineOptions eo;
  eo.seed = 3;
  EngineState st = init(model, Vector::Zero(model.n_hat()), eo);
  for (int block = 0; block < 10; ++block) {
    for (int k = 0; k < 10000; ++k) step(st, model);
    const Vector sz = model.S * st.z, su = model.S * st.u_hat;
    CHECK((st.s_z - sz).cwiseAbs().maxCoeff() <= 1e-9 * (1.0 + st.s_z.norm()));
    CHECK((st.s_u_hat - su).cwiseAbs().maxCoeff() <= 1e-9 * (1.0 + st.s_u_hat.norm()));
    CHECK(in_dual_domain(model, st.z));
    CHECK(in_dual_domain(model, st.current_u()));
  }
}

TEST_CASE("ERM iterates stay in [-1, 1] for absolute and hinge losses") {
  RngStream rng(4, 8);
  for (int kind : {1, 2}) {
    const DualModel model = build_dual(oracle::random_spec(rng, 5, 15, 0, 0, false, 0.1, kind));
    EngineState st = init(model, Vector::Zero(15), {});
    for (int k = 0; k < 5000; ++k) {
      step(st, model);
      REQUIRE(st.z.cwiseAbs().maxCoeff() <= 1.0);
    }
  }
}

TEST_CASE("checkpoint schedule and K0 selection") {
  K0Policy pol = K0Policy::checkpoint(1.1);
  CHECK(pol.base(100) == 2);
  CHECK(pol.max_k0(100, 100) == 91);
  CHECK(pol.base(1) == 3);
  AveragingAccumulator acc(1, 2, std::nullopt);
  for (int k = 0; k <= 100; ++k) acc.add(k, Vector::Constant(1, double(k)), 1.0);
  std::vector<std::int64_t> ks;
  for (const auto& c : acc.checkpoints()) ks.push_back(c.k);
  CHECK(ks == std::vector<std::int64_t>{1, 2, 4, 8, 16, 32, 64});
  CHECK(acc.select_k0(100) == 32);
  CHECK(acc.select_k0(3) == 1);
  CHECK(acc.select_k0(4) == 2);
  CHECK(acc.select_k0(7) == 2);
  CHECK(acc.select_k0(8) == 4);
  // With theta = 1, the average over [32, 100] of x_k = k is 66.
  CHECK(acc.average(100)[0] == doctest::Approx(66.0));
  CHECK_THROWS_AS(acc.average(50), ConfigError);
  CHECK_THROWS_AS(acc.add(5, Vector::Zero(1), 1.0), ConfigError);
}

TEST_CASE("explicit K0 = 1 averages iterates 1..K") {
  AveragingAccumulator acc(1, 2, std::int64_t{1});
  for (int k = 0; k <= 10; ++k) acc.add(k, Vector::Constant(1, double(k * k)), 1.0 / (k + 2.0));
  double num = 0, den = 0;
  for (int k = 1; k <= 10; ++k) {
    num += double(k * k) * (k + 2.0);
    den += k + 2.0;
  }
  CHECK(acc.average(10)[0] == doctest::Approx(num / den).epsilon(1e-14));
  CHECK(acc.select_k0(10) == 1);
}

TEST_CASE("run output matches a brute-force weighted average") {
  const DualModel model = random_model(7, 4, 6, 1, 1);
  EngineOptions eo;
  eo.seed = 5;
  EngineState st = init(model, Vector::Zero(model.n_hat()), eo);
  // Replay: record x^*(v^k)/theta_k by hand alongside the engine.
  EngineState replay = init(model, Vector::Zero(model.n_hat()), eo);
  const std::int64_t K = 300;
  std::vector<Vector> xs;
  std::vector<double> thetas;
  for (std::int64_t k = 0; k <= K; ++k) {
    thetas.push_back(replay.schedule.theta());
    xs.push_back(oracle::conj_reg_grad(model.reg(), -(model.S * replay.current_v())));
    step(replay, model);
  }
  const SolveReport rep = run(st, model, K);
  CHECK(rep.iterations == K + 1);
  const std::int64_t c = K0Policy::checkpoint().base(model.n_hat());
  std::int64_t k0 = 1;
  while (k0 * c * c <= K) k0 *= c;
  CHECK(rep.K0_used == k0);
  Vector num = Vector::Zero(model.dim());
  double den = 0;
  for (std::int64_t k = k0; k <= K; ++k) {
    num += xs[size_t(k)] / thetas[size_t(k)];
    den += 1.0 / thetas[size_t(k)];
  }
  CHECK((rep.x_avg - num / den).cwiseAbs().maxCoeff() <= 1e-10 * (1 + rep.x_avg.norm()));
  // u^{K+1} uses theta_K, the value in force during the last step.
  CHECK((rep.u_final - (thetas.back() * thetas.back() * replay.u_hat + replay.z)).norm() <= 1e-12);
  CHECK((rep.x_last - xs.back()).norm() <= 1e-12);
}

TEST_CASE("explicit K0 bound is enforced") {
  const DualModel model = random_model(8, 3, 4, 0, 0);
  EngineOptions eo;
  eo.k0 = K0Policy::fixed(50);
  EngineState st = init(model, Vector::Zero(4), eo);
  CHECK_THROWS_AS(run(st, model, 40), ConfigError);
  eo.k0 = K0Policy::fixed(30);
  st = init(model, Vector::Zero(4), eo);
  const SolveReport r = run(st, model, 40);
  CHECK(r.K0_used == 30);
}

TEST_CASE("run records one trace row per pass and the best dual value never rises") {
  const DualModel model = random_model(9, 6, 10, 0, 0);
  Tracer tr(model, "ardca", 1);
  EngineState st = init(model, Vector::Zero(10), {});
  RunOptions ro;
  ro.tracer = &tr;
  run(st, model, 10 * 20 - 1, ro);
  const auto& recs = tr.records();
  REQUIRE(recs.size() == 21);
  double best = recs.front().dual_obj;
  for (size_t i = 0; i < recs.size(); ++i) {
    CHECK(recs[i].pass == doctest::Approx(double(i)));
    const double next = std::min(best, recs[i].dual_obj);
    CHECK(next <= best);
    best = next;
    CHECK(std::isnan(recs[i].primal_gap));
  }
  CHECK(best < recs.front().dual_obj);
}

TEST_CASE("non-finite input aborts") {
  const DualModel model = random_model(10, 3, 3, 0, 0);
  Vector u0 = Vector::Zero(3);
  u0[1] = std::nan("");
  CHECK_THROWS_AS(init(model, u0, {}), ConfigError);
}
