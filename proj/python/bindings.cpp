#include "ardca/baselines.hpp"
#include "ardca/bench.hpp"
#include "ardca/engine.hpp"
#include "ardca/schedules.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace ardca;

namespace {

StepVariant parse_variant(const std::string& s) {
  if (s == "conservative") return StepVariant::conservative;
  if (s == "standard") return StepVariant::standard;
  throw ConfigError("step variant must be 'conservative' or 'standard', got '" + s + "'");
}

py::dict report_dict(const SolveReport& r) {
  py::dict d;
  d["u_final"] = r.u_final;
  d["x_avg"] = r.x_avg;
  d["x_last"] = r.x_last;
  d["x_uniform"] = r.x_uniform;
  d["K0"] = r.K0_used;
  d["iterations"] = r.iterations;
  d["status"] = r.status;
  d["trace"] = r.trace;
  if (r.warm_start_primal) d["warm_start_primal"] = *r.warm_start_primal;
  return d;
}

// Runs a solve with an optional tracer and folds its records into the report.
template <class F>
py::dict traced(const DualModel& model, const std::string& name, std::uint64_t seed,
                const std::optional<Reference>& ref, bool trace, F&& body) {
  std::optional<Tracer> tracer;
  if (trace) tracer.emplace(model, name, seed, ref);
  SolveReport r = body(tracer ? &*tracer : nullptr);
  if (tracer) r.trace = tracer->records();
  return report_dict(r);
}

}  // namespace

PYBIND11_MODULE(_ardca, m) {
  m.doc() = "Accelerated randomized dual coordinate ascent";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  m.def("theta_next", &theta_next, py::arg("theta"));
  m.def("kprime_formula",
        [](std::int64_t n, double mu, double M, double eps, double x) {
          const KPrime k = kprime_formula(n, mu, M, eps, x);
          return py::make_tuple(k.count, k.log_arg_nonpositive);
        },
        py::arg("n"), py::arg("mu"), py::arg("M"), py::arg("eps"), py::arg("D0_plus_F0"),
        "Returns (K', log_arg_nonpositive).");

  py::class_<Regularizer>(m, "Regularizer")
      .def_static("l2", &Regularizer::l2, py::arg("mu"))
      .def_static("l1_plus_l2", &Regularizer::l1_plus_l2, py::arg("mu"), py::arg("sigma"))
      .def_readonly("mu", &Regularizer::mu)
      .def_readonly("sigma", &Regularizer::sigma)
      .def("value", &Regularizer::value);

  py::class_<Loss>(m, "Loss")
      .def_static("squared", &Loss::squared, py::arg("b"))
      .def_static("absolute", &Loss::absolute, py::arg("b"))
      .def_static("hinge", &Loss::hinge, py::arg("label"))
      .def("lipschitz", &Loss::lipschitz)
      .def("value", [](const Loss& l, double y) { return loss_value(l, y); })
      .def("conj_value", [](const Loss& l, double u) { return loss_conj_value(l, u); })
      .def("prox", [](const Loss& l, double v, double tau) { return loss_prox(l, v, tau); })
      .def("conj_prox", [](const Loss& l, double v, double tau) { return loss_conj_prox(l, v, tau); });

  py::class_<ProblemSpec>(m, "ProblemSpec")
      .def(py::init([](Matrix A, Regularizer reg, std::vector<Loss> losses, std::optional<Matrix> B,
                       std::optional<Vector> b, std::optional<Matrix> J, std::optional<Vector> q) {
             ProblemSpec s;
             const Index t = A.rows();
             s.A = std::move(A);
             s.reg = reg;
             s.losses = std::move(losses);
             s.B = B ? *B : Matrix(0, t);
             s.b = b ? *b : Vector(0);
             s.J = J ? *J : Matrix(0, t);
             s.q = q ? *q : Vector(0);
             s.validate();
             return s;
           }),
           py::arg("A"), py::arg("reg"), py::arg("losses"), py::arg("B") = py::none(), py::arg("b") = py::none(),
           py::arg("J") = py::none(), py::arg("q") = py::none())
      .def_readonly("A", &ProblemSpec::A)
      .def_readonly("B", &ProblemSpec::B)
      .def_readonly("b", &ProblemSpec::b)
      .def_readonly("J", &ProblemSpec::J)
      .def_readonly("q", &ProblemSpec::q)
      .def_readonly("reg", &ProblemSpec::reg)
      .def_readonly("losses", &ProblemSpec::losses)
      .def_property_readonly("n_hat", &ProblemSpec::n_hat)
      .def("primal_value", [](const ProblemSpec& s, const Vector& x) {
        const PrimalEval e = primal_value_and_residuals(s, x);
        return py::make_tuple(e.objective, e.eq_residual, e.ineq_residual);
      });

  py::class_<DualModel>(m, "DualModel")
      .def(py::init([](const ProblemSpec& s) { return build_dual(s); }), py::arg("spec"))
      .def_readonly("S", &DualModel::S)
      .def_readonly("p", &DualModel::p)
      .def_readonly("L", &DualModel::L)
      .def_readonly("mu", &DualModel::mu)
      .def_property_readonly("n_hat", &DualModel::n_hat)
      .def_property_readonly("spec", [](const DualModel& d) { return *d.spec; })
      .def("dual_value", [](const DualModel& d, const Vector& u) { return dual_value(d, u); })
      .def("full_grad", [](const DualModel& d, const Vector& u) { return full_grad(d, u); })
      .def("primal_from_dual", [](const DualModel& d, const Vector& u) { return primal_from_dual(d, d.S * u); })
      .def("global_L", [](const DualModel& d) { return global_L(d); });

  py::class_<Reference>(m, "Reference")
      .def(py::init([](double F, double D) { return Reference{F, D}; }), py::arg("F_star"), py::arg("D_star"))
      .def_readonly("F_star", &Reference::F_star)
      .def_readonly("D_star", &Reference::D_star);

  py::class_<TraceRecord>(m, "TraceRecord")
      .def_readonly("solver", &TraceRecord::solver)
      .def_readonly("seed", &TraceRecord::seed)
      .def_readonly("pass_", &TraceRecord::pass)
      .def_readonly("primal_obj", &TraceRecord::primal_obj)
      .def_readonly("dual_obj", &TraceRecord::dual_obj)
      .def_readonly("primal_gap", &TraceRecord::primal_gap)
      .def_readonly("dual_gap", &TraceRecord::dual_gap)
      .def_readonly("eq_violation", &TraceRecord::eq_violation)
      .def_readonly("ineq_violation", &TraceRecord::ineq_violation)
      .def_readonly("wall_ms", &TraceRecord::wall_ms)
      .def_readonly("status", &TraceRecord::status);

  m.def("ardca",
        [](const DualModel& model, const Vector& u0, std::int64_t K, std::uint64_t seed, bool fixed,
           const std::string& variant, std::optional<std::int64_t> k0, double nu, bool trace,
           std::optional<Reference> ref) {
          return traced(model, "ardca", seed, ref, trace, [&](Tracer* t) {
            EngineOptions eo;
            eo.mode = fixed ? ScheduleMode::fixed : ScheduleMode::accelerated;
            eo.variant = parse_variant(variant);
            eo.k0 = k0 ? K0Policy::fixed(*k0, nu) : K0Policy::checkpoint(nu);
            eo.seed = seed;
            eo.stream_id = derive_stream("ardca", seed);
            EngineState st = init(model, u0, eo);
            RunOptions ro;
            ro.tracer = t;
            return run(st, model, K, ro);
          });
        },
        py::arg("model"), py::arg("u0"), py::arg("K"), py::arg("seed") = 0, py::arg("fixed") = false,
        py::arg("variant") = "conservative", py::arg("k0") = py::none(), py::arg("nu") = 1.1, py::arg("trace") = false,
        py::arg("reference") = py::none(), "K + 1 steps of the accelerated (or fixed-theta) coordinate method.");

  m.def("restart",
        [](const DualModel& model, const Vector& u0, std::int64_t outer, std::int64_t K, std::uint64_t seed,
           const std::string& variant, bool trace, std::optional<Reference> ref) {
          return traced(model, "ardca-restart", seed, ref, trace, [&](Tracer* t) {
            RestartPlan plan;
            plan.outer = outer;
            plan.inner_k = K;
            plan.variant = parse_variant(variant);
            ScheduleOptions so;
            so.seed = seed;
            so.stream_id = derive_stream("ardca-restart", seed);
            so.tracer = t;
            return restart_run(model, u0, plan, so);
          });
        },
        py::arg("model"), py::arg("u0"), py::arg("outer"), py::arg("K"), py::arg("seed") = 0,
        py::arg("variant") = "conservative", py::arg("trace") = false, py::arg("reference") = py::none());

  m.def("erm",
        [](const DualModel& model, const Vector& u0, std::int64_t K, std::optional<std::int64_t> k_prime, double eps,
           std::optional<double> M, std::uint64_t seed, bool trace, std::optional<Reference> ref) {
          return traced(model, "ardca-erm", seed, ref, trace, [&](Tracer* t) {
            ErmPlan plan;
            plan.K = K;
            plan.k_prime = k_prime;
            plan.eps = eps;
            plan.M = M;
            ScheduleOptions so;
            so.seed = seed;
            so.stream_id = derive_stream("ardca-erm", seed);
            so.tracer = t;
            return erm_run(model, u0, plan, so);
          });
        },
        py::arg("model"), py::arg("u0"), py::arg("K"), py::arg("k_prime") = py::none(), py::arg("eps") = 1e-3,
        py::arg("M") = py::none(), py::arg("seed") = 0, py::arg("trace") = false, py::arg("reference") = py::none());

  m.def("rdca",
        [](const DualModel& model, const Vector& u0, std::int64_t K, std::uint64_t seed, bool trace,
           std::optional<Reference> ref) {
          return traced(model, "rdca", seed, ref, trace, [&](Tracer* t) {
            return rdca_run(model, u0, K, BaselineOptions{seed, derive_stream("rdca", seed), t});
          });
        },
        py::arg("model"), py::arg("u0"), py::arg("K"), py::arg("seed") = 0, py::arg("trace") = false,
        py::arg("reference") = py::none());

  m.def("dga",
        [](const DualModel& model, const Vector& u0, std::int64_t K, bool trace, std::optional<Reference> ref) {
          return traced(model, "dga", 0, ref, trace,
                        [&](Tracer* t) { return dga_run(model, u0, K, BaselineOptions{0, 0, t}); });
        },
        py::arg("model"), py::arg("u0"), py::arg("K"), py::arg("trace") = false, py::arg("reference") = py::none());

  m.def("adfga",
        [](const DualModel& model, const Vector& u0, std::int64_t K, bool trace, std::optional<Reference> ref) {
          return traced(model, "adfga", 0, ref, trace, [&](Tracer* t) {
            return adfga_run(model, u0, K, K0Policy::checkpoint(), BaselineOptions{0, 0, t});
          });
        },
        py::arg("model"), py::arg("u0"), py::arg("K"), py::arg("trace") = false, py::arg("reference") = py::none());

  m.def("gen_instance",
        [](const std::string& kind, Index t, Index n, double mu, double lam, double tau, double sparsity,
           const std::string& noise, std::uint64_t seed) {
          InstanceConfig c;
          c.kind = parse_instance_kind(kind);
          c.t = t;
          c.n = n;
          c.mu = mu;
          c.lambda = lam;
          c.tau = tau;
          c.sparsity = sparsity;
          c.noise = parse_noise_kind(noise);
          c.seed = seed;
          const Instance inst = gen_instance(c);
          return py::make_tuple(inst.spec, inst.x_true, inst.noise);
        },
        py::arg("kind"), py::arg("t") = 1000, py::arg("n") = 200, py::arg("mu") = 0.1, py::arg("lam") = 1e-3,
        py::arg("tau") = 1e-3, py::arg("sparsity") = 0.1, py::arg("noise") = "auto", py::arg("seed") = 0,
        "Returns (spec, x_true, noise).");

  m.def("reference_optimum",
        [](const DualModel& model, std::int64_t passes, std::uint64_t seed) {
          const ReferenceResult r = reference_optimum(model, passes, seed);
          py::dict d;
          d["reference"] = r.ref;
          d["crosscheck_gap"] = r.crosscheck_gap;
          d["flagged"] = r.flagged;
          d["u_best"] = r.u_best;
          d["x_best"] = r.x_best;
          return d;
        },
        py::arg("model"), py::arg("passes"), py::arg("seed") = 0);

  m.def("solver_names", &solver_names);

  m.def("run_race",
        [](const DualModel& model, const std::vector<std::string>& solvers, std::int64_t passes,
           const std::vector<std::uint64_t>& seeds, std::optional<Reference> ref, unsigned jobs) {
          RaceOptions o;
          o.jobs = jobs;
          py::gil_scoped_release release;
          return run_race(model, solvers, passes, seeds, ref, o);
        },
        py::arg("model"), py::arg("solvers"), py::arg("passes"), py::arg("seeds"),
        py::arg("reference") = py::none(), py::arg("jobs") = 1);

  m.def("nearest_rank", &nearest_rank, py::arg("values"), py::arg("q"));
}
