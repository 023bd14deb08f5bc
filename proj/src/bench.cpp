#include "ardca/bench.hpp"

#include "ardca/io.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>

namespace ardca {

namespace {

struct KindName {
  InstanceKind kind;
  const char* name;
};
constexpr KindName kKinds[] = {{InstanceKind::l2_loss, "l2_loss"},
                               {InstanceKind::l1_loss, "l1_loss"},
                               {InstanceKind::linf_constrained, "linf_constrained"},
                               {InstanceKind::svm, "svm"},
                               {InstanceKind::lad, "lad"}};

struct NoiseName {
  NoiseKind kind;
  const char* name;
};
constexpr NoiseName kNoises[] = {{NoiseKind::automatic, "auto"},
                                 {NoiseKind::gaussian, "gaussian"},
                                 {NoiseKind::sparse_gaussian, "sparse_gaussian"},
                                 {NoiseKind::uniform, "uniform"},
                                 {NoiseKind::none, "none"}};

}  // namespace

InstanceKind parse_instance_kind(const std::string& name) {
  for (const auto& k : kKinds) {
    if (name == k.name) return k.kind;
  }
  throw ConfigError("unknown instance kind '" + name + "'");
}

std::string to_string(InstanceKind kind) {
  for (const auto& k : kKinds) {
    if (kind == k.kind) return k.name;
  }
  return "?";
}

NoiseKind parse_noise_kind(const std::string& name) {
  for (const auto& k : kNoises) {
    if (name == k.name) return k.kind;
  }
  throw ConfigError("unknown noise model '" + name + "'");
}

std::string to_string(NoiseKind kind) {
  for (const auto& k : kNoises) {
    if (kind == k.kind) return k.name;
  }
  return "?";
}

void InstanceConfig::validate() const {
  if (t < 1 || n < 1) throw ConfigError("instance: t and n must be positive");
  if (!(mu > 0.0)) throw ConfigError("instance: mu must be positive");
  if (!(sparsity > 0.0 && sparsity <= 1.0)) throw ConfigError("instance: sparsity must lie in (0, 1]");
  if (!(tau >= 0.0)) throw ConfigError("instance: tau must be non-negative");
  if (kind == InstanceKind::linf_constrained && !(tau > 0.0)) {
    throw ConfigError("instance: linf_constrained needs tau > 0");
  }
  if ((kind == InstanceKind::l2_loss || kind == InstanceKind::l1_loss) && !(lambda > 0.0)) {
    throw ConfigError("instance: lambda must be positive");
  }
  if (!(noise_fraction >= 0.0 && noise_fraction <= 1.0)) {
    throw ConfigError("instance: noise fraction must lie in [0, 1]");
  }
}

NoiseKind InstanceConfig::effective_noise() const {
  if (noise != NoiseKind::automatic) return noise;
  switch (kind) {
    case InstanceKind::l2_loss:
    case InstanceKind::svm: return NoiseKind::gaussian;
    case InstanceKind::l1_loss:
    case InstanceKind::lad: return NoiseKind::sparse_gaussian;
    case InstanceKind::linf_constrained: return NoiseKind::uniform;
  }
  return NoiseKind::none;
}

namespace {

// First k entries of a uniformly random permutation of 0..n-1.
std::vector<Index> choose(RngStream& rng, Index n, Index k) {
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  for (Index i = 0; i < k; ++i) {
    const Index j = i + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n - i)));
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }
  idx.resize(static_cast<std::size_t>(k));
  return idx;
}

}  // namespace

Instance gen_instance(const InstanceConfig& cfg) {
  cfg.validate();
  RngStream rng(cfg.seed, fnv1a64("instance"));
  const Index t = cfg.t, n = cfg.n;

  Matrix A(t, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < t; ++i) A(i, j) = rng.uniform();
    const double norm = A.col(j).norm();
    if (norm == 0.0) throw NumericError("gen_instance: drew an all-zero column");
    A.col(j) /= norm;
  }

  Vector x = Vector::Zero(t);
  const Index nnz = std::max<Index>(1, static_cast<Index>(std::floor(static_cast<double>(t) * cfg.sparsity)));
  for (Index i : choose(rng, t, nnz)) x[i] = rng.normal();

  Vector w = Vector::Zero(n);
  switch (cfg.effective_noise()) {
    case NoiseKind::gaussian:
      for (Index i = 0; i < n; ++i) w[i] = cfg.tau * rng.normal();
      break;
    case NoiseKind::sparse_gaussian: {
      const Index k = static_cast<Index>(std::floor(static_cast<double>(n) * cfg.noise_fraction));
      for (Index i : choose(rng, n, k)) w[i] = cfg.tau * rng.normal();
      break;
    }
    case NoiseKind::uniform:
      for (Index i = 0; i < n; ++i) w[i] = rng.uniform(-cfg.tau, cfg.tau);
      break;
    case NoiseKind::none:
    case NoiseKind::automatic:
      break;
  }
  const Vector b = A.transpose() * x + w;

  Instance inst;
  inst.x_true = x;
  inst.noise = w;
  ProblemSpec& s = inst.spec;
  s.B = Matrix(0, t);
  s.b = Vector(0);
  s.J = Matrix(0, t);
  s.q = Vector(0);
  switch (cfg.kind) {
    case InstanceKind::l2_loss:
    case InstanceKind::l1_loss:
      s.A = A;
      s.reg = Regularizer::l1_plus_l2(cfg.lambda * cfg.mu, cfg.lambda);
      for (Index i = 0; i < n; ++i) {
        s.losses.push_back(cfg.kind == InstanceKind::l2_loss ? Loss::squared(b[i]) : Loss::absolute(b[i]));
      }
      break;
    case InstanceKind::lad:
      s.A = A;
      s.reg = Regularizer::l2(cfg.mu);
      for (Index i = 0; i < n; ++i) s.losses.push_back(Loss::absolute(b[i]));
      break;
    case InstanceKind::svm:
      // Labels folded into the data: A~_i = l_i A_i with the +1 hinge.
      s.A = A;
      for (Index i = 0; i < n; ++i) {
        if (b[i] < 0.0) s.A.col(i) *= -1.0;
        s.losses.push_back(Loss::hinge(1.0));
      }
      s.reg = Regularizer::l2(cfg.mu);
      break;
    case InstanceKind::linf_constrained: {
      s.A = Matrix(t, 0);
      s.reg = Regularizer::l1_plus_l2(cfg.mu, 1.0);
      s.J.resize(2 * n, t);
      s.J.topRows(n) = A.transpose();
      s.J.bottomRows(n) = -A.transpose();
      s.q.resize(2 * n);
      s.q.head(n) = -b.array() - cfg.tau;
      s.q.tail(n) = b.array() - cfg.tau;
      break;
    }
  }
  s.validate();
  return inst;
}

ReferenceResult reference_optimum(const DualModel& model, std::int64_t passes, std::uint64_t seed) {
  if (passes < 1) throw ConfigError("reference: pass budget must be positive");
  const Index nh = model.n_hat();
  const Vector u0 = Vector::Zero(nh);

  ReferenceResult best;
  double D_best = kInfinity;
  std::vector<Vector> primals;
  const auto offer = [&](const Vector& u) {
    const double D = dual_value(model, u);
    if (D < D_best) {
      D_best = D;
      best.u_best = u;
    }
  };

  // Restarted ARDCA with a doubling period 10 n_hat, 20 n_hat, ... so that
  // ill-conditioned instances eventually get a long enough inner run.
  const std::int64_t budget = passes * static_cast<std::int64_t>(nh);
  std::int64_t used = 0;
  std::int64_t period = 10 * static_cast<std::int64_t>(nh);
  Vector u = u0;
  for (std::uint64_t run_index = 0; budget - used >= 2; ++run_index) {
    RestartPlan plan;
    plan.inner_k = std::min(period, budget - used - 1);
    ScheduleOptions so;
    so.seed = seed;
    so.stream_id = derive_stream("reference", seed) + run_index;
    const SolveReport r = restart_run(model, u, plan, so);
    offer(r.u_final);
    primals.push_back(r.x_avg);
    u = r.u_final;
    used += plan.inner_k + 1;
    period *= 2;
  }

  const SolveReport fg = adfga_run(model, u0, passes);
  offer(fg.u_final);
  primals.push_back(fg.x_avg);

  if (!std::isfinite(D_best)) throw NumericError("reference: no finite dual value observed");
  best.ref.D_star = D_best;
  best.ref.F_star = -D_best;
  double F_best = kInfinity;
  for (const Vector& x : primals) {
    const double F = primal_value_and_residuals(*model.spec, x).objective;
    if (F < F_best) {
      F_best = F;
      best.x_best = x;
    }
  }
  best.crosscheck_gap = std::abs(F_best - best.ref.F_star);
  best.flagged = best.crosscheck_gap > 1e-4 * (1.0 + std::abs(best.ref.F_star));
  return best;
}

const std::vector<std::string>& solver_names() {
  static const std::vector<std::string> names = {"ardca", "ardca-na", "ardca-restart", "rdca",
                                                 "adfga", "dga", "ardca-erm"};
  return names;
}

std::uint64_t derive_stream(const std::string& solver, std::uint64_t seed) {
  return fnv1a64(solver) ^ seed;
}

std::vector<TraceRecord> run_solver(const DualModel& model, const std::string& solver,
                                    std::int64_t passes, std::uint64_t seed,
                                    const std::optional<Reference>& reference,
                                    const RaceOptions& options) {
  if (passes < 1) throw ConfigError("race: pass budget must be positive");
  if (std::find(solver_names().begin(), solver_names().end(), solver) == solver_names().end()) {
    throw ConfigError("unknown solver '" + solver + "'");
  }
  const std::int64_t nh = model.n_hat();
  const std::int64_t budget = passes * nh;  // coordinate steps
  const Vector u0 = Vector::Zero(nh);
  const std::uint64_t stream = derive_stream(solver, seed);
  Tracer tracer(model, solver, seed, reference);

  try {
    if (solver == "ardca" || solver == "ardca-na") {
      EngineOptions eo;
      eo.variant = options.variant;
      eo.k0 = options.k0 ? K0Policy::fixed(*options.k0, options.nu) : K0Policy::checkpoint(options.nu);
      eo.seed = seed;
      eo.stream_id = stream;
      EngineState st = init(model, u0, eo);
      RunOptions ro;
      ro.tracer = &tracer;
      ro.report = solver == "ardca" ? PrimalChoice::averaged : PrimalChoice::last;
      run(st, model, budget - 1, ro);
    } else if (solver == "ardca-restart") {
      RestartPlan plan;
      plan.inner_k = options.inner_k.value_or(10 * nh);
      if (plan.inner_k < 1) throw ConfigError("race: inner K must be positive");
      plan.outer = std::max<std::int64_t>(1, (budget + plan.inner_k) / (plan.inner_k + 1));
      plan.variant = options.variant;
      plan.k0 = K0Policy::checkpoint(options.nu);
      ScheduleOptions so;
      so.seed = seed;
      so.stream_id = stream;
      so.tracer = &tracer;
      restart_run(model, u0, plan, so);
    } else if (solver == "rdca") {
      BaselineOptions bo{seed, stream, &tracer};
      rdca_run(model, u0, budget - 1, bo);
    } else if (solver == "adfga") {
      BaselineOptions bo{seed, stream, &tracer};
      adfga_run(model, u0, passes, K0Policy::checkpoint(options.nu), bo);
    } else if (solver == "dga") {
      BaselineOptions bo{seed, stream, &tracer};
      dga_run(model, u0, passes, bo);
    } else {  // ardca-erm
      ErmPlan plan;
      plan.k_prime = options.kprime;
      plan.eps = options.eps;
      plan.M = options.M;
      plan.variant = options.variant;
      plan.k0 = K0Policy::checkpoint(options.nu);
      if (!plan.k_prime) {
        // Resolve the automatic K' here so the phase-2 budget can be sized.
        const double M = plan.M.value_or([&] {
          double m = 0.0;
          for (const Loss& l : model.spec->losses) m = std::max(m, l.lipschitz());
          return m;
        }());
        if (!std::isfinite(M)) throw ConfigError("ardca-erm: losses are not Lipschitz; pass M or K'");
        const Vector x0 = primal_from_dual(model, Vector::Zero(model.dim()));
        const double gap0 = dual_value(model, u0) + primal_value_and_residuals(*model.spec, x0).objective;
        plan.k_prime = kprime_formula(model.n, model.mu, M, plan.eps, gap0).count;
      }
      const std::int64_t phase1 = *plan.k_prime > 0 ? *plan.k_prime + 1 : 0;
      plan.K = std::max<std::int64_t>(1, budget - phase1 - 1);
      ScheduleOptions so;
      so.seed = seed;
      so.stream_id = stream;
      so.tracer = &tracer;
      erm_run(model, u0, plan, so);
    }
  } catch (const NumericError&) {
    tracer.mark_status("abort");
  }

  std::vector<TraceRecord> out = tracer.take();
  const double limit = static_cast<double>(passes) + 1e-9;
  if (!out.empty() && out.back().status == "abort") return out;
  out.erase(std::remove_if(out.begin(), out.end(), [&](const TraceRecord& r) { return r.pass > limit; }),
            out.end());
  return out;
}

std::vector<TraceRecord> run_race(const DualModel& model, const std::vector<std::string>& solvers,
                                  std::int64_t passes, const std::vector<std::uint64_t>& seeds,
                                  const std::optional<Reference>& reference,
                                  const RaceOptions& options) {
  if (solvers.empty() || seeds.empty()) throw ConfigError("race: need at least one solver and seed");
  for (const auto& s : solvers) {
    if (std::find(solver_names().begin(), solver_names().end(), s) == solver_names().end()) {
      throw ConfigError("unknown solver '" + s + "'");
    }
  }
  struct Job {
    std::string solver;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (const auto& s : solvers) {
    for (auto seed : seeds) jobs.push_back({s, seed});
  }
  std::vector<std::vector<TraceRecord>> results(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t j = next++; j < jobs.size(); j = next++) {
      try {
        results[j] = run_solver(model, jobs[j].solver, passes, jobs[j].seed, reference, options);
      } catch (...) {
        errors[j] = std::current_exception();
      }
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(options.jobs, static_cast<unsigned>(jobs.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  std::vector<TraceRecord> table;
  for (auto& r : results) table.insert(table.end(), r.begin(), r.end());
  std::stable_sort(table.begin(), table.end(), [](const TraceRecord& a, const TraceRecord& b) {
    if (a.solver != b.solver) return a.solver < b.solver;
    if (a.seed != b.seed) return a.seed < b.seed;
    return a.pass < b.pass;
  });
  return table;
}

double nearest_rank(std::vector<double> values, double q) {
  if (values.empty()) throw ConfigError("quantile of an empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("quantile level must lie in [0, 1]");
  std::sort(values.begin(), values.end());
  const auto N = static_cast<double>(values.size());
  const auto rank = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(q * N)));
  return values[rank - 1];
}

double trace_metric(const TraceRecord& r, const std::string& metric) {
  if (metric == "primal_obj") return r.primal_obj;
  if (metric == "dual_obj") return r.dual_obj;
  if (metric == "primal_gap") return r.primal_gap;
  if (metric == "dual_gap") return r.dual_gap;
  if (metric == "eq_violation") return r.eq_violation;
  if (metric == "ineq_violation") return r.ineq_violation;
  if (metric == "wall_ms") return r.wall_ms;
  if (metric == "pass") return r.pass;
  throw ConfigError("unknown trace metric '" + metric + "'");
}

std::vector<SummaryRow> summarize(const std::vector<TraceRecord>& table, const std::string& metric) {
  if (table.empty()) throw ConfigError("summarize: empty table");
  std::map<std::pair<std::string, double>, std::vector<double>> groups;
  for (const auto& r : table) groups[{r.solver, r.pass}].push_back(trace_metric(r, metric));
  std::vector<SummaryRow> out;
  for (const auto& [key, vals] : groups) {
    SummaryRow row;
    row.solver = key.first;
    row.pass = key.second;
    row.count = vals.size();
    row.q10 = nearest_rank(vals, 0.10);
    row.q25 = nearest_rank(vals, 0.25);
    row.median = nearest_rank(vals, 0.50);
    row.q75 = nearest_rank(vals, 0.75);
    row.q90 = nearest_rank(vals, 0.90);
    out.push_back(row);
  }
  return out;
}

const char* const kTraceHeader =
    "solver,seed,pass,primal_obj,dual_obj,primal_gap,dual_gap,eq_violation,ineq_violation,wall_ms,status";

void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& table) {
  using io::format_double;
  out << kTraceHeader << '\n';
  for (const auto& r : table) {
    out << r.solver << ',' << r.seed << ',' << format_double(r.pass) << ',' << format_double(r.primal_obj)
        << ',' << format_double(r.dual_obj) << ',' << format_double(r.primal_gap) << ','
        << format_double(r.dual_gap) << ',' << format_double(r.eq_violation) << ','
        << format_double(r.ineq_violation) << ',' << format_double(r.wall_ms) << ',' << r.status << '\n';
  }
}

void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRecord>& table) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  write_trace_csv(out, table);
}

std::vector<TraceRecord> parse_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kTraceHeader) throw ConfigError("trace CSV: bad header");
  std::vector<TraceRecord> out;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 11) throw ConfigError("trace CSV: line " + std::to_string(lineno) + " has wrong arity");
    TraceRecord r;
    r.solver = f[0];
    try {
      std::size_t used = 0;
      r.seed = std::stoull(f[1], &used);
      if (used != f[1].size()) throw ConfigError("seed");
    } catch (const std::exception&) {
      throw ConfigError("trace CSV: bad seed on line " + std::to_string(lineno));
    }
    r.pass = io::parse_double(f[2]);
    r.primal_obj = io::parse_double(f[3]);
    r.dual_obj = io::parse_double(f[4]);
    r.primal_gap = io::parse_double(f[5]);
    r.dual_gap = io::parse_double(f[6]);
    r.eq_violation = io::parse_double(f[7]);
    r.ineq_violation = io::parse_double(f[8]);
    r.wall_ms = io::parse_double(f[9]);
    r.status = f[10];
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<TraceRecord> read_trace_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  return parse_trace_csv(in);
}

void write_summary_csv(const std::filesystem::path& path, const std::vector<SummaryRow>& rows) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << "solver,pass,count,q10,q25,median,q75,q90\n";
  for (const auto& r : rows) {
    out << r.solver << ',' << io::format_double(r.pass) << ',' << r.count << ','
        << io::format_double(r.q10) << ',' << io::format_double(r.q25) << ','
        << io::format_double(r.median) << ',' << io::format_double(r.q75) << ','
        << io::format_double(r.q90) << '\n';
  }
}

}  // namespace ardca
