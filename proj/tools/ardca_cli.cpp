// ardca_cli: instance generation, single solves, races and figure sweeps.

#include "ardca/bench.hpp"
#include "ardca/io.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace ardca;

namespace {

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string item;
  const auto num = [](const std::string& s) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw ConfigError("bad seed '" + s + "'");
    return static_cast<std::uint64_t>(v);
  };
  while (std::getline(ss, item, ',')) {
    const auto dots = item.find("..");
    if (dots == std::string::npos) {
      out.push_back(num(item));
      continue;
    }
    const auto lo = num(item.substr(0, dots)), hi = num(item.substr(dots + 2));
    if (hi < lo) throw ConfigError("empty seed range '" + item + "'");
    for (auto s = lo; s <= hi; ++s) out.push_back(s);
  }
  if (out.empty()) throw ConfigError("no seeds given");
  return out;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// Options shared by solve, race and the figure sweeps.
struct SolverFlags {
  std::string variant = "conservative";
  double nu = 1.1;
  std::int64_t k0 = 0;  // 0 = checkpoint rule
  std::int64_t inner_k = 0;  // 0 = 10 n_hat
  std::string kprime = "auto";
  double eps = 1e-3;
  double M = 0.0;  // 0 = from the losses
  bool no_timing = false;

  void attach(CLI::App* app) {
    app->add_option("--step-variant", variant, "Coordinate step: conservative (1/(2 n theta L)) or standard (1/(n theta L))")
        ->check(CLI::IsMember({"conservative", "standard"}));
    app->add_option("--nu", nu, "Averaging checkpoint factor");
    app->add_option("--k0", k0, "Explicit averaging start K0 (0 = checkpoint rule)");
    app->add_option("--inner-k", inner_k, "Restart period K (0 = 10 n_hat)");
    app->add_option("--kprime", kprime, "Warm-start length for ardca-erm: auto or a count");
    app->add_option("--eps", eps, "Target accuracy used by --kprime auto");
    app->add_option("--M", M, "Loss Lipschitz constant for --kprime auto (0 = from the losses)");
    app->add_flag("--no-timing", no_timing, "Write wall_ms as 0 so traces replay byte for byte");
  }

  RaceOptions resolve() const {
    RaceOptions o;
    o.variant = variant == "standard" ? StepVariant::standard : StepVariant::conservative;
    if (!(nu > 1.0)) throw ConfigError("--nu must exceed 1");
    o.nu = nu;
    if (k0 < 0) throw ConfigError("--k0 must be non-negative");
    if (k0 > 0) o.k0 = k0;
    if (inner_k < 0) throw ConfigError("--inner-k must be non-negative");
    if (inner_k > 0) o.inner_k = inner_k;
    if (kprime != "auto") {
      std::size_t used = 0;
      long long v = -1;
      try {
        v = std::stoll(kprime, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != kprime.size() || v < 0) throw ConfigError("--kprime must be auto or a count");
      o.kprime = v;
    }
    if (!(eps > 0.0)) throw ConfigError("--eps must be positive");
    o.eps = eps;
    if (M < 0.0) throw ConfigError("--M must be non-negative");
    if (M > 0.0) o.M = M;
    return o;
  }
};

void strip_timing(std::vector<TraceRecord>& table, bool no_timing) {
  if (!no_timing) return;
  for (auto& r : table) r.wall_ms = 0.0;
}

struct InstanceFlags {
  std::string kind = "l2_loss";
  Index t = 1000;
  Index n = 200;
  double mu = 0.1;
  double lambda = 1e-3;
  double tau = 1e-3;
  double sparsity = 0.1;
  std::string noise = "auto";
  double noise_fraction = 0.1;
  std::uint64_t seed = 0;

  void attach(CLI::App* app) {
    app->add_option("--kind", kind, "l2_loss | l1_loss | linf_constrained | svm | lad");
    app->add_option("--t", t, "Primal dimension");
    app->add_option("--n", n, "Number of samples");
    app->add_option("--mu", mu, "Strong convexity parameter");
    app->add_option("--lambda", lambda, "Regularization weight (l2_loss, l1_loss)");
    app->add_option("--tau", tau, "Noise amplitude; also the box half-width for linf_constrained");
    app->add_option("--sparsity", sparsity, "Fraction of nonzeros in the ground truth");
    app->add_option("--noise", noise, "auto | gaussian | sparse_gaussian | uniform | none");
    app->add_option("--noise-fraction", noise_fraction, "Nonzero fraction for sparse_gaussian noise");
    app->add_option("--seed", seed, "Instance seed");
  }

  InstanceConfig resolve() const {
    InstanceConfig c;
    c.kind = parse_instance_kind(kind);
    c.t = t;
    c.n = n;
    c.mu = mu;
    c.lambda = lambda;
    c.tau = tau;
    c.sparsity = sparsity;
    c.noise = parse_noise_kind(noise);
    c.noise_fraction = noise_fraction;
    c.seed = seed;
    c.validate();
    return c;
  }
};

void write_instance(const fs::path& dir, const InstanceConfig& cfg, const Instance& inst) {
  std::map<std::string, std::string> extra;
  extra["kind"] = to_string(cfg.kind);
  extra["gen_seed"] = std::to_string(cfg.seed);
  extra["gen_lambda"] = io::format_double(cfg.lambda);
  extra["gen_tau"] = io::format_double(cfg.tau);
  extra["gen_noise"] = to_string(cfg.effective_noise());
  io::write_problem(dir, inst.spec, extra);
  io::write_truth(dir, inst.x_true, inst.noise);
}

std::optional<Reference> load_reference(const fs::path& dir) {
  const auto r = io::read_reference(dir);
  if (!r) return std::nullopt;
  return r->ref;
}

io::StoredReference compute_reference(const DualModel& model, std::int64_t passes, std::uint64_t seed) {
  const ReferenceResult r = reference_optimum(model, passes, seed);
  if (r.flagged) {
    std::cerr << "warning: reference cross-check gap " << r.crosscheck_gap << " exceeds tolerance\n";
  }
  return {r.ref, r.crosscheck_gap, r.flagged};
}

// One figure: for every sweep value generate an instance, compute the
// reference, race the solvers and write trace + summary CSVs.
struct FigFlags {
  std::string out = "figs";
  Index t = 1000;
  Index n = 200;
  double mu = 0.1;
  std::int64_t passes = 200;
  std::string seeds = "1..5";
  std::uint64_t instance_seed = 0;
  std::int64_t budget_mult = 10;
  unsigned jobs = 1;
};

int repro_figure(int fig, const FigFlags& f, const SolverFlags& sf) {
  const std::vector<std::uint64_t> seeds = parse_seeds(f.seeds);
  RaceOptions base = sf.resolve();
  base.jobs = f.jobs;
  const std::vector<double> sweep = {1e-3, 1e-4, 1e-5};

  for (double value : sweep) {
    InstanceConfig cfg;
    cfg.t = f.t;
    cfg.n = f.n;
    cfg.mu = f.mu;
    cfg.seed = f.instance_seed;
    std::vector<std::string> solvers;
    std::string tag;
    switch (fig) {
      case 1:
        cfg.kind = InstanceKind::l2_loss;
        cfg.lambda = value;
        solvers = {"ardca-restart", "rdca", "adfga"};
        tag = "lambda";
        break;
      case 2:
        cfg.kind = InstanceKind::l1_loss;
        cfg.lambda = value;
        solvers = {"ardca", "ardca-na", "rdca", "adfga"};
        tag = "lambda";
        break;
      case 3:
        cfg.kind = InstanceKind::linf_constrained;
        cfg.tau = value;
        solvers = {"ardca", "ardca-na", "rdca", "adfga"};
        tag = "tau";
        break;
      default:
        cfg.kind = InstanceKind::lad;
        cfg.sparsity = 1.0;
        cfg.lambda = value;
        solvers = {"rdca", "adfga"};
        tag = "lambda";
        break;
    }
    // fig4 uses one LAD instance and sweeps the restart period.
    if (fig == 4 && value != sweep.front()) break;

    std::ostringstream name;
    name << "fig" << fig << "_" << (fig == 4 ? "lad" : tag + "_" + io::format_double(value));
    const fs::path dir = fs::path(f.out) / name.str();
    const Instance inst = gen_instance(cfg);
    write_instance(dir / "instance", cfg, inst);
    const DualModel model = build_dual(inst.spec);
    const io::StoredReference ref = compute_reference(model, f.budget_mult * f.passes, f.instance_seed);
    io::write_reference(dir / "instance", ref);

    std::vector<TraceRecord> table = run_race(model, solvers, f.passes, seeds, ref.ref, base);
    if (fig == 4) {
      for (std::int64_t mult : {2, 10, 40, 80}) {
        RaceOptions o = base;
        o.inner_k = mult * model.n_hat();
        auto part = run_race(model, {"ardca-restart"}, f.passes, seeds, ref.ref, o);
        for (auto& r : part) r.solver = "ardca-restart-k" + std::to_string(mult) + "n";
        table.insert(table.end(), part.begin(), part.end());
      }
    }
    strip_timing(table, sf.no_timing);
    write_trace_csv(dir / "trace.csv", table);
    write_summary_csv(dir / "summary.csv", summarize(table, "primal_gap"));
    std::cout << "wrote " << (dir / "trace.csv").string() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Accelerated randomized dual coordinate ascent: solver and benchmark tool"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);

  // gen
  InstanceFlags gen_flags;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic instance bundle");
  gen_flags.attach(gen);
  gen->add_option("--out", gen_out, "Output directory")->required();

  // solve
  std::string solve_instance, solve_solver = "ardca", solve_trace;
  std::int64_t solve_passes = 200;
  std::uint64_t solve_seed = 0;
  SolverFlags solve_flags;
  auto* solve = app.add_subcommand("solve", "Run one solver on an instance");
  solve->add_option("--instance", solve_instance, "Instance directory")->required();
  solve->add_option("--solver", solve_solver, "ardca | ardca-na | ardca-restart | rdca | adfga | dga | ardca-erm");
  solve->add_option("--passes", solve_passes, "Pass budget");
  solve->add_option("--seed", solve_seed, "Solver seed");
  solve->add_option("--trace", solve_trace, "Trace CSV output (default: stdout)");
  solve_flags.attach(solve);

  // race
  std::string race_instance, race_solvers = "ardca,ardca-restart,rdca,adfga", race_seeds = "1..5", race_out,
                             race_summary;
  std::int64_t race_passes = 200;
  unsigned race_jobs = 1;
  SolverFlags race_flags;
  auto* race = app.add_subcommand("race", "Race several solvers over several seeds");
  race->add_option("--instance", race_instance, "Instance directory")->required();
  race->add_option("--solvers", race_solvers, "Comma-separated solver list");
  race->add_option("--passes", race_passes, "Pass budget");
  race->add_option("--seeds", race_seeds, "Seeds, e.g. 1..5 or 1,4,9");
  race->add_option("--out", race_out, "Trace CSV output")->required();
  race->add_option("--summary", race_summary, "Optional per-pass primal-gap quantiles CSV");
  race->add_option("--jobs", race_jobs, "Worker threads");
  race_flags.attach(race);

  // reference
  std::string ref_instance;
  std::int64_t ref_mult = 10, ref_passes = 200;
  std::uint64_t ref_seed = 0;
  auto* reference = app.add_subcommand("reference", "Estimate and store F_star / D_star");
  reference->add_option("--instance", ref_instance, "Instance directory")->required();
  reference->add_option("--budget-mult", ref_mult, "Multiple of the race budget");
  reference->add_option("--passes", ref_passes, "Race pass budget the multiple applies to");
  reference->add_option("--seed", ref_seed, "Seed of the reference solves");

  // repro-fig1..4
  FigFlags fig_flags[4];
  SolverFlags fig_solver_flags[4];
  CLI::App* figs[4];
  const char* fig_help[4] = {"Problem (l2 loss) lambda sweep: restart vs RDCA vs ADFGA",
                             "Problem (l1 loss) lambda sweep: averaged vs last iterate vs RDCA vs ADFGA",
                             "Box-constrained problem tau sweep: ARDCA vs RDCA vs ADFGA",
                             "Smooth-f LAD: restart periods {2,10,40,80} n vs RDCA vs ADFGA"};
  for (int i = 0; i < 4; ++i) {
    figs[i] = app.add_subcommand("repro-fig" + std::to_string(i + 1), fig_help[i]);
    FigFlags& f = fig_flags[i];
    figs[i]->add_option("--out", f.out, "Output directory");
    figs[i]->add_option("--t", f.t, "Primal dimension");
    figs[i]->add_option("--n", f.n, "Number of samples");
    figs[i]->add_option("--mu", f.mu, "Strong convexity parameter");
    figs[i]->add_option("--passes", f.passes, "Pass budget");
    figs[i]->add_option("--seeds", f.seeds, "Solver seeds");
    figs[i]->add_option("--instance-seed", f.instance_seed, "Instance seed");
    figs[i]->add_option("--budget-mult", f.budget_mult, "Reference budget multiple");
    figs[i]->add_option("--jobs", f.jobs, "Worker threads");
    fig_solver_flags[i].attach(figs[i]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*gen) {
      const InstanceConfig cfg = gen_flags.resolve();
      const Instance inst = gen_instance(cfg);
      write_instance(gen_out, cfg, inst);
      std::cout << "wrote " << gen_out << '\n';
      return 0;
    }
    if (*solve) {
      if (solve_passes < 1) throw ConfigError("--passes must be positive");
      const RaceOptions opts = solve_flags.resolve();
      const DualModel model = build_dual(io::read_problem(solve_instance));
      auto table = run_solver(model, solve_solver, solve_passes, solve_seed, load_reference(solve_instance), opts);
      strip_timing(table, solve_flags.no_timing);
      if (solve_trace.empty()) {
        write_trace_csv(std::cout, table);
      } else {
        write_trace_csv(solve_trace, table);
      }
      if (!table.empty() && table.back().status == "abort") {
        std::cerr << "numeric abort\n";
        return 2;
      }
      return 0;
    }
    if (*race) {
      if (race_passes < 1) throw ConfigError("--passes must be positive");
      RaceOptions opts = race_flags.resolve();
      opts.jobs = race_jobs;
      const auto solvers = split_list(race_solvers);
      const auto seeds = parse_seeds(race_seeds);
      const DualModel model = build_dual(io::read_problem(race_instance));
      auto table = run_race(model, solvers, race_passes, seeds, load_reference(race_instance), opts);
      strip_timing(table, race_flags.no_timing);
      write_trace_csv(race_out, table);
      if (!race_summary.empty()) write_summary_csv(race_summary, summarize(table, "primal_gap"));
      bool aborted = false;
      for (const auto& r : table) aborted = aborted || r.status == "abort";
      if (aborted) {
        std::cerr << "numeric abort in at least one run\n";
        return 2;
      }
      return 0;
    }
    if (*reference) {
      if (ref_mult < 1 || ref_passes < 1) throw ConfigError("--budget-mult and --passes must be positive");
      const DualModel model = build_dual(io::read_problem(ref_instance));
      const io::StoredReference r = compute_reference(model, ref_mult * ref_passes, ref_seed);
      io::write_reference(ref_instance, r);
      std::cout << "F_star=" << io::format_double(r.ref.F_star) << " D_star=" << io::format_double(r.ref.D_star)
                << '\n';
      return 0;
    }
    for (int i = 0; i < 4; ++i) {
      if (*figs[i]) return repro_figure(i + 1, fig_flags[i], fig_solver_flags[i]);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
