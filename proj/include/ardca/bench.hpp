#pragma once

#include "ardca/baselines.hpp"
#include "ardca/schedules.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ardca {

enum class InstanceKind { l2_loss, l1_loss, linf_constrained, svm, lad };
enum class NoiseKind { automatic, gaussian, sparse_gaussian, uniform, none };

InstanceKind parse_instance_kind(const std::string& name);
std::string to_string(InstanceKind kind);
NoiseKind parse_noise_kind(const std::string& name);
std::string to_string(NoiseKind kind);

/// Synthetic instance recipe.
///
///   l2_loss           lambda (||x||_1 + mu/2 ||x||^2) + ||A^T x - b||^2 / (2n)
///   l1_loss           lambda (||x||_1 + mu/2 ||x||^2) + ||A^T x - b||_1 / n
///   linf_constrained  ||x||_1 + mu/2 ||x||^2  s.t.  |A^T x - b| <= tau
///   svm               mu/2 ||x||^2 + (1/n) sum max(0, 1 - l_i A_i^T x)
///   lad               mu/2 ||x||^2 + ||A^T x - b||_1 / n
///
/// Noise amplitude is tau (a standard deviation for the Gaussian models).
/// `automatic` picks gaussian, sparse_gaussian, uniform, gaussian, sparse_gaussian
/// for the kinds in the order above.
struct InstanceConfig {
  InstanceKind kind = InstanceKind::l2_loss;
  Index t = 1000;
  Index n = 200;
  double mu = 0.1;
  double lambda = 1e-3;
  double tau = 1e-3;
  double sparsity = 0.1;
  NoiseKind noise = NoiseKind::automatic;
  double noise_fraction = 0.1;  // sparse_gaussian: fraction of nonzero noise entries
  std::uint64_t seed = 0;

  void validate() const;
  NoiseKind effective_noise() const;
};

struct Instance {
  ProblemSpec spec;
  Vector x_true;
  Vector noise;
};

Instance gen_instance(const InstanceConfig& cfg);

struct ReferenceResult {
  Reference ref;
  double crosscheck_gap = 0.0;  // |F(best primal) - F_star|
  bool flagged = false;         // crosscheck_gap > 1e-4 (1 + |F_star|)
  Vector u_best;
  Vector x_best;
};

/// Best dual value seen by restarted ARDCA (restart period doubling from
/// 10 n_hat) and ADFGA, each given `passes` passes. F_star = -D_star.
ReferenceResult reference_optimum(const DualModel& model, std::int64_t passes,
                                  std::uint64_t seed = 0);

/// Solver names: ardca, ardca-na, ardca-restart, rdca, adfga, dga, ardca-erm.
const std::vector<std::string>& solver_names();

struct RaceOptions {
  StepVariant variant = StepVariant::conservative;
  double nu = 1.1;
  std::optional<std::int64_t> k0;       // explicit K0 for ardca / ardca-na
  std::optional<std::int64_t> inner_k;  // restart period, default 10 n_hat
  std::optional<std::int64_t> kprime;   // ardca-erm warm start, default automatic
  double eps = 1e-3;                    // ardca-erm
  std::optional<double> M;              // ardca-erm
  unsigned jobs = 1;
};

/// stream id of a (solver, seed) pair: fnv1a64(solver) ^ seed.
std::uint64_t derive_stream(const std::string& solver, std::uint64_t seed);

/// Runs one solver for `passes` passes and returns its trace (records past the
/// budget are dropped). A numeric abort yields the truncated trace with the
/// last record's status set to "abort".
std::vector<TraceRecord> run_solver(const DualModel& model, const std::string& solver,
                                    std::int64_t passes, std::uint64_t seed,
                                    const std::optional<Reference>& reference,
                                    const RaceOptions& options = {});

/// Every (solver, seed) pair, sorted by solver, seed, pass.
std::vector<TraceRecord> run_race(const DualModel& model, const std::vector<std::string>& solvers,
                                  std::int64_t passes, const std::vector<std::uint64_t>& seeds,
                                  const std::optional<Reference>& reference,
                                  const RaceOptions& options = {});

struct SummaryRow {
  std::string solver;
  double pass = 0.0;
  std::size_t count = 0;
  double q10 = 0.0, q25 = 0.0, median = 0.0, q75 = 0.0, q90 = 0.0;
};

/// Nearest-rank quantile: the ceil(q N)-th smallest value (the first for q = 0).
double nearest_rank(std::vector<double> values, double q);

/// Quantiles of `metric` (any numeric TraceRecord column) per solver and pass.
std::vector<SummaryRow> summarize(const std::vector<TraceRecord>& table,
                                  const std::string& metric = "primal_gap");

double trace_metric(const TraceRecord& r, const std::string& metric);

extern const char* const kTraceHeader;
void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& table);
void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRecord>& table);
std::vector<TraceRecord> parse_trace_csv(std::istream& in);
std::vector<TraceRecord> read_trace_csv(const std::filesystem::path& path);

void write_summary_csv(const std::filesystem::path& path, const std::vector<SummaryRow>& rows);

}  // namespace ardca
