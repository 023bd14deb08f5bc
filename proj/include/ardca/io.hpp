#pragma once

#include "ardca/dual_model.hpp"
#include "ardca/trace.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace ardca::io {

/// "%.17g", enough digits for an exact double round trip.
std::string format_double(double v);
/// Accepts everything format_double produces plus inf/nan spellings.
double parse_double(const std::string& text);

/// One CSV line per matrix row. A vector is written as a single column.
void write_matrix_csv(const std::filesystem::path& path, const Matrix& M);
Matrix read_matrix_csv(const std::filesystem::path& path, Index rows, Index cols);
void write_vector_csv(const std::filesystem::path& path, const Vector& v);
Vector read_vector_csv(const std::filesystem::path& path, Index size);

/// key=value lines; '#' starts a comment line.
using Manifest = std::map<std::string, std::string>;
void write_manifest(const std::filesystem::path& path, const Manifest& m);
Manifest read_manifest(const std::filesystem::path& path);

/// Problem bundle: manifest.txt plus A.csv, B.csv, b.csv, J.csv, q.csv and
/// losses.csv (rows "kind,param" with param the offset or the label).
/// Empty blocks have no file.
void write_problem(const std::filesystem::path& dir, const ProblemSpec& spec,
                   const std::map<std::string, std::string>& extra = {});
ProblemSpec read_problem(const std::filesystem::path& dir);

/// Ground-truth sidecar (truth_x.csv, truth_w.csv).
void write_truth(const std::filesystem::path& dir, const Vector& x, const Vector& w);

/// reference.txt beside the bundle.
struct StoredReference {
  Reference ref;
  double crosscheck_gap = 0.0;
  bool flagged = false;
};
void write_reference(const std::filesystem::path& dir, const StoredReference& r);
std::optional<StoredReference> read_reference(const std::filesystem::path& dir);

}  // namespace ardca::io
