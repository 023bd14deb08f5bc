#include "ardca/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace fs = std::filesystem;

namespace ardca::io {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& text) {
  std::size_t a = 0, b = text.size();
  while (a < b && std::isspace(static_cast<unsigned char>(text[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(text[b - 1]))) --b;
  const std::string s = text.substr(a, b - a);
  if (s.empty()) throw ConfigError("empty numeric field");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size()) throw ConfigError("malformed number '" + s + "'");
  return v;
}

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  return in;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

void write_matrix_csv(const fs::path& path, const Matrix& M) {
  auto out = open_out(path);
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j) {
      if (j) out << ',';
      out << format_double(M(i, j));
    }
    out << '\n';
  }
}

Matrix read_matrix_csv(const fs::path& path, Index rows, Index cols) {
  auto in = open_in(path);
  Matrix M(rows, cols);
  std::string line;
  Index i = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (i >= rows) throw ConfigError(path.string() + ": more than " + std::to_string(rows) + " rows");
    const auto fields = split(line, ',');
    if (static_cast<Index>(fields.size()) != cols) {
      throw ConfigError(path.string() + ": row " + std::to_string(i) + " has " +
                        std::to_string(fields.size()) + " fields, expected " + std::to_string(cols));
    }
    for (Index j = 0; j < cols; ++j) M(i, j) = parse_double(fields[static_cast<std::size_t>(j)]);
    ++i;
  }
  if (i != rows) throw ConfigError(path.string() + ": expected " + std::to_string(rows) + " rows");
  return M;
}

void write_vector_csv(const fs::path& path, const Vector& v) { write_matrix_csv(path, v); }

Vector read_vector_csv(const fs::path& path, Index size) {
  return read_matrix_csv(path, size, 1).col(0);
}

void write_manifest(const fs::path& path, const Manifest& m) {
  auto out = open_out(path);
  for (const auto& [k, v] : m) out << k << '=' << v << '\n';
}

Manifest read_manifest(const fs::path& path) {
  auto in = open_in(path);
  Manifest m;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(path.string() + ": bad manifest line '" + line + "'");
    m[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return m;
}

namespace {

const std::string& need(const Manifest& m, const std::string& key) {
  const auto it = m.find(key);
  if (it == m.end()) throw ConfigError("manifest lacks key '" + key + "'");
  return it->second;
}

Index need_index(const Manifest& m, const std::string& key) {
  const double v = parse_double(need(m, key));
  if (v < 0 || v != std::floor(v)) throw ConfigError("manifest key '" + key + "' must be a count");
  return static_cast<Index>(v);
}

const char* loss_name(Loss::Kind k) {
  switch (k) {
    case Loss::Kind::squared: return "squared";
    case Loss::Kind::absolute: return "absolute";
    case Loss::Kind::hinge: return "hinge";
  }
  return "?";
}

}  // namespace

void write_problem(const fs::path& dir, const ProblemSpec& spec,
                   const std::map<std::string, std::string>& extra) {
  spec.validate();
  fs::create_directories(dir);
  Manifest m = extra;
  m["format"] = "ardca-problem-1";
  m["t"] = std::to_string(spec.dim());
  m["n"] = std::to_string(spec.num_samples());
  m["p"] = std::to_string(spec.num_eq());
  m["m"] = std::to_string(spec.num_ineq());
  m["reg"] = spec.reg.kind == Regularizer::Kind::l2 ? "l2" : "l1_plus_l2";
  m["mu"] = format_double(spec.reg.mu);
  m["sigma"] = format_double(spec.reg.sigma);
  if (spec.num_samples() > 0) {
    write_matrix_csv(dir / "A.csv", spec.A);
    m["A"] = "A.csv";
    auto out = open_out(dir / "losses.csv");
    for (const Loss& l : spec.losses) {
      out << loss_name(l.kind) << ','
          << format_double(l.kind == Loss::Kind::hinge ? l.label : l.offset) << '\n';
    }
    m["losses"] = "losses.csv";
  }
  if (spec.num_eq() > 0) {
    write_matrix_csv(dir / "B.csv", spec.B);
    write_vector_csv(dir / "b.csv", spec.b);
    m["B"] = "B.csv";
    m["b"] = "b.csv";
  }
  if (spec.num_ineq() > 0) {
    write_matrix_csv(dir / "J.csv", spec.J);
    write_vector_csv(dir / "q.csv", spec.q);
    m["J"] = "J.csv";
    m["q"] = "q.csv";
  }
  write_manifest(dir / "manifest.txt", m);
}

ProblemSpec read_problem(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ConfigError("instance directory not found: " + dir.string());
  const Manifest m = read_manifest(dir / "manifest.txt");
  if (need(m, "format") != "ardca-problem-1") throw ConfigError("unknown bundle format");
  const Index t = need_index(m, "t"), n = need_index(m, "n");
  const Index p = need_index(m, "p"), mm = need_index(m, "m");

  ProblemSpec spec;
  const std::string& reg = need(m, "reg");
  const double mu = parse_double(need(m, "mu"));
  const double sigma = parse_double(need(m, "sigma"));
  if (reg == "l2") {
    spec.reg = Regularizer::l2(mu);
  } else if (reg == "l1_plus_l2") {
    spec.reg = Regularizer::l1_plus_l2(mu, sigma);
  } else {
    throw ConfigError("unknown regularizer '" + reg + "'");
  }

  spec.A = n > 0 ? read_matrix_csv(dir / need(m, "A"), t, n) : Matrix(t, 0);
  if (n > 0) {
    auto in = open_in(dir / need(m, "losses"));
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto f = split(line, ',');
      if (f.size() != 2) throw ConfigError("losses.csv: expected 'kind,param'");
      const double v = parse_double(f[1]);
      if (f[0] == "squared") {
        spec.losses.push_back(Loss::squared(v));
      } else if (f[0] == "absolute") {
        spec.losses.push_back(Loss::absolute(v));
      } else if (f[0] == "hinge") {
        spec.losses.push_back(Loss::hinge(v));
      } else {
        throw ConfigError("losses.csv: unknown loss '" + f[0] + "'");
      }
    }
  }
  spec.B = p > 0 ? read_matrix_csv(dir / need(m, "B"), p, t) : Matrix(0, t);
  spec.b = p > 0 ? read_vector_csv(dir / need(m, "b"), p) : Vector(0);
  spec.J = mm > 0 ? read_matrix_csv(dir / need(m, "J"), mm, t) : Matrix(0, t);
  spec.q = mm > 0 ? read_vector_csv(dir / need(m, "q"), mm) : Vector(0);
  spec.validate();
  return spec;
}

void write_truth(const fs::path& dir, const Vector& x, const Vector& w) {
  fs::create_directories(dir);
  write_vector_csv(dir / "truth_x.csv", x);
  write_vector_csv(dir / "truth_w.csv", w);
}

void write_reference(const fs::path& dir, const StoredReference& r) {
  Manifest m;
  m["F_star"] = format_double(r.ref.F_star);
  m["D_star"] = format_double(r.ref.D_star);
  m["crosscheck_gap"] = format_double(r.crosscheck_gap);
  m["flagged"] = r.flagged ? "1" : "0";
  write_manifest(dir / "reference.txt", m);
}

std::optional<StoredReference> read_reference(const fs::path& dir) {
  if (!fs::exists(dir / "reference.txt")) return std::nullopt;
  const Manifest m = read_manifest(dir / "reference.txt");
  StoredReference r;
  r.ref.F_star = parse_double(need(m, "F_star"));
  r.ref.D_star = parse_double(need(m, "D_star"));
  r.crosscheck_gap = parse_double(need(m, "crosscheck_gap"));
  r.flagged = need(m, "flagged") == "1";
  return r;
}

}  // namespace ardca::io
