#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rothe/domain.hpp"
#include "rothe/field.hpp"
#include "rothe/graph.hpp"
#include "rothe/heat.hpp"
#include "rothe/spectral.hpp"
#include "rothe/trajectory.hpp"
#include "rothe/vi.hpp"

namespace rothe::io {

/// Shortest decimal text that reads back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t h) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int k = 15; k >= 0; --k, h >>= 4) s[static_cast<std::size_t>(k)] = digits[h & 0xf];
  return s;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace detail {

inline std::vector<std::string> tokens(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line.substr(0, line.find('#')));
  for (std::string tok; ss >> tok;) out.push_back(tok);
  return out;
}

inline double number(const std::string& tok, const std::string& where) {
  double v = 0.0;
  const char* end = tok.data() + tok.size();
  auto res = std::from_chars(tok.data(), end, v);
  if (res.ec != std::errc{} || res.ptr != end) fail(ErrorCode::ParseError, where + ": '" + tok + "' is not a number");
  return v;
}

inline std::string where(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line);
}

// Runs `fn`, rethrowing graph-construction errors with the file position.
template <class Fn>
void located(const std::string& pos, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    throw Error(e.code(), pos + ": " + e.what());
  }
}

}  // namespace detail

/// Line-oriented graph text:
///   graph <vertex-count hint>
///   v <id> <mu>
///   e <id> <id> <omega>        (undirected)
/// Blank lines and text after '#' are ignored.
inline GraphPtr parse_graph(std::istream& in, const std::string& source = "<graph>") {
  GraphBuilder builder;
  std::vector<std::tuple<std::string, std::string, double, std::size_t>> edges;
  bool header = false;
  std::size_t lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    const auto tok = detail::tokens(line);
    if (tok.empty()) continue;
    const auto pos = detail::where(source, lineno);
    if (!header) {
      if (tok[0] != "graph" || tok.size() != 2) fail(ErrorCode::ParseError, pos + ": expected 'graph <count>' header");
      const double hint = detail::number(tok[1], pos);
      if (!(hint >= 0.0) || hint != std::floor(hint)) fail(ErrorCode::ParseError, pos + ": bad vertex count hint");
      header = true;
    } else if (tok[0] == "v") {
      if (tok.size() != 3) fail(ErrorCode::ParseError, pos + ": expected 'v <id> <mu>'");
      const double mu = detail::number(tok[2], pos);
      detail::located(pos, [&] { builder.add_vertex(tok[1], mu); });
    } else if (tok[0] == "e") {
      if (tok.size() != 4) fail(ErrorCode::ParseError, pos + ": expected 'e <id> <id> <omega>'");
      edges.emplace_back(tok[1], tok[2], detail::number(tok[3], pos), lineno);
    } else {
      fail(ErrorCode::ParseError, pos + ": unknown record '" + tok[0] + "'");
    }
  }
  if (!header) fail(ErrorCode::ParseError, source + ": missing 'graph' header");
  // Each line is one undirected edge, so a repeat in either orientation is a duplicate.
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& [a, b, w, ln] : edges) {
    const auto pos = detail::where(source, ln);
    if (!seen.insert(std::minmax(a, b)).second)
      fail(ErrorCode::DuplicateEdge, pos + ": edge '" + a + "'-'" + b + "' listed twice");
    detail::located(pos, [&] { builder.add_edge(a, b, w); });
  }
  GraphPtr g;
  detail::located(source, [&] { g = builder.build(); });
  return g;
}

inline GraphPtr load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open graph file '" + path + "'");
  return parse_graph(in, path);
}

/// Lines `omega <id>`.
inline Domain parse_domain(std::istream& in, const GraphPtr& g, const std::string& source = "<domain>") {
  std::vector<Vertex> omega;
  std::size_t lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    const auto tok = detail::tokens(line);
    if (tok.empty()) continue;
    const auto pos = detail::where(source, lineno);
    if (tok[0] != "omega" || tok.size() != 2) fail(ErrorCode::ParseError, pos + ": expected 'omega <id>'");
    detail::located(pos, [&] { omega.push_back(g->at(tok[1])); });
  }
  Domain dom;
  detail::located(source, [&] { dom = make_domain(g, omega); });
  return dom;
}

inline Domain load_domain(const std::string& path, const GraphPtr& g) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open domain file '" + path + "'");
  return parse_domain(in, g, path);
}

/// Lines `<label> <value>`; unlisted vertices are 0.
inline VertexField parse_field(std::istream& in, const GraphPtr& g, const std::string& source = "<field>") {
  VertexField f(g);
  std::vector<char> seen(g->size(), 0);
  std::size_t lineno = 0;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    const auto tok = detail::tokens(line);
    if (tok.empty()) continue;
    const auto pos = detail::where(source, lineno);
    if (tok.size() != 2) fail(ErrorCode::ParseError, pos + ": expected '<label> <value>'");
    Vertex x = 0;
    detail::located(pos, [&] { x = g->at(tok[0]); });
    if (seen[x]) fail(ErrorCode::ParseError, pos + ": vertex '" + tok[0] + "' listed twice");
    seen[x] = 1;
    f[x] = detail::number(tok[1], pos);
    if (!std::isfinite(f[x])) fail(ErrorCode::NonFiniteValue, pos + ": non-finite value");
  }
  return f;
}

inline VertexField load_field(const std::string& path, const GraphPtr& g) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open field file '" + path + "'");
  return parse_field(in, g, path);
}

inline void write_field(std::ostream& out, const VertexField& f) {
  const auto& g = f.graph();
  for (Vertex x = 0; x < f.size(); ++x) out << g.label(x) << ' ' << format_double(f[x]) << '\n';
}

/// Minimal CSV row builder with round-trip number formatting.
class CsvRow {
 public:
  CsvRow& operator<<(double v) { return cell(format_double(v)); }
  CsvRow& operator<<(std::size_t v) { return cell(std::to_string(v)); }
  CsvRow& operator<<(bool v) { return cell(v ? "1" : "0"); }
  CsvRow& operator<<(const std::string& v) { return cell(v); }
  CsvRow& operator<<(const char* v) { return cell(v); }
  [[nodiscard]] std::string str() const { return text_ + '\n'; }

 private:
  CsvRow& cell(const std::string& s) {
    if (!first_) text_ += ',';
    text_ += s;
    first_ = false;
    return *this;
  }
  std::string text_;
  bool first_ = true;
};

inline void write_trajectory_csv(std::ostream& out, const RotheTrajectory& traj) {
  out << "i,t_i,vertex,value\n";
  const auto& g = traj.domain.graph();
  for (std::size_t i = 0; i < traj.levels.size(); ++i)
    for (Vertex x : traj.domain.omega())
      out << (CsvRow{} << i << traj.partition.time(i) << g.label(x) << traj.levels[i][x]).str();
}

/// Reads the `i,t_i,vertex,value` schema back into a trajectory on `dom`.
/// Grid times must match an equidistant partition; missing values are 0.
inline RotheTrajectory parse_trajectory_csv(std::istream& in, const Domain& dom,
                                            const std::string& source = "<trajectory>") {
  const auto& g = dom.graph_ptr();
  struct Entry {
    std::size_t i;
    double t;
    Vertex x;
    double value;
  };
  std::vector<Entry> entries;
  std::size_t lineno = 0, n = 0;
  double horizon = 0.0;
  bool have_header = false;
  for (std::string line; std::getline(in, line);) {
    ++lineno;
    if (line.empty()) continue;
    const auto pos = detail::where(source, lineno);
    if (!have_header) {
      if (line != "i,t_i,vertex,value") fail(ErrorCode::ParseError, pos + ": expected trajectory header");
      have_header = true;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    if (cells.size() != 4) fail(ErrorCode::ParseError, pos + ": expected 4 cells");
    const double i_val = detail::number(cells[0], pos);
    if (!(i_val >= 0.0) || i_val != std::floor(i_val)) fail(ErrorCode::ParseError, pos + ": bad step index");
    Entry e{static_cast<std::size_t>(i_val), detail::number(cells[1], pos), 0, detail::number(cells[3], pos)};
    detail::located(pos, [&] { e.x = g->at(cells[2]); });
    if (!dom.contains(e.x)) fail(ErrorCode::DomainMismatch, pos + ": vertex '" + cells[2] + "' outside the domain");
    if (e.i >= n) {
      n = e.i;
      horizon = e.t;
    }
    entries.push_back(e);
  }
  if (!have_header) fail(ErrorCode::ParseError, source + ": empty trajectory file");
  if (n == 0) fail(ErrorCode::ParseError, source + ": trajectory needs at least one step");
  RotheTrajectory traj{dom, TimePartition(horizon, n), {}, {}};
  traj.levels.assign(n + 1, VertexField(g));
  for (const auto& e : entries) {
    const double expect = traj.partition.time(e.i);
    if (std::abs(e.t - expect) > 1e-12 * (1.0 + std::abs(expect)))
      fail(ErrorCode::ParseError, source + ": time of step " + std::to_string(e.i) + " is off the grid");
    traj.levels[e.i][e.x] = e.value;
  }
  return traj;
}

inline void write_estimates_csv(std::ostream& out, const EstimateReport& rep) {
  out << "i,l2,grad_l2,l2p,delta_l2,r_i,d_i\n";
  for (const auto& r : rep.rows)
    out << (CsvRow{} << r.i << r.l2 << r.grad_l2 << r.l2p << r.delta_l2 << r.energy_residual << r.energy_defect).str();
}

/// Norm report: t, l2_interior, grad_l2, lq, energy (‖u‖² + ‖∇u‖²).
inline void write_norms_csv(std::ostream& out, const RotheTrajectory& traj, double q) {
  out << "t,l2_interior,grad_l2,lq,energy\n";
  const auto& dom = traj.domain;
  for (std::size_t i = 0; i < traj.levels.size(); ++i) {
    const Norms n = norms(dom.graph(), traj.levels[i], dom, q);
    out << (CsvRow{} << traj.partition.time(i) << n.l2_interior << n.gradient_l2 << n.lq
                     << n.l2_interior * n.l2_interior + n.gradient_l2 * n.gradient_l2)
               .str();
  }
}

inline void write_eigenvalues_csv(std::ostream& out, const SpectralBasis& basis) {
  out << "j,lambda\n";
  for (std::size_t j = 0; j < basis.size(); ++j) out << (CsvRow{} << j << basis.eigenvalues[j]).str();
}

/// All eigenfields in long form: j, vertex, value.
inline void write_eigenfields_csv(std::ostream& out, const SpectralBasis& basis) {
  out << "j,vertex,value\n";
  const auto& g = basis.domain.graph();
  for (std::size_t j = 0; j < basis.size(); ++j)
    for (Vertex x : basis.domain.omega())
      out << (CsvRow{} << j << g.label(x) << basis.eigenfields[j][x]).str();
}

inline void write_vi_reports_csv(std::ostream& out, const VIRun& run) {
  out << "i,t_i,delta_l2,variational_residual,feasibility,dual,complementarity,beta,sweeps\n";
  const auto& traj = run.trajectory;
  const VertexField zero(traj.domain.graph_ptr());
  for (const auto& r : run.reports)
    out << (CsvRow{} << r.i << traj.partition.time(r.i) << l2_distance(r.quotient, zero, traj.domain.interior())
                     << r.variational_residual << r.feasibility << r.dual << r.complementarity << r.beta << r.sweeps)
               .str();
}

inline void write_compare_csv(std::ostream& out, const CompareTable& table) {
  out << "t,l2,sup\n";
  for (const auto& r : table.rows) out << (CsvRow{} << r.t << r.l2 << r.sup).str();
}

inline void write_exhaustion_csv(std::ostream& out, const ExhaustionReport& rep) {
  out << "level,delta\n";
  for (const auto& d : rep.deltas) out << (CsvRow{} << d.level << d.delta).str();
}

}  // namespace rothe::io
