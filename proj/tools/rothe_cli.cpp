// Batch front-end: heat, VI and spectral runs from a JSON configuration.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "rothe/rothe.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace rothe;

namespace {

enum class ExitCode { Ok = 0, Config = 2, Solve = 3, Io = 4 };

struct CliFailure {
  ExitCode code;
  std::string category;
  std::string message;
};

[[noreturn]] void config_error(const std::string& msg) { throw CliFailure{ExitCode::Config, "ConfigError", msg}; }

struct Tolerances {
  double newton = 1e-12;
  double newton_accept = 1e-10;
  double oracle = 1e-12;
  double kkt = 1e-12;
  std::size_t max_sweeps = 200000;
};

struct LevelRange {
  std::size_t from = 0, to = 0, step = 1;
  [[nodiscard]] std::vector<std::size_t> list() const {
    std::vector<std::size_t> out;
    for (std::size_t m = from; m <= to; m += step) out.push_back(m);
    return out;
  }
};

/// A fully validated run: every file read and every object constructed.
struct Plan {
  json canonical;
  std::string kind;
  GraphPtr graph;
  std::optional<Domain> domain;
  std::optional<ExhaustionSequence> exhaustion;
  std::vector<std::size_t> levels;
  double p = 1.0;
  double horizon = 1.0;
  std::vector<std::size_t> steps;
  std::optional<VertexField> initial;
  std::optional<Forcing> forcing;
  Constraint constraint = Subspace{};
  std::optional<double> lipschitz;
  bool compare_oracle = false;
  std::string output;
  Tolerances tol;
};

struct Overrides {
  std::optional<double> p, horizon;
  std::vector<std::size_t> steps;
  std::string levels, initial, output;
  bool compare_oracle = false;
};

// ---- config access helpers -------------------------------------------------

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) config_error(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) config_error("unknown key '" + key + "' in " + where);
  }
}

double get_number(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) config_error(where + " needs '" + key + "'");
  if (!obj[key].is_number()) config_error(where + "." + key + " must be a number");
  return obj[key].get<double>();
}

std::size_t get_count(const json& v, const std::string& where) {
  if (!v.is_number_integer() && !v.is_number_unsigned()) config_error(where + " must be an integer");
  const auto n = v.get<long long>();
  if (n < 1) config_error(where + " must be at least 1");
  return static_cast<std::size_t>(n);
}

std::string resolve(const std::string& base, const std::string& path) {
  fs::path p(path);
  return p.is_absolute() ? p.string() : (fs::path(base) / p).lexically_normal().string();
}

LevelRange parse_level_text(const std::string& text) {
  // "from:to:step" or "from:to"
  LevelRange r;
  std::vector<std::size_t> parts;
  std::stringstream ss(text);
  for (std::string tok; std::getline(ss, tok, ':');) {
    try {
      std::size_t used = 0;
      const long long v = std::stoll(tok, &used);
      if (used != tok.size() || v < 1) throw std::invalid_argument(tok);
      parts.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      config_error("bad level range '" + text + "'");
    }
  }
  if (parts.size() < 2 || parts.size() > 3) config_error("level range must be from:to[:step]");
  r.from = parts[0];
  r.to = parts[1];
  r.step = parts.size() == 3 ? parts[2] : 1;
  if (r.to < r.from) config_error("level range is empty");
  return r;
}

// ---- loading ---------------------------------------------------------------

VertexField load_field_spec(const json& spec, const GraphPtr& g, const std::string& base, const std::string& where) {
  if (spec.is_number()) return constant_field(g, spec.get<double>());
  check_keys(spec, {"file", "values", "indicator"}, where);
  if (spec.size() != 1) config_error(where + " needs exactly one of file, values, indicator");
  if (spec.contains("file")) return io::load_field(resolve(base, spec["file"].get<std::string>()), g);
  VertexField f(g);
  if (spec.contains("indicator")) {
    f[g->at(spec["indicator"].get<std::string>())] = 1.0;
    return f;
  }
  if (!spec["values"].is_object()) config_error(where + ".values must map labels to numbers");
  for (const auto& [label, value] : spec["values"].items()) {
    if (!value.is_number()) config_error(where + ".values['" + label + "'] must be a number");
    f[g->at(label)] = value.get<double>();
  }
  return f;
}

Forcing load_forcing(const json& spec, const GraphPtr& g, const std::string& base) {
  if (!spec.is_object() || !spec.contains("type")) config_error("forcing needs a 'type'");
  const auto type = spec["type"].get<std::string>();
  if (type == "zero") {
    check_keys(spec, {"type"}, "forcing");
    return Forcing::zero(g);
  }
  if (type == "constant") {
    check_keys(spec, {"type", "field"}, "forcing");
    return Forcing::constant(load_field_spec(spec.at("field"), g, base, "forcing.field"));
  }
  if (type == "separable") {
    check_keys(spec, {"type", "field", "time"}, "forcing");
    if (!spec.contains("time") || !spec["time"].is_string()) config_error("separable forcing needs a 'time' expression");
    return Forcing::separable(load_field_spec(spec.at("field"), g, base, "forcing.field"),
                              TimeExpression::parse(spec["time"].get<std::string>()));
  }
  if (type == "table") {
    check_keys(spec, {"type", "times", "fields"}, "forcing");
    if (!spec.contains("times") || !spec.contains("fields") || !spec["times"].is_array() || !spec["fields"].is_array())
      config_error("table forcing needs 'times' and 'fields' arrays");
    std::vector<double> times;
    std::vector<VertexField> fields;
    for (const auto& t : spec["times"]) times.push_back(t.get<double>());
    std::size_t k = 0;
    for (const auto& f : spec["fields"]) fields.push_back(load_field_spec(f, g, base, "forcing.fields[" + std::to_string(k++) + "]"));
    return Forcing::table(std::move(times), std::move(fields));
  }
  config_error("unknown forcing type '" + type + "'");
}

template <class Oracle>
ExhaustionSequence lattice_levels(const Oracle& oracle, const json& dom_spec, std::size_t max_level) {
  using Key = typename Oracle::key_type;
  std::vector<Key> seeds;
  for (const auto& s : dom_spec.at("seeds")) {
    auto key = oracle.parse(s.get<std::string>());
    if (!key) config_error("seed '" + s.get<std::string>() + "' is not a lattice point");
    seeds.push_back(*key);
  }
  const std::string region = dom_spec.value("region", "all");
  std::function<bool(const Key&)> in_region;
  if (region == "all") {
    in_region = [](const Key&) { return true; };
  } else if (region == "nonnegative") {
    in_region = [](const Key& k) {
      for (auto c : k)
        if (c < 0) return false;
      return true;
    };
  } else {
    config_error("unknown region '" + region + "' (all | nonnegative)");
  }
  return lattice_exhaustion(oracle, in_region, seeds, max_level);
}

Plan load_plan(const std::string& config_path, const Overrides& ov) {
  json cfg;
  {
    std::ifstream in(config_path);
    if (!in) config_error("cannot open config '" + config_path + "'");
    try {
      cfg = json::parse(in);
    } catch (const json::parse_error& e) {
      config_error(std::string("config is not valid JSON: ") + e.what());
    }
  }
  const std::string base = fs::path(config_path).parent_path().string();

  if (ov.p) cfg["p"] = *ov.p;
  if (ov.horizon) cfg["horizon"] = *ov.horizon;
  if (!ov.steps.empty()) cfg["steps"] = ov.steps;
  if (!ov.levels.empty()) {
    const auto r = parse_level_text(ov.levels);
    cfg["levels"] = {{"from", r.from}, {"to", r.to}, {"step", r.step}};
  }
  if (!ov.initial.empty()) cfg["initial"] = {{"file", fs::absolute(ov.initial).string()}};
  if (ov.compare_oracle) cfg["compare_oracle"] = true;
  if (!ov.output.empty()) cfg["output"] = ov.output;

  check_keys(cfg,
             {"kind", "graph", "domain", "p", "horizon", "steps", "levels", "initial", "forcing", "constraint",
              "lipschitz", "compare_oracle", "output", "tolerances"},
             "config");

  Plan plan;
  plan.canonical = cfg;
  if (!cfg.contains("kind") || !cfg["kind"].is_string()) config_error("config needs 'kind' (heat | vi | spectral)");
  plan.kind = cfg["kind"].get<std::string>();
  if (plan.kind != "heat" && plan.kind != "vi" && plan.kind != "spectral")
    config_error("unknown kind '" + plan.kind + "' (heat | vi | spectral)");

  if (cfg.contains("p")) plan.p = get_number(cfg, "p", "config");
  if (!(plan.p >= 1.0)) config_error("p must satisfy p >= 1");
  if (plan.kind != "heat" && cfg.contains("p") && plan.p != 1.0)
    config_error("p applies to heat runs only");
  if (cfg.contains("horizon")) plan.horizon = get_number(cfg, "horizon", "config");
  if (!(plan.horizon > 0.0) || !std::isfinite(plan.horizon)) config_error("horizon must be positive");
  if (cfg.contains("steps")) {
    if (cfg["steps"].is_array()) {
      if (cfg["steps"].empty()) config_error("steps list is empty");
      for (const auto& s : cfg["steps"]) plan.steps.push_back(get_count(s, "steps"));
    } else {
      plan.steps.push_back(get_count(cfg["steps"], "steps"));
    }
  } else {
    plan.steps.push_back(100);
  }
  if (cfg.contains("levels")) {
    const auto& lv = cfg["levels"];
    check_keys(lv, {"from", "to", "step"}, "levels");
    LevelRange r;
    r.from = get_count(lv.at("from"), "levels.from");
    r.to = get_count(lv.at("to"), "levels.to");
    r.step = lv.contains("step") ? get_count(lv["step"], "levels.step") : 1;
    if (r.to < r.from) config_error("levels range is empty");
    plan.levels = r.list();
  }
  plan.compare_oracle = cfg.value("compare_oracle", false);
  if (!cfg.contains("output") || !cfg["output"].is_string()) config_error("config needs an 'output' directory");
  plan.output = resolve(base, cfg["output"].get<std::string>());
  if (cfg.contains("lipschitz")) {
    plan.lipschitz = get_number(cfg, "lipschitz", "config");
    if (!(*plan.lipschitz >= 0.0)) config_error("lipschitz must be non-negative");
  }
  if (cfg.contains("tolerances")) {
    const auto& t = cfg["tolerances"];
    check_keys(t, {"newton", "newton_accept", "oracle", "kkt", "max_sweeps"}, "tolerances");
    if (t.contains("newton")) plan.tol.newton = get_number(t, "newton", "tolerances");
    if (t.contains("newton_accept")) plan.tol.newton_accept = get_number(t, "newton_accept", "tolerances");
    if (t.contains("oracle")) plan.tol.oracle = get_number(t, "oracle", "tolerances");
    if (t.contains("kkt")) plan.tol.kkt = get_number(t, "kkt", "tolerances");
    if (t.contains("max_sweeps")) plan.tol.max_sweeps = get_count(t["max_sweeps"], "tolerances.max_sweeps");
    if (!(plan.tol.newton > 0.0 && plan.tol.newton_accept >= plan.tol.newton && plan.tol.oracle >= 1e-13 &&
          plan.tol.kkt > 0.0))
      config_error("tolerances out of range");
  }

  // Graph and domain.
  if (!cfg.contains("graph")) config_error("config needs 'graph'");
  const auto& gspec = cfg["graph"];
  const auto& dspec = cfg.contains("domain") ? cfg["domain"] : json("all");
  const bool generative = gspec.is_object() && gspec.contains("generator");
  const std::size_t max_level = plan.levels.empty() ? 0 : plan.levels.back() + 1;
  if (generative) {
    check_keys(gspec, {"generator", "omega", "mu"}, "graph");
    const double omega = gspec.value("omega", 1.0), mu = gspec.value("mu", 1.0);
    if (!(omega > 0.0) || !(mu > 0.0)) config_error("lattice omega and mu must be positive");
    if (plan.levels.empty()) config_error("a generative graph needs 'levels' for an exhaustion study");
    if (!dspec.is_object() || !dspec.contains("seeds")) config_error("a generative graph needs domain.seeds");
    check_keys(dspec, {"seeds", "region"}, "domain");
    const auto name = gspec["generator"].get<std::string>();
    if (name == "lattice_z") {
      plan.exhaustion = lattice_levels(LatticeZ{omega, mu}, dspec, max_level);
    } else if (name == "lattice_z2") {
      plan.exhaustion = lattice_levels(LatticeZ2{omega, mu}, dspec, max_level);
    } else {
      config_error("unknown generator '" + name + "' (lattice_z | lattice_z2)");
    }
    plan.graph = plan.exhaustion->graph_ptr();
  } else {
    if (!gspec.is_object() || !gspec.contains("file")) config_error("graph needs 'file' or 'generator'");
    check_keys(gspec, {"file"}, "graph");
    plan.graph = io::load_graph(resolve(base, gspec["file"].get<std::string>()));
    Domain dom;
    if (dspec.is_string() && dspec.get<std::string>() == "all") {
      dom = whole_domain(plan.graph);
    } else {
      check_keys(dspec, {"file", "vertices", "seeds"}, "domain");
      if (dspec.contains("file")) {
        dom = io::load_domain(resolve(base, dspec["file"].get<std::string>()), plan.graph);
      } else if (dspec.contains("vertices")) {
        std::vector<std::string> labels;
        for (const auto& v : dspec["vertices"]) labels.push_back(v.get<std::string>());
        dom = make_domain(plan.graph, std::span<const std::string>(labels));
      } else {
        dom = whole_domain(plan.graph);
      }
    }
    if (!plan.levels.empty()) {
      if (!dspec.is_object() || !dspec.contains("seeds")) config_error("an exhaustion study needs domain.seeds");
      std::vector<Vertex> seeds;
      for (const auto& s : dspec["seeds"]) seeds.push_back(plan.graph->at(s.get<std::string>()));
      plan.exhaustion = exhaust(dom, seeds, max_level);
    }
    plan.domain = dom;
  }
  if (plan.domain) plan.domain->require_interior();

  if (cfg.contains("initial")) {
    plan.initial = load_field_spec(cfg["initial"], plan.graph, base, "initial");
  } else if (plan.kind == "heat") {
    config_error("heat runs need 'initial'");
  }
  if (plan.kind == "vi") {
    plan.forcing = cfg.contains("forcing") ? load_forcing(cfg["forcing"], plan.graph, base) : Forcing::zero(plan.graph);
    if (cfg.contains("constraint")) {
      const auto& c = cfg["constraint"];
      const auto type = c.value("type", std::string("subspace"));
      if (type == "subspace") {
        check_keys(c, {"type"}, "constraint");
      } else if (type == "obstacle") {
        check_keys(c, {"type", "psi"}, "constraint");
        plan.constraint = Obstacle{load_field_spec(c.at("psi"), plan.graph, base, "constraint.psi")};
        if (plan.exhaustion) config_error("obstacle constraints are not supported on exhaustions");
      } else {
        config_error("unknown constraint '" + type + "' (subspace | obstacle)");
      }
    }
  } else if (cfg.contains("forcing") || cfg.contains("constraint")) {
    config_error("forcing and constraint apply to vi runs only");
  }
  if (plan.kind == "spectral" && (!plan.domain || plan.exhaustion)) config_error("spectral runs need a finite domain");
  if (plan.compare_oracle && (plan.kind != "heat" || plan.exhaustion))
    config_error("compare_oracle applies to heat runs on a finite domain");
  return plan;
}

// ---- running ---------------------------------------------------------------

using Files = std::map<std::string, std::string>;

template <class Fn>
std::string render(Fn&& fn) {
  std::ostringstream out;
  fn(out);
  return out.str();
}

StepOptions heat_options(const Plan& plan) {
  StepOptions o;
  o.tolerance = plan.tol.newton;
  o.accept = plan.tol.newton_accept;
  return o;
}

VIStepOptions vi_options(const Plan& plan) {
  VIStepOptions o;
  o.tolerance = plan.tol.kkt;
  o.max_sweeps = plan.tol.max_sweeps;
  return o;
}

void run_heat(const Plan& plan, Files& files, json& diag) {
  if (plan.exhaustion) {
    for (std::size_t n : plan.steps) {
      const auto rep = run_exhaustion(*plan.exhaustion, plan.p, *plan.initial, TimePartition(plan.horizon, n),
                                      plan.levels, heat_options(plan));
      files["exhaustion_n" + std::to_string(n) + ".csv"] = render([&](auto& o) { io::write_exhaustion_csv(o, rep); });
      diag["exhaustion_n" + std::to_string(n)] = {{"strictly_decreasing", rep.strictly_decreasing()}};
    }
    return;
  }
  const auto prob = make_heat_problem(*plan.domain, plan.p, *plan.initial, plan.horizon);
  std::optional<SpectralBasis> basis;
  if (plan.compare_oracle && plan.p == 1.0) basis = dirichlet_eigenbasis(prob.domain);

  std::string refinement = "n,ell,error_T,max_grid_error,order\n";
  double prev_err = 0.0;
  std::size_t prev_n = 0;
  for (std::size_t n : plan.steps) {
    const TimePartition part(plan.horizon, n);
    const auto traj = run_rothe(prob, part, heat_options(plan));
    const auto est = monitor_estimates(traj, prob);
    const auto tag = "_n" + std::to_string(n);
    files["trajectory" + tag + ".csv"] = render([&](auto& o) { io::write_trajectory_csv(o, traj); });
    files["estimates" + tag + ".csv"] = render([&](auto& o) { io::write_estimates_csv(o, est); });
    files["norms" + tag + ".csv"] = render([&](auto& o) { io::write_norms_csv(o, traj, plan.p + 1.0); });
    diag["heat" + tag] = {{"l2_monotone", est.l2_monotone},
                          {"energy_ok", est.energy_ok},
                          {"defect_ok", est.defect_ok},
                          {"max_step_gap", est.max_step_gap}};
    if (!plan.compare_oracle) continue;

    std::vector<VertexField> reference;
    if (basis) {
      for (std::size_t i = 0; i <= n; ++i) reference.push_back(exact_p1_solution(*basis, prob.initial, part.time(i)));
    } else {
      std::vector<double> times;
      for (std::size_t i = 0; i <= n; ++i) times.push_back(part.time(i));
      reference = ode_oracle(prob, times, plan.tol.oracle).fields;
    }
    double max_err = 0.0;
    for (std::size_t i = 0; i <= n; ++i)
      max_err = std::max(max_err, l2_distance(traj.levels[i], reference[i], prob.domain.interior()));
    const double err = l2_distance(traj.final_state(), reference.back(), prob.domain.interior());
    io::CsvRow row;
    row << n << part.step_size() << err << max_err;
    if (prev_n != 0 && err > 0.0 && prev_err > 0.0) {
      row << std::log(prev_err / err) / std::log(static_cast<double>(n) / static_cast<double>(prev_n));
    } else {
      row << "";
    }
    refinement += row.str();
    prev_err = err;
    prev_n = n;
  }
  if (plan.compare_oracle) files["refinement.csv"] = refinement;
}

void run_vi_kind(const Plan& plan, Files& files, json& diag) {
  const VertexField g = plan.initial ? *plan.initial : VertexField(plan.graph);
  if (plan.exhaustion) {
    for (std::size_t n : plan.steps) {
      const auto rep = run_vi_exhaustion(*plan.exhaustion, g, *plan.forcing, TimePartition(plan.horizon, n),
                                         plan.levels, vi_options(plan));
      files["exhaustion_n" + std::to_string(n) + ".csv"] = render([&](auto& o) { io::write_exhaustion_csv(o, rep); });
      diag["exhaustion_n" + std::to_string(n)] = {{"strictly_decreasing", rep.strictly_decreasing()}};
    }
    return;
  }
  const auto prob = make_vi_problem(*plan.domain, *plan.forcing, g, plan.horizon, plan.constraint, plan.lipschitz);
  for (std::size_t n : plan.steps) {
    const TimePartition part(plan.horizon, n);
    const auto run = run_vi(prob, part, vi_options(plan));
    std::vector<double> times;
    for (std::size_t i = 0; i <= n; ++i) times.push_back(part.time(i));
    const auto lip = lipschitz_validate(prob.forcing, prob.domain, times, plan.lipschitz);
    const auto mono = vi_monotonicity_monitor(run, plan.lipschitz);
    const auto tag = "_n" + std::to_string(n);
    files["trajectory" + tag + ".csv"] = render([&](auto& o) { io::write_trajectory_csv(o, run.trajectory); });
    files["vi_reports" + tag + ".csv"] = render([&](auto& o) { io::write_vi_reports_csv(o, run); });
    files["monotonicity" + tag + ".csv"] = render([&](auto& o) {
      o << "j,quotient,previous,forcing_jump,holds\n";
      for (const auto& r : mono.rows) o << (io::CsvRow{} << r.j << r.quotient << r.previous << r.forcing_jump << r.holds).str();
    });
    json d = {{"recurrence_ok", mono.recurrence_ok},
              {"chain_ok", mono.chain_ok},
              {"chain_bound", mono.chain_bound},
              {"lipschitz_estimate", lip.estimate},
              {"lipschitz_violation", lip.violation}};
    if (!plan.lipschitz) d["warning"] = "no Lipschitz bound declared; convergence statements use the estimate";
    diag["vi" + tag] = d;
    if (lip.violation)
      std::cerr << "warning: forcing exceeds the declared Lipschitz bound (estimate " << io::format_double(lip.estimate)
                << ")\n";
  }
}

void run_spectral(const Plan& plan, Files& files, json& diag) {
  const auto basis = dirichlet_eigenbasis(*plan.domain);
  const auto check = check_basis(basis);
  files["eigenvalues.csv"] = render([&](auto& o) { io::write_eigenvalues_csv(o, basis); });
  files["eigenfields.csv"] = render([&](auto& o) { io::write_eigenfields_csv(o, basis); });
  diag["basis"] = {{"max_residual", check.max_residual},
                   {"max_orthonormality", check.max_orthonormality},
                   {"min_eigenvalue", check.min_eigenvalue}};
  if (plan.initial) {
    const auto h = restrict_to_interior(*plan.initial, *plan.domain);
    for (std::size_t n : plan.steps) {
      const auto traj = exact_p1_trajectory(basis, h, TimePartition(plan.horizon, n));
      files["exact_n" + std::to_string(n) + ".csv"] = render([&](auto& o) { io::write_trajectory_csv(o, traj); });
    }
  }
}

json tolerances_json(const Tolerances& t) {
  return {{"newton", t.newton}, {"newton_accept", t.newton_accept}, {"oracle", t.oracle}, {"kkt", t.kkt},
          {"max_sweeps", t.max_sweeps}};
}

std::string config_hash(const Plan& plan) {
  json c = plan.canonical;
  c.erase("output");
  return io::hex64(io::fnv1a(c.dump()));
}

void write_outputs(const Plan& plan, const Files& files, const json& diag) {
  json manifest;
  manifest["config_hash"] = config_hash(plan);
  manifest["kind"] = plan.kind;
  manifest["tolerances"] = tolerances_json(plan.tol);
  manifest["diagnostics"] = diag;
  json hashes = json::object();
  for (const auto& [name, body] : files) hashes[name] = io::hex64(io::fnv1a(body));
  manifest["files"] = hashes;

  const fs::path target(plan.output);
  const fs::path staging = target.string() + ".partial";
  try {
    fs::remove_all(staging);
    fs::create_directories(staging);
    for (const auto& [name, body] : files) {
      std::ofstream out(staging / name, std::ios::binary);
      out << body;
      if (!out) throw std::runtime_error("write failed for " + name);
    }
    {
      std::ofstream out(staging / "manifest.json", std::ios::binary);
      out << manifest.dump(2) << '\n';
      if (!out) throw std::runtime_error("write failed for manifest.json");
    }
    fs::remove_all(target);
    fs::rename(staging, target);
  } catch (const std::exception& e) {
    std::error_code ignored;
    fs::remove_all(staging, ignored);
    throw CliFailure{ExitCode::Io, "IoError", e.what()};
  }
}

// Maps a library error to a CLI failure for the given phase.
CliFailure classify(const Error& e, bool solving) {
  const std::string msg = std::string(to_string(e.code())) + ": " + e.what();
  if (e.code() == ErrorCode::IoError && !solving) return {ExitCode::Config, "ConfigError", msg};
  if (solving) return {ExitCode::Solve, "SolveError", msg};
  return {ExitCode::Config, "ConfigError", msg};
}

Plan validated(const std::string& config, const Overrides& ov) {
  try {
    return load_plan(config, ov);
  } catch (const Error& e) {
    throw classify(e, false);
  } catch (const json::exception& e) {
    config_error(std::string("config: ") + e.what());
  }
}

int cmd_run(const std::string& config, const Overrides& ov) {
  const Plan plan = validated(config, ov);
  Files files;
  json diag = json::object();
  try {
    if (plan.kind == "heat") run_heat(plan, files, diag);
    if (plan.kind == "vi") run_vi_kind(plan, files, diag);
    if (plan.kind == "spectral") run_spectral(plan, files, diag);
  } catch (const Error& e) {
    throw classify(e, true);
  }
  write_outputs(plan, files, diag);
  std::cout << "wrote " << files.size() + 1 << " files to " << plan.output << '\n';
  return 0;
}

int cmd_validate(const std::string& config, const Overrides& ov) {
  const Plan plan = validated(config, ov);
  std::cout << "ok " << plan.kind << " config_hash=" << config_hash(plan) << '\n';
  return 0;
}

struct GraphSource {
  std::string graph, domain, config;
};

std::pair<GraphPtr, std::optional<Domain>> resolve_graph(const GraphSource& src) {
  if (!src.config.empty()) {
    Overrides ov;
    ov.output = "unused";
    Plan plan = validated(src.config, ov);
    if (!plan.domain) config_error("config does not describe a finite domain");
    return {plan.graph, plan.domain};
  }
  if (src.graph.empty()) config_error("give --graph or --config");
  try {
    auto g = io::load_graph(src.graph);
    std::optional<Domain> dom;
    if (!src.domain.empty()) dom = io::load_domain(src.domain, g);
    return {g, dom};
  } catch (const Error& e) {
    throw classify(e, false);
  }
}

int cmd_graph_info(const GraphSource& src) {
  auto [g, dom] = resolve_graph(src);
  const auto m = compute_metrics(*g);
  json out = {{"vertices", g->size()},
              {"edges", g->edge_count()},
              {"connected", g->is_connected()},
              {"mu0", m.mu0},
              {"max_degree", m.max_degree},
              {"d_mu", m.d_mu}};
  if (dom) out["domain"] = {{"omega", dom->omega().size()}, {"boundary", dom->boundary().size()},
                            {"interior", dom->interior().size()}};
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_compare(const GraphSource& src, const std::string& a, const std::string& b, const std::vector<double>& times,
                const std::string& output) {
  auto [g, dom] = resolve_graph(src);
  if (!dom) dom = whole_domain(g);
  std::string text;
  try {
    auto load = [&](const std::string& path) {
      std::istringstream in(io::read_file(path));
      return io::parse_trajectory_csv(in, *dom, path);
    };
    const auto ta = load(a);
    const auto tb = load(b);
    std::vector<double> ts = times;
    if (ts.empty())
      for (std::size_t i = 0; i <= ta.partition.steps(); ++i) ts.push_back(ta.partition.time(i));
    const auto table = compare(ta, tb, *dom, ts);
    text = render([&](auto& o) { io::write_compare_csv(o, table); });
    text += (io::CsvRow{} << "max" << table.max_l2 << table.max_sup).str();
  } catch (const Error& e) {
    throw classify(e, e.code() != ErrorCode::IoError && e.code() != ErrorCode::ParseError);
  }
  if (output.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(output, std::ios::binary);
    out << text;
    if (!out) throw CliFailure{ExitCode::Io, "IoError", "cannot write '" + output + "'"};
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rothe-method solver for semilinear heat flow and parabolic variational inequalities on graphs"};
  app.require_subcommand(1);

  Overrides ov;
  std::string config;
  auto add_overrides = [&](CLI::App* sub) {
    sub->add_option("config", config, "JSON run configuration")->required();
    sub->add_option("--p", ov.p, "exponent p >= 1");
    sub->add_option("--horizon", ov.horizon, "final time T");
    sub->add_option("--steps", ov.steps, "step counts n (one or more)");
    sub->add_option("--levels", ov.levels, "exhaustion levels from:to[:step]");
    sub->add_option("--initial", ov.initial, "initial field file");
    sub->add_flag("--compare-oracle", ov.compare_oracle, "refinement study against the exact or RK4 oracle");
    sub->add_option("--output", ov.output, "output directory");
  };
  auto* run = app.add_subcommand("run", "solve and write CSV results plus manifest.json");
  add_overrides(run);
  auto* validate = app.add_subcommand("validate-config", "load every input and report the config hash");
  add_overrides(validate);

  GraphSource src;
  auto* info = app.add_subcommand("graph-info", "print graph and domain metrics");
  info->add_option("--graph", src.graph, "graph file");
  info->add_option("--domain", src.domain, "domain file");
  info->add_option("--config", src.config, "take graph and domain from a run config");

  std::string traj_a, traj_b, compare_out;
  std::vector<double> times;
  auto* cmp = app.add_subcommand("compare", "difference table of two trajectory CSV files");
  cmp->add_option("a", traj_a, "first trajectory CSV")->required();
  cmp->add_option("b", traj_b, "second trajectory CSV")->required();
  cmp->add_option("--graph", src.graph, "graph file");
  cmp->add_option("--domain", src.domain, "domain file");
  cmp->add_option("--config", src.config, "take graph and domain from a run config");
  cmp->add_option("--times", times, "evaluation times (default: grid of the first trajectory)")->delimiter(',');
  cmp->add_option("--output", compare_out, "write the table here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error[ConfigError]: " << e.what() << '\n';
    return static_cast<int>(ExitCode::Config);
  }

  try {
    if (*run) return cmd_run(config, ov);
    if (*validate) {
      if (ov.output.empty()) ov.output = "unused";
      return cmd_validate(config, ov);
    }
    if (*info) return cmd_graph_info(src);
    if (*cmp) return cmd_compare(src, traj_a, traj_b, times, compare_out);
  } catch (const CliFailure& f) {
    std::cerr << "error[" << f.category << "]: " << f.message << '\n';
    return static_cast<int>(f.code);
  } catch (const Error& e) {
    std::cerr << "error[SolveError]: " << to_string(e.code()) << ": " << e.what() << '\n';
    return static_cast<int>(ExitCode::Solve);
  }
  return 0;
}
