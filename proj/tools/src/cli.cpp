#include "sdgame/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include "CLI11.hpp"
#include "sdgame/certify.hpp"
#include "sdgame/error.hpp"
#include "sdgame/game.hpp"
#include "sdgame/instances.hpp"
#include "sdgame/io.hpp"
#include "sdgame/lattice.hpp"
#include "sdgame/measure.hpp"
#include "sdgame/oracle.hpp"
#include "sdgame/snell.hpp"
#include "sdgame/spec_json.hpp"

namespace sdgame::cli {

namespace {

const std::vector<std::string> kSubcommands{"solve", "certify", "simulate", "enumerate", "sweep", "list-instances"};

std::vector<double> parse_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw Error("cli", key + ": '" + item + "' is not a number");
    out.push_back(v);
  }
  return out;
}

long long parse_int(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size() || value.empty()) throw Error("cli", key + ": '" + value + "' is not an integer");
  return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != value.size() || value.empty() || value.front() == '-') {
    throw Error("cli", key + ": '" + value + "' is not a nonnegative integer");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true" || value == "on" || value == "yes") return true;
  if (value == "0" || value == "false" || value == "off" || value == "no") return false;
  throw Error("cli", key + ": '" + value + "' is not a boolean");
}

std::string env_name(const std::string& key) {
  std::string out = "SDGAME_";
  for (char c : key) out += c == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

// ---------------------------------------------------------------------------

struct Problem {
  std::shared_ptr<const GameSpec> spec;
  const Instance* inst = nullptr;
  int steps = 0;
  int nodes = 0;
};

Problem load_problem(const RunConfig& config, bool prefer_tiny) {
  Problem p;
  GameSpec spec;
  if (!config.spec_path.empty()) {
    spec = load_spec_file(config.spec_path);
  } else {
    p.inst = &instance(config.instance);
    spec = *p.inst->spec;
  }
  if (!config.box_lower.empty() || !config.box_upper.empty()) {
    auto to_vec = [&](const std::vector<double>& v, const Vector& fallback) {
      if (v.empty()) return fallback;
      if (static_cast<int>(v.size()) != spec.dim) {
        throw Error("cli", "box override has " + std::to_string(v.size()) + " entries, spec dimension is " +
                               std::to_string(spec.dim));
      }
      return Vector(Eigen::Map<const Vector>(v.data(), spec.dim));
    };
    spec.state_box = StateBox{to_vec(config.box_lower, spec.state_box.lower), to_vec(config.box_upper, spec.state_box.upper)};
  }
  require_usable(validate_spec(spec, 64, config.seed));
  p.spec = std::make_shared<const GameSpec>(std::move(spec));
  const bool tiny = config.tiny || prefer_tiny;
  if (p.inst) {
    const LatticeParams& lp = tiny ? p.inst->tiny : p.inst->base;
    p.steps = config.steps.value_or(lp.steps);
    p.nodes = config.nodes_per_dim.value_or(lp.nodes_per_dim);
  } else {
    if (!config.steps || !config.nodes_per_dim) {
      throw Error("cli", "--steps and --nodes-per-dim are required with --spec");
    }
    p.steps = *config.steps;
    p.nodes = *config.nodes_per_dim;
  }
  return p;
}

std::vector<double> as_vector(const Vector& v) { return {v.data(), v.data() + v.size()}; }

nlohmann::json stop_geometry(const ValueField& field, const Lattice& lattice) {
  nlohmann::json rows = nlohmann::json::array();
  for (int s = 0; s < lattice.slices(); ++s) {
    std::size_t count = 0;
    Vector lo = Vector::Constant(lattice.dim(), std::numeric_limits<double>::infinity());
    Vector hi = -lo;
    for (std::size_t n = 0; n < lattice.node_count(); ++n) {
      const auto node = static_cast<NodeId>(n);
      if (!field.rho0.stops(s, node)) continue;
      ++count;
      const Vector x = lattice.coordinates(node);
      lo = lo.cwiseMin(x);
      hi = hi.cwiseMax(x);
    }
    nlohmann::json row{{"slice", s}, {"t", lattice.time(s)}, {"stop_nodes", count}};
    if (count) {
      row["stop_lower"] = as_vector(lo);
      row["stop_upper"] = as_vector(hi);
    }
    rows.push_back(row);
  }
  return rows;
}

nlohmann::json envelope(const RunConfig& config, const Problem& p, const Lattice& lattice) {
  return {{"config", to_json(config)},
          {"seed", config.seed},
          {"spec", p.spec->name},
          {"lattice", to_json(lattice.summary())}};
}

void write_json(const RunConfig& config, const std::string& file, const nlohmann::json& doc) {
  write_atomic(std::filesystem::path(config.out) / file, doc.dump(2) + "\n");
}

void print(std::ostream& out, const RunConfig& config, const nlohmann::json& summary, const std::string& text,
           const std::string& csv) {
  if (config.format == "json") {
    out << summary.dump(2) << '\n';
  } else if (config.format == "csv") {
    out << csv;
  } else {
    out << text;
  }
}

// ---------------------------------------------------------------------------

int cmd_solve(const RunConfig& config, std::ostream& out) {
  const Problem p = load_problem(config, false);
  const Lattice lattice = build_lattice(p.spec, p.steps, p.nodes);
  const ValueField field = solve_game(lattice);
  const NodeId root = lattice.root();

  std::ostringstream csv;
  write_value_csv(csv, field, lattice);
  write_atomic(std::filesystem::path(config.out) / "value.csv", csv.str());

  nlohmann::json summary = envelope(config, p, lattice);
  summary["V0"] = field.V(0, root);
  summary["root_state"] = as_vector(lattice.coordinates(root));
  summary["ustar_root"] = as_vector(p.spec->actions[field.ustar(0, root)]);
  summary["stops_at_root"] = field.rho0.stops(0, root);
  summary["stop_region"] = stop_geometry(field, lattice);
  write_json(config, "summary.json", summary);

  std::ostringstream text;
  text << std::setprecision(12) << p.spec->name << ": V(0,x0) = " << field.V(0, root) << "  (steps " << p.steps
       << ", nodes/dim " << p.nodes << ", dt " << lattice.dt() << ")\n";
  print(out, config, summary, text.str(), csv.str());
  return kExitPass;
}

CertificationReport certify_all(const RunConfig& config, const Lattice& lattice, const ValueField& field) {
  CertifyOptions opts;
  opts.eps_ladder = config.eps;
  opts.exhaustive_policy_cap = config.policy_cap;
  opts.exhaustive_rule_cap = config.rule_cap;
  opts.oracle_pair_cap = config.pair_cap;

  CertificationReport report;
  report.name = lattice.spec().name;
  report.tolerances = opts.tol;
  report.append(certify_saddle(field, lattice, field.ustar, field.rho0, config.alt_policies, config.seed, opts));
  report.append(certify_thrifty(lattice, field, field.ustar, opts));
  report.append(check_inequalities(field, lattice, config.alt_policies, derive_seed(config.seed, 1), opts));
  try {
    report.append(check_saddle_inequalities(field, lattice, field.ustar, field.rho0, SaddleMode::exhaustive, 0,
                                            config.seed, opts));
  } catch (const Error& e) {
    if (e.module() != "oracle") throw;
    report.append(check_saddle_inequalities(field, lattice, field.ustar, field.rho0, SaddleMode::sampled,
                                            config.alt_policies, derive_seed(config.seed, 2), opts));
  }
  return report;
}

int cmd_certify(const RunConfig& config, std::ostream& out) {
  const Problem p = load_problem(config, false);
  const Lattice lattice = build_lattice(p.spec, p.steps, p.nodes);
  const ValueField field = solve_game(lattice);
  const CertificationReport report = certify_all(config, lattice, field);

  nlohmann::json doc = envelope(config, p, lattice);
  doc["V0"] = field.V(0, lattice.root());
  doc["report"] = to_json(report, &lattice);
  write_json(config, "report.json", doc);
  std::ostringstream text;
  write_text(text, report);
  write_atomic(std::filesystem::path(config.out) / "report.txt", text.str());

  std::ostringstream csv;
  csv << "check,status,worst_residual,tolerance\n";
  for (const auto& c : report.checks) {
    csv << c.id << ',' << to_string(c.status) << ',' << format_double(c.worst_residual) << ','
        << format_double(c.tolerance) << '\n';
  }
  print(out, config, doc, text.str(), csv.str());
  return report.verdict() ? kExitPass : kExitChecksFailed;
}

int cmd_simulate(const RunConfig& config, std::ostream& out) {
  const Problem p = load_problem(config, false);
  const Lattice lattice = build_lattice(p.spec, p.steps, p.nodes);
  const ValueField field = solve_game(lattice);
  SimulationOptions sim;
  sim.threads = config.threads;
  const auto n = static_cast<std::size_t>(config.n_paths);
  const Estimate rw = expected_payoff(lattice, field.ustar, field.rho0, PayoffMode::reweight, n, config.seed, sim);
  const Estimate dr = expected_payoff(lattice, field.ustar, field.rho0, PayoffMode::direct, n, config.seed, sim);
  const Estimate lam = terminal_likelihood_mean(lattice, field.ustar, n, config.seed, sim);
  const double k = Tolerances{}.mc_standard_errors;
  const double gap = std::abs(rw.estimate - dr.estimate);
  const double combined = std::hypot(rw.se, dr.se);
  const bool agree = gap <= k * combined || gap == 0.0;
  const bool unit_mean = std::abs(lam.estimate - 1.0) <= k * lam.se || lam.estimate == 1.0;

  nlohmann::json doc = envelope(config, p, lattice);
  doc["V0"] = field.V(0, lattice.root());
  doc["reweight"] = to_json(rw);
  doc["direct"] = to_json(dr);
  doc["likelihood_mean"] = to_json(lam);
  doc["checks"] = {{"reweight_vs_direct", {{"gap", gap}, {"combined_se", combined}, {"pass", agree}}},
                   {"likelihood_unit_mean", {{"gap", std::abs(lam.estimate - 1.0)}, {"se", lam.se}, {"pass", unit_mean}}}};
  write_json(config, "estimates.json", doc);
  if (config.dump_paths) {
    const PathBundle bundle = simulate(lattice, PathMode::reference, nullptr, std::min<std::size_t>(n, 1000),
                                       config.seed, sim);
    write_atomic(std::filesystem::path(config.out) / "paths.csv",
                 [&](std::ostream& os) { write_paths_csv(os, bundle); });
  }

  std::ostringstream text, csv;
  text << std::setprecision(8) << p.spec->name << ": V(0,x0) = " << field.V(0, lattice.root()) << '\n'
       << "  reweight " << rw.estimate << " +- " << rw.se << '\n'
       << "  direct   " << dr.estimate << " +- " << dr.se << (agree ? "  (agree)" : "  (DISAGREE)") << '\n'
       << "  E[Lambda(T)] " << lam.estimate << " +- " << lam.se << (unit_mean ? "" : "  (off unit mean)") << '\n';
  csv << "mode,estimate,se,n_paths\n";
  for (const Estimate* e : {&rw, &dr, &lam}) {
    csv << e->mode << ',' << format_double(e->estimate) << ',' << format_double(e->se) << ',' << e->n_paths << '\n';
  }
  print(out, config, doc, text.str(), csv.str());
  return agree && unit_mean ? kExitPass : kExitChecksFailed;
}

int cmd_enumerate(const RunConfig& config, std::ostream& out) {
  const Problem p = load_problem(config, true);
  const Lattice lattice = build_lattice(p.spec, p.steps, p.nodes);
  OracleOptions opts;
  opts.max_pair_evaluations = config.pair_cap;
  opts.keep_table = true;
  const EnumerationResult r = enumerate_values(lattice, opts);
  const ValueField field = solve_game(lattice);
  const double v0 = field.V(0, lattice.root());
  const double tol = Tolerances{}.arithmetic;
  const bool pass = std::abs(r.upper - r.lower) <= tol && std::abs(r.upper - v0) <= tol;

  nlohmann::json doc = envelope(config, p, lattice);
  doc["enumeration"] = to_json(r);
  doc["V0"] = v0;
  doc["pass"] = pass;
  write_json(config, "enumeration.json", doc);
  std::ostringstream csv;
  write_payoff_csv(csv, r);
  write_atomic(std::filesystem::path(config.out) / "payoff.csv", csv.str());

  std::ostringstream text;
  text << std::setprecision(15) << p.spec->name << ": upper " << r.upper << ", lower " << r.lower << ", V(0,x0) "
       << v0 << "  (" << r.policy_count << " policies x " << r.rule_count << " rules on " << r.decision_nodes
       << " decision nodes)" << (pass ? "" : "  MISMATCH") << '\n';
  print(out, config, doc, text.str(), csv.str());
  return pass ? kExitPass : kExitChecksFailed;
}

int cmd_sweep(const RunConfig& config, std::ostream& out) {
  const Problem p = load_problem(config, false);
  nlohmann::json rows = nlohmann::json::array();
  std::ostringstream csv, text;
  csv << "steps,nodes_per_dim,dt,V0\n";
  text << std::setprecision(12) << p.spec->name << " refinement sweep\n";
  int steps = p.steps;
  nlohmann::json lattice_json;
  for (int level = 0; level < config.levels; ++level, steps *= 2) {
    const Lattice lattice = build_lattice(p.spec, steps, p.nodes);
    const double v0 = solve_game(lattice).V(0, lattice.root());
    if (level == 0) lattice_json = to_json(lattice.summary());
    rows.push_back({{"steps", steps}, {"nodes_per_dim", p.nodes}, {"dt", lattice.dt()}, {"V0", v0}});
    csv << steps << ',' << p.nodes << ',' << format_double(lattice.dt()) << ',' << format_double(v0) << '\n';
    text << "  steps " << std::setw(6) << steps << "  dt " << std::setw(12) << lattice.dt() << "  V0 " << v0 << '\n';
  }
  write_atomic(std::filesystem::path(config.out) / "sweep.csv", csv.str());
  nlohmann::json doc{{"config", to_json(config)}, {"seed", config.seed}, {"spec", p.spec->name},
                     {"lattice", lattice_json}, {"levels", rows}};
  write_json(config, "sweep.json", doc);
  print(out, config, doc, text.str(), csv.str());
  return kExitPass;
}

int cmd_list(const RunConfig& config, std::ostream& out) {
  nlohmann::json doc = nlohmann::json::array();
  std::ostringstream text, csv;
  csv << "name,dim,actions,fact,provenance,oracle\n";
  for (const auto& inst : catalog()) {
    doc.push_back(to_json(inst));
    text << inst.name << "  (dim " << inst.spec->dim << ", " << inst.spec->action_count() << " actions)\n"
         << "    " << inst.description << '\n';
    for (const auto& f : inst.facts) {
      text << "    - " << f.statement << "  [" << f.provenance << ": " << f.oracle << "]\n";
      csv << inst.name << ',' << inst.spec->dim << ',' << inst.spec->action_count() << ",\"" << f.statement << "\","
          << f.provenance << ",\"" << f.oracle << "\"\n";
    }
  }
  print(out, config, doc, text.str(), csv.str());
  return kExitPass;
}

}  // namespace

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j{{"instance", c.instance},
                   {"spec", c.spec_path},
                   {"tiny", c.tiny},
                   {"paths", c.n_paths},
                   {"seed", c.seed},
                   {"alt-policies", c.alt_policies},
                   {"eps", c.eps},
                   {"policy-cap", c.policy_cap},
                   {"rule-cap", c.rule_cap},
                   {"pair-cap", c.pair_cap},
                   {"levels", c.levels},
                   {"dump-paths", c.dump_paths},
                   {"out", c.out},
                   {"threads", c.threads},
                   {"format", c.format}};
  j["steps"] = c.steps ? nlohmann::json(*c.steps) : nlohmann::json(nullptr);
  j["nodes-per-dim"] = c.nodes_per_dim ? nlohmann::json(*c.nodes_per_dim) : nlohmann::json(nullptr);
  j["box-lower"] = c.box_lower;
  j["box-upper"] = c.box_upper;
  return j;
}

const std::vector<std::string>& setting_keys() {
  static const std::vector<std::string> keys{"instance", "spec",     "steps",      "nodes-per-dim", "box-lower",
                                             "box-upper", "tiny",    "paths",      "seed",          "alt-policies",
                                             "eps",       "policy-cap", "rule-cap", "pair-cap",      "levels",
                                             "dump-paths", "out",    "threads",    "format"};
  return keys;
}

void apply_setting(RunConfig& c, const std::string& key, const std::string& value) {
  if (key == "instance") {
    c.instance = value;
  } else if (key == "spec") {
    c.spec_path = value;
  } else if (key == "steps") {
    c.steps = static_cast<int>(parse_int(key, value));
  } else if (key == "nodes-per-dim") {
    c.nodes_per_dim = static_cast<int>(parse_int(key, value));
  } else if (key == "box-lower") {
    c.box_lower = parse_list(key, value);
  } else if (key == "box-upper") {
    c.box_upper = parse_list(key, value);
  } else if (key == "tiny") {
    c.tiny = parse_bool(key, value);
  } else if (key == "paths") {
    c.n_paths = parse_int(key, value);
  } else if (key == "seed") {
    c.seed = parse_u64(key, value);
  } else if (key == "alt-policies") {
    c.alt_policies = static_cast<int>(parse_int(key, value));
  } else if (key == "eps") {
    c.eps = parse_list(key, value);
  } else if (key == "policy-cap") {
    c.policy_cap = parse_u64(key, value);
  } else if (key == "rule-cap") {
    c.rule_cap = parse_u64(key, value);
  } else if (key == "pair-cap") {
    c.pair_cap = parse_u64(key, value);
  } else if (key == "levels") {
    c.levels = static_cast<int>(parse_int(key, value));
  } else if (key == "dump-paths") {
    c.dump_paths = parse_bool(key, value);
  } else if (key == "out") {
    c.out = value;
  } else if (key == "threads") {
    c.threads = static_cast<int>(parse_int(key, value));
  } else if (key == "format") {
    c.format = value;
  } else {
    throw Error("cli", "unknown setting '" + key + "'");
  }
}

void apply_config_json(RunConfig& c, const nlohmann::json& doc) {
  if (!doc.is_object()) throw Error("cli", "config file must hold a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (value.is_null()) continue;
    std::string text;
    if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_array()) {
      for (const auto& v : value) {
        if (!v.is_number()) throw Error("cli", "config '" + key + "' must be a list of numbers");
        text += (text.empty() ? "" : ",") + v.dump();
      }
    } else {
      text = value.dump();
    }
    apply_setting(c, key, text);
  }
}

void validate(const RunConfig& c) {
  auto positive = [](const char* name, long long v) {
    if (v <= 0) throw Error("cli", std::string(name) + " must be positive, got " + std::to_string(v));
  };
  if (c.instance.empty() == c.spec_path.empty()) throw Error("cli", "give exactly one of --instance and --spec");
  if (c.steps) positive("steps", *c.steps);
  if (c.nodes_per_dim) positive("nodes-per-dim", *c.nodes_per_dim);
  positive("paths", c.n_paths);
  positive("alt-policies", c.alt_policies);
  positive("levels", c.levels);
  positive("threads", c.threads);
  positive("policy-cap", static_cast<long long>(std::min<std::uint64_t>(c.policy_cap, 1ULL << 62)));
  positive("rule-cap", static_cast<long long>(std::min<std::uint64_t>(c.rule_cap, 1ULL << 62)));
  positive("pair-cap", static_cast<long long>(std::min<std::uint64_t>(c.pair_cap, 1ULL << 62)));
  for (double e : c.eps) {
    if (!(e >= 0.0 && e < 1.0)) throw Error("cli", "eps values must lie in [0, 1)");
  }
  if (c.format != "json" && c.format != "csv" && c.format != "text") {
    throw Error("cli", "format must be json, csv or text, got '" + c.format + "'");
  }
  if (c.out.empty()) throw Error("cli", "output directory must not be empty");
}

int run(const std::string& subcommand, const RunConfig& config, std::ostream& out) {
  if (subcommand == "list-instances") return cmd_list(config, out);
  validate(config);
  if (subcommand == "solve") return cmd_solve(config, out);
  if (subcommand == "certify") return cmd_certify(config, out);
  if (subcommand == "simulate") return cmd_simulate(config, out);
  if (subcommand == "enumerate") return cmd_enumerate(config, out);
  if (subcommand == "sweep") return cmd_sweep(config, out);
  throw Error("cli", "unknown subcommand '" + subcommand + "'");
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err, const EnvLookup& env) {
  CLI::App app{"Controller-vs-stopper games on lattices: solve, certify, simulate, enumerate"};
  app.set_help_flag("-h,--help", "Show help");
  std::string subcommand;
  std::string config_path;
  app.add_option("command", subcommand, "solve | certify | simulate | enumerate | sweep | list-instances")
      ->required()
      ->check(CLI::IsMember(kSubcommands));
  app.add_option("--config", config_path, "JSON config file (flags and SDGAME_* variables override it)");

  std::map<std::string, std::string> flag_values;
  const std::map<std::string, std::string> help{
      {"instance", "built-in instance name"},
      {"spec", "JSON spec file"},
      {"steps", "time steps"},
      {"nodes-per-dim", "grid nodes per coordinate"},
      {"box-lower", "state box lower corner, comma separated"},
      {"box-upper", "state box upper corner, comma separated"},
      {"paths", "Monte-Carlo paths"},
      {"seed", "random seed"},
      {"alt-policies", "sampled alternatives per check"},
      {"eps", "eps ladder, comma separated"},
      {"policy-cap", "exhaustive policy cap"},
      {"rule-cap", "exhaustive rule cap"},
      {"pair-cap", "oracle pair-evaluation cap"},
      {"levels", "sweep refinement levels"},
      {"out", "output directory"},
      {"threads", "worker threads"},
      {"format", "stdout format: json, csv or text"},
  };
  std::vector<std::pair<std::string, CLI::Option*>> options;
  for (const auto& key : setting_keys()) {
    if (key == "tiny" || key == "dump-paths") continue;
    options.emplace_back(key, app.add_option("--" + key, flag_values[key], help.at(key)));
  }
  bool tiny = false, dump_paths = false;
  auto* tiny_opt = app.add_flag("--tiny", tiny, "use the instance's tiny lattice");
  auto* dump_opt = app.add_flag("--dump-paths", dump_paths, "write sample paths (simulate)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error [cli]: " << e.what() << '\n';
    return kExitError;
  }

  try {
    RunConfig config;
    if (config_path.empty()) {
      if (auto v = env("SDGAME_CONFIG")) config_path = *v;
    }
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw Error("cli", "cannot open config file " + config_path);
      nlohmann::json doc;
      try {
        in >> doc;
      } catch (const nlohmann::json::exception& e) {
        throw Error("cli", "config file " + config_path + ": " + e.what());
      }
      apply_config_json(config, doc);
    }
    for (const auto& key : setting_keys()) {
      if (auto v = env(env_name(key))) apply_setting(config, key, *v);
    }
    for (const auto& [key, opt] : options) {
      if (opt->count()) apply_setting(config, key, flag_values[key]);
    }
    if (tiny_opt->count()) config.tiny = tiny;
    if (dump_opt->count()) config.dump_paths = dump_paths;
    return run(subcommand, config, out);
  } catch (const Error& e) {
    err << "error [" << e.module() << "]: " << e.message() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace sdgame::cli
