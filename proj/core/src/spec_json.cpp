#include "sdgame/spec_json.hpp"

#include <algorithm>
#include <fstream>
#include <memory>

#include "sdgame/error.hpp"

namespace sdgame {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& what) { throw Error("model", "spec JSON: " + what); }

const json& need(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) fail(std::string("missing key '") + key + "'");
  return obj.at(key);
}

Vector to_vector(const json& j, Eigen::Index expected, const std::string& what) {
  if (!j.is_array()) fail(what + " must be an array");
  if (expected >= 0 && static_cast<Eigen::Index>(j.size()) != expected) {
    fail(what + " has length " + std::to_string(j.size()) + ", expected " + std::to_string(expected));
  }
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) fail(what + " entries must be numbers");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

Matrix to_matrix(const json& j, Eigen::Index rows, Eigen::Index cols, const std::string& what) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) {
    fail(what + " must be an array of " + std::to_string(rows) + " rows");
  }
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    m.row(r) = to_vector(j[static_cast<std::size_t>(r)], cols, what + " row").transpose();
  }
  return m;
}

std::string family(const json& j, const std::string& what) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
    fail(what + " needs a string 'type'");
  }
  return j.at("type").get<std::string>();
}

VolatilityFn parse_sigma(const json& j, int n) {
  const std::string type = family(j, "sigma");
  if (type == "constant") {
    Matrix value = to_matrix(need(j, "value"), n, n, "sigma.value");
    return [value](double, const Vector&) { return value; };
  }
  if (type == "affine") {
    Matrix c = j.contains("constant") ? to_matrix(j.at("constant"), n, n, "sigma.constant")
                                      : Matrix::Zero(n, n);
    Matrix tm = j.contains("time") ? to_matrix(j.at("time"), n, n, "sigma.time") : Matrix::Zero(n, n);
    std::vector<Matrix> sm;
    if (j.contains("state")) {
      const json& s = j.at("state");
      if (!s.is_array() || static_cast<int>(s.size()) != n) fail("sigma.state must list dim matrices");
      for (const auto& m : s) sm.push_back(to_matrix(m, n, n, "sigma.state"));
    }
    return [c, tm, sm](double t, const Vector& x) {
      Matrix out = c + t * tm;
      for (std::size_t i = 0; i < sm.size(); ++i) out += x[static_cast<Eigen::Index>(i)] * sm[i];
      return out;
    };
  }
  fail("unknown sigma type '" + type + "'");
}

DriftFn parse_drift(const json& j, int n, Eigen::Index m) {
  const std::string type = family(j, "drift");
  if (type == "constant") {
    Vector value = to_vector(need(j, "value"), n, "drift.value");
    return [value](double, const Vector&, const Vector&) { return value; };
  }
  if (type == "affine") {
    Vector c = j.contains("constant") ? to_vector(j.at("constant"), n, "drift.constant") : Vector::Zero(n);
    Vector tv = j.contains("time") ? to_vector(j.at("time"), n, "drift.time") : Vector::Zero(n);
    Matrix sm = j.contains("state") ? to_matrix(j.at("state"), n, n, "drift.state") : Matrix::Zero(n, n);
    Matrix am = j.contains("action") ? to_matrix(j.at("action"), n, m, "drift.action") : Matrix::Zero(n, m);
    return [c, tv, sm, am](double t, const Vector& x, const Vector& a) -> Vector {
      return c + t * tv + sm * x + am * a;
    };
  }
  fail("unknown drift type '" + type + "'");
}

struct Table {
  int coordinate = 0;
  std::vector<double> points;
  std::vector<double> values;

  double operator()(const Vector& x) const {
    const double s = x[coordinate];
    if (s <= points.front()) return values.front();
    if (s >= points.back()) return values.back();
    auto it = std::upper_bound(points.begin(), points.end(), s);
    const std::size_t hi = static_cast<std::size_t>(it - points.begin());
    const std::size_t lo = hi - 1;
    const double w = (s - points[lo]) / (points[hi] - points[lo]);
    return (1.0 - w) * values[lo] + w * values[hi];
  }
};

Table parse_table(const json& j, int n, const std::string& what) {
  Table table;
  table.coordinate = need(j, "coordinate").get<int>();
  if (table.coordinate < 0 || table.coordinate >= n) fail(what + ".coordinate out of range");
  Vector p = to_vector(need(j, "points"), -1, what + ".points");
  Vector v = to_vector(need(j, "values"), p.size(), what + ".values");
  if (p.size() < 1) fail(what + " needs at least one point");
  for (Eigen::Index i = 1; i < p.size(); ++i) {
    if (!(p[i] > p[i - 1])) fail(what + ".points must be strictly increasing");
  }
  table.points.assign(p.data(), p.data() + p.size());
  table.values.assign(v.data(), v.data() + v.size());
  return table;
}

RunningRewardFn parse_running(const json& j, int n, Eigen::Index m) {
  const std::string type = family(j, "running_reward");
  if (type == "constant") {
    double value = need(j, "value").get<double>();
    return [value](double, const Vector&, const Vector&) { return value; };
  }
  if (type == "affine") {
    double c = j.value("constant", 0.0);
    double tc = j.value("time", 0.0);
    Vector sv = j.contains("state") ? to_vector(j.at("state"), n, "running_reward.state") : Vector::Zero(n);
    Vector av = j.contains("action") ? to_vector(j.at("action"), m, "running_reward.action") : Vector::Zero(m);
    return [c, tc, sv, av](double t, const Vector& x, const Vector& a) {
      return c + tc * t + sv.dot(x) + av.dot(a);
    };
  }
  if (type == "tabulated") {
    Table table = parse_table(j, n, "running_reward");
    return [table](double, const Vector& x, const Vector&) { return table(x); };
  }
  fail("unknown running_reward type '" + type + "'");
}

TerminalRewardFn parse_terminal(const json& j, int n) {
  const std::string type = family(j, "terminal_reward");
  if (type == "constant") {
    double value = need(j, "value").get<double>();
    return [value](const Vector&) { return value; };
  }
  if (type == "affine") {
    double c = j.value("constant", 0.0);
    Vector sv = j.contains("state") ? to_vector(j.at("state"), n, "terminal_reward.state") : Vector::Zero(n);
    return [c, sv](const Vector& x) { return c + sv.dot(x); };
  }
  if (type == "tabulated") {
    Table table = parse_table(j, n, "terminal_reward");
    return [table](const Vector& x) { return table(x); };
  }
  fail("unknown terminal_reward type '" + type + "'");
}

}  // namespace

GameSpec spec_from_json(const json& doc) {
  if (!doc.is_object()) fail("document must be an object");
  GameSpec spec;
  try {
    spec.name = doc.value("name", std::string("custom"));
    spec.dim = need(doc, "dim").get<int>();
    if (spec.dim < 1) fail("dim must be positive");
    const int n = spec.dim;
    spec.horizon = need(doc, "horizon").get<double>();
    spec.initial_state = to_vector(need(doc, "initial_state"), n, "initial_state");
    const json& actions = need(doc, "actions");
    if (!actions.is_array() || actions.empty()) fail("actions must be a nonempty array");
    for (const auto& a : actions) {
      spec.actions.push_back(a.is_number() ? Vector::Constant(1, a.get<double>())
                                           : to_vector(a, -1, "action"));
    }
    const Eigen::Index m = spec.actions.front().size();
    spec.bound_K = need(doc, "bound_K").get<double>();
    const json& box = need(doc, "state_box");
    spec.state_box.lower = to_vector(need(box, "lower"), n, "state_box.lower");
    spec.state_box.upper = to_vector(need(box, "upper"), n, "state_box.upper");
    spec.sigma = parse_sigma(need(doc, "sigma"), n);
    spec.drift = parse_drift(need(doc, "drift"), n, m);
    spec.running_reward = parse_running(need(doc, "running_reward"), n, m);
    spec.terminal_reward = parse_terminal(need(doc, "terminal_reward"), n);
  } catch (const json::exception& e) {
    fail(e.what());
  }
  return spec;
}

GameSpec load_spec_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("model", "cannot open spec file '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw Error("model", "spec file '" + path + "' is not valid JSON: " + e.what());
  }
  return spec_from_json(doc);
}

}  // namespace sdgame
