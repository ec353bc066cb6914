#include "cavityband/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace cavityband::cli {

using nlohmann::json;

bool is_command(const std::string& name) {
  for (const char* c : commands)
    if (name == c) return true;
  return false;
}

namespace {

std::string join(const std::vector<FieldError>& errors) {
  std::ostringstream os;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (i) os << "; ";
    os << errors[i].field << ": " << errors[i].message;
  }
  return os.str();
}

class Reader {
 public:
  explicit Reader(std::vector<FieldError>& errs) : errs_(errs) {}

  void fail(const std::string& field, const std::string& msg) { errs_.push_back({field, msg}); }

  void allow(const json& obj, const std::string& where, std::set<std::string> keys) {
    if (!obj.is_object()) return;
    for (auto it = obj.begin(); it != obj.end(); ++it)
      if (!keys.count(it.key())) fail(where.empty() ? it.key() : where + "." + it.key(), "unknown key");
  }

  bool number(const json& obj, const char* key, const std::string& field, double& out) {
    if (!obj.contains(key)) return false;
    const json& x = obj.at(key);
    if (!x.is_number()) {
      fail(field, "must be a number");
      return false;
    }
    out = x.get<double>();
    if (!std::isfinite(out)) {
      fail(field, "must be finite");
      return false;
    }
    return true;
  }

  bool integer(const json& obj, const char* key, const std::string& field, int& out) {
    if (!obj.contains(key)) return false;
    const json& x = obj.at(key);
    if (!x.is_number_integer()) {
      fail(field, "must be an integer");
      return false;
    }
    out = x.get<int>();
    return true;
  }

  bool boolean(const json& obj, const char* key, const std::string& field, bool& out) {
    if (!obj.contains(key)) return false;
    if (!obj.at(key).is_boolean()) {
      fail(field, "must be true or false");
      return false;
    }
    out = obj.at(key).get<bool>();
    return true;
  }

  bool string(const json& obj, const char* key, const std::string& field, std::string& out) {
    if (!obj.contains(key)) return false;
    if (!obj.at(key).is_string()) {
      fail(field, "must be a string");
      return false;
    }
    out = obj.at(key).get<std::string>();
    return true;
  }

  // Either an explicit ascending array or {start, stop, points[, log]}.
  bool grid(const json& obj, const char* key, std::vector<double>& out) {
    if (!obj.contains(key)) return false;
    const std::string field = key;
    const json& g = obj.at(key);
    out.clear();
    if (g.is_array()) {
      for (const auto& x : g) {
        if (!x.is_number() || !std::isfinite(x.get<double>())) {
          fail(field, "entries must be finite numbers");
          return false;
        }
        out.push_back(x.get<double>());
      }
    } else if (g.is_object()) {
      allow(g, field, {"start", "stop", "points", "log"});
      double a = 0, b = 0;
      int n = 0;
      bool lg = false;
      const bool ok = number(g, "start", field + ".start", a) & number(g, "stop", field + ".stop", b) &
                      integer(g, "points", field + ".points", n);
      boolean(g, "log", field + ".log", lg);
      if (!ok) {
        fail(field, "needs start, stop and points");
        return false;
      }
      if (n < 1) {
        fail(field + ".points", "must be at least 1");
        return false;
      }
      if (lg && !(a > 0 && b > 0)) {
        fail(field, "log grid needs positive start and stop");
        return false;
      }
      for (int i = 0; i < n; ++i) {
        const double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
        out.push_back(lg ? a * std::pow(b / a, t) : (i == n - 1 && n > 1 ? b : a + (b - a) * t));
      }
    } else {
      fail(field, "must be an array or {start, stop, points}");
      return false;
    }
    if (out.empty()) {
      fail(field, "must not be empty");
      return false;
    }
    for (std::size_t i = 1; i < out.size(); ++i)
      if (!(out[i] > out[i - 1])) {
        fail(field, "must be strictly ascending");
        return false;
      }
    return true;
  }

 private:
  std::vector<FieldError>& errs_;
};

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = i == n - 1 ? b : a + (b - a) * i / (n - 1);
  return v;
}

}  // namespace

ConfigError::ConfigError(std::vector<FieldError> errors)
    : std::runtime_error(join(errors)), errors_(std::move(errors)) {}

RunConfig parse_config(const json& doc, const std::string& command) {
  std::vector<FieldError> errs;
  Reader rd(errs);
  RunConfig c;
  c.command = command;

  if (!doc.is_object()) throw ConfigError(std::vector<FieldError>{{"(root)", "config must be a JSON object"}});
  rd.allow(doc, "", {"command", "params", "q", "q_grid", "band", "delta_grid", "eta_grid", "nph_grid", "R", "J",
                     "analytic_constant", "red_detuned", "method", "critical", "swallowtail", "workers", "plots",
                     "cache_dir"});

  if (!is_command(command)) rd.fail("command", "unknown command '" + command + "'");
  std::string named;
  if (rd.string(doc, "command", "command", named) && named != command)
    rd.fail("command", "config is for '" + named + "', not '" + command + "'");

  if (!doc.contains("params") || !doc.at("params").is_object()) {
    rd.fail("params", "required object");
  } else {
    const json& p = doc.at("params");
    rd.allow(p, "params", {"kappa", "n_atoms", "u0", "eta", "delta_c"});
    if (!rd.number(p, "kappa", "params.kappa", c.params.kappa)) rd.fail("params.kappa", "required");
    if (!rd.number(p, "n_atoms", "params.n_atoms", c.params.n_atoms)) rd.fail("params.n_atoms", "required");
    rd.number(p, "u0", "params.u0", c.params.u0);
    rd.number(p, "eta", "params.eta", c.params.eta);
    rd.number(p, "delta_c", "params.delta_c", c.params.delta_c);
    for (const auto& e : validate_params(c.params)) rd.fail("params." + e.field, e.message);
  }

  if (rd.number(doc, "q", "q", c.q) && (c.q < -1 || c.q > 1)) rd.fail("q", "must lie in [-1, 1]");
  const bool has_q_grid = rd.grid(doc, "q_grid", c.q_grid);
  if (has_q_grid && (c.q_grid.front() < -1 || c.q_grid.back() > 1)) rd.fail("q_grid", "must lie in [-1, 1]");
  if (rd.integer(doc, "band", "band", c.band) && c.band < 0) rd.fail("band", "must be >= 0");
  const bool has_delta = rd.grid(doc, "delta_grid", c.delta_grid);
  const bool has_eta = rd.grid(doc, "eta_grid", c.eta_grid);
  const bool has_nph = rd.grid(doc, "nph_grid", c.nph_grid);
  if (has_eta && c.eta_grid.front() < 0) rd.fail("eta_grid", "must be >= 0");
  if (has_nph && c.nph_grid.front() < 0) rd.fail("nph_grid", "must be >= 0");
  if (rd.integer(doc, "R", "R", c.R) && (c.R < 4 || c.R > max_truncation))
    rd.fail("R", "must be in [4, 256]");
  if (rd.integer(doc, "J", "J", c.J) && (c.J < 1 || c.J >= c.R)) rd.fail("J", "must satisfy 1 <= J < R");

  std::string ac;
  if (rd.string(doc, "analytic_constant", "analytic_constant", ac)) {
    if (ac == "derivation")
      c.analytic = AnalyticConstant::derivation;
    else if (ac == "printed")
      c.analytic = AnalyticConstant::printed;
    else
      rd.fail("analytic_constant", "must be 'derivation' or 'printed'");
  }
  rd.boolean(doc, "red_detuned", "red_detuned", c.red_detuned);
  if (c.red_detuned && c.params.u0 > 0) rd.fail("red_detuned", "needs params.u0 < 0");
  if (c.red_detuned && command != "lineshape") rd.fail("red_detuned", "only supported by lineshape");
  if (!c.red_detuned && c.params.u0 < 0 && command != "scurve")
    rd.fail("params.u0", "negative u0 needs lineshape with red_detuned = true");
  if (rd.string(doc, "method", "method", c.method) && c.method != "method1" && c.method != "method2" &&
      c.method != "both")
    rd.fail("method", "must be 'method1', 'method2' or 'both'");

  if (doc.contains("critical")) {
    const json& cr = doc.at("critical");
    if (!cr.is_object()) {
      rd.fail("critical", "must be an object");
    } else {
      rd.allow(cr, "critical", {"delta_lo", "delta_hi"});
      double lo = 0, hi = 0;
      const bool a = rd.number(cr, "delta_lo", "critical.delta_lo", lo);
      const bool b = rd.number(cr, "delta_hi", "critical.delta_hi", hi);
      if (a != b) rd.fail("critical", "give both delta_lo and delta_hi");
      if (a && b) {
        if (!(hi > lo)) rd.fail("critical.delta_hi", "must exceed delta_lo");
        c.delta_lo = lo;
        c.delta_hi = hi;
      }
    }
  }

  if (doc.contains("swallowtail")) {
    const json& sw = doc.at("swallowtail");
    if (!sw.is_object()) {
      rd.fail("swallowtail", "must be an object");
    } else {
      auto& s = c.swallowtail;
      rd.allow(sw, "swallowtail", {"v_lo", "v_hi", "v_points", "find_q_sw", "q_lo", "q_hi", "q_tol"});
      rd.number(sw, "v_lo", "swallowtail.v_lo", s.v_lo);
      rd.number(sw, "v_hi", "swallowtail.v_hi", s.v_hi);
      rd.integer(sw, "v_points", "swallowtail.v_points", s.v_points);
      rd.boolean(sw, "find_q_sw", "swallowtail.find_q_sw", s.find_q_sw);
      rd.number(sw, "q_lo", "swallowtail.q_lo", s.q_lo);
      rd.number(sw, "q_hi", "swallowtail.q_hi", s.q_hi);
      rd.number(sw, "q_tol", "swallowtail.q_tol", s.q_tol);
      if (!(s.v_lo > 0 && s.v_hi > s.v_lo)) rd.fail("swallowtail.v_lo", "need 0 < v_lo < v_hi");
      if (s.v_points < 2) rd.fail("swallowtail.v_points", "must be at least 2");
      if (!(0 <= s.q_lo && s.q_lo < s.q_hi && s.q_hi <= 1)) rd.fail("swallowtail.q_lo", "need 0 <= q_lo < q_hi <= 1");
      if (!(s.q_tol > 0)) rd.fail("swallowtail.q_tol", "must be positive");
    }
  }

  int workers = 0;
  if (rd.integer(doc, "workers", "workers", workers)) {
    if (workers < 0)
      rd.fail("workers", "must be >= 0");
    else
      c.workers = static_cast<unsigned>(workers);
  }
  rd.boolean(doc, "plots", "plots", c.plots);
  rd.string(doc, "cache_dir", "cache_dir", c.cache_dir);

  // per-command requirements and defaults
  if (command == "lineshape" && !has_delta) rd.fail("delta_grid", "required for lineshape");
  if (command == "scurve" && !has_nph) rd.fail("nph_grid", "required for scurve");
  if (command == "bifmap") {
    if (!has_delta) rd.fail("delta_grid", "required for bifmap");
    if (!has_eta) rd.fail("eta_grid", "required for bifmap");
  }
  if (command == "band" && !has_q_grid) c.q_grid = linspace(-1.0, 1.0, 41);
  if (command == "validate" && !has_q_grid) c.q_grid = linspace(-1.0, 1.0, 21);

  if (!errs.empty()) throw ConfigError(std::move(errs));
  return c;
}

RunConfig load_config(const std::string& path, const std::string& command) {
  std::ifstream in(path);
  if (!in) throw ConfigError(std::vector<FieldError>{{"--config", "cannot open '" + path + "'"}});
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::vector<FieldError>{{"--config", std::string("invalid JSON: ") + e.what()}});
  }
  return parse_config(doc, command);
}

json RunConfig::canonical() const {
  json j;
  j["command"] = command;
  j["params"] = {{"kappa", params.kappa},
                 {"n_atoms", params.n_atoms},
                 {"u0", params.u0},
                 {"eta", params.eta},
                 {"delta_c", params.delta_c}};
  j["q"] = q;
  j["q_grid"] = q_grid;
  j["band"] = band;
  j["delta_grid"] = delta_grid;
  j["eta_grid"] = eta_grid;
  j["nph_grid"] = nph_grid;
  j["R"] = R;
  j["J"] = J;
  j["analytic_constant"] = analytic == AnalyticConstant::printed ? "printed" : "derivation";
  j["red_detuned"] = red_detuned;
  j["method"] = method;
  j["critical"] = json::object();
  if (delta_lo) j["critical"]["delta_lo"] = *delta_lo;
  if (delta_hi) j["critical"]["delta_hi"] = *delta_hi;
  j["swallowtail"] = {{"v_lo", swallowtail.v_lo},           {"v_hi", swallowtail.v_hi},
                      {"v_points", swallowtail.v_points},   {"find_q_sw", swallowtail.find_q_sw},
                      {"q_lo", swallowtail.q_lo},           {"q_hi", swallowtail.q_hi},
                      {"q_tol", swallowtail.q_tol}};
  j["plots"] = plots;
  return j;
}

}  // namespace cavityband::cli
