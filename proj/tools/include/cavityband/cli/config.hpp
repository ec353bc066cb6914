#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cavityband/bistability.hpp"
#include "cavityband/model.hpp"
#include "json.hpp"

namespace cavityband::cli {

inline constexpr const char* commands[] = {"lineshape", "band",        "scurve",    "bifmap",
                                           "critical",  "swallowtail", "stability", "validate"};

bool is_command(const std::string& name);

struct FieldError {
  std::string field;
  std::string message;
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<FieldError> errors);
  const std::vector<FieldError>& errors() const { return errors_; }

 private:
  std::vector<FieldError> errors_;
};

struct SwallowtailConfig {
  double v_lo = 1e-3;
  double v_hi = 50.0;
  int v_points = 2000;
  bool find_q_sw = false;
  double q_lo = 0.4;
  double q_hi = 0.7;
  double q_tol = 1e-3;
};

struct RunConfig {
  std::string command;
  SystemParams params;
  double q = 0.0;
  std::vector<double> q_grid;
  int band = 0;
  std::vector<double> delta_grid;
  std::vector<double> eta_grid;
  std::vector<double> nph_grid;
  int R = default_truncation;
  int J = -1;  // -1: R - 4
  AnalyticConstant analytic = AnalyticConstant::derivation;
  bool red_detuned = false;
  std::string method = "method2";  // method1, method2, both
  std::optional<double> delta_lo, delta_hi;  // critical-point search window
  SwallowtailConfig swallowtail;
  unsigned workers = 0;
  bool plots = true;
  std::string cache_dir;  // empty: <out>/.cache

  // the part of the config that determines the artifacts
  nlohmann::json canonical() const;
};

// Throws ConfigError with one entry per offending field.
RunConfig parse_config(const nlohmann::json& doc, const std::string& command);
RunConfig load_config(const std::string& path, const std::string& command);

}  // namespace cavityband::cli
