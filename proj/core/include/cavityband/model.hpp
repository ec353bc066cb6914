#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cavityband {

// Units used by every interface in the library:
//   energy      E_R = hbar^2 k_c^2 / 2M (recoil energy)
//   frequency   omega_R = E_R / hbar
//   length      1 / k_c
//   time        hbar / E_R
// Nothing here converts to or from SI.
namespace units {
inline constexpr const char* energy = "E_R";
inline constexpr const char* frequency = "omega_R";
inline constexpr const char* length = "1/k_c";
inline constexpr const char* time = "hbar/E_R";
}  // namespace units

enum class ErrorKind {
  invalid_params,
  inconsistent_sign,
  truncation,
  derivative_unavailable,
  not_found,
  degenerate_window,
  extremization_failure,
  validation_failure,
  numerical,
  inconclusive,
  internal,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Cavity and atom constants, all frequencies in omega_R.
struct SystemParams {
  double kappa = 1.0;
  double n_atoms = 1.0;
  double u0 = 1.0;
  double eta = 0.0;
  double delta_c = 0.0;

  double n_max() const { return eta * eta / (kappa * kappa); }
  double nu0() const { return n_atoms * u0; }
};

struct ParamError {
  std::string field;
  std::string message;
};

std::vector<ParamError> validate_params(const SystemParams& p);

// Throws Error(invalid_params) listing every violation.
const SystemParams& require_valid(const SystemParams& p);

class QuasiMomentum {
 public:
  explicit QuasiMomentum(double q);
  double value() const { return q_; }
  operator double() const { return q_; }

 private:
  double q_;
};

struct LatticeDepth {
  double v = 0.0;
};

double n_ph_from_depth(LatticeDepth v, const SystemParams& p);

}  // namespace cavityband
