#include "cavityband/model.hpp"

#include <cmath>

namespace cavityband {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_params: return "invalid-params";
    case ErrorKind::inconsistent_sign: return "inconsistent-sign";
    case ErrorKind::truncation: return "truncation";
    case ErrorKind::derivative_unavailable: return "derivative-unavailable";
    case ErrorKind::not_found: return "not-found";
    case ErrorKind::degenerate_window: return "degenerate-window";
    case ErrorKind::extremization_failure: return "extremization-failure";
    case ErrorKind::validation_failure: return "validation-failure";
    case ErrorKind::numerical: return "numerical-error";
    case ErrorKind::inconclusive: return "inconclusive";
    case ErrorKind::internal: return "internal-error";
  }
  return "unknown";
}

std::vector<ParamError> validate_params(const SystemParams& p) {
  std::vector<ParamError> errs;
  auto check_finite = [&](const char* name, double x) {
    if (!std::isfinite(x)) errs.push_back({name, std::string(name) + " must be finite"});
    return std::isfinite(x);
  };
  if (check_finite("kappa", p.kappa) && !(p.kappa > 0))
    errs.push_back({"kappa", "kappa must be positive"});
  if (check_finite("n_atoms", p.n_atoms) && !(p.n_atoms >= 1))
    errs.push_back({"n_atoms", "n_atoms must be at least 1"});
  if (check_finite("u0", p.u0) && p.u0 == 0)
    errs.push_back({"u0", "u0 must be nonzero"});
  if (check_finite("eta", p.eta) && !(p.eta >= 0))
    errs.push_back({"eta", "eta must be non-negative"});
  check_finite("delta_c", p.delta_c);
  return errs;
}

const SystemParams& require_valid(const SystemParams& p) {
  auto errs = validate_params(p);
  if (!errs.empty()) {
    std::string msg;
    for (const auto& e : errs) {
      if (!msg.empty()) msg += "; ";
      msg += e.field + ": " + e.message;
    }
    throw Error(ErrorKind::invalid_params, msg);
  }
  return p;
}

QuasiMomentum::QuasiMomentum(double q) : q_(q) {
  if (!(q >= -1.0 && q <= 1.0))
    throw Error(ErrorKind::invalid_params, "quasi-momentum must lie in [-1, 1]");
}

double n_ph_from_depth(LatticeDepth v, const SystemParams& p) {
  require_valid(p);
  double n = v.v / p.u0;
  if (n < 0)
    throw Error(ErrorKind::inconsistent_sign, "lattice depth and u0 have opposite signs");
  return n == 0 ? 0.0 : n;
}

}  // namespace cavityband
