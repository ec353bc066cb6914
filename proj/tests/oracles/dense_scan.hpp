#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

namespace oracle {

struct ScanParams {
  double kappa, n_atoms, u0, eta, delta_c;
};

// Ground-band overlap followed along a fine v grid by shifted inverse
// iteration: the shift sits just below the linear prediction of mu, so the
// tridiagonal system is positive definite and a plain Thomas sweep works.
class OverlapContinuation {
 public:
  OverlapContinuation(double q, int R = 32) : q_(q), R_(R), dim_(2 * R + 1) {
    kin_.resize(dim_);
    for (int i = 0; i < dim_; ++i) kin_[i] = (q + 2.0 * (i - R)) * (q + 2.0 * (i - R));
  }

  // Starts at depth v0 > 0 with a dense solve.
  void start(double v0) {
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim_, dim_);
    for (int i = 0; i < dim_; ++i) {
      H(i, i) = kin_[i] + 0.5 * v0;
      if (i + 1 < dim_) H(i, i + 1) = H(i + 1, i) = 0.25 * v0;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    a_ = es.eigenvectors().col(0);
    v_ = v0;
    mu_ = es.eigenvalues()[0];
    f_ = overlap();
  }

  double step_to(double v) {
    const double sigma = mu_ + f_ * (v - v_) - 1e-5 * (1.0 + std::abs(mu_));
    for (int it = 0; it < 2; ++it) {
      solve(v, sigma);
      a_.normalize();
    }
    v_ = v;
    mu_ = rayleigh(v);
    f_ = overlap();
    return f_;
  }

  double f() const { return f_; }

 private:
  double overlap() const {
    double s = 0;
    for (int i = 0; i + 1 < dim_; ++i) s += a_[i] * a_[i + 1];
    return 0.5 + 0.5 * s;
  }

  double rayleigh(double v) const {
    double s = 0;
    for (int i = 0; i < dim_; ++i) {
      s += (kin_[i] + 0.5 * v) * a_[i] * a_[i];
      if (i + 1 < dim_) s += 0.5 * v * a_[i] * a_[i + 1];
    }
    return s;
  }

  void solve(double v, double sigma) {
    std::vector<double> c(dim_), d(dim_);
    const double off = 0.25 * v;
    double b = kin_[0] + 0.5 * v - sigma;
    c[0] = off / b;
    d[0] = a_[0] / b;
    for (int i = 1; i < dim_; ++i) {
      b = kin_[i] + 0.5 * v - sigma - off * c[i - 1];
      c[i] = off / b;
      d[i] = (a_[i] - off * d[i - 1]) / b;
    }
    a_[dim_ - 1] = d[dim_ - 1];
    for (int i = dim_ - 2; i >= 0; --i) a_[i] = d[i] - c[i] * a_[i + 1];
  }

  double q_;
  int R_, dim_;
  std::vector<double> kin_;
  Eigen::VectorXd a_;
  double v_ = 0, mu_ = 0, f_ = 0.5;
};

// Photon numbers of all sign changes of the state function on a uniform
// grid of `points` depths up to U0 n_max, located by linear interpolation.
inline std::vector<double> dense_scan_branches(double q, const ScanParams& p, int points = 200000) {
  const double vmax = p.u0 * p.eta * p.eta / (p.kappa * p.kappa) * (1.0 + 1e-9);
  const double h = vmax / points;
  auto G = [&](double v, double f) {
    const double D = p.delta_c - p.n_atoms * p.u0 * f;
    return v * p.kappa * p.kappa + v * D * D - p.eta * p.eta * p.u0;
  };
  OverlapContinuation oc(q);
  oc.start(h);
  std::vector<double> roots;
  double vp = 0, gp = G(0.0, 0.5);
  for (int i = 1; i <= points; ++i) {
    const double v = i * h;
    const double f = i == 1 ? oc.f() : oc.step_to(v);
    const double g = G(v, f);
    if ((gp < 0) != (g < 0)) roots.push_back((vp - gp * (v - vp) / (g - gp)) / p.u0);
    vp = v;
    gp = g;
  }
  return roots;
}

}  // namespace oracle
