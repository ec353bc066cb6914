#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

namespace oracle {

// Rayleigh-Schroedinger series of mu(v + t) = sum_k E_k t^k for the band-th
// eigenstate of K + v M, built from a dense diagonalisation. Since
// dmu/dv = f, the m-th derivative of f is (m + 1)! E_{m+1}.
inline std::vector<double> rs_series(double q, double v, int band, int K, int R = 24) {
  const int dim = 2 * R + 1;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim), M = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    const double k = q + 2.0 * (i - R);
    M(i, i) = 0.5;
    if (i + 1 < dim) M(i, i + 1) = M(i + 1, i) = 0.25;
    H(i, i) = k * k;
  }
  H += v * M;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  const Eigen::VectorXd n0 = es.eigenvectors().col(band);
  const double E0 = es.eigenvalues()[band];
  Eigen::MatrixXd R0 = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i)
    if (i != band) R0 += es.eigenvectors().col(i) * es.eigenvectors().col(i).transpose() / (es.eigenvalues()[i] - E0);

  std::vector<Eigen::VectorXd> ns{n0};
  std::vector<double> E{E0};
  for (int k = 1; k <= K; ++k) {
    E.push_back(n0.dot(M * ns[k - 1]));
    Eigen::VectorXd rhs = -M * ns[k - 1];
    for (int j = 1; j <= k; ++j) rhs += E[j] * ns[k - j];
    ns.push_back(R0 * rhs);
  }
  return E;
}

// f and its first `order` derivatives.
inline std::vector<double> rs_overlap_derivatives(double q, double v, int band, int order) {
  const auto E = rs_series(q, v, band, order + 1);
  std::vector<double> out;
  double fact = 1.0;
  for (int m = 0; m <= order; ++m) {
    fact *= (m + 1);
    out.push_back(fact * E[m + 1]);
  }
  return out;
}

}  // namespace oracle
