#include "cavidyn/dvr.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace cavidyn::dvr {

DvrBasis build_sinc_dvr(int n, double q_min, double q_max, double mass) {
  if (n < 2) throw std::invalid_argument("sinc DVR needs n >= 2");
  if (!(q_max > q_min)) throw std::invalid_argument("sinc DVR needs q_max > q_min");
  if (!(mass > 0.0)) throw std::invalid_argument("sinc DVR needs mass > 0");

  const double dq = (q_max - q_min) / (n - 1);
  Eigen::VectorXd pts(n);
  for (int i = 0; i < n; ++i) pts[i] = q_min + i * dq;

  const double pref = 1.0 / (2.0 * mass * dq * dq);
  Eigen::MatrixXd t(n, n);
  for (int i = 0; i < n; ++i) {
    t(i, i) = pref * std::numbers::pi * std::numbers::pi / 3.0;
    for (int j = 0; j < i; ++j) {
      const int d = i - j;
      const double sign = (d % 2 == 0) ? 1.0 : -1.0;
      t(i, j) = t(j, i) = pref * sign * 2.0 / (static_cast<double>(d) * d);
    }
  }
  return {DvrKind::sinc_colbert_miller, std::move(pts), std::move(t), mass};
}

DvrBasis build_ho_dvr(int n, double omega) {
  if (n < 2) throw std::invalid_argument("HO DVR needs n >= 2");
  if (!(omega > 0.0)) throw std::invalid_argument("HO DVR needs omega > 0");

  // position operator in the number basis, x_{v,v+1} = sqrt((v+1)/(2 omega))
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, n);
  for (int v = 0; v + 1 < n; ++v) {
    const double e = std::sqrt((v + 1) / (2.0 * omega));
    x(v, v + 1) = x(v + 1, v) = e;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(x);
  Eigen::VectorXd pts = es.eigenvalues();  // ascending
  const Eigen::MatrixXd& u = es.eigenvectors();

  // kinetic operator p^2/2 in the number basis
  Eigen::MatrixXd t_fbr = Eigen::MatrixXd::Zero(n, n);
  for (int v = 0; v < n; ++v) t_fbr(v, v) = 0.5 * omega * (v + 0.5);
  for (int v = 0; v + 2 < n; ++v) {
    const double e = -0.25 * omega * std::sqrt(double(v + 1) * (v + 2));
    t_fbr(v, v + 2) = t_fbr(v + 2, v) = e;
  }
  Eigen::MatrixXd t = u.transpose() * t_fbr * u;
  t = 0.5 * (t + t.transpose().eval());  // clean round-off asymmetry

  return {DvrKind::harmonic_oscillator, std::move(pts), std::move(t), 1.0};
}

}  // namespace cavidyn::dvr
