#pragma once

#include <Eigen/Dense>

namespace cavidyn::dvr {

enum class DvrKind { sinc_colbert_miller, harmonic_oscillator };

/// One coordinate's grid representation: collocation points plus the dense
/// kinetic-energy matrix in that grid basis. Immutable after construction.
struct DvrBasis {
  DvrKind kind;
  Eigen::VectorXd points;   // strictly increasing
  Eigen::MatrixXd kinetic;  // symmetric, E_h
  double mass;              // m_e, or 1 for the mass-weighted cavity mode

  int size() const { return static_cast<int>(points.size()); }
};

/// Uniform-grid Colbert-Miller sinc DVR on [q_min, q_max],
/// T_ij = (-1)^(i-j) / (2 m dq^2) * (pi^2/3 if i==j else 2/(i-j)^2).
DvrBasis build_sinc_dvr(int n, double q_min, double q_max, double mass);

/// Harmonic-oscillator DVR: grid points are eigenvalues of the position
/// operator in the n-state oscillator basis of frequency omega (mass 1,
/// mass-weighted coordinate); kinetic operator transformed to that grid.
DvrBasis build_ho_dvr(int n, double omega);

}  // namespace cavidyn::dvr
