#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "cavidyn/hilbert.hpp"
#include "cavidyn/model.hpp"

namespace cavidyn::hamiltonian {

using hilbert::Complex;
using hilbert::SpacePtr;
using hilbert::WaveFunction;

/// Per-term energy decomposition of the Pauli-Fierz Hamiltonian. Kinetic
/// energy is split between H_S and H_C by mode ownership.
struct TermExpectations {
  double h_s = 0.0;
  double h_c = 0.0;
  double h_sc = 0.0;
  double h_dse = 0.0;
  double total = 0.0;
};

enum class Term { v_s, v_c, v_sc, v_dse };

/// Hamiltonian on the product grid, applied matrix-free: dense per-mode
/// kinetic matrices plus one global multiplication operator. For the
/// Pauli-Fierz form the potential diagonal factorizes over the tensor
/// structure (transfer-subspace vectors plus cavity arrays), which is what
/// is precomputed; every term of the potential stays a pointwise
/// multiplication operator.
class HamiltonianOnGrid {
 public:
  /// generic grid Hamiltonian: per-mode kinetic from the space, explicit diagonal
  HamiltonianOnGrid(SpacePtr space, Eigen::VectorXd diagonal);

  /// N-molecule Pauli-Fierz assembly; the space must hold N transfer modes
  /// plus the cavity mode, with the transfer potential shifted so the enol
  /// minimum defines the zero of energy
  static HamiltonianOnGrid assemble(SpacePtr space, const model::ModelParams& params);

  const SpacePtr& space() const { return space_; }
  bool is_pauli_fierz() const { return pf_.has_value(); }
  const model::ModelParams& params() const;

  /// out = alpha * (H in) + beta * in
  void apply_into(const WaveFunction& in, WaveFunction& out, double alpha = 1.0,
                  double beta = 0.0) const;
  WaveFunction apply(const WaveFunction& in) const;

  /// kinetic term of a single mode only: out = T_m in (overwrites out)
  void apply_mode_kinetic(int mode, const WaveFunction& in, WaveFunction& out) const;

  double diagonal_value(std::int64_t k) const;
  /// materialized per-term potential diagonal (tests, small grids)
  Eigen::VectorXd term_diagonal(Term t) const;

  /// <H_S>, <H_C>, <H_SC>, <H_DSE> and their sum for a normalized state
  TermExpectations term_expectations(const WaveFunction& psi) const;

  double omega_c() const;

 private:
  struct PfData {
    model::ModelParams params;
    Eigen::VectorXd v_transfer;   // sum_i V(q_i) over the transfer subspace
    Eigen::VectorXd s_transfer;   // sum_i d(q_i)
    Eigen::VectorXd p_transfer;   // sum_i d(q_i)^2
    Eigen::VectorXd v_cavity;     // omega_c^2 x^2 / 2
    Eigen::VectorXd x_cavity;     // grid points of the cavity mode
    double c_sc = 0.0;            // sqrt(2 omega_c) g_N
    double c_dse = 0.0;           // g_N^2 / omega_c
  };

  HamiltonianOnGrid(SpacePtr space);
  void init_kinetic();
  double pf_diag(std::int64_t j, std::int64_t i) const;

  SpacePtr space_;
  std::optional<PfData> pf_;
  Eigen::VectorXd diag_;  // generic form only
  std::vector<Eigen::MatrixXd> kin_;
  // last mode kinetic expanded for the interleaved real view:
  // W(2i, 2j) = W(2i+1, 2j+1) = T(i, j)
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> w_last_;
};

/// free-function forms mirroring the module operations
inline HamiltonianOnGrid assemble(SpacePtr space, const model::ModelParams& params) {
  return HamiltonianOnGrid::assemble(std::move(space), params);
}
inline WaveFunction apply(const HamiltonianOnGrid& h, const WaveFunction& psi) {
  return h.apply(psi);
}
inline TermExpectations term_expectations(const HamiltonianOnGrid& h,
                                          const WaveFunction& psi) {
  return h.term_expectations(psi);
}

}  // namespace cavidyn::hamiltonian
