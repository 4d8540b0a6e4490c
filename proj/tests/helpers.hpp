#pragma once

#include <memory>
#include <random>

#include "cavidyn/dvr.hpp"
#include "cavidyn/hamiltonian.hpp"
#include "cavidyn/hilbert.hpp"
#include "cavidyn/model.hpp"
#include "cavidyn/units.hpp"

namespace testutil {

using namespace cavidyn;

/// N transfer modes + cavity on reduced grids
inline hilbert::SpacePtr small_space(const model::ModelParams& p, int nq, int nc) {
  std::vector<dvr::DvrBasis> modes;
  const auto q = dvr::build_sinc_dvr(nq, -1.5, 2.1, p.mu_S);
  for (int i = 0; i < p.n_molecules; ++i) modes.push_back(q);
  modes.push_back(dvr::build_ho_dvr(nc, p.omega_c));
  return std::make_shared<hilbert::ProductSpace>(std::move(modes), true);
}

/// normalized pseudo-random state
inline hilbert::WaveFunction random_state(hilbert::SpacePtr space, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  hilbert::WaveFunction psi(std::move(space));
  for (auto& c : psi.amplitudes()) c = {g(rng), g(rng)};
  psi.normalize();
  return psi;
}

/// ground factor of a 1D grid Hamiltonian (dense)
inline Eigen::VectorXcd ground_factor(const dvr::DvrBasis& b, const Eigen::VectorXd& pot) {
  Eigen::MatrixXd h = b.kinetic;
  h.diagonal() += pot;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
  Eigen::VectorXd g = es.eigenvectors().col(0);
  if (g.sum() < 0) g = -g;
  return g.cast<hilbert::Complex>();
}

/// product initial state on a small space
inline hilbert::WaveFunction small_initial_state(const hilbert::SpacePtr& space,
                                                 const model::ModelParams& p) {
  std::vector<Eigen::VectorXcd> factors;
  for (int m = 0; m < space->num_transfer_modes(); ++m) {
    const auto& b = space->mode(m);
    Eigen::VectorXd pot(b.size());
    for (int i = 0; i < b.size(); ++i) pot[i] = model::transfer_potential(p, b.points[i]);
    factors.push_back(ground_factor(b, pot));
  }
  const auto& cav = space->mode(space->num_modes() - 1);
  Eigen::VectorXd vc = 0.5 * p.omega_c * p.omega_c * cav.points.array().square().matrix();
  factors.push_back(ground_factor(cav, vc));
  return hilbert::build_product_state(space, factors);
}

}  // namespace testutil
