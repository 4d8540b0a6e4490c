#include "doctest.h"

#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "cavidyn/dvr.hpp"
#include "cavidyn/model.hpp"
#include "cavidyn/units.hpp"

using namespace cavidyn;

TEST_CASE("sinc DVR grid and kinetic diagonal") {
  const auto b = dvr::build_sinc_dvr(101, -1.5, 2.1, 1914.028);
  CHECK(b.size() == 101);
  const double dq = (2.1 + 1.5) / 100.0;
  for (int i = 0; i < b.size(); ++i) {
    CHECK(b.points[i] == doctest::Approx(-1.5 + i * dq).epsilon(1e-14));
    CHECK(b.kinetic(i, i) ==
          doctest::Approx(std::numbers::pi * std::numbers::pi /
                          (6.0 * 1914.028 * dq * dq)).epsilon(1e-14));
  }
  for (int i = 1; i < b.size(); ++i) CHECK(b.points[i] > b.points[i - 1]);
  CHECK((b.kinetic - b.kinetic.transpose()).norm() <= 1e-13 * b.kinetic.norm());
}

TEST_CASE("sinc DVR reproduces harmonic levels on a wide grid") {
  // independent oracle: dense diagonalization against (v + 1/2) hbar omega
  const auto b = dvr::build_sinc_dvr(101, -10.0, 10.0, 1.0);
  Eigen::MatrixXd h = b.kinetic;
  for (int i = 0; i < b.size(); ++i) h(i, i) += 0.5 * b.points[i] * b.points[i];
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h).eigenvalues();
  for (int v = 0; v <= 5; ++v) {
    CHECK(ev[v] == doctest::Approx(v + 0.5).epsilon(1e-6));
  }
}

TEST_CASE("HO DVR grid symmetry and quoted extent") {
  const double omega = units::cm1_to_hartree(126.5);
  const auto b = dvr::build_ho_dvr(101, omega);
  for (int i = 0; i < b.size(); ++i) {
    CHECK(b.points[i] == doctest::Approx(-b.points[b.size() - 1 - i]).epsilon(1e-10));
  }
  CHECK(std::abs(b.points[b.size() - 1]) == doctest::Approx(561.35).epsilon(0.02));
  CHECK((b.kinetic - b.kinetic.transpose()).norm() <= 1e-13 * b.kinetic.norm());
}

TEST_CASE("HO DVR diagonalizes its own oscillator exactly") {
  const double omega = units::cm1_to_hartree(126.5);
  const auto b = dvr::build_ho_dvr(101, omega);
  Eigen::MatrixXd h = b.kinetic;
  for (int i = 0; i < b.size(); ++i) {
    h(i, i) += 0.5 * omega * omega * b.points[i] * b.points[i];
  }
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h).eigenvalues();
  CHECK(ev[0] == doctest::Approx(0.5 * omega).epsilon(1e-10));
  CHECK(ev[1] == doctest::Approx(1.5 * omega).epsilon(1e-10));
}

TEST_CASE("kinetic matrices are positive semidefinite") {
  for (const auto& b : {dvr::build_sinc_dvr(64, -1.5, 2.1, 1914.028),
                        dvr::build_ho_dvr(64, units::cm1_to_hartree(126.5))}) {
    const Eigen::VectorXd ev =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(b.kinetic).eigenvalues();
    CHECK(ev[0] >= -1e-10 * b.kinetic.norm());
  }
}

TEST_CASE("grid convergence of the transfer Hamiltonian") {
  // doubling the grid leaves the lowest five levels unchanged to 0.01 cm^-1
  model::ModelParams p;
  auto lowest5 = [&](int n) {
    const auto b = dvr::build_sinc_dvr(n, -1.5, 2.1, p.mu_S);
    Eigen::MatrixXd h = b.kinetic;
    for (int i = 0; i < n; ++i) h(i, i) += model::transfer_potential(p, b.points[i]);
    return Eigen::VectorXd(
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h).eigenvalues().head(5));
  };
  const auto a = lowest5(101);
  const auto b = lowest5(202);
  for (int v = 0; v < 5; ++v) {
    CHECK(units::hartree_to_cm1(std::abs(a[v] - b[v])) < 0.01);
  }
}

TEST_CASE("constructor preconditions") {
  CHECK_THROWS_AS(dvr::build_sinc_dvr(1, -1.0, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(dvr::build_sinc_dvr(10, 1.0, -1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(dvr::build_sinc_dvr(10, -1.0, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(dvr::build_ho_dvr(1, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(dvr::build_ho_dvr(10, -1.0), std::invalid_argument);
}
