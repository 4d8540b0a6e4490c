#include "doctest.h"

#include "helpers.hpp"

#include "cavidyn/propagator.hpp"

using namespace cavidyn;
using hilbert::Complex;
using hilbert::WaveFunction;

TEST_CASE("eta = 0 kills interaction and self-energy terms") {
  model::ModelParams p;
  p.eta = 0.0;
  auto space = testutil::small_space(p, 9, 5);
  const auto h = hamiltonian::assemble(space, p);
  CHECK(h.term_diagonal(hamiltonian::Term::v_sc).norm() == 0.0);
  CHECK(h.term_diagonal(hamiltonian::Term::v_dse).norm() == 0.0);
}

TEST_CASE("potential diagonal decomposes term by term") {
  model::ModelParams p;
  p.eta = 0.06;
  p.n_molecules = 2;
  auto space = testutil::small_space(p, 7, 5);
  const auto h = hamiltonian::assemble(space, p);
  const auto vs = h.term_diagonal(hamiltonian::Term::v_s);
  const auto vc = h.term_diagonal(hamiltonian::Term::v_c);
  const auto vsc = h.term_diagonal(hamiltonian::Term::v_sc);
  const auto vdse = h.term_diagonal(hamiltonian::Term::v_dse);
  for (std::int64_t k = 0; k < space->total_dim(); ++k) {
    const double sum = vs[k] + vc[k] + vsc[k] + vdse[k];
    CHECK(h.diagonal_value(k) == doctest::Approx(sum).epsilon(1e-12));
  }
}

TEST_CASE("cavity, interaction and self-energy close into the cPES square") {
  model::ModelParams p;
  p.eta = 0.05;
  p.n_molecules = 2;
  auto space = testutil::small_space(p, 7, 5);
  const auto h = hamiltonian::assemble(space, p);
  const auto vc = h.term_diagonal(hamiltonian::Term::v_c);
  const auto vsc = h.term_diagonal(hamiltonian::Term::v_sc);
  const auto vdse = h.term_diagonal(hamiltonian::Term::v_dse);
  const double g_n = p.g_collective();
  const std::int64_t nc = space->mode(2).size();
  for (std::int64_t k = 0; k < space->total_dim(); ++k) {
    const std::int64_t j = k / nc, i = k % nc;
    const std::int64_t j0 = j / space->mode(1).size(), j1 = j % space->mode(1).size();
    const double d = model::dipole_1d(p, space->mode(0).points[j0]) +
                     model::dipole_1d(p, space->mode(1).points[j1]);
    const double shift = std::sqrt(2.0 / std::pow(p.omega_c, 3)) * g_n * d;
    const double x = space->mode(2).points[i];
    const double square = 0.5 * p.omega_c * p.omega_c * (x + shift) * (x + shift);
    CHECK(vc[k] + vsc[k] + vdse[k] == doctest::Approx(square).epsilon(1e-12));
  }
}

TEST_CASE("diagonal equals the cPES pointwise") {
  model::ModelParams p;
  p.eta = 0.07;
  p.n_molecules = 2;
  auto space = testutil::small_space(p, 7, 5);
  const auto h = hamiltonian::assemble(space, p);
  const double floor = model::enol_minimum(p).energy;
  const std::int64_t nc = space->mode(2).size();
  for (std::int64_t k = 0; k < space->total_dim(); ++k) {
    const std::int64_t j = k / nc, i = k % nc;
    const double q[2] = {space->mode(0).points[j / space->mode(1).size()],
                         space->mode(1).points[j % space->mode(1).size()]};
    const double expected =
        model::cpes(p, q, space->mode(2).points[i]) - p.n_molecules * floor;
    CHECK(h.diagonal_value(k) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("apply is Hermitian on random states") {
  model::ModelParams p;
  p.eta = 0.05;
  auto space = testutil::small_space(p, 9, 7);
  const auto h = hamiltonian::assemble(space, p);
  for (unsigned seed : {1u, 2u, 3u}) {
    auto a = testutil::random_state(space, seed);
    auto b = testutil::random_state(space, seed + 100);
    const auto hb = h.apply(b);
    const auto ha = h.apply(a);
    const auto lhs = hilbert::inner_product(a, hb);
    const auto rhs = hilbert::inner_product(ha, b);
    CHECK(std::abs(lhs - rhs) < 1e-10);
  }
}

TEST_CASE("apply is linear") {
  model::ModelParams p;
  p.eta = 0.03;
  auto space = testutil::small_space(p, 9, 7);
  const auto h = hamiltonian::assemble(space, p);
  auto a = testutil::random_state(space, 5);
  auto b = testutil::random_state(space, 6);
  const Complex ca{0.3, -0.7}, cb{-1.1, 0.2};
  WaveFunction combo(space);
  for (std::int64_t k = 0; k < combo.size(); ++k) {
    combo.data()[k] = ca * a.data()[k] + cb * b.data()[k];
  }
  const auto h_combo = h.apply(combo);
  const auto ha = h.apply(a);
  const auto hb = h.apply(b);
  double max_diff = 0.0;
  for (std::int64_t k = 0; k < combo.size(); ++k) {
    max_diff = std::max(max_diff,
                        std::abs(h_combo.data()[k] - ca * ha.data()[k] - cb * hb.data()[k]));
  }
  CHECK(max_diff < 1e-12);
}

TEST_CASE("uncoupled product of ground factors is an eigenstate") {
  model::ModelParams p;
  p.eta = 0.0;
  auto space = testutil::small_space(p, 61, 31);
  const auto h = hamiltonian::assemble(space, p);
  auto psi = testutil::small_initial_state(space, p);
  const auto hpsi = h.apply(psi);
  const double e = hilbert::inner_product(psi, hpsi).real();
  double residual = 0.0;
  for (std::int64_t k = 0; k < psi.size(); ++k) {
    residual += std::norm(hpsi.data()[k] - e * psi.data()[k]);
  }
  CHECK(std::sqrt(residual) < 1e-6);
  // E = eps_0 + hbar omega_c / 2 above the enol floor
  const double eps0 = units::cm1_to_hartree(904.70);
  CHECK(e == doctest::Approx(eps0 + 0.5 * p.omega_c).epsilon(1e-5));
}

TEST_CASE("matrix-free apply agrees with the dense brute-force matrix") {
  model::ModelParams p;
  p.eta = 0.05;
  auto space = testutil::small_space(p, 12, 12);
  const auto h = hamiltonian::assemble(space, p);
  const propagator::DenseReference dense(h);
  for (unsigned seed : {11u, 12u}) {
    auto psi = testutil::random_state(space, seed);
    const auto hpsi = h.apply(psi);
    Eigen::VectorXcd v(psi.size());
    for (std::int64_t k = 0; k < psi.size(); ++k) v[k] = psi.data()[k];
    const Eigen::VectorXcd ref = dense.matrix() * v;
    double max_diff = 0.0;
    for (std::int64_t k = 0; k < psi.size(); ++k) {
      max_diff = std::max(max_diff, std::abs(hpsi.data()[k] - ref[k]));
    }
    CHECK(max_diff < 1e-12);
  }
}

TEST_CASE("term expectations on the initial state") {
  model::ModelParams p;
  p.eta = 0.05;
  auto space = testutil::small_space(p, 61, 41);
  const auto h = hamiltonian::assemble(space, p);
  auto psi = testutil::small_initial_state(space, p);
  const auto te = h.term_expectations(psi);

  // the interaction term never contributes at t0
  CHECK(std::abs(te.h_sc) < 1e-10);
  // total is the full Rayleigh quotient
  const double rq = hilbert::inner_product(psi, h.apply(psi)).real();
  CHECK(te.total == doctest::Approx(rq).epsilon(1e-10));
  // Table row: <H_DSE>/(hbar omega_c) at eta = 0.05 (paper value 3.95, 2%)
  CHECK(te.h_dse / p.omega_c == doctest::Approx(3.95).epsilon(0.02));

  model::ModelParams p0 = p;
  p0.eta = 0.0;
  const auto h0 = hamiltonian::assemble(space, p0);
  auto psi0 = testutil::small_initial_state(space, p0);
  const auto te0 = h0.term_expectations(psi0);
  CHECK(te0.h_c == doctest::Approx(0.5 * p.omega_c).epsilon(1e-10));
  CHECK(units::hartree_to_cm1(te0.h_c) == doctest::Approx(63.25).epsilon(1e-4));
}

TEST_CASE("two molecules double the photon number per the Dicke form") {
  model::ModelParams p;
  p.eta = 0.05;
  p.n_molecules = 2;
  auto space = testutil::small_space(p, 41, 21);
  const auto h = hamiltonian::assemble(space, p);
  auto psi = testutil::small_initial_state(space, p);
  const auto te = h.term_expectations(psi);
  const double nc0 = (te.h_c + te.h_sc + te.h_dse) / p.omega_c - 0.5;
  // paper (SI): 7.7 at eta = 0.05
  CHECK(nc0 == doctest::Approx(7.7).epsilon(0.05));
}

TEST_CASE("initial photon number follows the ensemble dipole identity") {
  // <n_c>_0(N) = (eta/d_10)^2 (<d^2> + (N-1) <d>^2) with moments taken in the
  // single-molecule ground state; exact on a common grid
  model::ModelParams base;
  base.eta = 0.05;
  const auto qb = dvr::build_sinc_dvr(41, -1.5, 2.1, base.mu_S);
  Eigen::VectorXd pot(qb.size()), dip(qb.size());
  for (int i = 0; i < qb.size(); ++i) {
    pot[i] = model::transfer_potential(base, qb.points[i]);
    dip[i] = model::dipole_1d(base, qb.points[i]);
  }
  const auto g = testutil::ground_factor(qb, pot);
  double d_avg = 0.0, d2_avg = 0.0;
  for (int i = 0; i < qb.size(); ++i) {
    const double w = std::norm(g[i]);
    d_avg += w * dip[i];
    d2_avg += w * dip[i] * dip[i];
  }
  double prev = 0.0;
  for (int n = 1; n <= 3; ++n) {
    model::ModelParams p = base;
    p.n_molecules = n;
    auto space = testutil::small_space(p, 41, 21);
    const auto h = hamiltonian::assemble(space, p);
    auto psi = testutil::small_initial_state(space, p);
    const auto te = h.term_expectations(psi);
    const double nc0 = (te.h_c + te.h_sc + te.h_dse) / p.omega_c - 0.5;
    const double analytic =
        (p.eta / p.d_10) * (p.eta / p.d_10) * (d2_avg + (n - 1) * d_avg * d_avg);
    CHECK(nc0 == doctest::Approx(analytic).epsilon(1e-10));
    CHECK(nc0 > prev);  // monotone in ensemble size
    prev = nc0;
    // Dicke scaling keeps g_N^2 N invariant
    CHECK(p.g_collective() * p.g_collective() * n ==
          doctest::Approx(p.g() * p.g()).epsilon(1e-14));
  }
}

TEST_CASE("dropping dipole-dipole cross terms keeps only diagonal d^2") {
  model::ModelParams p;
  p.eta = 0.05;
  p.n_molecules = 2;
  p.dse_cross_terms = false;
  auto space = testutil::small_space(p, 7, 5);
  const auto h = hamiltonian::assemble(space, p);
  const auto vdse = h.term_diagonal(hamiltonian::Term::v_dse);
  const double g_n = p.g_collective();
  const std::int64_t nc = space->mode(2).size();
  for (std::int64_t k = 0; k < space->total_dim(); ++k) {
    const std::int64_t j = k / nc;
    const double d0 = model::dipole_1d(p, space->mode(0).points[j / space->mode(1).size()]);
    const double d1 = model::dipole_1d(p, space->mode(1).points[j % space->mode(1).size()]);
    const double expected = g_n * g_n / p.omega_c * (d0 * d0 + d1 * d1);
    CHECK(vdse[k] == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("assembly preconditions") {
  model::ModelParams p;
  p.n_molecules = 2;
  auto space = testutil::small_space(p, 7, 5);
  model::ModelParams wrong = p;
  wrong.n_molecules = 1;
  CHECK_THROWS_AS(hamiltonian::assemble(space, wrong), std::invalid_argument);
  wrong = p;
  wrong.eta = -1.0;
  CHECK_THROWS_AS(hamiltonian::assemble(space, wrong), std::invalid_argument);
  // states from a different space are rejected
  const auto h = hamiltonian::assemble(space, p);
  auto foreign = testutil::random_state(testutil::small_space(p, 7, 5), 1);
  CHECK_THROWS_AS(h.apply(foreign), std::invalid_argument);
}
