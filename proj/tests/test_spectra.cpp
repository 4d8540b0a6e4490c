#include "doctest.h"

#include <cmath>
#include <numbers>

#include "helpers.hpp"

#include "cavidyn/propagator.hpp"
#include "cavidyn/spectra.hpp"

using namespace cavidyn;
using observables::ComplexTimeSeries;
using hilbert::Complex;

namespace {

// synthetic autocorrelation of a few stationary components
ComplexTimeSeries synthetic_corr(const std::vector<double>& e_cm1,
                                 const std::vector<double>& w, double t_total_fs,
                                 double dt_fs) {
  ComplexTimeSeries c;
  c.name = "autocorrelation";
  const int n = static_cast<int>(t_total_fs / dt_fs) + 1;
  for (int i = 0; i < n; ++i) {
    const double t_au = units::fs_to_au(i * dt_fs);
    Complex acc{0.0, 0.0};
    for (std::size_t p = 0; p < e_cm1.size(); ++p) {
      acc += w[p] * std::exp(Complex{0.0, -units::cm1_to_hartree(e_cm1[p]) * t_au});
    }
    c.times_fs.push_back(i * dt_fs);
    c.values.push_back(acc);
  }
  return c;
}

}  // namespace

TEST_CASE("single stationary component gives a single peak at its energy") {
  const auto c = synthetic_corr({1867.0}, {1.0}, 6000.0, 2.0);
  spectra::DosOptions opts;
  opts.e_min_cm1 = 1000.0;
  opts.e_max_cm1 = 3000.0;
  const auto dos = spectra::density_of_states(c, opts);
  const auto peaks = spectra::find_peaks(dos, 0.5);
  REQUIRE(peaks.size() == 1);
  // resolution is pi hbar / t_f; the refined peak sits well inside half a bin
  CHECK(peaks[0].energy_cm1 == doctest::Approx(1867.0).epsilon(1e-3));
}

TEST_CASE("multi-component spectrum resolves all peaks") {
  const std::vector<double> es{1867.0, 1993.5, 2120.0, 2752.0};
  const std::vector<double> ws{0.08, 0.20, 0.30, 0.42};
  const auto c = synthetic_corr(es, ws, 6000.0, 2.0);
  const auto dos = spectra::density_of_states(c);
  const auto peaks = spectra::find_peaks(dos, 0.05);
  REQUIRE(peaks.size() == 4);
  for (std::size_t i = 0; i < es.size(); ++i) {
    CHECK(peaks[i].energy_cm1 == doctest::Approx(es[i]).epsilon(2e-3));
  }
  // the strongest component comes out on top
  const auto max_it =
      std::max_element(peaks.begin(), peaks.end(), [](const auto& a, const auto& b) {
        return a.intensity < b.intensity;
      });
  CHECK(max_it->energy_cm1 == doctest::Approx(2752.0).epsilon(2e-3));
}

TEST_CASE("peak positions are window-insensitive") {
  const auto c = synthetic_corr({900.0, 1400.0}, {0.5, 0.5}, 6000.0, 2.0);
  spectra::DosOptions cosine;
  spectra::DosOptions none;
  none.window = spectra::Window::none;
  const auto p1 = spectra::find_peaks(spectra::density_of_states(c, cosine), 0.2);
  const auto p2 = spectra::find_peaks(spectra::density_of_states(c, none), 0.2);
  REQUIRE(p1.size() == 2);
  REQUIRE(p2.size() >= 2);
  const double resolution = units::hartree_to_cm1(
      std::numbers::pi / units::fs_to_au(6000.0));
  CHECK(std::abs(p1[0].energy_cm1 - p2[0].energy_cm1) < 0.5 * resolution);
  CHECK(std::abs(p1[1].energy_cm1 - p2[1].energy_cm1) < 0.5 * resolution);
}

TEST_CASE("unwindowed intensities integrate to pi times the weight") {
  const auto c = synthetic_corr({1200.0}, {1.0}, 8000.0, 2.0);
  spectra::DosOptions opts;
  opts.window = spectra::Window::none;
  opts.e_min_cm1 = 400.0;
  opts.e_max_cm1 = 2000.0;
  opts.de_cm1 = 0.25;
  const auto dos = spectra::density_of_states(c, opts);
  double integral = 0.0;
  for (double v : dos.intensities) integral += v * units::cm1_to_hartree(opts.de_cm1);
  CHECK(integral == doctest::Approx(std::numbers::pi).epsilon(0.02));
  // the cosine window halves the integrated weight
  opts.window = spectra::Window::cosine;
  const auto dosw = spectra::density_of_states(c, opts);
  double integral_w = 0.0;
  for (double v : dosw.intensities) integral_w += v * units::cm1_to_hartree(opts.de_cm1);
  CHECK(integral_w == doctest::Approx(0.5 * std::numbers::pi).epsilon(0.02));
}

TEST_CASE("autocorrelation identities on a stationary state") {
  model::ModelParams p;
  p.eta = 0.03;
  auto space = testutil::small_space(p, 14, 10);
  const auto h = hamiltonian::assemble(space, p);
  const auto pairs = propagator::lowest_eigenstates(h, 1);
  // an eigenstate only picks up a phase
  const auto& psi = pairs[0].second;
  CHECK(std::abs(hilbert::unconjugated_self_overlap(psi)) ==
        doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("Poisson reference distribution") {
  auto p0 = spectra::poisson_reference(0.0, 5);
  CHECK(p0[0] == 1.0);
  for (int n = 1; n <= 5; ++n) CHECK(p0[n] == 0.0);

  const double mean = 7.7;
  const int n_max = static_cast<int>(mean + 10 * std::sqrt(mean) + 20);
  const auto p = spectra::poisson_reference(mean, n_max);
  double sum = 0.0;
  int mode = 0;
  for (int n = 0; n <= n_max; ++n) {
    sum += p[n];
    if (p[n] > p[mode]) mode = n;
  }
  CHECK(sum >= 1.0 - 1e-10);
  CHECK(mode == 7);
  // recursion agrees with the direct formula at small n
  CHECK(p[3] == doctest::Approx(std::exp(-mean) * std::pow(mean, 3) / 6.0).epsilon(1e-12));

  CHECK_THROWS_AS(spectra::poisson_reference(-1.0, 5), std::invalid_argument);
}

TEST_CASE("non-uniform sampling is rejected") {
  ComplexTimeSeries c;
  c.times_fs = {0.0, 1.0, 3.0, 4.0};
  c.values = {1.0, 0.9, 0.8, 0.7};
  CHECK_THROWS_AS(spectra::density_of_states(c), std::invalid_argument);
}
