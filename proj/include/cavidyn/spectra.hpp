#pragma once

#include <vector>

#include "cavidyn/observables.hpp"

namespace cavidyn::spectra {

using observables::ComplexTimeSeries;

enum class Window { none, cosine };

/// vibro-polaritonic density of states from the state autocorrelation,
/// sigma(E) = Re int_0^{2 t_f} C(t) w(t) exp(i E t / hbar) dt
struct Spectrum {
  std::vector<double> energies_cm1;
  std::vector<double> intensities;
  Window window = Window::cosine;
  double t_final_fs = 0.0;
};

struct DosOptions {
  double e_min_cm1 = 0.0;
  double e_max_cm1 = 6000.0;
  double de_cm1 = 0.5;
  Window window = Window::cosine;
};

Spectrum density_of_states(const ComplexTimeSeries& c, const DosOptions& opts = {});

struct Peak {
  double energy_cm1;
  double intensity;
};

/// local maxima above rel_threshold * max intensity, quadratically refined,
/// sorted by energy
std::vector<Peak> find_peaks(const Spectrum& s, double rel_threshold = 1e-3);

/// coherent-state reference P(n) = exp(-n_mean) n_mean^n / n!
std::vector<double> poisson_reference(double n_mean, int n_max);

}  // namespace cavidyn::spectra
