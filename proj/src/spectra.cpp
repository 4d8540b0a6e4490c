#include "cavidyn/spectra.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "cavidyn/units.hpp"

namespace cavidyn::spectra {

Spectrum density_of_states(const ComplexTimeSeries& c, const DosOptions& opts) {
  const std::size_t n = c.values.size();
  if (n < 4) throw std::invalid_argument("autocorrelation series too short");
  const double dt_fs = c.times_fs[1] - c.times_fs[0];
  for (std::size_t i = 2; i < n; ++i) {
    if (std::abs((c.times_fs[i] - c.times_fs[i - 1]) - dt_fs) > 1e-9 * dt_fs) {
      throw std::invalid_argument("autocorrelation series is not uniformly sampled");
    }
  }
  const double dt_au = units::fs_to_au(dt_fs);
  const double t_total = c.times_fs.back();

  const int nbins =
      static_cast<int>(std::floor((opts.e_max_cm1 - opts.e_min_cm1) / opts.de_cm1)) + 1;
  Spectrum out;
  out.window = opts.window;
  out.t_final_fs = 0.5 * t_total;
  out.energies_cm1.resize(nbins);
  out.intensities.assign(nbins, 0.0);

  // window weights and trapezoid end factors
  std::vector<double> w(n, 1.0);
  if (opts.window == Window::cosine) {
    for (std::size_t i = 0; i < n; ++i) {
      w[i] = 0.5 * (1.0 + std::cos(std::numbers::pi * c.times_fs[i] / t_total));
    }
  }
  w[0] *= 0.5;
  w[n - 1] *= 0.5;

#pragma omp parallel for schedule(static)
  for (int b = 0; b < nbins; ++b) {
    const double e_cm1 = opts.e_min_cm1 + b * opts.de_cm1;
    const double e_au = units::cm1_to_hartree(e_cm1);
    // phase recurrence per sample
    const std::complex<double> rot{std::cos(e_au * dt_au), std::sin(e_au * dt_au)};
    std::complex<double> ph{1.0, 0.0};
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += (w[i] * c.values[i] * ph).real();
      ph *= rot;
    }
    out.energies_cm1[b] = e_cm1;
    out.intensities[b] = acc * dt_au;
  }
  return out;
}

std::vector<Peak> find_peaks(const Spectrum& s, double rel_threshold) {
  std::vector<Peak> peaks;
  const int n = static_cast<int>(s.intensities.size());
  if (n < 3) return peaks;
  double vmax = 0.0;
  for (double v : s.intensities) vmax = std::max(vmax, v);
  const double floor = rel_threshold * vmax;
  for (int i = 1; i + 1 < n; ++i) {
    const double ym = s.intensities[i - 1], y0 = s.intensities[i],
                 yp = s.intensities[i + 1];
    if (y0 > floor && y0 > ym && y0 >= yp) {
      const double denom = ym - 2.0 * y0 + yp;
      double e = s.energies_cm1[i];
      double v = y0;
      if (std::abs(denom) > 1e-300) {
        const double h = 0.5 * (s.energies_cm1[i + 1] - s.energies_cm1[i - 1]);
        const double shift = std::clamp(0.5 * (ym - yp) / denom * h, -h, h);
        e += shift;
        v = y0 - 0.25 * (ym - yp) * shift / h;
      }
      peaks.push_back({e, v});
    }
  }
  return peaks;
}

std::vector<double> poisson_reference(double n_mean, int n_max) {
  if (n_mean < 0.0) throw std::invalid_argument("Poisson mean must be >= 0");
  std::vector<double> p(n_max + 1);
  // iterate p(n) = p(n-1) * n_mean / n to stay finite for large n_mean
  p[0] = std::exp(-n_mean);
  for (int n = 1; n <= n_max; ++n) p[n] = p[n - 1] * n_mean / n;
  return p;
}

}  // namespace cavidyn::spectra
