#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "cavidyn/hamiltonian.hpp"
#include "cavidyn/hilbert.hpp"

namespace cavidyn::observables {

using hilbert::ReducedDensity;
using hilbert::WaveFunction;

struct TimeSeriesMeta {
  double eta = 0.0;
  int n_molecules = 1;
  double dt_fs = 0.0;
  std::string grid_spec;
  bool dse_cross_terms = true;
  std::string config_hash;
};

/// uniformly sampled observable record
struct TimeSeries {
  std::string name;
  std::vector<double> times_fs;
  std::vector<double> values;
  TimeSeriesMeta meta;
};

struct ComplexTimeSeries {
  std::string name;
  std::vector<double> times_fs;
  std::vector<std::complex<double>> values;
  TimeSeriesMeta meta;
};

/// Heaviside dividing-surface weights on a transfer grid: 1 for q > 0,
/// 0 for q < 0, 1/2 on a point exactly at the transition state
Eigen::VectorXd heaviside_weights(const Eigen::VectorXd& points);

/// ensemble transfer probability (1/N) sum_i <theta(q_i)>
double transfer_probability(const WaveFunction& psi);

/// -sum lambda ln lambda over eigenvalues above 1e-14, in units of k_B;
/// eigenvalues below -1e-8 flag a corrupted density
double von_neumann_entropy(const ReducedDensity& rho);

/// length-gauge photon number (<H_C> + <H_SC> + <H_DSE>)/(hbar omega_c) - 1/2
double photon_number(const hamiltonian::TermExpectations& te, double omega_c);

/// 5-point moving average used before any finite differencing
std::vector<double> smooth5(const std::vector<double>& v);

/// time of the first local maximum after t0 on the smoothed series, with
/// quadratic refinement; a flat series reports no recurrence, a series
/// monotone to the end reports the window end
std::optional<double> detect_recurrence_time(const TimeSeries& p);

/// max of dP/dt (central differences on the smoothed series) for t < tau_r,
/// in 1/s; with no recurrence the full window is searched
double extract_short_time_rate(const TimeSeries& p, std::optional<double> tau_r);

/// normalized photon number, Eq-style division by the t0 value; the
/// uncoupled case (zero at t0) has no well-defined normalization
std::optional<TimeSeries> normalized_photon_number(const TimeSeries& nc);

/// dominant oscillation period from the mean spacing of interior extrema of
/// the smoothed series (quadratically refined)
std::optional<double> oscillation_period(const TimeSeries& s);

/// standard per-sample observable bundle recorded during propagation
struct RecorderOptions {
  bool coordinates = true;     // <q_i>, <x_c>
  bool entropies = true;       // S_q per transfer mode, S_C
  bool term_energies = true;   // <H_S>, <H_C>, <H_SC>, <H_DSE>, total, <n_c>
  bool autocorrelation = false;
  int expected_samples = 0;
};

class TrajectoryRecorder {
 public:
  TrajectoryRecorder(const hamiltonian::HamiltonianOnGrid& h, RecorderOptions opts,
                     TimeSeriesMeta meta);

  /// propagation hook
  void operator()(int sample_index, double t_au, const WaveFunction& psi);

  std::vector<TimeSeries> series() const;
  std::optional<ComplexTimeSeries> autocorrelation() const;

 private:
  const hamiltonian::HamiltonianOnGrid& h_;
  RecorderOptions opts_;
  TimeSeriesMeta meta_;
  bool initial_state_real_ = true;
  WaveFunction psi0_;  // kept only when the half-time shortcut is unavailable
  std::vector<double> t_;
  std::vector<double> p_sh_, x_c_, s_c_, norm_;
  std::vector<std::vector<double>> q_i_, s_q_;
  std::vector<double> h_s_, h_c_, h_sc_, h_dse_, h_tot_, n_c_;
  std::vector<double> t_corr_;
  std::vector<std::complex<double>> corr_;
};

}  // namespace cavidyn::observables
