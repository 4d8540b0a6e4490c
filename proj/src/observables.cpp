#include "cavidyn/observables.hpp"

#include <cmath>
#include <stdexcept>

#include "cavidyn/units.hpp"

namespace cavidyn::observables {

Eigen::VectorXd heaviside_weights(const Eigen::VectorXd& points) {
  Eigen::VectorXd w(points.size());
  for (Eigen::Index i = 0; i < points.size(); ++i) {
    w[i] = points[i] > 0.0 ? 1.0 : (points[i] < 0.0 ? 0.0 : 0.5);
  }
  return w;
}

double transfer_probability(const WaveFunction& psi) {
  const auto& sp = *psi.space();
  const int n_t = sp.num_transfer_modes();
  if (n_t < 1) throw std::invalid_argument("no transfer modes in this space");
  double acc = 0.0;
  for (int m = 0; m < n_t; ++m) {
    acc += hilbert::expectation_mode_function(psi, m,
                                              heaviside_weights(sp.mode(m).points));
  }
  return acc / n_t;
}

double von_neumann_entropy(const ReducedDensity& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.matrix,
                                                     Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& lam = es.eigenvalues();
  double s = 0.0;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam[i] < -1e-8) {
      throw std::runtime_error("corrupted reduced density: eigenvalue " +
                               std::to_string(lam[i]));
    }
    if (lam[i] > 1e-14) s -= lam[i] * std::log(lam[i]);
  }
  return s;
}

double photon_number(const hamiltonian::TermExpectations& te, double omega_c) {
  return (te.h_c + te.h_sc + te.h_dse) / omega_c - 0.5;
}

std::vector<double> smooth5(const std::vector<double>& v) {
  const int n = static_cast<int>(v.size());
  std::vector<double> out(v.size());
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - 2);
    const int hi = std::min(n - 1, i + 2);
    double acc = 0.0;
    for (int j = lo; j <= hi; ++j) acc += v[j];
    out[i] = acc / (hi - lo + 1);
  }
  return out;
}

namespace {

// refine an interior extremum through the vertex of the local parabola
double quadratic_peak(double tm, double t0, double tp, double ym, double y0, double yp) {
  const double denom = ym - 2.0 * y0 + yp;
  if (std::abs(denom) < 1e-300) return t0;
  const double h = 0.5 * (tp - tm);
  const double shift = std::clamp(0.5 * (ym - yp) / denom * h, -h, h);
  return t0 + shift;
}

}  // namespace

std::optional<double> detect_recurrence_time(const TimeSeries& p) {
  const auto s = smooth5(p.values);
  const int n = static_cast<int>(s.size());
  if (n < 7) return std::nullopt;

  double vmax = s[0], vmin = s[0];
  for (double v : s) {
    vmax = std::max(vmax, v);
    vmin = std::min(vmin, v);
  }
  if (vmax - s[0] < 1e-6) return std::nullopt;  // flat: no transfer, no recurrence

  for (int i = 2; i + 1 < n; ++i) {
    if (s[i] > s[i - 1] && s[i] >= s[i + 1]) {
      return quadratic_peak(p.times_fs[i - 1], p.times_fs[i], p.times_fs[i + 1],
                            s[i - 1], s[i], s[i + 1]);
    }
  }
  return p.times_fs.back();  // monotone rise: the window end delimits the rate
}

double extract_short_time_rate(const TimeSeries& p, std::optional<double> tau_r) {
  const auto s = smooth5(p.values);
  const int n = static_cast<int>(s.size());
  if (n < 3) return 0.0;
  const double t_end = tau_r.value_or(p.times_fs.back());
  double best = 0.0;
  for (int i = 1; i + 1 < n; ++i) {
    if (p.times_fs[i] > t_end) break;
    const double dp = (s[i + 1] - s[i - 1]) / (p.times_fs[i + 1] - p.times_fs[i - 1]);
    best = std::max(best, dp);
  }
  return best * 1e15;  // 1/fs -> 1/s
}

std::optional<TimeSeries> normalized_photon_number(const TimeSeries& nc) {
  if (nc.values.empty()) return std::nullopt;
  const double v0 = nc.values.front();
  if (std::abs(v0) < 1e-12) return std::nullopt;  // eta = 0: undefined
  TimeSeries out = nc;
  out.name = nc.name + "_normalized";
  for (auto& v : out.values) v /= v0;
  out.values.front() = 1.0;
  return out;
}

std::optional<double> oscillation_period(const TimeSeries& s) {
  const auto v = smooth5(s.values);
  const int n = static_cast<int>(v.size());
  if (n < 9) return std::nullopt;
  std::vector<double> minima;
  for (int i = 2; i + 2 < n; ++i) {
    if (v[i] < v[i - 1] && v[i] <= v[i + 1] && v[i] < v[i - 2] && v[i] <= v[i + 2]) {
      minima.push_back(quadratic_peak(s.times_fs[i - 1], s.times_fs[i],
                                      s.times_fs[i + 1], v[i - 1], v[i], v[i + 1]));
    }
  }
  if (minima.size() < 2) return std::nullopt;
  double acc = 0.0;
  for (std::size_t i = 1; i < minima.size(); ++i) acc += minima[i] - minima[i - 1];
  return acc / (minima.size() - 1);
}

TrajectoryRecorder::TrajectoryRecorder(const hamiltonian::HamiltonianOnGrid& h,
                                       RecorderOptions opts, TimeSeriesMeta meta)
    : h_(h), opts_(std::move(opts)), meta_(std::move(meta)) {
  const int reserve = opts_.expected_samples > 0 ? opts_.expected_samples : 1024;
  t_.reserve(reserve);
  const int n_t = h_.space()->num_transfer_modes();
  q_i_.resize(n_t);
  s_q_.resize(n_t);
}

void TrajectoryRecorder::operator()(int sample_index, double t_au,
                                    const WaveFunction& psi) {
  const auto& sp = *psi.space();
  const int n_t = sp.num_transfer_modes();

  if (sample_index == 0 && opts_.autocorrelation) {
    double max_imag = 0.0;
    for (const auto& c : psi.amplitudes()) {
      max_imag = std::max(max_imag, std::abs(c.imag()));
    }
    initial_state_real_ = max_imag < 1e-12;
    if (!initial_state_real_) psi0_ = psi;  // fall back to <Psi(0)|Psi(t)>
  }

  t_.push_back(units::au_to_fs(t_au));
  p_sh_.push_back(transfer_probability(psi));
  norm_.push_back(psi.norm());

  if (opts_.coordinates) {
    for (int m = 0; m < n_t; ++m) {
      q_i_[m].push_back(hilbert::expectation_mode_function(psi, m, sp.mode(m).points));
    }
    x_c_.push_back(
        hilbert::expectation_mode_function(psi, n_t, sp.mode(n_t).points));
  }
  if (opts_.entropies) {
    for (int m = 0; m < n_t; ++m) {
      s_q_[m].push_back(von_neumann_entropy(hilbert::partial_trace(psi, m)));
    }
    s_c_.push_back(von_neumann_entropy(hilbert::partial_trace(psi, n_t)));
  }
  if (opts_.term_energies) {
    const auto te = h_.term_expectations(psi);
    h_s_.push_back(te.h_s);
    h_c_.push_back(te.h_c);
    h_sc_.push_back(te.h_sc);
    h_dse_.push_back(te.h_dse);
    h_tot_.push_back(te.total);
    n_c_.push_back(photon_number(te, h_.omega_c()));
  }
  if (opts_.autocorrelation) {
    if (initial_state_real_) {
      // C(2t) = <Psi*(t)|Psi(t)> for real initial states and real symmetric H
      t_corr_.push_back(2.0 * units::au_to_fs(t_au));
      corr_.push_back(hilbert::unconjugated_self_overlap(psi));
    } else {
      t_corr_.push_back(units::au_to_fs(t_au));
      corr_.push_back(hilbert::inner_product(psi0_, psi));
    }
  }
}

std::vector<TimeSeries> TrajectoryRecorder::series() const {
  std::vector<TimeSeries> out;
  auto push = [&](const std::string& name, const std::vector<double>& v) {
    if (!v.empty()) out.push_back(TimeSeries{name, t_, v, meta_});
  };
  push("P_SH", p_sh_);
  push("norm", norm_);
  for (std::size_t m = 0; m < q_i_.size(); ++m) {
    push("q_expect_" + std::to_string(m + 1), q_i_[m]);
  }
  push("x_c_expect", x_c_);
  for (std::size_t m = 0; m < s_q_.size(); ++m) {
    push("S_q_" + std::to_string(m + 1), s_q_[m]);
  }
  push("S_C", s_c_);
  push("H_S", h_s_);
  push("H_C", h_c_);
  push("H_SC", h_sc_);
  push("H_DSE", h_dse_);
  push("H_total", h_tot_);
  push("n_c", n_c_);
  return out;
}

std::optional<ComplexTimeSeries> TrajectoryRecorder::autocorrelation() const {
  if (corr_.empty()) return std::nullopt;
  return ComplexTimeSeries{"autocorrelation", t_corr_, corr_, meta_};
}

}  // namespace cavidyn::observables
