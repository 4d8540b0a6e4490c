#pragma once

#include <complex>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cavidyn/dvr.hpp"

namespace cavidyn::hilbert {

using Complex = std::complex<double>;

/// Ordered tensor factor space: modes 0..N-1 are transfer coordinates, the
/// last mode is the cavity when built with a cavity. Row-major layout, mode 0
/// slowest. A memory guard rejects grids beyond max_amplitudes at construction.
class ProductSpace {
 public:
  static constexpr std::int64_t kDefaultMaxAmplitudes = 200'000'000;

  ProductSpace(std::vector<dvr::DvrBasis> modes, bool last_is_cavity,
               std::int64_t max_amplitudes = kDefaultMaxAmplitudes);

  int num_modes() const { return static_cast<int>(modes_.size()); }
  int num_transfer_modes() const { return last_is_cavity_ ? num_modes() - 1 : num_modes(); }
  bool has_cavity() const { return last_is_cavity_; }
  const dvr::DvrBasis& mode(int m) const { return modes_[m]; }
  std::int64_t total_dim() const { return total_dim_; }
  std::int64_t stride(int m) const { return strides_[m]; }
  /// product of mode sizes before m
  std::int64_t outer(int m) const;
  std::string grid_spec() const;

  bool same_as(const ProductSpace& other) const { return this == &other; }

 private:
  std::vector<dvr::DvrBasis> modes_;
  std::vector<std::int64_t> strides_;
  std::int64_t total_dim_;
  bool last_is_cavity_;
};

using SpacePtr = std::shared_ptr<const ProductSpace>;

/// Complex amplitudes over the full grid; DVR weights are unity so the plain
/// coefficient 2-norm is the wavefunction norm.
class WaveFunction {
 public:
  WaveFunction() = default;
  explicit WaveFunction(SpacePtr space);

  const SpacePtr& space() const { return space_; }
  std::int64_t size() const { return static_cast<std::int64_t>(amp_.size()); }
  std::span<Complex> amplitudes() { return amp_; }
  std::span<const Complex> amplitudes() const { return amp_; }
  Complex* data() { return amp_.data(); }
  const Complex* data() const { return amp_.data(); }

  double norm() const;
  void normalize();
  void set_zero();

 private:
  SpacePtr space_;
  std::vector<Complex> amp_;
};

/// rho_i(t): reduced density operator of one mode against the rest
struct ReducedDensity {
  int mode;
  Eigen::MatrixXcd matrix;  // Hermitian, unit trace
};

Complex inner_product(const WaveFunction& a, const WaveFunction& b);
/// sum_k psi_k^2 without conjugation; equals <Psi(t)|Psi(t)> of the
/// time-reversed bra for real symmetric Hamiltonians (autocorrelation shortcut)
Complex unconjugated_self_overlap(const WaveFunction& psi);

/// Psi0 = (tensor product of per-mode factors), normalized
WaveFunction build_product_state(SpacePtr space,
                                 const std::vector<Eigen::VectorXcd>& factors);

/// |psi|^2 marginal distribution of one mode
Eigen::VectorXd mode_marginal(const WaveFunction& psi, int mode);

/// expectation of a function given on the grid points of one mode
double expectation_mode_function(const WaveFunction& psi, int mode,
                                 const Eigen::VectorXd& f_on_points);

/// expectation of an arbitrary diagonal (full-grid) observable
double expectation_diagonal(const WaveFunction& psi, std::span<const double> diag);

/// trace out all modes except `mode`
ReducedDensity partial_trace(const WaveFunction& psi, int mode);

/// deterministic chunked pairwise reduction; bit-stable for fixed length
/// independent of thread count
double deterministic_sum(std::span<const double> partials);

// binary checkpoints: fixed header + little-endian complex doubles
struct CheckpointInfo {
  double time_au = 0.0;
  double eta = 0.0;
  int n_molecules = 1;
};
void save_checkpoint(const std::string& path, const WaveFunction& psi,
                     const CheckpointInfo& info);
WaveFunction load_checkpoint(const std::string& path, SpacePtr space,
                             CheckpointInfo* info = nullptr);

}  // namespace cavidyn::hilbert
