#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cavidyn/hamiltonian.hpp"
#include "cavidyn/hilbert.hpp"

namespace cavidyn::propagator {

using hamiltonian::HamiltonianOnGrid;
using hilbert::Complex;
using hilbert::WaveFunction;

enum class Method { chebyshev, short_iterative_lanczos };

struct PropagationConfig {
  double dt_fs = 0.25;
  double t_final_fs = 1000.0;
  Method method = Method::chebyshev;
  int krylov_dim = 15;          // max Krylov dimension per step
  int chebyshev_max_order = 0;  // 0 = automatic from the spectral range
  double tolerance = 1e-10;     // per-step error budget, must be in (0, 1e-3]
  int sample_stride = 4;
  double norm_drift_abort = 1e-6;

  void validate() const;
};

struct PropagationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SpectralBounds {
  double e_min;
  double e_max;
  double range() const { return e_max - e_min; }
};

/// Lanczos-based enclosure of the spectrum with residual + safety margins;
/// used to scale the Chebyshev recurrence
SpectralBounds estimate_spectral_bounds(const HamiltonianOnGrid& h, int iterations = 60);

/// exp(-i H dt) via the Chebyshev polynomial expansion with Bessel
/// coefficients; uniform error over the full spectral range
class ChebyshevStepper {
 public:
  ChebyshevStepper(const HamiltonianOnGrid& h, double dt_au, double tolerance,
                   int max_order = 0);
  void step(WaveFunction& psi);
  int order() const { return static_cast<int>(coeff_.size()) - 1; }
  long matvecs() const { return matvecs_; }

 private:
  const HamiltonianOnGrid& h_;
  double dt_au_;
  SpectralBounds bounds_;
  double center_, half_range_;
  Complex phase_;
  std::vector<Complex> coeff_;
  WaveFunction t0_, t1_, t2_;
  long matvecs_ = 0;
};

/// short iterative Lanczos: per-step Krylov approximation of exp(-i H dt)
/// with adaptive dimension and substepping; error controlled by the state's
/// occupied spectral width, not the grid's full range
class LanczosStepper {
 public:
  LanczosStepper(const HamiltonianOnGrid& h, double dt_au, double tolerance,
                 int max_krylov = 15);
  void step(WaveFunction& psi);
  long matvecs() const { return matvecs_; }
  int last_dim() const { return last_dim_; }

 private:
  double krylov_build(const WaveFunction& psi);  // returns norm of psi
  const HamiltonianOnGrid& h_;
  double dt_au_, tol_;
  int max_m_;
  std::vector<WaveFunction> basis_;
  Eigen::VectorXd alpha_, beta_;
  int built_ = 0;
  int last_dim_ = 0;
  long matvecs_ = 0;
};

struct PropagationResult {
  WaveFunction psi;
  int steps = 0;
  long matvecs = 0;
  double final_norm = 1.0;
};

/// hook(sample_index, t_au, psi) fires at t = 0 and every sample_stride steps
using SampleHook = std::function<void(int, double, const WaveFunction&)>;

PropagationResult propagate(const HamiltonianOnGrid& h, const WaveFunction& psi0,
                            const PropagationConfig& config,
                            const SampleHook& hook = {});

struct EigenOptions {
  int max_basis = 80;
  int max_restarts = 200;
  double tol_rel = 1e-8;  // residual below tol_rel * |eigenvalue|
};

/// k lowest eigenpairs by thick-restart Lanczos with full reorthogonalization
std::vector<std::pair<double, WaveFunction>> lowest_eigenstates(
    const HamiltonianOnGrid& h, int k, const EigenOptions& opts = {});

struct RelaxOptions {
  double tau_au = 500.0;
  int krylov_dim = 30;
  double energy_tol = 1e-10;  // E_h per step
  int max_steps = 5000;
};

/// imaginary-time relaxation to the ground state, normalized every step,
/// energy from the Rayleigh quotient
std::pair<double, WaveFunction> relax_ground_state(const HamiltonianOnGrid& h,
                                                   const WaveFunction& guess,
                                                   const RelaxOptions& opts = {});

/// brute-force reference for small grids: explicit dense matrix, full
/// diagonalization, exact spectral propagation
class DenseReference {
 public:
  static constexpr std::int64_t kMaxDim = 4096;
  explicit DenseReference(const HamiltonianOnGrid& h);

  const Eigen::VectorXd& eigenvalues() const { return evals_; }
  const Eigen::MatrixXd& matrix() const { return hmat_; }
  WaveFunction evolve(const WaveFunction& psi0, double t_au) const;
  Eigen::VectorXcd evolve_coefficients(const Eigen::VectorXcd& c0, double t_au) const;

 private:
  hilbert::SpacePtr space_;
  Eigen::MatrixXd hmat_;
  Eigen::VectorXd evals_;
  Eigen::MatrixXd evecs_;
};

}  // namespace cavidyn::propagator
