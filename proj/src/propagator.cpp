#include "cavidyn/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace cavidyn::propagator {

namespace {
constexpr Complex kI{0.0, 1.0};

void axpy(Complex a, const WaveFunction& x, WaveFunction& y) {
  const Complex* px = x.data();
  Complex* py = y.data();
  const std::int64_t n = x.size();
#pragma omp parallel for schedule(static) if (n > (1 << 16))
  for (std::int64_t k = 0; k < n; ++k) py[k] += a * px[k];
}

void scale(WaveFunction& x, Complex a) {
  Complex* px = x.data();
  const std::int64_t n = x.size();
#pragma omp parallel for schedule(static) if (n > (1 << 16))
  for (std::int64_t k = 0; k < n; ++k) px[k] *= a;
}

}  // namespace

void PropagationConfig::validate() const {
  if (!(dt_fs > 0.0)) throw std::invalid_argument("dt must be > 0");
  if (!(t_final_fs >= dt_fs)) throw std::invalid_argument("t_final must be >= dt");
  if (!(tolerance > 0.0 && tolerance <= 1e-3)) {
    throw std::invalid_argument("tolerance must be in (0, 1e-3]");
  }
  if (sample_stride < 1) throw std::invalid_argument("sample_stride must be >= 1");
  if (krylov_dim < 2) throw std::invalid_argument("krylov_dim must be >= 2");
}

SpectralBounds estimate_spectral_bounds(const HamiltonianOnGrid& h, int iterations) {
  const std::int64_t dim = h.space()->total_dim();
  const int m = static_cast<int>(std::min<std::int64_t>(iterations, dim));

  // plain Lanczos on a fixed pseudorandom start vector
  WaveFunction v(h.space());
  std::uint64_t state = 0x9e3779b97f4a7c15ull;
  for (auto& c : v.amplitudes()) {
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    const double r1 = static_cast<double>(state >> 11) * 0x1.0p-53;
    state = state * 6364136223846793005ull + 1442695040888963407ull;
    const double r2 = static_cast<double>(state >> 11) * 0x1.0p-53;
    c = Complex{r1 - 0.5, r2 - 0.5};
  }
  v.normalize();

  std::vector<WaveFunction> basis;
  basis.reserve(m + 1);
  basis.push_back(v);
  Eigen::VectorXd al(m), be(m);
  WaveFunction w(h.space());
  int built = 0;
  for (int j = 0; j < m; ++j) {
    h.apply_into(basis[j], w, 1.0, 0.0);
    if (j > 0) axpy(-be[j - 1], basis[j - 1], w);
    al[j] = hilbert::inner_product(basis[j], w).real();
    axpy(Complex{-al[j], 0.0}, basis[j], w);
    // one reorthogonalization pass keeps the extremal estimates honest
    for (int i = 0; i <= j; ++i) axpy(-hilbert::inner_product(basis[i], w), basis[i], w);
    be[j] = w.norm();
    built = j + 1;
    if (be[j] < 1e-12) break;
    WaveFunction next = w;
    scale(next, Complex{1.0 / be[j], 0.0});
    basis.push_back(std::move(next));
  }

  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(built, built);
  for (int j = 0; j < built; ++j) {
    t(j, j) = al[j];
    if (j + 1 < built) t(j, j + 1) = t(j + 1, j) = be[j];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
  const Eigen::VectorXd& theta = es.eigenvalues();
  const Eigen::MatrixXd& u = es.eigenvectors();
  const double beta_last = built < m ? 0.0 : be[built - 1];
  const double r_lo = beta_last * std::abs(u(built - 1, 0));
  const double r_hi = beta_last * std::abs(u(built - 1, built - 1));
  double lo = theta[0] - r_lo;
  double hi = theta[built - 1] + r_hi;
  const double pad = 0.05 * (hi - lo) + 1e-12;
  return {lo - pad, hi + pad};
}

ChebyshevStepper::ChebyshevStepper(const HamiltonianOnGrid& h, double dt_au,
                                   double tolerance, int max_order)
    : h_(h), dt_au_(dt_au), t0_(h.space()), t1_(h.space()), t2_(h.space()) {
  bounds_ = estimate_spectral_bounds(h);
  center_ = 0.5 * (bounds_.e_max + bounds_.e_min);
  half_range_ = 0.5 * bounds_.range();
  if (!(half_range_ > 0.0)) throw PropagationError("degenerate spectral range");

  const double x = half_range_ * std::abs(dt_au);
  const int cap = max_order > 0 ? max_order
                                : static_cast<int>(std::ceil(x + 60.0 + 12.0 * std::log10(1.0 / tolerance)));
  coeff_.clear();
  coeff_.reserve(cap + 1);
  Complex ipow{1.0, 0.0};  // (-i)^k, sign of dt folded in below
  const double sgn = dt_au >= 0.0 ? 1.0 : -1.0;
  int tail = 0;
  for (int k = 0; k <= cap; ++k) {
    const double jk = std::cyl_bessel_j(k, x);
    coeff_.push_back((k == 0 ? 1.0 : 2.0) * ipow * jk);
    ipow *= Complex{0.0, -sgn};
    if (k > x && std::abs(jk) < tolerance * 1e-2) {
      if (++tail >= 3) break;
    } else {
      tail = 0;
    }
  }
  if (std::abs(std::cyl_bessel_j(static_cast<int>(coeff_.size()) - 1, x)) > tolerance) {
    throw PropagationError("Chebyshev order cap reached before coefficients decayed");
  }
  phase_ = std::exp(-kI * center_ * dt_au);
}

void ChebyshevStepper::step(WaveFunction& psi) {
  // recurrence on T_k(H~) psi with H~ = (H - c)/h scaled to [-1, 1]
  const double a = 1.0 / half_range_;
  const double b = -center_ / half_range_;

  std::swap(t0_, psi);
  h_.apply_into(t0_, t1_, a, b);
  ++matvecs_;

  WaveFunction& acc = psi;  // psi holds stale data; rebuild it in place
  acc = t0_;
  scale(acc, coeff_[0]);
  axpy(coeff_[1], t1_, acc);
  for (std::size_t k = 2; k < coeff_.size(); ++k) {
    h_.apply_into(t1_, t2_, 2.0 * a, 2.0 * b);
    ++matvecs_;
    axpy(Complex{-1.0, 0.0}, t0_, t2_);
    std::swap(t0_, t1_);
    std::swap(t1_, t2_);
    axpy(coeff_[k], t1_, acc);
  }
  scale(acc, phase_);
}

LanczosStepper::LanczosStepper(const HamiltonianOnGrid& h, double dt_au,
                               double tolerance, int max_krylov)
    : h_(h), dt_au_(dt_au), tol_(tolerance), max_m_(std::max(2, max_krylov)) {
  max_m_ = static_cast<int>(std::min<std::int64_t>(max_m_, h.space()->total_dim()));
  alpha_.resize(max_m_);
  beta_.resize(max_m_);
  basis_.reserve(max_m_ + 1);
}

double LanczosStepper::krylov_build(const WaveFunction& psi) {
  // extends the Krylov space until the propagation error estimate for the
  // remaining step is below tolerance (checked by the caller via curr_err_)
  const double nrm = psi.norm();
  if (basis_.empty()) {
    for (int i = 0; i <= max_m_; ++i) basis_.emplace_back(h_.space());
  }
  basis_[0] = psi;
  scale(basis_[0], Complex{1.0 / nrm, 0.0});
  built_ = 0;
  return nrm;
}

void LanczosStepper::step(WaveFunction& psi) {
  double remaining = dt_au_;
  int guard = 0;
  while (std::abs(remaining) > 1e-14 * std::abs(dt_au_)) {
    if (++guard > 64) throw PropagationError("Lanczos substepping failed to advance");
    const double nrm = krylov_build(psi);

    Eigen::VectorXd theta;
    Eigen::MatrixXd u;
    bool exact = false;
    Eigen::VectorXcd c_prev;  // previous-order coefficients, for the error test

    auto decompose = [&](int m) {
      Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
      for (int i = 0; i < m; ++i) {
        t(i, i) = alpha_[i];
        if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta_[i];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
      theta = es.eigenvalues();
      u = es.eigenvectors();
    };
    auto weights = [&](double tau) -> Eigen::VectorXcd {
      const int m = static_cast<int>(theta.size());
      Eigen::VectorXcd w(m);
      for (int p = 0; p < m; ++p) w[p] = std::exp(-kI * theta[p] * tau) * u(0, p);
      return u.cast<Complex>() * w;
    };
    // convergence of the produced state with Krylov order; the basis is
    // orthonormal so the coefficient difference is the state difference
    auto order_err = [&](const Eigen::VectorXcd& c_m, const Eigen::VectorXcd& c_lo) {
      double acc = 0.0;
      for (Eigen::Index i = 0; i < c_m.size(); ++i) {
        const Complex d = i < c_lo.size() ? c_m[i] - c_lo[i] : c_m[i];
        acc += std::norm(d);
      }
      return std::sqrt(acc);
    };

    // grow the space until consecutive orders agree to tolerance
    double err = std::numeric_limits<double>::infinity();
    for (int j = 0; j < max_m_; ++j) {
      h_.apply_into(basis_[j], basis_[j + 1], 1.0, 0.0);
      ++matvecs_;
      if (j > 0) axpy(Complex{-beta_[j - 1], 0.0}, basis_[j - 1], basis_[j + 1]);
      alpha_[j] = hilbert::inner_product(basis_[j], basis_[j + 1]).real();
      axpy(Complex{-alpha_[j], 0.0}, basis_[j], basis_[j + 1]);
      for (int i = 0; i <= j; ++i) {
        axpy(-hilbert::inner_product(basis_[i], basis_[j + 1]), basis_[i], basis_[j + 1]);
      }
      beta_[j] = basis_[j + 1].norm();
      built_ = j + 1;
      if (beta_[j] < 1e-14) {
        exact = true;  // invariant subspace, expansion is exact
      } else {
        scale(basis_[j + 1], Complex{1.0 / beta_[j], 0.0});
      }
      decompose(built_);
      if (exact) break;
      if (built_ >= 3) {
        const Eigen::VectorXcd c_now = weights(remaining);
        err = order_err(c_now, c_prev);
        c_prev = c_now;
        if (err < tol_ * std::abs(remaining) / std::abs(dt_au_)) break;
      } else {
        c_prev = weights(remaining);
      }
    }

    double tau = remaining;
    if (!exact && err >= tol_ * std::abs(remaining) / std::abs(dt_au_)) {
      // shrink the substep until consecutive orders agree
      const int m = built_;
      while (std::abs(tau) > 1e-6 * std::abs(dt_au_)) {
        decompose(m - 1);
        const Eigen::VectorXcd lo = weights(tau);
        decompose(m);
        const Eigen::VectorXcd hi = weights(tau);
        if (order_err(hi, lo) < tol_ * std::abs(tau) / std::abs(dt_au_)) break;
        tau *= 0.5;
      }
    }
    decompose(built_);
    const Eigen::VectorXcd c = weights(tau);
    psi.set_zero();
    for (int j = 0; j < built_; ++j) axpy(c[j] * nrm, basis_[j], psi);
    last_dim_ = built_;
    remaining -= tau;
  }
}

PropagationResult propagate(const HamiltonianOnGrid& h, const WaveFunction& psi0,
                            const PropagationConfig& config, const SampleHook& hook) {
  config.validate();
  const double dt_au = units::fs_to_au(config.dt_fs);
  const int n_steps = static_cast<int>(std::llround(config.t_final_fs / config.dt_fs));

  PropagationResult res;
  res.psi = psi0;

  std::unique_ptr<ChebyshevStepper> cheb;
  std::unique_ptr<LanczosStepper> sil;
  if (config.method == Method::chebyshev) {
    cheb = std::make_unique<ChebyshevStepper>(h, dt_au, config.tolerance,
                                              config.chebyshev_max_order);
  } else {
    sil = std::make_unique<LanczosStepper>(h, dt_au, config.tolerance, config.krylov_dim);
  }

  int sample_index = 0;
  if (hook) hook(sample_index++, 0.0, res.psi);
  for (int s = 1; s <= n_steps; ++s) {
    if (cheb)
      cheb->step(res.psi);
    else
      sil->step(res.psi);
    const double nrm = res.psi.norm();
    if (std::abs(nrm - 1.0) > config.norm_drift_abort) {
      std::ostringstream os;
      os << "norm drift " << std::abs(nrm - 1.0) << " at step " << s << " (t = "
         << s * config.dt_fs << " fs) exceeds " << config.norm_drift_abort;
      throw PropagationError(os.str());
    }
    if (hook && (s % config.sample_stride == 0)) {
      hook(sample_index++, s * dt_au, res.psi);
    }
  }
  res.steps = n_steps;
  res.matvecs = cheb ? cheb->matvecs() : sil->matvecs();
  res.final_norm = res.psi.norm();
  return res;
}

std::vector<std::pair<double, WaveFunction>> lowest_eigenstates(
    const HamiltonianOnGrid& h, int k, const EigenOptions& opts) {
  const std::int64_t dim = h.space()->total_dim();
  if (k < 1) throw std::invalid_argument("need k >= 1 eigenpairs");
  if (k >= dim) throw std::invalid_argument("k must be well below the grid dimension");

  const int m_max = static_cast<int>(std::min<std::int64_t>(
      std::max(opts.max_basis, 2 * k + 12), dim));
  const int n_keep = std::min(m_max / 2, std::max(k + 6, 12));

  std::vector<WaveFunction> basis(m_max, WaveFunction{});
  std::uint64_t state = 0x2545f4914f6cdd1dull;
  auto fill_random = [&state](WaveFunction& v) {
    for (auto& c : v.amplitudes()) {
      state = state * 6364136223846793005ull + 1442695040888963407ull;
      c = Complex{static_cast<double>(state >> 11) * 0x1.0p-53 - 0.5, 0.0};
    }
  };
  basis[0] = WaveFunction(h.space());
  fill_random(basis[0]);
  basis[0].normalize();

  // projected matrix kept explicitly; full reorthogonalization makes the
  // basis orthonormal so Rayleigh-Ritz is plain symmetric diagonalization
  Eigen::MatrixXd proj = Eigen::MatrixXd::Zero(m_max, m_max);
  WaveFunction w(h.space());
  int filled = 1;  // orthonormal vectors currently in the basis

  for (int restart = 0; restart < opts.max_restarts; ++restart) {
    for (int j = filled - 1; j < m_max; ++j) {
      h.apply_into(basis[j], w, 1.0, 0.0);
      // two-pass orthogonalization; accumulated coefficients are <b_i|H|b_j>
      for (int pass = 0; pass < 2; ++pass) {
        for (int i = 0; i <= j; ++i) {
          const Complex p = hilbert::inner_product(basis[i], w);
          if (pass == 0) proj(i, j) = p.real();
          else proj(i, j) += p.real();
          axpy(-p, basis[i], w);
        }
      }
      for (int i = 0; i <= j; ++i) proj(j, i) = proj(i, j);
      if (j + 1 >= m_max) {
        filled = m_max;
        break;
      }
      const double b = w.norm();
      if (b < 1e-13) {
        fill_random(w);
        for (int i = 0; i <= j; ++i) axpy(-hilbert::inner_product(basis[i], w), basis[i], w);
        w.normalize();
        proj(j + 1, j) = proj(j, j + 1) = 0.0;
      } else {
        scale(w, Complex{1.0 / b, 0.0});
        proj(j + 1, j) = proj(j, j + 1) = b;
      }
      basis[j + 1] = w;
      filled = j + 2;
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(proj);
    const Eigen::VectorXd& theta = es.eigenvalues();
    const Eigen::MatrixXd& u = es.eigenvectors();

    const int want = n_keep;
    std::vector<WaveFunction> ritz;
    ritz.reserve(want);
    for (int p = 0; p < want; ++p) {
      WaveFunction y(h.space());
      for (int i = 0; i < m_max; ++i) axpy(Complex{u(i, p), 0.0}, basis[i], y);
      y.normalize();
      ritz.push_back(std::move(y));
    }

    // explicit residual check on the k lowest
    int conv = 0;
    WaveFunction residual_dir;
    for (int p = 0; p < k; ++p) {
      h.apply_into(ritz[p], w, 1.0, 0.0);
      axpy(Complex{-theta[p], 0.0}, ritz[p], w);
      const double r = w.norm();
      const double tol = opts.tol_rel * std::max(std::abs(theta[p]), 1e-6);
      if (r < tol) {
        ++conv;
      } else {
        residual_dir = w;
        break;
      }
    }
    if (conv >= k) {
      std::vector<std::pair<double, WaveFunction>> out;
      out.reserve(k);
      for (int p = 0; p < k; ++p) out.emplace_back(theta[p], std::move(ritz[p]));
      return out;
    }

    // thick restart: Ritz block plus the first unconverged residual direction
    for (int p = 0; p < want; ++p) basis[p] = std::move(ritz[p]);
    proj.setZero();
    for (int p = 0; p < want; ++p) proj(p, p) = theta[p];
    for (int p = 0; p < want; ++p) {
      axpy(-hilbert::inner_product(basis[p], residual_dir), basis[p], residual_dir);
    }
    if (residual_dir.norm() < 1e-13) {
      fill_random(residual_dir);
      for (int p = 0; p < want; ++p) {
        axpy(-hilbert::inner_product(basis[p], residual_dir), basis[p], residual_dir);
      }
    }
    residual_dir.normalize();
    basis[want] = std::move(residual_dir);
    filled = want + 1;  // the extension sweep fills the couplings of column `want`
  }
  throw std::runtime_error("lowest_eigenstates: no convergence after restarts");
}

std::pair<double, WaveFunction> relax_ground_state(const HamiltonianOnGrid& h,
                                                   const WaveFunction& guess,
                                                   const RelaxOptions& opts) {
  WaveFunction psi = guess;
  psi.normalize();
  const int m_cap = static_cast<int>(
      std::min<std::int64_t>(opts.krylov_dim, h.space()->total_dim()));
  std::vector<WaveFunction> basis;
  basis.reserve(m_cap + 1);
  for (int i = 0; i <= m_cap; ++i) basis.emplace_back(h.space());
  Eigen::VectorXd al(m_cap), be(m_cap);
  WaveFunction w(h.space());

  double e_prev = 0.0;
  bool have_prev = false;
  for (int it = 0; it < opts.max_steps; ++it) {
    basis[0] = psi;
    int m = 0;
    for (int j = 0; j < m_cap; ++j) {
      h.apply_into(basis[j], basis[j + 1], 1.0, 0.0);
      if (j > 0) axpy(Complex{-be[j - 1], 0.0}, basis[j - 1], basis[j + 1]);
      al[j] = hilbert::inner_product(basis[j], basis[j + 1]).real();
      axpy(Complex{-al[j], 0.0}, basis[j], basis[j + 1]);
      for (int i = 0; i <= j; ++i) {
        axpy(-hilbert::inner_product(basis[i], basis[j + 1]), basis[i], basis[j + 1]);
      }
      be[j] = basis[j + 1].norm();
      m = j + 1;
      if (be[j] < 1e-14) break;
      scale(basis[j + 1], Complex{1.0 / be[j], 0.0});
    }
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    for (int j = 0; j < m; ++j) {
      t(j, j) = al[j];
      if (j + 1 < m) t(j, j + 1) = t(j + 1, j) = be[j];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    const Eigen::VectorXd& theta = es.eigenvalues();
    const Eigen::MatrixXd& u = es.eigenvectors();
    // imaginary-time weights relative to the lowest Ritz value for stability
    Eigen::VectorXd wts(m);
    for (int p = 0; p < m; ++p) {
      wts[p] = std::exp(-(theta[p] - theta[0]) * opts.tau_au) * u(0, p);
    }
    Eigen::VectorXd c = u * wts;
    psi.set_zero();
    for (int j = 0; j < m; ++j) axpy(Complex{c[j], 0.0}, basis[j], psi);
    psi.normalize();

    // Rayleigh quotient within the Krylov subspace
    const Eigen::VectorXd cn = c / c.norm();
    const double e = cn.dot(t * cn);
    if (have_prev && std::abs(e - e_prev) < opts.energy_tol) {
      return {e, std::move(psi)};
    }
    e_prev = e;
    have_prev = true;
  }
  throw std::runtime_error("relax_ground_state: energy stagnated above tolerance");
}

DenseReference::DenseReference(const HamiltonianOnGrid& h) : space_(h.space()) {
  const std::int64_t n = space_->total_dim();
  if (n > kMaxDim) throw std::invalid_argument("dense reference capped at 4096 amplitudes");

  // independent brute-force assembly from the mode structure
  hmat_.setZero(n, n);
  const int nm = space_->num_modes();
  for (std::int64_t k = 0; k < n; ++k) hmat_(k, k) = h.diagonal_value(k);
  for (int m = 0; m < nm; ++m) {
    const auto& t = space_->mode(m).kinetic;
    const std::int64_t nmode = space_->mode(m).size();
    const std::int64_t inner = space_->stride(m);
    const std::int64_t outer = space_->outer(m);
    for (std::int64_t o = 0; o < outer; ++o) {
      for (std::int64_t i = 0; i < nmode; ++i) {
        for (std::int64_t j = 0; j < nmode; ++j) {
          for (std::int64_t in = 0; in < inner; ++in) {
            hmat_((o * nmode + i) * inner + in, (o * nmode + j) * inner + in) += t(i, j);
          }
        }
      }
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hmat_);
  evals_ = es.eigenvalues();
  evecs_ = es.eigenvectors();
}

Eigen::VectorXcd DenseReference::evolve_coefficients(const Eigen::VectorXcd& c0,
                                                     double t_au) const {
  Eigen::VectorXcd proj = evecs_.transpose() * c0;
  for (Eigen::Index p = 0; p < proj.size(); ++p) {
    proj[p] *= std::exp(-kI * evals_[p] * t_au);
  }
  return evecs_ * proj;
}

WaveFunction DenseReference::evolve(const WaveFunction& psi0, double t_au) const {
  const std::int64_t n = space_->total_dim();
  Eigen::VectorXcd c0(n);
  for (std::int64_t k = 0; k < n; ++k) c0[k] = psi0.data()[k];
  const Eigen::VectorXcd ct = evolve_coefficients(c0, t_au);
  WaveFunction out(space_);
  for (std::int64_t k = 0; k < n; ++k) out.data()[k] = ct[k];
  return out;
}

}  // namespace cavidyn::propagator
