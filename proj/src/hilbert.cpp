#include "cavidyn/hilbert.hpp"

#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cavidyn::hilbert {

namespace {
constexpr char kCheckpointMagic[8] = {'C', 'V', 'D', 'N', 'W', 'F', '0', '1'};
constexpr std::int64_t kReduceChunk = 1 << 14;
}  // namespace

ProductSpace::ProductSpace(std::vector<dvr::DvrBasis> modes, bool last_is_cavity,
                           std::int64_t max_amplitudes)
    : modes_(std::move(modes)), last_is_cavity_(last_is_cavity) {
  if (modes_.empty()) throw std::invalid_argument("ProductSpace needs at least one mode");
  total_dim_ = 1;
  for (const auto& m : modes_) {
    if (m.size() < 1) throw std::invalid_argument("empty mode grid");
    if (total_dim_ > max_amplitudes / m.size()) {
      throw std::length_error("ProductSpace exceeds the amplitude memory guard");
    }
    total_dim_ *= m.size();
  }
  strides_.resize(modes_.size());
  std::int64_t s = 1;
  for (int m = num_modes() - 1; m >= 0; --m) {
    strides_[m] = s;
    s *= modes_[m].size();
  }
}

std::int64_t ProductSpace::outer(int m) const {
  return total_dim_ / (strides_[m] * modes_[m].size());
}

std::string ProductSpace::grid_spec() const {
  std::ostringstream os;
  for (int m = 0; m < num_modes(); ++m) {
    const auto& b = modes_[m];
    if (m) os << " x ";
    os << b.size() << "[" << b.points[0] << "," << b.points[b.size() - 1] << "]";
  }
  return os.str();
}

WaveFunction::WaveFunction(SpacePtr space) : space_(std::move(space)) {
  amp_.assign(space_->total_dim(), Complex{0.0, 0.0});
}

double deterministic_sum(std::span<const double> partials) {
  // pairwise tree over a scratch copy, fixed order
  std::vector<double> buf(partials.begin(), partials.end());
  std::size_t n = buf.size();
  if (n == 0) return 0.0;
  while (n > 1) {
    std::size_t half = (n + 1) / 2;
    for (std::size_t i = 0; i + half < n; ++i) buf[i] += buf[i + half];
    n = half;
  }
  return buf[0];
}

namespace {

// chunked reduction of f(k) over [0, n); chunk boundaries independent of the
// thread count so results are bit-stable; small inputs stay serial to avoid
// fork/join overhead on the hot path
template <typename F>
double reduce_chunked(std::int64_t n, F&& f) {
  const std::int64_t nchunks = (n + kReduceChunk - 1) / kReduceChunk;
  std::vector<double> partials(static_cast<std::size_t>(nchunks), 0.0);
#pragma omp parallel for schedule(static) if (nchunks > 4)
  for (std::int64_t c = 0; c < nchunks; ++c) {
    const std::int64_t lo = c * kReduceChunk;
    const std::int64_t hi = std::min(n, lo + kReduceChunk);
    double acc = 0.0;
    for (std::int64_t k = lo; k < hi; ++k) acc += f(k);
    partials[static_cast<std::size_t>(c)] = acc;
  }
  return deterministic_sum(partials);
}

// single-pass complex reduction with the same fixed chunking
template <typename F>
Complex reduce_chunked_complex(std::int64_t n, F&& f) {
  const std::int64_t nchunks = (n + kReduceChunk - 1) / kReduceChunk;
  std::vector<double> pre(static_cast<std::size_t>(nchunks), 0.0);
  std::vector<double> pim(static_cast<std::size_t>(nchunks), 0.0);
#pragma omp parallel for schedule(static) if (nchunks > 4)
  for (std::int64_t c = 0; c < nchunks; ++c) {
    const std::int64_t lo = c * kReduceChunk;
    const std::int64_t hi = std::min(n, lo + kReduceChunk);
    double ar = 0.0, ai = 0.0;
    for (std::int64_t k = lo; k < hi; ++k) {
      const Complex v = f(k);
      ar += v.real();
      ai += v.imag();
    }
    pre[static_cast<std::size_t>(c)] = ar;
    pim[static_cast<std::size_t>(c)] = ai;
  }
  return {deterministic_sum(pre), deterministic_sum(pim)};
}

}  // namespace

double WaveFunction::norm() const {
  const Complex* a = amp_.data();
  return std::sqrt(reduce_chunked(size(), [a](std::int64_t k) { return std::norm(a[k]); }));
}

void WaveFunction::normalize() {
  const double n = norm();
  if (n == 0.0) throw std::runtime_error("cannot normalize the zero state");
  const double inv = 1.0 / n;
  for (auto& c : amp_) c *= inv;
}

void WaveFunction::set_zero() {
  std::fill(amp_.begin(), amp_.end(), Complex{0.0, 0.0});
}

Complex inner_product(const WaveFunction& a, const WaveFunction& b) {
  if (a.space().get() != b.space().get()) {
    throw std::invalid_argument("inner_product: states live on different spaces");
  }
  const Complex* pa = a.data();
  const Complex* pb = b.data();
  return reduce_chunked_complex(a.size(), [&](std::int64_t k) {
    return Complex{pa[k].real() * pb[k].real() + pa[k].imag() * pb[k].imag(),
                   pa[k].real() * pb[k].imag() - pa[k].imag() * pb[k].real()};
  });
}

Complex unconjugated_self_overlap(const WaveFunction& psi) {
  const Complex* p = psi.data();
  return reduce_chunked_complex(psi.size(), [&](std::int64_t k) {
    return Complex{p[k].real() * p[k].real() - p[k].imag() * p[k].imag(),
                   2.0 * p[k].real() * p[k].imag()};
  });
}

WaveFunction build_product_state(SpacePtr space,
                                 const std::vector<Eigen::VectorXcd>& factors) {
  if (static_cast<int>(factors.size()) != space->num_modes()) {
    throw std::invalid_argument("build_product_state: factor count != mode count");
  }
  for (int m = 0; m < space->num_modes(); ++m) {
    if (factors[m].size() != space->mode(m).size()) {
      throw std::invalid_argument("build_product_state: factor size mismatch on mode " +
                                  std::to_string(m));
    }
  }
  WaveFunction psi(space);
  Complex* out = psi.data();
  const int nm = space->num_modes();
  std::vector<std::int64_t> idx(nm, 0);
  const std::int64_t n = space->total_dim();
  for (std::int64_t k = 0; k < n; ++k) {
    Complex v{1.0, 0.0};
    std::int64_t rem = k;
    for (int m = 0; m < nm; ++m) {
      const std::int64_t i = rem / space->stride(m);
      rem -= i * space->stride(m);
      v *= factors[m][i];
    }
    out[k] = v;
  }
  psi.normalize();
  return psi;
}

Eigen::VectorXd mode_marginal(const WaveFunction& psi, int mode) {
  const auto& sp = *psi.space();
  if (mode < 0 || mode >= sp.num_modes()) throw std::out_of_range("mode index");
  const int n = sp.mode(mode).size();
  const std::int64_t inner = sp.stride(mode);
  const std::int64_t outer = sp.outer(mode);
  const Complex* p = psi.data();

  Eigen::VectorXd marg = Eigen::VectorXd::Zero(n);
  // fixed per-grid-point chunking keeps the accumulation order stable
  for (int i = 0; i < n; ++i) {
    std::vector<double> partials(static_cast<std::size_t>(outer), 0.0);
#pragma omp parallel for schedule(static)
    for (std::int64_t o = 0; o < outer; ++o) {
      const Complex* blk = p + (o * n + i) * inner;
      double acc = 0.0;
      for (std::int64_t j = 0; j < inner; ++j) acc += std::norm(blk[j]);
      partials[static_cast<std::size_t>(o)] = acc;
    }
    marg[i] = deterministic_sum(partials);
  }
  return marg;
}

double expectation_mode_function(const WaveFunction& psi, int mode,
                                 const Eigen::VectorXd& f_on_points) {
  const auto& sp = *psi.space();
  if (f_on_points.size() != sp.mode(mode).size()) {
    throw std::invalid_argument("expectation_mode_function: wrong grid size");
  }
  return mode_marginal(psi, mode).dot(f_on_points);
}

double expectation_diagonal(const WaveFunction& psi, std::span<const double> diag) {
  if (static_cast<std::int64_t>(diag.size()) != psi.size()) {
    throw std::invalid_argument("expectation_diagonal: wrong diagonal size");
  }
  const Complex* p = psi.data();
  const double* d = diag.data();
  std::vector<double> one{0.0};
  const std::int64_t n = psi.size();
  const std::int64_t nchunks = (n + kReduceChunk - 1) / kReduceChunk;
  std::vector<double> partials(static_cast<std::size_t>(nchunks), 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < nchunks; ++c) {
    const std::int64_t lo = c * kReduceChunk;
    const std::int64_t hi = std::min(n, lo + kReduceChunk);
    double acc = 0.0;
    for (std::int64_t k = lo; k < hi; ++k) acc += d[k] * std::norm(p[k]);
    partials[static_cast<std::size_t>(c)] = acc;
  }
  return deterministic_sum(partials);
}

ReducedDensity partial_trace(const WaveFunction& psi, int mode) {
  const auto& sp = *psi.space();
  if (mode < 0 || mode >= sp.num_modes()) throw std::out_of_range("mode index");
  const int n = sp.mode(mode).size();
  const std::int64_t inner = sp.stride(mode);
  const std::int64_t outer = sp.outer(mode);
  const Complex* p = psi.data();

  using RowMat = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  // fixed 64-way chunking over the outer index; per-chunk accumulators are
  // combined in a fixed order so results do not depend on the thread count
  const std::int64_t nchunks = std::min<std::int64_t>(64, outer);
  std::vector<Eigen::MatrixXcd> acc(static_cast<std::size_t>(nchunks),
                                    Eigen::MatrixXcd::Zero(n, n));
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < nchunks; ++c) {
    const std::int64_t lo = c * outer / nchunks;
    const std::int64_t hi = (c + 1) * outer / nchunks;
    Eigen::MatrixXcd& r = acc[static_cast<std::size_t>(c)];
    if (inner == 1) {
      Eigen::Map<const RowMat> a(p + lo * n, hi - lo, n);
      r.noalias() += a.transpose() * a.conjugate();
    } else {
      for (std::int64_t o = lo; o < hi; ++o) {
        Eigen::Map<const RowMat> blk(p + o * n * inner, n, inner);
        r.noalias() += blk * blk.adjoint();
      }
    }
  }
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(n, n);
  for (const auto& r : acc) rho += r;
  rho = 0.5 * (rho + rho.adjoint().eval());
  return {mode, std::move(rho)};
}

void save_checkpoint(const std::string& path, const WaveFunction& psi,
                     const CheckpointInfo& info) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open checkpoint for writing: " + path);
  const auto& sp = *psi.space();
  os.write(kCheckpointMagic, sizeof(kCheckpointMagic));
  const std::uint32_t version = 1;
  const std::uint32_t nm = static_cast<std::uint32_t>(sp.num_modes());
  os.write(reinterpret_cast<const char*>(&version), 4);
  os.write(reinterpret_cast<const char*>(&nm), 4);
  for (int m = 0; m < sp.num_modes(); ++m) {
    const std::uint64_t sz = static_cast<std::uint64_t>(sp.mode(m).size());
    os.write(reinterpret_cast<const char*>(&sz), 8);
  }
  os.write(reinterpret_cast<const char*>(&info.time_au), 8);
  os.write(reinterpret_cast<const char*>(&info.eta), 8);
  const std::int32_t nmol = info.n_molecules;
  os.write(reinterpret_cast<const char*>(&nmol), 4);
  os.write(reinterpret_cast<const char*>(psi.data()),
           static_cast<std::streamsize>(psi.size() * sizeof(Complex)));
  if (!os) throw std::runtime_error("checkpoint write failed: " + path);
}

WaveFunction load_checkpoint(const std::string& path, SpacePtr space,
                             CheckpointInfo* info) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open checkpoint: " + path);
  char magic[8];
  is.read(magic, 8);
  if (std::memcmp(magic, kCheckpointMagic, 8) != 0) {
    throw std::runtime_error("bad checkpoint magic in " + path);
  }
  std::uint32_t version = 0, nm = 0;
  is.read(reinterpret_cast<char*>(&version), 4);
  is.read(reinterpret_cast<char*>(&nm), 4);
  if (version != 1) throw std::runtime_error("unsupported checkpoint version");
  if (static_cast<int>(nm) != space->num_modes()) {
    throw std::runtime_error("checkpoint mode count does not match the space");
  }
  for (int m = 0; m < space->num_modes(); ++m) {
    std::uint64_t sz = 0;
    is.read(reinterpret_cast<char*>(&sz), 8);
    if (static_cast<int>(sz) != space->mode(m).size()) {
      throw std::runtime_error("checkpoint grid size mismatch on mode " + std::to_string(m));
    }
  }
  CheckpointInfo local;
  is.read(reinterpret_cast<char*>(&local.time_au), 8);
  is.read(reinterpret_cast<char*>(&local.eta), 8);
  std::int32_t nmol = 0;
  is.read(reinterpret_cast<char*>(&nmol), 4);
  local.n_molecules = nmol;
  WaveFunction psi(std::move(space));
  is.read(reinterpret_cast<char*>(psi.data()),
          static_cast<std::streamsize>(psi.size() * sizeof(Complex)));
  if (!is) throw std::runtime_error("checkpoint truncated: " + path);
  if (info) *info = local;
  return psi;
}

}  // namespace cavidyn::hilbert
