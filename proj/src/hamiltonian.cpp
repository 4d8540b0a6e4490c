#include "cavidyn/hamiltonian.hpp"

#include <cmath>
#include <stdexcept>

namespace cavidyn::hamiltonian {

namespace {
using RowMatD = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
constexpr std::int64_t kColPanel = 2048;   // doubles per column panel (mode 0)
constexpr std::int64_t kRowPanel = 1024;   // rows per panel (last mode)
constexpr std::int64_t kDiagChunk = 1 << 14;
}  // namespace

HamiltonianOnGrid::HamiltonianOnGrid(SpacePtr space) : space_(std::move(space)) {
  init_kinetic();
}

HamiltonianOnGrid::HamiltonianOnGrid(SpacePtr space, Eigen::VectorXd diagonal)
    : space_(std::move(space)) {
  if (diagonal.size() != space_->total_dim()) {
    throw std::invalid_argument("diagonal size does not match the space");
  }
  diag_ = std::move(diagonal);
  init_kinetic();
}

void HamiltonianOnGrid::init_kinetic() {
  const int nm = space_->num_modes();
  kin_.reserve(nm);
  for (int m = 0; m < nm; ++m) kin_.push_back(space_->mode(m).kinetic);
  const auto& t = kin_.back();
  const int n = static_cast<int>(t.rows());
  w_last_.setZero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      w_last_(2 * i, 2 * j) = t(i, j);
      w_last_(2 * i + 1, 2 * j + 1) = t(i, j);
    }
  }
}

HamiltonianOnGrid HamiltonianOnGrid::assemble(SpacePtr space,
                                              const model::ModelParams& params) {
  params.validate();
  if (!space->has_cavity() || space->num_transfer_modes() != params.n_molecules) {
    throw std::invalid_argument(
        "assemble: space must hold n_molecules transfer modes plus the cavity mode");
  }
  HamiltonianOnGrid h(space);
  PfData pf;
  pf.params = params;

  const int n_t = space->num_transfer_modes();
  std::int64_t transfer_dim = 1;
  for (int m = 0; m < n_t; ++m) transfer_dim *= space->mode(m).size();

  // per-molecule 1D tables
  std::vector<Eigen::VectorXd> v1(n_t), d1(n_t);
  for (int m = 0; m < n_t; ++m) {
    const auto& pts = space->mode(m).points;
    v1[m].resize(pts.size());
    d1[m].resize(pts.size());
    for (int i = 0; i < pts.size(); ++i) {
      v1[m][i] = model::transfer_potential(params, pts[i]);
      d1[m][i] = model::dipole_1d(params, pts[i]);
    }
  }

  pf.v_transfer.resize(transfer_dim);
  pf.s_transfer.resize(transfer_dim);
  pf.p_transfer.resize(transfer_dim);
  for (std::int64_t j = 0; j < transfer_dim; ++j) {
    double v = 0.0, s = 0.0, p2 = 0.0;
    std::int64_t rem = j;
    for (int m = n_t - 1; m >= 0; --m) {
      const std::int64_t nmode = space->mode(m).size();
      const std::int64_t i = rem % nmode;
      rem /= nmode;
      v += v1[m][i];
      const double d = d1[m][i];
      s += d;
      p2 += d * d;
    }
    pf.v_transfer[j] = v;
    pf.s_transfer[j] = s;
    pf.p_transfer[j] = p2;
  }

  const auto& cav = space->mode(space->num_modes() - 1);
  pf.x_cavity = cav.points;
  pf.v_cavity = 0.5 * params.omega_c * params.omega_c *
                cav.points.array().square().matrix();

  const double g_n = params.g_collective();
  pf.c_sc = std::sqrt(2.0 * params.omega_c) * g_n;
  pf.c_dse = g_n * g_n / params.omega_c;

  h.pf_ = std::move(pf);
  return h;
}

const model::ModelParams& HamiltonianOnGrid::params() const {
  if (!pf_) throw std::logic_error("generic Hamiltonian has no model parameters");
  return pf_->params;
}

double HamiltonianOnGrid::omega_c() const { return params().omega_c; }

double HamiltonianOnGrid::pf_diag(std::int64_t j, std::int64_t i) const {
  const PfData& pf = *pf_;
  const double s = pf.s_transfer[j];
  const double dse = pf.params.dse_cross_terms ? s * s : pf.p_transfer[j];
  return pf.v_transfer[j] + pf.v_cavity[i] + pf.c_sc * s * pf.x_cavity[i] +
         pf.c_dse * dse;
}

double HamiltonianOnGrid::diagonal_value(std::int64_t k) const {
  if (!pf_) return diag_[k];
  const std::int64_t nc = space_->mode(space_->num_modes() - 1).size();
  return pf_diag(k / nc, k % nc);
}

Eigen::VectorXd HamiltonianOnGrid::term_diagonal(Term t) const {
  if (!pf_) throw std::logic_error("term diagonals exist only for the Pauli-Fierz form");
  const PfData& pf = *pf_;
  const std::int64_t nc = pf.x_cavity.size();
  const std::int64_t n = space_->total_dim();
  Eigen::VectorXd out(n);
  for (std::int64_t k = 0; k < n; ++k) {
    const std::int64_t j = k / nc, i = k % nc;
    switch (t) {
      case Term::v_s: out[k] = pf.v_transfer[j]; break;
      case Term::v_c: out[k] = pf.v_cavity[i]; break;
      case Term::v_sc: out[k] = pf.c_sc * pf.s_transfer[j] * pf.x_cavity[i]; break;
      case Term::v_dse: {
        const double s = pf.s_transfer[j];
        out[k] = pf.c_dse * (pf.params.dse_cross_terms ? s * s : pf.p_transfer[j]);
        break;
      }
    }
  }
  return out;
}

void HamiltonianOnGrid::apply_into(const WaveFunction& in, WaveFunction& out,
                                   double alpha, double beta) const {
  if (in.space().get() != space_.get())
    throw std::invalid_argument("apply: state lives on a different space");
  if (out.space().get() != space_.get()) out = WaveFunction(space_);

  const Complex* pin = in.data();
  Complex* pout = out.data();
  const std::int64_t n = space_->total_dim();

  // diagonal pass, overwriting out
  if (pf_) {
    const std::int64_t nc = pf_->x_cavity.size();
    const std::int64_t nj = n / nc;
#pragma omp parallel for schedule(static)
    for (std::int64_t j = 0; j < nj; ++j) {
      const Complex* src = pin + j * nc;
      Complex* dst = pout + j * nc;
      for (std::int64_t i = 0; i < nc; ++i) {
        dst[i] = (alpha * pf_diag(j, i) + beta) * src[i];
      }
    }
  } else {
    const double* d = diag_.data();
#pragma omp parallel for schedule(static)
    for (std::int64_t c = 0; c < (n + kDiagChunk - 1) / kDiagChunk; ++c) {
      const std::int64_t lo = c * kDiagChunk;
      const std::int64_t hi = std::min(n, lo + kDiagChunk);
      for (std::int64_t k = lo; k < hi; ++k) pout[k] = (alpha * d[k] + beta) * pin[k];
    }
  }

  // kinetic passes, accumulating; complex arrays are viewed as interleaved
  // real matrices so each mode application is a real gemm
  const int nm = space_->num_modes();
  const auto* in_r = reinterpret_cast<const double*>(pin);
  auto* out_r = reinterpret_cast<double*>(pout);
  for (int m = 0; m < nm; ++m) {
    const std::int64_t nmode = space_->mode(m).size();
    const std::int64_t inner = space_->stride(m);
    const std::int64_t outer = space_->outer(m);
    if (inner == 1) {
      const std::int64_t rows = outer;
      const std::int64_t cols = 2 * nmode;
      Eigen::Map<const RowMatD> a(in_r, rows, cols);
      Eigen::Map<RowMatD> o(out_r, rows, cols);
      const std::int64_t npanels = (rows + kRowPanel - 1) / kRowPanel;
#pragma omp parallel for schedule(static)
      for (std::int64_t p = 0; p < npanels; ++p) {
        const std::int64_t lo = p * kRowPanel;
        const std::int64_t h = std::min(rows, lo + kRowPanel) - lo;
        o.middleRows(lo, h).noalias() += alpha * (a.middleRows(lo, h) * w_last_);
      }
    } else if (outer == 1) {
      const std::int64_t cols = 2 * inner;
      Eigen::Map<const RowMatD> b(in_r, nmode, cols);
      Eigen::Map<RowMatD> o(out_r, nmode, cols);
      const std::int64_t npanels = (cols + kColPanel - 1) / kColPanel;
#pragma omp parallel for schedule(static)
      for (std::int64_t p = 0; p < npanels; ++p) {
        const std::int64_t lo = p * kColPanel;
        const std::int64_t w = std::min(cols, lo + kColPanel) - lo;
        o.middleCols(lo, w).noalias() += alpha * (kin_[m] * b.middleCols(lo, w));
      }
    } else {
      const std::int64_t cols = 2 * inner;
#pragma omp parallel for schedule(static)
      for (std::int64_t ob = 0; ob < outer; ++ob) {
        Eigen::Map<const RowMatD> b(in_r + ob * nmode * cols, nmode, cols);
        Eigen::Map<RowMatD> o(out_r + ob * nmode * cols, nmode, cols);
        o.noalias() += alpha * (kin_[m] * b);
      }
    }
  }
}

WaveFunction HamiltonianOnGrid::apply(const WaveFunction& in) const {
  WaveFunction out(space_);
  apply_into(in, out, 1.0, 0.0);
  return out;
}

void HamiltonianOnGrid::apply_mode_kinetic(int mode, const WaveFunction& in,
                                           WaveFunction& out) const {
  if (out.space().get() != space_.get()) out = WaveFunction(space_);
  out.set_zero();
  const auto* in_r = reinterpret_cast<const double*>(in.data());
  auto* out_r = reinterpret_cast<double*>(out.data());
  const std::int64_t nmode = space_->mode(mode).size();
  const std::int64_t inner = space_->stride(mode);
  const std::int64_t outer = space_->outer(mode);
  if (inner == 1) {
    Eigen::Map<const RowMatD> a(in_r, outer, 2 * nmode);
    Eigen::Map<RowMatD> o(out_r, outer, 2 * nmode);
    o.noalias() = a * w_last_;
  } else {
    const std::int64_t cols = 2 * inner;
#pragma omp parallel for schedule(static)
    for (std::int64_t ob = 0; ob < outer; ++ob) {
      Eigen::Map<const RowMatD> b(in_r + ob * nmode * cols, nmode, cols);
      Eigen::Map<RowMatD> o(out_r + ob * nmode * cols, nmode, cols);
      o.noalias() = kin_[mode] * b;
    }
  }
}

TermExpectations HamiltonianOnGrid::term_expectations(const WaveFunction& psi) const {
  if (!pf_) throw std::logic_error("term expectations exist only for the Pauli-Fierz form");
  const PfData& pf = *pf_;
  const std::int64_t nc = pf.x_cavity.size();
  const std::int64_t n = space_->total_dim();
  const std::int64_t nj = n / nc;
  const Complex* p = psi.data();

  // potential-like parts in one fused deterministic pass over transfer rows
  const std::int64_t nchunks = std::min<std::int64_t>(256, nj);
  std::vector<double> pv(nchunks, 0.0), pc(nchunks, 0.0), psc(nchunks, 0.0),
      pdse(nchunks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < nchunks; ++c) {
    const std::int64_t lo = c * nj / nchunks;
    const std::int64_t hi = (c + 1) * nj / nchunks;
    double av = 0.0, ac = 0.0, asc = 0.0, adse = 0.0;
    for (std::int64_t j = lo; j < hi; ++j) {
      const double s = pf.s_transfer[j];
      const double dse = pf.params.dse_cross_terms ? s * s : pf.p_transfer[j];
      const Complex* row = p + j * nc;
      for (std::int64_t i = 0; i < nc; ++i) {
        const double w = std::norm(row[i]);
        av += w * pf.v_transfer[j];
        ac += w * pf.v_cavity[i];
        asc += w * pf.c_sc * s * pf.x_cavity[i];
        adse += w * pf.c_dse * dse;
      }
    }
    pv[c] = av; pc[c] = ac; psc[c] = asc; pdse[c] = adse;
  }

  TermExpectations te;
  te.h_s = hilbert::deterministic_sum(pv);
  te.h_c = hilbert::deterministic_sum(pc);
  te.h_sc = hilbert::deterministic_sum(psc);
  te.h_dse = hilbert::deterministic_sum(pdse);

  // kinetic parts: one mode application each
  WaveFunction work(space_);
  for (int m = 0; m < space_->num_modes(); ++m) {
    apply_mode_kinetic(m, psi, work);
    const double t = hilbert::inner_product(psi, work).real();
    if (m < space_->num_transfer_modes())
      te.h_s += t;
    else
      te.h_c += t;
  }
  te.total = te.h_s + te.h_c + te.h_sc + te.h_dse;
  return te;
}

}  // namespace cavidyn::hamiltonian
