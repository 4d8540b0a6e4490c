#include "cavidyn/io.hpp"

#include <cstdlib>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cavidyn/units.hpp"

namespace cavidyn::io {

namespace fs = std::filesystem;
using nlohmann::json;
using ProductSpaceT = hilbert::ProductSpace;

namespace {

json default_config() {
  return json{
      {"model.eta", 0.0},
      {"model.n_molecules", 1},
      {"model.omega_c_cm1", 126.5},
      {"model.dse_cross_terms", true},
      {"grid.nq", 101},
      {"grid.q_min", -1.5},
      {"grid.q_max", 2.1},
      {"grid.nc", 101},
      {"memory.max_amplitudes", hilbert::ProductSpace::kDefaultMaxAmplitudes},
      {"propagation.dt_fs", 0.25},
      {"propagation.t_final_fs", 1000.0},
      {"propagation.method", "chebyshev"},
      {"propagation.krylov_dim", 15},
      {"propagation.chebyshev_max_order", 0},
      {"propagation.tolerance", 1e-10},
      {"propagation.sample_stride", 4},
      {"output.dir", "runs/latest"},
      {"output.coordinates", true},
      {"output.entropies", true},
      {"output.term_energies", true},
      {"output.autocorrelation", false},
      {"output.checkpoint_every_fs", 250.0},
      {"eigen.mode", "1d"},
      {"eigen.nq", 121},
      {"eigen.n_states", 4},
      {"eigen.nQ", 61},
      {"eigen.Q_min", -2.0},
      {"eigen.Q_max", 2.0},
      {"eigen.dump_densities", false},
      {"spectrum.t_final_fs", 3000.0},
      {"spectrum.e_min_cm1", 0.0},
      {"spectrum.e_max_cm1", 6000.0},
      {"spectrum.de_cm1", 0.5},
      {"spectrum.window", "cosine"},
      {"spectrum.relax_check", false},
      {"sweep.axis", "eta"},
      {"sweep.values", json::array({0.0, 0.01, 0.03, 0.05, 0.07, 0.09})},
      {"sweep.workers", 2},
  };
}

const std::vector<std::string>& model_field_names() {
  static const std::vector<std::string> names = {
      "omega_OH", "omega_SH", "mu_OH", "mu_SH", "delta_OH", "delta_SH",
      "q_OH0", "q_SH0", "k_c", "q_c", "mu_S", "mu_B", "omega_B", "a_S",
      "b_S", "d_0", "d_S", "d_B", "d_SB", "q_0", "d_10"};
  return names;
}

bool is_known_key(const json& defaults, const std::string& key) {
  if (defaults.contains(key)) return true;
  if (key.rfind("model.", 0) == 0) {
    const std::string field = key.substr(6);
    for (const auto& n : model_field_names()) {
      if (n == field) return true;
    }
  }
  return false;
}

double* model_field(model::ModelParams& p, const std::string& name) {
  if (name == "omega_OH") return &p.omega_OH;
  if (name == "omega_SH") return &p.omega_SH;
  if (name == "mu_OH") return &p.mu_OH;
  if (name == "mu_SH") return &p.mu_SH;
  if (name == "delta_OH") return &p.delta_OH;
  if (name == "delta_SH") return &p.delta_SH;
  if (name == "q_OH0") return &p.q_OH0;
  if (name == "q_SH0") return &p.q_SH0;
  if (name == "k_c") return &p.k_c;
  if (name == "q_c") return &p.q_c;
  if (name == "mu_S") return &p.mu_S;
  if (name == "mu_B") return &p.mu_B;
  if (name == "omega_B") return &p.omega_B;
  if (name == "a_S") return &p.a_S;
  if (name == "b_S") return &p.b_S;
  if (name == "d_0") return &p.d_0;
  if (name == "d_S") return &p.d_S;
  if (name == "d_B") return &p.d_B;
  if (name == "d_SB") return &p.d_SB;
  if (name == "q_0") return &p.q_0;
  if (name == "d_10") return &p.d_10;
  return nullptr;
}

std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

std::string format_number(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

json derived_from_series(const std::vector<observables::TimeSeries>& series) {
  json d;
  const observables::TimeSeries* p_sh = nullptr;
  const observables::TimeSeries* x_c = nullptr;
  const observables::TimeSeries* n_c = nullptr;
  const observables::TimeSeries* h_tot = nullptr;
  for (const auto& s : series) {
    if (s.name == "P_SH") p_sh = &s;
    if (s.name == "x_c_expect") x_c = &s;
    if (s.name == "n_c") n_c = &s;
    if (s.name == "H_total") h_tot = &s;
  }
  if (p_sh && !p_sh->values.empty()) {
    d["P_SH_t0"] = p_sh->values.front();
    const auto tau = observables::detect_recurrence_time(*p_sh);
    if (tau) d["tau_r_fs"] = *tau; else d["tau_r_fs"] = nullptr;
    d["k_SH_per_s"] = observables::extract_short_time_rate(*p_sh, tau);
  }
  if (x_c) {
    const auto period = observables::oscillation_period(*x_c);
    if (period) d["x_c_period_fs"] = *period; else d["x_c_period_fs"] = nullptr;
  }
  if (n_c && !n_c->values.empty()) d["n_c_t0"] = n_c->values.front();
  if (h_tot && !h_tot->values.empty()) {
    d["H_t0_cm1"] = units::hartree_to_cm1(h_tot->values.front());
    double dev = 0.0;
    for (double v : h_tot->values) dev = std::max(dev, std::abs(v - h_tot->values.front()));
    d["H_max_drift_rel"] = h_tot->values.front() != 0.0
                               ? dev / std::abs(h_tot->values.front())
                               : dev;
  }
  return d;
}

json sidecar_for(const observables::TimeSeriesMeta& m, const std::string& name) {
  return json{{"name", name},
              {"eta", m.eta},
              {"n_molecules", m.n_molecules},
              {"dt_fs", m.dt_fs},
              {"grid", m.grid_spec},
              {"dse_cross_terms", m.dse_cross_terms},
              {"config_hash", m.config_hash}};
}

}  // namespace

RunConfig::RunConfig() : data_(default_config()) {}

RunConfig RunConfig::from_file(const fs::path& p) {
  std::ifstream is(p);
  if (!is) throw std::invalid_argument("cannot open config file: " + p.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return from_json_text(ss.str());
}

RunConfig RunConfig::from_json_text(const std::string& text) {
  RunConfig cfg;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  cfg.merge(j);
  return cfg;
}

void RunConfig::merge(const json& flat) {
  if (!flat.is_object()) throw std::invalid_argument("config must be a JSON object");
  for (const auto& [key, value] : flat.items()) {
    if (!is_known_key(data_, key)) {
      throw std::invalid_argument("unknown config key: " + key);
    }
    data_[key] = value;
  }
}

void RunConfig::set(const std::string& key, const std::string& value) {
  json v;
  try {
    v = json::parse(value);
  } catch (const json::exception&) {
    v = value;  // bare word, keep as string
  }
  merge(json{{key, v}});
}

double RunConfig::number(const std::string& key) const {
  const auto& v = data_.at(key);
  if (!v.is_number()) throw std::invalid_argument("config key is not a number: " + key);
  return v.get<double>();
}

std::int64_t RunConfig::integer(const std::string& key) const {
  const auto& v = data_.at(key);
  if (!v.is_number()) throw std::invalid_argument("config key is not a number: " + key);
  const double d = v.get<double>();
  const auto i = static_cast<std::int64_t>(std::llround(d));
  if (std::abs(d - i) > 1e-9) throw std::invalid_argument("config key is not an integer: " + key);
  return i;
}

bool RunConfig::boolean(const std::string& key) const {
  const auto& v = data_.at(key);
  if (!v.is_boolean()) throw std::invalid_argument("config key is not a boolean: " + key);
  return v.get<bool>();
}

std::string RunConfig::text(const std::string& key) const {
  const auto& v = data_.at(key);
  if (!v.is_string()) throw std::invalid_argument("config key is not a string: " + key);
  return v.get<std::string>();
}

std::vector<double> RunConfig::numbers(const std::string& key) const {
  const auto& v = data_.at(key);
  if (!v.is_array()) throw std::invalid_argument("config key is not an array: " + key);
  std::vector<double> out;
  for (const auto& e : v) out.push_back(e.get<double>());
  return out;
}

std::string RunConfig::hash() const { return fnv1a_hex(data_.dump()); }

model::ModelParams RunConfig::model_params() const {
  model::ModelParams p;
  p.eta = number("model.eta");
  p.n_molecules = static_cast<int>(integer("model.n_molecules"));
  p.omega_c = units::cm1_to_hartree(number("model.omega_c_cm1"));
  p.dse_cross_terms = boolean("model.dse_cross_terms");
  for (const auto& [key, value] : data_.items()) {
    if (key.rfind("model.", 0) != 0) continue;
    const std::string field = key.substr(6);
    if (double* f = model_field(p, field)) *f = value.get<double>();
  }
  p.validate();
  return p;
}

hilbert::SpacePtr RunConfig::build_space() const {
  const auto p = model_params();
  const int nq = static_cast<int>(integer("grid.nq"));
  const int nc = static_cast<int>(integer("grid.nc"));
  const auto q_dvr = dvr::build_sinc_dvr(nq, number("grid.q_min"), number("grid.q_max"), p.mu_S);
  const auto c_dvr = dvr::build_ho_dvr(nc, p.omega_c);
  std::vector<dvr::DvrBasis> modes;
  modes.reserve(p.n_molecules + 1);
  for (int i = 0; i < p.n_molecules; ++i) modes.push_back(q_dvr);
  modes.push_back(c_dvr);
  return std::make_shared<ProductSpaceT>(std::move(modes), true,
                                         integer("memory.max_amplitudes"));
}

propagator::PropagationConfig RunConfig::propagation() const {
  propagator::PropagationConfig pc;
  pc.dt_fs = number("propagation.dt_fs");
  pc.t_final_fs = number("propagation.t_final_fs");
  const std::string m = text("propagation.method");
  if (m == "chebyshev") {
    pc.method = propagator::Method::chebyshev;
  } else if (m == "short_iterative_lanczos" || m == "sil" || m == "lanczos") {
    pc.method = propagator::Method::short_iterative_lanczos;
  } else {
    throw std::invalid_argument("unknown propagation.method: " + m);
  }
  pc.krylov_dim = static_cast<int>(integer("propagation.krylov_dim"));
  pc.chebyshev_max_order = static_cast<int>(integer("propagation.chebyshev_max_order"));
  pc.tolerance = number("propagation.tolerance");
  pc.sample_stride = static_cast<int>(integer("propagation.sample_stride"));
  pc.validate();
  return pc;
}

observables::RecorderOptions RunConfig::recorder_options() const {
  observables::RecorderOptions o;
  o.coordinates = boolean("output.coordinates");
  o.entropies = boolean("output.entropies");
  o.term_energies = boolean("output.term_energies");
  o.autocorrelation = boolean("output.autocorrelation");
  const auto pc = propagation();
  o.expected_samples =
      static_cast<int>(pc.t_final_fs / (pc.dt_fs * pc.sample_stride)) + 2;
  return o;
}

observables::TimeSeriesMeta RunConfig::meta(const hilbert::ProductSpace& space) const {
  observables::TimeSeriesMeta m;
  m.eta = number("model.eta");
  m.n_molecules = static_cast<int>(integer("model.n_molecules"));
  m.dt_fs = number("propagation.dt_fs");
  m.grid_spec = space.grid_spec();
  m.dse_cross_terms = boolean("model.dse_cross_terms");
  m.config_hash = hash();
  return m;
}

fs::path RunConfig::output_dir() const {
  fs::path dir = text("output.dir");
  if (const char* root = std::getenv("CAVIDYN_OUTPUT_ROOT"); root && *root) {
    if (dir.is_relative()) dir = fs::path(root) / dir;
  }
  return dir;
}

void write_text_atomic(const fs::path& p, const std::string& content) {
  fs::create_directories(p.parent_path().empty() ? "." : p.parent_path());
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open for writing: " + tmp.string());
    os << content;
  }
  fs::rename(tmp, p);
}

void write_time_series(const fs::path& dir, const observables::TimeSeries& ts) {
  std::ostringstream os;
  os << "t_fs,value\n" << std::setprecision(17);
  for (std::size_t i = 0; i < ts.times_fs.size(); ++i) {
    os << ts.times_fs[i] << "," << ts.values[i] << "\n";
  }
  write_text_atomic(dir / (ts.name + ".csv"), os.str());
  write_text_atomic(dir / (ts.name + ".json"), sidecar_for(ts.meta, ts.name).dump(2) + "\n");
}

void write_complex_series(const fs::path& dir, const observables::ComplexTimeSeries& ts) {
  std::ostringstream os;
  os << "t_fs,re,im\n" << std::setprecision(17);
  for (std::size_t i = 0; i < ts.times_fs.size(); ++i) {
    os << ts.times_fs[i] << "," << ts.values[i].real() << "," << ts.values[i].imag() << "\n";
  }
  write_text_atomic(dir / (ts.name + ".csv"), os.str());
  write_text_atomic(dir / (ts.name + ".json"), sidecar_for(ts.meta, ts.name).dump(2) + "\n");
}

void write_spectrum(const fs::path& dir, const std::string& name,
                    const spectra::Spectrum& s, const json& sidecar) {
  std::ostringstream os;
  os << "energy_cm1,intensity\n" << std::setprecision(17);
  for (std::size_t i = 0; i < s.energies_cm1.size(); ++i) {
    os << s.energies_cm1[i] << "," << s.intensities[i] << "\n";
  }
  write_text_atomic(dir / (name + ".csv"), os.str());
  write_text_atomic(dir / (name + ".json"), sidecar.dump(2) + "\n");
}

observables::TimeSeries read_time_series(const fs::path& csv) {
  std::ifstream is(csv);
  if (!is) throw std::invalid_argument("cannot open series: " + csv.string());
  observables::TimeSeries ts;
  ts.name = csv.stem().string();
  std::string line;
  std::getline(is, line);  // header
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    ts.times_fs.push_back(std::stod(line.substr(0, comma)));
    ts.values.push_back(std::stod(line.substr(comma + 1)));
  }
  return ts;
}

void emit_plot_script(const fs::path& dir) {
  const std::string script = R"PY(#!/usr/bin/env python3
"""Plot every CSV in this directory (time series and spectra)."""
import glob, os
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import csv

for path in sorted(glob.glob(os.path.join(os.path.dirname(__file__) or ".", "*.csv"))):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    if len(rows) < 3:
        continue
    header, data = rows[0], rows[1:]
    xs = [float(r[0]) for r in data]
    fig, ax = plt.subplots(figsize=(6, 3.2))
    for col in range(1, len(header)):
        ax.plot(xs, [float(r[col]) for r in data], lw=0.9, label=header[col])
    ax.set_xlabel(header[0])
    if len(header) > 2:
        ax.legend()
    name = os.path.splitext(os.path.basename(path))[0]
    ax.set_title(name)
    fig.tight_layout()
    fig.savefig(os.path.join(os.path.dirname(path), name + ".png"), dpi=150)
    plt.close(fig)
print("plots written")
)PY";
  write_text_atomic(dir / "plot.py", script);
}

hilbert::WaveFunction initial_state(const hilbert::SpacePtr& space,
                                    const model::ModelParams& params) {
  std::vector<Eigen::VectorXcd> factors;
  factors.reserve(space->num_modes());
  // ground factor of one mode by dense diagonalization of its 1D Hamiltonian
  auto ground_factor = [](const dvr::DvrBasis& b, const Eigen::VectorXd& pot) {
    Eigen::MatrixXd h = b.kinetic;
    h.diagonal() += pot;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    Eigen::VectorXd g = es.eigenvectors().col(0);
    if (g.sum() < 0.0) g = -g;  // fix the overall sign for reproducibility
    return Eigen::VectorXcd(g.cast<hilbert::Complex>());
  };
  for (int m = 0; m < space->num_transfer_modes(); ++m) {
    const auto& b = space->mode(m);
    Eigen::VectorXd pot(b.size());
    for (int i = 0; i < b.size(); ++i) {
      pot[i] = model::transfer_potential(params, b.points[i]);
    }
    factors.push_back(ground_factor(b, pot));
  }
  const auto& cav = space->mode(space->num_modes() - 1);
  Eigen::VectorXd vc =
      0.5 * params.omega_c * params.omega_c * cav.points.array().square().matrix();
  factors.push_back(ground_factor(cav, vc));
  return hilbert::build_product_state(space, factors);
}

namespace {

struct PropagateArtifacts {
  std::vector<observables::TimeSeries> series;
  std::optional<observables::ComplexTimeSeries> autocorr;
  json derived;
  bool aborted = false;
  std::string error;
};

PropagateArtifacts run_trajectory(const RunConfig& cfg, bool want_autocorr) {
  const auto params = cfg.model_params();
  const auto space = cfg.build_space();
  const auto h = hamiltonian::assemble(space, params);
  auto psi0 = initial_state(space, params);

  auto pc = cfg.propagation();
  auto ropts = cfg.recorder_options();
  if (want_autocorr) ropts.autocorrelation = true;
  observables::TrajectoryRecorder rec(h, ropts, cfg.meta(*space));

  const fs::path dir = cfg.output_dir();
  fs::create_directories(dir);
  const double ckpt_every = cfg.number("output.checkpoint_every_fs");
  const int ckpt_stride =
      ckpt_every > 0.0
          ? std::max(1, static_cast<int>(std::llround(
                            ckpt_every / (pc.dt_fs * pc.sample_stride))))
          : 0;
  hilbert::CheckpointInfo info{0.0, params.eta, params.n_molecules};

  PropagateArtifacts art;
  auto hook = [&](int sample_index, double t_au, const hilbert::WaveFunction& psi) {
    rec(sample_index, t_au, psi);
    if (ckpt_stride > 0 && sample_index > 0 && sample_index % ckpt_stride == 0) {
      info.time_au = t_au;
      std::ostringstream name;
      name << "checkpoint_t" << std::llround(units::au_to_fs(t_au)) << "fs.bin";
      hilbert::save_checkpoint((dir / name.str()).string(), psi, info);
    }
  };

  try {
    const auto result = propagator::propagate(h, psi0, pc, hook);
    info.time_au = units::fs_to_au(pc.t_final_fs);
    hilbert::save_checkpoint((dir / "final_state.bin").string(), result.psi, info);
  } catch (const propagator::PropagationError& e) {
    art.aborted = true;
    art.error = e.what();
  }
  art.series = rec.series();
  art.autocorr = rec.autocorrelation();
  art.derived = derived_from_series(art.series);
  return art;
}

void write_artifacts(const RunConfig& cfg, const PropagateArtifacts& art) {
  const fs::path dir = cfg.output_dir();
  fs::create_directories(dir);
  for (const auto& s : art.series) write_time_series(dir, s);
  for (const auto& s : art.series) {
    if (s.name == "n_c") {
      if (auto norm = observables::normalized_photon_number(s)) {
        write_time_series(dir, *norm);
      } else {
        write_text_atomic(dir / "n_c_normalized.json",
                          json{{"name", "n_c_normalized"},
                               {"status", "undefined for eta = 0"}}
                              .dump(2) +
                              "\n");
      }
    }
  }
  if (art.autocorr) write_complex_series(dir, *art.autocorr);
  write_text_atomic(dir / "derived.json", art.derived.dump(2) + "\n");
  write_text_atomic(dir / "config_resolved.json", cfg.raw().dump(2) + "\n");
  emit_plot_script(dir);
  if (art.aborted) {
    write_text_atomic(dir / "error.json",
                      json{{"error", art.error}}.dump(2) + "\n");
  }
}

}  // namespace

int cmd_propagate(const RunConfig& cfg) {
  auto art = run_trajectory(cfg, cfg.boolean("output.autocorrelation"));
  write_artifacts(cfg, art);
  if (art.aborted) {
    std::cerr << "propagation aborted: " << art.error << "\n";
    return kNumericalError;
  }
  std::cout << "propagate: wrote " << cfg.output_dir().string() << "\n";
  return kOk;
}

int cmd_eigen(const RunConfig& cfg) {
  const auto params = cfg.model_params();
  const fs::path dir = cfg.output_dir();
  fs::create_directories(dir);
  json report;

  // stationary properties of the transfer model
  const auto enol = model::enol_minimum(params);
  const auto thiol = model::enethiol_minimum(params);
  const auto ts = model::transition_state(params);
  report["stationary"] = {
      {"q_enol_a0", enol.q},
      {"q_enethiol_a0", thiol.q},
      {"q_ts_a0", ts.q},
      {"barrier_OH_cm1", units::hartree_to_cm1(model::adiabatic_potential(params, 0.0) - enol.energy)},
      {"barrier_SH_cm1", units::hartree_to_cm1(model::adiabatic_potential(params, 0.0) - thiol.energy)},
      {"isomer_gap_cm1", units::hartree_to_cm1(thiol.energy - enol.energy)},
      {"d_enol_ea0", model::dipole_1d(params, enol.q)},
      {"d_enethiol_ea0", model::dipole_1d(params, thiol.q)},
      {"kappa_s_0", model::reaction_path_curvature(params, 0.0)},
  };

  const std::string mode = cfg.text("eigen.mode");
  const int n_states = static_cast<int>(cfg.integer("eigen.n_states"));
  const int nq = static_cast<int>(cfg.integer("eigen.nq"));
  const double qlo = cfg.number("grid.q_min"), qhi = cfg.number("grid.q_max");

  // 1D transfer Hamiltonian
  {
    auto q_dvr = dvr::build_sinc_dvr(nq, qlo, qhi, params.mu_S);
    Eigen::VectorXd diag(nq);
    Eigen::VectorXd dip(nq);
    for (int i = 0; i < nq; ++i) {
      diag[i] = model::transfer_potential(params, q_dvr.points[i]);
      dip[i] = model::dipole_1d(params, q_dvr.points[i]);
    }
    auto space = std::make_shared<ProductSpaceT>(
        std::vector<dvr::DvrBasis>{q_dvr}, false, cfg.integer("memory.max_amplitudes"));
    hamiltonian::HamiltonianOnGrid h1(space, diag);
    const auto pairs = propagator::lowest_eigenstates(h1, n_states);
    json evs = json::array();
    for (const auto& [e, v] : pairs) evs.push_back(units::hartree_to_cm1(e));
    report["one_dimensional"] = {
        {"energies_cm1", evs},
        {"gap_10_cm1", units::hartree_to_cm1(pairs[1].first - pairs[0].first)},
    };
    // fundamental transition dipole on the grid
    double d10 = 0.0;
    for (int i = 0; i < nq; ++i) {
      d10 += (pairs[0].second.data()[i] * std::conj(pairs[1].second.data()[i])).real() * dip[i];
    }
    report["one_dimensional"]["d_10_ea0"] = std::abs(d10);
    if (cfg.boolean("eigen.dump_densities")) {
      std::ostringstream os;
      os << "q_a0,psi0_sq,psi1_sq\n" << std::setprecision(17);
      for (int i = 0; i < nq; ++i) {
        os << q_dvr.points[i] << "," << std::norm(pairs[0].second.data()[i]) << ","
           << std::norm(pairs[1].second.data()[i]) << "\n";
      }
      write_text_atomic(dir / "densities_1d.csv", os.str());
    }
  }

  if (mode == "2d") {
    const int nQ = static_cast<int>(cfg.integer("eigen.nQ"));
    auto q_dvr = dvr::build_sinc_dvr(nq, qlo, qhi, params.mu_S);
    auto big_dvr = dvr::build_sinc_dvr(nQ, cfg.number("eigen.Q_min"),
                                       cfg.number("eigen.Q_max"), params.mu_B);
    auto space = std::make_shared<ProductSpaceT>(
        std::vector<dvr::DvrBasis>{q_dvr, big_dvr}, false,
        cfg.integer("memory.max_amplitudes"));
    Eigen::VectorXd diag(space->total_dim());
    const double floor = model::enol_minimum(params).energy;
    std::int64_t k = 0;
    for (int i = 0; i < nq; ++i) {
      for (int j = 0; j < nQ; ++j, ++k) {
        diag[k] = model::pes_2d(params, q_dvr.points[i], big_dvr.points[j]) - floor;
      }
    }
    hamiltonian::HamiltonianOnGrid h2(space, diag);
    const auto pairs = propagator::lowest_eigenstates(h2, std::max(2, n_states));
    json evs = json::array();
    for (const auto& [e, v] : pairs) evs.push_back(units::hartree_to_cm1(e));
    report["two_dimensional"] = {
        {"energies_cm1", evs},
        {"gap_10_cm1", units::hartree_to_cm1(pairs[1].first - pairs[0].first)},
    };
  } else if (mode == "coupled") {
    const auto space = cfg.build_space();
    const auto h = hamiltonian::assemble(space, params);
    const auto pairs = propagator::lowest_eigenstates(h, n_states);
    json evs = json::array();
    for (const auto& [e, v] : pairs) evs.push_back(units::hartree_to_cm1(e));
    report["coupled"] = {{"energies_cm1", evs}};
  } else if (mode != "1d") {
    throw std::invalid_argument("eigen.mode must be 1d, 2d or coupled");
  }

  report["config_hash"] = cfg.hash();
  write_text_atomic(dir / "eigen_report.json", report.dump(2) + "\n");
  std::cout << "eigen: wrote " << (dir / "eigen_report.json").string() << "\n";
  return kOk;
}

int cmd_spectrum(const RunConfig& cfg) {
  RunConfig local = cfg;
  local.set("propagation.t_final_fs", format_number(cfg.number("spectrum.t_final_fs")));
  auto art = run_trajectory(local, /*want_autocorr=*/true);
  write_artifacts(local, art);
  if (art.aborted) {
    std::cerr << "spectrum propagation aborted: " << art.error << "\n";
    return kNumericalError;
  }
  if (!art.autocorr) throw std::runtime_error("autocorrelation was not recorded");

  spectra::DosOptions dopts;
  dopts.e_min_cm1 = cfg.number("spectrum.e_min_cm1");
  dopts.e_max_cm1 = cfg.number("spectrum.e_max_cm1");
  dopts.de_cm1 = cfg.number("spectrum.de_cm1");
  dopts.window = cfg.text("spectrum.window") == "none" ? spectra::Window::none
                                                       : spectra::Window::cosine;
  const auto dos = spectra::density_of_states(*art.autocorr, dopts);
  const auto peaks = spectra::find_peaks(dos);

  const fs::path dir = local.output_dir();
  json sidecar = {{"config_hash", local.hash()},
                  {"t_final_fs", dos.t_final_fs},
                  {"window", cfg.text("spectrum.window")}};
  write_spectrum(dir, "dos", dos, sidecar);

  json jpeaks = json::array();
  for (const auto& p : peaks) {
    jpeaks.push_back({{"energy_cm1", p.energy_cm1}, {"intensity", p.intensity}});
  }
  json peak_report = {{"peaks", jpeaks}, {"config_hash", local.hash()}};
  if (!peaks.empty()) {
    peak_report["first_peak_cm1"] = peaks.front().energy_cm1;
    const auto it = std::max_element(
        peaks.begin(), peaks.end(),
        [](const auto& a, const auto& b) { return a.intensity < b.intensity; });
    peak_report["max_peak_cm1"] = it->energy_cm1;
  }

  // Poisson reference around the initial photon number
  const double nc0 = art.derived.contains("n_c_t0") ? art.derived["n_c_t0"].get<double>() : 0.0;
  const int n_max = static_cast<int>(nc0 + 10.0 * std::sqrt(std::max(nc0, 0.0)) + 20.0);
  const auto pn = spectra::poisson_reference(std::max(nc0, 0.0), n_max);
  {
    std::ostringstream os;
    os << "n,probability\n" << std::setprecision(17);
    for (int n = 0; n <= n_max; ++n) os << n << "," << pn[n] << "\n";
    write_text_atomic(dir / "poisson_reference.csv", os.str());
    int mode_n = 0;
    for (int n = 0; n <= n_max; ++n) {
      if (pn[n] > pn[mode_n]) mode_n = n;
    }
    peak_report["poisson_mean"] = nc0;
    peak_report["poisson_mode"] = mode_n;
  }

  if (cfg.boolean("spectrum.relax_check")) {
    const auto params = local.model_params();
    const auto space = local.build_space();
    const auto h = hamiltonian::assemble(space, params);
    const auto guess = initial_state(space, params);
    const auto [e0, psi] = propagator::relax_ground_state(h, guess);
    peak_report["relaxed_ground_cm1"] = units::hartree_to_cm1(e0);
  }

  write_text_atomic(dir / "peaks.json", peak_report.dump(2) + "\n");
  std::cout << "spectrum: wrote " << dir.string() << "\n";
  return kOk;
}

int cmd_sweep(const RunConfig& cfg) {
  const std::string axis = cfg.text("sweep.axis");
  if (axis != "eta" && axis != "N") {
    throw std::invalid_argument("sweep.axis must be eta or N");
  }
  const auto values = cfg.numbers("sweep.values");
  if (values.empty()) throw std::invalid_argument("sweep.values is empty");

  // every point must clear the memory guard before any trajectory starts
  for (double v : values) {
    RunConfig point = cfg;
    point.set(axis == "eta" ? "model.eta" : "model.n_molecules", format_number(v));
    (void)point.build_space();
  }

  const fs::path dir = cfg.output_dir();
  fs::create_directories(dir);
  const int workers = std::max(1, static_cast<int>(cfg.integer("sweep.workers")));

  struct Row {
    double value;
    json derived;
    bool ok;
    std::string error;
  };
  std::vector<Row> rows(values.size());

  auto run_point = [&](std::size_t idx) {
#ifdef _OPENMP
    omp_set_num_threads(std::max(1, omp_get_num_procs() / workers));
#endif
    RunConfig point = cfg;
    std::ostringstream sub;
    sub << axis << "_" << values[idx];
    point.set(axis == "eta" ? "model.eta" : "model.n_molecules",
              format_number(values[idx]));
    point.set("output.dir", (dir / sub.str()).string());
    Row row{values[idx], {}, true, {}};
    try {
      auto art = run_trajectory(point, false);
      write_artifacts(point, art);
      row.derived = art.derived;
      row.ok = !art.aborted;
      row.error = art.error;
    } catch (const std::exception& e) {
      row.ok = false;
      row.error = e.what();
    }
    rows[idx] = std::move(row);
  };

  for (std::size_t base = 0; base < values.size(); base += workers) {
    std::vector<std::future<void>> futs;
    for (std::size_t i = base; i < std::min(values.size(), base + workers); ++i) {
      futs.push_back(std::async(std::launch::async, run_point, i));
    }
    for (auto& f : futs) f.get();
  }

  std::ostringstream os;
  os << axis << ",H0_cm1,nc0,tau_r_fs,k_SH_per_s,status\n" << std::setprecision(12);
  for (const auto& r : rows) {
    os << r.value << ",";
    auto field = [&](const char* key) -> std::string {
      if (r.derived.contains(key) && !r.derived[key].is_null()) {
        return format_number(r.derived[key].get<double>());
      }
      return "";
    };
    os << field("H_t0_cm1") << "," << field("n_c_t0") << "," << field("tau_r_fs")
       << "," << field("k_SH_per_s") << "," << (r.ok ? "ok" : ("failed: " + r.error))
       << "\n";
  }
  write_text_atomic(dir / "sweep.csv", os.str());
  write_text_atomic(dir / "config_resolved.json", cfg.raw().dump(2) + "\n");
  std::cout << "sweep: wrote " << (dir / "sweep.csv").string() << "\n";
  for (const auto& r : rows) {
    if (!r.ok) return kNumericalError;
  }
  return kOk;
}

int cmd_analyze(const RunConfig& cfg, const fs::path& run_dir) {
  std::vector<observables::TimeSeries> series;
  for (const char* name : {"P_SH", "x_c_expect", "n_c", "H_total"}) {
    const fs::path p = run_dir / (std::string(name) + ".csv");
    if (fs::exists(p)) series.push_back(read_time_series(p));
  }
  if (series.empty()) {
    throw std::invalid_argument("no series found under " + run_dir.string());
  }
  const json derived = derived_from_series(series);
  write_text_atomic(run_dir / "derived.json", derived.dump(2) + "\n");
  std::cout << derived.dump(2) << "\n";
  (void)cfg;
  return kOk;
}

}  // namespace cavidyn::io
