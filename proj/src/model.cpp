#include "cavidyn/model.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>

#include "json.hpp"

namespace cavidyn::model {

double ModelParams::g_collective() const {
  return g() / std::sqrt(static_cast<double>(n_molecules));
}

void ModelParams::validate() const {
  if (n_molecules < 1) throw std::invalid_argument("n_molecules must be >= 1");
  if (eta < 0.0) throw std::invalid_argument("eta must be >= 0");
  if (omega_c <= 0.0) throw std::invalid_argument("omega_c must be > 0");
  if (d_10 <= 0.0) throw std::invalid_argument("d_10 must be > 0");
}

double diabatic_potential(const ModelParams& p, Diabat which, double q) {
  if (which == Diabat::OH) {
    const double dq = q - p.q_OH0;
    return 0.5 * p.mu_OH * p.omega_OH * p.omega_OH * dq * dq + p.delta_OH;
  }
  const double dq = q - p.q_SH0;
  return 0.5 * p.mu_SH * p.omega_SH * p.omega_SH * dq * dq + p.delta_SH;
}

double nonadiabatic_coupling(const ModelParams& p, double q) {
  const double dq = q - p.q_c;
  return p.k_c * std::exp(-dq * dq);
}

double adiabatic_potential(const ModelParams& p, double q) {
  const double v1 = diabatic_potential(p, Diabat::OH, q);
  const double v2 = diabatic_potential(p, Diabat::SH, q);
  const double k = nonadiabatic_coupling(p, q);
  return 0.5 * (v1 + v2 - std::sqrt((v1 - v2) * (v1 - v2) + 4.0 * k * k));
}

double transfer_potential(const ModelParams& p, double q) {
  // the enol minimum is fixed by the parameters; cache per parameter set
  thread_local ModelParams cached{};
  thread_local double v_floor = 0.0;
  thread_local bool have = false;
  auto same = [](const ModelParams& a, const ModelParams& b) {
    return a.omega_OH == b.omega_OH && a.omega_SH == b.omega_SH &&
           a.mu_OH == b.mu_OH && a.mu_SH == b.mu_SH && a.delta_OH == b.delta_OH &&
           a.delta_SH == b.delta_SH && a.q_OH0 == b.q_OH0 && a.q_SH0 == b.q_SH0 &&
           a.k_c == b.k_c && a.q_c == b.q_c;
  };
  if (!have || !same(cached, p)) {
    v_floor = enol_minimum(p).energy;
    cached = p;
    have = true;
  }
  return adiabatic_potential(p, q) - v_floor;
}

double dipole_1d(const ModelParams& p, double q) {
  return p.d_0 + p.d_S * (q - p.q_0);
}

double lambda_s(const ModelParams& p, double q) {
  return p.a_S * q * q + p.b_S * q * q * q;
}

double pes_2d(const ModelParams& p, double q, double Q) {
  const double dQ = Q - lambda_s(p, q);
  return adiabatic_potential(p, q) + 0.5 * p.mu_B * p.omega_B * p.omega_B * dQ * dQ;
}

double reaction_path_curvature(const ModelParams& p, double q) {
  const double num = 2.0 * std::sqrt(p.mu_S * p.mu_B) * std::abs(p.a_S + 3.0 * p.b_S * q);
  const double t = 2.0 * p.a_S + 3.0 * p.b_S * q;
  const double den = std::pow(p.mu_B * q * q * t * t + p.mu_S, 1.5);
  return num / den;
}

double cpes(const ModelParams& p, std::span<const double> q_vec, double x_c) {
  if (static_cast<int>(q_vec.size()) != p.n_molecules) {
    throw std::invalid_argument("cpes: coordinate count does not match n_molecules");
  }
  double v = 0.0, d_sum = 0.0;
  for (double q : q_vec) {
    v += adiabatic_potential(p, q);
    d_sum += dipole_1d(p, q);
  }
  // omega_c^2 (shift) = sqrt(2 omega_c / hbar) g_N, so the expansion of the
  // square reproduces the interaction and dipole self-energy terms exactly
  const double shift = std::sqrt(2.0 / (p.omega_c * p.omega_c * p.omega_c)) *
                       p.g_collective() * d_sum;
  const double u = x_c + shift;
  return v + 0.5 * p.omega_c * p.omega_c * u * u;
}

namespace {

// golden-section minimization, bracket shrunk below xtol
StationaryPoint golden_min(const std::function<double(double)>& f, double a,
                           double b, double xtol) {
  constexpr double invphi = 0.6180339887498949;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > xtol) {
    if (f1 < f2) {
      b = x2; x2 = x1; f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
    } else {
      a = x1; x1 = x2; f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, f(x)};
}

}  // namespace

StationaryPoint enol_minimum(const ModelParams& p) {
  return golden_min([&](double q) { return adiabatic_potential(p, q); }, -1.5, 0.0, 1e-6);
}

StationaryPoint enethiol_minimum(const ModelParams& p) {
  return golden_min([&](double q) { return adiabatic_potential(p, q); }, 0.0, 2.1, 1e-6);
}

StationaryPoint transition_state(const ModelParams& p) {
  auto r = golden_min([&](double q) { return -adiabatic_potential(p, q); }, -0.4, 0.4, 1e-6);
  return {r.q, -r.energy};
}

std::string ModelParams::to_json() const {
  nlohmann::json j;
  j["omega_OH"] = omega_OH; j["omega_SH"] = omega_SH;
  j["mu_OH"] = mu_OH; j["mu_SH"] = mu_SH;
  j["delta_OH"] = delta_OH; j["delta_SH"] = delta_SH;
  j["q_OH0"] = q_OH0; j["q_SH0"] = q_SH0;
  j["k_c"] = k_c; j["q_c"] = q_c;
  j["mu_S"] = mu_S; j["mu_B"] = mu_B;
  j["omega_B"] = omega_B; j["a_S"] = a_S; j["b_S"] = b_S;
  j["d_0"] = d_0; j["d_S"] = d_S; j["d_B"] = d_B; j["d_SB"] = d_SB; j["q_0"] = q_0;
  j["omega_c"] = omega_c; j["eta"] = eta; j["d_10"] = d_10;
  j["n_molecules"] = n_molecules; j["dse_cross_terms"] = dse_cross_terms;
  return j.dump(2);
}

ModelParams ModelParams::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  ModelParams p;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("omega_OH", p.omega_OH); get("omega_SH", p.omega_SH);
  get("mu_OH", p.mu_OH); get("mu_SH", p.mu_SH);
  get("delta_OH", p.delta_OH); get("delta_SH", p.delta_SH);
  get("q_OH0", p.q_OH0); get("q_SH0", p.q_SH0);
  get("k_c", p.k_c); get("q_c", p.q_c);
  get("mu_S", p.mu_S); get("mu_B", p.mu_B);
  get("omega_B", p.omega_B); get("a_S", p.a_S); get("b_S", p.b_S);
  get("d_0", p.d_0); get("d_S", p.d_S); get("d_B", p.d_B); get("d_SB", p.d_SB);
  get("q_0", p.q_0);
  get("omega_c", p.omega_c); get("eta", p.eta); get("d_10", p.d_10);
  get("n_molecules", p.n_molecules); get("dse_cross_terms", p.dse_cross_terms);
  p.validate();
  return p;
}

}  // namespace cavidyn::model
