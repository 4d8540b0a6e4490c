#pragma once

#include <span>
#include <string>

#include "cavidyn/units.hpp"

namespace cavidyn::model {

/// All TAA + cavity constants in atomic units (masses in m_e, lengths in a0,
/// energies in E_h, cavity coordinate mass-weighted).
struct ModelParams {
  // diabatic transfer potentials
  double omega_OH = 0.01487;   // E_h/hbar
  double omega_SH = 0.01247;   // E_h/hbar
  double mu_OH = 1728.46;      // m_e
  double mu_SH = 1781.32;      // m_e
  double delta_OH = 0.0;       // E_h
  double delta_SH = 0.003583;  // E_h
  double q_OH0 = -0.7181;      // a0
  double q_SH0 = 1.2094;       // a0
  // nonadiabatic coupling
  double k_c = 0.15582;  // E_h
  double q_c = 0.2872;   // a0
  // reduced masses of the 1D/2D reaction Hamiltonian
  double mu_S = 1914.028;  // m_e
  double mu_B = 8622.241;  // m_e
  // heavy-mode frequency and coupling function of the 2D surface
  double omega_B = 0.0009728;  // E_h/hbar
  double a_S = 0.794;          // 1/a0
  double b_S = -0.2688;        // 1/a0^2
  // dipole function
  double d_0 = 1.68;    // e a0
  double d_S = -0.129;  // e a0 / a0
  double d_B = 0.023;   // e a0 / a0   (2D dipole, kept for completeness)
  double d_SB = 0.451;  // e a0 / a0^2 (2D dipole, kept for completeness)
  double q_0 = -0.59;   // a0
  // cavity
  double omega_c = 126.5 * units::constants::hartree_per_cm1;  // E_h/hbar
  double eta = 0.0;     // dimensionless coupling, VSC regime is 0 < eta < 0.1
  double d_10 = 0.042;  // e a0, fundamental transition dipole
  int n_molecules = 1;
  bool dse_cross_terms = true;

  /// single-molecule coupling g = hbar*omega_c*eta/d_10 (field-strength units)
  double g() const { return omega_c * eta / d_10; }
  /// Dicke-type collective coupling g_N = g / sqrt(N)
  double g_collective() const;

  void validate() const;
  std::string to_json() const;
  static ModelParams from_json(const std::string& text);
};

enum class Diabat { OH, SH };

/// V_i(q) = mu_i omega_i^2 / 2 (q - q_i0)^2 + Delta_i
double diabatic_potential(const ModelParams& p, Diabat which, double q);

/// K(q) = k_c exp(-(q - q_c)^2), width taken as 1 a0 as printed
double nonadiabatic_coupling(const ModelParams& p, double q);

/// lower adiabatic surface of the 2x2 diabatic model
double adiabatic_potential(const ModelParams& p, double q);

/// adiabatic potential shifted so the enol (global) minimum sits at zero;
/// this is the transfer potential entering the Hamiltonian and all reported
/// energies are measured from this classical floor
double transfer_potential(const ModelParams& p, double q);

/// d(q) = d_0 + d_S (q - q_0)
double dipole_1d(const ModelParams& p, double q);

/// heavy-mode coupling function lambda_S(q) = a_S q^2 + b_S q^3
double lambda_s(const ModelParams& p, double q);

/// V(q, Q) = V(q) + mu_B omega_B^2 / 2 (Q - lambda_S(q))^2
double pes_2d(const ModelParams& p, double q, double Q);

/// minimum-energy-path curvature kappa_s(q) in 1/(sqrt(m_e) a0)
double reaction_path_curvature(const ModelParams& p, double q);

/// (N+1)-dimensional cavity potential energy surface,
/// sum_i V(q_i) + omega_c^2/2 (x_c + sqrt(2/(hbar omega_c^3)) g_N d(q))^2;
/// expands exactly into cavity + interaction + full-DSE terms
double cpes(const ModelParams& p, std::span<const double> q_vec, double x_c);

struct StationaryPoint {
  double q;       // a0
  double energy;  // E_h, raw adiabatic value
};

/// golden-section search on the adiabatic potential, |bracket| to 1e-6 a0
StationaryPoint enol_minimum(const ModelParams& p);
StationaryPoint enethiol_minimum(const ModelParams& p);
/// barrier top between the wells (close to q = 0)
StationaryPoint transition_state(const ModelParams& p);

}  // namespace cavidyn::model
