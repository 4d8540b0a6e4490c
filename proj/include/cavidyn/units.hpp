#pragma once

#include <string>

namespace cavidyn::units {

/// Units understood by the engine. Everything internal is atomic units
/// (hartree, bohr, m_e, atomic time); conversions happen at I/O boundaries.
enum class Unit {
  hartree,
  wavenumber,   // cm^-1
  femtosecond,
  atomic_time,
  bohr,
  mass_weighted_bohr,      // sqrt(m_e) * a0, cavity displacement coordinate
  elementary_charge_bohr,  // e * a0, dipole moments
};

struct Quantity {
  double value;
  Unit unit;
};

// CODATA 2018 recommended values (https://physics.nist.gov/cuu/Constants/)
namespace constants {
// hartree-inverse meter relationship: 2.194746313632e7 m^-1
inline constexpr double hartree_per_cm1 = 1.0 / 219474.6313632;
inline constexpr double cm1_per_hartree = 219474.6313632;
// atomic unit of time: 2.4188843265857e-17 s
inline constexpr double second_per_atomic_time = 2.4188843265857e-17;
inline constexpr double atomic_time_per_fs = 1.0e-15 / second_per_atomic_time;
inline constexpr double fs_per_atomic_time = second_per_atomic_time / 1.0e-15;
}  // namespace constants

/// Convert between compatible units. Cross-dimension requests
/// (energy -> time and the like) throw std::invalid_argument.
Quantity convert(const Quantity& q, Unit target);

inline double cm1_to_hartree(double e) { return e * constants::hartree_per_cm1; }
inline double hartree_to_cm1(double e) { return e * constants::cm1_per_hartree; }
inline double fs_to_au(double t) { return t * constants::atomic_time_per_fs; }
inline double au_to_fs(double t) { return t * constants::fs_per_atomic_time; }

std::string unit_name(Unit u);
Unit unit_from_name(const std::string& name);

}  // namespace cavidyn::units
