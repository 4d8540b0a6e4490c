#include "cavidyn/units.hpp"

#include <stdexcept>

namespace cavidyn::units {

namespace {

enum class Dimension { energy, time, length, mass_weighted_length, dipole };

Dimension dimension_of(Unit u) {
  switch (u) {
    case Unit::hartree:
    case Unit::wavenumber:
      return Dimension::energy;
    case Unit::femtosecond:
    case Unit::atomic_time:
      return Dimension::time;
    case Unit::bohr:
      return Dimension::length;
    case Unit::mass_weighted_bohr:
      return Dimension::mass_weighted_length;
    case Unit::elementary_charge_bohr:
      return Dimension::dipole;
  }
  throw std::logic_error("unreachable unit");
}

// factor taking one unit of u into the atomic base unit of its dimension
double to_atomic(Unit u) {
  switch (u) {
    case Unit::hartree:
      return 1.0;
    case Unit::wavenumber:
      return constants::hartree_per_cm1;
    case Unit::atomic_time:
      return 1.0;
    case Unit::femtosecond:
      return constants::atomic_time_per_fs;
    case Unit::bohr:
    case Unit::mass_weighted_bohr:
    case Unit::elementary_charge_bohr:
      return 1.0;
  }
  throw std::logic_error("unreachable unit");
}

}  // namespace

Quantity convert(const Quantity& q, Unit target) {
  if (dimension_of(q.unit) != dimension_of(target)) {
    throw std::invalid_argument("unit conversion across dimensions: " +
                                unit_name(q.unit) + " -> " + unit_name(target));
  }
  if (q.unit == target) return q;
  return Quantity{q.value * to_atomic(q.unit) / to_atomic(target), target};
}

std::string unit_name(Unit u) {
  switch (u) {
    case Unit::hartree: return "hartree";
    case Unit::wavenumber: return "wavenumber";
    case Unit::femtosecond: return "femtosecond";
    case Unit::atomic_time: return "atomic_time";
    case Unit::bohr: return "bohr";
    case Unit::mass_weighted_bohr: return "mass_weighted_bohr";
    case Unit::elementary_charge_bohr: return "elementary_charge_bohr";
  }
  throw std::logic_error("unreachable unit");
}

Unit unit_from_name(const std::string& name) {
  if (name == "hartree") return Unit::hartree;
  if (name == "wavenumber" || name == "cm-1" || name == "cm^-1") return Unit::wavenumber;
  if (name == "femtosecond" || name == "fs") return Unit::femtosecond;
  if (name == "atomic_time" || name == "au") return Unit::atomic_time;
  if (name == "bohr") return Unit::bohr;
  if (name == "mass_weighted_bohr") return Unit::mass_weighted_bohr;
  if (name == "elementary_charge_bohr") return Unit::elementary_charge_bohr;
  throw std::invalid_argument("unknown unit name: " + name);
}

}  // namespace cavidyn::units
