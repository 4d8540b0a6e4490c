#include "doctest.h"

#include <stdexcept>

#include "cavidyn/units.hpp"

using namespace cavidyn::units;

TEST_CASE("identity conversion") {
  const Quantity q{1.0, Unit::hartree};
  const auto r = convert(q, Unit::hartree);
  CHECK(r.value == 1.0);
  CHECK(r.unit == Unit::hartree);
}

TEST_CASE("energy round trip is exact to 1e-12") {
  for (double x : {1.0, 0.0009728, 3.5e-4, 12.7, 1e-9}) {
    const auto cm = convert({x, Unit::hartree}, Unit::wavenumber);
    const auto back = convert(cm, Unit::hartree);
    CHECK(back.value == doctest::Approx(x).epsilon(1e-12));
  }
  for (double t : {0.25, 1.0, 1000.0}) {
    const auto au = convert({t, Unit::femtosecond}, Unit::atomic_time);
    const auto back = convert(au, Unit::femtosecond);
    CHECK(back.value == doctest::Approx(t).epsilon(1e-12));
  }
}

TEST_CASE("hartree to wavenumber factor against the CODATA table") {
  // E_h/(h c) = 2.1947463136320e5 cm^-1, so 0.0009728 E_h is 213.505 cm^-1
  const auto r = convert({0.0009728, Unit::hartree}, Unit::wavenumber);
  CHECK(r.value == doctest::Approx(213.505).epsilon(5e-5));
  // the diabat frequencies quoted in wavenumbers
  CHECK(convert({0.01487, Unit::hartree}, Unit::wavenumber).value ==
        doctest::Approx(3263.6).epsilon(1e-4));
  CHECK(convert({0.01247, Unit::hartree}, Unit::wavenumber).value ==
        doctest::Approx(2736.8).epsilon(1e-4));
}

TEST_CASE("atomic time factor") {
  // 1 fs = 41.34137 atomic time units (CODATA atomic unit of time)
  const auto r = convert({1.0, Unit::femtosecond}, Unit::atomic_time);
  CHECK(r.value == doctest::Approx(41.3413733).epsilon(1e-8));
}

TEST_CASE("conversions are linear") {
  for (double a : {2.0, -0.5, 1e6}) {
    const double x = 0.731;
    const auto lhs = convert({a * x, Unit::hartree}, Unit::wavenumber).value;
    const auto rhs = a * convert({x, Unit::hartree}, Unit::wavenumber).value;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-14));
  }
}

TEST_CASE("dimension mismatch is rejected") {
  CHECK_THROWS_AS(convert({1.0, Unit::hartree}, Unit::femtosecond), std::invalid_argument);
  CHECK_THROWS_AS(convert({1.0, Unit::bohr}, Unit::mass_weighted_bohr), std::invalid_argument);
  CHECK_THROWS_AS(convert({1.0, Unit::elementary_charge_bohr}, Unit::bohr),
                  std::invalid_argument);
}

TEST_CASE("unit names round trip") {
  for (Unit u : {Unit::hartree, Unit::wavenumber, Unit::femtosecond, Unit::atomic_time,
                 Unit::bohr, Unit::mass_weighted_bohr, Unit::elementary_charge_bohr}) {
    CHECK(unit_from_name(unit_name(u)) == u);
  }
  CHECK_THROWS_AS(unit_from_name("parsec"), std::invalid_argument);
}
