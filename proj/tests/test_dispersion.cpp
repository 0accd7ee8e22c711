#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "ktp/dispersion.hpp"
#include "ktp/errors.hpp"

using namespace ktp;

// reference indices evaluated separately (numpy, same coefficient table)
TEST_CASE("refractive index matches reference values") {
  const auto m = DispersionModel::kato_takaoka_2002();
  CHECK(m.refractive_index(0.71, Axis::Y) == doctest::Approx(1.7631219370666757).epsilon(1e-13));
  CHECK(m.refractive_index(0.71, Axis::Z) == doctest::Approx(1.8536400896889507).epsilon(1e-13));
  CHECK(m.refractive_index(1.31, Axis::Y) == doctest::Approx(1.7394875022537726).epsilon(1e-13));
  CHECK(m.refractive_index(1.31, Axis::Z) == doctest::Approx(1.821712706440998).epsilon(1e-13));
  CHECK(m.refractive_index(1.55, Axis::Y) == doctest::Approx(1.7349061194074447).epsilon(1e-13));
  CHECK(m.refractive_index(1.55, Axis::Z) == doctest::Approx(1.8157731108173114).epsilon(1e-13));
}

TEST_CASE("nz > ny and normal dispersion across the window") {
  const auto m = DispersionModel::kato_takaoka_2002();
  for (double l = 0.4; l < 3.9; l += 0.1) {
    CHECK(m.refractive_index(l, Axis::Z) > m.refractive_index(l, Axis::Y));
    CHECK(m.refractive_index(l + 0.05, Axis::Y) < m.refractive_index(l, Axis::Y));
  }
}

TEST_CASE("inverse group velocity agrees with a finite difference of k") {
  const auto m = DispersionModel::kato_takaoka_2002();
  for (Axis ax : {Axis::Y, Axis::Z}) {
    for (double l : {0.6, 0.71, 1.31, 1.55, 2.5}) {
      const double w = omega_from_um(l);
      const double h = w * 1e-5;
      const double fd = (m.wavenumber(w + h, ax) - m.wavenumber(w - h, ax)) / (2 * h);
      CHECK(m.inverse_group_velocity(w, ax) == doctest::Approx(fd).epsilon(1e-8));
      // group index above phase index in the normal-dispersion region
      CHECK(m.inverse_group_velocity(w, ax) * kSpeedOfLight > m.refractive_index(l, ax));
    }
  }
}

TEST_CASE("window is enforced, not extrapolated") {
  const auto m = DispersionModel::kato_takaoka_2002();
  CHECK_THROWS_AS(m.refractive_index(0.3, Axis::Y), OutOfTransparencyWindow);
  CHECK_THROWS_AS(m.refractive_index(4.2, Axis::Z), OutOfTransparencyWindow);
  CHECK_THROWS_AS(m.wavenumber(omega_from_um(5.0), Axis::Y), OutOfTransparencyWindow);
  CHECK_NOTHROW(m.refractive_index(0.35, Axis::Y));
  CHECK_NOTHROW(m.refractive_index(4.0, Axis::Z));
  CHECK(m.in_window(1.0));
  CHECK_FALSE(m.in_window(0.2));
}

TEST_CASE("omega and wavelength convert both ways") {
  CHECK(omega_from_um(1.0) == doctest::Approx(2 * kPi * kSpeedOfLight / 1e-6));
  CHECK(um_from_omega(omega_from_um(1.31)) == doctest::Approx(1.31).epsilon(1e-15));
}

TEST_CASE("axis helpers") {
  CHECK(other_axis(Axis::Y) == Axis::Z);
  CHECK(parse_axis("z") == Axis::Z);
  CHECK(parse_axis("Y") == Axis::Y);
  CHECK(to_string(Axis::Z) == "Z");
  CHECK_THROWS_AS(parse_axis("X"), InvalidConfig);
}

TEST_CASE("coefficient text round-trips and matches the shipped file") {
  const auto m = DispersionModel::kato_takaoka_2002();
  const auto back = DispersionModel::parse(m.serialize());
  CHECK(back.name() == m.name());
  CHECK(back.serialize() == m.serialize());
  const std::filesystem::path file =
      std::filesystem::path(KTP_DATA_DIR) / "kato-takaoka-2002.sellmeier";
  const auto loaded = DispersionModel::load(file);
  for (double l : {0.5, 1.0, 2.0, 3.5})
    for (Axis ax : {Axis::Y, Axis::Z})
      CHECK(loaded.refractive_index(l, ax) == doctest::Approx(m.refractive_index(l, ax)).epsilon(1e-15));
  CHECK(DispersionModel::resolve(file.string()).name() == m.name());
}

TEST_CASE("bad coefficient text is rejected") {
  CHECK_THROWS_AS(DispersionModel::parse("name = x\n"), InvalidConfig);
  CHECK_THROWS_AS(DispersionModel::resolve("no-such-set"), InvalidConfig);
  // n^2 < 1 somewhere in the window
  CHECK_THROWS(DispersionModel::parse("name = bad\nwindow_um = 0.4 2\n"
                                      "y.constant = 0.5\nz.constant = 0.5\n"));
}

TEST_CASE("custom pole form") {
  SellmeierAxis a{2.0, {{0.5, 0.04}}, 0.01};
  const double l = 1.2;
  CHECK(a.index_squared(l) == doctest::Approx(2.0 + 0.5 / (l * l - 0.04) - 0.01 * l * l));
  const double h = 1e-6;
  CHECK(a.index_squared_slope(l) ==
        doctest::Approx((a.index_squared(l + h) - a.index_squared(l - h)) / (2 * h)).epsilon(1e-7));
}
