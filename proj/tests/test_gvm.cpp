#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ktp/errors.hpp"
#include "ktp/gvm.hpp"

using namespace ktp;

namespace {
const DispersionModel& kato() {
  static const auto m = DispersionModel::kato_takaoka_2002();
  return m;
}

// plain-formula oracles, independent of the library's derivative code
double k_fd(double lambda_um, Axis ax) {
  const double w = omega_from_um(lambda_um), h = w * 1e-5;
  auto k = [&](double om) { return om * kato().refractive_index(um_from_omega(om), ax) / kSpeedOfLight; };
  return (k(w + h) - k(w - h)) / (2 * h);
}
}  // namespace

TEST_CASE("idler from energy conservation") {
  CHECK(idler_wavelength(0.71, 1.31) == doctest::Approx(1.5501666666666662).epsilon(1e-14));
  CHECK(idler_wavelength(0.655, 1.31) == doctest::Approx(1.31));
  CHECK_THROWS_AS(idler_wavelength(0.8, 0.8), NonPositiveIdler);
  CHECK_THROWS_AS(idler_wavelength(0.8, 0.7), NonPositiveIdler);
}

TEST_CASE("config validation") {
  const auto cfg = PhaseMatchConfig::make(0.71, 1.31, Axis::Z, 5e-3, kato());
  CHECK(cfg.idler_axis == Axis::Y);
  CHECK(cfg.pump_axis == Axis::Y);
  CHECK(cfg.idler_um == doctest::Approx(1.55017).epsilon(1e-5));
  CHECK_THROWS_AS(PhaseMatchConfig::make(0.71, 0.70, Axis::Z, 5e-3, kato()), NonPositiveIdler);
  // idler past 4 µm
  CHECK_THROWS_AS(PhaseMatchConfig::make(0.9, 1.16, Axis::Z, 5e-3, kato()), OutOfTransparencyWindow);
  CHECK_THROWS_AS(PhaseMatchConfig::make(0.71, 1.31, Axis::Z, -1.0, kato()), InvalidConfig);
}

TEST_CASE("gvm angle from finite-difference group velocities") {
  for (double lp : {0.62, 0.71, 0.78, 0.85}) {
    for (Axis sa : {Axis::Z, Axis::Y}) {
      const double ls = 1.31, li = idler_wavelength(lp, ls);
      const double kp = k_fd(lp, Axis::Y), ks = k_fd(ls, sa), ki = k_fd(li, other_axis(sa));
      double theta = std::atan2(-(kp - ks), kp - ki) * 180.0 / kPi;
      if (theta > 90) theta -= 180;
      if (theta <= -90) theta += 180;
      CHECK(gvm_angle(lp, ls, sa, kato()) == doctest::Approx(theta).epsilon(1e-5));
    }
  }
}

TEST_CASE("phase mismatch and coherence length") {
  const auto cfg = PhaseMatchConfig::make(0.71, 1.31, Axis::Z, 5e-3, kato());
  const auto g = phase_mismatch_and_lc(cfg, kato());
  const double dk = 2 * kPi * 1e6 *
                    (kato().refractive_index(0.71, Axis::Y) / 0.71 -
                     kato().refractive_index(1.31, Axis::Z) / 1.31 -
                     kato().refractive_index(cfg.idler_um, Axis::Y) / cfg.idler_um);
  CHECK(g.delta_k0 == doctest::Approx(dk).epsilon(1e-12));
  CHECK(g.coherence_length == doctest::Approx(kPi / std::abs(dk)).epsilon(1e-12));
  CHECK(g.coherence_length * 1e6 == doctest::Approx(18.86).epsilon(0.05));
  CHECK(g.theta_deg == doctest::Approx(26).epsilon(2.0 / 26));
}

TEST_CASE("scan range counting") {
  CHECK(ScanRange{0.5, 1.0, 0.1}.count() == 6);
  CHECK(ScanRange{0.5, 0.5, 0.1}.count() == 1);
  CHECK(ScanRange{0.5, 0.4, 0.1}.count() == 0);
  CHECK(ScanRange{0.5, 1.0, 0.0}.count() == 0);
}

TEST_CASE("gvm map masks and matches point queries") {
  const ScanRange pump{0.60, 0.90, 0.01}, signal{1.0, 2.0, 0.05};
  const auto map = gvm_map(pump, signal, Axis::Z, kato());
  REQUIRE(map.cells.size() == pump.count() * signal.count());
  bool saw_masked = false;
  for (std::size_t i = 0; i < pump.count(); ++i) {
    for (std::size_t j = 0; j < signal.count(); ++j) {
      const auto& c = map.at(i, j);
      if (!c.valid) {
        saw_masked = true;
        CHECK_FALSE(c.theta_deg.has_value());
        CHECK_FALSE(c.coherence_length.has_value());
        continue;
      }
      const double t = gvm_angle(c.pump_um, c.signal_um, Axis::Z, kato());
      if (c.theta_deg) {
        CHECK(*c.theta_deg == doctest::Approx(t));
        CHECK(t >= 0.0);
        CHECK(t <= 90.0);
      } else {
        CHECK((t < 0.0 || t > 90.0));
      }
    }
  }
  CHECK(saw_masked);  // signal <= pump or idler > 4 µm cells exist in this box
}

TEST_CASE("map cell near case (i) has theta about 26 degrees") {
  const auto map = gvm_map({0.70, 0.72, 0.01}, {1.30, 1.32, 0.01}, Axis::Z, kato());
  const auto& c = map.at(1, 1);
  REQUIRE(c.theta_deg.has_value());
  CHECK(*c.theta_deg == doctest::Approx(26).epsilon(2.0 / 26));
}

TEST_CASE("degenerate line matches point queries") {
  const ScanRange pump{0.60, 0.80, 0.02};
  const auto map = gvm_map(pump, {1.2, 1.6, 0.1}, Axis::Z, kato());
  const auto line = map.degenerate_line(kato());
  REQUIRE(line.size() == pump.count());
  for (const auto& c : line) {
    CHECK(c.idler_um == doctest::Approx(c.signal_um));
    const auto cfg = PhaseMatchConfig::make(c.pump_um, c.signal_um, Axis::Z, 5e-3, kato());
    REQUIRE(c.coherence_length.has_value());
    CHECK(*c.coherence_length == phase_mismatch_and_lc(cfg, kato()).coherence_length);
  }
}

TEST_CASE("empty ranges are errors") {
  CHECK_THROWS_AS(gvm_map({0.8, 0.7, 0.01}, {1.0, 2.0, 0.1}, Axis::Z, kato()), EmptyRange);
  CHECK_THROWS_AS(gvm_map({0.7, 0.8, 0.01}, {1.0, 2.0, -0.1}, Axis::Z, kato()), EmptyRange);
}

TEST_CASE("thread count does not change the map") {
  const ScanRange pump{0.60, 0.90, 0.01}, signal{1.0, 2.0, 0.05};
  const auto a = gvm_map(pump, signal, Axis::Y, kato(), 5e-3, Execution{1});
  const auto b = gvm_map(pump, signal, Axis::Y, kato(), 5e-3, Execution{3});
  for (std::size_t k = 0; k < a.cells.size(); ++k) {
    CHECK(a.cells[k].theta_deg == b.cells[k].theta_deg);
    CHECK(a.cells[k].coherence_length == b.cells[k].coherence_length);
  }
}
