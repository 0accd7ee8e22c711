#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ktp/analysis.hpp"
#include "ktp/errors.hpp"
#include "ktp/spectrum.hpp"

using namespace ktp;

namespace {
const DispersionModel& kato() {
  static const auto m = DispersionModel::kato_takaoka_2002();
  return m;
}
PhaseMatchConfig case_i() { return PhaseMatchConfig::make(0.71, 1.31, Axis::Z, 5e-3, kato()); }

SegmentStructure as_segments(const DomainArray& d) { return {d.segments()}; }
}  // namespace

TEST_CASE("pump bandwidth conventions") {
  CHECK(sigma_from_fwhm_nm(0.71, 1.0) == doctest::Approx(3173628923352.716).epsilon(1e-12));
  CHECK(fwhm_nm_from_sigma(0.71, sigma_from_fwhm_nm(0.71, 3.07)) == doctest::Approx(3.07));
  const auto pump = PumpSpec::from_fwhm_nm(0.71, 2.0);
  CHECK(pump.fwhm_nm() == doctest::Approx(2.0));
  // intensity halves at +-FWHM/2
  const double half = 0.5 * pump.sigma * std::sqrt(2.0 * std::log(2.0));
  const double e = pump_envelope(pump.omega0 / 2 + half, pump.omega0 / 2, pump);
  CHECK(e * e == doctest::Approx(0.5));
  CHECK_THROWS_AS(PumpSpec::from_sigma(0.71, 0.0), InvalidConfig);
}

TEST_CASE("piecewise pmf agrees with the analytic sinc over the central lobe") {
  const double lc = 18.85e-6, L = 5e-3;
  const auto d = periodic_domains(L, lc);
  for (double sign : {1.0, -1.0}) {
    const double dk0 = sign * kPi / lc;
    double worst = 0.0;
    const double lobe = 2 * kPi / d.length();
    for (int k = -50; k <= 50; ++k) {
      const double dk = dk0 + lobe * k / 50.0;
      const cplx a = pmf_pp_analytic(dk, lc, d.length());
      const cplx p = pmf_piecewise(dk, d) / d.length();
      worst = std::max(worst, std::abs(std::abs(a) - std::abs(p)));
    }
    CHECK(worst < 0.01 * (2 / kPi));
  }
}

TEST_CASE("domain and segment forms agree, batch agrees with scalar") {
  const auto d = periodic_domains(2e-3, 20e-6);
  const auto s = as_segments(d);
  std::vector<double> dks;
  for (int k = -40; k <= 40; ++k) dks.push_back(kPi / 20e-6 + 1e3 * k);
  dks.push_back(0.0);
  dks.push_back(1e-9);
  std::vector<cplx> batch(dks.size());
  pmf_piecewise_batch(dks, PolingStructure{d}, batch);
  for (std::size_t p = 0; p < dks.size(); ++p) {
    const cplx a = pmf_piecewise(dks[p], d), b = pmf_piecewise(dks[p], s);
    const double scale = std::max(std::abs(a), 1e-7);
    CHECK(std::abs(a - b) < 1e-10 * scale + 1e-16);
    CHECK(std::abs(batch[p] - a) < 1e-10 * scale + 1e-16);
  }
}

TEST_CASE("small phase branch is continuous") {
  const std::vector<std::int8_t> signs{1, 1, -1, 1, -1, -1, 1};
  const DomainArray d(30e-6, signs);
  const auto s = as_segments(d);
  const double L = d.length();
  // zero-dk limit is the signed length
  CHECK(std::abs(pmf_piecewise(0.0, d) - cplx(30e-6, 0)) < 1e-18);
  for (double edge : {1e-8, -1e-8}) {
    const double below = edge / L * (1 - 1e-9), above = edge / L * (1 + 1e-9);
    CHECK(std::abs(pmf_piecewise(below, d) - pmf_piecewise(above, d)) <
          1e-10 * std::abs(pmf_piecewise(above, d)));
    CHECK(std::abs(pmf_piecewise(below, s) - pmf_piecewise(above, s)) <
          1e-10 * std::abs(pmf_piecewise(above, s)));
  }
}

TEST_CASE("duty 0.5 reproduces periodic poling") {
  const auto cfg = case_i();
  const auto g = phase_mismatch_and_lc(cfg, kato());
  const auto pp = periodic_domains(cfg.length_m, g.coherence_length);
  const auto dc = dc_domains(cfg.length_m, g.coherence_length,
                             std::vector<double>(duty_period_count(cfg.length_m, g.coherence_length), 0.5));
  CHECK(dc.structure.length() == doctest::Approx(pp.length()).epsilon(1e-14));
  for (int k = -100; k <= 100; ++k) {
    const double dk = g.delta_k0 + 50.0 * k;
    const cplx a = pmf_piecewise(dk, pp), b = pmf_piecewise(dk, dc.structure);
    CHECK(std::abs(a - b) <= 1e-12 * std::abs(a));
  }
}

TEST_CASE("grid rules") {
  CHECK(step_divisor_for_theta(26) == 20);
  CHECK(step_divisor_for_theta(10) == 20);
  CHECK(step_divisor_for_theta(80) == 20);
  CHECK(step_divisor_for_theta(2) == 40);
  CHECK(step_divisor_for_theta(85) == 40);
  const auto g = make_grid(26, 1e12, 10, case_i());
  CHECK(g.count == 200);
  CHECK(g.step == doctest::Approx(5e10));
  CHECK(g.offset(0) == doctest::Approx(-99.5 * 5e10));
  CHECK(g.offset(199) == doctest::Approx(99.5 * 5e10));
  CHECK(make_grid_with_divisor(10, 1e12, 7.0, case_i()).count == 70);
  CHECK_THROWS_AS(make_grid(26, -1.0, 10, case_i()), InvalidConfig);
}

TEST_CASE("jsa build") {
  const auto cfg = case_i();
  const auto g = phase_mismatch_and_lc(cfg, kato());
  const auto pp = periodic_domains(cfg.length_m, g.coherence_length);
  const auto pump = PumpSpec::from_fwhm_nm(cfg.pump_um, 1.8);
  const auto grid = make_grid(g.theta_deg, 2e12, 10, cfg);
  const auto jsa = build_jsa(cfg, kato(), pp, pump, grid);
  CHECK(jsa.amplitude.rows() == 200);
  CHECK(jsa.amplitude.norm() == doctest::Approx(1.0));
  CHECK(jsa.masked_points == 0);
  // peak near the centre of the grid for a phase-matched source
  Eigen::Index pi, pj;
  jsa.amplitude.cwiseAbs().maxCoeff(&pi, &pj);
  CHECK(std::abs(pi - 100) < 20);
  CHECK(std::abs(pj - 100) < 20);
  const auto analytic = build_jsa(cfg, kato(), pp, pump, grid, PmfScheme::AnalyticPP);
  CHECK(purity_from_gram(analytic.amplitude) ==
        doctest::Approx(purity_from_gram(jsa.amplitude)).epsilon(1e-2));
  // thread count does not change a single bit
  JsaOptions one, three;
  one.exec.threads = 1;
  three.exec.threads = 3;
  CHECK(build_jsa(cfg, kato(), pp, pump, grid, PmfScheme::Piecewise, one).amplitude ==
        build_jsa(cfg, kato(), pp, pump, grid, PmfScheme::Piecewise, three).amplitude);
}

TEST_CASE("points outside the window are masked or rejected") {
  const auto cfg = PhaseMatchConfig::make(0.90, 1.20, Axis::Z, 5e-3, kato());  // idler 3.6 µm
  const auto g = phase_mismatch_and_lc(cfg, kato());
  const auto pp = periodic_domains(cfg.length_m, g.coherence_length);
  const auto pump = PumpSpec::from_fwhm_nm(cfg.pump_um, 2.0);
  const auto grid = make_grid_with_divisor(4, 2e13, 10, cfg);  // idler reaches past 4 µm
  const auto jsa = build_jsa(cfg, kato(), pp, pump, grid);
  CHECK(jsa.masked_points > 0);
  CHECK(jsa.masked_fraction() < 1.0);
  JsaOptions strict;
  strict.mask_outside_window = false;
  CHECK_THROWS_AS(build_jsa(cfg, kato(), pp, pump, grid, PmfScheme::Piecewise, strict),
                  OutOfTransparencyWindow);
}

TEST_CASE("bandwidth of a synthetic Gaussian") {
  JointSpectrum jsa;
  jsa.grid.count = 201;
  jsa.grid.step = 1.0;
  jsa.amplitude.resize(201, 201);
  const double ss = 7.0, si = 12.0;
  for (int i = 0; i < 201; ++i)
    for (int j = 0; j < 201; ++j)
      jsa.amplitude(i, j) = std::exp(-0.5 * std::pow((i - 100) / ss, 2) - 0.5 * std::pow((j - 100) / si, 2));
  const auto b = estimate_bandwidths(jsa);
  CHECK(b.signal == doctest::Approx(2 * ss * std::sqrt(std::log(2.0))).epsilon(2e-3));
  CHECK(b.idler == doctest::Approx(2 * si * std::sqrt(std::log(2.0))).epsilon(2e-3));
  CHECK(b.average == doctest::Approx(0.5 * (b.signal + b.idler)));
  jsa.amplitude(0, 5) = 10.0;
  CHECK_THROWS_AS(estimate_bandwidths(jsa), PeakOnBoundary);
}

TEST_CASE("measured bandwidth is self-consistent") {
  const auto cfg = case_i();
  const auto g = phase_mismatch_and_lc(cfg, kato());
  const auto pp = periodic_domains(cfg.length_m, g.coherence_length);
  const auto pump = PumpSpec::from_fwhm_nm(cfg.pump_um, 1.8);
  const double dw = measure_bandwidth(cfg, kato(), pp, pump, g.theta_deg);
  const auto jsa = build_jsa(cfg, kato(), pp, pump, make_grid(g.theta_deg, dw, 10, cfg));
  CHECK(estimate_bandwidths(jsa).average == doctest::Approx(dw).epsilon(0.02));
}
