#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ktp/errors.hpp"
#include "ktp/gvm.hpp"
#include "ktp/poling.hpp"

using namespace ktp;

namespace {
// integral of A_j e^{i dk z} over each domain, summed the slow way
cplx brute_pmf(const DomainArray& d, double dk) {
  cplx sum{};
  const cplx i(0, 1);
  for (std::size_t j = 0; j < d.size(); ++j) {
    const double a = d.start(j), b = d.start(j + 1);
    sum += static_cast<double>(d.signs()[j]) * (std::exp(i * dk * b) - std::exp(i * dk * a)) / (i * dk);
  }
  return sum;
}

GvmPoint case_i() {
  static const auto m = DispersionModel::kato_takaoka_2002();
  return phase_mismatch_and_lc(PhaseMatchConfig::make(0.71, 1.31, Axis::Z, 5e-3, m), m);
}
}  // namespace

TEST_CASE("domain counting") {
  CHECK(domain_count(5e-3, 2.5e-3) == 2);
  CHECK(domain_count(5e-3, 18.86e-6) == 265);
  CHECK(domain_count(1e-3, 3e-4) == 3);
}

TEST_CASE("periodic poling") {
  const auto d = periodic_domains(5e-3, 20e-6);
  CHECK(d.size() == 250);
  CHECK(d.width() == 20e-6);
  for (std::size_t j = 0; j < d.size(); ++j) CHECK(d.signs()[j] == (j % 2 ? -1 : 1));
  CHECK(periodic_domains(40e-6, 20e-6).size() == 2);  // L == 2 l_c is one full period
  CHECK_THROWS_AS(periodic_domains(5e-3, 0.5e-6), DomainTooNarrow);
  CHECK_THROWS_AS(periodic_domains(30e-6, 20e-6), CrystalTooShort);
  const auto segs = d.segments();
  REQUIRE(segs.size() == d.size());
  CHECK(segs.back().end == doctest::Approx(5e-3));
}

TEST_CASE("effective pmf of the tracked form equals the exact domain integrals") {
  const double w = 7e-6, dk = 3.1e5;
  std::vector<std::int8_t> signs{1, -1, -1, 1, 1, 1, -1, 1, -1, -1};
  const auto direct = brute_pmf(DomainArray(w, signs), dk);
  const auto tracked = effective_pmf_tracked(signs, w, dk);
  CHECK(std::abs(tracked - direct) < 1e-12 * std::abs(direct) + 1e-18);
  PmfTracker t(w, dk);
  for (auto s : signs) t.append(s);
  CHECK(std::abs(t.value() - direct) < 1e-12 * std::abs(direct) + 1e-18);
  CHECK(t.size() == signs.size());
  CHECK_THROWS_AS(effective_pmf_tracked(signs, w, 0.0), ZeroPhaseMismatch);
}

TEST_CASE("alignment turns periodic poling onto the positive real axis") {
  for (double dk : {-1.6e5, 1.6e5}) {
    const double lc = kPi / std::abs(dk);
    const auto d = periodic_domains(2e-3, lc);
    PmfTracker t(lc, dk);
    for (auto s : d.signs()) t.append(s);
    const cplx v = t.alignment() * t.value();
    CHECK(v.real() == doctest::Approx(2.0 / kPi * d.length()).epsilon(1e-9));
    CHECK(std::abs(v.imag()) < 1e-9 * v.real());
  }
}

TEST_CASE("target profile is the accumulated Gaussian") {
  const auto p = TargetProfile::from_alpha(5.0, 5e-3, 3e5);
  CHECK(p.sigma == doctest::Approx(1e-3));
  // Simpson oracle of (2/pi) int_0^z exp(-(z'-L/2)^2 / (2 sigma^2)) dz'
  for (double z : {0.0, 1e-3, 2.5e-3, 4e-3, 5e-3}) {
    const int n = 2000;
    double s = 0;
    for (int k = 0; k <= n; ++k) {
      const double x = z * k / n;
      const double f = std::exp(-std::pow(x - 2.5e-3, 2) / (2 * 1e-6));
      s += f * (k == 0 || k == n ? 1 : (k % 2 ? 4 : 2));
    }
    s *= z / n / 3 * 2 / kPi;
    CHECK(target_pmf(z, p) == doctest::Approx(s).epsilon(1e-9).scale(1e-9));
  }
  const auto flat = TargetProfile::from_alpha(0.0, 5e-3, 3e5);
  CHECK(std::isinf(flat.sigma));
  CHECK(target_pmf(1e-3, flat) == doctest::Approx(2e-3 / kPi));
}

TEST_CASE("greedy tracking follows the target for case (i)") {
  const auto g = case_i();
  const auto profile = TargetProfile::from_alpha(5.1, 5e-3, g.delta_k0);
  const auto run = greedy_track(profile, 1.0, g.coherence_length, 5e-3);
  const auto& d = run.domains;
  CHECK(d.size() == domain_count(5e-3, g.coherence_length));
  PmfTracker t(d.width(), g.delta_k0);
  for (auto s : d.signs()) t.append(s);
  const double target = target_pmf(d.length(), profile);
  CHECK(std::abs(std::abs(t.value()) - target) < 0.05 * target);
  CHECK(run.final_cost == doctest::Approx(std::norm(t.alignment() * t.value() - target)));
  // smaller domains track at least as tightly
  const auto fine = greedy_track(profile, 4.0, g.coherence_length, 5e-3);
  CHECK(fine.domains.width() == doctest::Approx(g.coherence_length / 4));
  CHECK_THROWS_AS(greedy_track(profile, 50.0, g.coherence_length, 5e-3), DomainTooNarrow);
}

TEST_CASE("greedy tracking with a flat target reproduces periodic poling") {
  const auto g = case_i();
  const auto run = greedy_track(TargetProfile::from_alpha(0.0, 5e-3, g.delta_k0), 1.0,
                                g.coherence_length, 5e-3);
  CHECK(run.domains == periodic_domains(5e-3, g.coherence_length));
}

TEST_CASE("mqpm order map") {
  const auto g = case_i();
  const auto profile = TargetProfile::from_alpha(5.0, 5e-3, g.delta_k0);
  const std::vector<int> orders{1, 3, 5};
  const auto map = mqpm_order_map(5e-3, g.coherence_length, orders, profile);
  for (std::size_t j = 0; j < map.size(); ++j) CHECK(map[j] == map[map.size() - 1 - j]);
  CHECK(map[map.size() / 2] == 1);
  CHECK(map.front() == 5);  // exp(-alpha^2/8) ~ 0.04 is below the 1/3..1/5 midpoint
  // orders = {1} is plain periodic poling, bit for bit
  CHECK(mqpm_domains(5e-3, g.coherence_length, {1}, profile) ==
        periodic_domains(5e-3, g.coherence_length));
  CHECK_THROWS_AS(mqpm_order_map(5e-3, g.coherence_length, {3, 5}, profile), InvalidOrderList);
  CHECK_THROWS_AS(mqpm_order_map(5e-3, g.coherence_length, {1, 4}, profile), InvalidOrderList);
  CHECK_THROWS_AS(mqpm_order_map(5e-3, g.coherence_length, {1, 5, 3}, profile), InvalidOrderList);
}

TEST_CASE("mqpm domains use m-fold periods") {
  const double lc = 10e-6;
  const auto profile = TargetProfile::from_alpha(0.0, 1e-3, kPi / lc);
  const auto d = mqpm_domains(1e-3, lc, {1, 3}, profile);  // flat target, all first order
  CHECK(d == periodic_domains(1e-3, lc));
  // a narrow Gaussian pushes the edges to third order: +++---
  const auto narrow = TargetProfile::from_alpha(20.0, 1e-3, kPi / lc);
  const auto map = mqpm_order_map(1e-3, lc, {1, 3}, narrow);
  const auto dn = mqpm_domains(1e-3, lc, {1, 3}, narrow);
  REQUIRE(map[0] == 3);
  CHECK(dn.signs()[0] == 1);
  CHECK(dn.signs()[2] == 1);
  CHECK(dn.signs()[3] == -1);
  CHECK(dn.signs()[5] == -1);
}

TEST_CASE("duty-cycle structure") {
  const double lc = 20e-6, L = 1e-3 + 25e-6;  // 51 domains -> 25 periods + trailing
  const auto n = duty_period_count(L, lc);
  CHECK(n == 25);
  const auto dc = dc_domains(L, lc, std::vector<double>(n, 0.3));
  CHECK(dc.trailing_domain);
  REQUIRE(dc.structure.segments.size() == 51);
  CHECK(dc.structure.segments[0].end == doctest::Approx(12e-6));
  CHECK(dc.structure.segments[1].sign == -1);
  CHECK(dc.structure.length() == doctest::Approx(51 * lc));
  CHECK(dc.structure.min_width() == doctest::Approx(12e-6));
  CHECK_THROWS_AS(dc_domains(L, lc, std::vector<double>(n - 1, 0.5)), DutyOutOfRange);
  CHECK_THROWS_AS(dc_domains(L, lc, std::vector<double>(n, 1.0)), DutyOutOfRange);
  CHECK_THROWS_AS(dc_domains(L, lc, std::vector<double>(n, 0.0)), DutyOutOfRange);
  const auto fab = dc_domains(L, lc, std::vector<double>(n, 0.01), true);
  CHECK(fab.duty[0] == doctest::Approx(1e-6 / (2 * lc)));
  CHECK(fab.structure.min_width() >= 1e-6 * (1 - 1e-9));
}

TEST_CASE("erf duty profile") {
  const double lc = 20e-6, L = 5e-3;
  const auto duty = erf_duty_profile(L, lc, 5.0);
  REQUIRE(duty.size() == 125);
  CHECK(duty[62] == doctest::Approx(0.5));
  for (std::size_t p = 0; p < duty.size(); ++p) CHECK(duty[p] == duty[duty.size() - 1 - p]);
  // period 0 centred 124 l_c from the middle
  CHECK(duty[0] == doctest::Approx(0.5 * std::erfc(124 * lc / (std::sqrt(2.0) * 1e-3))));
  for (double d : duty) CHECK((d >= 1e-3 && d <= 1 - 1e-3));
}
