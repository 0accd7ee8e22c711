#include "ktp/poling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ktp/dispersion.hpp"
#include "ktp/errors.hpp"

namespace ktp {

DomainArray::DomainArray(double width, std::vector<std::int8_t> signs)
    : width_(width), signs_(std::move(signs)) {
  if (!(width_ > 0.0)) throw InvalidConfig("domain width must be positive");
  for (auto s : signs_)
    if (s != 1 && s != -1) throw InvalidConfig("domain signs must be +1 or -1");
}

std::vector<Segment> DomainArray::segments() const {
  std::vector<Segment> out;
  out.reserve(signs_.size());
  for (std::size_t j = 0; j < signs_.size(); ++j)
    out.push_back({start(j), start(j + 1), signs_[j]});
  return out;
}

std::size_t domain_count(double length, double width) {
  // The small slack keeps exact multiples (e.g. 5 mm / 2.5 mm) from flooring down.
  return static_cast<std::size_t>(std::floor(length / width * (1.0 + 1e-12)));
}

DomainArray periodic_domains(double length, double coherence_length) {
  if (coherence_length < kMinFabricableWidth)
    throw DomainTooNarrow("coherence length below the 1 um poling limit");
  if (length < 2.0 * coherence_length * (1.0 - 1e-12))
    throw CrystalTooShort("crystal shorter than one poling period");
  const std::size_t n = domain_count(length, coherence_length);
  std::vector<std::int8_t> signs(n);
  for (std::size_t j = 0; j < n; ++j) signs[j] = (j % 2 == 0) ? 1 : -1;
  return DomainArray(coherence_length, std::move(signs));
}

TargetProfile TargetProfile::from_alpha(double alpha, double length, double delta_k0) {
  TargetProfile p;
  p.alpha = alpha;
  p.length = length;
  p.delta_k0 = delta_k0;
  p.sigma = alpha > 0.0 ? length / alpha : std::numeric_limits<double>::infinity();
  return p;
}

double target_pmf(double z, const TargetProfile& profile) {
  if (std::isinf(profile.sigma)) return 2.0 / kPi * z;
  const double s = profile.sigma;
  const double root2s = std::sqrt(2.0) * s;
  return std::sqrt(2.0 / kPi) * s *
         (std::erf(profile.length / (2.0 * root2s)) + std::erf((z - profile.length / 2.0) / root2s));
}

PmfTracker::PmfTracker(double width, double delta_k0) : width_(width), delta_k0_(delta_k0) {
  if (delta_k0 == 0.0) throw ZeroPhaseMismatch("tracking needs a nonzero phase mismatch");
  const cplx i(0.0, 1.0);
  prefactor_ = (i / delta_k0) * (std::polar(1.0, -width * delta_k0) - 1.0);
  // A half-period of first-order QPM accumulates 2i/dk0; rotate that onto +real.
  alignment_ = delta_k0 > 0.0 ? cplx(0.0, -1.0) : cplx(0.0, 1.0);
}

cplx PmfTracker::next_contribution(int sign) const {
  const double j = static_cast<double>(count_ + 1);
  return static_cast<double>(sign) * prefactor_ * std::polar(1.0, width_ * j * delta_k0_);
}

void PmfTracker::append(int sign) {
  sum_ += next_contribution(sign);
  ++count_;
}

cplx effective_pmf_tracked(std::span<const std::int8_t> signs, double width, double delta_k0) {
  PmfTracker tracker(width, delta_k0);
  for (auto s : signs) tracker.append(s);
  return tracker.value();
}

TrackingRun greedy_track(const TargetProfile& profile, double beta, double coherence_length,
                         double length) {
  if (!(beta > 0.0)) throw InvalidConfig("domain division factor must be positive");
  const double width = coherence_length / beta;
  if (width < kMinFabricableWidth) throw DomainTooNarrow("domain width l_c/beta below 1 um");
  const std::size_t n = domain_count(length, width);
  PmfTracker tracker(width, profile.delta_k0);
  const cplx align = tracker.alignment();
  std::vector<std::int8_t> signs(n);
  double cost = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double target = target_pmf(width * static_cast<double>(j + 1), profile);
    const cplx step = align * tracker.next_contribution(1);
    const cplx current = align * tracker.value();
    const double cost_up = std::norm(current + step - target);
    const double cost_down = std::norm(current - step - target);
    const int sign = cost_up <= cost_down ? 1 : -1;
    tracker.append(sign);
    signs[j] = static_cast<std::int8_t>(sign);
    cost = sign > 0 ? cost_up : cost_down;
  }
  return {DomainArray(width, std::move(signs)), cost};
}

std::vector<int> mqpm_order_map(double length, double coherence_length,
                                const std::vector<int>& orders, const TargetProfile& profile) {
  if (orders.empty() || orders.front() != 1)
    throw InvalidOrderList("QPM order list must start with 1");
  for (std::size_t k = 0; k < orders.size(); ++k) {
    if (orders[k] < 1 || orders[k] % 2 == 0)
      throw InvalidOrderList("QPM orders must be positive odd integers");
    if (k > 0 && orders[k] <= orders[k - 1])
      throw InvalidOrderList("QPM orders must be strictly ascending");
  }
  if (coherence_length < kMinFabricableWidth)
    throw DomainTooNarrow("coherence length below the 1 um poling limit");
  const std::size_t n = domain_count(length, coherence_length);
  std::vector<double> thresholds;
  for (std::size_t k = 0; k + 1 < orders.size(); ++k)
    thresholds.push_back(0.5 * (1.0 / orders[k] + 1.0 / orders[k + 1]));

  std::vector<int> map(n);
  for (std::size_t j = 0; j < n; ++j) {
    // Offset of the domain centre from the centre of the poled length, written
    // with an integer numerator so mirrored domains get bit-identical values.
    const double offset =
        static_cast<double>(2 * static_cast<long long>(j) + 1 - static_cast<long long>(n)) *
        coherence_length / 2.0;
    const double level =
        std::isinf(profile.sigma)
            ? 1.0
            : std::exp(-offset * offset / (2.0 * profile.sigma * profile.sigma));
    std::size_t k = 0;
    while (k < thresholds.size() && level <= thresholds[k]) ++k;
    map[j] = orders[k];
  }
  return map;
}

DomainArray mqpm_domains(double length, double coherence_length, const std::vector<int>& orders,
                         const TargetProfile& profile) {
  const auto map = mqpm_order_map(length, coherence_length, orders, profile);
  std::vector<std::int8_t> signs(map.size());
  // Order m uses period 2 m l_c referenced to the crystal entrance: m UP
  // domains then m DOWN. Its m-th harmonic is in phase with first order.
  for (std::size_t j = 0; j < map.size(); ++j)
    signs[j] = ((j / static_cast<std::size_t>(map[j])) % 2 == 0) ? 1 : -1;
  return DomainArray(coherence_length, std::move(signs));
}

double SegmentStructure::min_width() const {
  double w = std::numeric_limits<double>::infinity();
  for (const auto& s : segments) w = std::min(w, s.end - s.start);
  return w;
}

std::size_t duty_period_count(double length, double coherence_length) {
  return domain_count(length, coherence_length) / 2;
}

DutyCycleStructure dc_domains(double length, double coherence_length,
                              const std::vector<double>& duty, bool fabricable) {
  if (!(coherence_length > 0.0)) throw InvalidConfig("coherence length must be positive");
  const std::size_t periods = duty_period_count(length, coherence_length);
  if (periods == 0) throw CrystalTooShort("crystal shorter than one poling period");
  if (duty.size() != periods)
    throw DutyOutOfRange("expected " + std::to_string(periods) + " duty values, got " +
                         std::to_string(duty.size()));
  const double period = 2.0 * coherence_length;
  const double min_duty = kMinFabricableWidth / period;
  if (fabricable && min_duty >= 0.5)
    throw DomainTooNarrow("poling period too short for 1 um sub-domains");

  DutyCycleStructure dc;
  dc.coherence_length = coherence_length;
  dc.duty = duty;
  dc.trailing_domain = domain_count(length, coherence_length) % 2 == 1;
  auto& segs = dc.structure.segments;
  segs.reserve(2 * periods + 1);
  for (std::size_t p = 0; p < periods; ++p) {
    double d = duty[p];
    if (!(d > 0.0 && d < 1.0))
      throw DutyOutOfRange("duty value " + std::to_string(d) + " outside (0, 1)");
    if (fabricable) d = std::clamp(d, min_duty, 1.0 - min_duty);
    dc.duty[p] = d;
    const double start = period * static_cast<double>(p);
    const double mid = start + period * d;
    const double end = period * static_cast<double>(p + 1);
    segs.push_back({start, mid, 1});
    segs.push_back({mid, end, -1});
  }
  if (dc.trailing_domain) {
    const double start = period * static_cast<double>(periods);
    segs.push_back({start, start + coherence_length, 1});
  }
  return dc;
}

std::vector<double> erf_duty_profile(double length, double coherence_length, double alpha) {
  const std::size_t periods = duty_period_count(length, coherence_length);
  const double sigma = length / alpha;
  std::vector<double> duty(periods);
  for (std::size_t p = 0; p < periods; ++p) {
    const double offset =
        static_cast<double>(2 * static_cast<long long>(p) + 1 - static_cast<long long>(periods)) *
        coherence_length;
    const double d = 0.5 * std::erfc(std::abs(offset) / (std::sqrt(2.0) * sigma));
    duty[p] = std::clamp(d, 1e-3, 1.0 - 1e-3);
  }
  return duty;
}

}  // namespace ktp
