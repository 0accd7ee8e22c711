#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace ktp {

using cplx = std::complex<double>;

/// Smallest domain that can be fabricated with electric-field poling.
inline constexpr double kMinFabricableWidth = 1e-6;  // m

/// One constant-sign piece of the nonlinearity profile g(z), [start, end) in metres.
struct Segment {
  double start = 0.0;
  double end = 0.0;
  int sign = 1;
};

/// Uniform-width poling: domain j (0-based) occupies [j w, (j+1) w) with sign A_j.
/// Any crystal beyond size() * width() is unpoled and ignored.
class DomainArray {
 public:
  DomainArray() = default;
  DomainArray(double width, std::vector<std::int8_t> signs);

  double width() const { return width_; }
  std::size_t size() const { return signs_.size(); }
  const std::vector<std::int8_t>& signs() const { return signs_; }
  double length() const { return width_ * static_cast<double>(signs_.size()); }
  double start(std::size_t j) const { return width_ * static_cast<double>(j); }
  bool fabricable() const { return width_ >= kMinFabricableWidth; }
  std::vector<Segment> segments() const;

  bool operator==(const DomainArray&) const = default;

 private:
  double width_ = 0.0;
  std::vector<std::int8_t> signs_;
};

/// Number of whole domains of width w in a crystal of length L.
std::size_t domain_count(double length, double width);

/// Alternating +1, -1, ... domains of width l_c.
/// Throws DomainTooNarrow (l_c < 1 µm) or CrystalTooShort (L < 2 l_c).
DomainArray periodic_domains(double length, double coherence_length);

/// Gaussian target for greedy tracking. sigma = L / alpha; alpha = 0 means an
/// infinitely wide Gaussian, whose target grows linearly at the maximal QPM rate.
struct TargetProfile {
  double alpha = 5.0;
  double sigma = 1e-3;
  double length = 5e-3;
  double delta_k0 = 0.0;

  static TargetProfile from_alpha(double alpha, double length, double delta_k0);
};

/// Target PMF accumulated up to position z (units of length), with the
/// crystal centre at L/2 and normalization sigma*sqrt(8/pi).
double target_pmf(double z, const TargetProfile& profile);

/// Incremental effective PMF at the phase-matched wavevector for
/// uniform-width domains. Each append is O(1).
class PmfTracker {
 public:
  PmfTracker(double width, double delta_k0);

  /// Contribution of the (size()+1)-th domain with the given sign.
  cplx next_contribution(int sign) const;
  void append(int sign);
  cplx value() const { return sum_; }
  std::size_t size() const { return count_; }
  /// Constant unit phase rotating a constructive first-order array onto the
  /// positive real axis.
  cplx alignment() const { return alignment_; }

 private:
  double width_;
  double delta_k0_;
  cplx prefactor_;
  cplx alignment_;
  cplx sum_{0.0, 0.0};
  std::size_t count_ = 0;
};

/// (i/dk0)(e^{-i w dk0} - 1) sum_j A_j e^{i w j dk0}, j = 1..n. Throws ZeroPhaseMismatch.
cplx effective_pmf_tracked(std::span<const std::int8_t> signs, double width, double delta_k0);

struct TrackingRun {
  DomainArray domains;
  double final_cost = 0.0;  // C(N w) with the aligned effective PMF
};

/// Greedy sign-by-sign tracking of the target with domains of width l_c / beta.
/// Ties choose +1. Throws DomainTooNarrow if the width is under 1 µm.
TrackingRun greedy_track(const TargetProfile& profile, double beta, double coherence_length,
                         double length);

/// Multi-order QPM. Each domain (width l_c) gets an odd order m from `orders`
/// by quantizing the normalized Gaussian at midpoints of the levels 1/m,
/// symmetric about the centre of the poled length.
std::vector<int> mqpm_order_map(double length, double coherence_length,
                                const std::vector<int>& orders, const TargetProfile& profile);
DomainArray mqpm_domains(double length, double coherence_length, const std::vector<int>& orders,
                         const TargetProfile& profile);

/// Arbitrary piecewise-constant structure.
struct SegmentStructure {
  std::vector<Segment> segments;

  double length() const { return segments.empty() ? 0.0 : segments.back().end; }
  double min_width() const;
};

/// Duty-cycle modulated poling: period 2 l_c, UP for 2 l_c * duty then DOWN.
/// When floor(L / l_c) is odd a final plain UP domain of width l_c is
/// appended so the poled length matches periodic_domains.
struct DutyCycleStructure {
  double coherence_length = 0.0;
  std::vector<double> duty;
  bool trailing_domain = false;
  SegmentStructure structure;
};

std::size_t duty_period_count(double length, double coherence_length);

/// Throws DutyOutOfRange for a wrong count or any duty outside (0, 1). With
/// `fabricable`, duties are clamped so both sub-domains are >= 1 µm.
DutyCycleStructure dc_domains(double length, double coherence_length,
                              const std::vector<double>& duty, bool fabricable = false);

/// Gaussian-error-function duty profile, 0.5 at the crystal centre and
/// tapering toward the faces; the usual starting point for duty optimization.
std::vector<double> erf_duty_profile(double length, double coherence_length, double alpha);

}  // namespace ktp
