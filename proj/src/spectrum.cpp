#include "ktp/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "ktp/errors.hpp"

namespace ktp {

namespace {

double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

constexpr double kSmallPhase = 1e-8;

// Second-order Taylor expansion of the segment integrals; exact at dk = 0.
template <typename Segments>
cplx pmf_small_phase(double dk, const Segments& segments) {
  double re = 0.0, im = 0.0;
  for (const Segment& s : segments) {
    const double a = s.start, b = s.end;
    re += s.sign * ((b - a) - dk * dk * (b * b * b - a * a * a) / 6.0);
    im += s.sign * dk * (b * b - a * a) / 2.0;
  }
  return {re, im};
}

// Segment integral e^{i dk m} (b - a) sinc(dk (b - a) / 2), free of cancellation.
cplx segment_sum_midpoint(double dk, const std::vector<Segment>& segments) {
  double re = 0.0, im = 0.0;
  for (const Segment& s : segments) {
    const double half = 0.5 * (s.end - s.start);
    const double mid = 0.5 * (s.end + s.start);
    const double mag = s.sign * 2.0 * half * sinc(dk * half);
    re += mag * std::cos(dk * mid);
    im += mag * std::sin(dk * mid);
  }
  return {re, im};
}

// sum A (e^{i dk b} - e^{i dk a}) / (i dk), sharing the phase of contiguous
// boundaries. Only used once |dk L| > 1, where the division is harmless.
cplx segment_sum_boundaries(double dk, const std::vector<Segment>& segments) {
  double re = 0.0, im = 0.0;
  double last_end = std::numeric_limits<double>::quiet_NaN();
  double er = 0.0, ei = 0.0;
  for (const Segment& s : segments) {
    double sr, si;
    if (s.start == last_end) {
      sr = er;
      si = ei;
    } else {
      sr = std::cos(dk * s.start);
      si = std::sin(dk * s.start);
    }
    er = std::cos(dk * s.end);
    ei = std::sin(dk * s.end);
    last_end = s.end;
    re += s.sign * (er - sr);
    im += s.sign * (ei - si);
  }
  // divide by i dk
  return {im / dk, -re / dk};
}

cplx segment_sum(double dk, const std::vector<Segment>& segments, double length) {
  if (std::abs(dk * length) > 1.0) return segment_sum_boundaries(dk, segments);
  return segment_sum_midpoint(dk, segments);
}

void domain_batch(std::span<const double> dk, const DomainArray& domains, std::span<cplx> out) {
  const std::size_t n = dk.size();
  const std::size_t count = domains.size();
  const double w = domains.width();
  const double length = domains.length();
  if (count == 0) {
    std::fill(out.begin(), out.end(), cplx{});
    return;
  }
  std::vector<double> qr(n), qi(n), sr(n), si(n);
  const auto& signs = domains.signs();
  for (std::size_t p = 0; p < n; ++p) {
    qr[p] = std::cos(dk[p] * w);
    qi[p] = std::sin(dk[p] * w);
    sr[p] = signs[count - 1];
    si[p] = 0.0;
  }
  // S = sum_j A_j q^j by Horner; the inner loop runs across the batch.
  double* __restrict__ r = sr.data();
  double* __restrict__ im = si.data();
  const double* __restrict__ cr = qr.data();
  const double* __restrict__ ci = qi.data();
  for (std::size_t j = count - 1; j-- > 0;) {
    const double a = signs[j];
    for (std::size_t p = 0; p < n; ++p) {
      const double tr = r[p] * cr[p] - im[p] * ci[p] + a;
      const double ti = r[p] * ci[p] + im[p] * cr[p];
      r[p] = tr;
      im[p] = ti;
    }
  }
  std::vector<Segment> segs;
  for (std::size_t p = 0; p < n; ++p) {
    if (std::abs(dk[p] * length) < kSmallPhase) {
      if (segs.empty()) segs = domains.segments();
      out[p] = pmf_small_phase(dk[p], segs);
      continue;
    }
    const double x = 0.5 * dk[p] * w;
    const double mag = w * sinc(x);
    const double fr = mag * std::cos(x), fi = mag * std::sin(x);
    out[p] = {fr * sr[p] - fi * si[p], fr * si[p] + fi * sr[p]};
  }
}

}  // namespace

double sigma_from_fwhm_nm(double pump_um, double fwhm_nm) {
  const double lambda = pump_um * 1e-6;
  const double fwhm_omega = fwhm_nm * 1e-9 * 2.0 * kPi * kSpeedOfLight / (lambda * lambda);
  return fwhm_omega / std::sqrt(2.0 * std::log(2.0));
}

double fwhm_nm_from_sigma(double pump_um, double sigma) {
  const double lambda = pump_um * 1e-6;
  const double fwhm_omega = sigma * std::sqrt(2.0 * std::log(2.0));
  return fwhm_omega * lambda * lambda / (2.0 * kPi * kSpeedOfLight) * 1e9;
}

PumpSpec PumpSpec::from_sigma(double pump_um, double sigma) {
  if (!(sigma > 0.0)) throw InvalidConfig("pump bandwidth must be positive");
  return {omega_from_um(pump_um), sigma};
}

PumpSpec PumpSpec::from_fwhm_nm(double pump_um, double fwhm_nm) {
  return from_sigma(pump_um, sigma_from_fwhm_nm(pump_um, fwhm_nm));
}

double PumpSpec::fwhm_nm() const { return fwhm_nm_from_sigma(um_from_omega(omega0), sigma); }

double pump_envelope(double omega_s, double omega_i, const PumpSpec& pump) {
  const double x = (omega_s + omega_i - pump.omega0) / pump.sigma;
  return std::exp(-x * x);
}

cplx pmf_pp_analytic(double delta_k, double coherence_length, double length) {
  const double grating = (delta_k < 0.0 ? -kPi : kPi) / coherence_length;
  return (2.0 / kPi) * sinc((delta_k - grating) * length / 2.0) *
         std::polar(1.0, delta_k * length / 2.0);
}

cplx pmf_piecewise(double delta_k, const DomainArray& domains) {
  cplx out;
  domain_batch(std::span<const double>(&delta_k, 1), domains, std::span<cplx>(&out, 1));
  return out;
}

cplx pmf_piecewise(double delta_k, const SegmentStructure& structure) {
  if (std::abs(delta_k * structure.length()) < kSmallPhase)
    return pmf_small_phase(delta_k, structure.segments);
  return segment_sum(delta_k, structure.segments, structure.length());
}

cplx pmf_piecewise(double delta_k, const PolingStructure& structure) {
  return std::visit([&](const auto& s) { return pmf_piecewise(delta_k, s); }, structure);
}

void pmf_piecewise_batch(std::span<const double> delta_k, const PolingStructure& structure,
                         std::span<cplx> out) {
  if (const auto* domains = std::get_if<DomainArray>(&structure)) {
    domain_batch(delta_k, *domains, out);
    return;
  }
  const auto& segs = std::get<SegmentStructure>(structure);
  for (std::size_t p = 0; p < delta_k.size(); ++p) out[p] = pmf_piecewise(delta_k[p], segs);
}

double poled_length(const PolingStructure& structure) {
  return std::visit([](const auto& s) { return s.length(); }, structure);
}

double step_divisor_for_theta(double theta_deg) {
  return (theta_deg >= 10.0 && theta_deg <= 80.0) ? 20.0 : 40.0;
}

SpectralGrid make_grid_with_divisor(double step_divisor, double bandwidth, double range_mult,
                                    const PhaseMatchConfig& cfg) {
  if (!(bandwidth > 0.0)) throw InvalidConfig("grid bandwidth must be positive");
  if (!(range_mult > 0.0) || !(step_divisor > 0.0))
    throw InvalidConfig("grid range and resolution must be positive");
  SpectralGrid g;
  g.signal_center = cfg.signal_omega();
  g.idler_center = cfg.idler_omega();
  g.bandwidth = bandwidth;
  g.range_mult = range_mult;
  g.step_divisor = step_divisor;
  g.step = bandwidth / step_divisor;
  g.count = static_cast<std::size_t>(std::llround(range_mult * step_divisor));
  if (g.count < 2) throw InvalidConfig("grid needs at least two points per axis");
  return g;
}

SpectralGrid make_grid(double theta_deg, double bandwidth, double range_mult,
                       const PhaseMatchConfig& cfg) {
  return make_grid_with_divisor(step_divisor_for_theta(theta_deg), bandwidth, range_mult, cfg);
}

JointSpectrum build_jsa(const PhaseMatchConfig& cfg, const DispersionModel& model,
                        const PolingStructure& structure, const PumpSpec& pump,
                        const SpectralGrid& grid, PmfScheme scheme, const JsaOptions& options) {
  const std::size_t n = grid.count;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  auto wavenumber_or_nan = [&](double omega, Axis axis) {
    if (!model.in_window(um_from_omega(omega))) {
      if (!options.mask_outside_window) model.wavenumber(omega, axis);  // throws
      return nan;
    }
    return model.wavenumber(omega, axis);
  };

  std::vector<double> ks(n), ki(n), kp(2 * n - 1), detuning(2 * n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    ks[i] = wavenumber_or_nan(grid.signal(i), cfg.signal_axis);
    ki[i] = wavenumber_or_nan(grid.idler(i), cfg.idler_axis);
  }
  const double center_sum = grid.signal_center + grid.idler_center;
  for (std::size_t s = 0; s < 2 * n - 1; ++s) {
    const double shift = (static_cast<double>(s) - static_cast<double>(n - 1)) * grid.step;
    kp[s] = wavenumber_or_nan(center_sum + shift, cfg.pump_axis);
    detuning[s] = (center_sum - pump.omega0) + shift;
  }

  const DomainArray* domains = std::get_if<DomainArray>(&structure);
  if (scheme == PmfScheme::AnalyticPP && domains == nullptr)
    throw InvalidConfig("analytic PP evaluation needs a uniform domain array");

  JointSpectrum jsa;
  jsa.grid = grid;
  jsa.amplitude.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::vector<std::size_t> masked_per_row(n, 0);

  parallel_for(n, options.exec, [&](std::size_t i) {
    std::vector<double> dk;
    std::vector<std::size_t> cols;
    dk.reserve(n);
    cols.reserve(n);
    for (std::size_t j = 0; j < n; ++j) {
      const double d = kp[i + j] - ks[i] - ki[j];
      if (std::isnan(d)) {
        jsa.amplitude(i, j) = 0.0;
        ++masked_per_row[i];
        continue;
      }
      dk.push_back(d);
      cols.push_back(j);
    }
    std::vector<cplx> pmf(dk.size());
    if (scheme == PmfScheme::AnalyticPP) {
      for (std::size_t p = 0; p < dk.size(); ++p)
        pmf[p] = pmf_pp_analytic(dk[p], domains->width(), domains->length());
    } else {
      pmf_piecewise_batch(dk, structure, pmf);
    }
    for (std::size_t p = 0; p < dk.size(); ++p) {
      const double x = detuning[i + cols[p]] / pump.sigma;
      jsa.amplitude(i, cols[p]) = std::exp(-x * x) * pmf[p];
    }
  });

  for (auto m : masked_per_row) jsa.masked_points += m;
  const double norm = jsa.amplitude.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw ZeroSpectrum("joint spectrum is identically zero");
  jsa.amplitude /= norm;
  jsa.normalized = true;
  return jsa;
}

namespace {

double cut_fwhm(const std::vector<double>& values, std::size_t peak, double step) {
  const double half = values[peak] / 2.0;
  std::size_t l = peak;
  while (l > 0 && values[l] > half) --l;
  std::size_t r = peak;
  while (r + 1 < values.size() && values[r] > half) ++r;
  if (values[l] > half || values[r] > half)
    throw PeakOnBoundary("half-maximum not reached inside the grid");
  const double left = static_cast<double>(l) + (half - values[l]) / (values[l + 1] - values[l]);
  const double right =
      static_cast<double>(r - 1) + (half - values[r - 1]) / (values[r] - values[r - 1]);
  return (right - left) * step;
}

}  // namespace

Bandwidths estimate_bandwidths(const JointSpectrum& jsa) {
  const Eigen::MatrixXd power = jsa.amplitude.cwiseAbs2();
  Eigen::Index pi = 0, pj = 0;
  const double peak = power.maxCoeff(&pi, &pj);
  const Eigen::Index n = power.rows();
  if (!(peak > 0.0)) throw PeakOnBoundary("joint spectrum has no peak");
  if (pi == 0 || pj == 0 || pi == n - 1 || pj == power.cols() - 1)
    throw PeakOnBoundary("joint spectrum maximum lies on the grid edge");
  std::vector<double> signal_cut(static_cast<std::size_t>(power.rows()));
  std::vector<double> idler_cut(static_cast<std::size_t>(power.cols()));
  for (Eigen::Index i = 0; i < power.rows(); ++i) signal_cut[i] = power(i, pj);
  for (Eigen::Index j = 0; j < power.cols(); ++j) idler_cut[j] = power(pi, j);
  Bandwidths b;
  b.signal = cut_fwhm(signal_cut, static_cast<std::size_t>(pi), jsa.grid.step);
  b.idler = cut_fwhm(idler_cut, static_cast<std::size_t>(pj), jsa.grid.step);
  b.average = 0.5 * (b.signal + b.idler);
  return b;
}

double measure_bandwidth(const PhaseMatchConfig& cfg, const DispersionModel& model,
                         const PolingStructure& structure, const PumpSpec& pump,
                         double theta_deg, const JsaOptions& options) {
  // Gaussian estimate of the cut widths from first-order dispersion.
  const double kp = model.inverse_group_velocity(cfg.pump_omega(), cfg.pump_axis);
  const double a = kp - model.inverse_group_velocity(cfg.signal_omega(), cfg.signal_axis);
  const double b = kp - model.inverse_group_velocity(cfg.idler_omega(), cfg.idler_axis);
  const double dk_half = 2.78312 / poled_length(structure);  // sinc^2 half-width
  const double pump_half = pump.sigma * std::sqrt(std::log(2.0) / 2.0);
  auto half_width = [&](double slope) {
    return 1.0 / std::sqrt(1.0 / (pump_half * pump_half) + slope * slope / (dk_half * dk_half));
  };
  double estimate = half_width(a) + half_width(b);

  constexpr int kMaxPilots = 12;
  for (int it = 0; it < kMaxPilots; ++it) {
    const auto grid = make_grid_with_divisor(10.0, estimate, 10.0, cfg);
    const auto jsa = build_jsa(cfg, model, structure, pump, grid, PmfScheme::Piecewise, options);
    double next;
    try {
      next = estimate_bandwidths(jsa).average;
    } catch (const PeakOnBoundary&) {
      estimate *= 2.0;
      continue;
    }
    const bool converged = std::abs(next / estimate - 1.0) < 0.02;
    estimate = next;
    if (converged) break;
  }
  const auto fine = make_grid(theta_deg, estimate, 10.0, cfg);
  const auto jsa = build_jsa(cfg, model, structure, pump, fine, PmfScheme::Piecewise, options);
  try {
    return estimate_bandwidths(jsa).average;
  } catch (const PeakOnBoundary&) {
    return estimate;
  }
}

}  // namespace ktp
