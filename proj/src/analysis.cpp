#include "ktp/analysis.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

#include "ktp/errors.hpp"

namespace ktp {

SchmidtSpectrum schmidt_decompose(const Eigen::MatrixXcd& amplitude) {
  if (amplitude.size() == 0 || !amplitude.allFinite())
    throw ZeroSpectrum("joint spectrum is empty or not finite");
  const double scale = amplitude.norm();
  if (!(scale > 0.0)) throw ZeroSpectrum("joint spectrum is identically zero");
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(amplitude / scale);
  const Eigen::VectorXd& s = svd.singularValues();
  const double total = s.squaredNorm();
  SchmidtSpectrum out;
  out.coefficients.resize(static_cast<std::size_t>(s.size()));
  for (Eigen::Index k = 0; k < s.size(); ++k)
    out.coefficients[static_cast<std::size_t>(k)] = s[k] / std::sqrt(total);
  std::sort(out.coefficients.begin(), out.coefficients.end(), std::greater<>());
  return out;
}

SchmidtSpectrum schmidt_decompose(const JointSpectrum& jsa) { return schmidt_decompose(jsa.amplitude); }

double purity(const SchmidtSpectrum& spectrum) {
  double p = 0.0;
  for (double c : spectrum.coefficients) p += c * c * c * c;
  return p;
}

double purity_from_gram(const Eigen::MatrixXcd& amplitude) {
  const double scale = amplitude.norm();
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ZeroSpectrum("joint spectrum is zero");
  const Eigen::MatrixXcd f = amplitude / scale;
  Eigen::MatrixXcd gram;
  if (f.rows() >= f.cols())
    gram.noalias() = f.adjoint() * f;
  else
    gram.noalias() = f * f.adjoint();
  return gram.squaredNorm();
}

namespace {

// Grid indices whose offset from the centre lies within +-half (with a
// half-step of slack so symmetric windows pick whole points).
std::vector<bool> window_mask(const SpectralGrid& g, double half) {
  std::vector<bool> in(g.count);
  const double tol = 1e-9 * g.step;
  for (std::size_t i = 0; i < g.count; ++i) in[i] = std::abs(g.offset(i)) <= half + tol;
  return in;
}

}  // namespace

double heralding_efficiency(const JointSpectrum& jsa, double signal_half_window,
                            double idler_half_window) {
  const auto& g = jsa.grid;
  const double grid_half = 0.5 * static_cast<double>(g.count) * g.step;
  const double tol = 1e-9 * g.step;
  if (!(signal_half_window > 0.0) || !(idler_half_window > 0.0))
    throw WindowExceedsGrid("filter windows must be positive");
  if (signal_half_window > grid_half + tol || idler_half_window > grid_half + tol)
    throw WindowExceedsGrid("filter window extends beyond the computed grid");
  const auto in_s = window_mask(g, signal_half_window);
  const auto in_i = window_mask(g, idler_half_window);
  double joint = 0.0, heralded = 0.0;
  for (Eigen::Index j = 0; j < jsa.amplitude.cols(); ++j) {
    if (!in_i[static_cast<std::size_t>(j)]) continue;
    for (Eigen::Index i = 0; i < jsa.amplitude.rows(); ++i) {
      const double p = std::norm(jsa.amplitude(i, j));
      heralded += p;
      if (in_s[static_cast<std::size_t>(i)]) joint += p;
    }
  }
  if (!(heralded > 0.0)) throw ZeroSpectrum("no idler power inside the filter window");
  return joint / heralded;
}

double heralding_efficiency_for_source(const PhaseMatchConfig& cfg, const DispersionModel& model,
                                       const PolingStructure& structure, const PumpSpec& pump,
                                       double theta_deg, double bandwidth, double range_mult,
                                       double extension, const JsaOptions& options) {
  if (!(extension > 1.0)) throw WindowExceedsGrid("extended grid must exceed the filter window");
  const auto grid = make_grid(theta_deg, bandwidth, range_mult * extension, cfg);
  const auto jsa = build_jsa(cfg, model, structure, pump, grid, PmfScheme::Piecewise, options);
  const double half = 0.5 * range_mult * bandwidth;
  return heralding_efficiency(jsa, half, half);
}

SourceEvaluation evaluate_source(const PhaseMatchConfig& cfg, const DispersionModel& model,
                                 const PolingStructure& structure, const PumpSpec& pump,
                                 double theta_deg, double range_mult, const JsaOptions& options) {
  SourceEvaluation ev;
  ev.bandwidth = measure_bandwidth(cfg, model, structure, pump, theta_deg, options);
  ev.grid = make_grid(theta_deg, ev.bandwidth, range_mult, cfg);
  const auto jsa = build_jsa(cfg, model, structure, pump, ev.grid, PmfScheme::Piecewise, options);
  ev.masked_points = jsa.masked_points;
  ev.purity = purity_from_gram(jsa.amplitude);
  return ev;
}

PumpOptimum optimize_pump_bandwidth(const PhaseMatchConfig& cfg, const DispersionModel& model,
                                    const PolingStructure& structure, double theta_deg,
                                    const PumpSearch& search, const JsaOptions& options) {
  if (!(search.min_nm > 0.0 && search.max_nm > search.min_nm) || search.coarse_points < 3)
    throw InvalidConfig("pump bandwidth search needs 0 < min < max and >= 3 points");
  const double lo = std::log(sigma_from_fwhm_nm(cfg.pump_um, search.min_nm));
  const double hi = std::log(sigma_from_fwhm_nm(cfg.pump_um, search.max_nm));

  PumpOptimum best;
  auto evaluate = [&](double log_sigma) {
    const auto pump = PumpSpec::from_sigma(cfg.pump_um, std::exp(log_sigma));
    const auto ev = evaluate_source(cfg, model, structure, pump, theta_deg, 10.0, options);
    if (ev.purity > best.purity) {
      best.purity = ev.purity;
      best.sigma = pump.sigma;
      best.bandwidth = ev.bandwidth;
    }
    return ev.purity;
  };

  const int n = search.coarse_points;
  std::vector<double> xs(static_cast<std::size_t>(n)), ps(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    xs[k] = lo + (hi - lo) * k / (n - 1);
    ps[k] = evaluate(xs[k]);
  }
  const auto top = static_cast<int>(std::max_element(ps.begin(), ps.end()) - ps.begin());
  if (top == 0 || top == n - 1)
    throw NoInteriorMaximum("purity peaks at a pump-bandwidth search bound");

  // Golden section on [x_{top-1}, x_{top+1}]; tolerance is relative in sigma.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = xs[top - 1], b = xs[top + 1];
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = evaluate(c), fd = evaluate(d);
  while (b - a > search.relative_tolerance) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = evaluate(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = evaluate(d);
    }
  }
  best.fwhm_nm = fwhm_nm_from_sigma(cfg.pump_um, best.sigma);
  return best;
}

RangeSweepCurve purity_vs_range(const PhaseMatchConfig& cfg, const DispersionModel& model,
                                const PolingStructure& structure, const PumpSpec& pump,
                                const std::vector<double>& ranges, double theta_deg,
                                double bandwidth, std::string scheme, const JsaOptions& options) {
  if (ranges.empty()) throw EmptyRange("range sweep needs at least one R value");
  for (std::size_t k = 0; k < ranges.size(); ++k) {
    if (ranges[k] < 2.0) throw InvalidConfig("range sweep values must be >= 2");
    if (k > 0 && ranges[k] <= ranges[k - 1])
      throw InvalidConfig("range sweep values must be ascending");
  }
  RangeSweepCurve curve;
  curve.scheme = std::move(scheme);
  curve.bandwidth = bandwidth > 0.0
                        ? bandwidth
                        : measure_bandwidth(cfg, model, structure, pump, theta_deg, options);
  for (double r : ranges) {
    const auto grid = make_grid(theta_deg, curve.bandwidth, r, cfg);
    const auto jsa = build_jsa(cfg, model, structure, pump, grid, PmfScheme::Piecewise, options);
    curve.points.push_back({r, purity_from_gram(jsa.amplitude), jsa.masked_fraction()});
  }
  return curve;
}

double crossover_range(const RangeSweepCurve& a, const RangeSweepCurve& b) {
  if (a.points.size() != b.points.size())
    throw InvalidConfig("crossover needs curves on the same R values");
  for (std::size_t k = 1; k < a.points.size(); ++k) {
    const double d0 = a.points[k - 1].purity - b.points[k - 1].purity;
    const double d1 = a.points[k].purity - b.points[k].purity;
    if ((d0 > 0.0) != (d1 > 0.0)) {
      const double r0 = a.points[k - 1].range_mult, r1 = a.points[k].range_mult;
      return r0 + (r1 - r0) * d0 / (d0 - d1);
    }
  }
  return -1.0;
}

}  // namespace ktp
