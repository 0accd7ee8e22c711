#pragma once

#include <string>
#include <vector>

#include "ktp/spectrum.hpp"

namespace ktp {

/// Schmidt coefficients c_j, descending, with sum c_j^2 = 1.
struct SchmidtSpectrum {
  std::vector<double> coefficients;
};

/// Singular values of the amplitude matrix, normalized. Throws ZeroSpectrum.
SchmidtSpectrum schmidt_decompose(const Eigen::MatrixXcd& amplitude);
SchmidtSpectrum schmidt_decompose(const JointSpectrum& jsa);

/// P = sum c_j^4.
double purity(const SchmidtSpectrum& spectrum);

/// The same quantity without an SVD: ||F^H F||_F^2 / ||F||_F^4, which equals
/// sum s^4 / (sum s^2)^2 for the singular values s of F.
double purity_from_gram(const Eigen::MatrixXcd& amplitude);

/// Conditional probability that the signal lies within +-signal_half_window of
/// its nominal centre given the idler lies within +-idler_half_window of its
/// own (rad/s). The JSA grid must strictly contain both windows.
double heralding_efficiency(const JointSpectrum& jsa, double signal_half_window,
                            double idler_half_window);

/// Builds a grid `extension` times wider than the R-wide filter window and
/// evaluates the heralding efficiency for filters of width R on both photons.
double heralding_efficiency_for_source(const PhaseMatchConfig& cfg, const DispersionModel& model,
                                       const PolingStructure& structure, const PumpSpec& pump,
                                       double theta_deg, double bandwidth, double range_mult = 10.0,
                                       double extension = 7.0, const JsaOptions& options = {});

struct SourceEvaluation {
  double purity = 0.0;
  double bandwidth = 0.0;  // Delta-omega used to size the grid
  SpectralGrid grid;
  std::size_t masked_points = 0;
};

/// Measures Delta-omega, builds the standard grid (range_mult x Delta-omega,
/// theta resolution rule) and returns the purity on it.
SourceEvaluation evaluate_source(const PhaseMatchConfig& cfg, const DispersionModel& model,
                                 const PolingStructure& structure, const PumpSpec& pump,
                                 double theta_deg, double range_mult = 10.0,
                                 const JsaOptions& options = {});

struct PumpSearch {
  double min_nm = 0.05;
  double max_nm = 50.0;
  int coarse_points = 21;
  double relative_tolerance = 1e-3;
};

struct PumpOptimum {
  double fwhm_nm = 0.0;
  double sigma = 0.0;
  double purity = 0.0;
  double bandwidth = 0.0;
};

/// Log-spaced coarse scan of the pump bandwidth followed by golden-section
/// refinement in log(sigma). Throws NoInteriorMaximum if the best coarse
/// point sits on a bound.
PumpOptimum optimize_pump_bandwidth(const PhaseMatchConfig& cfg, const DispersionModel& model,
                                    const PolingStructure& structure, double theta_deg,
                                    const PumpSearch& search = {}, const JsaOptions& options = {});

struct RangePoint {
  double range_mult = 0.0;
  double purity = 0.0;
  double masked_fraction = 0.0;
};

struct RangeSweepCurve {
  std::string scheme;
  double bandwidth = 0.0;  // Delta-omega frozen from the R = 10 baseline
  std::vector<RangePoint> points;
};

/// Purity against the spectral range R (units of Delta-omega) at the fixed
/// theta resolution rule. A non-positive `bandwidth` is measured at R = 10.
RangeSweepCurve purity_vs_range(const PhaseMatchConfig& cfg, const DispersionModel& model,
                                const PolingStructure& structure, const PumpSpec& pump,
                                const std::vector<double>& ranges, double theta_deg,
                                double bandwidth, std::string scheme,
                                const JsaOptions& options = {});

/// First R where the sign of (a - b) changes, linearly interpolated; negative
/// if the curves never cross. Both curves must share their R values.
double crossover_range(const RangeSweepCurve& a, const RangeSweepCurve& b);

}  // namespace ktp
