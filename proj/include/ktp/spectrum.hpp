#pragma once

#include <Eigen/Dense>
#include <span>
#include <variant>

#include "ktp/dispersion.hpp"
#include "ktp/gvm.hpp"
#include "ktp/parallel.hpp"
#include "ktp/poling.hpp"

namespace ktp {

/// Gaussian pump envelope exp(-((ws + wi - w0) / sigma)^2).
///
/// Bandwidths in nm are intensity FWHM: the intensity goes as
/// exp(-2 (dw / sigma)^2), so FWHM_w = sigma sqrt(2 ln 2) and
/// FWHM_lambda = lambda0^2 / (2 pi c) FWHM_w.
struct PumpSpec {
  double omega0 = 0.0;
  double sigma = 0.0;

  static PumpSpec from_sigma(double pump_um, double sigma);
  static PumpSpec from_fwhm_nm(double pump_um, double fwhm_nm);
  double fwhm_nm() const;
};

double sigma_from_fwhm_nm(double pump_um, double fwhm_nm);
double fwhm_nm_from_sigma(double pump_um, double sigma);

double pump_envelope(double omega_s, double omega_i, const PumpSpec& pump);

/// First-order periodic-poling PMF normalized to the crystal length:
/// (2/pi) sinc[(dk -+ pi/l_c) L/2] e^{i dk L/2}, resonant at the pi/l_c of the
/// same sign as dk.
cplx pmf_pp_analytic(double delta_k, double coherence_length, double length);

using PolingStructure = std::variant<DomainArray, SegmentStructure>;

/// Exact integral of g(z) e^{i dk z} over the structure (units of length).
/// For |dk L| < 1e-8 a second-order Taylor expansion is used, which reduces
/// to sum A (end - start) at dk = 0.
cplx pmf_piecewise(double delta_k, const DomainArray& domains);
cplx pmf_piecewise(double delta_k, const SegmentStructure& structure);
cplx pmf_piecewise(double delta_k, const PolingStructure& structure);

/// Evaluates pmf_piecewise for many wavevectors at once. Uniform arrays use a
/// geometric-phase recurrence vectorized across the batch.
void pmf_piecewise_batch(std::span<const double> delta_k, const PolingStructure& structure,
                         std::span<cplx> out);

double poled_length(const PolingStructure& structure);

/// Square frequency grid centred on the nominal signal/idler frequencies.
/// Both axes share `step`; the full range is `count * step`.
struct SpectralGrid {
  double signal_center = 0.0;
  double idler_center = 0.0;
  double step = 0.0;           // rad/s
  std::size_t count = 0;
  double bandwidth = 0.0;      // Delta-omega, rad/s
  double range_mult = 10.0;    // R in units of Delta-omega
  double step_divisor = 20.0;  // D = Delta-omega / step_divisor

  double offset(std::size_t i) const {
    return (static_cast<double>(i) - 0.5 * static_cast<double>(count - 1)) * step;
  }
  double signal(std::size_t i) const { return signal_center + offset(i); }
  double idler(std::size_t j) const { return idler_center + offset(j); }
};

/// 20 for 10 <= theta <= 80 degrees, 40 otherwise.
double step_divisor_for_theta(double theta_deg);

/// Grid with R = range_mult * bandwidth and D from the theta rule.
SpectralGrid make_grid(double theta_deg, double bandwidth, double range_mult,
                       const PhaseMatchConfig& cfg);
/// Grid with an explicit step divisor (R / D points per axis).
SpectralGrid make_grid_with_divisor(double step_divisor, double bandwidth, double range_mult,
                                    const PhaseMatchConfig& cfg);

enum class PmfScheme { AnalyticPP, Piecewise };

struct JsaOptions {
  /// Zero grid points whose wavelengths leave the window instead of throwing.
  bool mask_outside_window = true;
  Execution exec{};
};

/// Joint spectral amplitude. Rows index signal frequency, columns idler.
struct JointSpectrum {
  SpectralGrid grid;
  Eigen::MatrixXcd amplitude;
  bool normalized = false;
  std::size_t masked_points = 0;

  double masked_fraction() const {
    const double n = static_cast<double>(amplitude.size());
    return n > 0 ? static_cast<double>(masked_points) / n : 0.0;
  }
};

/// f = pump envelope x PMF with the full Sellmeier phase mismatch at every grid
/// point, scaled to unit Frobenius norm. Throws ZeroSpectrum if all zero.
JointSpectrum build_jsa(const PhaseMatchConfig& cfg, const DispersionModel& model,
                        const PolingStructure& structure, const PumpSpec& pump,
                        const SpectralGrid& grid, PmfScheme scheme = PmfScheme::Piecewise,
                        const JsaOptions& options = {});

struct Bandwidths {
  double signal = 0.0;
  double idler = 0.0;
  double average = 0.0;
};

/// FWHM of |f|^2 along signal and idler cuts through the global maximum,
/// linearly interpolated. Throws PeakOnBoundary.
Bandwidths estimate_bandwidths(const JointSpectrum& jsa);

/// Self-consistent Delta-omega for a source: a few coarse pilot grids sized
/// from the previous estimate, then one pass at the theta resolution rule.
double measure_bandwidth(const PhaseMatchConfig& cfg, const DispersionModel& model,
                         const PolingStructure& structure, const PumpSpec& pump,
                         double theta_deg, const JsaOptions& options = {});

}  // namespace ktp
