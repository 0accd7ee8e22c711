#pragma once

#include <optional>
#include <vector>

#include "ktp/dispersion.hpp"
#include "ktp/parallel.hpp"

namespace ktp {

/// Idler wavelength from energy conservation, 1/lp = 1/ls + 1/li (all µm).
/// Throws NonPositiveIdler unless signal_um > pump_um.
double idler_wavelength(double pump_um, double signal_um);

/// Type-II collinear configuration: pump on Y, signal and idler on opposite
/// axes. "Signal" is whichever photon the caller heralds.
struct PhaseMatchConfig {
  double pump_um = 0.0;
  double signal_um = 0.0;
  double idler_um = 0.0;
  Axis signal_axis = Axis::Z;
  Axis idler_axis = Axis::Y;
  Axis pump_axis = Axis::Y;
  double length_m = 5e-3;

  /// Derives the idler and validates every invariant against the model window.
  static PhaseMatchConfig make(double pump_um, double signal_um, Axis signal_axis,
                               double length_m, const DispersionModel& model);

  double pump_omega() const { return omega_from_um(pump_um); }
  double signal_omega() const { return omega_from_um(signal_um); }
  double idler_omega() const { return omega_from_um(idler_um); }
};

struct GvmPoint {
  double theta_deg = 0.0;
  double delta_k0 = 0.0;        // rad/m, k_p - k_s - k_i at the centre frequencies
  double coherence_length = 0.0;  // m, pi / |delta_k0|
};

/// GVM angle in degrees, folded into (-90, 90].
double gvm_angle(double pump_um, double signal_um, Axis signal_axis, const DispersionModel& model);

GvmPoint phase_mismatch_and_lc(const PhaseMatchConfig& cfg, const DispersionModel& model);

/// Inclusive wavelength range in µm. Point i sits at start + i*step.
struct ScanRange {
  double start_um = 0.0;
  double stop_um = 0.0;
  double step_um = 0.0;

  std::size_t count() const;
  double at(std::size_t i) const { return start_um + static_cast<double>(i) * step_um; }
};

struct GvmCell {
  double pump_um = 0.0;
  double signal_um = 0.0;
  double idler_um = 0.0;              // 0 when no positive idler exists
  bool valid = false;                 // all three wavelengths inside the window
  std::optional<double> theta_deg;    // set only for 0 <= theta <= 90
  std::optional<double> coherence_length;
};

struct GvmMap {
  ScanRange pump;
  ScanRange signal;
  Axis signal_axis = Axis::Z;
  double length_m = 5e-3;
  std::vector<GvmCell> cells;  // row-major: pump index outer, signal index inner

  const GvmCell& at(std::size_t pump_index, std::size_t signal_index) const {
    return cells[pump_index * signal.count() + signal_index];
  }
  /// Degenerate line lambda_s = 2 lambda_p for every pump row, for plot overlays.
  std::vector<GvmCell> degenerate_line(const DispersionModel& model) const;
};

/// Scans theta and l_c over a pump x signal grid. Cells whose idler leaves the
/// transparency window are masked, not errors. Throws EmptyRange.
GvmMap gvm_map(const ScanRange& pump, const ScanRange& signal, Axis signal_axis,
               const DispersionModel& model, double length_m = 5e-3,
               const Execution& exec = {});

}  // namespace ktp
