#include "ktp/gvm.hpp"

#include <cmath>
#include <string>

#include "ktp/errors.hpp"

namespace ktp {

double idler_wavelength(double pump_um, double signal_um) {
  if (!(signal_um > pump_um) || !(pump_um > 0.0))
    throw NonPositiveIdler("signal wavelength must exceed the pump wavelength");
  // Written so that signal = 2 pump returns the signal exactly.
  return signal_um * (pump_um / (signal_um - pump_um));
}

PhaseMatchConfig PhaseMatchConfig::make(double pump_um, double signal_um, Axis signal_axis,
                                        double length_m, const DispersionModel& model) {
  if (!(length_m > 0.0)) throw InvalidConfig("crystal length must be positive");
  PhaseMatchConfig cfg;
  cfg.pump_um = pump_um;
  cfg.signal_um = signal_um;
  cfg.idler_um = idler_wavelength(pump_um, signal_um);
  cfg.signal_axis = signal_axis;
  cfg.idler_axis = other_axis(signal_axis);
  cfg.pump_axis = Axis::Y;
  cfg.length_m = length_m;
  for (double l : {cfg.pump_um, cfg.signal_um, cfg.idler_um}) {
    if (!model.in_window(l))
      throw OutOfTransparencyWindow("wavelength " + std::to_string(l) +
                                    " um is outside the transparency window of " + model.name());
  }
  return cfg;
}

double gvm_angle(double pump_um, double signal_um, Axis signal_axis, const DispersionModel& model) {
  const double idler_um = idler_wavelength(pump_um, signal_um);
  const double kp = model.inverse_group_velocity(omega_from_um(pump_um), Axis::Y);
  const double ks = model.inverse_group_velocity(omega_from_um(signal_um), signal_axis);
  const double ki = model.inverse_group_velocity(omega_from_um(idler_um), other_axis(signal_axis));
  double theta = std::atan2(-(kp - ks), kp - ki) * 180.0 / kPi;
  if (theta > 90.0) theta -= 180.0;
  if (theta <= -90.0) theta += 180.0;
  return theta;
}

GvmPoint phase_mismatch_and_lc(const PhaseMatchConfig& cfg, const DispersionModel& model) {
  GvmPoint p;
  p.delta_k0 = model.wavenumber(cfg.pump_omega(), cfg.pump_axis) -
               model.wavenumber(cfg.signal_omega(), cfg.signal_axis) -
               model.wavenumber(cfg.idler_omega(), cfg.idler_axis);
  p.coherence_length = kPi / std::abs(p.delta_k0);
  p.theta_deg = gvm_angle(cfg.pump_um, cfg.signal_um, cfg.signal_axis, model);
  return p;
}

std::size_t ScanRange::count() const {
  if (!(step_um > 0.0) || !(stop_um >= start_um) || !std::isfinite(start_um)) return 0;
  return static_cast<std::size_t>(std::floor((stop_um - start_um) / step_um + 1e-9)) + 1;
}

namespace {

GvmCell evaluate_cell(double pump_um, double signal_um, Axis signal_axis,
                      const DispersionModel& model, double length_m) {
  GvmCell cell;
  cell.pump_um = pump_um;
  cell.signal_um = signal_um;
  if (!(signal_um > pump_um)) return cell;
  cell.idler_um = idler_wavelength(pump_um, signal_um);
  if (!model.in_window(pump_um) || !model.in_window(signal_um) || !model.in_window(cell.idler_um))
    return cell;
  cell.valid = true;
  const auto cfg = PhaseMatchConfig::make(pump_um, signal_um, signal_axis, length_m, model);
  const GvmPoint p = phase_mismatch_and_lc(cfg, model);
  cell.coherence_length = p.coherence_length;
  if (p.theta_deg >= 0.0 && p.theta_deg <= 90.0) cell.theta_deg = p.theta_deg;
  return cell;
}

}  // namespace

std::vector<GvmCell> GvmMap::degenerate_line(const DispersionModel& model) const {
  std::vector<GvmCell> line;
  for (std::size_t i = 0; i < pump.count(); ++i) {
    const double lp = pump.at(i);
    line.push_back(evaluate_cell(lp, 2.0 * lp, signal_axis, model, length_m));
  }
  return line;
}

GvmMap gvm_map(const ScanRange& pump, const ScanRange& signal, Axis signal_axis,
               const DispersionModel& model, double length_m, const Execution& exec) {
  if (pump.count() == 0) throw EmptyRange("pump wavelength range has no points");
  if (signal.count() == 0) throw EmptyRange("signal wavelength range has no points");
  GvmMap map{pump, signal, signal_axis, length_m, {}};
  const std::size_t cols = signal.count();
  map.cells.resize(pump.count() * cols);
  parallel_for(map.cells.size(), exec, [&](std::size_t k) {
    map.cells[k] = evaluate_cell(pump.at(k / cols), signal.at(k % cols), signal_axis, model, length_m);
  });
  return map;
}

}  // namespace ktp
