#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ktp {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPi = 3.14159265358979323846;

/// Crystallographic axis carrying a field polarization. The pump is always Y.
enum class Axis { Y, Z };

Axis other_axis(Axis axis);
std::string_view to_string(Axis axis);
Axis parse_axis(std::string_view text);

/// Angular frequency (rad/s) <-> vacuum wavelength (µm).
double omega_from_um(double lambda_um);
double um_from_omega(double omega);

/// One axis of a Sellmeier set:
///   n^2 = constant + sum_k B_k / (lambda^2 - C_k) - ir * lambda^2   (lambda in µm)
/// Pole forms of the type B lambda^2 / (lambda^2 - C) reduce to this with an
/// extra constant B and pole coefficient B*C.
struct SellmeierAxis {
  double constant = 0.0;
  std::vector<std::pair<double, double>> poles;  // (B_k, C_k)
  double ir = 0.0;

  double index_squared(double lambda_um) const;
  /// d(n^2)/d(lambda) in 1/µm.
  double index_squared_slope(double lambda_um) const;
};

/// A named Sellmeier coefficient set for KTP with its valid wavelength window.
///
/// Evaluation is pure and thread-safe. Any wavelength outside the window
/// raises OutOfTransparencyWindow; nothing is extrapolated.
class DispersionModel {
 public:
  DispersionModel(std::string name, SellmeierAxis y, SellmeierAxis z, double min_um,
                  double max_um);

  /// Kato & Takaoka (2002) room-temperature KTP coefficients, window 0.35-4.0 µm.
  static DispersionModel kato_takaoka_2002();

  /// Parses the key-value coefficient format (see docs in README).
  static DispersionModel parse(std::string_view text);
  static DispersionModel load(const std::filesystem::path& file);
  /// Resolves a built-in set name, or loads the argument as a coefficient file.
  static DispersionModel resolve(const std::string& name_or_file);

  /// Text in the coefficient-file format; parse(serialize()) reproduces the model.
  std::string serialize() const;

  const std::string& name() const { return name_; }
  double min_um() const { return min_um_; }
  double max_um() const { return max_um_; }
  bool in_window(double lambda_um) const;

  double refractive_index(double lambda_um, Axis axis) const;
  /// k = omega n / c in rad/m.
  double wavenumber(double omega, Axis axis) const;
  /// k'(omega) = dk/domega in s/m, from the analytic Sellmeier derivative.
  double inverse_group_velocity(double omega, Axis axis) const;

 private:
  const SellmeierAxis& coefficients(Axis axis) const { return axis == Axis::Y ? y_ : z_; }
  void check_window(double lambda_um) const;

  std::string name_;
  SellmeierAxis y_;
  SellmeierAxis z_;
  double min_um_;
  double max_um_;
};

}  // namespace ktp
