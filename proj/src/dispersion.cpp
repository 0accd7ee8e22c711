#include "ktp/dispersion.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "ktp/errors.hpp"

namespace ktp {

Axis other_axis(Axis axis) { return axis == Axis::Y ? Axis::Z : Axis::Y; }

std::string_view to_string(Axis axis) { return axis == Axis::Y ? "Y" : "Z"; }

Axis parse_axis(std::string_view text) {
  if (text == "Y" || text == "y") return Axis::Y;
  if (text == "Z" || text == "z") return Axis::Z;
  throw InvalidConfig("axis must be Y or Z, got '" + std::string(text) + "'");
}

double omega_from_um(double lambda_um) { return 2.0 * kPi * kSpeedOfLight / (lambda_um * 1e-6); }

double um_from_omega(double omega) { return 2.0 * kPi * kSpeedOfLight / omega * 1e6; }

double SellmeierAxis::index_squared(double lambda_um) const {
  const double l2 = lambda_um * lambda_um;
  double n2 = constant - ir * l2;
  for (const auto& [b, c] : poles) n2 += b / (l2 - c);
  return n2;
}

double SellmeierAxis::index_squared_slope(double lambda_um) const {
  const double l2 = lambda_um * lambda_um;
  double slope = -2.0 * ir * lambda_um;
  for (const auto& [b, c] : poles) {
    const double d = l2 - c;
    slope -= 2.0 * lambda_um * b / (d * d);
  }
  return slope;
}

DispersionModel::DispersionModel(std::string name, SellmeierAxis y, SellmeierAxis z,
                                 double min_um, double max_um)
    : name_(std::move(name)), y_(std::move(y)), z_(std::move(z)), min_um_(min_um),
      max_um_(max_um) {
  if (name_.empty()) throw InvalidConfig("dispersion model needs a name");
  if (!(min_um_ > 0.0 && max_um_ > min_um_))
    throw InvalidConfig("dispersion model window must satisfy 0 < min < max");
  // Reject coefficient sets that are unphysical anywhere inside the window.
  constexpr int kSamples = 512;
  for (int i = 0; i <= kSamples; ++i) {
    const double l = min_um_ + (max_um_ - min_um_) * i / kSamples;
    for (const auto* axis : {&y_, &z_}) {
      const double n2 = axis->index_squared(l);
      if (!std::isfinite(n2) || n2 <= 1.0)
        throw InvalidConfig("dispersion model '" + name_ + "' gives n <= 1 inside its window");
    }
  }
}

DispersionModel DispersionModel::kato_takaoka_2002() {
  SellmeierAxis y{3.45018, {{0.04341, 0.04597}, {16.98825, 39.43799}}, 0.0};
  SellmeierAxis z{4.59423, {{0.06206, 0.04763}, {110.80672, 86.12171}}, 0.0};
  return DispersionModel("kato-takaoka-2002", std::move(y), std::move(z), 0.35, 4.0);
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<double> numbers(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  std::vector<double> out;
  std::string token;
  while (in >> token) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw InvalidConfig("coefficient key '" + key + "': bad number '" + token + "'");
    }
  }
  return out;
}

}  // namespace

DispersionModel DispersionModel::parse(std::string_view text) {
  std::map<std::string, std::string> kv;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw InvalidConfig("coefficient file line " + std::to_string(lineno) + ": expected key = value");
    kv[trim(t.substr(0, eq))] = trim(t.substr(eq + 1));
  }

  auto require = [&](const std::string& key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw InvalidConfig("coefficient file is missing key '" + key + "'");
    return it->second;
  };
  auto read_axis = [&](const std::string& prefix) {
    SellmeierAxis axis;
    const auto c = numbers(prefix + ".constant", require(prefix + ".constant"));
    if (c.size() != 1) throw InvalidConfig("'" + prefix + ".constant' takes one value");
    axis.constant = c[0];
    if (auto it = kv.find(prefix + ".poles"); it != kv.end()) {
      const auto p = numbers(it->first, it->second);
      if (p.size() % 2 != 0) throw InvalidConfig("'" + prefix + ".poles' needs B C pairs");
      for (std::size_t i = 0; i < p.size(); i += 2) axis.poles.emplace_back(p[i], p[i + 1]);
    }
    if (auto it = kv.find(prefix + ".ir"); it != kv.end()) {
      const auto r = numbers(it->first, it->second);
      if (r.size() != 1) throw InvalidConfig("'" + prefix + ".ir' takes one value");
      axis.ir = r[0];
    }
    return axis;
  };

  const auto window = numbers("window_um", require("window_um"));
  if (window.size() != 2) throw InvalidConfig("'window_um' takes two values");
  return DispersionModel(require("name"), read_axis("y"), read_axis("z"), window[0], window[1]);
}

DispersionModel DispersionModel::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw InvalidConfig("cannot open coefficient file '" + file.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

DispersionModel DispersionModel::resolve(const std::string& name_or_file) {
  if (name_or_file.empty() || name_or_file == "kato-takaoka-2002") return kato_takaoka_2002();
  if (std::filesystem::exists(name_or_file)) return load(name_or_file);
  throw InvalidConfig("unknown Sellmeier set '" + name_or_file + "'");
}

std::string DispersionModel::serialize() const {
  std::ostringstream out;
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  out << "name = " << name_ << "\n";
  out << "window_um = " << num(min_um_) << " " << num(max_um_) << "\n";
  for (const auto& [prefix, axis] : {std::pair{"y", &y_}, std::pair{"z", &z_}}) {
    out << prefix << ".constant = " << num(axis->constant) << "\n";
    if (!axis->poles.empty()) {
      out << prefix << ".poles =";
      for (const auto& [b, c] : axis->poles) out << " " << num(b) << " " << num(c);
      out << "\n";
    }
    out << prefix << ".ir = " << num(axis->ir) << "\n";
  }
  return out.str();
}

bool DispersionModel::in_window(double lambda_um) const {
  return lambda_um >= min_um_ && lambda_um <= max_um_;
}

void DispersionModel::check_window(double lambda_um) const {
  if (!in_window(lambda_um)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "wavelength %.6g um outside %s window [%g, %g] um", lambda_um,
                  name_.c_str(), min_um_, max_um_);
    throw OutOfTransparencyWindow(buf);
  }
}

double DispersionModel::refractive_index(double lambda_um, Axis axis) const {
  check_window(lambda_um);
  return std::sqrt(coefficients(axis).index_squared(lambda_um));
}

double DispersionModel::wavenumber(double omega, Axis axis) const {
  return omega * refractive_index(um_from_omega(omega), axis) / kSpeedOfLight;
}

double DispersionModel::inverse_group_velocity(double omega, Axis axis) const {
  // k' = (n - lambda dn/dlambda) / c, with dn/dlambda = (dn^2/dlambda) / (2n).
  const double lambda = um_from_omega(omega);
  const double n = refractive_index(lambda, axis);
  const double dn = coefficients(axis).index_squared_slope(lambda) / (2.0 * n);
  return (n - lambda * dn) / kSpeedOfLight;
}

}  // namespace ktp
