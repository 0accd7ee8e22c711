#include "ktp/io.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "ktp/errors.hpp"

namespace ktp {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

namespace {

std::string fixed(double value, int decimals) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed, decimals);
  std::string s(buf, res.ptr);
  if (s == "-0" || s.rfind("-0.", 0) == 0) {
    // avoid "-0.0000" for tiny negatives
    if (s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  }
  return s;
}

std::ofstream open_out(const fs::path& file) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary);
  if (!out) throw Error("cannot write " + file.string());
  return out;
}

void header(std::ostream& out, const RunStamp& prov) {
  out << "# digest " << prov.digest << "\n# sellmeier " << prov.sellmeier << "\n";
}

double wavelength_nm(double omega) { return um_from_omega(omega) * 1e3; }

template <typename T>
void put(std::ostream& out, T value) {
  // the byte order of the host is little-endian on every supported target
  static_assert(std::endian::native == std::endian::little);
  out.write(reinterpret_cast<const char*>(&value), sizeof value);
}

template <typename T>
T get(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof value);
  if (!in) throw Error("truncated JSA binary");
  return value;
}

}  // namespace

void write_text(const fs::path& file, const std::string& text) {
  auto out = open_out(file);
  out << text;
}

void write_gvm_csv(const fs::path& file, const GvmMap& map, const RunStamp& prov) {
  auto out = open_out(file);
  header(out, prov);
  out << "# signal_axis " << to_string(map.signal_axis) << "\n";
  out << "pump_nm,signal_nm,idler_nm,theta_deg,lc_um\n";
  for (const auto& c : map.cells) {
    out << fixed(c.pump_um * 1e3, 3) << ',' << fixed(c.signal_um * 1e3, 3) << ','
        << (c.idler_um > 0 ? fixed(c.idler_um * 1e3, 3) : std::string("NA")) << ','
        << (c.theta_deg ? fixed(*c.theta_deg, 4) : std::string("NA")) << ','
        << (c.coherence_length ? fixed(*c.coherence_length * 1e6, 4) : std::string("NA"))
        << '\n';
  }
}

void write_gvm_matrices(const fs::path& dir, const GvmMap& map, const RunStamp& prov) {
  const std::size_t rows = map.pump.count(), cols = map.signal.count();
  auto matrix = [&](const fs::path& file, auto&& value) {
    auto out = open_out(file);
    header(out, prov);
    out << "pump_nm\\signal_nm";
    for (std::size_t j = 0; j < cols; ++j) out << ',' << fixed(map.signal.at(j) * 1e3, 3);
    out << '\n';
    for (std::size_t i = 0; i < rows; ++i) {
      out << fixed(map.pump.at(i) * 1e3, 3);
      for (std::size_t j = 0; j < cols; ++j) out << ',' << value(map.at(i, j));
      out << '\n';
    }
  };
  matrix(dir / "theta_map.csv", [](const GvmCell& c) {
    return c.theta_deg ? fixed(*c.theta_deg, 4) : std::string("NA");
  });
  matrix(dir / "lc_map.csv", [](const GvmCell& c) {
    return c.coherence_length ? fixed(*c.coherence_length * 1e6, 4) : std::string("NA");
  });

  std::size_t outside = 0, out_of_band = 0, kept = 0;
  for (const auto& c : map.cells) {
    if (!c.valid) ++outside;
    else if (!c.theta_deg) ++out_of_band;
    else ++kept;
  }
  auto out = open_out(dir / "mask_legend.txt");
  header(out, prov);
  out << "NA in theta_map.csv: idler non-positive or a wavelength outside the "
      << "transparency window, or theta outside [0, 90] deg\n"
      << "NA in lc_map.csv: idler non-positive or a wavelength outside the transparency window\n"
      << "cells " << map.cells.size() << "\n"
      << "outside_window " << outside << "\n"
      << "theta_outside_0_90 " << out_of_band << "\n"
      << "theta_kept " << kept << "\n";
}

void write_poling(const fs::path& file, const DesignResult& r, const RunStamp& prov) {
  auto out = open_out(file);
  header(out, prov);
  out << "# scheme " << to_string(r.scheme) << "\n"
      << "# alpha " << format_double(r.alpha) << "\n"
      << "# beta " << format_double(r.beta) << "\n"
      << "# lc_um " << fixed(r.gvm.coherence_length * 1e6, 4) << "\n"
      << "# length_mm " << format_double(r.cfg.length_m * 1e3) << "\n"
      << "# start_um width_um sign\n";
  auto line = [&](double start, double end, int sign) {
    out << fixed(start * 1e6, 4) << ' ' << fixed((end - start) * 1e6, 4) << ' '
        << (sign > 0 ? "+1" : "-1") << '\n';
  };
  if (auto* d = std::get_if<DomainArray>(&r.structure)) {
    for (std::size_t j = 0; j < d->size(); ++j)
      line(d->start(j), d->start(j + 1), d->signs()[j]);
  } else {
    for (const auto& s : std::get<SegmentStructure>(r.structure).segments)
      line(s.start, s.end, s.sign);
  }
}

void write_jsa_csv(const fs::path& file, const JointSpectrum& jsa, const RunStamp& prov) {
  auto out = open_out(file);
  header(out, prov);
  out << "# rows: signal, columns: idler, values |f|\n";
  const auto& g = jsa.grid;
  out << "idler_nm";
  for (std::size_t j = 0; j < g.count; ++j) out << ',' << fixed(wavelength_nm(g.idler(j)), 6);
  out << "\nsignal_nm\n";
  for (std::size_t i = 0; i < g.count; ++i) {
    out << fixed(wavelength_nm(g.signal(i)), 6);
    for (std::size_t j = 0; j < g.count; ++j) {
      const double a = std::abs(jsa.amplitude(static_cast<Eigen::Index>(i),
                                              static_cast<Eigen::Index>(j)));
      out << ',' << (std::isnan(a) ? std::string("0") : format_double(a));
    }
    out << '\n';
  }
}

void write_jsa_binary(const fs::path& file, const JointSpectrum& jsa, const RunStamp& prov) {
  auto out = open_out(file);
  out.write("KTPJSA01", 8);
  const auto rows = static_cast<std::uint64_t>(jsa.amplitude.rows());
  const auto cols = static_cast<std::uint64_t>(jsa.amplitude.cols());
  put(out, rows);
  put(out, cols);
  const auto& g = jsa.grid;
  put(out, g.signal(0));
  put(out, g.signal(g.count - 1));
  put(out, g.idler(0));
  put(out, g.idler(g.count - 1));
  char digest[16] = {};
  std::memcpy(digest, prov.digest.data(), std::min<std::size_t>(16, prov.digest.size()));
  out.write(digest, 16);
  put(out, static_cast<std::uint32_t>(prov.sellmeier.size()));
  out.write(prov.sellmeier.data(), static_cast<std::streamsize>(prov.sellmeier.size()));
  for (Eigen::Index i = 0; i < jsa.amplitude.rows(); ++i)
    for (Eigen::Index j = 0; j < jsa.amplitude.cols(); ++j) {
      const cplx v = jsa.amplitude(i, j);
      put(out, v.real());
      put(out, v.imag());
    }
}

JsaBinary read_jsa_binary(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error("cannot read " + file.string());
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, "KTPJSA01", 8) != 0) throw Error("not a JSA binary");
  JsaBinary b;
  const auto rows = get<std::uint64_t>(in);
  const auto cols = get<std::uint64_t>(in);
  b.signal_min = get<double>(in);
  b.signal_max = get<double>(in);
  b.idler_min = get<double>(in);
  b.idler_max = get<double>(in);
  char digest[16];
  in.read(digest, 16);
  b.prov.digest.assign(digest, strnlen(digest, 16));
  const auto len = get<std::uint32_t>(in);
  b.prov.sellmeier.resize(len);
  in.read(b.prov.sellmeier.data(), len);
  b.amplitude.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < b.amplitude.rows(); ++i)
    for (Eigen::Index j = 0; j < b.amplitude.cols(); ++j) {
      const double re = get<double>(in);
      const double im = get<double>(in);
      b.amplitude(i, j) = {re, im};
    }
  return b;
}

void write_schmidt_csv(const fs::path& file, const SchmidtSpectrum& spectrum,
                       const RunStamp& prov) {
  auto out = open_out(file);
  header(out, prov);
  out << "j,c_j\n";
  for (std::size_t j = 0; j < spectrum.coefficients.size(); ++j)
    out << j << ',' << format_double(spectrum.coefficients[j]) << '\n';
}

void write_range_curves(const fs::path& file, const std::vector<RangeSweepCurve>& curves,
                        const RunStamp& prov) {
  auto out = open_out(file);
  header(out, prov);
  for (const auto& c : curves)
    out << "# " << c.scheme << " delta_omega " << format_double(c.bandwidth) << "\n";
  out << "R_over_dw,purity,scheme,masked_fraction\n";
  for (const auto& c : curves)
    for (const auto& p : c.points)
      out << format_double(p.range_mult) << ',' << format_double(p.purity) << ',' << c.scheme
          << ',' << format_double(p.masked_fraction) << '\n';
}

json design_to_json(const DesignResult& r, const RunStamp& prov) {
  json doc;
  doc["digest"] = prov.digest;
  doc["sellmeier"] = prov.sellmeier;
  doc["scheme"] = std::string(to_string(r.scheme));
  doc["config"] = {{"pump_um", r.cfg.pump_um},
                   {"signal_um", r.cfg.signal_um},
                   {"idler_um", r.cfg.idler_um},
                   {"signal_axis", std::string(to_string(r.cfg.signal_axis))},
                   {"idler_axis", std::string(to_string(r.cfg.idler_axis))},
                   {"length_m", r.cfg.length_m}};
  doc["gvm"] = {{"theta_deg", r.gvm.theta_deg},
                {"delta_k0", r.gvm.delta_k0},
                {"coherence_length_m", r.gvm.coherence_length}};
  doc["alpha"] = r.alpha;
  doc["beta"] = r.beta;
  doc["tracking_cost"] = r.tracking_cost;
  doc["pump_fwhm_nm"] = r.pump_fwhm_nm;
  doc["pump_sigma"] = r.pump_sigma;
  doc["bandwidth"] = r.bandwidth;
  doc["purity"] = r.purity;
  doc["meets_threshold"] = r.meets_threshold;
  json history = json::array();
  for (const auto& s : r.history)
    history.push_back({{"beta", s.beta},
                       {"alpha", s.alpha},
                       {"tracking_cost", s.tracking_cost},
                       {"purity", s.purity},
                       {"pump_fwhm_nm", s.pump_fwhm_nm}});
  doc["history"] = history;
  if (auto* d = std::get_if<DomainArray>(&r.structure)) {
    std::string signs;
    signs.reserve(d->size());
    for (auto s : d->signs()) signs.push_back(s > 0 ? '+' : '-');
    doc["structure"] = {{"type", "domains"}, {"width_m", d->width()}, {"signs", signs}};
  } else {
    json segs = json::array();
    for (const auto& s : std::get<SegmentStructure>(r.structure).segments)
      segs.push_back({s.start, s.end, s.sign});
    doc["structure"] = {{"type", "segments"}, {"segments", segs}};
  }
  if (!r.duty.empty()) doc["duty"] = r.duty;
  return doc;
}

DesignResult design_from_json(const json& doc, const DispersionModel& model) {
  try {
    DesignResult r;
    r.scheme = parse_scheme(doc.at("scheme").get<std::string>());
    const auto& c = doc.at("config");
    r.cfg = PhaseMatchConfig::make(c.at("pump_um").get<double>(), c.at("signal_um").get<double>(),
                                   parse_axis(c.at("signal_axis").get<std::string>()),
                                   c.at("length_m").get<double>(), model);
    r.gvm = phase_mismatch_and_lc(r.cfg, model);
    r.alpha = doc.at("alpha").get<double>();
    r.beta = doc.at("beta").get<double>();
    r.tracking_cost = doc.at("tracking_cost").get<double>();
    r.pump_fwhm_nm = doc.at("pump_fwhm_nm").get<double>();
    r.pump_sigma = doc.at("pump_sigma").get<double>();
    r.bandwidth = doc.at("bandwidth").get<double>();
    r.purity = doc.at("purity").get<double>();
    r.meets_threshold = doc.at("meets_threshold").get<bool>();
    for (const auto& s : doc.at("history"))
      r.history.push_back({s.at("beta").get<double>(), s.at("alpha").get<double>(),
                           s.at("tracking_cost").get<double>(), s.at("purity").get<double>(),
                           s.at("pump_fwhm_nm").get<double>()});
    const auto& st = doc.at("structure");
    if (st.at("type") == "domains") {
      const auto text = st.at("signs").get<std::string>();
      std::vector<std::int8_t> signs;
      signs.reserve(text.size());
      for (char ch : text) signs.push_back(ch == '+' ? 1 : -1);
      r.structure = DomainArray(st.at("width_m").get<double>(), std::move(signs));
    } else {
      SegmentStructure seg;
      for (const auto& s : st.at("segments"))
        seg.segments.push_back({s.at(0).get<double>(), s.at(1).get<double>(), s.at(2).get<int>()});
      r.structure = std::move(seg);
    }
    if (doc.contains("duty")) r.duty = doc.at("duty").get<std::vector<double>>();
    return r;
  } catch (const json::exception& e) {
    throw InvalidConfig(std::string("malformed design file: ") + e.what());
  }
}

DesignResult load_design(const fs::path& file, const DispersionModel& model) {
  std::ifstream in(file);
  if (!in) throw InvalidConfig("design-file: cannot open " + file.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw InvalidConfig("design-file: " + std::string(e.what()));
  }
  return design_from_json(doc, model);
}

}  // namespace ktp
