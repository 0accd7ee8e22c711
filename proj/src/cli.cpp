#include "ktp/cli.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "ktp/design.hpp"
#include "ktp/errors.hpp"
#include "ktp/io.hpp"

namespace ktp::cli {

namespace fs = std::filesystem;

namespace {

std::string quote(const std::string& s) { return "\"" + s + "\""; }

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto a = item.find_first_not_of(" \t");
    const auto b = item.find_last_not_of(" \t");
    if (a != std::string::npos) parts.push_back(item.substr(a, b - a + 1));
  }
  return parts;
}

template <typename T>
std::vector<T> parse_list(const std::string& text, const std::string& key) {
  std::vector<T> values;
  for (const auto& part : split(text)) {
    try {
      std::size_t used = 0;
      T v;
      if constexpr (std::is_same_v<T, int>) v = std::stoi(part, &used);
      else v = std::stod(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
      values.push_back(v);
    } catch (const std::logic_error&) {
      throw InvalidConfig(key + ": cannot parse '" + part + "'");
    }
  }
  if (values.empty()) throw InvalidConfig(key + ": empty list");
  return values;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Context {
  DispersionModel model;
  RunStamp prov;
  Execution exec;
  fs::path out_dir;
};

Context make_context(const RunConfig& c) {
  auto model = DispersionModel::resolve(c.sellmeier);
  RunStamp prov{digest(c, model), model.name()};
  fs::path out = c.out_dir;
  fs::create_directories(out);
  write_text(out / "run_config.txt", "# digest " + prov.digest + "\n" + c.serialize());
  return {std::move(model), std::move(prov), Execution{c.threads}, out};
}

PhaseMatchConfig phase_match(const RunConfig& c, const DispersionModel& model) {
  if (c.pump_nm <= 0) throw InvalidConfig("pump-nm: missing or non-positive (or use --preset)");
  if (c.signal_nm <= 0) throw InvalidConfig("signal-nm: missing or non-positive");
  if (c.length_mm <= 0) throw InvalidConfig("length-mm: must be positive");
  Axis axis;
  try {
    axis = parse_axis(c.signal_axis);
  } catch (const Error&) {
    throw InvalidConfig("signal-axis: expected Y or Z, got '" + c.signal_axis + "'");
  }
  try {
    return PhaseMatchConfig::make(c.pump_nm * 1e-3, c.signal_nm * 1e-3, axis, c.length_mm * 1e-3,
                                  model);
  } catch (const Error& e) {
    throw InvalidConfig(std::string("pump-nm/signal-nm: ") + e.what());
  }
}

DesignOptions design_options(const RunConfig& c, const Context& ctx) {
  DesignOptions opts;
  opts.jsa.exec = ctx.exec;
  if (!(c.threshold > 0.0 && c.threshold <= 1.0)) throw InvalidConfig("threshold: must be in (0, 1]");
  opts.purity_threshold = c.threshold;
  opts.beta_ladder = parse_list<double>(c.beta_list, "beta-list");
  for (double b : opts.beta_ladder)
    if (!(b >= 1.0)) throw InvalidConfig("beta-list: values must be >= 1");
  return opts;
}

PsoParams pso_params(const RunConfig& c) {
  if (c.pso_particles < 1) throw InvalidConfig("pso-particles: must be >= 1");
  if (c.pso_iterations < 0) throw InvalidConfig("pso-iterations: must be >= 0");
  PsoParams p;
  p.particles = c.pso_particles;
  p.iterations = c.pso_iterations;
  p.alpha = c.alpha;
  return p;
}

DesignResult run_scheme(Scheme scheme, const RunConfig& c, const PhaseMatchConfig& cfg,
                        const Context& ctx) {
  const auto opts = design_options(c, ctx);
  switch (scheme) {
    case Scheme::PP: return design_pp(cfg, ctx.model, opts);
    case Scheme::ClScl: return design_cl_scl(cfg, ctx.model, opts);
    case Scheme::Mqpm:
      return design_mqpm(cfg, ctx.model, c.alpha, parse_list<int>(c.orders, "orders"), opts);
    case Scheme::Dc: return design_dc(cfg, ctx.model, pso_params(c), c.seed, nullptr, opts);
  }
  throw InvalidConfig("scheme");
}

Scheme scheme_of(const std::string& text, const std::string& key) {
  try {
    return parse_scheme(text);
  } catch (const Error& e) {
    throw InvalidConfig(key + ": " + e.what());
  }
}

void check_range(double start, double stop, double step, const std::string& prefix) {
  if (step <= 0) throw InvalidConfig(prefix + "-step-nm: must be positive");
  if (stop < start) throw InvalidConfig(prefix + "-stop-nm: below " + prefix + "-start-nm");
}

}  // namespace

std::string RunConfig::serialize() const {
  std::ostringstream out;
  auto num = [](double v) { return format_double(v); };
  out << "command=" << quote(command) << "\n"
      << "preset=" << quote(preset) << "\n"
      << "pump-nm=" << num(pump_nm) << "\n"
      << "signal-nm=" << num(signal_nm) << "\n"
      << "signal-axis=" << quote(signal_axis) << "\n"
      << "length-mm=" << num(length_mm) << "\n"
      << "scheme=" << quote(scheme) << "\n"
      << "schemes=" << quote(schemes) << "\n"
      << "r-mult=" << num(r_mult) << "\n"
      << "r-list=" << quote(r_list) << "\n"
      << "step-divisor=" << num(step_divisor) << "\n"
      << "alpha=" << num(alpha) << "\n"
      << "threshold=" << num(threshold) << "\n"
      << "beta-list=" << quote(beta_list) << "\n"
      << "orders=" << quote(orders) << "\n"
      << "seed=" << seed << "\n"
      << "pso-particles=" << pso_particles << "\n"
      << "pso-iterations=" << pso_iterations << "\n"
      << "heralding=" << (heralding ? "true" : "false") << "\n"
      << "design-file=" << quote(design_file) << "\n"
      << "pump-start-nm=" << num(pump_start_nm) << "\n"
      << "pump-stop-nm=" << num(pump_stop_nm) << "\n"
      << "pump-step-nm=" << num(pump_step_nm) << "\n"
      << "signal-start-nm=" << num(signal_start_nm) << "\n"
      << "signal-stop-nm=" << num(signal_stop_nm) << "\n"
      << "signal-step-nm=" << num(signal_step_nm) << "\n"
      << "sellmeier=" << quote(sellmeier) << "\n"
      << "out-dir=" << quote(out_dir) << "\n"
      << "threads=" << threads << "\n";
  return out.str();
}

std::string digest(const RunConfig& config, const DispersionModel& model) {
  RunConfig c = config;
  c.out_dir.clear();
  c.threads = 0;
  const std::string text = c.serialize() + model.serialize();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

const std::vector<Preset>& presets() {
  static const std::vector<Preset> table{
      {"o-band-i", 710.0, 1310.0, Axis::Z},    {"o-band-ii", 626.3, 1310.0, Axis::Z},
      {"o-band-iii", 655.0, 1310.0, Axis::Z},  {"o-band-iv", 779.5, 1310.0, Axis::Z},
      {"o-band-v", 887.3, 1310.0, Axis::Z},    {"o-band-vi", 710.0, 1310.0, Axis::Y},
      {"o-band-vii", 603.8, 1310.0, Axis::Y},  {"o-band-viii", 787.8, 1310.0, Axis::Y},
      {"c-band-ix", 643.4, 1550.0, Axis::Z},   {"c-band-x", 775.0, 1550.0, Axis::Z},
      {"c-band-xi", 797.7, 1550.0, Axis::Z},   {"c-band-xii", 971.1, 1550.0, Axis::Z},
      {"c-band-xiii", 569.4, 1550.0, Axis::Y}, {"c-band-xiv", 799.2, 1550.0, Axis::Y},
  };
  return table;
}

std::optional<Preset> find_preset(const std::string& name) {
  for (const auto& p : presets())
    if (p.name == name) return p;
  return std::nullopt;
}

int run_gvm_map(const RunConfig& c, std::ostream& out) {
  check_range(c.pump_start_nm, c.pump_stop_nm, c.pump_step_nm, "pump");
  check_range(c.signal_start_nm, c.signal_stop_nm, c.signal_step_nm, "signal");
  Axis axis;
  try {
    axis = parse_axis(c.signal_axis);
  } catch (const Error&) {
    throw InvalidConfig("signal-axis: expected Y or Z, got '" + c.signal_axis + "'");
  }
  const auto ctx = make_context(c);
  const ScanRange pump{c.pump_start_nm * 1e-3, c.pump_stop_nm * 1e-3, c.pump_step_nm * 1e-3};
  const ScanRange signal{c.signal_start_nm * 1e-3, c.signal_stop_nm * 1e-3,
                         c.signal_step_nm * 1e-3};
  const auto map = gvm_map(pump, signal, axis, ctx.model, c.length_mm * 1e-3, ctx.exec);
  write_gvm_csv(ctx.out_dir / "gvm_map.csv", map, ctx.prov);
  write_gvm_matrices(ctx.out_dir, map, ctx.prov);

  GvmMap line = map;
  line.cells = map.degenerate_line(ctx.model);
  write_gvm_csv(ctx.out_dir / "degenerate_line.csv", line, ctx.prov);

  std::size_t kept = 0;
  for (const auto& cell : map.cells) kept += cell.theta_deg.has_value();
  out << "gvm-map " << pump.count() << " x " << signal.count() << " cells, " << kept
      << " with 0 <= theta <= 90 -> " << ctx.out_dir.string() << "\n";
  return 0;
}

int run_design(const RunConfig& c, std::ostream& out) {
  const auto scheme = scheme_of(c.scheme, "scheme");
  if (c.r_mult <= 0) throw InvalidConfig("r-mult: must be positive");
  if (c.step_divisor < 0) throw InvalidConfig("step-divisor: must be >= 0");
  auto ctx = make_context(c);
  const auto cfg = phase_match(c, ctx.model);

  const auto result = run_scheme(scheme, c, cfg, ctx);
  const double p_pp =
      scheme == Scheme::PP ? result.purity : design_pp(cfg, ctx.model, design_options(c, ctx)).purity;

  JsaOptions jopts;
  jopts.exec = ctx.exec;
  const auto grid =
      c.step_divisor > 0
          ? make_grid_with_divisor(c.step_divisor, result.bandwidth, c.r_mult, cfg)
          : make_grid(result.gvm.theta_deg, result.bandwidth, c.r_mult, cfg);
  const auto jsa = build_jsa(cfg, ctx.model, result.structure, result.pump(), grid,
                             PmfScheme::Piecewise, jopts);
  const auto schmidt = schmidt_decompose(jsa);
  const double p_grid = purity(schmidt);

  std::optional<double> eta;
  if (c.heralding)
    eta = heralding_efficiency_for_source(cfg, ctx.model, result.structure, result.pump(),
                                          result.gvm.theta_deg, result.bandwidth, c.r_mult, 7.0,
                                          jopts);

  auto doc = design_to_json(result, ctx.prov);
  doc["purity_pp"] = p_pp;
  doc["export_grid"] = {{"range_mult", c.r_mult},
                        {"step_divisor", grid.step_divisor},
                        {"count", grid.count},
                        {"purity", p_grid},
                        {"masked_fraction", jsa.masked_fraction()}};
  if (eta) doc["heralding_efficiency"] = *eta;
  write_text(ctx.out_dir / "design.json", doc.dump(2) + "\n");
  write_poling(ctx.out_dir / "poling.txt", result, ctx.prov);
  write_jsa_csv(ctx.out_dir / "jsa.csv", jsa, ctx.prov);
  write_jsa_binary(ctx.out_dir / "jsa.bin", jsa, ctx.prov);
  write_schmidt_csv(ctx.out_dir / "schmidt.csv", schmidt, ctx.prov);

  std::ostringstream row;
  row << fmt("%.1f", cfg.pump_um * 1e3) << " -> " << fmt("%.0f", cfg.signal_um * 1e3) << " + "
      << fmt("%.0f", cfg.idler_um * 1e3) << " | theta " << fmt("%.1f", result.gvm.theta_deg)
      << " | lc " << fmt("%.2f", result.gvm.coherence_length * 1e6) << " um | alpha "
      << fmt("%.1f", result.alpha) << " | beta " << format_double(result.beta) << " | dlp "
      << fmt("%.2f", result.pump_fwhm_nm) << " nm | P_PP " << fmt("%.2f", 100 * p_pp)
      << "% | P_opt " << fmt("%.2f", 100 * result.purity) << "%";

  std::ostringstream summary;
  summary << "# digest " << ctx.prov.digest << "\n# sellmeier " << ctx.prov.sellmeier << "\n"
          << "scheme " << to_string(scheme) << "\n"
          << "signal_axis " << to_string(cfg.signal_axis) << "\n"
          << "length_mm " << format_double(cfg.length_m * 1e3) << "\n"
          << row.str() << "\n"
          << "purity_export_grid " << fmt("%.6f", p_grid) << " (R " << format_double(c.r_mult)
          << ", " << grid.count << " x " << grid.count << ")\n"
          << "meets_threshold " << (result.meets_threshold ? "yes" : "no") << "\n";
  if (eta) summary << "heralding_efficiency " << fmt("%.6f", *eta) << "\n";
  for (const auto& s : result.history)
    summary << "step beta " << format_double(s.beta) << " alpha " << fmt("%.1f", s.alpha)
            << " cost " << fmt("%.4e", s.tracking_cost) << " purity " << fmt("%.6f", s.purity)
            << " dlp_nm " << fmt("%.3f", s.pump_fwhm_nm) << "\n";
  write_text(ctx.out_dir / "design.txt", summary.str());

  out << row.str() << "\n";
  if (scheme == Scheme::ClScl && !result.meets_threshold) {
    out << "design loop exhausted the beta ladder below the purity threshold; best result written\n";
    return 3;
  }
  return 0;
}

int run_sweep_range(const RunConfig& c, std::ostream& out) {
  auto ranges = parse_list<double>(c.r_list, "r-list");
  for (double r : ranges)
    if (r <= 0) throw InvalidConfig("r-list: values must be positive");
  auto ctx = make_context(c);
  JsaOptions jopts;
  jopts.exec = ctx.exec;

  std::vector<DesignResult> designs;
  if (!c.design_file.empty()) {
    for (const auto& file : split(c.design_file)) {
      if (!fs::exists(file)) throw InvalidConfig("design-file: no such file '" + file + "'");
      designs.push_back(load_design(file, ctx.model));
    }
  } else {
    const auto cfg = phase_match(c, ctx.model);
    for (const auto& name : split(c.schemes))
      designs.push_back(run_scheme(scheme_of(name, "schemes"), c, cfg, ctx));
    if (designs.empty()) throw InvalidConfig("schemes: empty list");
  }

  std::vector<RangeSweepCurve> curves;
  for (const auto& d : designs) {
    curves.push_back(purity_vs_range(d.cfg, ctx.model, d.structure, d.pump(), ranges,
                                     d.gvm.theta_deg, d.bandwidth, std::string(to_string(d.scheme)),
                                     jopts));
    write_range_curves(ctx.out_dir / ("range_" + curves.back().scheme + ".csv"), {curves.back()},
                       ctx.prov);
  }
  write_range_curves(ctx.out_dir / "range_curves.csv", curves, ctx.prov);

  std::ostringstream cross;
  cross << "# digest " << ctx.prov.digest << "\n# sellmeier " << ctx.prov.sellmeier << "\n";
  for (std::size_t a = 0; a < curves.size(); ++a)
    for (std::size_t b = a + 1; b < curves.size(); ++b) {
      const double r = crossover_range(curves[a], curves[b]);
      cross << curves[a].scheme << ' ' << curves[b].scheme << ' '
            << (r < 0 ? std::string("none") : fmt("%.3f", r)) << "\n";
    }
  write_text(ctx.out_dir / "crossover.txt", cross.str());

  for (const auto& curve : curves) {
    out << curve.scheme;
    for (const auto& p : curve.points)
      out << "  R=" << format_double(p.range_mult) << ':' << fmt("%.4f", p.purity);
    out << "\n";
  }
  out << cross.str().substr(cross.str().find('\n', cross.str().find('\n') + 1) + 1);
  return 0;
}

int main(int argc, char** argv) {
  CLI::App app{"KTP poling designer for pure heralded single photons"};
  app.set_config("--config", "", "key = value file mirroring the flags");
  app.require_subcommand(0, 1);
  app.fallthrough();

  RunConfig c;
  app.add_option("--command", c.command, "subcommand to run when none is given")->group("");
  auto* preset_opt = app.add_option("--preset", c.preset, "named case (o-band-i .. c-band-xiv)");
  auto* pump_opt = app.add_option("--pump-nm", c.pump_nm, "pump wavelength");
  auto* signal_opt = app.add_option("--signal-nm", c.signal_nm, "signal wavelength");
  auto* axis_opt = app.add_option("--signal-axis", c.signal_axis, "signal polarization, Y or Z");
  app.add_option("--length-mm", c.length_mm, "crystal length");
  app.add_option("--scheme", c.scheme, "pp, cl-scl, mqpm or dc");
  app.add_option("--schemes", c.schemes, "comma list for sweep-range");
  app.add_option("--r-mult", c.r_mult, "spectral range of exported grids, units of delta-omega");
  app.add_option("--r-list", c.r_list, "comma list of R values for sweep-range");
  app.add_option("--step-divisor", c.step_divisor, "grid step = delta-omega / divisor (0: rule)");
  app.add_option("--alpha", c.alpha, "Gaussian width for mqpm / dc start profile");
  app.add_option("--threshold", c.threshold, "purity target of the cl-scl design loop");
  app.add_option("--beta-list", c.beta_list, "comma list of beta values tried in order");
  app.add_option("--orders", c.orders, "comma list of odd mqpm orders");
  app.add_option("--seed", c.seed, "PSO seed");
  app.add_option("--pso-particles", c.pso_particles);
  app.add_option("--pso-iterations", c.pso_iterations);
  app.add_flag("--heralding", c.heralding, "also compute the spectral heralding efficiency");
  app.add_option("--design-file", c.design_file, "design.json input(s) for sweep-range");
  app.add_option("--pump-start-nm", c.pump_start_nm);
  app.add_option("--pump-stop-nm", c.pump_stop_nm);
  app.add_option("--pump-step-nm", c.pump_step_nm);
  app.add_option("--signal-start-nm", c.signal_start_nm);
  app.add_option("--signal-stop-nm", c.signal_stop_nm);
  app.add_option("--signal-step-nm", c.signal_step_nm);
  app.add_option("--sellmeier", c.sellmeier, "built-in set name or coefficient file");
  app.add_option("--out-dir", c.out_dir, "output directory");
  app.add_option("--threads", c.threads, "worker cap (0: all cores)");

  auto* gvm_cmd = app.add_subcommand("gvm-map", "GVM angle and coherence-length maps");
  auto* design_cmd = app.add_subcommand("design", "design one source and export it");
  auto* sweep_cmd = app.add_subcommand("sweep-range", "purity versus spectral range");
  for (auto* sub : {gvm_cmd, design_cmd, sweep_cmd}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (gvm_cmd->parsed()) c.command = "gvm-map";
  else if (design_cmd->parsed()) c.command = "design";
  else if (sweep_cmd->parsed()) c.command = "sweep-range";

  try {
    if (!c.preset.empty()) {
      const auto p = find_preset(c.preset);
      if (!p) throw InvalidConfig("preset: unknown case '" + c.preset + "'");
      if (pump_opt->count() == 0) c.pump_nm = p->pump_nm;
      if (signal_opt->count() == 0) c.signal_nm = p->signal_nm;
      if (axis_opt->count() == 0) c.signal_axis = std::string(to_string(p->signal_axis));
    }
    (void)preset_opt;
    if (c.command == "gvm-map") return run_gvm_map(c, std::cout);
    if (c.command == "design") return run_design(c, std::cout);
    if (c.command == "sweep-range") return run_sweep_range(c, std::cout);
    throw InvalidConfig("command: expected gvm-map, design or sweep-range");
  } catch (const InvalidConfig& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const EmptyRange& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace ktp::cli
