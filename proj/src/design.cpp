#include "ktp/design.hpp"

#include <algorithm>

#include "ktp/errors.hpp"

namespace ktp {

std::string_view to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::PP: return "pp";
    case Scheme::ClScl: return "cl-scl";
    case Scheme::Mqpm: return "mqpm";
    case Scheme::Dc: return "dc";
  }
  return "?";
}

Scheme parse_scheme(std::string_view text) {
  if (text == "pp") return Scheme::PP;
  if (text == "cl-scl" || text == "cl" || text == "scl") return Scheme::ClScl;
  if (text == "mqpm") return Scheme::Mqpm;
  if (text == "dc") return Scheme::Dc;
  throw InvalidConfig("unknown scheme '" + std::string(text) + "' (pp, cl-scl, mqpm, dc)");
}

namespace {

DesignResult base_result(Scheme scheme, const PhaseMatchConfig& cfg, const DispersionModel& model) {
  DesignResult r;
  r.scheme = scheme;
  r.cfg = cfg;
  r.gvm = phase_mismatch_and_lc(cfg, model);
  return r;
}

void apply_pump(DesignResult& r, const PumpOptimum& opt, double threshold) {
  r.pump_fwhm_nm = opt.fwhm_nm;
  r.pump_sigma = opt.sigma;
  r.bandwidth = opt.bandwidth;
  r.purity = opt.purity;
  r.meets_threshold = opt.purity >= threshold;
}

}  // namespace

DesignResult design_cl_scl(const PhaseMatchConfig& cfg, const DispersionModel& model,
                           const DesignOptions& options) {
  DesignResult best = base_result(Scheme::ClScl, cfg, model);
  best.purity = -1.0;
  const double lc = best.gvm.coherence_length;
  const double theta = best.gvm.theta_deg;
  std::vector<DesignStep> history;

  for (double beta : options.beta_ladder) {
    if (lc / beta < kMinFabricableWidth) break;
    std::vector<TrackingRun> runs(static_cast<std::size_t>(options.alpha_steps));
    parallel_for(runs.size(), options.jsa.exec, [&](std::size_t k) {
      const double alpha = options.alpha_min + options.alpha_step * static_cast<double>(k);
      runs[k] = greedy_track(TargetProfile::from_alpha(alpha, cfg.length_m, best.gvm.delta_k0),
                             beta, lc, cfg.length_m);
    });
    std::size_t pick = 0;
    for (std::size_t k = 1; k < runs.size(); ++k)
      if (runs[k].final_cost < runs[pick].final_cost) pick = k;
    const double alpha = options.alpha_min + options.alpha_step * static_cast<double>(pick);

    DesignStep step{beta, alpha, runs[pick].final_cost, 0.0, 0.0};
    PumpOptimum opt;
    try {
      opt = optimize_pump_bandwidth(cfg, model, runs[pick].domains, theta, options.pump_search,
                                    options.jsa);
    } catch (const NoInteriorMaximum&) {
      history.push_back(step);
      continue;
    }
    step.purity = opt.purity;
    step.pump_fwhm_nm = opt.fwhm_nm;
    history.push_back(step);

    if (opt.purity > best.purity) {
      best.structure = runs[pick].domains;
      best.alpha = alpha;
      best.beta = beta;
      best.tracking_cost = runs[pick].final_cost;
      apply_pump(best, opt, options.purity_threshold);
    }
    if (opt.purity >= options.purity_threshold) break;
  }
  if (best.purity < 0.0) throw DomainTooNarrow("no beta on the ladder gives domains >= 1 um");
  best.history = std::move(history);
  return best;
}

DesignResult design_pp(const PhaseMatchConfig& cfg, const DispersionModel& model,
                       const DesignOptions& options) {
  DesignResult r = base_result(Scheme::PP, cfg, model);
  const auto domains = periodic_domains(cfg.length_m, r.gvm.coherence_length);
  r.structure = domains;
  apply_pump(r, optimize_pump_bandwidth(cfg, model, domains, r.gvm.theta_deg, options.pump_search,
                                        options.jsa),
             options.purity_threshold);
  return r;
}

DesignResult design_mqpm(const PhaseMatchConfig& cfg, const DispersionModel& model, double alpha,
                         const std::vector<int>& orders, const DesignOptions& options) {
  DesignResult r = base_result(Scheme::Mqpm, cfg, model);
  r.alpha = alpha;
  const auto profile = TargetProfile::from_alpha(alpha, cfg.length_m, r.gvm.delta_k0);
  const auto domains = mqpm_domains(cfg.length_m, r.gvm.coherence_length, orders, profile);
  r.structure = domains;
  apply_pump(r, optimize_pump_bandwidth(cfg, model, domains, r.gvm.theta_deg, options.pump_search,
                                        options.jsa),
             options.purity_threshold);
  return r;
}

DesignResult design_dc(const PhaseMatchConfig& cfg, const DispersionModel& model,
                       const PsoParams& pso, std::uint64_t seed, bool* budget_exhausted,
                       const DesignOptions& options) {
  DesignResult r = base_result(Scheme::Dc, cfg, model);
  r.alpha = pso.alpha;
  const double lc = r.gvm.coherence_length;
  const auto start = dc_domains(cfg.length_m, lc, erf_duty_profile(cfg.length_m, lc, pso.alpha));
  const auto opt = optimize_pump_bandwidth(cfg, model, start.structure, r.gvm.theta_deg,
                                           options.pump_search, options.jsa);
  const auto pump = PumpSpec::from_sigma(cfg.pump_um, opt.sigma);
  const auto dc = pso_optimize_dc(cfg, model, pump, r.gvm.theta_deg, pso, seed, std::nullopt,
                                  options.jsa);
  r.structure = dc.dc.structure;
  r.duty = dc.dc.duty;
  r.pump_fwhm_nm = opt.fwhm_nm;
  r.pump_sigma = opt.sigma;
  r.bandwidth = dc.bandwidth;
  r.purity = dc.purity;
  r.meets_threshold = dc.purity >= options.purity_threshold;
  if (budget_exhausted) *budget_exhausted = dc.budget_exhausted;
  return r;
}

JointSpectrum rebuild_jsa(const DesignResult& result, const DispersionModel& model,
                          double range_mult, const JsaOptions& options) {
  const auto grid = make_grid(result.gvm.theta_deg, result.bandwidth, range_mult, result.cfg);
  return build_jsa(result.cfg, model, result.structure, result.pump(), grid, PmfScheme::Piecewise,
                   options);
}

}  // namespace ktp
