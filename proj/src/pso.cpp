#include "ktp/pso.hpp"

#include <algorithm>
#include <random>

#include "ktp/errors.hpp"

namespace ktp {

namespace {

double reflect(double x, double lo, double hi, double& v) {
  for (int guard = 0; guard < 8 && (x < lo || x > hi); ++guard) {
    if (x < lo) x = 2.0 * lo - x;
    if (x > hi) x = 2.0 * hi - x;
    v = -v;
  }
  return std::clamp(x, lo, hi);
}

}  // namespace

DcDesign pso_optimize_dc(const PhaseMatchConfig& cfg, const DispersionModel& model,
                         const PumpSpec& pump, double theta_deg, const PsoParams& params,
                         std::uint64_t seed, const std::optional<std::vector<double>>& initial,
                         const JsaOptions& options) {
  if (params.particles < 1 || params.iterations < 0 || params.eval_points < 4)
    throw InvalidConfig("PSO needs >= 1 particle, >= 0 iterations and >= 4 grid points");
  const GvmPoint gvm = phase_mismatch_and_lc(cfg, model);
  const double lc = gvm.coherence_length;
  const double lo = params.min_duty, hi = 1.0 - params.min_duty;

  std::vector<double> start =
      initial ? *initial : erf_duty_profile(cfg.length_m, lc, params.alpha);
  const std::size_t dim = start.size();
  if (dim != duty_period_count(cfg.length_m, lc))
    throw DutyOutOfRange("initial duty profile has the wrong number of periods");
  for (double& d : start) d = std::clamp(d, lo, hi);

  // Fixed coarse objective grid, sized from the starting structure.
  const PolingStructure start_structure = dc_domains(cfg.length_m, lc, start).structure;
  const double coarse_bw = measure_bandwidth(cfg, model, start_structure, pump, theta_deg, options);
  const auto coarse_grid =
      make_grid_with_divisor(params.eval_points / 10.0, coarse_bw, 10.0, cfg);
  JsaOptions serial = options;
  serial.exec.threads = 1;
  auto objective = [&](const std::vector<double>& duty) {
    const PolingStructure s = dc_domains(cfg.length_m, lc, duty).structure;
    const auto jsa = build_jsa(cfg, model, s, pump, coarse_grid, PmfScheme::Piecewise, serial);
    return purity_from_gram(jsa.amplitude);
  };

  DcDesign out;
  out.seed = seed;
  if (params.iterations == 0) {
    out.dc = dc_domains(cfg.length_m, lc, start);
    out.coarse_purity = objective(start);
    out.budget_exhausted = true;
    const auto ev = evaluate_source(cfg, model, PolingStructure{out.dc.structure}, pump,
                                    theta_deg, 10.0, options);
    out.purity = ev.purity;
    out.bandwidth = ev.bandwidth;
    return out;
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> scatter(0.0, params.init_spread);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const auto np = static_cast<std::size_t>(params.particles);
  std::vector<std::vector<double>> pos(np, start), vel(np, std::vector<double>(dim, 0.0));
  for (std::size_t p = 1; p < np; ++p)
    for (std::size_t k = 0; k < dim; ++k) {
      pos[p][k] = std::clamp(start[k] + scatter(rng), lo, hi);
      vel[p][k] = scatter(rng);
    }

  std::vector<double> score(np);
  auto evaluate_all = [&] {
    parallel_for(np, options.exec, [&](std::size_t p) { score[p] = objective(pos[p]); });
  };
  evaluate_all();
  auto best_pos = pos;
  auto best_score = score;
  std::size_t leader = static_cast<std::size_t>(
      std::max_element(best_score.begin(), best_score.end()) - best_score.begin());

  int stale = 0;
  bool converged = false;
  for (int it = 0; it < params.iterations; ++it) {
    const std::vector<double> global = best_pos[leader];
    for (std::size_t p = 0; p < np; ++p)
      for (std::size_t k = 0; k < dim; ++k) {
        const double r1 = unit(rng), r2 = unit(rng);
        double& v = vel[p][k];
        v = params.inertia * v + params.cognitive * r1 * (best_pos[p][k] - pos[p][k]) +
            params.social * r2 * (global[k] - pos[p][k]);
        pos[p][k] = reflect(pos[p][k] + v, lo, hi, v);
      }
    evaluate_all();
    const double before = best_score[leader];
    for (std::size_t p = 0; p < np; ++p)
      if (score[p] > best_score[p]) {
        best_score[p] = score[p];
        best_pos[p] = pos[p];
      }
    leader = static_cast<std::size_t>(
        std::max_element(best_score.begin(), best_score.end()) - best_score.begin());
    out.iterations_run = it + 1;
    stale = best_score[leader] - before > params.improvement_tol ? 0 : stale + 1;
    if (params.patience > 0 && stale >= params.patience) {
      converged = true;
      break;
    }
  }
  out.budget_exhausted = !converged;
  out.coarse_purity = best_score[leader];
  out.dc = dc_domains(cfg.length_m, lc, best_pos[leader]);
  const auto ev = evaluate_source(cfg, model, PolingStructure{out.dc.structure}, pump, theta_deg,
                                  10.0, options);
  out.purity = ev.purity;
  out.bandwidth = ev.bandwidth;
  return out;
}

}  // namespace ktp
