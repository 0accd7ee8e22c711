#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ktp/analysis.hpp"

namespace ktp {

/// Constriction-coefficient PSO settings.
struct PsoParams {
  int particles = 40;
  int iterations = 200;
  double inertia = 0.729;
  double cognitive = 1.49;
  double social = 1.49;
  double init_spread = 0.05;     // std-dev of the initial scatter around the start profile
  double min_duty = 1e-3;        // reflecting bounds [min_duty, 1 - min_duty]
  int patience = 25;             // iterations without improvement that count as converged
  double improvement_tol = 1e-7;
  int eval_points = 100;         // coarse evaluation grid per axis (R = 10 Delta-omega)
  double alpha = 5.0;            // width of the erf start profile
};

struct DcDesign {
  DutyCycleStructure dc;
  double coarse_purity = 0.0;    // objective on the coarse grid
  double purity = 0.0;           // re-scored on the standard grid
  double bandwidth = 0.0;        // Delta-omega of the standard re-score
  int iterations_run = 0;
  bool budget_exhausted = false;
  std::uint64_t seed = 0;
};

/// Maximizes purity over the per-period duty vector. Deterministic for a
/// given seed regardless of thread count. Without `initial` the swarm starts
/// around erf_duty_profile().
DcDesign pso_optimize_dc(const PhaseMatchConfig& cfg, const DispersionModel& model,
                         const PumpSpec& pump, double theta_deg, const PsoParams& params,
                         std::uint64_t seed,
                         const std::optional<std::vector<double>>& initial = std::nullopt,
                         const JsaOptions& options = {});

}  // namespace ktp
