#pragma once

#include <string>
#include <vector>

#include "ktp/analysis.hpp"
#include "ktp/pso.hpp"

namespace ktp {

enum class Scheme { PP, ClScl, Mqpm, Dc };

std::string_view to_string(Scheme scheme);
Scheme parse_scheme(std::string_view text);

struct DesignOptions {
  std::vector<double> beta_ladder{1, 2, 3, 4, 5, 5.5, 6, 8, 10, 12, 15, 18, 25, 35, 50};
  double alpha_min = 4.0;
  int alpha_steps = 21;        // alpha_min + 0.1 k, k < alpha_steps
  double alpha_step = 0.1;
  double purity_threshold = 0.995;
  PumpSearch pump_search{};
  JsaOptions jsa{};
};

/// One (beta, best alpha) step of the design loop.
struct DesignStep {
  double beta = 0.0;
  double alpha = 0.0;
  double tracking_cost = 0.0;
  double purity = 0.0;
  double pump_fwhm_nm = 0.0;
};

/// A designed (or evaluated) source: the poling structure plus everything
/// needed to rebuild its joint spectrum.
struct DesignResult {
  Scheme scheme = Scheme::ClScl;
  PhaseMatchConfig cfg;
  GvmPoint gvm;
  PolingStructure structure;
  std::vector<double> duty;          // duty-cycle scheme only
  double alpha = 0.0;                // 0 when the scheme has no Gaussian target
  double beta = 1.0;
  double tracking_cost = 0.0;
  double pump_fwhm_nm = 0.0;
  double pump_sigma = 0.0;
  double bandwidth = 0.0;            // Delta-omega of the R = 10 grid
  double purity = 0.0;
  bool meets_threshold = false;
  std::vector<DesignStep> history;

  PumpSpec pump() const { return PumpSpec::from_sigma(cfg.pump_um, pump_sigma); }
};

/// CL/SCL design loop: for each beta on the ladder (until l_c / beta < 1 µm)
/// sweep alpha, keep the lowest-cost tracked array, optimize the pump and
/// stop at the first purity >= threshold. Otherwise returns the best result
/// with meets_threshold = false.
DesignResult design_cl_scl(const PhaseMatchConfig& cfg, const DispersionModel& model,
                           const DesignOptions& options = {});

/// Periodic poling evaluated at its own optimal pump bandwidth.
DesignResult design_pp(const PhaseMatchConfig& cfg, const DispersionModel& model,
                       const DesignOptions& options = {});

DesignResult design_mqpm(const PhaseMatchConfig& cfg, const DispersionModel& model, double alpha,
                         const std::vector<int>& orders, const DesignOptions& options = {});

/// Duty-cycle scheme: the pump is optimized for the erf start profile, then
/// the duty vector is optimized by PSO at that pump.
DesignResult design_dc(const PhaseMatchConfig& cfg, const DispersionModel& model,
                       const PsoParams& pso, std::uint64_t seed, bool* budget_exhausted = nullptr,
                       const DesignOptions& options = {});

/// Rebuilds the R = 10 joint spectrum from the stored fields.
JointSpectrum rebuild_jsa(const DesignResult& result, const DispersionModel& model,
                          double range_mult = 10.0, const JsaOptions& options = {});

}  // namespace ktp
