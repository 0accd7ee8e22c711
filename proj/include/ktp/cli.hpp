#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ktp/dispersion.hpp"

namespace ktp::cli {

/// Everything a run depends on. serialize() writes the same key = value text
/// the --config option reads back, so a persisted run_config.txt replays it.
struct RunConfig {
  std::string command;  // gvm-map, design, sweep-range
  std::string preset;
  double pump_nm = 0.0;
  double signal_nm = 0.0;
  std::string signal_axis = "Z";
  double length_mm = 5.0;
  std::string scheme = "cl-scl";
  std::string schemes = "pp,cl-scl";     // sweep-range
  double r_mult = 10.0;
  std::string r_list = "2,5,10,15,20,25,30,35,40,50,60,70";
  double step_divisor = 0.0;             // 0: theta rule
  double alpha = 5.0;                    // mqpm target / dc start profile
  double threshold = 0.995;              // design loop purity target
  std::string beta_list = "1,2,3,4,5,5.5,6,8,10,12,15,18,25,35,50";
  std::string orders = "1,3,5,7,9,11";
  std::uint64_t seed = 1;
  int pso_particles = 40;
  int pso_iterations = 200;
  bool heralding = false;
  std::string design_file;               // sweep-range, comma separated
  double pump_start_nm = 500.0, pump_stop_nm = 1000.0, pump_step_nm = 5.0;
  double signal_start_nm = 1000.0, signal_stop_nm = 2200.0, signal_step_nm = 10.0;
  std::string sellmeier = "kato-takaoka-2002";
  std::string out_dir = "out";
  unsigned threads = 0;

  std::string serialize() const;
};

/// FNV-1a over the serialized config (minus out-dir and threads) and the
/// dispersion coefficients, as 16 hex digits.
std::string digest(const RunConfig& config, const DispersionModel& model);

struct Preset {
  std::string name;
  double pump_nm;
  double signal_nm;
  Axis signal_axis;
};

const std::vector<Preset>& presets();
std::optional<Preset> find_preset(const std::string& name);

int run_gvm_map(const RunConfig& config, std::ostream& out);
int run_design(const RunConfig& config, std::ostream& out);
int run_sweep_range(const RunConfig& config, std::ostream& out);

/// Entry point. Exit codes: 0 success, 2 config error, 3 design below threshold.
int main(int argc, char** argv);

}  // namespace ktp::cli
