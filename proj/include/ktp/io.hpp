#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ktp/analysis.hpp"
#include "ktp/design.hpp"
#include "ktp/gvm.hpp"

#include <json.hpp>

namespace ktp {

/// Stamped into every artifact so a file can be traced back to its run.
struct RunStamp {
  std::string digest;     // 16 hex chars
  std::string sellmeier;  // dispersion set name
};

/// Shortest text that round-trips the double.
std::string format_double(double value);

// GVM maps. The long form has one row per cell; the matrices are pump rows x
// signal columns with NA in masked cells.
void write_gvm_csv(const std::filesystem::path& file, const GvmMap& map, const RunStamp& prov);
void write_gvm_matrices(const std::filesystem::path& dir, const GvmMap& map,
                        const RunStamp& prov);

/// One line per domain: start (µm), width (µm), sign.
void write_poling(const std::filesystem::path& file, const DesignResult& result,
                  const RunStamp& prov);

/// |f| with the signal and idler wavelength axes (nm) as header rows.
void write_jsa_csv(const std::filesystem::path& file, const JointSpectrum& jsa,
                   const RunStamp& prov);

/// Little-endian binary:
///   "KTPJSA01" | u64 rows | u64 cols | f64 ws_min ws_max wi_min wi_max |
///   16 bytes digest | u32 name length | name | rows*cols (re, im) f64 pairs, row-major.
void write_jsa_binary(const std::filesystem::path& file, const JointSpectrum& jsa,
                      const RunStamp& prov);

struct JsaBinary {
  double signal_min = 0.0, signal_max = 0.0, idler_min = 0.0, idler_max = 0.0;
  RunStamp prov;
  Eigen::MatrixXcd amplitude;
};
JsaBinary read_jsa_binary(const std::filesystem::path& file);

void write_schmidt_csv(const std::filesystem::path& file, const SchmidtSpectrum& spectrum,
                       const RunStamp& prov);

/// Long-form curves: R_over_dw, purity, scheme, masked_fraction.
void write_range_curves(const std::filesystem::path& file,
                        const std::vector<RangeSweepCurve>& curves, const RunStamp& prov);

nlohmann::json design_to_json(const DesignResult& result, const RunStamp& prov);
/// Inverse of design_to_json. Throws InvalidConfig on malformed input.
DesignResult design_from_json(const nlohmann::json& doc, const DispersionModel& model);
DesignResult load_design(const std::filesystem::path& file, const DispersionModel& model);

void write_text(const std::filesystem::path& file, const std::string& text);

}  // namespace ktp
