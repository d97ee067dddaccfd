#pragma once

#include <string>

// vendor/json.hpp (single header, on the include path via CMake).
#include <json.hpp>

#include "lambar/error.hpp"
#include "lambar/optimizer.hpp"
#include "lambar/sphere_oracle.hpp"
#include "lambar/spectral.hpp"

namespace lambar {

// CLI exit codes, one per failure class.
enum ExitCode {
  exit_ok = 0,
  exit_config = 2,
  exit_convergence = 3,
  exit_verification = 4,
  exit_internal = 5,
};

int exit_code_for(ErrorKind kind);

// Formats with 17 significant digits (round-trips a double exactly).
std::string format_double(double x);

nlohmann::json spectrum_to_json(const Spectrum& spectrum);
nlohmann::json index_report_to_json(const IndexReport& report);
nlohmann::json analytic_index_to_json(const AnalyticIndex& index);
nlohmann::json hersch_to_json(const HerschReport& report);
nlohmann::json ascent_to_json(const AscentResult& result);

void write_json(const nlohmann::json& j, const std::string& path);
void write_text(const std::string& text, const std::string& path);

// CSV payloads (17 significant digit values, header row included).
std::string density_csv(const Density& density);
std::string eigenmap_csv(const Eigenmap& map);

// One row per (m, k) pair in the ranges: sphere volume, map energy, the
// exponent root and the per-level index breakdown. Invalid pairs and the
// divergent-index regime are noted in place instead of erroring.
std::string oracle_table_csv(int m_min, int m_max, int k_min, int k_max);
struct IndexVerifyRow {
  int m, k, ell, multiplicity, analytic, numeric;
  bool agree;
};
std::string index_verify_csv(const std::vector<IndexVerifyRow>& rows);

}  // namespace lambar
