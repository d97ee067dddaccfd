#include "lambar/report.hpp"

#include <cstdio>
#include <fstream>

namespace lambar {

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::config:
      return exit_config;
    case ErrorKind::convergence:
      return exit_convergence;
    case ErrorKind::verification:
      return exit_verification;
    case ErrorKind::internal:
      return exit_internal;
  }
  return exit_internal;
}

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

}  // namespace

nlohmann::json spectrum_to_json(const Spectrum& spectrum) {
  return {{"values", vector_to_json(spectrum.values)},
          {"residuals", vector_to_json(spectrum.residuals)},
          {"mass", spectrum.mass},
          {"cluster_tol", spectrum.cluster_tol}};
}

nlohmann::json index_report_to_json(const IndexReport& report) {
  return {{"negative_count", report.negative_count},
          {"cutoff_tol", report.cutoff_tol}};
}

nlohmann::json analytic_index_to_json(const AnalyticIndex& index) {
  nlohmann::json levels = nlohmann::json::array();
  for (const IndexLevel& level : index.levels)
    levels.push_back({{"ell", level.ell},
                      {"radial_count", level.radial_count},
                      {"multiplicity", level.multiplicity}});
  return {{"m", index.m},
          {"k", index.k},
          {"alpha", index.alpha},
          {"axis_branch", index.axis_branch},
          {"boundary_case", index.boundary_case},
          {"levels", levels},
          {"total", index.total}};
}

nlohmann::json hersch_to_json(const HerschReport& report) {
  return {{"p", vector_to_json(report.p)},
          {"com_residual", report.com_residual},
          {"rayleigh", vector_to_json(report.rayleigh)},
          {"bound", report.bound},
          {"mass", report.mass},
          {"coordinate_energy", report.coordinate_energy}};
}

nlohmann::json ascent_to_json(const AscentResult& result) {
  nlohmann::json hist = nlohmann::json::array();
  for (const AscentHistoryEntry& h : result.history)
    hist.push_back({{"iter", h.iter},
                    {"lambda_bar", h.lambda_bar},
                    {"certificate", h.certificate},
                    {"step", h.step},
                    {"cluster_size", h.cluster_size}});
  return {{"lambda_bar", result.lambda_bar},
          {"certificate", result.certificate},
          {"converged", result.converged},
          {"cap", result.rho.cap},
          {"spectrum", spectrum_to_json(result.spectrum)},
          {"history", hist}};
}

void write_text(const std::string& text, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::config, "cannot write " + path);
  out << text;
  if (!out) fail(ErrorKind::internal, "short write to " + path);
}

void write_json(const nlohmann::json& j, const std::string& path) {
  write_text(j.dump(2) + "\n", path);
}

std::string density_csv(const Density& density) {
  std::string out = "cell,rho\n";
  for (int c = 0; c < density.rho.size(); ++c)
    out += std::to_string(c) + "," + format_double(density.rho[c]) + "\n";
  return out;
}

std::string eigenmap_csv(const Eigenmap& map) {
  std::string out = "vertex,norm";
  for (int j = 0; j < map.components.cols(); ++j)
    out += ",c" + std::to_string(j);
  out += "\n";
  for (int v = 0; v < map.components.rows(); ++v) {
    out += std::to_string(v) + "," + format_double(map.pointwise_norm[v]);
    for (int j = 0; j < map.components.cols(); ++j)
      out += "," + format_double(map.components(v, j));
    out += "\n";
  }
  return out;
}

std::string oracle_table_csv(int m_min, int m_max, int k_min, int k_max) {
  std::string out = "m,k,n,sigma_m,energy,alpha,levels,index\n";
  for (int m = m_min; m <= m_max; ++m)
    for (int k = k_min; k <= k_max; ++k) {
      out += std::to_string(m) + "," + std::to_string(k) + ",";
      if (m < 3 || k < 0 || k > m - 3) {
        out += ",,,,,invalid pair: needs m >= 3 and 0 <= k <= m-3\n";
        continue;
      }
      out += std::to_string(m - 1 - k) + "," +
             format_double(sphere_volume(m)) + "," +
             format_double(equator_energy(m, k)) + ",";
      if (k > m - 7) {
        out += ",,infinite (n<6)\n";
        continue;
      }
      AnalyticIndex idx = analytic_index(m, k);
      out += format_double(idx.alpha) + ",";
      if (idx.axis_branch) {
        out += "axis";
      } else {
        for (size_t i = 0; i < idx.levels.size(); ++i) {
          if (i) out += ";";
          out += "ell" + std::to_string(idx.levels[i].ell) + ":" +
                 std::to_string(idx.levels[i].radial_count) + "x" +
                 std::to_string(idx.levels[i].multiplicity);
        }
      }
      out += "," + std::to_string(idx.total) + "\n";
    }
  return out;
}

std::string index_verify_csv(const std::vector<IndexVerifyRow>& rows) {
  std::string out = "m,k,ell,multiplicity,analytic,numeric,agree\n";
  for (const IndexVerifyRow& r : rows) {
    out += std::to_string(r.m) + "," + std::to_string(r.k) + "," +
           std::to_string(r.ell) + "," + std::to_string(r.multiplicity) +
           "," + std::to_string(r.analytic) + "," + std::to_string(r.numeric) +
           "," + (r.agree ? "1" : "0") + "\n";
  }
  return out;
}

}  // namespace lambar
