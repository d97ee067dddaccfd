#include <CLI11.hpp>
#include <Eigen/Core>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <string>

#include "lambar/config.hpp"
#include "lambar/error.hpp"
#include "lambar/mesh.hpp"
#include "lambar/optimizer.hpp"
#include "lambar/reduced_sl.hpp"
#include "lambar/report.hpp"
#include "lambar/sphere_oracle.hpp"
#include "lambar/spectral.hpp"

namespace {

using namespace lambar;

const std::set<std::string> geometry_keys = {
    "geometry", "dim", "n_per_axis", "side", "level", "mesh_file", "threads"};

std::set<std::string> with_geometry(std::set<std::string> extra) {
  extra.insert(geometry_keys.begin(), geometry_keys.end());
  return extra;
}

RunConfig load_config(const std::string& path) {
  if (path.empty()) return RunConfig::parse_string("");
  return RunConfig::parse_file(path);
}

SimplicialMesh mesh_from(const RunConfig& cfg) {
  if (cfg.has("mesh_file")) return read_mesh(cfg.get("mesh_file"));
  std::string geometry = cfg.get("geometry", "sphere");
  int dim = static_cast<int>(cfg.get_int("dim", 2));
  if (geometry == "torus")
    return build_flat_torus(dim, static_cast<int>(cfg.get_int("n_per_axis", 16)),
                            cfg.get_double("side", 2.0 * M_PI));
  if (geometry == "sphere")
    return build_round_sphere(dim, static_cast<int>(cfg.get_int("level", 3)));
  fail(ErrorKind::config, "geometry must be torus, sphere, or a mesh_file");
}

Density density_from(const RunConfig& cfg, const SimplicialMesh& mesh) {
  if (cfg.has("density_file")) {
    std::ifstream in(cfg.get("density_file"));
    if (!in)
      fail(ErrorKind::config,
           "cannot open density file " + cfg.get("density_file"));
    Density d;
    d.rho.resize(mesh.n_cells());
    std::string line;
    int filled = 0;
    while (std::getline(in, line)) {
      if (line.empty() || line.rfind("cell,", 0) == 0) continue;
      size_t comma = line.find(',');
      if (comma == std::string::npos)
        fail(ErrorKind::config, "density file line is not cell,rho: " + line);
      int c = std::stoi(line.substr(0, comma));
      if (c < 0 || c >= mesh.n_cells())
        fail(ErrorKind::config, "density file cell index out of range");
      d.rho[c] = std::stod(line.substr(comma + 1));
      ++filled;
    }
    if (filled != mesh.n_cells())
      fail(ErrorKind::config, "density file does not cover every cell");
    return d;
  }
  return uniform_density(mesh, cfg.get_double("rho", 1.0));
}

void apply_threads(const RunConfig& cfg) {
  int threads = static_cast<int>(cfg.get_int("threads", 1));
  if (threads < 1) fail(ErrorKind::config, "threads must be >= 1");
  Eigen::setNbThreads(threads);
}

// Output directory: `out_dir` key, overridden by LAMBAR_OUT_DIR. This is the
// only environment override.
std::string out_path(const RunConfig& cfg, const std::string& filename) {
  std::string dir = cfg.get("out_dir", ".");
  if (const char* env = std::getenv("LAMBAR_OUT_DIR")) dir = env;
  return dir + "/" + filename;
}

void emit(const RunConfig& cfg, const std::string& text) {
  if (cfg.has("out"))
    write_text(text, out_path(cfg, cfg.get("out")));
  else
    std::cout << text;
}

SolveOptions eigen_options(const RunConfig& cfg) {
  SolveOptions eo;
  eo.count = static_cast<int>(cfg.get_int("count", eo.count));
  eo.seed = static_cast<std::uint64_t>(cfg.get_int("seed", 20260818));
  eo.residual_tol = cfg.get_double("residual_tol", eo.residual_tol);
  eo.cluster_tol = cfg.get_double("cluster_tol", eo.cluster_tol);
  return eo;
}

int cmd_oracle(const RunConfig& cfg) {
  cfg.restrict_keys({"m_min", "m_max", "k_min", "k_max", "out", "out_dir"});
  emit(cfg, oracle_table_csv(static_cast<int>(cfg.get_int("m_min", 3)),
                             static_cast<int>(cfg.get_int("m_max", 12)),
                             static_cast<int>(cfg.get_int("k_min", 0)),
                             static_cast<int>(cfg.get_int("k_max", 9))));
  return exit_ok;
}

int cmd_index_verify(const RunConfig& cfg) {
  cfg.restrict_keys({"m_max", "limit", "nodes", "gap", "out", "out_dir",
                     "selftest_offset"});
  int m_max = static_cast<int>(cfg.get_int("m_max", 8));
  int limit = static_cast<int>(cfg.get_int("limit", 10));
  int nodes = static_cast<int>(cfg.get_int("nodes", 2000));
  double gap = cfg.get_double("gap", 1e-2);
  // Self-test hook: shifts the analytic side so tests can confirm that a
  // disagreement is reported through the exit code.
  int offset = static_cast<int>(cfg.get_int("selftest_offset", 0));
  if (m_max > limit)
    fail(ErrorKind::config, "m_max exceeds the configured limit");

  std::vector<IndexVerifyRow> rows;
  bool all_agree = true;
  for (int m = 7; m <= m_max; ++m)
    for (int k = 0; k <= m - 7; ++k) {
      AnalyticIndex idx = analytic_index(m, k);
      if (k == 0) {
        int numeric = negative_count(
            [m](const Eigen::VectorXd& g) { return build_axis_form(m, g); },
            nodes, 2.0, gap);
        IndexVerifyRow row{m, k, -1, 1, idx.total + offset, numeric,
                           idx.total + offset == numeric};
        all_agree = all_agree && row.agree;
        rows.push_back(row);
        continue;
      }
      int numeric_total = 0;
      for (const IndexLevel& level : idx.levels) {
        int numeric = negative_count(
            [m, k, &level](const Eigen::VectorXd& g) {
              return build_mode_form(m, k, level.ell, 0.0, g);
            },
            nodes, 2.0, gap);
        numeric_total += numeric * level.multiplicity;
        IndexVerifyRow row{m, k, level.ell, level.multiplicity,
                           level.radial_count + offset, numeric,
                           level.radial_count + offset == numeric};
        all_agree = all_agree && row.agree;
        rows.push_back(row);
      }
      IndexVerifyRow total{m, k, -1, 0, idx.total + offset, numeric_total,
                           idx.total + offset == numeric_total};
      all_agree = all_agree && total.agree;
      rows.push_back(total);
    }
  std::string csv = index_verify_csv(rows);
  if (m_max < 7) csv += "# no finite-index pairs: the count needs m >= 7\n";
  emit(cfg, csv);
  return all_agree ? exit_ok : exit_verification;
}

int cmd_spectrum(const RunConfig& cfg) {
  cfg.restrict_keys(with_geometry({"count", "seed", "rho", "density_file",
                                   "cluster_tol", "residual_tol", "out_dir",
                                   "report"}));
  apply_threads(cfg);
  SimplicialMesh mesh = mesh_from(cfg);
  Density density = density_from(cfg, mesh);
  Spectrum sp = solve_eigen(assemble_stiffness(mesh),
                            assemble_mass(mesh, density), eigen_options(cfg));
  nlohmann::json j = spectrum_to_json(sp);
  nlohmann::json bars = nlohmann::json::array();
  for (int k = 0; k < sp.count(); ++k) bars.push_back(sp.values[k] * sp.mass);
  j["lambda_bar"] = bars;
  write_json(j, out_path(cfg, cfg.get("report", "spectrum.json")));
  return exit_ok;
}

int cmd_optimize(const RunConfig& cfg) {
  cfg.restrict_keys(with_geometry(
      {"k", "cap", "tol_cert", "tol_S", "max_iter", "step0", "max_backtracks",
       "count", "seed", "cluster_tol", "residual_tol", "cutoff_tol",
       "defect_fail", "rank_cap", "map_iter", "density_file", "rho", "out_dir",
       "report", "density_out", "eigenmap_out"}));
  apply_threads(cfg);
  SimplicialMesh mesh = mesh_from(cfg);

  AscentOptions opts;
  opts.k = static_cast<int>(cfg.get_int("k", 1));
  opts.cap = cfg.get_double("cap");
  opts.tol_cert = cfg.get_double("tol_cert", opts.tol_cert);
  opts.tol_S = cfg.get_double("tol_S", opts.tol_S);
  opts.max_iter = static_cast<int>(cfg.get_int("max_iter", opts.max_iter));
  opts.step0 = cfg.get_double("step0", opts.step0);
  opts.max_backtracks =
      static_cast<int>(cfg.get_int("max_backtracks", opts.max_backtracks));
  opts.eigen = eigen_options(cfg);

  AscentResult res;
  if (cfg.has("density_file") || cfg.has("rho")) {
    Density start = density_from(cfg, mesh);
    res = maximize(mesh, opts, &start);
  } else {
    res = maximize(mesh, opts);
  }

  EigenmapOptions mo;
  mo.k = opts.k;
  mo.rank_cap = static_cast<int>(cfg.get_int("rank_cap", 0));
  mo.defect_fail = cfg.get_double("defect_fail", mo.defect_fail);
  mo.max_iter = static_cast<int>(cfg.get_int("map_iter", mo.max_iter));
  Eigenmap map = extract_eigenmap(mesh, res.spectrum, mo);
  HarmonicResidual hr = harmonic_residual(mesh, map);

  double cutoff = cfg.get_double("cutoff_tol", 1e-8);
  Eigen::SparseMatrix<double> K = assemble_stiffness(mesh);
  Eigen::SparseMatrix<double> M = assemble_mass(mesh, res.rho);
  Eigen::SparseMatrix<double> M_ref =
      assemble_mass(mesh, uniform_density(mesh));
  IndexReport stability = spectral_index(
      K, Eigen::SparseMatrix<double>(res.spectrum.values[opts.k] * M), M_ref,
      cutoff);

  nlohmann::json j = ascent_to_json(res);
  j["eigenmap_defect"] = map.defect;
  j["eigenmap_spherical"] = map.spherical;
  j["harmonic_residual"] = hr.residual_rel;
  j["map_energy"] = hr.energy;
  j["map_energy_mass"] = hr.energy_mass;
  j["stability_index"] = stability.negative_count;
  j["stability_cutoff"] = stability.cutoff_tol;
  write_json(j, out_path(cfg, cfg.get("report", "optimize.json")));
  write_text(density_csv(res.rho),
             out_path(cfg, cfg.get("density_out", "density.csv")));
  write_text(eigenmap_csv(map),
             out_path(cfg, cfg.get("eigenmap_out", "eigenmap.csv")));

  bool ok = res.converged && map.defect < mo.defect_fail;
  return ok ? exit_ok : exit_convergence;
}

int cmd_hersch_check(const RunConfig& cfg) {
  cfg.restrict_keys(with_geometry({"rho", "density_file", "count", "seed",
                                   "cluster_tol", "residual_tol", "out_dir",
                                   "report", "slack", "k_test"}));
  apply_threads(cfg);
  SimplicialMesh mesh = mesh_from(cfg);
  Density density = density_from(cfg, mesh);
  HerschReport hersch = hersch_upper_bound_check(
      mesh, density, {}, static_cast<int>(cfg.get_int("k_test", 1)));
  SolveOptions eo = eigen_options(cfg);
  eo.count = std::max(eo.count, 2);
  Spectrum sp = solve_eigen(assemble_stiffness(mesh),
                            assemble_mass(mesh, density), eo);
  double lb1 = lambda_bar(sp, 1);
  double slack = cfg.get_double("slack", 1e-10);
  bool ok = lb1 <= hersch.bound * (1.0 + slack) + slack;

  nlohmann::json j = hersch_to_json(hersch);
  j["lambda_bar_1"] = lb1;
  j["satisfied"] = ok;
  write_json(j, out_path(cfg, cfg.get("report", "hersch.json")));
  if (!ok)
    std::cerr << "error: lambda_bar_1 = " << format_double(lb1)
              << " exceeds the bound " << format_double(hersch.bound) << "\n";
  return ok ? exit_ok : exit_verification;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"eigenvalue-functional toolkit"};
  app.require_subcommand(1);
  std::string config_path;

  auto add = [&](const std::string& name, const std::string& desc) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->add_option("config", config_path, "key = value config file");
    return sub;
  };
  CLI::App* oracle =
      add("oracle", "closed-form sphere table (CSV to stdout or `out`)");
  CLI::App* verify =
      add("index-verify", "1D counts against the closed forms (CSV)");
  CLI::App* spectrum = add("spectrum", "lowest eigenpairs of a geometry");
  CLI::App* optimize = add("optimize", "ascent of lambda_k times mass");
  CLI::App* hersch = add("hersch-check", "coordinate upper bound on S^dim");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? lambar::exit_ok : lambar::exit_config;
  }

  try {
    const RunConfig cfg = load_config(config_path);
    if (oracle->parsed()) return cmd_oracle(cfg);
    if (verify->parsed()) return cmd_index_verify(cfg);
    if (spectrum->parsed()) return cmd_spectrum(cfg);
    if (optimize->parsed()) return cmd_optimize(cfg);
    if (hersch->parsed()) return cmd_hersch_check(cfg);
    return lambar::exit_config;
  } catch (const lambar::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return lambar::exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return lambar::exit_internal;
  }
}
