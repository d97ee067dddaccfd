#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "lambar/mesh.hpp"
#include "lambar/optimizer.hpp"
#include "lambar/spectral.hpp"
#include "support.hpp"

using namespace lambar;
using testsupport::brute_force_projection;
using testsupport::mesh_pool;
using testsupport::random_density;

TEST_CASE("property: lambda_k times mass is invariant under density scaling") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> log_scale(-3.0, 3.0);
  SolveOptions so;
  so.count = 3;
  for (int rep = 0; rep < 200; ++rep) {
    const SimplicialMesh& mesh = mesh_pool()[rep % mesh_pool().size()];
    Density d = random_density(mesh, rng);
    double scale = std::pow(10.0, log_scale(rng));
    Density ds;
    ds.rho = d.rho * scale;

    Eigen::SparseMatrix<double> K = assemble_stiffness(mesh);
    Spectrum a = solve_eigen(K, assemble_mass(mesh, d), so);
    Spectrum b = solve_eigen(K, assemble_mass(mesh, ds), so);
    for (int k = 1; k < so.count; ++k) {
      double la = lambda_bar(a, k), lb = lambda_bar(b, k);
      CHECK(std::abs(la - lb) <= 1e-10 * std::max(1.0, std::abs(la)));
    }
  }
}

TEST_CASE("property: lambda_k does not increase when the density grows") {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> bump(0.0, 3.0);
  std::bernoulli_distribution sparse(0.5);
  SolveOptions so;
  so.count = 4;
  for (int rep = 0; rep < 200; ++rep) {
    const SimplicialMesh& mesh = mesh_pool()[rep % mesh_pool().size()];
    Density d = random_density(mesh, rng);
    Density dg;
    dg.rho = d.rho;
    for (int c = 0; c < mesh.n_cells(); ++c)
      if (!sparse(rng)) dg.rho[c] += bump(rng);

    Eigen::SparseMatrix<double> K = assemble_stiffness(mesh);
    Spectrum a = solve_eigen(K, assemble_mass(mesh, d), so);
    Spectrum b = solve_eigen(K, assemble_mass(mesh, dg), so);
    for (int k = 1; k < so.count; ++k)
      CHECK(b.values[k] <= a.values[k] * (1.0 + 1e-10) + 1e-12);
  }
}

TEST_CASE("property: spectral index at lambda_k never exceeds k") {
  std::mt19937_64 rng(303);
  std::uniform_int_distribution<int> pick_k(1, 4);
  SolveOptions so;
  so.count = 6;
  for (int rep = 0; rep < 200; ++rep) {
    const SimplicialMesh& mesh = mesh_pool()[rep % mesh_pool().size()];
    Density d = random_density(mesh, rng);
    Density d_ref = random_density(mesh, rng);
    int k = pick_k(rng);

    Eigen::SparseMatrix<double> K = assemble_stiffness(mesh);
    Eigen::SparseMatrix<double> M = assemble_mass(mesh, d);
    Spectrum sp = solve_eigen(K, M, so);
    Eigen::SparseMatrix<double> S = sp.values[k] * M;
    IndexReport report =
        spectral_index(K, S, assemble_mass(mesh, d_ref), 1e-8);
    CHECK(report.negative_count <= k);
    CHECK(report.negative_count >= 1);  // the constant direction
  }
}

TEST_CASE("property: capped simplex projection matches exhaustive KKT") {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int rep = 0; rep < 200; ++rep) {
    int n = rep < 190 ? 1 + static_cast<int>(unif(rng) * 8)
                      : 9 + static_cast<int>(unif(rng) * 4);
    Eigen::VectorXd y(n), caps(n);
    for (int i = 0; i < n; ++i) {
      caps[i] = 0.05 + 1.45 * unif(rng);
      y[i] = -1.0 + 3.0 * unif(rng);
    }
    if (n >= 3 && unif(rng) < 0.2) caps[0] = 0.0;
    double total = (0.05 + 0.9 * unif(rng)) * caps.sum();

    Eigen::VectorXd fast = project_capped_simplex(y, caps, total);
    Eigen::VectorXd slow = brute_force_projection(y, caps, total);
    CHECK((fast - slow).cwiseAbs().maxCoeff() <= 1e-9);
  }
}

TEST_CASE("property: constraining out the first j eigenvectors gives lambda_j") {
  std::mt19937_64 rng(505);
  std::uniform_int_distribution<int> pick_j(1, 4);
  SolveOptions so;
  so.count = 6;
  for (int rep = 0; rep < 200; ++rep) {
    const SimplicialMesh& mesh = mesh_pool()[rep % mesh_pool().size()];
    Density d = random_density(mesh, rng);
    int j = pick_j(rng);

    Eigen::SparseMatrix<double> K = assemble_stiffness(mesh);
    Eigen::SparseMatrix<double> M = assemble_mass(mesh, d);
    Spectrum sp = solve_eigen(K, M, so);
    double val = constrained_lambda_k(K, M, sp.vectors.leftCols(j));
    CHECK(std::abs(val - sp.values[j]) <=
          1e-8 * std::max(1.0, std::abs(sp.values[j])));
  }
}

TEST_CASE("property: constrained minimum survives the large-system path") {
  std::mt19937_64 rng(606);
  SimplicialMesh mesh = build_flat_torus(2, 24, 2.0 * M_PI);
  SolveOptions so;
  so.count = 4;
  for (int rep = 0; rep < 10; ++rep) {
    Density d = random_density(mesh, rng, 0.5, 2.0);
    Eigen::SparseMatrix<double> K = assemble_stiffness(mesh);
    Eigen::SparseMatrix<double> M = assemble_mass(mesh, d);
    Spectrum sp = solve_eigen(K, M, so);
    int j = 1 + rep % 2;
    double val = constrained_lambda_k(K, M, sp.vectors.leftCols(j));
    CHECK(std::abs(val - sp.values[j]) <=
          1e-8 * std::max(1.0, std::abs(sp.values[j])));
  }
}
