#pragma once

#include <Eigen/Dense>
#include <vector>

#include "lambar/mesh.hpp"
#include "lambar/spectral.hpp"

namespace lambar {

// Euclidean projection of y onto { x : 0 <= x_i <= caps_i, sum x = total }.
// Exact breakpoint algorithm: x = clamp(y - tau, 0, caps) with tau found by
// a sorted sweep of the piecewise-linear constraint sum.
Eigen::VectorXd project_capped_simplex(const Eigen::VectorXd& y,
                                       const Eigen::VectorXd& caps,
                                       double total);

// Minimum-norm convex combination sum_i c_i phi_i^2 over the multiplicity
// cluster of lambda_k, with each eigenfunction normalized to unit Dirichlet
// energy. Returns per-cell values (exact P1 cell averages). The norm is
// L2 against the volume measure; the weights solve the simplex-constrained
// least-squares problem exactly (active-set enumeration, cluster sizes are
// small). Moving cell masses against this direction and re-projecting onto
// the mass simplex is the ascent step for lambda_k * mass.
Eigen::VectorXd supergradient_direction(const SimplicialMesh& mesh,
                                        const Spectrum& spectrum, int k);

// Mass of the cells where the certificate direction is more than tol_S
// (relatively) below its max but the density has not reached the cap. At a
// maximizer the density saturates the cap wherever the minimum-norm
// combination stays below its sup, so this converges to zero.
double bang_bang_certificate(const SimplicialMesh& mesh, const Density& rho,
                             const Eigen::VectorXd& direction, double tol_S);

struct AscentOptions {
  int k = 1;
  double cap = 0.0;            // required; cap * volume > 1 for feasibility
  double tol_cert = 1e-3;
  double tol_S = 1e-2;
  int max_iter = 200;
  double step0 = 0.5;
  double backtrack_slack = 1e-10;  // accepted objective decrease per step
  int max_backtracks = 24;
  SolveOptions eigen;
};

struct AscentHistoryEntry {
  int iter = 0;
  double lambda_bar = 0.0;
  double certificate = 0.0;
  double step = 0.0;
  int cluster_size = 0;
};

struct AscentResult {
  Density rho;                     // probability density (mass 1)
  Spectrum spectrum;               // at the final density
  double lambda_bar = 0.0;
  double certificate = 0.0;
  bool converged = false;
  std::vector<AscentHistoryEntry> history;
};

// Projected supergradient ascent of lambda_k(rho) * mass over capped
// probability densities, starting from `start` (uniform if empty). Stops
// when the bang-bang certificate drops below tol_cert or the iteration
// budget runs out. Monotone up to backtrack_slack by construction.
AscentResult maximize(const SimplicialMesh& mesh, const AscentOptions& opts,
                      const Density* start = nullptr);

struct Eigenmap {
  Eigen::MatrixXd components;      // n_vertices x rank
  Eigen::MatrixXd gram;            // PSD coefficient matrix over the cluster
  Eigen::VectorXd pointwise_norm;  // per-vertex squared norm of the map
  double defect = 0.0;             // max |pointwise_norm - 1|
  bool spherical = false;          // defect below the failure threshold
};

struct EigenmapOptions {
  int k = 1;
  int rank_cap = 0;            // 0 = cluster upper end bound (k_max - k + 1)
  double defect_fail = 1e-2;
  int max_iter = 400;
  double step0 = 1.0;
};

// Extracts a sphere-valued map from the lambda_k eigenspace: finds a PSD
// Gram matrix G of bounded rank making sum_ij G_ij phi_i phi_j as close to
// 1 as possible (weighted least squares on vertex values, projected
// gradient with trace pinned to the total mass), then factors G into map
// components.
Eigenmap extract_eigenmap(const SimplicialMesh& mesh,
                          const Spectrum& spectrum,
                          const EigenmapOptions& opts);

struct HarmonicResidual {
  double residual_rel = 0.0;   // ||K u - M(|du|^2) u|| over ||K u||, all components
  double energy = 0.0;         // sum_a u_a^T K u_a
  double energy_mass = 0.0;    // total mass of |du|^2 against the volume
};

// Residual of the discrete harmonic-map equation K u = M(|du|^2 dv) u for
// the extracted map. energy == energy_mass holds identically for P1
// elements, which pins the normalization (no eigenvalue rescaling needed).
HarmonicResidual harmonic_residual(const SimplicialMesh& mesh,
                                   const Eigenmap& map);

}  // namespace lambar
