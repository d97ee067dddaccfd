#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <utility>

namespace lambar {

struct SolveOptions {
  int count = 6;                   // lowest eigenpairs wanted
  std::uint64_t seed = 20260818;   // start-vector seed; fixes the run exactly
  double tol = 1e-12;              // Krylov convergence tolerance
  int max_iter = 40000;
  double residual_tol = 1e-8;      // accepted pencil residual, relative
  double kernel_floor_rel = 1e-12; // M-norm floor, relative to total mass
  double cluster_tol = 1e-6;       // relative gap that merges eigenvalues
  double sigma = 0.0;              // 0 = automatic spectral shift
};

// Lowest eigenpairs of the symmetric pencil K phi = lambda M phi, restricted
// to the complement of M's kernel. Vectors are M-orthonormal; values ascend.
struct Spectrum {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;    // n x count
  // ||K v - lambda M v|| / ((||K|| + |l| ||M||) ||v||), Frobenius scales
  Eigen::VectorXd residuals;
  double mass = 0.0;          // 1^T M 1
  double cluster_tol = 1e-6;

  int count() const { return static_cast<int>(values.size()); }

  // Index range [lo, hi] of the multiplicity cluster containing k, under the
  // relative gap rule |lambda_i - lambda_k| <= cluster_tol * scale.
  std::pair<int, int> cluster_of(int k) const;
};

Spectrum solve_eigen(const Eigen::SparseMatrix<double>& K,
                     const Eigen::SparseMatrix<double>& M,
                     const SolveOptions& opts = {});

// Scale-invariant functional: lambda_k times total mass.
double lambda_bar(const Spectrum& spectrum, int k);

// Signature of a sparse symmetric matrix via LDLT.
struct Inertia {
  int negative = 0;
  int zero = 0;
  int positive = 0;
};
Inertia ldlt_inertia(const Eigen::SparseMatrix<double>& A,
                     double zero_tol = 0.0);

struct IndexReport {
  int negative_count = 0;
  double cutoff_tol = 0.0;
};

// Number of eigenvalues of the pencil (K - M, M_ref) below -cutoff_tol,
// with M_ref symmetric positive definite. Computed as the negative inertia
// of K - M + cutoff_tol * M_ref (Sylvester), so no eigensolve is involved.
IndexReport spectral_index(const Eigen::SparseMatrix<double>& K,
                           const Eigen::SparseMatrix<double>& M,
                           const Eigen::SparseMatrix<double>& M_ref,
                           double cutoff_tol = 1e-8);

// Smallest Rayleigh quotient of the pencil over the M-orthogonal complement
// of the columns of `orthogonal_to`.
double constrained_lambda_k(const Eigen::SparseMatrix<double>& K,
                            const Eigen::SparseMatrix<double>& M,
                            const Eigen::MatrixXd& orthogonal_to,
                            const SolveOptions& opts = {});

}  // namespace lambar
