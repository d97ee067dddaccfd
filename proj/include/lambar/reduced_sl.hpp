#pragma once

#include <Eigen/Sparse>
#include <functional>
#include <vector>

namespace lambar {

// Interior nodes of (-1, 1) with quadratic clustering toward both
// endpoints (spacing ~ h^2 near +-1 for uniform parameter spacing h).
Eigen::VectorXd graded_grid(int n_nodes, double gamma = 2.0);

// One weight term c * (1-t)^x (1+t)^y.
struct WeightTerm {
  double coef = 0.0;
  double x = 0.0;
  double y = 0.0;
};

// Sturm-Liouville quadratic form on (-1, 1):
//   q[phi] = int phi'^2 dweight dt + int phi^2 (sum of potential terms) dt
// discretized with P1 elements on the given grid. No essential boundary
// condition is imposed; the basis is every hat function on the grid and
// integrals run over the grid's span (pure form-domain treatment, correct
// for these weights whose endpoint exponents exceed 1).
struct WeightedForm {
  Eigen::VectorXd grid;
  WeightTerm deriv_weight;              // coef is 1 for the forms used here
  std::vector<WeightTerm> potential;
  WeightTerm mass_weight;               // pairing weight for the pencil
  Eigen::SparseMatrix<double> form;     // stiffness + potential
  Eigen::SparseMatrix<double> mass;     // weighted 1D mass matrix
};

// General assembler. Element integrals use adaptive Gauss quadrature with
// 1e-12 relative tolerance.
WeightedForm build_weighted_form(const Eigen::VectorXd& grid,
                                 const WeightTerm& deriv_weight,
                                 const std::vector<WeightTerm>& potential,
                                 const WeightTerm& mass_weight);

// Second-variation form of the equator-map energy on S^m restricted to the
// latitude variable, at harmonic level ell of the S^k factor (k >= 1) and
// S^n-eigenvalue rho (rho = 0 picks the level that carries the negative
// directions; rho >= n makes the form positive semidefinite):
//   int phi'^2 (1-t)^{(n+1)/2} (1+t)^{(k+1)/2}
//   + 1/2 int phi^2 [nu/(1+t) + (rho-n)/(1-t)] (1-t)^{(n-1)/2} (1+t)^{(k-1)/2}
// with n = m-1-k and nu = ell(k-1+ell).
WeightedForm build_mode_form(int m, int k, int ell, double rho,
                             const Eigen::VectorXd& grid);

// k = 0 analogue on the symmetric latitude coordinate:
//   int phi'^2 (1-t^2)^{m/2} - (m-1) int phi^2 (1-t^2)^{m/2-2}.
WeightedForm build_axis_form(int m, const Eigen::VectorXd& grid);

// Jacobi form with parameters (a, b): derivative weight
// (1-t)^{a+1}(1+t)^{b+1}, no potential, mass weight (1-t)^a(1+t)^b.
WeightedForm build_jacobi_form(double a, double b,
                               const Eigen::VectorXd& grid);

// Number of pencil eigenvalues below -gap, via the inertia of form +
// gap * mass (Sylvester). The mode and axis forms have O(1) spectral gaps
// around their negative eigenvalues, while parameter sets that put an
// eigenvalue exactly at zero (integer thresholds) discretize to O(1/n)
// noise around zero, so a gap well between those scales makes the count
// grid-independent. The count is computed on grids of n_nodes, 4*n_nodes
// and 16*n_nodes and must agree on all three; otherwise errors with
// "unstable count". The wide refinement ratio is what catches oscillatory
// parameter sets, whose count grows by one only every factor ~16 of grid
// size.
int negative_count(const std::function<WeightedForm(const Eigen::VectorXd&)>&
                       builder,
                   int n_nodes, double gamma = 2.0, double gap = 1e-2);

// Lowest eigenvalues of the (a, b) Jacobi pencil on a graded grid.
// Converges to s(s+a+b+1); the s = 0 eigenvalue is exactly 0 with the
// constant eigenvector.
std::vector<double> jacobi_eigen_check(double a, double b, int count,
                                       int n_nodes);

}  // namespace lambar
