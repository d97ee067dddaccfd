#pragma once

#include <Eigen/Dense>
#include <vector>

#include "lambar/mesh.hpp"

namespace lambar {

// Volume of the unit round sphere S^m (sigma_0 = 2, sigma_2 = 4pi, ...).
double sphere_volume(int m);

// Dimension of the space of degree-ell spherical harmonics on S^k.
int harmonic_multiplicity(int k, int ell);

// Equator projections S^m -> S^n with n = m-1-k, smooth away from an
// S^k singular set. Valid for m >= 3 and 0 <= k <= m-3.
struct EquatorMap {
  int m = 0;
  int k = 0;
  int n() const { return m - 1 - k; }
};

// Dirichlet energy n(m-1)/(n-1) * sigma_m of the equator map.
double equator_energy(int m, int k);

// Squared gradient of the equator map at latitude t in (0,1), in the
// coordinates S^n x (0,1) x S^k -> S^m, (theta,t,omega) |-> (theta
// sqrt(1-t), omega sqrt(t)). Constant in theta and omega.
double equator_density(int m, int k, double t);

// Weight that turns a latitude integral into a volume integral in the same
// coordinates. Integrates to sphere_volume(m) over (0,1).
double equator_coordinate_weight(int m, int k, double t);

// The same two functions at latitude t = 1 - s, taking the distance s from
// the singular pole directly. Near t = 1 the difference 1 - t is only
// representable to one ulp, which caps quadrature there at sqrt(eps)
// relative error for the n = 2 pairs; integrating the upper half in s
// against these keeps full precision down to denormal s.
double equator_density_from_pole(int m, int k, double s);
double equator_coordinate_weight_from_pole(int m, int k, double s);

// Eigenvalue s(s+a+b+1) of the Jacobi operator
// -((1-t)^{a+1}(1+t)^{b+1} u')' = lambda (1-t)^a(1+t)^b u on (-1,1).
double jacobi_eigenvalue(double a, double b, int s);
std::vector<double> jacobi_spectrum(double a, double b, int count);

// Closed-form count of the negative directions of the second variation of
// energy at the equator map, per harmonic level ell on the S^k factor.
struct IndexLevel {
  int ell = 0;
  int radial_count = 0;   // 1D eigenvalue count at this level
  int multiplicity = 0;   // dim of degree-ell harmonics on S^k
};

struct AnalyticIndex {
  int m = 0;
  int k = 0;
  double alpha = 0.0;               // least root of a^2 - (n-1)a + n = 0
  bool axis_branch = false;         // k = 0 uses the axis reduction
  bool boundary_case = false;       // a count threshold landed on an integer
  std::vector<IndexLevel> levels;   // empty for the axis branch
  int total = 0;
};

// Requires n = m-1-k >= 6, i.e. k <= m-7; the quadratic for alpha has no
// real root otherwise and the index diverges (error "index infinite").
AnalyticIndex analytic_index(int m, int k);

// Conformal automorphism of the unit sphere attached to a point p in the
// open unit ball: x |-> (1-|p|^2)/|x+p|^2 (x+p) + p. Maps unit vectors to
// unit vectors; p = 0 is the identity.
Eigen::VectorXd conformal_shift(const Eigen::VectorXd& p,
                                const Eigen::VectorXd& x);

struct ComNormalization {
  Eigen::VectorXd p;       // ball point balancing the pushed measure
  double residual = 0.0;   // |sum w_i T_p(x_i)| / sum w_i at return
  int iterations = 0;
};

struct ComOptions {
  double tol_rel = 1e-10;  // residual target, relative to total weight
  int max_iter = 500;
  double step0 = 1.0;      // initial damping of the fixed-point update
};

// Finds p such that the weighted center of mass of the shifted points
// vanishes, by a damped fixed-point iteration with backtracking. Points are
// rows of `points` and must be unit vectors; weights must be nonnegative
// with positive sum spread over at least two distinct points. Errors with
// the best residual achieved if the budget runs out (in particular when a
// single atom carries more than half the total weight, where no solution
// exists).
ComNormalization center_of_mass_normalize(const Eigen::MatrixXd& points,
                                          const Eigen::VectorXd& weights,
                                          const ComOptions& opts = {});

struct HerschReport {
  Eigen::VectorXd p;
  double com_residual = 0.0;
  Eigen::VectorXd rayleigh;    // per ambient coordinate of the shifted map
  double bound = 0.0;          // mass * (energy sum / mass-quotient sum)
  double mass = 0.0;
  double coordinate_energy = 0.0;  // sum of coordinate Dirichlet energies
};

// Upper-bound certificate for the first nonzero eigenvalue on a sphere
// mesh: after centering the vertex measure, every ambient coordinate of the
// shifted positions is a valid trial function orthogonal to constants. The
// best coordinate quotient is at most the mediant of all of them, which
// gives lambda_1(rho) * mass <= bound with bound within discretization
// error of dim * sphere_volume(dim) for every density. Only k_test = 1 is
// supported; the higher-k construction needs a search over projection
// planes.
HerschReport hersch_upper_bound_check(const SimplicialMesh& mesh,
                                      const Density& density,
                                      const ComOptions& opts = {},
                                      int k_test = 1);

}  // namespace lambar
