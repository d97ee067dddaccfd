#include "lambar/reduced_sl.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "lambar/error.hpp"
#include "lambar/quadrature.hpp"
#include "lambar/spectral.hpp"

namespace lambar {

Eigen::VectorXd graded_grid(int n_nodes, double gamma) {
  if (n_nodes < 8) fail(ErrorKind::config, "grid needs at least 8 nodes");
  if (!(gamma >= 1.0)) fail(ErrorKind::config, "grading exponent must be >= 1");
  Eigen::VectorXd t(n_nodes);
  for (int i = 0; i < n_nodes; ++i) {
    double u = -1.0 + 2.0 * (i + 1) / (n_nodes + 1);
    double s = u < 0 ? -1.0 : 1.0;
    t[i] = s * (1.0 - std::pow(1.0 - std::abs(u), gamma));
  }
  return t;
}

namespace {

// Weight along one cell in the local coordinate xi in [0,1]. The pole
// distances 1 -/+ t are pinned at the cell endpoints and interpolated
// linearly in xi. Recomputing 1 - (t0 + xi*h) per evaluation instead would
// turn the weight into rounding noise on cells that sit many orders of
// magnitude closer to the pole than their own width, and the adaptive
// subdivision then chases that noise to its depth limit.
struct CellWeight {
  double c, x, y, d0, dd, e0, de;
  CellWeight(const WeightTerm& w, double t0, double t1)
      : c(w.coef), x(w.x), y(w.y), d0(1.0 - t0), dd((1.0 - t1) - d0),
        e0(1.0 + t0), de((1.0 + t1) - e0) {}
  double operator()(double xi) const {
    return c * std::pow(d0 + xi * dd, x) * std::pow(e0 + xi * de, y);
  }
};

// Integrals of the weight against the P1 shape-function products on one
// element: out[0] = int w, out[1..3] = int w * {bL*bL, bL*bR, bR*bR}.
void element_integrals(const WeightTerm& w, double t0, double t1,
                       double out[4]) {
  const double h = t1 - t0;
  const CellWeight cw(w, t0, t1);
  out[0] = h * adaptive_gauss([&](double xi) { return cw(xi); }, 0.0, 1.0);
  out[1] = h * adaptive_gauss(
                   [&](double xi) {
                     double b = 1.0 - xi;
                     return cw(xi) * b * b;
                   },
                   0.0, 1.0);
  out[2] = h * adaptive_gauss(
                   [&](double xi) { return cw(xi) * xi * (1.0 - xi); }, 0.0,
                   1.0);
  out[3] = h * adaptive_gauss([&](double xi) { return cw(xi) * xi * xi; },
                              0.0, 1.0);
}

}  // namespace

WeightedForm build_weighted_form(const Eigen::VectorXd& grid,
                                 const WeightTerm& deriv_weight,
                                 const std::vector<WeightTerm>& potential,
                                 const WeightTerm& mass_weight) {
  const int N = static_cast<int>(grid.size());
  if (N < 2) fail(ErrorKind::config, "grid needs at least 2 nodes");
  for (int i = 0; i + 1 < N; ++i)
    if (!(grid[i] < grid[i + 1]))
      fail(ErrorKind::config, "grid nodes must be strictly increasing");
  if (!(grid[0] > -1.0 && grid[N - 1] < 1.0))
    fail(ErrorKind::config, "grid must lie inside (-1,1)");

  WeightedForm out;
  out.grid = grid;
  out.deriv_weight = deriv_weight;
  out.potential = potential;
  out.mass_weight = mass_weight;

  std::vector<Eigen::Triplet<double>> ta, tb;
  ta.reserve(4 * N);
  tb.reserve(4 * N);
  double vals[4];
  for (int e = 0; e + 1 < N; ++e) {
    const double t0 = grid[e], t1 = grid[e + 1];
    const double h = t1 - t0;
    const CellWeight dw(deriv_weight, t0, t1);
    double s = adaptive_gauss([&](double xi) { return dw(xi); }, 0.0, 1.0) / h;
    double loc[3] = {s, -s, s};  // LL, LR, RR
    for (const WeightTerm& p : potential) {
      if (p.coef == 0.0) continue;
      element_integrals(p, t0, t1, vals);
      loc[0] += vals[1];
      loc[1] += vals[2];
      loc[2] += vals[3];
    }
    ta.emplace_back(e, e, loc[0]);
    ta.emplace_back(e, e + 1, loc[1]);
    ta.emplace_back(e + 1, e, loc[1]);
    ta.emplace_back(e + 1, e + 1, loc[2]);

    element_integrals(mass_weight, t0, t1, vals);
    tb.emplace_back(e, e, vals[1]);
    tb.emplace_back(e, e + 1, vals[2]);
    tb.emplace_back(e + 1, e, vals[2]);
    tb.emplace_back(e + 1, e + 1, vals[3]);
  }
  out.form.resize(N, N);
  out.form.setFromTriplets(ta.begin(), ta.end());
  out.mass.resize(N, N);
  out.mass.setFromTriplets(tb.begin(), tb.end());
  return out;
}

WeightedForm build_mode_form(int m, int k, int ell, double rho,
                             const Eigen::VectorXd& grid) {
  if (k < 1) fail(ErrorKind::config, "mode form needs k >= 1");
  if (ell < 0) fail(ErrorKind::config, "harmonic level must be >= 0");
  const int n = m - 1 - k;
  if (n < 2) fail(ErrorKind::config, "mode form needs m - 1 - k >= 2");
  const double nu = static_cast<double>(ell) * (k - 1 + ell);
  WeightTerm deriv{1.0, 0.5 * (n + 1), 0.5 * (k + 1)};
  std::vector<WeightTerm> pot;
  if (nu != 0.0)
    pot.push_back({0.5 * nu, 0.5 * (n - 1), 0.5 * (k - 1) - 1.0});
  if (rho != static_cast<double>(n))
    pot.push_back({0.5 * (rho - n), 0.5 * (n - 1) - 1.0, 0.5 * (k - 1)});
  WeightTerm mass{1.0, 0.5 * (n - 1), 0.5 * (k - 1)};
  return build_weighted_form(grid, deriv, pot, mass);
}

WeightedForm build_axis_form(int m, const Eigen::VectorXd& grid) {
  if (m < 5) fail(ErrorKind::config, "axis form needs m >= 5");
  const double half = 0.5 * m;
  WeightTerm deriv{1.0, half, half};
  std::vector<WeightTerm> pot{{-(m - 1.0), half - 2.0, half - 2.0}};
  WeightTerm mass{1.0, half - 1.0, half - 1.0};
  return build_weighted_form(grid, deriv, pot, mass);
}

WeightedForm build_jacobi_form(double a, double b,
                               const Eigen::VectorXd& grid) {
  if (!(a > -1.0 && b > -1.0))
    fail(ErrorKind::config, "jacobi parameters must exceed -1");
  WeightTerm deriv{1.0, a + 1.0, b + 1.0};
  WeightTerm mass{1.0, a, b};
  return build_weighted_form(grid, deriv, {}, mass);
}

namespace {

// Negative inertia of a symmetric tridiagonal matrix by the Sturm pivot
// recurrence. Zero pivots are nudged negative (LAPACK convention); the
// callers keep eigenvalues away from zero so the convention never matters.
int tridiag_negative_inertia(const Eigen::SparseMatrix<double>& A) {
  const int N = static_cast<int>(A.rows());
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(N);
  Eigen::VectorXd off = Eigen::VectorXd::Zero(N > 1 ? N - 1 : 1);
  double scale = 0.0;
  for (int col = 0; col < A.outerSize(); ++col)
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, col); it; ++it) {
      int i = static_cast<int>(it.row()), j = static_cast<int>(it.col());
      if (i == j)
        diag[i] = it.value();
      else if (i == j + 1)
        off[j] = it.value();
      else if (i + 1 != j)
        fail(ErrorKind::internal, "matrix is not tridiagonal");
      scale = std::max(scale, std::abs(it.value()));
    }
  if (scale == 0.0) return 0;
  const double pivmin = scale * 1e-290;
  int count = 0;
  double q = diag[0];
  if (std::abs(q) < pivmin) q = -pivmin;
  if (q < 0) ++count;
  for (int i = 1; i < N; ++i) {
    q = diag[i] - off[i - 1] * off[i - 1] / q;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0) ++count;
  }
  return count;
}

}  // namespace

int negative_count(
    const std::function<WeightedForm(const Eigen::VectorXd&)>& builder,
    int n_nodes, double gamma, double gap) {
  if (!(gap >= 0.0)) fail(ErrorKind::config, "gap must be >= 0");
  // Refine by factor 4: oscillatory (divergent-index) parameters gain a
  // negative direction only about once per factor 16 of grid size, so
  // doubling twice can land inside a flat stretch and miss them.
  int counts[3];
  for (int r = 0; r < 3; ++r) {
    WeightedForm wf = builder(graded_grid(n_nodes << (2 * r), gamma));
    Eigen::SparseMatrix<double> shifted = wf.form + gap * wf.mass;
    counts[r] = tridiag_negative_inertia(shifted);
  }
  if (counts[0] != counts[1] || counts[1] != counts[2])
    fail(ErrorKind::convergence,
         "unstable count across grid refinement: " +
             std::to_string(counts[0]) + ", " + std::to_string(counts[1]) +
             ", " + std::to_string(counts[2]));
  return counts[0];
}

std::vector<double> jacobi_eigen_check(double a, double b, int count,
                                       int n_nodes) {
  WeightedForm wf = build_jacobi_form(a, b, graded_grid(n_nodes));
  SolveOptions opts;
  opts.count = count;
  opts.sigma = -1.0;  // keeps form - sigma*mass positive definite
  Spectrum sp = solve_eigen(wf.form, wf.mass, opts);
  return std::vector<double>(sp.values.data(), sp.values.data() + sp.count());
}

}  // namespace lambar
