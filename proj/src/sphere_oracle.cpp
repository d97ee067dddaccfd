#include "lambar/sphere_oracle.hpp"

#include <cmath>

#include "lambar/error.hpp"

namespace lambar {

double sphere_volume(int m) {
  if (m < 0) fail(ErrorKind::config, "sphere dimension must be >= 0");
  // 2 pi^{(m+1)/2} / Gamma((m+1)/2); sigma_0 = 2 (two points).
  return 2.0 * std::pow(M_PI, 0.5 * (m + 1)) / std::tgamma(0.5 * (m + 1));
}

namespace {

// Binomial with the usual vanishing convention outside the triangle.
long long binomial(int n, int r) {
  if (r < 0 || n < 0 || r > n) return 0;
  r = std::min(r, n - r);
  long long acc = 1;
  for (int i = 1; i <= r; ++i) acc = acc * (n - r + i) / i;
  return acc;
}

void check_equator_args(int m, int k) {
  if (m < 3) fail(ErrorKind::config, "equator map needs ambient sphere m >= 3");
  if (k < 0 || k > m - 3)
    fail(ErrorKind::config, "equator map needs 0 <= k <= m-3");
}

}  // namespace

int harmonic_multiplicity(int k, int ell) {
  if (k < 0 || ell < 0) fail(ErrorKind::config, "bad harmonic level");
  if (k == 0) return ell <= 1 ? 1 : 0;  // S^0: even and odd functions only
  return static_cast<int>(binomial(k + ell, k) - binomial(k + ell - 2, k));
}

double equator_energy(int m, int k) {
  check_equator_args(m, k);
  const int n = m - 1 - k;
  return static_cast<double>(n) * (m - 1) / (n - 1) * sphere_volume(m);
}

double equator_density(int m, int k, double t) {
  check_equator_args(m, k);
  if (!(t > 0.0 && t < 1.0))
    fail(ErrorKind::config, "latitude must lie in (0,1)");
  return (m - 1 - k) / (1.0 - t);
}

double equator_coordinate_weight(int m, int k, double t) {
  check_equator_args(m, k);
  if (!(t > 0.0 && t < 1.0))
    fail(ErrorKind::config, "latitude must lie in (0,1)");
  const int n = m - 1 - k;
  return 0.5 * sphere_volume(n) * sphere_volume(k) *
         std::pow(1.0 - t, 0.5 * (n - 1)) * std::pow(t, 0.5 * (k - 1));
}

double equator_density_from_pole(int m, int k, double s) {
  check_equator_args(m, k);
  if (!(s > 0.0 && s < 1.0))
    fail(ErrorKind::config, "latitude must lie in (0,1)");
  return (m - 1 - k) / s;
}

double equator_coordinate_weight_from_pole(int m, int k, double s) {
  check_equator_args(m, k);
  if (!(s > 0.0 && s < 1.0))
    fail(ErrorKind::config, "latitude must lie in (0,1)");
  const int n = m - 1 - k;
  return 0.5 * sphere_volume(n) * sphere_volume(k) *
         std::pow(s, 0.5 * (n - 1)) * std::pow(1.0 - s, 0.5 * (k - 1));
}

double jacobi_eigenvalue(double a, double b, int s) {
  if (s < 0) fail(ErrorKind::config, "mode index must be >= 0");
  return s * (s + a + b + 1.0);
}

std::vector<double> jacobi_spectrum(double a, double b, int count) {
  std::vector<double> out;
  out.reserve(count);
  for (int s = 0; s < count; ++s) out.push_back(jacobi_eigenvalue(a, b, s));
  return out;
}

namespace {

// #{ s in {0,1,...} : s < x }, flagging thresholds that sit on an integer.
int strict_count_below(double x, bool& boundary) {
  if (x <= 0.0) return 0;
  double nearest = std::round(x);
  if (std::abs(x - nearest) <= 1e-9) {
    boundary = true;
    return static_cast<int>(nearest);
  }
  return static_cast<int>(std::floor(x)) + 1;
}

}  // namespace

AnalyticIndex analytic_index(int m, int k) {
  check_equator_args(m, k);
  const int n = m - 1 - k;
  if (n < 6)
    fail(ErrorKind::config,
         "index infinite: no real exponent for n = m-1-k = " +
             std::to_string(n) + " < 6");
  AnalyticIndex out;
  out.m = m;
  out.k = k;
  const double disc = std::sqrt(static_cast<double>(n) * n - 6.0 * n + 1.0);
  out.alpha = 0.5 * ((n - 1) - disc);

  if (k == 0) {
    out.axis_branch = true;
    out.total = strict_count_below(out.alpha, out.boundary_case);
    return out;
  }
  for (int ell = 0;; ++ell) {
    IndexLevel level;
    level.ell = ell;
    level.multiplicity = harmonic_multiplicity(k, ell);
    level.radial_count =
        strict_count_below(0.5 * (out.alpha - ell), out.boundary_case);
    out.levels.push_back(level);
    if (level.radial_count == 0) break;
    out.total += level.radial_count * level.multiplicity;
  }
  return out;
}

Eigen::VectorXd conformal_shift(const Eigen::VectorXd& p,
                                const Eigen::VectorXd& x) {
  double p2 = p.squaredNorm();
  if (!(p2 < 1.0)) fail(ErrorKind::config, "shift point must be in the ball");
  Eigen::VectorXd xp = x + p;
  return (1.0 - p2) / xp.squaredNorm() * xp + p;
}

ComNormalization center_of_mass_normalize(const Eigen::MatrixXd& points,
                                          const Eigen::VectorXd& weights,
                                          const ComOptions& opts) {
  const int N = static_cast<int>(points.rows());
  const int d = static_cast<int>(points.cols());
  if (weights.size() != N)
    fail(ErrorKind::config, "weights must match the point count");
  double wsum = 0.0;
  int support = 0;
  for (int i = 0; i < N; ++i) {
    if (weights[i] < 0.0) fail(ErrorKind::config, "weights must be >= 0");
    if (weights[i] > 0.0) {
      ++support;
      wsum += weights[i];
    }
    if (std::abs(points.row(i).norm() - 1.0) > 1e-8)
      fail(ErrorKind::config, "points must lie on the unit sphere");
  }
  if (!(wsum > 0.0) || support < 2)
    fail(ErrorKind::config,
         "measure must spread positive weight over at least two points");

  auto center = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd c = Eigen::VectorXd::Zero(d);
    for (int i = 0; i < N; ++i) {
      if (weights[i] == 0.0) continue;
      c += weights[i] * conformal_shift(p, points.row(i));
    }
    return Eigen::VectorXd(c / wsum);
  };

  Eigen::VectorXd p = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd c = center(p);
  double res = c.norm();
  double best_res = res;
  double step = opts.step0;
  int it = 0;
  for (; it < opts.max_iter && res > opts.tol_rel; ++it) {
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      Eigen::VectorXd cand = p - step * c;
      double nc = cand.norm();
      if (nc >= 1.0 - 1e-12) cand *= (1.0 - 1e-6) / nc;
      Eigen::VectorXd cc = center(cand);
      double rc = cc.norm();
      if (rc < res * (1.0 - 1e-4 * std::min(step, 1.0))) {
        p = cand;
        c = cc;
        res = rc;
        best_res = std::min(best_res, res);
        step = std::min(step * 1.5, 4.0);
        accepted = true;
        break;
      }
      step *= 0.5;
      if (step < 1e-14) break;
    }
    if (!accepted) break;
  }
  if (res > opts.tol_rel)
    fail(ErrorKind::convergence,
         "center-of-mass normalization stalled at residual " +
             std::to_string(best_res) +
             " (no balancing point exists when one atom carries at least "
             "half the weight)");
  ComNormalization out;
  out.p = p;
  out.residual = res;
  out.iterations = it;
  return out;
}

HerschReport hersch_upper_bound_check(const SimplicialMesh& mesh,
                                      const Density& density,
                                      const ComOptions& opts, int k_test) {
  if (k_test != 1)
    fail(ErrorKind::config, "only k_test = 1 is supported");
  const int d = static_cast<int>(mesh.vertices.cols());
  if (d != mesh.dim + 1)
    fail(ErrorKind::config, "hersch check needs an embedded sphere mesh");
  for (int i = 0; i < mesh.n_vertices(); ++i)
    if (std::abs(mesh.vertices.row(i).norm() - 1.0) > 1e-9)
      fail(ErrorKind::config, "hersch check needs unit-sphere vertices");

  Eigen::VectorXd w = lumped_vertex_masses(mesh, density);
  ComNormalization com = center_of_mass_normalize(mesh.vertices, w, opts);

  // P1 integrals of P1 functions reduce to the lumped pairing, so the
  // shifted coordinates are mass-orthogonal to constants up to com.residual.
  Eigen::MatrixXd shifted(mesh.n_vertices(), d);
  for (int i = 0; i < mesh.n_vertices(); ++i)
    shifted.row(i) = conformal_shift(com.p, mesh.vertices.row(i));

  Eigen::SparseMatrix<double> K = assemble_stiffness(mesh);
  Eigen::SparseMatrix<double> M = assemble_mass(mesh, density);
  HerschReport report;
  report.p = com.p;
  report.com_residual = com.residual;
  report.mass = total_mass(mesh, density);
  report.rayleigh.resize(d);
  double den_sum = 0.0;
  for (int j = 0; j < d; ++j) {
    Eigen::VectorXd y = shifted.col(j);
    double num = y.dot(K * y);
    double den = y.dot(M * y);
    report.rayleigh[j] = num / den;
    report.coordinate_energy += num;
    den_sum += den;
  }
  // Mediant bound: some coordinate quotient is at most the summed one, and
  // the denominators add up to the mass since the images are unit vectors.
  // The summed numerator is the map energy, which conformal recentering
  // keeps at (or below) m * sigma_m, so the bound is measure-independent
  // up to discretization; the per-coordinate max would not be.
  report.bound = report.mass * report.coordinate_energy / den_sum;
  return report;
}

}  // namespace lambar
