#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lambar/error.hpp"
#include "lambar/reduced_sl.hpp"
#include "lambar/sphere_oracle.hpp"

using namespace lambar;

TEST_CASE("graded grid: monotone, symmetric, clustered at the ends") {
  Eigen::VectorXd g = graded_grid(101);
  REQUIRE(g.size() == 101);
  for (int i = 0; i + 1 < g.size(); ++i) CHECK(g[i] < g[i + 1]);
  CHECK(g[0] > -1.0);
  CHECK(g[g.size() - 1] < 1.0);
  for (int i = 0; i < g.size(); ++i)
    CHECK(g[i] == doctest::Approx(-g[g.size() - 1 - i]).scale(1.0));
  // Quadratic grading: endpoint spacing is about the square of the
  // parameter spacing, so much finer than the center spacing.
  double end_gap = 1.0 + g[0];
  double mid_gap = g[51] - g[50];
  CHECK(end_gap < 0.1 * mid_gap);
}

TEST_CASE("assembled form matches hand values for the unit weight") {
  Eigen::VectorXd grid(3);
  grid << -0.5, 0.0, 0.5;
  WeightedForm wf = build_weighted_form(grid, {1.0, 0.0, 0.0}, {},
                                        {1.0, 0.0, 0.0});
  // Stiffness of two unit elements of length 1/2: diag 2, -2 off.
  Eigen::MatrixXd A(wf.form);
  CHECK(A(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(A(0, 1) == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(A(1, 1) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(A(0, 2) == 0.0);
  // P1 mass of element length h: h/3 diag, h/6 off.
  Eigen::MatrixXd B(wf.mass);
  CHECK(B(0, 0) == doctest::Approx(1.0 / 6).epsilon(1e-12));
  CHECK(B(0, 1) == doctest::Approx(1.0 / 12).epsilon(1e-12));
  CHECK(B(1, 1) == doctest::Approx(1.0 / 3).epsilon(1e-12));
}

TEST_CASE("jacobi pencil eigenvalues converge to s(s+a+b+1)") {
  std::vector<double> v = jacobi_eigen_check(1.0, 1.0, 4, 800);
  REQUIRE(v.size() == 4);
  CHECK(std::abs(v[0]) < 1e-6);
  CHECK(v[1] == doctest::Approx(4.0).epsilon(1e-2));
  CHECK(v[2] == doctest::Approx(10.0).epsilon(1e-2));
  CHECK(v[3] == doctest::Approx(18.0).epsilon(1e-2));

  std::vector<double> h = jacobi_eigen_check(0.5, 0.5, 3, 600);
  CHECK(h[1] == doctest::Approx(3.0).epsilon(1e-2));
  CHECK(h[2] == doctest::Approx(8.0).epsilon(1e-2));
}

TEST_CASE("negative counts: jacobi forms are positive semidefinite") {
  int c = negative_count(
      [](const Eigen::VectorXd& g) { return build_jacobi_form(1.0, 1.0, g); },
      300);
  CHECK(c == 0);
}

TEST_CASE("negative counts: single-mode forms") {
  // rho = 0 carries one negative direction; rho >= n kills the potential.
  auto count_mode = [](int m, int k, int ell, double rho) {
    return negative_count(
        [=](const Eigen::VectorXd& g) {
          return build_mode_form(m, k, ell, rho, g);
        },
        500);
  };
  CHECK(count_mode(8, 1, 0, 0.0) == 1);
  CHECK(count_mode(8, 1, 1, 0.0) == 1);
  CHECK(count_mode(8, 1, 2, 0.0) == 0);
  CHECK(count_mode(8, 1, 0, 6.0) == 0);   // rho = n: form is PSD
  CHECK(count_mode(8, 1, 0, 12.0) == 0);  // rho > n
  CHECK(count_mode(9, 2, 1, 0.0) == 1);
}

TEST_CASE("negative counts: axis forms") {
  auto count_axis = [](int m) {
    return negative_count(
        [=](const Eigen::VectorXd& g) { return build_axis_form(m, g); }, 500);
  };
  CHECK(count_axis(7) == 2);
  CHECK(count_axis(8) == 2);
  CHECK(count_axis(9) == 2);
}

TEST_CASE("divergent-index parameters trip the stability check") {
  // m=5, k=2 has n=2: the exponent quadratic has no real root and the form
  // oscillates toward t=1, gaining a negative direction about once per
  // factor 16 of grid size. The factor-4 refinement ladder spans such an
  // increment, so the three counts cannot all agree.
  CHECK_THROWS_WITH_AS(
      negative_count(
          [](const Eigen::VectorXd& g) {
            return build_mode_form(5, 2, 0, 0.0, g);
          },
          200),
      doctest::Contains("unstable count"), Error);
}

TEST_CASE("per-level numeric counts match the closed form at (9,1)") {
  AnalyticIndex idx = analytic_index(9, 1);
  for (const IndexLevel& level : idx.levels) {
    int numeric = negative_count(
        [&](const Eigen::VectorXd& g) {
          return build_mode_form(9, 1, level.ell, 0.0, g);
        },
        500);
    CHECK(numeric == level.radial_count);
  }
}

TEST_CASE("form builders validate their arguments") {
  Eigen::VectorXd g = graded_grid(16);
  CHECK_THROWS_AS(build_mode_form(8, 0, 0, 0.0, g), Error);  // k = 0 is axis
  CHECK_THROWS_AS(build_jacobi_form(-1.5, 0.0, g), Error);
  CHECK_THROWS_AS(graded_grid(4), Error);
  Eigen::VectorXd bad(3);
  bad << -0.5, 0.5, 0.25;  // not increasing
  CHECK_THROWS_AS(build_weighted_form(bad, {1, 0, 0}, {}, {1, 0, 0}), Error);
}
