#pragma once

#include <functional>
#include <vector>

namespace lambar {

// Gauss-Legendre rule on [-1, 1]. Nodes/weights are computed by Newton
// iteration on the Legendre recurrence, accurate to machine precision.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

const GaussRule& gauss_legendre(int order);

// Fixed-order Gauss quadrature of f over [a, b].
double gauss(const std::function<double(double)>& f, double a, double b,
             int order = 12);

// Adaptive bisection Gauss quadrature. rel_tol is relative to the largest
// interval estimate seen, so integrals that are genuinely zero terminate.
double adaptive_gauss(const std::function<double(double)>& f, double a,
                      double b, double rel_tol = 1e-12, int order = 12,
                      int max_depth = 48);

// Double-exponential (tanh-sinh) quadrature over (a, b). Handles integrable
// algebraic endpoint singularities; f is never evaluated at a or b.
double tanh_sinh(const std::function<double(double)>& f, double a, double b,
                 double rel_tol = 1e-12);

}  // namespace lambar
