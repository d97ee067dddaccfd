#include "lambar/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "lambar/error.hpp"

namespace lambar {

namespace {

// Legendre P_n(x) and P_n'(x) by the three-term recurrence.
std::pair<double, double> legendre(int n, double x) {
  double p0 = 1.0, p1 = x;
  for (int j = 2; j <= n; ++j) {
    double p2 = ((2 * j - 1) * x * p1 - (j - 1) * p0) / j;
    p0 = p1;
    p1 = p2;
  }
  double dp = n * (x * p1 - p0) / (x * x - 1.0);
  return {p1, dp};
}

GaussRule make_rule(int order) {
  GaussRule rule;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  for (int i = 0; i < order; ++i) {
    // Tricomi initial guess, then Newton. Converges in a handful of steps.
    double x = std::cos(M_PI * (i + 0.75) / (order + 0.5));
    for (int it = 0; it < 100; ++it) {
      auto [p, dp] = legendre(order, x);
      double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    auto [p, dp] = legendre(order, x);
    (void)p;
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, make_rule(order)).first;
  return it->second;
}

double gauss(const std::function<double(double)>& f, double a, double b,
             int order) {
  const GaussRule& rule = gauss_legendre(order);
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double sum = 0.0;
  for (int i = 0; i < order; ++i)
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * sum;
}

namespace {

// Each interval gets an error budget proportional to its length, measured
// against the largest magnitude seen so far, so an interval whose estimate
// cancels to zero (odd integrands, oscillation) still terminates.
double adaptive_rec(const std::function<double(double)>& f, double a,
                    double b, double whole, double rel_per_len, int order,
                    int depth, double& scale) {
  double mid = 0.5 * (a + b);
  double left = gauss(f, a, mid, order);
  double right = gauss(f, mid, b, order);
  scale = std::max(scale, std::abs(left) + std::abs(right));
  double err = std::abs(left + right - whole);
  if (err <= rel_per_len * scale * (b - a) || depth <= 0) return left + right;
  return adaptive_rec(f, a, mid, left, rel_per_len, order, depth - 1, scale) +
         adaptive_rec(f, mid, b, right, rel_per_len, order, depth - 1, scale);
}

}  // namespace

double adaptive_gauss(const std::function<double(double)>& f, double a,
                      double b, double rel_tol, int order, int max_depth) {
  if (!(b > a)) return 0.0;
  double whole = gauss(f, a, b, order);
  double scale = std::abs(whole);
  return adaptive_rec(f, a, b, whole, rel_tol / (b - a), order, max_depth,
                      scale);
}

double tanh_sinh(const std::function<double(double)>& f, double a, double b,
                 double rel_tol) {
  if (!(b > a)) fail(ErrorKind::config, "tanh_sinh: empty interval");
  const double half = 0.5 * (b - a);
  // x(u) = a,b -/+ delta with delta = half * (1 - tanh(pi/2 sinh u)) kept in
  // product form: no cancellation, so nodes track the nearer endpoint down
  // to the last representable double. The far endpoint still limits doubly
  // singular integrands to the square root of machine epsilon in mass.
  auto eval = [&](double u, double& x, double& w) {
    double s = M_PI_2 * std::sinh(std::abs(u));
    double delta = 2.0 * half / (1.0 + std::exp(2.0 * s));
    x = u >= 0.0 ? b - delta : a + delta;
    double c = std::cosh(s);
    w = half * M_PI_2 * std::cosh(u) / (c * c);
  };
  const double u_max = 6.5;  // delta underflows just before pi/2 sinh(u_max)
  double h = 0.5;
  double x, w;
  eval(0.0, x, w);
  double sum = f(x) * w;
  for (double u = h; u <= u_max; u += h) {
    for (double su : {u, -u}) {
      eval(su, x, w);
      if (x <= a || x >= b || w == 0.0) continue;
      double fx = f(x);
      if (std::isfinite(fx)) sum += fx * w;
    }
  }
  double prev = h * sum;
  double integral = prev;
  for (int level = 0; level < 12; ++level) {
    // Refine: add midpoints of the current lattice.
    double add = 0.0;
    for (double u = 0.5 * h; u <= u_max; u += h) {
      for (double su : {u, -u}) {
        eval(su, x, w);
        if (x <= a || x >= b || w == 0.0) continue;
        double fx = f(x);
        if (std::isfinite(fx)) add += fx * w;
      }
    }
    sum += add;
    h *= 0.5;
    integral = h * sum;
    if (level > 1 &&
        std::abs(integral - prev) <=
            rel_tol * std::max(std::abs(integral), 1e-300))
      return integral;
    prev = integral;
  }
  return integral;
}

}  // namespace lambar
