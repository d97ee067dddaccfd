#pragma once

// Shared helpers for the randomized suites: small dense-path geometries and
// an exhaustive projection oracle to check the sweep algorithm against.

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "lambar/mesh.hpp"

namespace testsupport {

inline const std::vector<lambar::SimplicialMesh>& mesh_pool() {
  static std::vector<lambar::SimplicialMesh> pool = [] {
    std::vector<lambar::SimplicialMesh> p;
    p.push_back(lambar::build_flat_torus(2, 4, 1.0));
    p.push_back(lambar::build_flat_torus(2, 5, 2.0 * M_PI));
    p.push_back(lambar::build_round_sphere(2, 0));
    p.push_back(lambar::build_round_sphere(2, 1));
    return p;
  }();
  return pool;
}

inline lambar::Density random_density(const lambar::SimplicialMesh& mesh,
                                      std::mt19937_64& rng, double lo = 0.1,
                                      double hi = 5.0) {
  std::uniform_real_distribution<double> unif(lo, hi);
  lambar::Density d;
  d.rho.resize(mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c) d.rho[c] = unif(rng);
  return d;
}

// Every face pattern (zero / interior / cap) checked against its KKT
// conditions. A valid pattern gives the unique projection; ties between
// patterns reproduce the same point, so the best objective wins.
inline Eigen::VectorXd brute_force_projection(const Eigen::VectorXd& y,
                                              const Eigen::VectorXd& caps,
                                              double total) {
  const int n = static_cast<int>(y.size());
  const double inf = std::numeric_limits<double>::infinity();
  double best_obj = inf;
  Eigen::VectorXd best;
  std::vector<int> pat(n, 0);
  while (true) {
    double fixed = 0.0, ylin = 0.0;
    int nlin = 0;
    for (int i = 0; i < n; ++i) {
      if (pat[i] == 2) fixed += caps[i];
      if (pat[i] == 1) {
        ylin += y[i];
        ++nlin;
      }
    }
    bool ok = true;
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    if (nlin == 0) {
      ok = std::abs(fixed - total) <= 1e-11 * std::max(1.0, std::abs(total));
      double tau_lo = -inf, tau_hi = inf;
      for (int i = 0; i < n; ++i) {
        if (pat[i] == 0) tau_lo = std::max(tau_lo, y[i]);
        if (pat[i] == 2) {
          tau_hi = std::min(tau_hi, y[i] - caps[i]);
          x[i] = caps[i];
        }
      }
      ok = ok && tau_lo <= tau_hi + 1e-11;
    } else {
      double tau = (ylin + fixed - total) / nlin;
      for (int i = 0; i < n && ok; ++i) {
        if (pat[i] == 1) {
          double xi = y[i] - tau;
          ok = xi >= -1e-11 && xi <= caps[i] + 1e-11;
          x[i] = std::min(std::max(xi, 0.0), caps[i]);
        } else if (pat[i] == 0) {
          ok = y[i] - tau <= 1e-11;
        } else {
          ok = y[i] - tau >= caps[i] - 1e-11;
          x[i] = caps[i];
        }
      }
    }
    if (ok) {
      double obj = (x - y).squaredNorm();
      if (obj < best_obj) {
        best_obj = obj;
        best = x;
      }
    }
    int i = 0;
    while (i < n && ++pat[i] == 3) pat[i++] = 0;
    if (i == n) break;
  }
  if (best_obj == inf)
    throw std::runtime_error("projection oracle: no KKT pattern is valid");
  return best;
}

}  // namespace testsupport
