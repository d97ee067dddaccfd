#include "lambar/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "lambar/error.hpp"

namespace lambar {

Eigen::VectorXd project_capped_simplex(const Eigen::VectorXd& y,
                                       const Eigen::VectorXd& caps,
                                       double total) {
  const int n = static_cast<int>(y.size());
  if (caps.size() != n) fail(ErrorKind::config, "caps must match y in size");
  double cap_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    if (!(caps[i] >= 0.0)) fail(ErrorKind::config, "caps must be >= 0");
    cap_sum += caps[i];
  }
  const double slack = 1e-12 * std::max(1.0, cap_sum);
  if (total < -slack || total > cap_sum + slack)
    fail(ErrorKind::config, "target mass is infeasible for the caps");
  total = std::min(std::max(total, 0.0), cap_sum);
  if (total == 0.0) return Eigen::VectorXd::Zero(n);

  // x(tau) = clamp(y - tau, 0, caps); sum x(tau) is piecewise linear and
  // non-increasing. Sweep the breakpoints from above.
  struct Event {
    double tau;
    int i;
    bool enter;  // crossing tau = y_i downward puts i into the linear range
  };
  std::vector<Event> ev;
  ev.reserve(2 * n);
  for (int i = 0; i < n; ++i) {
    if (caps[i] == 0.0) continue;
    ev.push_back({y[i], i, true});
    ev.push_back({y[i] - caps[i], i, false});
  }
  std::sort(ev.begin(), ev.end(),
            [](const Event& a, const Event& b) { return a.tau > b.tau; });

  double nlin = 0.0, ylin = 0.0, fixed = 0.0;
  double tau = 0.0;
  bool found = false;
  size_t pos = 0;
  double tau_prev = std::numeric_limits<double>::infinity();
  while (pos < ev.size() && !found) {
    double tau_group = ev[pos].tau;
    // Segment [tau_group, tau_prev] uses the current state.
    if (nlin > 0.0) {
      double cand = (ylin + fixed - total) / nlin;
      if (cand >= tau_group - 1e-300 && cand <= tau_prev) {
        tau = cand;
        found = true;
        break;
      }
    }
    while (pos < ev.size() && ev[pos].tau == tau_group) {
      const Event& e = ev[pos++];
      if (e.enter) {
        nlin += 1.0;
        ylin += y[e.i];
      } else {
        nlin -= 1.0;
        ylin -= y[e.i];
        fixed += caps[e.i];
      }
    }
    tau_prev = tau_group;
  }
  if (!found) {
    if (nlin > 0.0)
      tau = (ylin + fixed - total) / nlin;
    else
      tau = tau_prev - 1.0;  // everything saturated: total == cap_sum
  }

  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i)
    x[i] = std::min(std::max(y[i] - tau, 0.0), caps[i]);
  // One correction pass keeps the constraint exact to roundoff.
  double r = total - x.sum();
  if (r != 0.0) {
    for (int i = 0; i < n && r != 0.0; ++i) {
      double room = r > 0 ? caps[i] - x[i] : -x[i];
      double give = r > 0 ? std::min(r, room) : std::max(r, room);
      if (x[i] > 0.0 && x[i] < caps[i]) {
        x[i] += give;
        r -= give;
      }
    }
  }
  return x;
}

namespace {

void check_cluster_floor(const Spectrum& spectrum, int lo, int hi) {
  if (hi - lo + 1 > 16)
    fail(ErrorKind::convergence, "eigenvalue cluster too large");
  const double scale = std::abs(spectrum.values[spectrum.count() - 1]);
  if (!(spectrum.values[lo] > 1e-12 * std::max(scale, 1.0)))
    fail(ErrorKind::convergence, "eigenvalue cluster touches zero");
}

// Weights of the min-norm point of the convex hull of vectors with Gram
// matrix Q: enumerate active sets exactly (cluster sizes are small).
Eigen::VectorXd simplex_min_norm(const Eigen::MatrixXd& Q) {
  const int r = static_cast<int>(Q.rows());
  const double qscale = Q.diagonal().maxCoeff();
  double best_obj = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_c;
  bool best_kkt = false;
  for (unsigned mask = 1; mask < (1u << r); ++mask) {
    std::vector<int> idx;
    for (int i = 0; i < r; ++i)
      if (mask & (1u << i)) idx.push_back(i);
    const int s = static_cast<int>(idx.size());
    Eigen::MatrixXd Qs(s, s);
    for (int a = 0; a < s; ++a)
      for (int b = 0; b < s; ++b) Qs(a, b) = Q(idx[a], idx[b]);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(Qs);
    if (ldlt.info() != Eigen::Success) continue;
    Eigen::VectorXd w = ldlt.solve(Eigen::VectorXd::Ones(s));
    if ((Qs * w - Eigen::VectorXd::Ones(s)).norm() > 1e-8 * std::sqrt(double(s)))
      continue;  // singular subset
    double denom = w.sum();
    if (!(denom > 0.0)) continue;
    double nu = 1.0 / denom;
    Eigen::VectorXd c = Eigen::VectorXd::Zero(r);
    bool feasible = true;
    for (int a = 0; a < s; ++a) {
      c[idx[a]] = w[a] * nu;
      if (c[idx[a]] < -1e-10) feasible = false;
    }
    if (!feasible) continue;
    bool kkt = true;
    Eigen::VectorXd g = Q * c;
    for (int i = 0; i < r && kkt; ++i)
      if (!(mask & (1u << i)) && g[i] < nu - 1e-10 * qscale) kkt = false;
    double obj = c.dot(g);
    if ((kkt && !best_kkt) || (kkt == best_kkt && obj < best_obj)) {
      best_obj = obj;
      best_c = c;
      best_kkt = kkt;
    }
  }
  if (best_c.size() == 0)
    fail(ErrorKind::internal, "no feasible weight combination found");
  return best_c;
}

// Min-norm element of the convex hull of the cellwise eigenfunction squares
// over the index range [lo, hi]; the steepest-ascent pick for the cluster
// minimum.
Eigen::VectorXd hull_direction(const SimplicialMesh& mesh,
                               const Spectrum& spectrum, int lo, int hi) {
  const int r = hi - lo + 1;
  check_cluster_floor(spectrum, lo, hi);

  // Cell averages of phi^2 / lambda (unit Dirichlet energy normalization).
  std::vector<Eigen::VectorXd> q(r);
  for (int i = 0; i < r; ++i) {
    Eigen::VectorXd v = spectrum.vectors.col(lo + i);
    q[i] = cell_pair_average(mesh, v, v) / spectrum.values[lo + i];
  }
  if (r == 1) return q[0];

  Eigen::MatrixXd Q(r, r);
  for (int i = 0; i < r; ++i)
    for (int j = i; j < r; ++j) {
      double acc = 0.0;
      for (int c = 0; c < mesh.n_cells(); ++c)
        acc += mesh.cell_volume[c] * q[i][c] * q[j][c];
      Q(i, j) = Q(j, i) = acc;
    }
  Eigen::VectorXd c = simplex_min_norm(Q);
  Eigen::VectorXd d = Eigen::VectorXd::Zero(mesh.n_cells());
  for (int i = 0; i < r; ++i)
    if (c[i] != 0.0) d += c[i] * q[i];
  return d;
}

// Ascent direction over Gram-weighted products of the cluster basis:
// sum_ab W_ab phi_a phi_b with W PSD of unit trace, cell averages, unit
// Dirichlet energy scaling. The simplex hull above is the diagonal slice.
// Two refinements matter here. Off-diagonal freedom: once eigenvalues tie,
// the first-order response of the cluster minimum to a density step is the
// worst response over every unit vector of the cluster span, not just over
// the basis squares, and only the min-norm conditions of the full PSD set
// bound all of those below (by the squared norm); a diagonal-only pick has
// no such bound and its line search collapses to steps of the order of the
// internal gap of the tie. Mean removal: the norm being minimized is
// L2(volume) of the mean-free part, because the mass projection cancels
// the mean of the step and the mass factor of the objective cancels the
// mean of the response, so the raw mean carries no ascent and would only
// bias the weight search.
Eigen::VectorXd psd_hull_direction(const SimplicialMesh& mesh,
                                   const Spectrum& spectrum, int lo, int hi) {
  const int r = hi - lo + 1;
  check_cluster_floor(spectrum, lo, hi);

  std::vector<Eigen::VectorXd> q;      // upper-triangle pairs, a <= b
  std::vector<int> pa, pb;
  q.reserve(r * (r + 1) / 2);
  for (int a = 0; a < r; ++a)
    for (int b = a; b < r; ++b) {
      Eigen::VectorXd va = spectrum.vectors.col(lo + a);
      Eigen::VectorXd vb = spectrum.vectors.col(lo + b);
      double s = std::sqrt(spectrum.values[lo + a] * spectrum.values[lo + b]);
      q.push_back(cell_pair_average(mesh, va, vb) / s);
      pa.push_back(a);
      pb.push_back(b);
    }
  const int np = static_cast<int>(q.size());
  if (r == 1) return q[0];

  const double volume = mesh.total_volume();
  Eigen::VectorXd mean(np);
  for (int s = 0; s < np; ++s)
    mean[s] = q[s].dot(mesh.cell_volume) / volume;
  Eigen::MatrixXd H(np, np);  // Gram of the mean-free parts in L2(volume)
  for (int s = 0; s < np; ++s)
    for (int t = s; t < np; ++t) {
      double acc = 0.0;
      for (int c = 0; c < mesh.n_cells(); ++c)
        acc += mesh.cell_volume[c] * q[s][c] * q[t][c];
      H(s, t) = H(t, s) = acc - volume * mean[s] * mean[t];
    }
  Eigen::VectorXd mult(np);
  for (int s = 0; s < np; ++s) mult[s] = pa[s] == pb[s] ? 1.0 : 2.0;

  // Diagonal warm start: the simplex min-norm over the basis squares.
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(r, r);
  if (r <= 8) {
    Eigen::MatrixXd Qd(r, r);
    for (int s = 0; s < np; ++s)
      if (pa[s] == pb[s])
        for (int t = 0; t < np; ++t)
          if (pa[t] == pb[t]) Qd(pa[s], pa[t]) = H(s, t);
    W = simplex_min_norm(Qd).asDiagonal();
  } else {
    W.diagonal().setConstant(1.0 / r);
  }

  auto sym_coeffs = [&](const Eigen::MatrixXd& M) {
    Eigen::VectorXd y(np);
    for (int s = 0; s < np; ++s) y[s] = M(pa[s], pb[s]);
    return y;
  };
  auto objective_grad = [&](const Eigen::MatrixXd& Wc, Eigen::VectorXd& g) {
    g = H * mult.cwiseProduct(sym_coeffs(Wc));
    return mult.cwiseProduct(sym_coeffs(Wc)).dot(g);
  };
  // Euclidean projection onto { W PSD, tr W = 1 }: project the eigenvalues
  // onto the simplex.
  auto project_psd = [&](const Eigen::MatrixXd& M) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
    Eigen::VectorXd sig = project_capped_simplex(
        es.eigenvalues(), Eigen::VectorXd::Ones(r), 1.0);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(r, r);
    for (int i = 0; i < r; ++i)
      if (sig[i] != 0.0)
        out += sig[i] * es.eigenvectors().col(i) *
               es.eigenvectors().col(i).transpose();
    return out;
  };

  Eigen::VectorXd g;
  double F = objective_grad(W, g);
  double eta = 1.0;
  for (int iter = 0; iter < 200; ++iter) {
    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(r, r);
    for (int s = 0; s < np; ++s) {
      grad(pa[s], pb[s]) += mult[s] * g[s];
      if (pa[s] != pb[s]) grad(pb[s], pa[s]) += mult[s] * g[s];
    }
    double gnorm = grad.norm();
    if (gnorm < 1e-15 * std::max(1.0, F)) break;
    bool moved = false;
    for (int bt = 0; bt < 40; ++bt) {
      Eigen::MatrixXd Wc = project_psd(W - (eta / gnorm) * grad);
      Eigen::VectorXd gc;
      double Fc = objective_grad(Wc, gc);
      if (Fc < F) {
        double gain = F - Fc;
        W = std::move(Wc);
        g = std::move(gc);
        F = Fc;
        eta = std::min(eta * 1.5, 1e6);
        moved = gain > 1e-12 * std::max(F, 1e-30);
        break;
      }
      eta *= 0.5;
    }
    if (!moved) break;
  }

  Eigen::VectorXd d = Eigen::VectorXd::Zero(mesh.n_cells());
  for (int s = 0; s < np; ++s) {
    double w = mult[s] * W(pa[s], pb[s]);
    if (w != 0.0) d += w * q[s];
  }
  return d;
}

}  // namespace

Eigen::VectorXd supergradient_direction(const SimplicialMesh& mesh,
                                        const Spectrum& spectrum, int k) {
  if (k < 1) fail(ErrorKind::config, "direction needs k >= 1");
  if (k >= spectrum.count())
    fail(ErrorKind::config, "spectrum holds too few eigenpairs");
  auto [lo, hi] = spectrum.cluster_of(k);
  return hull_direction(mesh, spectrum, lo, hi);
}

double bang_bang_certificate(const SimplicialMesh& mesh, const Density& rho,
                             const Eigen::VectorXd& direction, double tol_S) {
  if (rho.rho.size() != mesh.n_cells() ||
      direction.size() != mesh.n_cells())
    fail(ErrorKind::config, "density and direction must be per-cell");
  const double top = direction.maxCoeff();
  if (!(top > 0.0)) fail(ErrorKind::internal, "direction has no positive part");
  const double threshold = (1.0 - tol_S) * top;
  double mass = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    bool below = direction[c] < threshold;
    bool capped = rho.rho[c] >= rho.cap * (1.0 - 1e-9);
    if (below && !capped) mass += rho.rho[c] * mesh.cell_volume[c];
  }
  return mass;
}

AscentResult maximize(const SimplicialMesh& mesh, const AscentOptions& opts,
                      const Density* start) {
  if (opts.k < 1) fail(ErrorKind::config, "ascent needs k >= 1");
  if (!(opts.cap > 0.0)) fail(ErrorKind::config, "ascent needs a positive cap");
  const int nc = mesh.n_cells();
  const double volume = mesh.total_volume();
  if (!(opts.cap * volume > 1.0 + 1e-9))
    fail(ErrorKind::config, "cap times volume must exceed 1");

  Eigen::VectorXd caps = opts.cap * mesh.cell_volume;
  Eigen::VectorXd x(nc);  // cell masses, sum 1
  if (start) {
    if (start->rho.size() != nc)
      fail(ErrorKind::config, "start density must be per-cell");
    double m0 = 0.0;
    for (int c = 0; c < nc; ++c) {
      if (!(start->rho[c] >= 0.0))
        fail(ErrorKind::config, "start density must be >= 0");
      m0 += start->rho[c] * mesh.cell_volume[c];
    }
    if (!(m0 > 0.0)) fail(ErrorKind::config, "start density has no mass");
    for (int c = 0; c < nc; ++c) x[c] = start->rho[c] * mesh.cell_volume[c] / m0;
  } else {
    x = mesh.cell_volume / volume;
  }
  x = project_capped_simplex(x, caps, 1.0);

  Eigen::SparseMatrix<double> K = assemble_stiffness(mesh);
  SolveOptions eo = opts.eigen;
  eo.count = std::max(eo.count, opts.k + 4);

  auto density_of = [&](const Eigen::VectorXd& masses) {
    Density d;
    d.rho = masses.cwiseQuotient(mesh.cell_volume);
    d.cap = opts.cap;
    return d;
  };
  auto solve_at = [&](const Eigen::VectorXd& masses) {
    return solve_eigen(K, assemble_mass(mesh, density_of(masses)), eo);
  };

  AscentResult res;
  res.spectrum = solve_at(x);
  res.lambda_bar = lambda_bar(res.spectrum, opts.k);
  double eta = 0.0;

  // When the target eigenvalue is about to cross a neighbor, a direction
  // built on its own cluster only admits steps below the spectral gap, and
  // at a degenerate optimum the certificate over a partial cluster stays
  // O(1). Stalls therefore merge the next near-degenerate eigenvalue into
  // the working cluster and restart the step size.
  int widen = 0;
  const double widen_window = 3e-2;
  auto working_hi = [&](int lo, int hi) {
    const double ref = res.spectrum.values[opts.k] * (1.0 + widen_window);
    for (int e = 0; e < widen; ++e) {
      if (hi + 2 >= res.spectrum.count() || hi - lo + 2 > 16) break;
      if (res.spectrum.values[hi + 1] > ref) break;
      ++hi;
    }
    return hi;
  };

  for (int iter = 0;; ++iter) {
    auto [lo, hi_strict] = res.spectrum.cluster_of(opts.k);
    int hi = working_hi(lo, hi_strict);
    Eigen::VectorXd d = psd_hull_direction(mesh, res.spectrum, lo, hi);
    res.certificate = bang_bang_certificate(mesh, density_of(x), d, opts.tol_S);
    res.history.push_back(
        {iter, res.lambda_bar, res.certificate, eta, hi - lo + 1});
    if (res.certificate < opts.tol_cert) {
      res.converged = true;
      break;
    }
    if (iter >= opts.max_iter) break;

    // The direction is a density perturbation; in cell-mass coordinates the
    // step carries the cell volumes, which keeps the minimum-norm pairing
    // (L2 against the volume) aligned with the eigenvalue responses.
    Eigen::VectorXd step = d.cwiseProduct(mesh.cell_volume);
    const double eta_scale = opts.step0 / d.maxCoeff();
    if (eta == 0.0) eta = eta_scale;
    bool moved = false;
    double accepted_eta = 0.0;
    for (int bt = 0; bt < opts.max_backtracks; ++bt) {
      Eigen::VectorXd xc = project_capped_simplex(x - eta * step, caps, 1.0);
      if ((xc - x).lpNorm<1>() < 1e-15) break;  // projection pins the point
      Spectrum sc;
      try {
        sc = solve_at(xc);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::convergence) {
          eta *= 0.25;
          continue;
        }
        throw;
      }
      double lb = lambda_bar(sc, opts.k);
      if (lb >= res.lambda_bar -
                    opts.backtrack_slack * std::max(1.0, std::abs(lb))) {
        x = xc;
        res.spectrum = std::move(sc);
        res.lambda_bar = lb;
        accepted_eta = eta;
        eta *= 1.5;
        moved = true;
        break;
      }
      eta *= 0.25;
    }
    // Accepted steps orders of magnitude below the natural scale mean the
    // line search is pinned by an eigenvalue crossing just above the
    // working cluster.
    bool stalled = !moved || accepted_eta <= 1e-4 * eta_scale;
    if (stalled) {
      auto [lo2, hi2_strict] = res.spectrum.cluster_of(opts.k);
      int hi2 = working_hi(lo2, hi2_strict);
      bool can_widen =
          hi2 + 2 < res.spectrum.count() && hi2 - lo2 + 2 <= 16 &&
          res.spectrum.values[hi2 + 1] <=
              res.spectrum.values[opts.k] * (1.0 + widen_window);
      if (can_widen) {
        ++widen;
        eta = 0.0;
      } else if (!moved) {
        break;  // step collapsed; certificate above reports the state
      }
    }
  }
  res.rho = density_of(x);
  return res;
}

Eigenmap extract_eigenmap(const SimplicialMesh& mesh, const Spectrum& spectrum,
                          const EigenmapOptions& opts) {
  if (opts.k < 0 || opts.k >= spectrum.count())
    fail(ErrorKind::config, "eigenmap level out of range");
  auto [lo, hi] = spectrum.cluster_of(opts.k);
  const int r0 = hi - lo + 1;
  int rank = opts.rank_cap > 0 ? opts.rank_cap : hi - opts.k + 1;
  rank = std::min(rank, r0);
  const Eigen::MatrixXd P = spectrum.vectors.middleCols(lo, r0);
  const Eigen::VectorXd w = lumped_vertex_masses(mesh, uniform_density(mesh));
  const double mass = spectrum.mass;

  auto norms = [&](const Eigen::MatrixXd& G) {
    return Eigen::VectorXd(((P * G).cwiseProduct(P)).rowwise().sum());
  };
  auto objective = [&](const Eigen::VectorXd& N) {
    return w.dot((N.array() - 1.0).square().matrix());
  };
  // Projection onto PSD matrices of rank <= rank with trace = mass: keep the
  // top eigenvalues and project them onto the simplex.
  auto project = [&](const Eigen::MatrixXd& G) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    Eigen::VectorXd top(rank);
    for (int i = 0; i < rank; ++i) top[i] = es.eigenvalues()[r0 - 1 - i];
    Eigen::VectorXd sig = project_capped_simplex(
        top, Eigen::VectorXd::Constant(rank, mass), mass);
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(r0, r0);
    for (int i = 0; i < rank; ++i) {
      if (sig[i] == 0.0) continue;
      Eigen::VectorXd u = es.eigenvectors().col(r0 - 1 - i);
      out += sig[i] * u * u.transpose();
    }
    return out;
  };

  Eigen::MatrixXd G =
      project(Eigen::MatrixXd::Identity(r0, r0) * (mass / r0));
  Eigen::VectorXd N = norms(G);
  double F = objective(N);
  double eta = opts.step0;
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    Eigen::VectorXd s = w.cwiseProduct(N.array().matrix() -
                                       Eigen::VectorXd::Ones(N.size()));
    Eigen::MatrixXd grad = 2.0 * P.transpose() * s.asDiagonal() * P;
    double gnorm = grad.norm();
    if (gnorm < 1e-15 * std::max(1.0, F)) break;
    bool moved = false;
    for (int bt = 0; bt < 40; ++bt) {
      Eigen::MatrixXd Gc = project(G - (eta / gnorm) * grad);
      Eigen::VectorXd Nc = norms(Gc);
      double Fc = objective(Nc);
      if (Fc < F) {
        double gain = F - Fc;
        G = std::move(Gc);
        N = std::move(Nc);
        F = Fc;
        eta = std::min(eta * 1.5, 1e6);
        moved = gain > 1e-12 * std::max(F, 1e-30);
        break;
      }
      eta *= 0.5;
    }
    if (!moved) break;
  }

  Eigenmap map;
  map.gram = G;
  map.pointwise_norm = N;
  map.defect = (N.array() - 1.0).abs().maxCoeff();
  map.spherical = map.defect <= opts.defect_fail;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
  int keep = 0;
  for (int i = 0; i < r0; ++i)
    if (es.eigenvalues()[i] > 1e-12 * std::max(mass, 1e-300)) ++keep;
  map.components.resize(mesh.n_vertices(), std::max(keep, 1));
  if (keep == 0) {
    map.components.setZero();
  } else {
    for (int j = 0; j < keep; ++j) {
      int src = r0 - 1 - j;  // descending eigenvalue order
      map.components.col(j) = std::sqrt(es.eigenvalues()[src]) *
                              (P * es.eigenvectors().col(src));
    }
  }
  return map;
}

HarmonicResidual harmonic_residual(const SimplicialMesh& mesh,
                                   const Eigenmap& map) {
  if (map.components.rows() != mesh.n_vertices())
    fail(ErrorKind::config, "map components must live on mesh vertices");
  Eigen::VectorXd e = cell_energy_density(mesh, map.components);
  Density ed;
  ed.rho = e;
  Eigen::SparseMatrix<double> K = assemble_stiffness(mesh);
  Eigen::SparseMatrix<double> Me = assemble_mass(mesh, ed);
  HarmonicResidual out;
  double num = 0.0, den = 0.0;
  for (int a = 0; a < map.components.cols(); ++a) {
    Eigen::VectorXd u = map.components.col(a);
    Eigen::VectorXd Ku = K * u;
    num += (Ku - Me * u).squaredNorm();
    den += Ku.squaredNorm();
    out.energy += u.dot(Ku);
  }
  if (!(den > 0.0)) fail(ErrorKind::config, "map carries no energy");
  out.residual_rel = std::sqrt(num / den);
  out.energy_mass = e.dot(mesh.cell_volume);
  return out;
}

}  // namespace lambar
