#include "lambar/spectral.hpp"

#include <arpack.h>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "lambar/error.hpp"

namespace lambar {

namespace {

using SpMat = Eigen::SparseMatrix<double>;

// Backward error against the matrix scales. Normalizing by ||K v|| instead
// would blow up on the kernel pair (constants, lambda = 0), where both
// sides vanish.
double pencil_residual(const SpMat& K, const SpMat& M, double lambda,
                       const Eigen::VectorXd& v) {
  double denom =
      (K.norm() + std::abs(lambda) * M.norm()) * v.norm() + 1e-300;
  return (K * v - lambda * (M * v)).norm() / denom;
}

// Deterministic start vector; the seed pins the whole Krylov run.
Eigen::VectorXd seeded_vector(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = uni(rng);
  return v;
}

// Sign convention: largest-magnitude entry (first such index) is positive.
void canonicalize_signs(Eigen::MatrixXd& V) {
  for (int j = 0; j < V.cols(); ++j) {
    int arg = 0;
    double best = 0.0;
    for (int i = 0; i < V.rows(); ++i) {
      double a = std::abs(V(i, j));
      if (a > best) {
        best = a;
        arg = i;
      }
    }
    if (V(arg, j) < 0.0) V.col(j) = -V.col(j);
  }
}

int mass_rank(const SpMat& M, double mass) {
  Eigen::VectorXd diag = M.diagonal();
  double floor_val = 1e-12 * mass / std::max<int>(1, M.rows());
  int rank = 0;
  for (int i = 0; i < diag.size(); ++i)
    if (diag[i] > floor_val) ++rank;
  return rank;
}

struct DensePencil {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;  // M-orthonormal
};

// Reduced eigenproblem for semidefinite M; also the reference oracle the
// Krylov path is tested against. The Rayleigh quotient runs over the whole
// space, so directions in M's kernel still relax the energy: they are
// eliminated by a Schur complement, not discarded. Plain restriction to
// range(M) would overestimate every eigenvalue once the density vanishes
// somewhere.
DensePencil dense_solve(const SpMat& K, const SpMat& M, int count,
                        double kernel_floor) {
  Eigen::MatrixXd Md = Eigen::MatrixXd(M);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> md(Md);
  if (md.info() != Eigen::Success)
    fail(ErrorKind::internal, "dense mass eigendecomposition failed");
  std::vector<int> keep, drop;
  for (int i = 0; i < md.eigenvalues().size(); ++i)
    (md.eigenvalues()[i] > kernel_floor ? keep : drop).push_back(i);
  if (static_cast<int>(keep.size()) < count)
    fail(ErrorKind::config,
         "requested eigenpair count exceeds the measure-supported subspace");
  Eigen::MatrixXd P(Md.rows(), keep.size());
  Eigen::VectorXd lam(keep.size());
  for (size_t j = 0; j < keep.size(); ++j) {
    P.col(j) = md.eigenvectors().col(keep[j]);
    lam[static_cast<Eigen::Index>(j)] = md.eigenvalues()[keep[j]];
  }
  Eigen::MatrixXd Kd = Eigen::MatrixXd(K);
  Eigen::MatrixXd Kpp = P.transpose() * Kd * P;
  Eigen::MatrixXd tail;  // optimal kernel component per range direction
  if (!drop.empty()) {
    Eigen::MatrixXd Q(Md.rows(), drop.size());
    for (size_t j = 0; j < drop.size(); ++j)
      Q.col(j) = md.eigenvectors().col(drop[j]);
    Eigen::MatrixXd Kqp = Q.transpose() * Kd * P;
    Eigen::LDLT<Eigen::MatrixXd> kq(Q.transpose() * Kd * Q);
    Eigen::MatrixXd G = kq.solve(Kqp);
    if (kq.info() != Eigen::Success || !G.allFinite())
      fail(ErrorKind::internal, "kernel elimination in the pencil failed");
    Kpp -= Kqp.transpose() * G;
    tail = -Q * G;
  }
  Eigen::VectorXd isqrt = lam.cwiseSqrt().cwiseInverse();
  Eigen::MatrixXd Ar = isqrt.asDiagonal() * Kpp * isqrt.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ar(Ar);
  if (ar.info() != Eigen::Success)
    fail(ErrorKind::internal, "dense reduced eigendecomposition failed");
  DensePencil out;
  out.values = ar.eigenvalues().head(count);
  Eigen::MatrixXd Z = isqrt.asDiagonal() * ar.eigenvectors().leftCols(count);
  out.vectors = P * Z;
  if (tail.size() > 0) out.vectors += tail * Z;
  return out;
}

struct ArpackResult {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  bool ok = false;
};

// Shift-invert Lanczos on the pencil: OP = (K - sigma M)^{-1} M in the
// M-inner product, largest transformed magnitudes = eigenvalues nearest
// (above) sigma. sigma < 0 keeps the factored matrix positive definite.
ArpackResult arpack_solve(const SpMat& K, const SpMat& M, int nev, int ncv,
                          double sigma, double tol, int max_iter,
                          std::uint64_t seed) {
  ArpackResult out;
  const a_int n = static_cast<a_int>(K.rows());
  SpMat shifted = K - sigma * M;
  Eigen::SimplicialLDLT<SpMat> solver;
  solver.compute(shifted);
  if (solver.info() != Eigen::Success) return out;

  a_int ido = 0, info = 1;  // info=1: user-supplied start vector
  a_int iparam[11] = {0}, ipntr[11] = {0};
  iparam[0] = 1;         // exact shifts
  iparam[2] = max_iter;  // outer iterations
  iparam[3] = 1;
  iparam[6] = 3;  // shift-invert on a generalized problem
  a_int lworkl = ncv * (ncv + 8);
  Eigen::VectorXd resid = seeded_vector(n, seed);
  std::vector<double> V(static_cast<size_t>(n) * ncv), workd(3 * n),
      workl(lworkl);

  while (true) {
    dsaupd_c(&ido, "G", n, "LM", nev, tol, resid.data(), ncv, V.data(), n,
             iparam, ipntr, workd.data(), workl.data(), lworkl, &info);
    if (ido == -1 || ido == 1) {
      Eigen::Map<Eigen::VectorXd> x(&workd[ipntr[0] - 1], n);
      Eigen::Map<Eigen::VectorXd> y(&workd[ipntr[1] - 1], n);
      if (ido == -1) {
        y = solver.solve(M * x);
      } else {
        Eigen::Map<Eigen::VectorXd> bx(&workd[ipntr[2] - 1], n);
        y = solver.solve(bx);
      }
    } else if (ido == 2) {
      Eigen::Map<Eigen::VectorXd> x(&workd[ipntr[0] - 1], n);
      Eigen::Map<Eigen::VectorXd> y(&workd[ipntr[1] - 1], n);
      y = M * x;
    } else {
      break;
    }
  }
  if (info < 0) return out;
  a_int nconv = iparam[4];
  if (nconv < nev) return out;

  std::vector<a_int> select(ncv, 1);
  Eigen::VectorXd d(nev);
  Eigen::MatrixXd Z(n, nev);
  a_int info2 = 0;
  dseupd_c(1, "A", select.data(), d.data(), Z.data(), n, sigma, "G", n, "LM",
           nev, tol, resid.data(), ncv, V.data(), n, iparam, ipntr,
           workd.data(), workl.data(), lworkl, &info2);
  if (info2 != 0) return out;

  std::vector<int> order(nev);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return d[a] < d[b]; });
  out.values.resize(nev);
  out.vectors.resize(n, nev);
  for (int j = 0; j < nev; ++j) {
    out.values[j] = d[order[j]];
    out.vectors.col(j) = Z.col(order[j]);
  }
  out.ok = true;
  return out;
}

void m_orthonormalize(Eigen::MatrixXd& V, const SpMat& M, double floor_val) {
  Eigen::MatrixXd G = V.transpose() * (M * V);
  for (int i = 0; i < G.rows(); ++i)
    if (G(i, i) < floor_val)
      fail(ErrorKind::internal,
           "eigenvector collapsed into the mass kernel");
  double dev = (G - Eigen::MatrixXd::Identity(G.rows(), G.cols()))
                   .cwiseAbs()
                   .maxCoeff();
  if (dev <= 1e-13) return;
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success)
    fail(ErrorKind::internal, "mass Gram not positive definite");
  // V <- V L^{-T}: exact M-orthonormalization, mixes only within clusters.
  V = llt.matrixL().solve(V.transpose()).transpose();
}

}  // namespace

std::pair<int, int> Spectrum::cluster_of(int k) const {
  const int n = count();
  if (k < 0 || k >= n) fail(ErrorKind::config, "cluster index out of range");
  double scale = std::max(values.cwiseAbs().maxCoeff(), 1e-300);
  auto same = [&](int i, int j) {
    double local = std::max({std::abs(values[i]), std::abs(values[j]),
                             1e-6 * scale});
    return std::abs(values[i] - values[j]) <= cluster_tol * local;
  };
  int lo = k, hi = k;
  while (lo > 0 && same(lo - 1, lo)) --lo;
  while (hi + 1 < n && same(hi, hi + 1)) ++hi;
  return {lo, hi};
}

Spectrum solve_eigen(const SpMat& K, const SpMat& M,
                     const SolveOptions& opts) {
  const int n = static_cast<int>(K.rows());
  if (K.rows() != K.cols() || M.rows() != M.cols() || K.rows() != M.rows())
    fail(ErrorKind::config, "pencil matrices must be square and conforming");
  if (opts.count < 1) fail(ErrorKind::config, "eigenpair count must be >= 1");
  const double mass = Eigen::VectorXd::Ones(n).dot(M * Eigen::VectorXd::Ones(n));
  if (!(mass > 0.0)) fail(ErrorKind::config, "mass matrix has no mass");
  const int rank = mass_rank(M, mass);
  if (opts.count > rank)
    fail(ErrorKind::config,
         "requested eigenpair count exceeds the measure-supported subspace");
  const double kernel_floor = opts.kernel_floor_rel * mass;

  Spectrum spectrum;
  spectrum.mass = mass;
  spectrum.cluster_tol = opts.cluster_tol;

  if (n <= 200 || opts.count > n / 4) {
    DensePencil dense = dense_solve(K, M, opts.count, kernel_floor);
    spectrum.values = dense.values;
    spectrum.vectors = dense.vectors;
  } else {
    const double trK = K.diagonal().sum();
    const double trM = M.diagonal().sum();
    double sigma = opts.sigma != 0.0 ? opts.sigma
                                     : -std::max(1e-3 * trK / trM,
                                                 1e-10 * trK / trM);
    int nev = opts.count;
    int ncv = std::min<int>(n, std::max(4 * nev + 20, 40));
    ArpackResult res;
    for (int attempt = 0; attempt < 3; ++attempt) {
      res = arpack_solve(K, M, nev, ncv, sigma, opts.tol, opts.max_iter,
                         opts.seed);
      if (res.ok) {
        double worst = 0.0;
        for (int j = 0; j < nev; ++j)
          worst = std::max(worst, pencil_residual(K, M, res.values[j],
                                                  res.vectors.col(j)));
        if (worst <= opts.residual_tol) break;
        res.ok = false;
      }
      // Retry informed: move the shift just below the lowest band and widen
      // the Krylov space.
      if (res.values.size() > 1 && res.values[1] > 0.0)
        sigma = -0.5 * res.values[1];
      else
        sigma *= 0.1;
      ncv = std::min<int>(n, 2 * ncv);
    }
    if (!res.ok)
      fail(ErrorKind::convergence,
           "eigensolver did not reach the requested residual tolerance");
    spectrum.values = res.values;
    spectrum.vectors = res.vectors;
  }

  m_orthonormalize(spectrum.vectors, M, kernel_floor);
  canonicalize_signs(spectrum.vectors);
  spectrum.residuals.resize(spectrum.count());
  for (int j = 0; j < spectrum.count(); ++j)
    spectrum.residuals[j] = pencil_residual(K, M, spectrum.values[j],
                                            spectrum.vectors.col(j));
  return spectrum;
}

double lambda_bar(const Spectrum& spectrum, int k) {
  if (k < 0 || k >= spectrum.count())
    fail(ErrorKind::config, "eigenvalue index out of range");
  return spectrum.values[k] * spectrum.mass;
}

Inertia ldlt_inertia(const SpMat& A, double zero_tol) {
  Eigen::SimplicialLDLT<SpMat> ldlt;
  SpMat work = A;
  double scale = 0.0;
  for (int i = 0; i < A.rows(); ++i)
    scale = std::max(scale, std::abs(A.coeff(i, i)));
  for (int attempt = 0;; ++attempt) {
    ldlt.compute(work);
    if (ldlt.info() == Eigen::Success) break;
    if (attempt >= 4)
      fail(ErrorKind::internal, "LDLT inertia factorization failed");
    // Exact zero pivot on an indefinite matrix: nudge the diagonal by an
    // amount far below any eigenvalue gap of interest.
    double shift = scale * 1e-13 * (attempt + 1);
    work = A;
    for (int i = 0; i < work.rows(); ++i) work.coeffRef(i, i) += shift;
  }
  Inertia inertia;
  Eigen::VectorXd d = ldlt.vectorD();
  for (int i = 0; i < d.size(); ++i) {
    if (d[i] < -zero_tol)
      ++inertia.negative;
    else if (d[i] > zero_tol)
      ++inertia.positive;
    else
      ++inertia.zero;
  }
  return inertia;
}

IndexReport spectral_index(const SpMat& K, const SpMat& M, const SpMat& M_ref,
                           double cutoff_tol) {
  if (!(cutoff_tol > 0.0))
    fail(ErrorKind::config, "index cutoff must be positive");
  SpMat A = K - M + cutoff_tol * M_ref;
  IndexReport report;
  report.cutoff_tol = cutoff_tol;
  report.negative_count = ldlt_inertia(A).negative;
  return report;
}

double constrained_lambda_k(const SpMat& K, const SpMat& M,
                            const Eigen::MatrixXd& orthogonal_to,
                            const SolveOptions& opts) {
  const int n = static_cast<int>(K.rows());
  const double mass = Eigen::VectorXd::Ones(n).dot(M * Eigen::VectorXd::Ones(n));
  const double kernel_floor = opts.kernel_floor_rel * mass;
  const int j = static_cast<int>(orthogonal_to.cols());

  // M-orthonormalize the constraint block; M-null columns are invalid input.
  Eigen::MatrixXd W = orthogonal_to;
  for (int c = 0; c < j; ++c) {
    for (int prev = 0; prev < c; ++prev)
      W.col(c) -= W.col(prev) * (W.col(prev).transpose() * (M * W.col(c)));
    double norm2 = W.col(c).dot(M * W.col(c));
    if (norm2 < kernel_floor)
      fail(ErrorKind::config,
           "orthogonality constraint is null against the measure");
    W.col(c) /= std::sqrt(norm2);
  }

  const int rank = mass_rank(M, mass);
  if (rank - j < 1)
    fail(ErrorKind::config, "deflation exhausts the measure-supported space");

  if (n <= 400) {
    DensePencil dense = dense_solve(K, M, rank, kernel_floor);
    // Restrict to the complement of span(W) inside the solved basis: the
    // coefficient matrix of W in the M-orthonormal eigenbasis.
    Eigen::MatrixXd C = dense.vectors.transpose() * (M * W);  // rank x j
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(C);
    Eigen::MatrixXd Q = qr.householderQ();
    Eigen::MatrixXd N = Q.rightCols(rank - j);  // complement basis
    Eigen::MatrixXd Ar =
        N.transpose() * dense.values.asDiagonal() * N;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Ar);
    return es.eigenvalues()[0];
  }

  // Large case: inverse iteration on the bordered system
  //   [K - sigma M   M W] [z ]   [M x]
  //   [ (M W)^T       0 ] [mu] = [ 0 ],
  // which applies the constrained shift-inverted operator exactly (z stays
  // M-orthogonal to span W). sigma < 0 keeps the pencil block definite on
  // the constraint manifold.
  Eigen::MatrixXd MW = M * W;
  const double sigma = -1e-3 * K.diagonal().sum() / M.diagonal().sum();
  std::vector<Eigen::Triplet<double>> trips;
  SpMat shifted = K - sigma * M;
  for (int c = 0; c < shifted.outerSize(); ++c)
    for (SpMat::InnerIterator it(shifted, c); it; ++it)
      trips.emplace_back(it.row(), it.col(), it.value());
  for (int c = 0; c < j; ++c)
    for (int a = 0; a < n; ++a)
      if (MW(a, c) != 0.0) {
        trips.emplace_back(a, n + c, MW(a, c));
        trips.emplace_back(n + c, a, MW(a, c));
      }
  SpMat bordered(n + j, n + j);
  bordered.setFromTriplets(trips.begin(), trips.end());
  Eigen::SparseLU<SpMat> lu;
  lu.compute(bordered);
  if (lu.info() != Eigen::Success)
    fail(ErrorKind::internal, "bordered factorization failed");

  auto apply = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + j);
    rhs.head(n) = M * x;
    Eigen::VectorXd sol = lu.solve(rhs);
    return Eigen::VectorXd(sol.head(n));
  };
  auto project = [&](Eigen::VectorXd& x) {
    x -= W * (MW.transpose() * x);
  };

  // Lanczos with full reorthogonalization in the M-inner product on the
  // constraint manifold; sizes here are small (one extreme eigenvalue).
  const int steps = std::min(n - j, 120);
  Eigen::VectorXd v = seeded_vector(n, opts.seed);
  project(v);
  v /= std::sqrt(v.dot(M * v));
  Eigen::MatrixXd basis(n, steps);
  Eigen::VectorXd alpha(steps), beta(steps);
  int built = 0;
  Eigen::VectorXd w;
  for (int s = 0; s < steps; ++s) {
    basis.col(s) = v;
    built = s + 1;
    w = apply(v);
    project(w);
    for (int r = 0; r <= s; ++r) {
      double h = basis.col(r).dot(M * w);
      if (r == s) alpha[s] = h;
      w -= h * basis.col(r);
    }
    double nb = std::sqrt(std::max(0.0, w.dot(M * w)));
    beta[s] = nb;
    if (nb < 1e-14) break;
    v = w / nb;
  }
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(built, built);
  for (int s = 0; s < built; ++s) {
    T(s, s) = alpha[s];
    if (s + 1 < built) {
      T(s, s + 1) = beta[s];
      T(s + 1, s) = beta[s];
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
  double theta = es.eigenvalues().maxCoeff();  // largest of (lambda-sigma)^-1
  if (!(theta > 0.0))
    fail(ErrorKind::convergence, "constrained eigenvalue iteration stalled");
  return sigma + 1.0 / theta;
}

}  // namespace lambar
