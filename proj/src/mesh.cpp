#include "lambar/mesh.hpp"

#include <algorithm>
#include <array>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "lambar/error.hpp"

namespace lambar {

namespace {

double factorial(int n) {
  double r = 1.0;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

}  // namespace

void SimplicialMesh::finalize() {
  const int m = dim;
  const int nc = n_cells();
  if (m < 2 || m > 3) fail(ErrorKind::config, "mesh dimension must be 2 or 3");
  if (cells.cols() != m + 1)
    fail(ErrorKind::config, "cell arity does not match mesh dimension");
  cell_metric.assign(nc, Eigen::MatrixXd());
  cell_stiffness.assign(nc, Eigen::MatrixXd());
  cell_volume.resize(nc);
  const double fact = factorial(m);
  for (int c = 0; c < nc; ++c) {
    Eigen::MatrixXd edges(m, vertices.cols());
    for (int i = 1; i <= m; ++i) {
      Eigen::VectorXd d =
          vertices.row(cells(c, i)) - vertices.row(cells(c, 0));
      if (period > 0.0)
        for (int a = 0; a < d.size(); ++a)
          d[a] -= period * std::round(d[a] / period);
      edges.row(i - 1) = d;
    }
    Eigen::MatrixXd gram = edges * edges.transpose();
    double det = gram.determinant();
    if (!(det > 0.0))
      fail(ErrorKind::config, "degenerate cell " + std::to_string(c));
    double vol = std::sqrt(det) / fact;
    Eigen::MatrixXd ginv = gram.inverse();
    Eigen::MatrixXd local = Eigen::MatrixXd::Zero(m + 1, m + 1);
    // Gradients of the barycentric functions pair through the inverse Gram;
    // the zeroth gradient is minus the sum of the others.
    local.block(1, 1, m, m) = vol * ginv;
    for (int i = 1; i <= m; ++i) {
      double s = local.row(i).segment(1, m).sum();
      local(i, 0) = -s;
      local(0, i) = -s;
    }
    local(0, 0) = -local.row(0).segment(1, m).sum();
    cell_metric[c] = std::move(gram);
    cell_stiffness[c] = std::move(local);
    cell_volume[c] = vol;
  }
}

void SimplicialMesh::validate() const {
  const int m = dim;
  const int nv = n_vertices();
  if (static_cast<int>(cell_volume.size()) != n_cells())
    fail(ErrorKind::config, "mesh not finalized");
  std::map<std::vector<int>, int> facet_count;
  for (int c = 0; c < n_cells(); ++c) {
    for (int j = 0; j <= m; ++j) {
      if (cells(c, j) < 0 || cells(c, j) >= nv)
        fail(ErrorKind::config, "cell vertex index out of range");
    }
    for (int drop = 0; drop <= m; ++drop) {
      std::vector<int> facet;
      for (int j = 0; j <= m; ++j)
        if (j != drop) facet.push_back(cells(c, j));
      std::sort(facet.begin(), facet.end());
      facet_count[facet] += 1;
    }
  }
  for (const auto& [facet, count] : facet_count) {
    if (count != 2)
      fail(ErrorKind::config,
           "mesh is not closed: a facet is shared by " +
               std::to_string(count) + " cells");
  }
  for (int c = 0; c < n_cells(); ++c)
    if (!(cell_volume[c] > 0.0))
      fail(ErrorKind::config, "nonpositive cell volume");
}

SimplicialMesh build_flat_torus(int dim, int n_per_axis, double side) {
  if (dim != 2 && dim != 3)
    fail(ErrorKind::config, "torus dimension must be 2 or 3");
  if (n_per_axis < 3)
    fail(ErrorKind::config,
         "torus needs at least 3 vertices per axis for wrap-exact geometry");
  if (!(side > 0.0)) fail(ErrorKind::config, "torus side must be positive");

  SimplicialMesh mesh;
  mesh.dim = dim;
  mesh.period = side;
  const int n = n_per_axis;
  const double h = side / n;

  if (dim == 2) {
    mesh.vertices.resize(n * n, 2);
    auto vid = [&](int i, int j) {
      return ((i % n + n) % n) * n + ((j % n + n) % n);
    };
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        mesh.vertices.row(vid(i, j)) << i * h, j * h;
    mesh.cells.resize(2 * n * n, 3);
    int c = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        int a = vid(i, j), b = vid(i + 1, j), d = vid(i + 1, j + 1),
            e = vid(i, j + 1);
        mesh.cells.row(c++) << a, b, d;
        mesh.cells.row(c++) << a, d, e;
      }
  } else {
    mesh.vertices.resize(n * n * n, 3);
    auto vid = [&](int i, int j, int k) {
      auto w = [&](int x) { return (x % n + n) % n; };
      return (w(i) * n + w(j)) * n + w(k);
    };
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          mesh.vertices.row(vid(i, j, k)) << i * h, j * h, k * h;
    // Kuhn subdivision: six tetrahedra per cube, one per axis permutation,
    // all sharing the main diagonal. Face-to-face across neighbors.
    const std::array<std::array<int, 3>, 6> perms = {
        {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
    mesh.cells.resize(6 * n * n * n, 4);
    int c = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (const auto& p : perms) {
            std::array<int, 3> at = {i, j, k};
            std::array<int, 4> tet;
            tet[0] = vid(at[0], at[1], at[2]);
            for (int s = 0; s < 3; ++s) {
              at[p[s]] += 1;
              tet[s + 1] = vid(at[0], at[1], at[2]);
            }
            mesh.cells.row(c++) << tet[0], tet[1], tet[2], tet[3];
          }
  }
  mesh.finalize();
  return mesh;
}

namespace {

using EdgeKey = std::pair<int, int>;

int midpoint(std::map<EdgeKey, int>& cache, std::vector<Eigen::VectorXd>& verts,
             int a, int b) {
  EdgeKey key = {std::min(a, b), std::max(a, b)};
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  Eigen::VectorXd mid = 0.5 * (verts[a] + verts[b]);
  mid.normalize();
  verts.push_back(mid);
  int idx = static_cast<int>(verts.size()) - 1;
  cache.emplace(key, idx);
  return idx;
}

SimplicialMesh build_icosphere(int level) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  std::vector<Eigen::VectorXd> verts;
  auto add = [&](double x, double y, double z) {
    Eigen::VectorXd v(3);
    v << x, y, z;
    v.normalize();
    verts.push_back(v);
  };
  add(-1, t, 0); add(1, t, 0); add(-1, -t, 0); add(1, -t, 0);
  add(0, -1, t); add(0, 1, t); add(0, -1, -t); add(0, 1, -t);
  add(t, 0, -1); add(t, 0, 1); add(-t, 0, -1); add(-t, 0, 1);
  std::vector<std::array<int, 3>> faces = {
      {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int l = 0; l < level; ++l) {
    std::map<EdgeKey, int> cache;
    std::vector<std::array<int, 3>> next;
    next.reserve(faces.size() * 4);
    for (const auto& f : faces) {
      int ab = midpoint(cache, verts, f[0], f[1]);
      int bc = midpoint(cache, verts, f[1], f[2]);
      int ca = midpoint(cache, verts, f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    faces.swap(next);
  }
  SimplicialMesh mesh;
  mesh.dim = 2;
  mesh.vertices.resize(verts.size(), 3);
  for (size_t i = 0; i < verts.size(); ++i) mesh.vertices.row(i) = verts[i];
  mesh.cells.resize(faces.size(), 3);
  for (size_t i = 0; i < faces.size(); ++i)
    mesh.cells.row(i) << faces[i][0], faces[i][1], faces[i][2];
  return mesh;
}

SimplicialMesh build_crosspolytope_sphere(int level) {
  std::vector<Eigen::VectorXd> verts;
  for (int s = 0; s < 2; ++s)
    for (int i = 0; i < 4; ++i) {
      Eigen::VectorXd v = Eigen::VectorXd::Zero(4);
      v[i] = s == 0 ? 1.0 : -1.0;
      verts.push_back(v);
    }
  // One tetrahedral facet per sign pattern; vertex +e_i is i, -e_i is 4+i.
  std::vector<std::array<int, 4>> cells;
  for (int mask = 0; mask < 16; ++mask) {
    std::array<int, 4> tet;
    for (int i = 0; i < 4; ++i) tet[i] = (mask >> i) & 1 ? 4 + i : i;
    cells.push_back(tet);
  }
  for (int l = 0; l < level; ++l) {
    std::map<EdgeKey, int> cache;
    std::vector<std::array<int, 4>> next;
    next.reserve(cells.size() * 8);
    for (const auto& c : cells) {
      int m01 = midpoint(cache, verts, c[0], c[1]);
      int m02 = midpoint(cache, verts, c[0], c[2]);
      int m03 = midpoint(cache, verts, c[0], c[3]);
      int m12 = midpoint(cache, verts, c[1], c[2]);
      int m13 = midpoint(cache, verts, c[1], c[3]);
      int m23 = midpoint(cache, verts, c[2], c[3]);
      next.push_back({c[0], m01, m02, m03});
      next.push_back({c[1], m01, m12, m13});
      next.push_back({c[2], m02, m12, m23});
      next.push_back({c[3], m03, m13, m23});
      // Interior octahedron: split around its shortest diagonal so the
      // children stay well shaped after reprojection.
      const std::array<std::array<int, 2>, 3> diags = {
          {{m01, m23}, {m02, m13}, {m03, m12}}};
      int best = 0;
      double best_len = (verts[m01] - verts[m23]).squaredNorm();
      for (int d = 1; d < 3; ++d) {
        double len = (verts[diags[d][0]] - verts[diags[d][1]]).squaredNorm();
        if (len < best_len) {
          best = d;
          best_len = len;
        }
      }
      int d0 = diags[best][0], d1 = diags[best][1];
      std::array<int, 4> ring;
      if (best == 0) ring = {m02, m03, m13, m12};
      else if (best == 1) ring = {m01, m03, m23, m12};
      else ring = {m01, m13, m23, m02};
      for (int r = 0; r < 4; ++r)
        next.push_back({d0, d1, ring[r], ring[(r + 1) % 4]});
    }
    cells.swap(next);
  }
  SimplicialMesh mesh;
  mesh.dim = 3;
  mesh.vertices.resize(verts.size(), 4);
  for (size_t i = 0; i < verts.size(); ++i) mesh.vertices.row(i) = verts[i];
  mesh.cells.resize(cells.size(), 4);
  for (size_t i = 0; i < cells.size(); ++i)
    mesh.cells.row(i) << cells[i][0], cells[i][1], cells[i][2], cells[i][3];
  return mesh;
}

}  // namespace

SimplicialMesh build_round_sphere(int dim, int level) {
  if (dim != 2 && dim != 3)
    fail(ErrorKind::config, "sphere dimension must be 2 or 3");
  if (level < 0) fail(ErrorKind::config, "subdivision level must be >= 0");
  const double cell_count =
      dim == 2 ? 20.0 * std::pow(4.0, level) : 16.0 * std::pow(8.0, level);
  if (cell_count > 2.5e6)
    fail(ErrorKind::config, "subdivision level too large (cell budget)");
  SimplicialMesh mesh =
      dim == 2 ? build_icosphere(level) : build_crosspolytope_sphere(level);
  mesh.finalize();
  return mesh;
}

Eigen::SparseMatrix<double> assemble_stiffness(const SimplicialMesh& mesh) {
  const int m = mesh.dim;
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(mesh.n_cells()) * (m + 1) * (m + 1));
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const Eigen::MatrixXd& local = mesh.cell_stiffness[c];
    for (int a = 0; a <= m; ++a)
      for (int b = 0; b <= m; ++b)
        trips.emplace_back(mesh.cells(c, a), mesh.cells(c, b), local(a, b));
  }
  Eigen::SparseMatrix<double> K(mesh.n_vertices(), mesh.n_vertices());
  K.setFromTriplets(trips.begin(), trips.end());
  return K;
}

Eigen::SparseMatrix<double> assemble_mass(const SimplicialMesh& mesh,
                                          const Density& density) {
  const int m = mesh.dim;
  if (density.rho.size() != mesh.n_cells())
    fail(ErrorKind::config, "density size does not match cell count");
  const double denom = (m + 1.0) * (m + 2.0);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<size_t>(mesh.n_cells()) * (m + 1) * (m + 1));
  for (int c = 0; c < mesh.n_cells(); ++c) {
    double rho = density.rho[c];
    if (rho < 0.0) fail(ErrorKind::config, "negative density value");
    if (rho == 0.0) continue;
    double base = rho * mesh.cell_volume[c] / denom;
    for (int a = 0; a <= m; ++a)
      for (int b = 0; b <= m; ++b)
        trips.emplace_back(mesh.cells(c, a), mesh.cells(c, b),
                           base * (a == b ? 2.0 : 1.0));
  }
  Eigen::SparseMatrix<double> M(mesh.n_vertices(), mesh.n_vertices());
  M.setFromTriplets(trips.begin(), trips.end());
  return M;
}

Density uniform_density(const SimplicialMesh& mesh, double value, double cap) {
  Density d;
  d.rho = Eigen::VectorXd::Constant(mesh.n_cells(), value);
  d.cap = cap;
  return d;
}

Density uniform_probability_density(const SimplicialMesh& mesh, double cap) {
  return uniform_density(mesh, 1.0 / mesh.total_volume(), cap);
}

double total_mass(const SimplicialMesh& mesh, const Density& density) {
  return density.rho.dot(mesh.cell_volume);
}

Eigen::VectorXd lumped_vertex_masses(const SimplicialMesh& mesh,
                                     const Density& density) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(mesh.n_vertices());
  const double share = 1.0 / (mesh.dim + 1);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    double piece = density.rho[c] * mesh.cell_volume[c] * share;
    for (int a = 0; a <= mesh.dim; ++a) w[mesh.cells(c, a)] += piece;
  }
  return w;
}

Eigen::VectorXd cell_pair_average(const SimplicialMesh& mesh,
                                  const Eigen::VectorXd& u,
                                  const Eigen::VectorXd& v) {
  const int m = mesh.dim;
  const double denom = (m + 1.0) * (m + 2.0);
  Eigen::VectorXd out(mesh.n_cells());
  for (int c = 0; c < mesh.n_cells(); ++c) {
    double sum_u = 0.0, sum_v = 0.0, dot = 0.0;
    for (int a = 0; a <= m; ++a) {
      double ua = u[mesh.cells(c, a)], va = v[mesh.cells(c, a)];
      sum_u += ua;
      sum_v += va;
      dot += ua * va;
    }
    out[c] = (sum_u * sum_v + dot) / denom;
  }
  return out;
}

Eigen::VectorXd cell_energy_density(const SimplicialMesh& mesh,
                                    const Eigen::MatrixXd& components) {
  const int m = mesh.dim;
  Eigen::VectorXd e = Eigen::VectorXd::Zero(mesh.n_cells());
  Eigen::VectorXd local(m + 1);
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const Eigen::MatrixXd& K = mesh.cell_stiffness[c];
    double acc = 0.0;
    for (int col = 0; col < components.cols(); ++col) {
      for (int a = 0; a <= m; ++a) local[a] = components(mesh.cells(c, a), col);
      acc += local.dot(K * local);
    }
    e[c] = acc / mesh.cell_volume[c];
  }
  return e;
}

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

void write_mesh(const SimplicialMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::config, "cannot open " + path + " for writing");
  out << "DIM " << mesh.dim << "\n";
  if (mesh.period > 0.0) out << "PERIODIC " << fmt17(mesh.period) << "\n";
  out << "VERTICES " << mesh.n_vertices() << "\n";
  for (int i = 0; i < mesh.n_vertices(); ++i) {
    for (int j = 0; j < mesh.vertices.cols(); ++j)
      out << (j ? " " : "") << fmt17(mesh.vertices(i, j));
    out << "\n";
  }
  out << "CELLS " << mesh.n_cells() << "\n";
  for (int c = 0; c < mesh.n_cells(); ++c) {
    for (int j = 0; j < mesh.cells.cols(); ++j)
      out << (j ? " " : "") << mesh.cells(c, j);
    out << "\n";
  }
}

SimplicialMesh read_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::config, "cannot open " + path);
  std::string tag;
  SimplicialMesh mesh;
  if (!(in >> tag) || tag != "DIM")
    fail(ErrorKind::config, "mesh file must start with DIM");
  in >> mesh.dim;
  in >> tag;
  if (tag == "PERIODIC") {
    in >> mesh.period;
    in >> tag;
  }
  if (tag != "VERTICES") fail(ErrorKind::config, "expected VERTICES block");
  int nv = 0;
  in >> nv;
  if (nv <= 0) fail(ErrorKind::config, "bad vertex count");
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  rows.reserve(nv);
  for (int i = 0; i < nv; ++i) {
    if (!std::getline(in, line))
      fail(ErrorKind::config, "truncated vertex block");
    std::istringstream ls(line);
    std::vector<double> row;
    double x;
    while (ls >> x) row.push_back(x);
    if (row.empty() || (i > 0 && row.size() != rows.front().size()))
      fail(ErrorKind::config, "inconsistent vertex line");
    rows.push_back(std::move(row));
  }
  mesh.vertices.resize(nv, rows.front().size());
  for (int i = 0; i < nv; ++i)
    for (size_t j = 0; j < rows[i].size(); ++j)
      mesh.vertices(i, j) = rows[i][j];
  if (!(in >> tag) || tag != "CELLS")
    fail(ErrorKind::config, "expected CELLS block");
  int nc = 0;
  in >> nc;
  if (nc <= 0) fail(ErrorKind::config, "bad cell count");
  mesh.cells.resize(nc, mesh.dim + 1);
  for (int c = 0; c < nc; ++c)
    for (int j = 0; j <= mesh.dim; ++j)
      if (!(in >> mesh.cells(c, j)))
        fail(ErrorKind::config, "truncated cell block");
  mesh.finalize();
  return mesh;
}

void write_coo(const Eigen::SparseMatrix<double>& A, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::config, "cannot open " + path + " for writing");
  for (int k = 0; k < A.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(A, k); it; ++it)
      out << it.row() << " " << it.col() << " " << fmt17(it.value()) << "\n";
}

}  // namespace lambar
