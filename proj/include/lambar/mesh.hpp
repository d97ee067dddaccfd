#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <limits>
#include <string>
#include <vector>

namespace lambar {

// Piecewise-constant density against the volume measure of the mesh.
// rho holds one value per cell; cap is the uniform upper bound the
// optimizer enforces (infinity = uncapped).
struct Density {
  Eigen::VectorXd rho;
  double cap = std::numeric_limits<double>::infinity();
};

// Simplicial mesh of a closed manifold of intrinsic dimension dim (2 or 3).
// Geometry is carried per cell as the Gram matrix of its edge vectors, so a
// flat periodic box and an embedded sphere go through the same assembly.
// period > 0 marks a flat periodic mesh with the given box side; edge
// vectors are then taken with minimal-image wrapping.
struct SimplicialMesh {
  int dim = 0;
  Eigen::MatrixXd vertices;  // n_vertices x ambient_dim
  Eigen::MatrixXi cells;     // n_cells x (dim+1), 0-based
  double period = 0.0;

  // Derived per-cell data, filled by finalize().
  std::vector<Eigen::MatrixXd> cell_metric;     // dim x dim Gram matrices
  Eigen::VectorXd cell_volume;
  std::vector<Eigen::MatrixXd> cell_stiffness;  // (dim+1)^2 local stiffness

  int n_vertices() const { return static_cast<int>(vertices.rows()); }
  int n_cells() const { return static_cast<int>(cells.rows()); }
  double total_volume() const { return cell_volume.sum(); }

  // Recomputes metric, volume and local stiffness from vertices and cells.
  void finalize();

  // Checks that the complex is a closed manifold: every facet is shared by
  // exactly two cells, every cell volume is positive, indices are in range.
  void validate() const;
};

// Flat torus (R/side Z)^dim. n_per_axis >= 3 so that minimal-image wrapping
// reconstructs the cell geometry exactly. Squares split into 2 triangles,
// cubes into 6 tetrahedra sharing the main diagonal.
SimplicialMesh build_flat_torus(int dim, int n_per_axis, double side);

// Unit round sphere S^dim. dim 2: subdivided icosahedron; dim 3: subdivided
// boundary of the 4-dimensional cross-polytope. level = number of 1:4
// (resp. 1:8) subdivision rounds; midpoints are reprojected each round.
SimplicialMesh build_round_sphere(int dim, int level);

// P1 stiffness matrix of the Laplace-Beltrami operator. Rows sum to zero;
// the constant vector spans the kernel on a connected mesh.
Eigen::SparseMatrix<double> assemble_stiffness(const SimplicialMesh& mesh);

// P1 mass matrix weighted by the per-cell density. Linear in rho;
// 1^T M 1 equals total_mass(mesh, density).
Eigen::SparseMatrix<double> assemble_mass(const SimplicialMesh& mesh,
                                          const Density& density);

Density uniform_density(const SimplicialMesh& mesh, double value = 1.0,
                        double cap = std::numeric_limits<double>::infinity());

// Density with total mass 1 (rho = 1/volume on every cell).
Density uniform_probability_density(
    const SimplicialMesh& mesh,
    double cap = std::numeric_limits<double>::infinity());

double total_mass(const SimplicialMesh& mesh, const Density& density);

// Per-vertex masses: each cell spreads its mass equally over its corners.
Eigen::VectorXd lumped_vertex_masses(const SimplicialMesh& mesh,
                                     const Density& density);

// Exact per-cell average of the product of two P1 functions.
Eigen::VectorXd cell_pair_average(const SimplicialMesh& mesh,
                                  const Eigen::VectorXd& u,
                                  const Eigen::VectorXd& v);

// Per-cell squared-gradient density summed over the columns of `components`
// (the energy density of a P1 map into R^c).
Eigen::VectorXd cell_energy_density(const SimplicialMesh& mesh,
                                    const Eigen::MatrixXd& components);

// Plain-text mesh format:
//   DIM m
//   PERIODIC side          (optional, flat periodic meshes only)
//   VERTICES n             followed by n coordinate lines
//   CELLS n                followed by n index lines, 0-based
// Coordinates are written with 17 significant digits and round-trip exactly.
void write_mesh(const SimplicialMesh& mesh, const std::string& path);
SimplicialMesh read_mesh(const std::string& path);

// Sparse matrix export, one "row col value" triple per line, 0-based.
void write_coo(const Eigen::SparseMatrix<double>& A, const std::string& path);

}  // namespace lambar
