#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "fbsurf/mesh.hpp"

namespace fbsurf {

using SparseMatrix = Eigen::SparseMatrix<double>;

enum class WeightScheme {
    InverseSquareDistance,  // w_xy = |x - y|^-2
    Cotangent,              // FEM stiffness (cotangent in 2D, 1/length in 1D), mass-normalized
};

enum class BoundaryCondition {
    Dirichlet,  // every boundary vertex pinned to zero
    Closed,     // no boundary; the constant vector spans the kernel
    Mixed,      // curves only: first boundary vertex pinned, the other end free
};

std::string_view to_string(WeightScheme scheme);
std::string_view to_string(BoundaryCondition bc);
/// Accepts "invsq" / "inverse-square-distance" and "cotan" / "cotangent".
WeightScheme parse_weight_scheme(std::string_view text);
BoundaryCondition parse_boundary_condition(std::string_view text);

/// Symmetric Laplacian over the unknown (non-pinned) vertices of a mesh.
struct LaplacianSystem {
    SparseMatrix matrix;
    std::vector<int> interior_map;    // matrix row -> mesh vertex
    std::vector<int> row_of_vertex;   // mesh vertex -> matrix row, -1 if pinned
    std::vector<double> row_weights;  // quadrature weight of each row's vertex
    /// Cotangent scheme only: nodal values are `nodal_scale .* eigenvector`
    /// (the matrix is M^-1/2 C M^-1/2). Empty for the inverse-square scheme.
    Eigen::VectorXd nodal_scale;
    WeightScheme scheme = WeightScheme::InverseSquareDistance;
    BoundaryCondition bc = BoundaryCondition::Dirichlet;
    int dim = 0;
    std::size_t num_vertices = 0;
    std::uint64_t mesh_hash = 0;  // content hash of mesh + scheme + bc

    Eigen::Index size() const { return matrix.rows(); }
};

/// Per-edge weights aligned with mesh.edges().
std::vector<double> edge_weights(const Mesh& mesh, WeightScheme scheme);

/// Full vertex-by-vertex graph Laplacian: L_xy = -w_xy, L_xx = sum_y w_xy.
/// Not mass-normalized, for either scheme.
SparseMatrix graph_laplacian(const Mesh& mesh, WeightScheme scheme);

/// Assembles the reduced system. Dirichlet rows and columns are deleted, not
/// penalized. Throws Configuration for a boundary condition the mesh cannot
/// carry, Topology for a disconnected set of unknowns.
LaplacianSystem assemble(const Mesh& mesh, WeightScheme scheme, BoundaryCondition bc);

std::uint64_t system_hash(const Mesh& mesh, WeightScheme scheme, BoundaryCondition bc);

/// max_i sum_j |A_ij|; an upper bound on the spectral norm of a symmetric matrix.
double inf_norm(const SparseMatrix& a);

/// Matrix Market "coordinate real symmetric" (lower triangle, 1-based).
void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& a);
SparseMatrix read_matrix_market(const std::filesystem::path& path);

}  // namespace fbsurf
