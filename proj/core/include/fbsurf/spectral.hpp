#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "fbsurf/laplacian.hpp"
#include "fbsurf/mesh.hpp"

namespace fbsurf {

enum class SpectralSource { IterativeSolver, Analytic, Cache };

std::string_view to_string(SpectralSource source);

/// Lowest eigenpairs of a Laplacian, in ascending order.
///
/// Eigenvectors hold nodal values at the system's unknown vertices
/// (`interior_map[row]` is the mesh vertex of a row) and are normalized
/// against the vertex quadrature weights, sum_x w(x) phi(x)^2 = 1. The first
/// entry whose magnitude exceeds 1e-8 of the column maximum is positive.
struct SpectralData {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;
    std::vector<int> interior_map;
    std::vector<double> row_weights;
    std::size_t num_vertices = 0;
    int dim = 0;
    WeightScheme scheme = WeightScheme::InverseSquareDistance;
    BoundaryCondition bc = BoundaryCondition::Dirichlet;
    double residual_tol = 0.0;
    SpectralSource source = SpectralSource::IterativeSolver;
    std::uint64_t mesh_hash = 0;
    /// Relative residuals ||L v - lambda v|| / ||L||_inf reached by the solver
    /// (empty for analytic spectra).
    std::vector<double> residuals;

    Eigen::Index n_computed() const { return eigenvalues.size(); }
};

struct EigenSolverOptions {
    int block_size = 8;
    /// Budget of operator applications (solves plus products); 0 means 300 * count.
    long max_applications = 0;
    std::uint64_t seed = 0x5eedULL;
};

/// The `count` algebraically smallest eigenpairs of `system.matrix`.
///
/// Shift-invert block Krylov iteration with full reorthogonalization and
/// Rayleigh-Ritz extraction on the original matrix; the block size must be at
/// least the largest eigenvalue multiplicity of interest. Converged when every
/// pair satisfies ||L v - lambda v||_2 <= tol * ||L||_inf. Closed systems get
/// their kernel eigenvalue (below 1e-9 * lambda_max) set to exactly 0.
///
/// Throws InvalidParameter for count outside [1, n] or tol outside
/// (1e-14, 1e-2), SolverError when the application budget runs out.
SpectralData smallest_eigenpairs(const LaplacianSystem& system, Eigen::Index count, double tol,
                                 const EigenSolverOptions& options = {});

struct IntervalEigenpair {
    double eigenvalue;
    double value;
};

/// Continuum eigenpair of -d^2/dx^2 on [0, 1].
/// Dirichlet: (k pi)^2 and sqrt(2) sin(k pi x).
/// Mixed (pinned at 0, free at 1): ((k - 1/2) pi)^2 and sqrt(2) sin((k - 1/2) pi x).
IntervalEigenpair analytic_interval_eigenpair(BoundaryCondition bc, int k, double x);

/// Analytic eigenpairs 1..count sampled at the unknown vertices of an
/// interval mesh on [0, 1]. Pinned vertices never enter the eigenvectors.
SpectralData analytic_interval_spectra(const Mesh& interval, BoundaryCondition bc, Eigen::Index count);

/// Gram matrix G_jk = sum_x w(x) phi_j(x) phi_k(x).
Eigen::MatrixXd quadrature_gram(const SpectralData& data);

/// Groups ascending eigenvalues whose consecutive gap is <= rel_gap * lambda_max.
std::vector<std::vector<Eigen::Index>> eigenvalue_clusters(const Eigen::VectorXd& eigenvalues,
                                                          double rel_gap = 1e-6);

/// Recomputes the relative residual of every stored pair against a system.
std::vector<double> relative_residuals(const LaplacianSystem& system, const SpectralData& data);

// ---------------------------------------------------------------------------
// Cache

/// Spectral data together with the mesh it was computed on.
struct CachedSpectra {
    Mesh mesh;
    SpectralData spectra;
};

/// Binary container: 8-byte magic, u32 version, length-prefixed JSON header
/// (hash, tags, tolerance, sizes), then little-endian payload (eigenvalues,
/// column-major eigenvectors, row map, mesh positions and connectivity) and a
/// trailing FNV-1a checksum. Written atomically.
void store_spectral_cache(const std::filesystem::path& path, const SpectralData& data, const Mesh& mesh);

/// Throws Format on a truncated or corrupt file, StaleCache when the stored
/// hash disagrees with the embedded mesh or with `expected_hash`.
/// The returned spectra carry source = Cache.
CachedSpectra load_spectral_cache(const std::filesystem::path& path,
                                  std::optional<std::uint64_t> expected_hash = std::nullopt);

/// Eigenvalues plus provenance as a JSON document.
std::string eigenvalues_json(const SpectralData& data);

std::string hash_to_hex(std::uint64_t hash);

}  // namespace fbsurf
