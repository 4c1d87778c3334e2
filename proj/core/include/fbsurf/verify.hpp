#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "fbsurf/laplacian.hpp"
#include "fbsurf/mesh.hpp"
#include "fbsurf/spectral.hpp"
#include "fbsurf/synthesis.hpp"

namespace fbsurf {

/// Brownian-motion covariance s ^ t.
double min_kernel(double s, double t);

/// Field values on a fixed evaluation grid for one seed.
using PathGenerator = std::function<std::vector<double>(std::uint64_t seed)>;
using Kernel = std::function<double(double, double)>;

struct CovarianceReport {
    std::vector<double> grid;
    Eigen::MatrixXd empirical;   // exactly symmetric sample covariance (n - 1 normalization)
    Eigen::MatrixXd analytic;
    double max_abs_error = 0.0;
    double min_eigenvalue = 0.0; // of the empirical matrix
    Eigen::Index n_samples = 0;
    std::uint64_t base_seed = 0;
};

/// Draws n_samples fields with seeds base_seed, base_seed + 1, ... and compares
/// their sample covariance on the grid against the target. Accumulation runs
/// in a fixed order, so the report is a pure function of its inputs.
CovarianceReport covariance_test(const PathGenerator& generator, const Eigen::MatrixXd& target,
                                 std::span<const double> grid, Eigen::Index n_samples, std::uint64_t base_seed);
CovarianceReport covariance_test(const PathGenerator& generator, const Kernel& kernel, std::span<const double> grid,
                                 Eigen::Index n_samples, std::uint64_t base_seed);

/// Generator over precomputed spectra returning values at the listed vertices.
PathGenerator spectral_path_generator(SpectralData spectra, double alpha, Eigen::Index n_terms,
                                      std::vector<int> grid_vertices);

/// Exact covariance of the truncated series at the listed vertices:
/// sum_{k <= N0} lambda_k^-(2 (d/4 + alpha/2)) phi_k(s) phi_k(t).
Eigen::MatrixXd truncated_covariance(const SpectralData& spectra, double alpha, Eigen::Index n_terms,
                                     std::span<const int> grid_vertices);

enum class ShapeFamily { Interval, Sphere };

struct ConvergenceReport {
    std::vector<int> mesh_sizes;                          // vertex count (interval) or subdivisions (sphere)
    std::vector<double> mesh_widths;                      // mean edge length
    std::vector<std::vector<double>> eigenvalues;         // per resolution
    std::vector<std::vector<double>> eigenvalue_errors;   // per resolution, per mode
    std::vector<std::vector<double>> eigenfunction_errors;
    std::vector<double> fitted_rates;                     // per mode; empty with fewer than 3 resolutions
    std::vector<std::string> failures;                    // per resolution, empty string on success
};

/// Interval: errors against the analytic spectrum, eigenfunctions compared in
/// the quadrature L2 norm after sign alignment (subspace distance inside
/// clusters). Sphere: scale-free eigenvalue errors 2 lambda_k / mean(first
/// nonzero cluster) - l(l + 1); no eigenfunction errors. Solver failures are
/// recorded per resolution.
ConvergenceReport spectral_convergence_study(ShapeFamily family, std::span<const int> resolutions,
                                             Eigen::Index n_modes, BoundaryCondition bc, WeightScheme scheme,
                                             double tol = 1e-10);

/// Distance between two quadrature-orthonormal function sets: sqrt of the sum
/// squared sines of the principal angles between their spans.
double subspace_distance(const Eigen::MatrixXd& computed, const Eigen::MatrixXd& reference,
                         std::span<const double> weights);

struct ClusterReport {
    std::vector<std::size_t> cluster_sizes;
    std::vector<double> cluster_means;
    std::vector<double> gaps;          // consecutive eigenvalue differences
    double kernel_eigenvalue = 0.0;
    double kernel_bound = 0.0;         // 1e-9 * lambda_max
    double ratio = 0.0;                // second / first nonzero cluster mean
    bool kernel_ok = false;
    bool sizes_ok = false;
    bool ratio_ok = false;             // within 10% of 3

    bool passed() const { return kernel_ok && sizes_ok && ratio_ok; }
};

/// Spherical-harmonic structure of a closed sphere spectrum: clusters 1, 3, 5
/// and a second/first nonzero cluster ratio near 6/2. Throws
/// StructureMismatch (listing the gaps) when the first three clusters do not
/// have sizes 1, 3, 5.
ClusterReport sphere_multiplicity_check(const SpectralData& spectra);

struct WeylTailReport {
    double alpha = 0.0;
    int dim = 0;
    Eigen::Index n = 0;
    double fitted_exponent = 0.0;      // slope of log contribution vs log index
    double predicted_exponent = 0.0;   // -(1 + 2 alpha / d)
    double relative_error = 0.0;
    std::vector<double> indices;
    std::vector<double> contributions;
};

/// Fits the decay of per-term variance lambda_k^-(d/2 + alpha) ||phi_k||^2
/// over nonzero modes k in [n, 2n].
WeylTailReport weyl_tail_check(const SpectralData& spectra, double alpha, int dim, Eigen::Index n);

/// Mean of (f(x) - f(y))^2 over mesh edges.
double mean_squared_edge_increment(const Mesh& mesh, std::span<const double> values);

struct RoughnessReport {
    std::vector<double> alphas;
    std::vector<double> mean_sq_increment;  // ensemble average per alpha
    bool strictly_decreasing = false;
};

/// Same seeds for every alpha; Riesz synthesis when origin is set.
RoughnessReport roughness_sweep(const Mesh& mesh, const SpectralData& spectra, std::span<const double> alphas,
                                Eigen::Index n_terms, Eigen::Index n_seeds, std::uint64_t base_seed,
                                std::optional<int> origin = std::nullopt);

struct MomentReport {
    Eigen::Index n = 0;
    double mean = 0.0;
    double variance = 0.0;
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
};

MomentReport standardized_moments(std::span<const double> samples);

/// Moments of a field's value at one vertex across n_samples consecutive seeds.
MomentReport point_moments(const SpectralData& spectra, const SynthesisConfig& cfg, int vertex,
                           Eigen::Index n_samples, std::uint64_t base_seed);

// JSON serialization of reports.
std::string to_json(const CovarianceReport& report);
std::string to_json(const ConvergenceReport& report);
std::string to_json(const ClusterReport& report);
std::string to_json(const WeylTailReport& report);

}  // namespace fbsurf
