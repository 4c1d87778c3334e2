#include "fbsurf/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "fbsurf/error.hpp"

namespace fbsurf {

namespace {

using Eigen::Index;

std::vector<int> row_lookup(const SpectralData& spectra) {
    std::vector<int> row(spectra.num_vertices, -1);
    for (std::size_t r = 0; r < spectra.interior_map.size(); ++r) row[spectra.interior_map[r]] = static_cast<int>(r);
    return row;
}

// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        std::vector<double> r(static_cast<std::size_t>(m.cols()));
        for (Index j = 0; j < m.cols(); ++j) r[j] = m(i, j);
        rows.push_back(r);
    }
    return rows;
}

nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

}  // namespace

double min_kernel(double s, double t) { return std::min(s, t); }

CovarianceReport covariance_test(const PathGenerator& generator, const Eigen::MatrixXd& target,
                                 std::span<const double> grid, Index n_samples, std::uint64_t base_seed) {
    if (n_samples < 1000) throw Error(ErrorCategory::InvalidParameter, "covariance test needs at least 1000 samples");
    const auto m = static_cast<Index>(grid.size());
    if (target.rows() != m || target.cols() != m) {
        throw Error(ErrorCategory::InvalidParameter, "target covariance does not match the grid");
    }

    Eigen::VectorXd sum = Eigen::VectorXd::Zero(m);
    Eigen::MatrixXd cross = Eigen::MatrixXd::Zero(m, m);
    for (Index i = 0; i < n_samples; ++i) {
        const std::vector<double> x = generator(base_seed + static_cast<std::uint64_t>(i));
        if (static_cast<Index>(x.size()) != m) {
            throw Error(ErrorCategory::InvalidParameter, "generator returned a path of the wrong length");
        }
        for (Index b = 0; b < m; ++b) {
            sum[b] += x[b];
            for (Index a = 0; a <= b; ++a) cross(a, b) += x[a] * x[b];
        }
    }

    CovarianceReport rep;
    rep.grid.assign(grid.begin(), grid.end());
    rep.n_samples = n_samples;
    rep.base_seed = base_seed;
    rep.analytic = target;
    rep.empirical.resize(m, m);
    const double n = static_cast<double>(n_samples);
    const Eigen::VectorXd mean = sum / n;
    for (Index b = 0; b < m; ++b) {
        for (Index a = 0; a <= b; ++a) {
            const double c = (cross(a, b) - n * mean[a] * mean[b]) / (n - 1.0);
            rep.empirical(a, b) = c;
            rep.empirical(b, a) = c;
        }
    }
    rep.max_abs_error = (rep.empirical - rep.analytic).cwiseAbs().maxCoeff();
    rep.min_eigenvalue = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(rep.empirical, Eigen::EigenvaluesOnly)
                             .eigenvalues()
                             .minCoeff();
    return rep;
}

CovarianceReport covariance_test(const PathGenerator& generator, const Kernel& kernel, std::span<const double> grid,
                                 Index n_samples, std::uint64_t base_seed) {
    const auto m = static_cast<Index>(grid.size());
    Eigen::MatrixXd target(m, m);
    for (Index a = 0; a < m; ++a) {
        for (Index b = 0; b < m; ++b) target(a, b) = kernel(grid[a], grid[b]);
    }
    return covariance_test(generator, target, grid, n_samples, base_seed);
}

PathGenerator spectral_path_generator(SpectralData spectra, double alpha, Index n_terms,
                                      std::vector<int> grid_vertices) {
    validate_alpha(alpha);
    for (int v : grid_vertices) {
        if (v < 0 || static_cast<std::size_t>(v) >= spectra.num_vertices) {
            throw Error(ErrorCategory::InvalidParameter, "grid vertex out of range");
        }
    }
    return [spectra = std::move(spectra), alpha, n_terms, grid = std::move(grid_vertices)](std::uint64_t seed) {
        SynthesisConfig cfg;
        cfg.alpha = alpha;
        cfg.n_terms = n_terms;
        cfg.seed = seed;
        const FieldSample f = synthesize_boundary_field(spectra, cfg);
        std::vector<double> out(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) out[i] = f.values[grid[i]];
        return out;
    };
}

Eigen::MatrixXd truncated_covariance(const SpectralData& spectra, double alpha, Index n_terms,
                                     std::span<const int> grid_vertices) {
    if (n_terms < 1 || n_terms > spectra.n_computed()) {
        throw Error(ErrorCategory::InvalidParameter, "n_terms exceeds the available modes");
    }
    const auto row = row_lookup(spectra);
    const double e = spectral_exponent(spectra.dim, alpha);
    const auto m = static_cast<Index>(grid_vertices.size());
    Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(m, n_terms);
    for (Index i = 0; i < m; ++i) {
        const int r = row.at(grid_vertices[i]);
        if (r < 0) continue;  // pinned vertex: identically zero
        for (Index k = 0; k < n_terms; ++k) {
            basis(i, k) = std::pow(spectra.eigenvalues[k], -e) * spectra.eigenvectors(r, k);
        }
    }
    return basis * basis.transpose();
}

double subspace_distance(const Eigen::MatrixXd& computed, const Eigen::MatrixXd& reference,
                         std::span<const double> weights) {
    const Eigen::Map<const Eigen::VectorXd> w(weights.data(), static_cast<Index>(weights.size()));
    auto orthonormal = [&](const Eigen::MatrixXd& a) {
        const Eigen::MatrixXd g = a.transpose() * w.asDiagonal() * a;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
        return Eigen::MatrixXd(a * es.operatorInverseSqrt());
    };
    const Eigen::MatrixXd a = orthonormal(computed);
    const Eigen::MatrixXd b = orthonormal(reference);
    const auto& [small, large] = a.cols() <= b.cols() ? std::tie(a, b) : std::tie(b, a);
    // Residual of the smaller basis after projecting onto the larger span; its
    // weighted Frobenius norm is the root sum of squared principal-angle sines.
    const Eigen::MatrixXd residual = small - large * (large.transpose() * w.asDiagonal() * small);
    double s = static_cast<double>(large.cols() - small.cols());
    s += (residual.transpose() * w.asDiagonal() * residual).trace();
    return std::sqrt(s);
}

ConvergenceReport spectral_convergence_study(ShapeFamily family, std::span<const int> resolutions, Index n_modes,
                                             BoundaryCondition bc, WeightScheme scheme, double tol) {
    if (resolutions.empty()) throw Error(ErrorCategory::InvalidParameter, "no resolutions supplied");
    if (n_modes < 1) throw Error(ErrorCategory::InvalidParameter, "need at least one mode");
    if (family == ShapeFamily::Sphere && n_modes < 4) {
        throw Error(ErrorCategory::InvalidParameter, "sphere study needs at least 4 modes");
    }

    ConvergenceReport rep;
    for (int res : resolutions) {
        rep.mesh_sizes.push_back(res);
        std::vector<double> values, val_err, fn_err;
        std::string failure;
        double width = std::numeric_limits<double>::quiet_NaN();
        try {
            if (family == ShapeFamily::Interval) {
                const Mesh mesh = generate_interval(res);
                width = edge_length_stats(mesh).mean_length;
                const LaplacianSystem sys = assemble(mesh, scheme, bc);
                const SpectralData computed = smallest_eigenpairs(sys, n_modes, tol);
                const SpectralData exact = analytic_interval_spectra(mesh, bc, n_modes);
                for (Index k = 0; k < n_modes; ++k) {
                    values.push_back(computed.eigenvalues[k]);
                    val_err.push_back(std::abs(computed.eigenvalues[k] - exact.eigenvalues[k]));
                }
                fn_err.assign(static_cast<std::size_t>(n_modes), 0.0);
                for (const auto& cluster : eigenvalue_clusters(computed.eigenvalues)) {
                    if (cluster.size() == 1) {
                        const Index k = cluster.front();
                        double plus = 0.0, minus = 0.0;
                        for (Index r = 0; r < computed.eigenvectors.rows(); ++r) {
                            const double a = computed.eigenvectors(r, k);
                            const double b = exact.eigenvectors(r, k);
                            plus += computed.row_weights[r] * (a - b) * (a - b);
                            minus += computed.row_weights[r] * (a + b) * (a + b);
                        }
                        fn_err[k] = std::sqrt(std::min(plus, minus));
                    } else {
                        Eigen::MatrixXd a(computed.eigenvectors.rows(), static_cast<Index>(cluster.size()));
                        Eigen::MatrixXd b(a.rows(), a.cols());
                        for (std::size_t c = 0; c < cluster.size(); ++c) {
                            a.col(c) = computed.eigenvectors.col(cluster[c]);
                            b.col(c) = exact.eigenvectors.col(cluster[c]);
                        }
                        const double d = subspace_distance(a, b, computed.row_weights);
                        for (Index k : cluster) fn_err[k] = d;
                    }
                }
            } else {
                const Mesh mesh = generate_sphere(res);
                width = edge_length_stats(mesh).mean_length;
                const LaplacianSystem sys = assemble(mesh, scheme, BoundaryCondition::Closed);
                const SpectralData computed = smallest_eigenpairs(sys, n_modes, tol);
                const double first = (computed.eigenvalues[1] + computed.eigenvalues[2] + computed.eigenvalues[3]) / 3.0;
                for (Index k = 0; k < n_modes; ++k) {
                    const auto l = static_cast<double>(static_cast<Index>(std::sqrt(static_cast<double>(k))));
                    values.push_back(computed.eigenvalues[k]);
                    val_err.push_back(std::abs(2.0 * computed.eigenvalues[k] / first - l * (l + 1.0)));
                }
            }
        } catch (const Error& e) {
            failure = std::string(category_name(e.category())) + ": " + e.what();
            values.clear();
            val_err.clear();
            fn_err.clear();
        }
        rep.mesh_widths.push_back(width);
        rep.eigenvalues.push_back(std::move(values));
        rep.eigenvalue_errors.push_back(std::move(val_err));
        rep.eigenfunction_errors.push_back(std::move(fn_err));
        rep.failures.push_back(std::move(failure));
    }

    if (resolutions.size() >= 3) {
        for (Index k = 0; k < n_modes; ++k) {
            std::vector<double> x, y;
            for (std::size_t i = 0; i < resolutions.size(); ++i) {
                if (!rep.failures[i].empty()) continue;
                const double err = rep.eigenvalue_errors[i][k];
                if (!(err > 0.0)) continue;
                x.push_back(std::log(rep.mesh_widths[i]));
                y.push_back(std::log(err));
            }
            rep.fitted_rates.push_back(x.size() >= 3 ? fit_slope(x, y) : std::numeric_limits<double>::quiet_NaN());
        }
    }
    return rep;
}

ClusterReport sphere_multiplicity_check(const SpectralData& spectra) {
    const Index n = spectra.n_computed();
    if (n < 9) throw Error(ErrorCategory::InvalidParameter, "sphere multiplicity check needs at least 9 modes");
    ClusterReport rep;
    const double top = spectra.eigenvalues[n - 1];
    for (Index k = 1; k < n; ++k) rep.gaps.push_back(spectra.eigenvalues[k] - spectra.eigenvalues[k - 1]);
    for (const auto& cluster : eigenvalue_clusters(spectra.eigenvalues, 1e-6)) {
        rep.cluster_sizes.push_back(cluster.size());
        double s = 0.0;
        for (Index k : cluster) s += spectra.eigenvalues[k];
        rep.cluster_means.push_back(s / static_cast<double>(cluster.size()));
    }
    const bool structure = rep.cluster_sizes.size() >= 3 && rep.cluster_sizes[0] == 1 && rep.cluster_sizes[1] == 3 &&
                           rep.cluster_sizes[2] == 5;
    if (!structure) {
        std::string sizes, gaps;
        for (auto s : rep.cluster_sizes) sizes += fmt::format("{} ", s);
        for (double g : rep.gaps) gaps += fmt::format("{:.3e} ", g);
        throw Error(ErrorCategory::StructureMismatch,
                    "expected leading clusters 1, 3, 5; got sizes [ " + sizes + "] from gaps [ " + gaps + "]");
    }
    rep.sizes_ok = true;
    rep.kernel_eigenvalue = spectra.eigenvalues[0];
    rep.kernel_bound = 1e-9 * top;
    rep.kernel_ok = std::abs(rep.kernel_eigenvalue) <= rep.kernel_bound;
    rep.ratio = rep.cluster_means[2] / rep.cluster_means[1];
    rep.ratio_ok = std::abs(rep.ratio / 3.0 - 1.0) <= 0.1;
    return rep;
}

WeylTailReport weyl_tail_check(const SpectralData& spectra, double alpha, int dim, Index n) {
    validate_alpha(alpha);
    if (dim < 1) throw Error(ErrorCategory::InvalidParameter, "dimension must be positive");
    if (n < 1) throw Error(ErrorCategory::InvalidParameter, "tail index must be at least 1");
    std::vector<Index> modes;
    for (Index k = 0; k < spectra.n_computed(); ++k) {
        if (spectra.eigenvalues[k] > 0.0) modes.push_back(k);
    }
    if (static_cast<Index>(modes.size()) < 2 * n) {
        throw Error(ErrorCategory::InvalidParameter, "weyl tail check needs " + std::to_string(2 * n) +
                                                         " nonzero modes, have " + std::to_string(modes.size()));
    }
    WeylTailReport rep;
    rep.alpha = alpha;
    rep.dim = dim;
    rep.n = n;
    rep.predicted_exponent = -(1.0 + 2.0 * alpha / dim);
    std::vector<double> lx, ly;
    for (Index j = n; j <= 2 * n; ++j) {
        const Index k = modes[j - 1];
        double norm2 = 0.0;
        for (Index r = 0; r < spectra.eigenvectors.rows(); ++r) {
            norm2 += spectra.row_weights[r] * spectra.eigenvectors(r, k) * spectra.eigenvectors(r, k);
        }
        const double c = std::pow(spectra.eigenvalues[k], -(dim / 2.0 + alpha)) * norm2;
        rep.indices.push_back(static_cast<double>(j));
        rep.contributions.push_back(c);
        lx.push_back(std::log(static_cast<double>(j)));
        ly.push_back(std::log(c));
    }
    rep.fitted_exponent = fit_slope(lx, ly);
    rep.relative_error = std::abs(rep.fitted_exponent - rep.predicted_exponent) / std::abs(rep.predicted_exponent);
    return rep;
}

double mean_squared_edge_increment(const Mesh& mesh, std::span<const double> values) {
    if (values.size() != mesh.num_vertices()) throw Error(ErrorCategory::InvalidParameter, "field size mismatch");
    double s = 0.0;
    for (const Edge& e : mesh.edges()) {
        const double d = values[e[0]] - values[e[1]];
        s += d * d;
    }
    return s / static_cast<double>(mesh.num_edges());
}

RoughnessReport roughness_sweep(const Mesh& mesh, const SpectralData& spectra, std::span<const double> alphas,
                                Index n_terms, Index n_seeds, std::uint64_t base_seed, std::optional<int> origin) {
    if (n_seeds < 1) throw Error(ErrorCategory::InvalidParameter, "need at least one seed");
    RoughnessReport rep;
    for (double alpha : alphas) {
        double total = 0.0;
        for (Index i = 0; i < n_seeds; ++i) {
            SynthesisConfig cfg;
            cfg.alpha = alpha;
            cfg.n_terms = n_terms;
            cfg.seed = base_seed + static_cast<std::uint64_t>(i);
            cfg.origin = origin;
            const FieldSample f = origin ? synthesize_riesz_field(spectra, cfg) : synthesize_boundary_field(spectra, cfg);
            total += mean_squared_edge_increment(mesh, f.values);
        }
        rep.alphas.push_back(alpha);
        rep.mean_sq_increment.push_back(total / static_cast<double>(n_seeds));
    }
    rep.strictly_decreasing = true;
    for (std::size_t i = 1; i < rep.mean_sq_increment.size(); ++i) {
        if (!(rep.mean_sq_increment[i] < rep.mean_sq_increment[i - 1])) rep.strictly_decreasing = false;
    }
    return rep;
}

MomentReport standardized_moments(std::span<const double> samples) {
    MomentReport rep;
    rep.n = static_cast<Index>(samples.size());
    if (rep.n < 2) throw Error(ErrorCategory::InvalidParameter, "need at least two samples");
    const double n = static_cast<double>(rep.n);
    double mean = 0.0;
    for (double x : samples) mean += x;
    mean /= n;
    double m2 = 0, m3 = 0, m4 = 0;
    for (double x : samples) {
        const double d = x - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    rep.mean = mean;
    rep.variance = m2 * n / (n - 1.0);
    rep.skewness = m3 / std::pow(m2, 1.5);
    rep.excess_kurtosis = m4 / (m2 * m2) - 3.0;
    return rep;
}

MomentReport point_moments(const SpectralData& spectra, const SynthesisConfig& cfg, int vertex, Index n_samples,
                           std::uint64_t base_seed) {
    if (vertex < 0 || static_cast<std::size_t>(vertex) >= spectra.num_vertices) {
        throw Error(ErrorCategory::InvalidParameter, "vertex out of range");
    }
    std::vector<double> samples(static_cast<std::size_t>(n_samples));
    SynthesisConfig c = cfg;
    for (Index i = 0; i < n_samples; ++i) {
        c.seed = base_seed + static_cast<std::uint64_t>(i);
        const FieldSample f = c.origin ? synthesize_riesz_field(spectra, c) : synthesize_boundary_field(spectra, c);
        samples[i] = f.values[vertex];
    }
    return standardized_moments(samples);
}

std::string to_json(const CovarianceReport& r) {
    nlohmann::json j = {
        {"check", "covariance"},
        {"n_samples", r.n_samples},
        {"base_seed", r.base_seed},
        {"max_abs_error", r.max_abs_error},
        {"min_eigenvalue", r.min_eigenvalue},
        {"grid", r.grid},
        {"empirical", matrix_json(r.empirical)},
        {"analytic", matrix_json(r.analytic)},
    };
    return j.dump(2) + "\n";
}

std::string to_json(const ConvergenceReport& r) {
    nlohmann::json rates = nlohmann::json::array();
    for (double v : r.fitted_rates) rates.push_back(finite_or_null(v));
    nlohmann::json widths = nlohmann::json::array();
    for (double v : r.mesh_widths) widths.push_back(finite_or_null(v));
    nlohmann::json j = {
        {"check", "spectral-convergence"},
        {"mesh_sizes", r.mesh_sizes},
        {"mesh_widths", widths},
        {"eigenvalues", r.eigenvalues},
        {"eigenvalue_errors", r.eigenvalue_errors},
        {"eigenfunction_errors", r.eigenfunction_errors},
        {"fitted_rates", rates},
        {"failures", r.failures},
    };
    return j.dump(2) + "\n";
}

std::string to_json(const ClusterReport& r) {
    nlohmann::json j = {
        {"check", "sphere-clusters"},
        {"cluster_sizes", r.cluster_sizes},
        {"cluster_means", r.cluster_means},
        {"gaps", r.gaps},
        {"kernel_eigenvalue", r.kernel_eigenvalue},
        {"kernel_bound", r.kernel_bound},
        {"ratio", r.ratio},
        {"kernel_ok", r.kernel_ok},
        {"sizes_ok", r.sizes_ok},
        {"ratio_ok", r.ratio_ok},
        {"passed", r.passed()},
    };
    return j.dump(2) + "\n";
}

std::string to_json(const WeylTailReport& r) {
    nlohmann::json j = {
        {"check", "weyl-tail"},
        {"alpha", r.alpha},
        {"dim", r.dim},
        {"n", r.n},
        {"fitted_exponent", r.fitted_exponent},
        {"predicted_exponent", r.predicted_exponent},
        {"relative_error", r.relative_error},
        {"indices", r.indices},
        {"contributions", r.contributions},
    };
    return j.dump(2) + "\n";
}

}  // namespace fbsurf
