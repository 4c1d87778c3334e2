#include "fbsurf/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "detail/eigensolver.hpp"
#include "detail/hash.hpp"
#include "fbsurf/error.hpp"

namespace fbsurf {

namespace {

void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
    const double cutoff = 1e-8 * v.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) > cutoff) {
            if (v[i] < 0.0) v = -v;
            return;
        }
    }
}

void quadrature_normalize(Eigen::Ref<Eigen::VectorXd> v, const std::vector<double>& w) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) s += w[i] * v[i] * v[i];
    v /= std::sqrt(s);
}

}  // namespace

std::string_view to_string(SpectralSource source) {
    switch (source) {
        case SpectralSource::IterativeSolver: return "iterative-solver";
        case SpectralSource::Analytic: return "analytic";
        case SpectralSource::Cache: return "cache";
    }
    return "unknown";
}

SpectralData smallest_eigenpairs(const LaplacianSystem& system, Eigen::Index count, double tol,
                                 const EigenSolverOptions& options) {
    const Eigen::Index n = system.size();
    if (count < 1 || count > n) {
        throw Error(ErrorCategory::InvalidParameter,
                    "requested " + std::to_string(count) + " eigenpairs of a " + std::to_string(n) + "-row system");
    }
    if (!(tol > 1e-14 && tol < 1e-2)) {
        throw Error(ErrorCategory::InvalidParameter, "eigensolver tolerance must lie in (1e-14, 1e-2)");
    }

    const double norm = inf_norm(system.matrix);
    detail::KrylovOptions kopt;
    kopt.count = count;
    kopt.tol = tol;
    kopt.norm = norm;
    // The closed Laplacian is singular; a small negative shift makes it definite
    // without moving the kernel away from the bottom of the spectrum.
    kopt.shift = system.bc == BoundaryCondition::Closed ? -1e-6 * norm : 0.0;
    kopt.block_size = options.block_size;
    kopt.max_applications = options.max_applications;
    kopt.seed = options.seed;
    detail::KrylovResult kr = detail::lowest_eigenpairs(system.matrix, kopt);

    SpectralData d;
    d.interior_map = system.interior_map;
    d.row_weights = system.row_weights;
    d.num_vertices = system.num_vertices;
    d.dim = system.dim;
    d.scheme = system.scheme;
    d.bc = system.bc;
    d.residual_tol = tol;
    d.source = SpectralSource::IterativeSolver;
    d.mesh_hash = system.mesh_hash;
    d.residuals = kr.residuals;

    d.eigenvalues = kr.values;
    const double top = std::abs(d.eigenvalues[count - 1]);
    for (Eigen::Index k = 0; k < count; ++k) {
        double& lam = d.eigenvalues[k];
        if (lam < 0.0) {
            if (lam < -tol * top * 10.0) {
                throw SolverError("negative eigenvalue " + std::to_string(lam) + " of a Laplacian", -lam / top);
            }
            lam = 0.0;
        }
        if (system.bc == BoundaryCondition::Closed && lam < 1e-9 * top) lam = 0.0;
    }

    d.eigenvectors = std::move(kr.vectors);
    for (Eigen::Index k = 0; k < count; ++k) {
        auto col = d.eigenvectors.col(k);
        if (system.nodal_scale.size() > 0) col = col.cwiseProduct(system.nodal_scale);
        quadrature_normalize(col, d.row_weights);
        fix_sign(col);
    }
    return d;
}

IntervalEigenpair analytic_interval_eigenpair(BoundaryCondition bc, int k, double x) {
    if (k < 1) throw Error(ErrorCategory::InvalidParameter, "eigenpair index starts at 1");
    if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorCategory::InvalidParameter, "x must lie in [0, 1]");
    double freq = 0.0;
    if (bc == BoundaryCondition::Dirichlet) {
        freq = k * std::numbers::pi;
    } else if (bc == BoundaryCondition::Mixed) {
        freq = (k - 0.5) * std::numbers::pi;
    } else {
        throw Error(ErrorCategory::InvalidParameter, "analytic interval spectra exist for dirichlet and mixed only");
    }
    return {freq * freq, std::numbers::sqrt2 * std::sin(freq * x)};
}

SpectralData analytic_interval_spectra(const Mesh& interval, BoundaryCondition bc, Eigen::Index count) {
    if (interval.dim() != 1) throw Error(ErrorCategory::Configuration, "analytic spectra need an interval mesh");
    if (count < 1) throw Error(ErrorCategory::InvalidParameter, "need at least one analytic mode");
    // Reuse the assembly bookkeeping for the unknown-vertex map.
    const LaplacianSystem sys = assemble(interval, WeightScheme::InverseSquareDistance, bc);
    for (std::size_t i = 0; i < interval.num_vertices(); ++i) {
        const Vec3& p = interval.vertex(i);
        if (p.y() != 0.0 || p.z() != 0.0 || p.x() < 0.0 || p.x() > 1.0) {
            throw Error(ErrorCategory::Configuration, "analytic spectra need vertices on [0, 1] along the x-axis");
        }
    }
    if (bc == BoundaryCondition::Mixed) {
        for (std::size_t i = 0; i < interval.num_vertices(); ++i) {
            if (sys.row_of_vertex[i] < 0 && interval.vertex(i).x() != 0.0) {
                throw Error(ErrorCategory::Configuration, "mixed analytic spectra pin the endpoint x = 0");
            }
        }
    }

    SpectralData d;
    d.interior_map = sys.interior_map;
    d.row_weights = sys.row_weights;
    d.num_vertices = sys.num_vertices;
    d.dim = 1;
    d.scheme = WeightScheme::InverseSquareDistance;
    d.bc = bc;
    d.residual_tol = 0.0;
    d.source = SpectralSource::Analytic;
    detail::Fnv1a h;
    h.value(interval.content_hash());
    h.string("analytic");
    h.string(to_string(bc));
    d.mesh_hash = h.digest();

    const auto rows = static_cast<Eigen::Index>(sys.interior_map.size());
    d.eigenvalues.resize(count);
    d.eigenvectors.resize(rows, count);
    for (Eigen::Index k = 0; k < count; ++k) {
        d.eigenvalues[k] = analytic_interval_eigenpair(bc, static_cast<int>(k + 1), 0.0).eigenvalue;
        for (Eigen::Index r = 0; r < rows; ++r) {
            d.eigenvectors(r, k) =
                analytic_interval_eigenpair(bc, static_cast<int>(k + 1), interval.vertex(sys.interior_map[r]).x())
                    .value;
        }
    }
    return d;
}

Eigen::MatrixXd quadrature_gram(const SpectralData& data) {
    const Eigen::Map<const Eigen::VectorXd> w(data.row_weights.data(),
                                              static_cast<Eigen::Index>(data.row_weights.size()));
    return data.eigenvectors.transpose() * w.asDiagonal() * data.eigenvectors;
}

std::vector<std::vector<Eigen::Index>> eigenvalue_clusters(const Eigen::VectorXd& eigenvalues, double rel_gap) {
    std::vector<std::vector<Eigen::Index>> clusters;
    if (eigenvalues.size() == 0) return clusters;
    const double gap = rel_gap * std::abs(eigenvalues[eigenvalues.size() - 1]);
    clusters.push_back({0});
    for (Eigen::Index k = 1; k < eigenvalues.size(); ++k) {
        if (eigenvalues[k] - eigenvalues[k - 1] <= gap) {
            clusters.back().push_back(k);
        } else {
            clusters.push_back({k});
        }
    }
    return clusters;
}

std::vector<double> relative_residuals(const LaplacianSystem& system, const SpectralData& data) {
    const double norm = inf_norm(system.matrix);
    std::vector<double> out;
    for (Eigen::Index k = 0; k < data.n_computed(); ++k) {
        Eigen::VectorXd v = data.eigenvectors.col(k);
        if (system.nodal_scale.size() > 0) v = v.cwiseQuotient(system.nodal_scale);
        v.normalize();
        out.push_back((system.matrix * v - data.eigenvalues[k] * v).norm() / norm);
    }
    return out;
}

}  // namespace fbsurf
