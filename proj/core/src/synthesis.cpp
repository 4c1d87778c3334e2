#include "fbsurf/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <thread>

#include "fbsurf/error.hpp"
#include "fbsurf/random.hpp"

namespace fbsurf {

namespace {

int effective_dim(const SpectralData& spectra, const SynthesisConfig& cfg) {
    if (cfg.dim < 0) throw Error(ErrorCategory::InvalidParameter, "dimension must be positive");
    return cfg.dim == 0 ? spectra.dim : cfg.dim;
}

// Runs body(begin, end) over row ranges; each row is owned by exactly one call,
// so per-row arithmetic (and the result) does not depend on the thread count.
template <typename Body>
void for_rows(Eigen::Index rows, unsigned threads, Body body) {
    const unsigned t = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<Eigen::Index>(rows, 1))));
    if (t == 1) {
        body(Eigen::Index{0}, rows);
        return;
    }
    std::vector<std::thread> pool;
    const Eigen::Index chunk = (rows + t - 1) / t;
    for (unsigned i = 0; i < t; ++i) {
        const Eigen::Index b = std::min<Eigen::Index>(rows, i * chunk);
        const Eigen::Index e = std::min<Eigen::Index>(rows, b + chunk);
        pool.emplace_back([=, &body] { body(b, e); });
    }
    for (auto& th : pool) th.join();
}

FieldSample make_sample(const SpectralData& spectra, const SynthesisConfig& cfg, int dim) {
    FieldSample f;
    f.values.assign(spectra.num_vertices, 0.0);
    f.config = cfg;
    f.config.dim = dim;
    f.bc = spectra.bc;
    f.dim = dim;
    f.mesh_hash = spectra.mesh_hash;
    f.num_vertices = spectra.num_vertices;
    return f;
}

void check_draws(std::span<const double> draws, Eigen::Index n_terms) {
    if (static_cast<Eigen::Index>(draws.size()) < n_terms) {
        throw Error(ErrorCategory::InvalidParameter, "need " + std::to_string(n_terms) + " draws, got " +
                                                         std::to_string(draws.size()));
    }
}

}  // namespace

double spectral_exponent(int dim, double alpha) { return dim / 4.0 + alpha / 2.0; }

void validate_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw Error(ErrorCategory::InvalidParameter, "alpha must lie in (0, 1), got " + std::to_string(alpha));
    }
}

FieldSample synthesize_boundary_field(const SpectralData& spectra, const SynthesisConfig& cfg) {
    validate_alpha(cfg.alpha);
    if (cfg.n_terms < 1) throw Error(ErrorCategory::InvalidParameter, "n_terms must be at least 1");
    const auto draws = gaussian_draws(cfg.seed, static_cast<std::size_t>(cfg.n_terms));
    return synthesize_boundary_field(spectra, cfg, draws);
}

FieldSample synthesize_boundary_field(const SpectralData& spectra, const SynthesisConfig& cfg,
                                      std::span<const double> draws) {
    validate_alpha(cfg.alpha);
    const Eigen::Index n0 = cfg.n_terms;
    if (n0 < 1 || n0 > spectra.n_computed()) {
        throw Error(ErrorCategory::InvalidParameter, "n_terms " + std::to_string(n0) + " exceeds the " +
                                                         std::to_string(spectra.n_computed()) + " available modes");
    }
    if (cfg.origin) throw Error(ErrorCategory::Configuration, "an origin is only meaningful on a closed domain");
    check_draws(draws, n0);
    const int dim = effective_dim(spectra, cfg);
    const double e = spectral_exponent(dim, cfg.alpha);

    std::vector<double> coef(static_cast<std::size_t>(n0));
    for (Eigen::Index k = 0; k < n0; ++k) {
        const double lam = spectra.eigenvalues[k];
        if (!(lam > 0.0)) {
            throw Error(ErrorCategory::SpectralDomain,
                        "eigenvalue " + std::to_string(k + 1) + " is not positive; boundary fields need a definite spectrum");
        }
        coef[k] = std::pow(lam, -e) * draws[k];
    }

    FieldSample f = make_sample(spectra, cfg, dim);
    const Eigen::MatrixXd& phi = spectra.eigenvectors;
    std::vector<double> acc(static_cast<std::size_t>(phi.rows()), 0.0);
    for_rows(phi.rows(), cfg.threads, [&](Eigen::Index b, Eigen::Index end) {
        for (Eigen::Index k = 0; k < n0; ++k) {
            const double c = coef[k];
            for (Eigen::Index r = b; r < end; ++r) acc[r] += c * phi(r, k);
        }
    });
    for (Eigen::Index r = 0; r < phi.rows(); ++r) f.values[spectra.interior_map[r]] = acc[r];
    f.truncation_tail_estimate = estimate_truncation_tail(spectra, cfg.alpha, dim, n0);
    return f;
}

FieldSample synthesize_riesz_field(const SpectralData& spectra, const SynthesisConfig& cfg) {
    validate_alpha(cfg.alpha);
    if (cfg.n_terms < 1) throw Error(ErrorCategory::InvalidParameter, "n_terms must be at least 1");
    const auto draws = gaussian_draws(cfg.seed, static_cast<std::size_t>(cfg.n_terms));
    return synthesize_riesz_field(spectra, cfg, draws);
}

FieldSample synthesize_riesz_field(const SpectralData& spectra, const SynthesisConfig& cfg,
                                   std::span<const double> draws) {
    validate_alpha(cfg.alpha);
    if (spectra.bc != BoundaryCondition::Closed || spectra.n_computed() == 0 || spectra.eigenvalues[0] != 0.0) {
        throw Error(ErrorCategory::Configuration, "Riesz fields need closed-domain spectra with a zero mode");
    }
    if (!cfg.origin) throw Error(ErrorCategory::Configuration, "Riesz fields need an origin vertex");
    const int origin = *cfg.origin;
    if (origin < 0 || static_cast<std::size_t>(origin) >= spectra.num_vertices) {
        throw Error(ErrorCategory::InvalidParameter, "origin vertex " + std::to_string(origin) + " is out of range");
    }

    std::vector<Eigen::Index> modes;
    for (Eigen::Index k = 0; k < spectra.n_computed(); ++k) {
        if (spectra.eigenvalues[k] > 0.0) modes.push_back(k);
    }
    const Eigen::Index n0 = cfg.n_terms;
    if (n0 < 1 || n0 > static_cast<Eigen::Index>(modes.size())) {
        throw Error(ErrorCategory::InvalidParameter, "n_terms " + std::to_string(n0) + " exceeds the " +
                                                         std::to_string(modes.size()) + " available nonzero modes");
    }
    check_draws(draws, n0);
    const int dim = effective_dim(spectra, cfg);
    const double e = spectral_exponent(dim, cfg.alpha);

    // Closed spectra cover every vertex, so the origin's row is the origin itself.
    int origin_row = -1;
    for (std::size_t r = 0; r < spectra.interior_map.size(); ++r) {
        if (spectra.interior_map[r] == origin) origin_row = static_cast<int>(r);
    }
    if (origin_row < 0) throw Error(ErrorCategory::InvalidParameter, "origin vertex is not an unknown of the spectra");

    std::vector<double> coef(static_cast<std::size_t>(n0));
    std::vector<double> at_origin(static_cast<std::size_t>(n0));
    for (Eigen::Index j = 0; j < n0; ++j) {
        coef[j] = std::pow(spectra.eigenvalues[modes[j]], -e) * draws[j];
        at_origin[j] = spectra.eigenvectors(origin_row, modes[j]);
    }

    FieldSample f = make_sample(spectra, cfg, dim);
    const Eigen::MatrixXd& phi = spectra.eigenvectors;
    std::vector<double> acc(static_cast<std::size_t>(phi.rows()), 0.0);
    for_rows(phi.rows(), cfg.threads, [&](Eigen::Index b, Eigen::Index end) {
        for (Eigen::Index j = 0; j < n0; ++j) {
            const double c = coef[j];
            const double o = at_origin[j];
            const Eigen::Index k = modes[j];
            for (Eigen::Index r = b; r < end; ++r) acc[r] += c * (phi(r, k) - o);
        }
    });
    for (Eigen::Index r = 0; r < phi.rows(); ++r) f.values[spectra.interior_map[r]] = acc[r];

    // Tail estimate indexes nonzero modes only.
    SpectralData nonzero;
    nonzero.eigenvalues.resize(static_cast<Eigen::Index>(modes.size()));
    for (std::size_t j = 0; j < modes.size(); ++j) nonzero.eigenvalues[j] = spectra.eigenvalues[modes[j]];
    f.truncation_tail_estimate = estimate_truncation_tail(nonzero, cfg.alpha, dim, n0);
    return f;
}

FieldSample synthesize_path_1d(BoundaryCondition bc, double alpha, Eigen::Index n_terms, const Mesh& grid,
                               std::uint64_t seed) {
    validate_alpha(alpha);
    const SpectralData spectra = analytic_interval_spectra(grid, bc, n_terms);
    SynthesisConfig cfg;
    cfg.alpha = alpha;
    cfg.n_terms = n_terms;
    cfg.seed = seed;
    cfg.dim = 1;
    return synthesize_boundary_field(spectra, cfg);
}

FieldSample rescale_field(const FieldSample& field, double c) {
    if (!(c > 0.0) || !std::isfinite(c)) throw Error(ErrorCategory::InvalidParameter, "scale factor must be positive");
    validate_alpha(field.config.alpha);
    FieldSample out = field;
    if (c >= 1.0) {
        const double factor = std::pow(c, field.config.alpha);
        for (double& v : out.values) v *= factor;
    } else {
        const double divisor = std::pow(1.0 / c, field.config.alpha);
        for (double& v : out.values) v /= divisor;
    }
    out.scale = field.scale * c;
    return out;
}

double hurwitz_zeta(double s, double a) {
    if (!(s > 1.0) || !(a > 0.0)) throw Error(ErrorCategory::InvalidParameter, "hurwitz_zeta needs s > 1, a > 0");
    // Direct terms, then Euler-Maclaurin on the remainder starting at a + m.
    constexpr int m = 12;
    double sum = 0.0;
    for (int k = 0; k < m; ++k) sum += std::pow(a + k, -s);
    const double x = a + m;
    sum += std::pow(x, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(x, -s);
    constexpr double bernoulli_over_factorial[] = {1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0, -1.0 / 1209600.0,
                                                   1.0 / 47900160.0};
    double rising = s;  // s (s+1) ... (s + 2j - 2)
    for (int j = 1; j <= 5; ++j) {
        sum += bernoulli_over_factorial[j - 1] * rising * std::pow(x, -s - 2 * j + 1);
        rising *= (s + 2 * j - 1) * (s + 2 * j);
    }
    return sum;
}

TailEstimate estimate_truncation_tail(double alpha, int dim, Eigen::Index n) {
    if (n < 1) throw Error(ErrorCategory::InvalidParameter, "truncation index must be at least 1");
    if (dim < 1) throw Error(ErrorCategory::InvalidParameter, "dimension must be positive");
    TailEstimate t;
    t.n = n;
    t.exponent = 1.0 + 2.0 * alpha / dim;
    t.per_term = std::pow(static_cast<double>(n), -t.exponent);
    t.tail_sum = hurwitz_zeta(t.exponent, static_cast<double>(n + 1));
    t.relative_tail = t.tail_sum / hurwitz_zeta(t.exponent, 1.0);
    return t;
}

TailEstimate estimate_truncation_tail(const SpectralData& spectra, double alpha, int dim, Eigen::Index n) {
    if (n < 1 || n > spectra.n_computed()) {
        throw Error(ErrorCategory::InvalidParameter, "truncation index outside the computed spectrum");
    }
    TailEstimate model = estimate_truncation_tail(alpha, dim, n);
    const double lam = spectra.eigenvalues[n - 1];
    if (!(lam > 0.0)) throw Error(ErrorCategory::SpectralDomain, "tail estimate needs a positive eigenvalue");
    TailEstimate t = model;
    t.per_term = std::pow(lam, -(dim / 2.0 + alpha));
    // Power law anchored at term N: contribution(k) = per_term * (k / N)^-exponent.
    t.tail_sum = t.per_term * std::pow(static_cast<double>(n), t.exponent) * model.tail_sum;
    double head = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) {
        if (spectra.eigenvalues[k] > 0.0) head += std::pow(spectra.eigenvalues[k], -(dim / 2.0 + alpha));
    }
    t.relative_tail = t.tail_sum / (head + t.tail_sum);
    return t;
}

Eigen::Index suggest_truncation(double alpha, int dim, double rel_tol) {
    if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw Error(ErrorCategory::InvalidParameter, "rel_tol must lie in (0, 1)");
    // Relative tail decreases monotonically in N: bracket, then bisect.
    Eigen::Index lo = 1, hi = 1;
    while (estimate_truncation_tail(alpha, dim, hi).relative_tail > rel_tol) {
        lo = hi;
        hi *= 2;
        if (hi > (Eigen::Index{1} << 40)) throw Error(ErrorCategory::InvalidParameter, "tolerance unreachable");
    }
    if (estimate_truncation_tail(alpha, dim, lo).relative_tail <= rel_tol) return lo;
    while (hi - lo > 1) {
        const Eigen::Index mid = lo + (hi - lo) / 2;
        if (estimate_truncation_tail(alpha, dim, mid).relative_tail > rel_tol) lo = mid;
        else hi = mid;
    }
    return hi;
}

}  // namespace fbsurf
