#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "fbsurf/random.hpp"
#include "fbsurf/synthesis.hpp"
#include "test_util.hpp"

using namespace fbsurf;

namespace {

SpectralData interval_spectra(int n, BoundaryCondition bc, Eigen::Index count) {
    return smallest_eigenpairs(assemble(generate_interval(n), WeightScheme::InverseSquareDistance, bc), count, 1e-11);
}

SpectralData sphere_spectra(int s, Eigen::Index count) {
    return smallest_eigenpairs(assemble(generate_sphere(s), WeightScheme::InverseSquareDistance,
                                        BoundaryCondition::Closed),
                               count, 1e-10);
}

SynthesisConfig config(double alpha, Eigen::Index n, std::uint64_t seed) {
    SynthesisConfig c;
    c.alpha = alpha;
    c.n_terms = n;
    c.seed = seed;
    return c;
}

std::size_t row_of(const SpectralData& d, int vertex) {
    for (std::size_t r = 0; r < d.interior_map.size(); ++r) {
        if (d.interior_map[r] == vertex) return r;
    }
    throw std::logic_error("vertex not an unknown");
}

TEST(Exponent, UnifiedFormula) {
    EXPECT_DOUBLE_EQ(spectral_exponent(1, 0.5), 0.5);
    EXPECT_DOUBLE_EQ(spectral_exponent(2, 0.5), 0.75);
    EXPECT_DOUBLE_EQ(spectral_exponent(2, 0.9), 0.95);
    EXPECT_FBSURF_ERROR(validate_alpha(0.0), ErrorCategory::InvalidParameter);
    EXPECT_FBSURF_ERROR(validate_alpha(1.0), ErrorCategory::InvalidParameter);
    EXPECT_FBSURF_ERROR(validate_alpha(std::nan("")), ErrorCategory::InvalidParameter);
}

TEST(BoundaryField, SingleForcedTermIsScaledEigenvector) {
    const SpectralData d = interval_spectra(51, BoundaryCondition::Dirichlet, 5);
    std::vector<double> draws(5, 0.0);
    draws[2] = 1.0;
    const FieldSample f = synthesize_boundary_field(d, config(0.3, 5, 0), draws);
    const double w = std::pow(d.eigenvalues[2], -(0.25 + 0.15));
    for (std::size_t r = 0; r < d.interior_map.size(); ++r) {
        EXPECT_DOUBLE_EQ(f.values[d.interior_map[r]], w * d.eigenvectors(r, 2));
    }
}

TEST(BoundaryField, LinearInDraws) {
    const SpectralData d = smallest_eigenpairs(
        assemble(generate_disk(6), WeightScheme::Cotangent, BoundaryCondition::Dirichlet), 12, 1e-10);
    const auto a = gaussian_draws(1, 12);
    const auto b = gaussian_draws(2, 12);
    std::vector<double> sum(12);
    for (int k = 0; k < 12; ++k) sum[k] = a[k] + b[k];
    const auto cfg = config(0.6, 12, 0);
    const FieldSample fa = synthesize_boundary_field(d, cfg, a);
    const FieldSample fb = synthesize_boundary_field(d, cfg, b);
    const FieldSample fs = synthesize_boundary_field(d, cfg, sum);
    double scale = 0.0;
    for (double v : fs.values) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < fs.values.size(); ++i) {
        EXPECT_NEAR(fs.values[i], fa.values[i] + fb.values[i], 1e-12 * scale);
    }
}

TEST(BoundaryField, SeededDrawsAreTheCounterSequence) {
    const SpectralData d = interval_spectra(41, BoundaryCondition::Dirichlet, 8);
    const auto cfg = config(0.5, 8, 77);
    EXPECT_EQ(synthesize_boundary_field(d, cfg).values,
              synthesize_boundary_field(d, cfg, gaussian_draws(77, 8)).values);
}

TEST(BoundaryField, PinnedVerticesExactlyZero) {
    const std::vector<Mesh> meshes = {generate_interval(65), generate_disk(6), generate_disk(10, default_disk_holes()),
                                      generate_cylinder(2.0, 16, 8)};
    for (const Mesh& m : meshes) {
        const SpectralData d =
            smallest_eigenpairs(assemble(m, WeightScheme::InverseSquareDistance, BoundaryCondition::Dirichlet), 10, 1e-10);
        for (double alpha : {0.1, 0.5, 0.9}) {
            for (std::uint64_t seed = 0; seed < 5; ++seed) {
                const FieldSample f = synthesize_boundary_field(d, config(alpha, 10, seed));
                for (std::size_t i = 0; i < m.num_vertices(); ++i) {
                    if (m.is_boundary(i)) EXPECT_EQ(f.values[i], 0.0);
                }
            }
        }
    }
}

TEST(BoundaryField, ErrorsOnMisuse) {
    const SpectralData closed = sphere_spectra(1, 5);
    EXPECT_FBSURF_ERROR(synthesize_boundary_field(closed, config(0.5, 4, 0)), ErrorCategory::SpectralDomain);
    const SpectralData d = interval_spectra(21, BoundaryCondition::Dirichlet, 4);
    auto with_origin = config(0.5, 4, 0);
    with_origin.origin = 3;
    EXPECT_FBSURF_ERROR(synthesize_boundary_field(d, with_origin), ErrorCategory::Configuration);
    EXPECT_FBSURF_ERROR(synthesize_boundary_field(d, config(0.5, 5, 0)), ErrorCategory::InvalidParameter);
    EXPECT_FBSURF_ERROR(synthesize_boundary_field(d, config(1.5, 4, 0)), ErrorCategory::InvalidParameter);
}

TEST(BoundaryField, ExtendingTruncationAddsOnlyNewTerms) {
    const SpectralData d = interval_spectra(81, BoundaryCondition::Dirichlet, 20);
    const FieldSample f10 = synthesize_boundary_field(d, config(0.4, 10, 5));
    const FieldSample f11 = synthesize_boundary_field(d, config(0.4, 11, 5));
    const double xi11 = standard_normal(5, 11);
    const double w = std::pow(d.eigenvalues[10], -(0.25 + 0.2));
    for (std::size_t r = 0; r < d.interior_map.size(); ++r) {
        const int v = d.interior_map[r];
        EXPECT_NEAR(f11.values[v] - f10.values[v], w * xi11 * d.eigenvectors(r, 10), 1e-13);
    }
}

TEST(Determinism, BitIdenticalAndThreadInvariant) {
    const SpectralData d = sphere_spectra(2, 30);
    auto cfg = config(0.7, 29, 123);
    cfg.origin = 5;
    const FieldSample a = synthesize_riesz_field(d, cfg);
    const FieldSample b = synthesize_riesz_field(d, cfg);
    cfg.threads = 3;
    const FieldSample c = synthesize_riesz_field(d, cfg);
    EXPECT_EQ(a.values, b.values);
    EXPECT_EQ(a.values, c.values);
}

TEST(RieszField, OriginVanishesAndKernelIsSkipped) {
    const SpectralData d = sphere_spectra(2, 12);
    for (int origin : {0, 17, 161}) {
        auto cfg = config(0.9, 11, 4);
        cfg.origin = origin;
        const FieldSample f = synthesize_riesz_field(d, cfg);
        EXPECT_EQ(f.values[origin], 0.0);
        // Reference sum over nonzero modes j = 1..11 with draw xi_j.
        const std::size_t ro = row_of(d, origin);
        for (int v : {1, 50, 100}) {
            const std::size_t rv = row_of(d, v);
            double expect = 0.0;
            for (int j = 1; j <= 11; ++j) {
                expect += std::pow(d.eigenvalues[j], -(0.5 + 0.45)) *
                          (d.eigenvectors(rv, j) - d.eigenvectors(ro, j)) * standard_normal(4, j);
            }
            EXPECT_NEAR(f.values[v], expect, 1e-12);
        }
    }
}

TEST(RieszField, ErrorsOnMisuse) {
    const SpectralData d = sphere_spectra(1, 6);
    EXPECT_FBSURF_ERROR(synthesize_riesz_field(d, config(0.5, 5, 0)), ErrorCategory::Configuration);
    auto cfg = config(0.5, 6, 0);
    cfg.origin = 0;
    EXPECT_FBSURF_ERROR(synthesize_riesz_field(d, cfg), ErrorCategory::InvalidParameter);
    cfg.n_terms = 5;
    cfg.origin = 1000;
    EXPECT_FBSURF_ERROR(synthesize_riesz_field(d, cfg), ErrorCategory::InvalidParameter);
    const SpectralData open = interval_spectra(21, BoundaryCondition::Dirichlet, 5);
    cfg.origin = 3;
    EXPECT_FBSURF_ERROR(synthesize_riesz_field(open, cfg), ErrorCategory::Configuration);
}

TEST(Path1d, AnalyticBridgeAndBrownianPaths) {
    const Mesh grid = generate_interval(101);
    const FieldSample bridge = synthesize_path_1d(BoundaryCondition::Dirichlet, 0.5, 500, grid, 42);
    EXPECT_EQ(bridge.values.front(), 0.0);
    EXPECT_EQ(bridge.values.back(), 0.0);
    const FieldSample bm = synthesize_path_1d(BoundaryCondition::Mixed, 0.5, 500, grid, 42);
    EXPECT_EQ(bm.values.front(), 0.0);
    EXPECT_NE(bm.values.back(), 0.0);
    // sum_k lambda_k^-1/2 xi_k sqrt(2) sin(k pi t) at t = 0.3, evaluated directly.
    double expect = 0.0;
    for (int k = 1; k <= 500; ++k) {
        expect += std::sqrt(2.0) * std::sin(k * std::numbers::pi * 0.3) / (k * std::numbers::pi) * standard_normal(42, k);
    }
    EXPECT_NEAR(bridge.values[30], expect, 1e-12);
}

TEST(Rescale, ExactFactorAndOneUlpRoundTrip) {
    const FieldSample f = synthesize_path_1d(BoundaryCondition::Mixed, 0.5, 200, generate_interval(201), 3);
    const FieldSample up = rescale_field(f, 2.0);
    const double factor = std::pow(2.0, 0.5);
    for (std::size_t i = 0; i < f.values.size(); ++i) EXPECT_EQ(up.values[i], f.values[i] * factor);
    EXPECT_EQ(up.scale, 2.0);
    for (double c : {2.0, 3.0, 0.37, 10.0}) {
        const FieldSample back = rescale_field(rescale_field(f, c), 1.0 / c);
        for (std::size_t i = 0; i < f.values.size(); ++i) {
            const double v = f.values[i];
            EXPECT_GE(back.values[i], std::nextafter(v, -INFINITY)) << c;
            EXPECT_LE(back.values[i], std::nextafter(v, INFINITY)) << c;
        }
    }
    EXPECT_FBSURF_ERROR(rescale_field(f, 0.0), ErrorCategory::InvalidParameter);
    EXPECT_FBSURF_ERROR(rescale_field(f, -1.0), ErrorCategory::InvalidParameter);
}

TEST(Tail, HurwitzZetaAgainstMpmath) {
    EXPECT_NEAR(hurwitz_zeta(2.0, 1.0), 1.6449340668482264365, 1e-14);
    EXPECT_NEAR(hurwitz_zeta(1.5, 1.0), 2.6123753486854883433, 1e-13);
    EXPECT_NEAR(hurwitz_zeta(2.0, 501.0) / 0.0019980013333322666697, 1.0, 1e-13);
    EXPECT_NEAR(hurwitz_zeta(1.1, 3.5), 8.9551128221274888916, 1e-11);
    EXPECT_FBSURF_ERROR(hurwitz_zeta(1.0, 1.0), ErrorCategory::InvalidParameter);
}

TEST(Tail, WeylModelRelativeTail) {
    const TailEstimate t = estimate_truncation_tail(0.5, 1, 500);
    EXPECT_DOUBLE_EQ(t.exponent, 2.0);
    EXPECT_DOUBLE_EQ(t.per_term, 1.0 / 250000.0);
    EXPECT_NEAR(t.relative_tail / 0.001214639160073165889, 1.0, 1e-12);
    const TailEstimate s = estimate_truncation_tail(0.5, 2, 100);
    EXPECT_NEAR(s.relative_tail / 0.07636775859263800521, 1.0, 1e-12);
    EXPECT_EQ(suggest_truncation(0.5, 1, 0.01), 61);
    EXPECT_LT(estimate_truncation_tail(0.9, 2, 100).relative_tail, s.relative_tail);
}

TEST(Tail, ReportedOnSamples) {
    const SpectralData d = interval_spectra(101, BoundaryCondition::Dirichlet, 40);
    const FieldSample f = synthesize_boundary_field(d, config(0.5, 40, 0));
    EXPECT_EQ(f.truncation_tail_estimate.n, 40);
    EXPECT_GT(f.truncation_tail_estimate.relative_tail, 0.0);
    EXPECT_LT(f.truncation_tail_estimate.relative_tail, 0.05);
    EXPECT_EQ(f.dim, 1);
    EXPECT_EQ(f.bc, BoundaryCondition::Dirichlet);
    EXPECT_EQ(f.num_vertices, 101u);
}

}  // namespace
