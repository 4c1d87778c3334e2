#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "fbsurf/laplacian.hpp"
#include "fbsurf/mesh.hpp"
#include "fbsurf/spectral.hpp"

namespace fbsurf {

struct SynthesisConfig {
    double alpha = 0.5;           // regularity index, 0 < alpha < 1
    Eigen::Index n_terms = 1;     // truncation N0 (nonzero modes for Riesz fields)
    std::uint64_t seed = 0;
    std::optional<int> origin;    // closed domains only
    int dim = 0;                  // 0: take the intrinsic dimension from the spectra
    unsigned threads = 1;         // vertex-parallel evaluation; results are identical for any count
};

/// Weyl-model estimate of the variance left out by truncating at N.
struct TailEstimate {
    Eigen::Index n = 0;
    double exponent = 0.0;        // per-term variance decays like k^-exponent
    double per_term = 0.0;        // mean-square contribution of term N
    double tail_sum = 0.0;        // sum of contributions of terms N+1, N+2, ...
    double relative_tail = 0.0;   // tail_sum / sum of all terms under the model
};

struct FieldSample {
    std::vector<double> values;   // one per mesh vertex
    SynthesisConfig config;
    BoundaryCondition bc = BoundaryCondition::Dirichlet;
    int dim = 0;
    std::uint64_t mesh_hash = 0;
    std::size_t num_vertices = 0;
    double scale = 1.0;           // domain scale after rescale_field
    TailEstimate truncation_tail_estimate;
};

/// Exponent of the eigenvalue weight: lambda^-(d/4 + alpha/2).
double spectral_exponent(int dim, double alpha);

/// Throws InvalidParameter unless 0 < alpha < 1.
void validate_alpha(double alpha);

/// sum_{k <= N0} lambda_k^-(d/4 + alpha/2) xi_k phi_k(x) at unknown vertices;
/// pinned vertices are exactly 0. Accepts dirichlet and mixed spectra; a zero
/// eigenvalue among the first N0 raises SpectralDomain.
FieldSample synthesize_boundary_field(const SpectralData& spectra, const SynthesisConfig& cfg);

/// Same with caller-supplied draws (draws[k-1] is xi_k); the seed is ignored.
FieldSample synthesize_boundary_field(const SpectralData& spectra, const SynthesisConfig& cfg,
                                      std::span<const double> draws);

/// Origin-referenced field on a closed domain:
/// sum over nonzero modes j <= N0 of lambda_j^-(d/4 + alpha/2) (phi_j(x) - phi_j(o)) xi_j.
/// Kernel modes are skipped and consume no draw; values[origin] is exactly 0.
FieldSample synthesize_riesz_field(const SpectralData& spectra, const SynthesisConfig& cfg);
FieldSample synthesize_riesz_field(const SpectralData& spectra, const SynthesisConfig& cfg,
                                   std::span<const double> draws);

/// Analytic-spectrum path on an interval mesh: dirichlet gives the fractional
/// bridge, mixed at alpha = 1/2 gives Brownian motion.
FieldSample synthesize_path_1d(BoundaryCondition bc, double alpha, Eigen::Index n_terms, const Mesh& grid,
                               std::uint64_t seed);

/// Self-similar rescaling to a domain c times larger: values * c^alpha.
///
/// One rounding per vertex: c >= 1 multiplies by c^alpha, c < 1 divides by
/// (1/c)^alpha, so rescaling by c and then 1/c returns within 1 ulp.
FieldSample rescale_field(const FieldSample& field, double c);

/// Model lambda_k = k^(2/d); per-term variance k^-(1 + 2 alpha / d).
TailEstimate estimate_truncation_tail(double alpha, int dim, Eigen::Index n);

/// Anchored at the computed eigenvalue of (nonzero) mode N and extrapolated
/// with the same power law beyond it.
TailEstimate estimate_truncation_tail(const SpectralData& spectra, double alpha, int dim, Eigen::Index n);

/// Smallest N whose model relative tail is at most rel_tol.
Eigen::Index suggest_truncation(double alpha, int dim, double rel_tol);

/// Hurwitz zeta sum_{k >= 0} (a + k)^-s for s > 1, a > 0.
double hurwitz_zeta(double s, double a);

}  // namespace fbsurf
