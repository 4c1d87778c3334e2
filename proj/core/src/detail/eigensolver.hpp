#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace fbsurf::detail {

struct KrylovOptions {
    Eigen::Index count = 1;
    double tol = 1e-10;     // relative to norm
    double norm = 1.0;      // ||A|| estimate used for residual scaling
    double shift = 0.0;     // A - shift*I must be positive definite
    int block_size = 8;
    long max_applications = 0;
    std::uint64_t seed = 0;
};

struct KrylovResult {
    Eigen::VectorXd values;      // ascending
    Eigen::MatrixXd vectors;     // Euclidean-orthonormal columns
    std::vector<double> residuals;  // ||A y - theta y|| / norm
    long applications = 0;
    Eigen::Index basis_size = 0;
};

// Lowest eigenpairs of a sparse symmetric matrix by shift-invert block Krylov
// with Rayleigh-Ritz on A itself. Throws SolverError when the budget runs out.
KrylovResult lowest_eigenpairs(const Eigen::SparseMatrix<double>& a, const KrylovOptions& options);

}  // namespace fbsurf::detail
