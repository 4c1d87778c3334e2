#include "detail/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "fbsurf/error.hpp"
#include "fbsurf/random.hpp"

namespace fbsurf::detail {

namespace {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Growable column store; doubling keeps appends amortized O(n).
class Basis {
public:
    explicit Basis(Index rows) : data_(rows, 0) {}

    Index cols() const { return cols_; }
    auto active() const { return data_.leftCols(cols_); }

    void append(const MatrixXd& block) {
        if (cols_ + block.cols() > data_.cols()) {
            data_.conservativeResize(Eigen::NoChange, std::max<Index>(2 * data_.cols(), cols_ + block.cols()));
        }
        data_.middleCols(cols_, block.cols()) = block;
        cols_ += block.cols();
    }

private:
    MatrixXd data_;
    Index cols_ = 0;
};

MatrixXd random_block(Index rows, Index cols, std::uint64_t seed, std::uint64_t& counter) {
    MatrixXd b(rows, cols);
    for (Index j = 0; j < cols; ++j) {
        for (Index i = 0; i < rows; ++i) b(i, j) = standard_normal(seed, ++counter);
    }
    return b;
}

// Orthogonalizes `w` against the basis (two classical Gram-Schmidt passes) and
// then internally, dropping columns that have no component left.
MatrixXd orthonormalize(MatrixXd w, const Basis& basis) {
    const VectorXd original = w.colwise().norm();
    if (basis.cols() > 0) {
        for (int pass = 0; pass < 2; ++pass) w.noalias() -= basis.active() * (basis.active().transpose() * w);
    }
    std::vector<Index> kept;
    for (Index j = 0; j < w.cols(); ++j) {
        for (int pass = 0; pass < 2; ++pass) {
            for (Index i : kept) w.col(j) -= w.col(i).dot(w.col(j)) * w.col(i);
        }
        const double nrm = w.col(j).norm();
        if (nrm > 1e-10 * original[j] && nrm > 0.0) {
            w.col(j) /= nrm;
            kept.push_back(j);
        }
    }
    MatrixXd out(w.rows(), static_cast<Index>(kept.size()));
    for (Index k = 0; k < out.cols(); ++k) out.col(k) = w.col(kept[k]);
    return out;
}

}  // namespace

KrylovResult lowest_eigenpairs(const Eigen::SparseMatrix<double>& a, const KrylovOptions& opt) {
    const Index n = a.rows();
    const Index count = opt.count;
    const long budget = opt.max_applications > 0 ? opt.max_applications : 300L * count;
    const Index block = std::clamp<Index>(opt.block_size, 1, n);

    Eigen::SparseMatrix<double> shifted = a;
    if (opt.shift != 0.0) {
        Eigen::SparseMatrix<double> eye(n, n);
        eye.setIdentity();
        shifted -= opt.shift * eye;
    }
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(shifted);
    if (ldlt.info() != Eigen::Success) throw SolverError("shifted matrix factorization failed", 1.0);

    Basis q(n);
    Basis aq(n);
    MatrixXd h(0, 0);
    std::uint64_t counter = 0;
    long applications = 0;

    MatrixXd v = orthonormalize(random_block(n, block, opt.seed, counter), q);
    KrylovResult result;
    double worst = 1.0;
    Index last_check = 0;

    for (;;) {
        // Extend basis, A*basis and the projected matrix by the new block.
        const MatrixXd av = a * v;
        applications += v.cols();
        const Index m0 = q.cols();
        q.append(v);
        aq.append(av);
        const Index m = q.cols();
        h.conservativeResize(m, m);
        const MatrixXd cross = q.active().transpose() * av;  // m x k
        h.block(0, m0, m, v.cols()) = cross;
        h.block(m0, 0, v.cols(), m0) = cross.topRows(m0).transpose();
        h.block(m0, m0, v.cols(), v.cols()) =
            0.5 * (cross.bottomRows(v.cols()) + cross.bottomRows(v.cols()).transpose());

        const bool exhausted = m >= n;
        if (m >= count && (exhausted || m >= last_check + std::max<Index>(block, last_check / 10))) {
            last_check = m;
            Eigen::SelfAdjointEigenSolver<MatrixXd> ritz(h);
            const MatrixXd z = ritz.eigenvectors().leftCols(count);
            const VectorXd theta = ritz.eigenvalues().head(count);
            MatrixXd y = q.active() * z;
            const MatrixXd r = aq.active() * z - y * theta.asDiagonal();
            result.residuals.assign(static_cast<std::size_t>(count), 0.0);
            worst = 0.0;
            for (Index k = 0; k < count; ++k) {
                result.residuals[k] = r.col(k).norm() / opt.norm;
                worst = std::max(worst, result.residuals[k]);
            }
            if (worst <= opt.tol || exhausted) {
                result.values = theta;
                result.vectors = std::move(y);
                result.applications = applications;
                result.basis_size = m;
                return result;
            }
        }
        if (applications >= budget) {
            throw SolverError("eigensolver exhausted its budget of " + std::to_string(budget) +
                                  " operator applications",
                              worst);
        }

        MatrixXd w = ldlt.solve(v);
        applications += v.cols();
        v = orthonormalize(std::move(w), q);
        if (v.cols() == 0) {
            // Invariant subspace reached before convergence: restart with fresh directions.
            v = orthonormalize(random_block(n, std::min<Index>(block, n - q.cols()), opt.seed, counter), q);
            if (v.cols() == 0) throw SolverError("eigensolver could not extend the Krylov basis", worst);
        }
    }
}

}  // namespace fbsurf::detail
