#ifndef CDK_MOMENTS_HPP
#define CDK_MOMENTS_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cdk/errors.hpp"
#include "cdk/measures.hpp"
#include "cdk/multiindex.hpp"
#include "cdk/parallel.hpp"

namespace cdk {

/// Gram matrix M_{d,n} = int b(x) b(x)^T dmu of the ordered monomial basis.
class MomentMatrix {
public:
    MomentMatrix(BasisIndex basis, Eigen::MatrixXd matrix, std::string measure_description = {},
                 std::size_t data_truncation = 0)
        : basis_(std::move(basis)),
          matrix_(std::move(matrix)),
          description_(std::move(measure_description)),
          truncation_(data_truncation) {
        const auto dim = static_cast<Eigen::Index>(basis_.size());
        if (matrix_.rows() != dim || matrix_.cols() != dim) {
            throw InvalidArgument("moment matrix size does not match the basis dimension " + std::to_string(dim));
        }
    }

    const BasisIndex& basis() const noexcept { return basis_; }
    const Eigen::MatrixXd& matrix() const noexcept { return matrix_; }
    std::size_t degree() const noexcept { return basis_.max_degree(); }
    std::size_t harmonic() const noexcept { return basis_.max_harmonic(); }
    std::size_t size() const noexcept { return basis_.size(); }
    const std::string& measure_description() const noexcept { return description_; }

    /// Coefficient count of the empirical data the matrix came from (0 if none).
    std::size_t data_truncation() const noexcept { return truncation_; }

private:
    BasisIndex basis_;
    Eigen::MatrixXd matrix_;
    std::string description_;
    std::size_t truncation_;
};

struct AssembleOptions {
    unsigned workers = 1;
    std::size_t max_basis = kDefaultMaxBasisSize;
};

/// M[i][j] = moment(mu, a_i + a_j). Each distinct sum index is evaluated
/// once; the result does not depend on the worker count.
inline MomentMatrix assemble(const Measure& mu, std::size_t d, std::size_t n, const AssembleOptions& options = {}) {
    BasisIndex basis(d, n, options.max_basis);
    const std::size_t dim = basis.size();

    std::unordered_map<MultiIndex, std::size_t, MultiIndexHash> slot_of;
    std::vector<MultiIndex> distinct;
    std::vector<std::size_t> slot(dim * (dim + 1) / 2);
    std::size_t e = 0;
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = i; j < dim; ++j, ++e) {
            MultiIndex sum = basis[i] + basis[j];
            auto [it, inserted] = slot_of.try_emplace(std::move(sum), distinct.size());
            if (inserted) distinct.push_back(it->first);
            slot[e] = it->second;
        }
    }

    std::vector<double> values(distinct.size());
    parallel_for(distinct.size(), options.workers, [&](std::size_t k) { values[k] = moment(mu, distinct[k]); });

    Eigen::MatrixXd m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    e = 0;
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = i; j < dim; ++j, ++e) {
            const double v = values[slot[e]];
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
            m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
        }
    }
    return MomentMatrix(std::move(basis), std::move(m), describe(mu), data_truncation(mu));
}

// ---------------------------------------------------------------------------

enum class InverseMode { Full, Pseudo };

inline constexpr double kDefaultRankTolerance = 1e-10;

/// Eigenvalues below -kPsdSlack * |M| mean the matrix is not PSD; anything
/// between that and zero is clamped to zero.
inline constexpr double kPsdSlack = 1e-8;

/// M + ridge*I = Q diag(s) Q^T with s sorted descending.
struct SpectralFactorization {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;
    double ridge = 0.0;
    double rank_tolerance = kDefaultRankTolerance;
    std::size_t rank = 0;

    std::size_t size() const noexcept { return static_cast<std::size_t>(eigenvalues.size()); }
    bool full_rank() const noexcept { return rank == size(); }
    double max_eigenvalue() const noexcept { return size() ? eigenvalues(0) : 0.0; }
    double min_eigenvalue() const noexcept { return size() ? eigenvalues(eigenvalues.size() - 1) : 0.0; }

    /// Number of leading eigenpairs kept by the inverse in `mode`.
    std::size_t kept(InverseMode mode) const {
        if (mode == InverseMode::Full && !full_rank()) {
            throw SingularMatrixError("moment matrix is singular: " + std::to_string(size() - rank) + " of " +
                                          std::to_string(size()) + " eigenvalues are at or below the rank threshold",
                                      size() - rank);
        }
        return rank;
    }
};

/// r = #{ s_i > rank_tol * s_max }
inline std::size_t effective_rank(const Eigen::VectorXd& descending, double rank_tol) {
    if (descending.size() == 0 || !(descending(0) > 0.0)) return 0;
    const double threshold = rank_tol * descending(0);
    std::size_t r = 0;
    while (r < static_cast<std::size_t>(descending.size()) && descending(static_cast<Eigen::Index>(r)) > threshold) ++r;
    return r;
}

inline SpectralFactorization factorize(const Eigen::MatrixXd& m, double ridge = 0.0,
                                       double rank_tol = kDefaultRankTolerance) {
    if (!(ridge >= 0.0) || !std::isfinite(ridge)) throw InvalidArgument("ridge must be a finite value >= 0");
    if (!(rank_tol > 0.0 && rank_tol < 1.0)) throw InvalidArgument("rank tolerance must lie in (0, 1)");
    if (m.rows() != m.cols()) throw InvalidArgument("moment matrix must be square");
    if (!m.allFinite()) throw NumericalError("moment matrix has non-finite entries");

    Eigen::MatrixXd shifted = m;
    shifted.diagonal().array() += ridge;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(shifted);
    if (solver.info() != Eigen::Success) throw EigenSolverError("symmetric eigensolver did not converge");

    const Eigen::Index dim = m.rows();
    SpectralFactorization f;
    f.ridge = ridge;
    f.rank_tolerance = rank_tol;
    // Eigen sorts ascending
    f.eigenvalues = solver.eigenvalues().reverse();
    f.eigenvectors = solver.eigenvectors().rowwise().reverse();
    const double scale = dim ? std::max(std::abs(f.eigenvalues(0)), std::abs(f.eigenvalues(dim - 1))) : 0.0;
    for (Eigen::Index i = 0; i < dim; ++i) {
        double& s = f.eigenvalues(i);
        if (s < 0.0) {
            if (s < -kPsdSlack * scale) {
                throw NumericalError("moment matrix is not positive semidefinite (eigenvalue " + std::to_string(s) + ")");
            }
            s = 0.0;
        }
    }
    f.rank = effective_rank(f.eigenvalues, rank_tol);
    return f;
}

inline SpectralFactorization factorize(const MomentMatrix& mm, double ridge = 0.0,
                                       double rank_tol = kDefaultRankTolerance) {
    return factorize(mm.matrix(), ridge, rank_tol);
}

/// Q diag(1/s) Q^T v over the kept eigenpairs. Full mode requires full rank.
inline Eigen::VectorXd apply_inverse(const SpectralFactorization& f, const Eigen::VectorXd& v,
                                     InverseMode mode = InverseMode::Full) {
    if (static_cast<std::size_t>(v.size()) != f.size()) throw InvalidArgument("vector size does not match the factorization");
    const auto r = static_cast<Eigen::Index>(f.kept(mode));
    const auto q = f.eigenvectors.leftCols(r);
    Eigen::VectorXd coords = q.transpose() * v;
    coords.array() /= f.eigenvalues.head(r).array();
    return q * coords;
}

}  // namespace cdk

#endif
