#ifndef CDK_CDKERNEL_HPP
#define CDK_CDKERNEL_HPP

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cdk/errors.hpp"
#include "cdk/measures.hpp"
#include "cdk/moments.hpp"
#include "cdk/multiindex.hpp"
#include "cdk/parallel.hpp"

namespace cdk {

/// Below this value K(z,z) is treated as zero and not inverted.
inline constexpr double kDegenerateKernel = 1e-30;

struct FitOptions {
    double ridge = 0.0;
    double rank_tolerance = kDefaultRankTolerance;
    InverseMode mode = InverseMode::Full;
    unsigned workers = 1;
    std::size_t max_basis = kDefaultMaxBasisSize;
};

/// Christoffel-Darboux model of order (d, n) for a measure:
///
///   K(x, y) = sum_i s_i^{-1} q_i(x) q_i(y) = b(x)^T M^{-1} b(y),
///   p(x) = K(x, x),  C(z) = 1 / p(z).
///
/// The sum runs over the kept eigenpairs of the factorization, which is every
/// eigenpair in full-inverse mode and the numerically nonzero ones in
/// pseudo-inverse mode.
class CDModel {
public:
    CDModel(MomentMatrix moments, SpectralFactorization factorization, InverseMode mode)
        : moments_(std::move(moments)), factorization_(std::move(factorization)), mode_(mode) {
        if (factorization_.size() != moments_.size()) throw InvalidArgument("factorization does not match the moment matrix");
        kept_ = static_cast<Eigen::Index>(factorization_.kept(mode_));
    }

    const BasisIndex& basis() const noexcept { return moments_.basis(); }
    const MomentMatrix& moment_matrix() const noexcept { return moments_; }
    const SpectralFactorization& factorization() const noexcept { return factorization_; }
    InverseMode mode() const noexcept { return mode_; }
    std::size_t degree() const noexcept { return moments_.degree(); }
    std::size_t harmonic() const noexcept { return moments_.harmonic(); }
    std::size_t size() const noexcept { return moments_.size(); }
    const std::string& provenance() const noexcept { return moments_.measure_description(); }

    Eigen::VectorXd basis_vector(const HPoint& x) const {
        Eigen::VectorXd b(static_cast<Eigen::Index>(size()));
        basis().evaluate(x, std::span<double>(b.data(), size()));
        return b;
    }

    double kernel(const HPoint& x, const HPoint& y) const {
        const Eigen::VectorXd u = spectral_coordinates(x);
        const Eigen::VectorXd v = spectral_coordinates(y);
        double k = 0.0;
        for (Eigen::Index i = 0; i < kept_; ++i) k += (u(i) * v(i)) / factorization_.eigenvalues(i);
        return k;
    }

    double cd_polynomial(const HPoint& x) const {
        const Eigen::VectorXd u = spectral_coordinates(x);
        double k = 0.0;
        for (Eigen::Index i = 0; i < kept_; ++i) k += (u(i) * u(i)) / factorization_.eigenvalues(i);
        return k;
    }

    double christoffel(const HPoint& z) const {
        const double k = cd_polynomial(z);
        if (!(k > kDegenerateKernel)) {
            throw DegenerateEvaluationError("K(z,z) = " + std::to_string(k) + " is too small to invert");
        }
        return 1.0 / k;
    }

    /// Coefficients of K(., y) in basis order: M^{-1} b(y).
    Eigen::VectorXd kernel_section(const HPoint& y) const {
        return apply_inverse(factorization_, basis_vector(y), mode_);
    }

    /// Coefficients of the optimal witness K(., z) / K(z, z).
    std::vector<double> minimizer(const HPoint& z) const {
        const double k = cd_polynomial(z);
        if (!(k > kDegenerateKernel)) {
            throw DegenerateEvaluationError("K(z,z) = " + std::to_string(k) + " is too small to normalize the witness");
        }
        const Eigen::VectorXd c = kernel_section(z) / k;
        return {c.data(), c.data() + c.size()};
    }

private:
    Eigen::VectorXd spectral_coordinates(const HPoint& x) const {
        return factorization_.eigenvectors.leftCols(kept_).transpose() * basis_vector(x);
    }

    MomentMatrix moments_;
    SpectralFactorization factorization_;
    InverseMode mode_;
    Eigen::Index kept_ = 0;
};

/// Assembles M_{d,n}(mu), factorizes M + ridge*I and checks the rank against
/// the requested mode.
inline CDModel fit(const Measure& mu, std::size_t d, std::size_t n, const FitOptions& options = {}) {
    MomentMatrix mm = assemble(mu, d, n, {options.workers, options.max_basis});
    SpectralFactorization f = factorize(mm, options.ridge, options.rank_tolerance);
    if (options.mode == InverseMode::Full && !f.full_rank()) {
        const std::size_t deficient = f.size() - f.rank;
        throw SingularMatrixError("moment matrix of order (" + std::to_string(d) + "," + std::to_string(n) + ") has " +
                                      std::to_string(deficient) + " of " + std::to_string(f.size()) +
                                      " eigenvalues at or below the rank threshold; add a ridge or use the "
                                      "pseudo-inverse",
                                  deficient);
    }
    return CDModel(std::move(mm), std::move(f), options.mode);
}

inline double kernel(const CDModel& model, const HPoint& x, const HPoint& y) { return model.kernel(x, y); }
inline double cd_polynomial(const CDModel& model, const HPoint& x) { return model.cd_polynomial(x); }
inline double christoffel(const CDModel& model, const HPoint& z) { return model.christoffel(z); }
inline std::vector<double> minimizer(const CDModel& model, const HPoint& z) { return model.minimizer(z); }

/// Per-point CD polynomial values, in input order.
inline std::vector<double> score(const CDModel& model, std::span<const HPoint> points, unsigned workers = 1) {
    std::vector<double> out(points.size());
    parallel_for(points.size(), workers, [&](std::size_t i) { out[i] = model.cd_polynomial(points[i]); });
    return out;
}

struct AverageReport {
    /// int p_{d,n} dmu
    double value = 0.0;
    std::size_t effective_rank = 0;
    /// True when the model is a full-rank, ridge-free fit, in which case
    /// value equals the basis dimension.
    bool identity_applies = false;
};

/// int p_{d,n}(x) dmu(x) = trace(M^{-1} M_mu), with M_mu the moment matrix
/// of `mu` assembled afresh and M^{-1} taken from the model.
inline AverageReport average_cd(const CDModel& model, const Measure& mu, unsigned workers = 1) {
    const MomentMatrix mm = assemble(mu, model.degree(), model.harmonic(), {workers, SIZE_MAX});
    const SpectralFactorization& f = model.factorization();
    const auto r = static_cast<Eigen::Index>(f.kept(model.mode()));
    double trace = 0.0;
    for (Eigen::Index i = 0; i < r; ++i) {
        const auto q = f.eigenvectors.col(i);
        trace += q.dot(mm.matrix() * q) / f.eigenvalues(i);
    }
    return {trace, f.rank, model.mode() == InverseMode::Full && f.ridge == 0.0 && f.full_rank()};
}

/// <p, K(., y)>_mu = p^T M_mu M^{-1} b(y), through the moment oracle of mu.
inline double reproduce(const CDModel& model, const Measure& mu, std::span<const double> p, const HPoint& y) {
    if (p.size() != model.size()) throw InvalidArgument("polynomial does not match the model basis");
    const MomentMatrix mm = assemble(mu, model.degree(), model.harmonic(), {1, SIZE_MAX});
    const Eigen::VectorXd section = model.kernel_section(y);
    const Eigen::Map<const Eigen::VectorXd> coeffs(p.data(), static_cast<Eigen::Index>(p.size()));
    return coeffs.dot(mm.matrix() * section);
}

struct QPSolution {
    /// min int p^2 dmu subject to p(z) = 1
    double value = 0.0;
    std::vector<double> coefficients;
    double multiplier = 0.0;
};

/// Christoffel function computed from its variational definition: the
/// stationarity system
///
///   [ M     -b(z) ] [ p      ]   [ 0 ]
///   [ b(z)^T  0   ] [ lambda ] = [ 1 ]
///
/// solved by a full-pivoting LU, independent of the spectral kernel route.
inline QPSolution christoffel_qp_oracle(const Measure& mu, std::size_t d, std::size_t n, const HPoint& z) {
    const MomentMatrix mm = assemble(mu, d, n);
    const auto dim = static_cast<Eigen::Index>(mm.size());
    Eigen::VectorXd b(dim);
    mm.basis().evaluate(z, std::span<double>(b.data(), mm.size()));

    Eigen::MatrixXd kkt = Eigen::MatrixXd::Zero(dim + 1, dim + 1);
    kkt.topLeftCorner(dim, dim) = mm.matrix();
    kkt.block(0, dim, dim, 1) = -b;
    kkt.block(dim, 0, 1, dim) = b.transpose();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim + 1);
    rhs(dim) = 1.0;

    const Eigen::FullPivLU<Eigen::MatrixXd> lu(kkt);
    if (!lu.isInvertible()) throw SingularMatrixError("bordered Christoffel system is singular", 1);
    const Eigen::VectorXd sol = lu.solve(rhs);
    const Eigen::VectorXd p = sol.head(dim);

    QPSolution out;
    out.value = p.dot(mm.matrix() * p);
    out.coefficients.assign(p.data(), p.data() + p.size());
    out.multiplier = sol(dim);
    return out;
}

}  // namespace cdk

#endif
