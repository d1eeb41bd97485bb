#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "cdk/moments.hpp"

namespace {

using cdk::HPoint;
using cdk::Measure;

Measure random_empirical(std::uint64_t seed, std::size_t count, std::size_t len) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<HPoint> pts;
    for (std::size_t i = 0; i < count; ++i) {
        std::vector<double> c(len);
        for (double& v : c) v = u(rng);
        pts.emplace_back(c);
    }
    return Measure::empirical(std::move(pts));
}

TEST(Assemble, DiracAtOrigin) {
    const cdk::MomentMatrix m = cdk::assemble(Measure::dirac(HPoint{}), 1, 1);
    Eigen::MatrixXd expect(2, 2);
    expect << 1, 0, 0, 0;
    EXPECT_EQ(m.matrix(), expect);
    EXPECT_EQ(m.degree(), 1u);
    EXPECT_EQ(m.harmonic(), 1u);
}

TEST(Assemble, CubeUniformFirstOrder) {
    const cdk::MomentMatrix m = cdk::assemble(Measure::cube_uniform(), 1, 1);
    EXPECT_DOUBLE_EQ(m.matrix()(0, 0), 1.0);
    EXPECT_DOUBLE_EQ(m.matrix()(1, 1), 1.0 / 3.0);
    EXPECT_EQ(m.matrix()(0, 1), 0.0);
    EXPECT_EQ(m.matrix()(1, 0), 0.0);
}

TEST(Assemble, EntriesAreMomentsOfSums) {
    const Measure mu = random_empirical(1, 40, 3);
    const cdk::MomentMatrix m = cdk::assemble(mu, 3, 3);
    ASSERT_EQ(m.size(), 20u);
    for (std::size_t i = 0; i < m.size(); ++i) {
        for (std::size_t j = 0; j < m.size(); ++j) {
            EXPECT_EQ(m.matrix()(i, j), cdk::moment(mu, m.basis()[i] + m.basis()[j]));
            EXPECT_EQ(m.matrix()(i, j), m.matrix()(j, i));
        }
    }
    EXPECT_EQ(m.data_truncation(), 3u);
    EXPECT_EQ(m.measure_description(), cdk::describe(mu));
}

TEST(Assemble, NestedOrdersGiveLeadingSubmatrix) {
    const Measure mu = random_empirical(2, 60, 4);
    for (std::size_t d = 1; d <= 3; ++d) {
        for (std::size_t n = 1; n <= 3; ++n) {
            const cdk::MomentMatrix small = cdk::assemble(mu, d, n);
            const cdk::MomentMatrix big = cdk::assemble(mu, d + 1, n + 1);
            // the smaller basis is a subset; compare through positions
            for (std::size_t i = 0; i < small.size(); ++i) {
                const std::size_t bi = big.basis().position(small.basis()[i]);
                ASSERT_LT(bi, big.size());
                for (std::size_t j = 0; j < small.size(); ++j) {
                    const std::size_t bj = big.basis().position(small.basis()[j]);
                    EXPECT_EQ(small.matrix()(i, j), big.matrix()(bi, bj));
                }
            }
        }
    }
}

TEST(Assemble, QuadraticFormIsIntegralOfSquare) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    const std::vector<Measure> measures{random_empirical(3, 50, 3), Measure::cube_uniform(),
                                        Measure::mixture({0.4, 0.6}, {random_empirical(4, 10, 2), Measure::gaussian(2.0)})};
    for (const Measure& mu : measures) {
        const cdk::MomentMatrix m = cdk::assemble(mu, 2, 3);
        for (int trial = 0; trial < 50; ++trial) {
            Eigen::VectorXd p(static_cast<Eigen::Index>(m.size()));
            for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = g(rng);
            const double quad = p.dot(m.matrix() * p);
            const double oracle = cdk::integrate_sq(mu, std::span<const double>(p.data(), m.size()), m.basis());
            EXPECT_GE(quad, -1e-12 * p.squaredNorm());
            EXPECT_NEAR(quad, oracle, 1e-10 * (1.0 + std::abs(oracle)));
        }
    }
}

TEST(Assemble, WorkerCountDoesNotChangeTheResult) {
    const Measure mu = random_empirical(6, 300, 5);
    const cdk::MomentMatrix one = cdk::assemble(mu, 3, 5, {1});
    const cdk::MomentMatrix four = cdk::assemble(mu, 3, 5, {4});
    const cdk::MomentMatrix all = cdk::assemble(mu, 3, 5, {0});
    EXPECT_EQ(one.matrix(), four.matrix());
    EXPECT_EQ(one.matrix(), all.matrix());
}

TEST(Assemble, CapacityGuard) {
    EXPECT_THROW(cdk::assemble(Measure::cube_uniform(), 10, 20, {1, 1000}), cdk::CapacityError);
}

TEST(Assemble, UndefinedMomentPropagates) {
    EXPECT_THROW(cdk::assemble(Measure::cube_uniform(2), 1, 3), cdk::UndefinedMomentError);
}

TEST(Factorize, Identity) {
    const auto f = cdk::factorize(Eigen::MatrixXd::Identity(4, 4));
    EXPECT_EQ(f.rank, 4u);
    EXPECT_TRUE(f.full_rank());
    for (Eigen::Index i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(f.eigenvalues(i), 1.0);
}

TEST(Factorize, DiagonalIsSortedDescending) {
    Eigen::MatrixXd m = Eigen::Vector3d(0.5, 3.0, 1.0).asDiagonal();
    const auto f = cdk::factorize(m);
    EXPECT_DOUBLE_EQ(f.eigenvalues(0), 3.0);
    EXPECT_DOUBLE_EQ(f.eigenvalues(1), 1.0);
    EXPECT_DOUBLE_EQ(f.eigenvalues(2), 0.5);
    EXPECT_DOUBLE_EQ(f.max_eigenvalue(), 3.0);
    EXPECT_DOUBLE_EQ(f.min_eigenvalue(), 0.5);
}

TEST(Factorize, RidgeOnDiracMatrix) {
    const cdk::MomentMatrix m = cdk::assemble(Measure::dirac(HPoint{}), 1, 1);
    const auto plain = cdk::factorize(m);
    EXPECT_EQ(plain.rank, 1u);
    EXPECT_FALSE(plain.full_rank());
    const auto f = cdk::factorize(m, 1e-6);
    EXPECT_DOUBLE_EQ(f.eigenvalues(0), 1.0 + 1e-6);
    EXPECT_DOUBLE_EQ(f.eigenvalues(1), 1e-6);
    EXPECT_EQ(f.rank, 2u);
}

TEST(Factorize, OrthonormalAndReconstructs) {
    const std::vector<Eigen::MatrixXd> ms{cdk::assemble(random_empirical(7, 80, 3), 2, 3).matrix(),
                                          cdk::assemble(Measure::cube_uniform(), 3, 2).matrix()};
    for (const Eigen::MatrixXd& m : ms) {
        const auto f = cdk::factorize(m);
        const Eigen::Index dim = m.rows();
        const Eigen::MatrixXd qtq = f.eigenvectors.transpose() * f.eigenvectors;
        EXPECT_LE((qtq - Eigen::MatrixXd::Identity(dim, dim)).cwiseAbs().maxCoeff(), 1e-12);
        const Eigen::MatrixXd back = f.eigenvectors * f.eigenvalues.asDiagonal() * f.eigenvectors.transpose();
        EXPECT_LE((back - m).cwiseAbs().maxCoeff(), 1e-12 * m.cwiseAbs().maxCoeff());
        for (Eigen::Index i = 1; i < dim; ++i) EXPECT_GE(f.eigenvalues(i - 1), f.eigenvalues(i));
    }
}

TEST(Factorize, RejectsBadParameters) {
    const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(2, 2);
    EXPECT_THROW(cdk::factorize(m, -1.0), cdk::InvalidArgument);
    EXPECT_THROW(cdk::factorize(m, 0.0, 0.0), cdk::InvalidArgument);
    EXPECT_THROW(cdk::factorize(m, 0.0, 1.0), cdk::InvalidArgument);
    EXPECT_THROW(cdk::factorize(Eigen::MatrixXd::Zero(2, 3)), cdk::InvalidArgument);
    Eigen::MatrixXd indefinite(2, 2);
    indefinite << 1, 0, 0, -1;
    EXPECT_THROW(cdk::factorize(indefinite), cdk::NumericalError);
}

TEST(Factorize, ClampsRoundoffNegatives) {
    Eigen::MatrixXd m(2, 2);
    m << 1, 0, 0, -1e-14;
    const auto f = cdk::factorize(m);
    EXPECT_EQ(f.eigenvalues(1), 0.0);
    EXPECT_EQ(f.rank, 1u);
}

TEST(EffectiveRank, Threshold) {
    EXPECT_EQ(cdk::effective_rank(Eigen::Vector3d(1.0, 1e-9, 1e-11), 1e-10), 2u);
    EXPECT_EQ(cdk::effective_rank(Eigen::Vector3d(1.0, 1e-9, 1e-11), 1e-8), 1u);
    EXPECT_EQ(cdk::effective_rank(Eigen::Vector3d(0.0, 0.0, 0.0), 1e-10), 0u);
}

TEST(ApplyInverse, Examples) {
    Eigen::MatrixXd m = Eigen::Vector2d(2.0, 4.0).asDiagonal();
    const auto f = cdk::factorize(m);
    const Eigen::VectorXd x = cdk::apply_inverse(f, Eigen::Vector2d(1.0, 1.0));
    EXPECT_DOUBLE_EQ(x(0), 0.5);
    EXPECT_DOUBLE_EQ(x(1), 0.25);
    EXPECT_THROW(cdk::apply_inverse(f, Eigen::Vector3d(1, 1, 1)), cdk::InvalidArgument);
}

TEST(ApplyInverse, RoundTrip) {
    std::mt19937_64 rng(9);
    std::normal_distribution<double> g(0.0, 1.0);
    const Eigen::MatrixXd m = cdk::assemble(random_empirical(10, 100, 3), 2, 3).matrix();
    const auto f = cdk::factorize(m);
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXd v(m.rows());
        for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = g(rng);
        const Eigen::VectorXd back = m * cdk::apply_inverse(f, v);
        EXPECT_LE((back - v).norm(), 1e-9 * v.norm());
    }
}

TEST(ApplyInverse, SingularReportsDeficiency) {
    const auto f = cdk::factorize(cdk::assemble(Measure::dirac(HPoint{0.3, 0.4}), 2, 2).matrix());
    EXPECT_EQ(f.rank, 1u);
    try {
        cdk::apply_inverse(f, Eigen::VectorXd::Ones(6));
        FAIL() << "expected SingularMatrixError";
    } catch (const cdk::SingularMatrixError& e) {
        EXPECT_EQ(e.deficient_count(), 5u);
    }
    const Eigen::VectorXd pinv = cdk::apply_inverse(f, Eigen::VectorXd::Ones(6), cdk::InverseMode::Pseudo);
    EXPECT_TRUE(pinv.allFinite());
}

}  // namespace
