#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <random>

#include "pcaenc/pca.hpp"
#include "test_helpers.hpp"

using namespace pcaenc;
using pcaenc::test::random_matrix;

namespace {

Eigen::MatrixXd to_eigen(const Matrix& m) {
    Eigen::MatrixXd e(m.rows(), m.cols());
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) e(r, c) = m(r, c);
    return e;
}

}  // namespace

TEST(Pca, JacobiMatchesEigenOnRandomSymmetric) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const auto a = random_matrix(7, 7, rng);
        Matrix s(7, 7);
        for (std::size_t i = 0; i < 7; ++i)
            for (std::size_t j = 0; j < 7; ++j) s(i, j) = a(i, j) + a(j, i);
        const auto eig = symmetric_eigen(s);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(to_eigen(s));
        for (std::size_t i = 0; i < 7; ++i) {
            EXPECT_NEAR(eig.values[i], ref.eigenvalues()(6 - static_cast<int>(i)), 1e-10);
            // A v = lambda v
            for (std::size_t r = 0; r < 7; ++r) {
                double av = 0.0;
                for (std::size_t c = 0; c < 7; ++c) av += s(r, c) * eig.vectors(i, c);
                EXPECT_NEAR(av, eig.values[i] * eig.vectors(i, r), 1e-10);
            }
        }
    }
}

TEST(Pca, RejectsNonSquareAndTooFewRows) {
    EXPECT_THROW(symmetric_eigen(Matrix(2, 3)), InvalidArgument);
    EXPECT_THROW(fit_pca(Matrix(1, 3)), InvalidArgument);
}

TEST(Pca, ComponentsAgreeWithBruteForceCovariance) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const auto x = random_matrix(50, 6, rng);
        const auto model = fit_pca(x);
        ASSERT_EQ(model.usable(), 6u);

        const Eigen::MatrixXd e = to_eigen(x);
        const Eigen::MatrixXd centered = e.rowwise() - e.colwise().mean();
        const Eigen::MatrixXd cov = centered.transpose() * centered / 49.0;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(cov);
        for (int i = 0; i < 6; ++i) {
            const auto idx = static_cast<std::size_t>(i);
            EXPECT_NEAR(model.explained_variance[idx], ref.eigenvalues()(5 - i), 1e-8);
            Eigen::VectorXd v = ref.eigenvectors().col(5 - i);
            Eigen::Index arg = 0;
            v.cwiseAbs().maxCoeff(&arg);
            if (v(arg) < 0) v = -v;
            for (int c = 0; c < 6; ++c) EXPECT_NEAR(model.components(idx, static_cast<std::size_t>(c)), v(c), 1e-8);
        }
    }
}

TEST(Pca, OrthonormalComponentsAndExactReconstruction) {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        const auto x = random_matrix(40, 5, rng);
        const auto model = fit_pca(x);
        for (std::size_t i = 0; i < model.usable(); ++i)
            for (std::size_t j = 0; j < model.usable(); ++j) {
                double dot = 0.0;
                for (std::size_t c = 0; c < 5; ++c) dot += model.components(i, c) * model.components(j, c);
                EXPECT_NEAR(dot, i == j ? 1.0 : 0.0, 1e-9);
            }
        const auto back = model.reconstruct(model.project(x, model.usable()));
        for (std::size_t r = 0; r < x.rows(); ++r)
            for (std::size_t c = 0; c < x.cols(); ++c) EXPECT_NEAR(back(r, c), x(r, c), 1e-9);
    }
}

TEST(Pca, ScoresAreUncorrelated) {
    std::mt19937_64 rng(29);
    const auto x = random_matrix(80, 6, rng);
    const auto model = fit_pca(x);
    const auto scores = model.project(x, 6);
    const auto cov = sample_covariance(scores, column_means(scores));
    for (std::size_t i = 0; i < 6; ++i)
        for (std::size_t j = 0; j < 6; ++j)
            if (i != j) {
                EXPECT_LE(std::abs(cov(i, j)) / std::sqrt(cov(i, i) * cov(j, j)), 1e-8);
            }
}

TEST(Pca, DropsDegenerateDirections) {
    // third column is the sum of the first two
    std::mt19937_64 rng(31);
    auto x = random_matrix(30, 3, rng);
    for (std::size_t r = 0; r < 30; ++r) x(r, 2) = x(r, 0) + x(r, 1);
    const auto model = fit_pca(x);
    EXPECT_EQ(model.usable(), 2u);
    EXPECT_EQ(model.retained, 2u);
    EXPECT_EQ(fit_pca(Matrix(5, 3, 1.0)).usable(), 0u);
}

TEST(Pca, ExplainedVarianceNonIncreasing) {
    std::mt19937_64 rng(37);
    const auto model = fit_pca(random_matrix(25, 6, rng));
    for (std::size_t i = 1; i < model.explained_variance.size(); ++i)
        EXPECT_GE(model.explained_variance[i - 1], model.explained_variance[i]);
}

TEST(Pca, SignConventionAndTies) {
    std::vector<double> v{0.1, -0.7, 0.3};
    canonicalize_sign(v);
    EXPECT_EQ(v, (std::vector<double>{-0.1, 0.7, -0.3}));
    std::vector<double> tie{-0.5, 0.5, 0.1};
    canonicalize_sign(tie);
    EXPECT_EQ(tie, (std::vector<double>{0.5, -0.5, -0.1}));
}

TEST(Pca, FitIsBitReproducible) {
    std::mt19937_64 rng(41);
    const auto x = random_matrix(60, 6, rng);
    const auto a = fit_pca(x), b = fit_pca(x);
    EXPECT_EQ(a.components, b.components);
    EXPECT_EQ(a.explained_variance, b.explained_variance);
}

TEST(Pca, ProjectionErrors) {
    std::mt19937_64 rng(43);
    const auto model = fit_pca(random_matrix(10, 3, rng));
    EXPECT_THROW(model.project(Matrix(2, 4), 1), SchemaMismatch);
    EXPECT_THROW(model.project(Matrix(2, 3), 4), InvalidArgument);
    EXPECT_THROW(model.reconstruct(Matrix(2, 4)), InvalidArgument);
}

TEST(Standardizer, PopulationStatistics) {
    const auto x = Matrix::from_rows({{1, 10}, {3, 10.5}, {5, 11}});
    const auto s = Standardizer::fit(x);
    EXPECT_DOUBLE_EQ(s.mean[0], 3.0);
    EXPECT_DOUBLE_EQ(s.stddev[0], std::sqrt(8.0 / 3.0));
    Matrix y = x;
    s.apply(y);
    EXPECT_DOUBLE_EQ(y(1, 0), 0.0);
    EXPECT_THROW(Standardizer::fit(Matrix::from_rows({{1, 2}, {1, 3}})), InvalidArgument);
    Matrix wrong(1, 3);
    EXPECT_THROW(s.apply(wrong), SchemaMismatch);
}
