#pragma once

// Principal component analysis over a small number of columns and the
// post-projection standardizer.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "pcaenc/error.hpp"
#include "pcaenc/matrix.hpp"

namespace pcaenc {

struct SymmetricEigen {
    std::vector<double> values;  // non-increasing
    Matrix vectors;              // row i is the unit eigenvector of values[i]
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Eigenpairs are sorted
/// by non-increasing eigenvalue (stable on ties).
inline SymmetricEigen symmetric_eigen(const Matrix& input) {
    const std::size_t n = input.rows();
    if (input.cols() != n) throw InvalidArgument("symmetric_eigen: matrix is not square");
    Matrix a = input;
    Matrix v = Matrix::identity(n);

    double total = 0.0;
    for (double x : a.data()) total += x * x;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (off == 0.0 || off <= 1e-32 * total) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });

    SymmetricEigen out;
    out.vectors = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        out.values.push_back(a(order[i], order[i]));
        for (std::size_t k = 0; k < n; ++k) out.vectors(i, k) = v(k, order[i]);
    }
    return out;
}

/// Flips `vec` so its largest-magnitude entry is positive. Entries within 1e-12 of
/// the maximum magnitude count as tied and the first one decides.
inline void canonicalize_sign(std::span<double> vec) {
    double max_abs = 0.0;
    for (double x : vec) max_abs = std::max(max_abs, std::abs(x));
    for (double x : vec) {
        if (std::abs(x) >= max_abs - 1e-12) {
            if (x < 0.0)
                for (double& y : vec) y = -y;
            return;
        }
    }
}

/// Sample covariance (n - 1 denominator) of the columns of `x`, two-pass.
inline Matrix sample_covariance(const Matrix& x, const std::vector<double>& means) {
    const std::size_t n = x.rows(), d = x.cols();
    Matrix cov(d, d);
    std::vector<double> centered(d);
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < d; ++c) centered[c] = x(r, c) - means[c];
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = i; j < d; ++j) cov(i, j) += centered[i] * centered[j];
    }
    const double denom = static_cast<double>(n - 1);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i; j < d; ++j) cov(j, i) = cov(i, j) = cov(i, j) / denom;
    return cov;
}

inline std::vector<double> column_means(const Matrix& x) {
    std::vector<double> means(x.cols(), 0.0);
    for (std::size_t r = 0; r < x.rows(); ++r)
        for (std::size_t c = 0; c < x.cols(); ++c) means[c] += x(r, c);
    for (double& m : means) m /= static_cast<double>(x.rows());
    return means;
}

/// Relative eigenvalue cutoff below which a component is treated as degenerate.
inline constexpr double kDegenerateRelTol = 1e-12;

struct PCAModel {
    std::vector<double> means;              // input width
    Matrix components;                      // usable components only, one per row
    std::vector<double> explained_variance; // non-increasing, all positive
    std::size_t retained = 0;               // K

    std::size_t input_dim() const noexcept { return means.size(); }
    std::size_t usable() const noexcept { return components.rows(); }

    /// Scores on the first `k` components.
    Matrix project(const Matrix& x, std::size_t k) const {
        if (x.cols() != input_dim()) throw SchemaMismatch("PCA input width mismatch");
        if (k > usable()) throw InvalidArgument("PCA: requested more components than available");
        Matrix out(x.rows(), k);
        std::vector<double> centered(input_dim());
        for (std::size_t r = 0; r < x.rows(); ++r) {
            for (std::size_t c = 0; c < input_dim(); ++c) centered[c] = x(r, c) - means[c];
            for (std::size_t j = 0; j < k; ++j) {
                double s = 0.0;
                for (std::size_t c = 0; c < input_dim(); ++c) s += centered[c] * components(j, c);
                out(r, j) = s;
            }
        }
        return out;
    }

    Matrix project(const Matrix& x) const { return project(x, retained); }

    /// Maps scores on the leading components back to input space (adds the means).
    Matrix reconstruct(const Matrix& scores) const {
        if (scores.cols() > usable()) throw InvalidArgument("PCA: too many score columns");
        Matrix out(scores.rows(), input_dim());
        for (std::size_t r = 0; r < scores.rows(); ++r)
            for (std::size_t c = 0; c < input_dim(); ++c) {
                double s = means[c];
                for (std::size_t j = 0; j < scores.cols(); ++j) s += scores(r, j) * components(j, c);
                out(r, c) = s;
            }
        return out;
    }
};

/// Fits PCA on the rows of `x`. All non-degenerate components are kept and
/// `retained` is set to their count.
inline PCAModel fit_pca(const Matrix& x) {
    if (x.rows() < 2) throw InvalidArgument("fit_pca: need at least 2 rows");
    PCAModel model;
    model.means = column_means(x);
    const auto eig = symmetric_eigen(sample_covariance(x, model.means));

    const double top = eig.values.empty() ? 0.0 : eig.values.front();
    std::size_t usable = 0;
    if (top > 0.0)
        while (usable < eig.values.size() && eig.values[usable] >= kDegenerateRelTol * top) ++usable;

    model.components = Matrix(usable, x.cols());
    for (std::size_t i = 0; i < usable; ++i) {
        auto row = model.components.row(i);
        std::copy_n(eig.vectors.row(i).begin(), x.cols(), row.begin());
        canonicalize_sign(row);
        model.explained_variance.push_back(eig.values[i]);
    }
    model.retained = usable;
    return model;
}

/// Column-wise standardization with population standard deviation.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> stddev;

    static Standardizer fit(const Matrix& x) {
        if (x.rows() == 0) throw InvalidArgument("Standardizer: no rows");
        Standardizer s;
        s.mean = column_means(x);
        s.stddev.assign(x.cols(), 0.0);
        for (std::size_t r = 0; r < x.rows(); ++r)
            for (std::size_t c = 0; c < x.cols(); ++c) {
                const double d = x(r, c) - s.mean[c];
                s.stddev[c] += d * d;
            }
        for (std::size_t c = 0; c < x.cols(); ++c) {
            s.stddev[c] = std::sqrt(s.stddev[c] / static_cast<double>(x.rows()));
            if (!(s.stddev[c] > 0.0))
                throw InvalidArgument("Standardizer: column " + std::to_string(c) + " has zero variance");
        }
        return s;
    }

    void apply(Matrix& x) const {
        if (x.cols() != mean.size()) throw SchemaMismatch("Standardizer width mismatch");
        for (std::size_t r = 0; r < x.rows(); ++r)
            for (std::size_t c = 0; c < x.cols(); ++c) x(r, c) = (x(r, c) - mean[c]) / stddev[c];
    }
};

}  // namespace pcaenc
