#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "pcaenc/dataset.hpp"
#include "pcaenc/error.hpp"
#include "pcaenc/matrix.hpp"

namespace pcaenc {

/// Binary labels: 1 = attack (class C2), 0 = normal (class C1).
using Labels = std::vector<std::uint8_t>;

inline Labels labels_of(const Dataset& ds) {
    Labels y(ds.n_rows());
    for (std::size_t r = 0; r < ds.n_rows(); ++r) y[r] = ds.target(r) == TargetClass::attack ? 1 : 0;
    return y;
}

/// Training rows with integer-valued multiplicities. Duplicate (row, label) pairs of
/// an encoded categorical table collapse into one weighted row, which every learner
/// here treats exactly like the repeated rows.
struct WeightedRows {
    Matrix x;
    Labels y;
    std::vector<double> w;

    std::size_t size() const noexcept { return y.size(); }
    std::size_t dim() const noexcept { return x.cols(); }

    double total_weight() const {
        double s = 0.0;
        for (double v : w) s += v;
        return s;
    }

    /// Unit weights, one row per input row.
    static WeightedRows expand(const Matrix& x, std::span<const std::uint8_t> y) {
        WeightedRows out;
        out.x = x;
        out.y.assign(y.begin(), y.end());
        out.w.assign(y.size(), 1.0);
        return out;
    }

    /// Collapses identical (row, label) pairs; unique rows keep first-appearance order.
    static WeightedRows compress(const Matrix& x, std::span<const std::uint8_t> y) {
        std::unordered_map<std::string, std::size_t> index;
        std::vector<std::size_t> first;
        std::vector<double> counts;
        std::string key;
        const std::size_t bytes = x.cols() * sizeof(double);
        for (std::size_t r = 0; r < x.rows(); ++r) {
            key.assign(reinterpret_cast<const char*>(x.row(r).data()), bytes);
            key.push_back(static_cast<char>(y[r]));
            auto [it, inserted] = index.emplace(key, first.size());
            if (inserted) {
                first.push_back(r);
                counts.push_back(1.0);
            } else {
                counts[it->second] += 1.0;
            }
        }
        WeightedRows out;
        out.x = Matrix(first.size(), x.cols());
        for (std::size_t i = 0; i < first.size(); ++i) {
            std::memcpy(out.x.row(i).data(), x.row(first[i]).data(), bytes);
            out.y.push_back(y[first[i]]);
        }
        out.w = std::move(counts);
        return out;
    }
};

inline void check_training_input(const Matrix& x, std::span<const std::uint8_t> y) {
    if (x.rows() != y.size()) throw InvalidArgument("X rows and y length differ");
    if (x.rows() < 2) throw InvalidArgument("need at least 2 training rows");
    if (x.cols() == 0) throw InvalidArgument("need at least 1 feature");
    bool has0 = false, has1 = false;
    for (auto v : y) (v ? has1 : has0) = true;
    if (!(has0 && has1)) throw InvalidArgument("training labels contain a single class");
    for (double v : x.data())
        if (std::isnan(v)) throw InvalidArgument("NaN in training matrix");
}

/// Weighted per-column mean and population standard deviation (1 for constant columns).
struct ColumnScaling {
    std::vector<double> mean;
    std::vector<double> scale;

    static ColumnScaling fit(const WeightedRows& d) {
        ColumnScaling s;
        s.mean.assign(d.dim(), 0.0);
        s.scale.assign(d.dim(), 0.0);
        const double total = d.total_weight();
        for (std::size_t i = 0; i < d.size(); ++i)
            for (std::size_t c = 0; c < d.dim(); ++c) s.mean[c] += d.w[i] * d.x(i, c);
        for (double& m : s.mean) m /= total;
        for (std::size_t i = 0; i < d.size(); ++i)
            for (std::size_t c = 0; c < d.dim(); ++c) {
                const double v = d.x(i, c) - s.mean[c];
                s.scale[c] += d.w[i] * v * v;
            }
        for (double& v : s.scale) {
            v = std::sqrt(v / total);
            if (!(v > 0.0)) v = 1.0;
        }
        return s;
    }

    Matrix apply(const Matrix& x) const {
        Matrix out(x.rows(), x.cols());
        for (std::size_t r = 0; r < x.rows(); ++r)
            for (std::size_t c = 0; c < x.cols(); ++c) out(r, c) = (x(r, c) - mean[c]) / scale[c];
        return out;
    }
};

}  // namespace pcaenc
