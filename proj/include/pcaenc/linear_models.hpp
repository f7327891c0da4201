#pragma once

// L2-regularized logistic regression and linear SVM.
//
// Both learners work in standardized feature coordinates (weighted mean 0,
// standard deviation 1); the learned hyperplane is mapped back to raw inputs.
// The intercept of logistic regression is not penalized.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "pcaenc/error.hpp"
#include "pcaenc/matrix.hpp"
#include "pcaenc/random.hpp"
#include "pcaenc/weighted_rows.hpp"

namespace pcaenc {

struct LinearModel {
    std::vector<double> weights;
    double bias = 0.0;

    double score(std::span<const double> x) const {
        double s = bias;
        for (std::size_t c = 0; c < weights.size(); ++c) s += weights[c] * x[c];
        return s;
    }
};

/// Mean weighted log-loss plus ||v||^2 / (2 C W); parameters are (v_0..v_{d-1}, b).
class LogisticObjective {
public:
    LogisticObjective(const WeightedRows& data, double c) : data_(data), c_(c), total_(data.total_weight()) {}

    std::size_t n_params() const noexcept { return data_.dim() + 1; }

    double value(std::span<const double> theta) const {
        const std::size_t d = data_.dim();
        double loss = 0.0;
        for (std::size_t i = 0; i < data_.size(); ++i) {
            const double z = margin(theta, i);
            loss += data_.w[i] * softplus(-z);
        }
        double reg = 0.0;
        for (std::size_t c = 0; c < d; ++c) reg += theta[c] * theta[c];
        return loss / total_ + reg / (2.0 * c_ * total_);
    }

    void gradient(std::span<const double> theta, std::span<double> grad) const {
        const std::size_t d = data_.dim();
        std::fill(grad.begin(), grad.end(), 0.0);
        for (std::size_t i = 0; i < data_.size(); ++i) {
            const double s = data_.y[i] ? 1.0 : -1.0;
            const double z = margin(theta, i);
            // d/dz softplus(-z) = -sigmoid(-z)
            const double g = -s * data_.w[i] * sigmoid(-z);
            for (std::size_t c = 0; c < d; ++c) grad[c] += g * data_.x(i, c);
            grad[d] += g;
        }
        for (std::size_t c = 0; c < d; ++c) grad[c] = grad[c] / total_ + theta[c] / (c_ * total_);
        grad[d] /= total_;
    }

    static double sigmoid(double z) {
        if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
        const double e = std::exp(z);
        return e / (1.0 + e);
    }

    static double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

private:
    /// Signed margin s_i * (v . x_i + b).
    double margin(std::span<const double> theta, std::size_t i) const {
        const std::size_t d = data_.dim();
        double z = theta[d];
        for (std::size_t c = 0; c < d; ++c) z += theta[c] * data_.x(i, c);
        return data_.y[i] ? z : -z;
    }

    const WeightedRows& data_;
    double c_;
    double total_;
};

struct LinearSolverConfig {
    double c = 1.0;
    std::size_t max_iter = 1000;
    double tol = 1e-6;
    std::uint64_t seed = 0;
};

namespace detail {

/// Maps a hyperplane over standardized inputs back to raw inputs.
inline LinearModel unscale(const ColumnScaling& s, std::span<const double> v, double b) {
    LinearModel m;
    m.weights.resize(v.size());
    m.bias = b;
    for (std::size_t c = 0; c < v.size(); ++c) {
        m.weights[c] = v[c] / s.scale[c];
        m.bias -= v[c] * s.mean[c] / s.scale[c];
    }
    return m;
}

}  // namespace detail

/// Accelerated gradient descent with backtracking. Stops when the relative decrease
/// of the objective drops below `tol` or after `max_iter` iterations.
inline LinearModel train_logistic(const WeightedRows& raw, const LinearSolverConfig& cfg) {
    const auto scaling = ColumnScaling::fit(raw);
    WeightedRows data{scaling.apply(raw.x), raw.y, raw.w};
    const LogisticObjective obj(data, cfg.c);
    const std::size_t p = obj.n_params();

    std::vector<double> x(p, 0.0), y(p, 0.0), x_next(p), grad(p);
    double fx = obj.value(x);
    double lipschitz = 1.0;
    double t = 1.0;
    for (std::size_t iter = 0; iter < cfg.max_iter; ++iter) {
        const double fy = obj.value(y);
        obj.gradient(y, grad);
        const double gnorm2 = std::inner_product(grad.begin(), grad.end(), grad.begin(), 0.0);
        if (gnorm2 == 0.0) {
            x = y;
            fx = fy;
            break;
        }
        double f_next = 0.0;
        for (int bt = 0; bt < 60; ++bt) {
            for (std::size_t k = 0; k < p; ++k) x_next[k] = y[k] - grad[k] / lipschitz;
            f_next = obj.value(x_next);
            if (f_next <= fy - 0.5 * gnorm2 / lipschitz) break;
            lipschitz *= 2.0;
        }
        if (f_next > fx) {
            // restart momentum from the last accepted iterate
            y = x;
            t = 1.0;
            continue;
        }
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        for (std::size_t k = 0; k < p; ++k) y[k] = x_next[k] + ((t - 1.0) / t_next) * (x_next[k] - x[k]);
        const double decrease = fx - f_next;
        x = x_next;
        t = t_next;
        fx = f_next;
        lipschitz *= 0.9;
        if (decrease <= cfg.tol * std::max(1.0, std::abs(fx))) break;
    }
    return detail::unscale(scaling, std::span<const double>(x).first(p - 1), x[p - 1]);
}

/// Hinge-loss SVM, primal 0.5 ||(v, b)||^2 + C sum_i w_i max(0, 1 - s_i (v . x_i + b)),
/// solved by dual coordinate descent. A weighted row's dual box is [0, C w_i].
/// Stops when the projected-gradient spread of an epoch is below `tol` or after
/// `max_iter` epochs. Row order per epoch is a permutation drawn from `seed`.
inline LinearModel train_linear_svm(const WeightedRows& raw, const LinearSolverConfig& cfg) {
    const auto scaling = ColumnScaling::fit(raw);
    const Matrix x = scaling.apply(raw.x);
    const std::size_t n = raw.size(), d = raw.dim();

    std::vector<double> w(d + 1, 0.0);  // last entry: bias on a constant-1 feature
    std::vector<double> alpha(n, 0.0), qdiag(n), upper(n);
    for (std::size_t i = 0; i < n; ++i) {
        double q = 1.0;
        for (std::size_t c = 0; c < d; ++c) q += x(i, c) * x(i, c);
        qdiag[i] = q;
        upper[i] = cfg.c * raw.w[i];
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(cfg.seed);

    for (std::size_t epoch = 0; epoch < cfg.max_iter; ++epoch) {
        for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);
        double pg_max = -INFINITY, pg_min = INFINITY;
        for (auto i : order) {
            const double s = raw.y[i] ? 1.0 : -1.0;
            double wx = w[d];
            for (std::size_t c = 0; c < d; ++c) wx += w[c] * x(i, c);
            const double g = s * wx - 1.0;
            double pg = g;
            if (alpha[i] == 0.0) pg = std::min(g, 0.0);
            else if (alpha[i] == upper[i]) pg = std::max(g, 0.0);
            pg_max = std::max(pg_max, pg);
            pg_min = std::min(pg_min, pg);
            if (pg == 0.0) continue;
            const double next = std::clamp(alpha[i] - g / qdiag[i], 0.0, upper[i]);
            const double delta = (next - alpha[i]) * s;
            alpha[i] = next;
            for (std::size_t c = 0; c < d; ++c) w[c] += delta * x(i, c);
            w[d] += delta;
        }
        if (pg_max - pg_min <= cfg.tol) break;
    }
    return detail::unscale(scaling, std::span<const double>(w).first(d), w[d]);
}

}  // namespace pcaenc
