#pragma once

// Reference binary classifiers behind one interface. Scores grow with the
// likelihood of class C2 (attack); a row is predicted attack when its score
// reaches the kind's decision threshold.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pcaenc/error.hpp"
#include "pcaenc/linear_models.hpp"
#include "pcaenc/matrix.hpp"
#include "pcaenc/trees.hpp"
#include "pcaenc/weighted_rows.hpp"

namespace pcaenc {

enum class ClassifierKind {
    logistic_regression,
    linear_svm,
    decision_tree,
    adaboost_stumps,
    adaboost_depth5,
    random_forest,
    gaussian_nb,
};

inline constexpr std::pair<ClassifierKind, std::string_view> kClassifierNames[] = {
    {ClassifierKind::logistic_regression, "logistic_regression"},
    {ClassifierKind::linear_svm, "linear_svm"},
    {ClassifierKind::decision_tree, "decision_tree"},
    {ClassifierKind::adaboost_stumps, "adaboost_stumps"},
    {ClassifierKind::adaboost_depth5, "adaboost_depth5"},
    {ClassifierKind::random_forest, "random_forest"},
    {ClassifierKind::gaussian_nb, "gaussian_nb"},
};

inline std::string_view classifier_name(ClassifierKind k) {
    for (const auto& [kind, name] : kClassifierNames)
        if (kind == k) return name;
    return "unknown";
}

inline std::optional<ClassifierKind> parse_classifier(std::string_view name) {
    for (const auto& [kind, n] : kClassifierNames)
        if (n == name) return kind;
    return std::nullopt;
}

struct ClassifierConfig {
    ClassifierKind kind = ClassifierKind::logistic_regression;
    std::uint64_t seed = 0;
    // linear models
    double c = 1.0;
    std::size_t max_iter = 1000;
    double tol = 1e-6;
    // trees and ensembles
    std::size_t max_depth = 5;
    std::size_t max_features = 0;  // cap; 0 means all features
    std::size_t n_estimators = 1;
    bool bootstrap = true;
    // naive Bayes
    double var_smoothing = 1e-9;
};

/// Defaults for each kind (regularization C = 1, depth-5 gini trees, ...).
inline ClassifierConfig default_config(ClassifierKind kind) {
    ClassifierConfig c;
    c.kind = kind;
    switch (kind) {
        case ClassifierKind::logistic_regression:
        case ClassifierKind::linear_svm:
            break;
        case ClassifierKind::decision_tree:
            c.max_depth = 5;
            c.max_features = 8;
            break;
        case ClassifierKind::adaboost_stumps:
            c.max_depth = 1;
            c.n_estimators = 50;
            break;
        case ClassifierKind::adaboost_depth5:
            c.max_depth = 5;
            c.n_estimators = 10;
            break;
        case ClassifierKind::random_forest:
            c.max_depth = 5;
            c.max_features = 5;
            c.n_estimators = 10;
            c.bootstrap = true;
            break;
        case ClassifierKind::gaussian_nb:
            break;
    }
    return c;
}

struct GaussianNBModel {
    std::vector<double> mean[2];
    std::vector<double> var[2];
    double log_prior[2] = {0.0, 0.0};

    double log_joint(std::span<const double> x, int cls) const {
        double s = log_prior[cls];
        for (std::size_t c = 0; c < x.size(); ++c) {
            const double d = x[c] - mean[cls][c];
            s -= 0.5 * std::log(2.0 * std::numbers::pi * var[cls][c]) + d * d / (2.0 * var[cls][c]);
        }
        return s;
    }

    /// Log posterior odds log P(attack | x) - log P(normal | x).
    double score(std::span<const double> x) const { return log_joint(x, 1) - log_joint(x, 0); }
};

/// Weighted class-conditional means and population variances; every variance is
/// raised by var_smoothing times the largest overall feature variance.
inline GaussianNBModel train_gaussian_nb(const WeightedRows& data, double var_smoothing) {
    const std::size_t d = data.dim();
    GaussianNBModel m;
    double wc[2] = {0.0, 0.0};
    for (int k = 0; k < 2; ++k) {
        m.mean[k].assign(d, 0.0);
        m.var[k].assign(d, 0.0);
    }
    for (std::size_t i = 0; i < data.size(); ++i) {
        const int k = data.y[i];
        wc[k] += data.w[i];
        for (std::size_t c = 0; c < d; ++c) m.mean[k][c] += data.w[i] * data.x(i, c);
    }
    for (int k = 0; k < 2; ++k)
        for (double& v : m.mean[k]) v /= wc[k];
    for (std::size_t i = 0; i < data.size(); ++i) {
        const int k = data.y[i];
        for (std::size_t c = 0; c < d; ++c) {
            const double dv = data.x(i, c) - m.mean[k][c];
            m.var[k][c] += data.w[i] * dv * dv;
        }
    }
    const double total = wc[0] + wc[1];
    double max_var = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
        const double mu = (wc[0] * m.mean[0][c] + wc[1] * m.mean[1][c]) / total;
        double v = 0.0;
        for (std::size_t i = 0; i < data.size(); ++i) {
            const double dv = data.x(i, c) - mu;
            v += data.w[i] * dv * dv;
        }
        max_var = std::max(max_var, v / total);
    }
    const double eps = var_smoothing * max_var;
    for (int k = 0; k < 2; ++k)
        for (double& v : m.var[k]) {
            v = v / wc[k] + eps;
            if (!(v > 0.0)) v = std::numeric_limits<double>::min();
        }
    for (int k = 0; k < 2; ++k) m.log_prior[k] = std::log(wc[k] / total);
    return m;
}

class TrainedModel {
public:
    using Params = std::variant<LinearModel, DecisionTree, AdaBoostModel, ForestModel, GaussianNBModel>;

    TrainedModel(ClassifierConfig config, std::size_t width, Params params)
        : config_(config), width_(width), params_(std::move(params)) {}

    ClassifierKind kind() const noexcept { return config_.kind; }
    const ClassifierConfig& config() const noexcept { return config_; }
    std::size_t input_width() const noexcept { return width_; }
    const Params& params() const noexcept { return params_; }

    double decision_threshold() const {
        return kind() == ClassifierKind::decision_tree || kind() == ClassifierKind::random_forest ? 0.5 : 0.0;
    }

    double score(std::span<const double> x) const {
        return std::visit([&](const auto& p) { return p.score(x); }, params_);
    }

    std::vector<double> scores(const Matrix& x) const {
        if (x.cols() != width_)
            throw SchemaMismatch("model expects " + std::to_string(width_) + " features, got " + std::to_string(x.cols()));
        std::vector<double> out(x.rows());
        for (std::size_t r = 0; r < x.rows(); ++r) out[r] = score(x.row(r));
        return out;
    }

    Labels predict(const Matrix& x) const { return threshold_scores(scores(x)); }

    Labels threshold_scores(const std::vector<double>& s) const {
        Labels out(s.size());
        const double t = decision_threshold();
        for (std::size_t i = 0; i < s.size(); ++i) out[i] = s[i] >= t ? 1 : 0;
        return out;
    }

private:
    ClassifierConfig config_;
    std::size_t width_;
    Params params_;
};

inline std::size_t effective_max_features(std::size_t cap, std::size_t width) {
    return cap == 0 ? width : std::min(cap, width);
}

/// Trains on pre-weighted rows.
inline TrainedModel train_weighted(const WeightedRows& data, const ClassifierConfig& cfg) {
    const std::size_t width = data.dim();
    const LinearSolverConfig lin{cfg.c, cfg.max_iter, cfg.tol, cfg.seed};
    switch (cfg.kind) {
        case ClassifierKind::logistic_regression:
            return {cfg, width, train_logistic(data, lin)};
        case ClassifierKind::linear_svm:
            return {cfg, width, train_linear_svm(data, lin)};
        case ClassifierKind::decision_tree:
            return {cfg, width,
                    grow_tree(data, TreeConfig{cfg.max_depth, effective_max_features(cfg.max_features, width), cfg.seed})};
        case ClassifierKind::adaboost_stumps:
        case ClassifierKind::adaboost_depth5:
            return {cfg, width, train_adaboost(data, AdaBoostConfig{cfg.n_estimators, cfg.max_depth, cfg.seed})};
        case ClassifierKind::random_forest:
            return {cfg, width,
                    train_forest(data, ForestConfig{cfg.n_estimators, cfg.max_depth,
                                                    effective_max_features(cfg.max_features, width), cfg.bootstrap,
                                                    cfg.seed})};
        case ClassifierKind::gaussian_nb:
            return {cfg, width, train_gaussian_nb(data, cfg.var_smoothing)};
    }
    throw InvalidArgument("unknown classifier kind");
}

/// Validates the input, collapses duplicate rows and trains.
inline TrainedModel train(const Matrix& x, std::span<const std::uint8_t> y, const ClassifierConfig& cfg) {
    check_training_input(x, y);
    return train_weighted(WeightedRows::compress(x, y), cfg);
}

inline TrainedModel train(ClassifierKind kind, const Matrix& x, std::span<const std::uint8_t> y) {
    return train(x, y, default_config(kind));
}

inline std::vector<double> predict_scores(const TrainedModel& model, const Matrix& x) { return model.scores(x); }

}  // namespace pcaenc
