#pragma once

// Gini decision trees on weighted rows, AdaBoost (SAMME) and random forests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "pcaenc/error.hpp"
#include "pcaenc/random.hpp"
#include "pcaenc/weighted_rows.hpp"

namespace pcaenc {

struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;  // go left when x[feature] <= threshold
    int left = -1;
    int right = -1;
    double value = 0.0;  // weighted fraction of attack rows reaching the node
};

struct DecisionTree {
    std::vector<TreeNode> nodes;

    /// Weighted attack fraction of the leaf reached by `x`.
    double score(std::span<const double> x) const {
        int i = 0;
        while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
            const auto& n = nodes[static_cast<std::size_t>(i)];
            i = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
        }
        return nodes[static_cast<std::size_t>(i)].value;
    }

    std::size_t depth() const { return depth_of(0); }

private:
    std::size_t depth_of(int i) const {
        const auto& n = nodes[static_cast<std::size_t>(i)];
        if (n.feature < 0) return 0;
        return 1 + std::max(depth_of(n.left), depth_of(n.right));
    }
};

struct TreeConfig {
    std::size_t max_depth = 5;
    std::size_t max_features = 0;  // 0: all features
    std::uint64_t seed = 0;
};

namespace detail {

class TreeGrower {
public:
    TreeGrower(const WeightedRows& data, std::span<const double> weights, const TreeConfig& cfg)
        : data_(data), weights_(weights), cfg_(cfg), rng_(cfg.seed) {
        const auto d = data.dim();
        max_features_ = cfg.max_features == 0 ? d : std::min(cfg.max_features, d);
        features_.resize(d);
        std::iota(features_.begin(), features_.end(), 0);
    }

    DecisionTree grow() {
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < data_.size(); ++i)
            if (weights_[i] > 0.0) rows.push_back(i);
        if (rows.empty()) throw InvalidArgument("decision tree: no rows with positive weight");
        tree_.nodes.clear();
        build(rows, 0);
        return std::move(tree_);
    }

private:
    static double gini(double w_pos, double w_tot) {
        if (w_tot <= 0.0) return 0.0;
        const double p = w_pos / w_tot;
        return 2.0 * p * (1.0 - p);
    }

    int build(std::vector<std::size_t>& rows, std::size_t depth) {
        double w_tot = 0.0, w_pos = 0.0;
        for (auto i : rows) {
            w_tot += weights_[i];
            if (data_.y[i]) w_pos += weights_[i];
        }
        const int id = static_cast<int>(tree_.nodes.size());
        tree_.nodes.push_back(TreeNode{-1, 0.0, -1, -1, w_pos / w_tot});

        if (depth >= cfg_.max_depth || w_pos == 0.0 || w_pos == w_tot || rows.size() < 2) return id;

        // Candidate features: a fresh shuffle per node; constant features do not
        // count toward max_features.
        for (std::size_t i = features_.size(); i > 1; --i) std::swap(features_[i - 1], features_[uniform_index(rng_, i)]);

        double best_impurity = INFINITY;
        int best_feature = -1;
        double best_threshold = 0.0;
        std::size_t evaluated = 0;
        std::vector<std::size_t> sorted(rows);
        for (std::size_t f : features_) {
            if (evaluated >= max_features_) break;
            std::stable_sort(sorted.begin(), sorted.end(),
                             [&](std::size_t a, std::size_t b) { return data_.x(a, f) < data_.x(b, f); });
            if (data_.x(sorted.front(), f) == data_.x(sorted.back(), f)) continue;
            ++evaluated;
            double wl = 0.0, wl_pos = 0.0;
            for (std::size_t k = 0; k + 1 < sorted.size(); ++k) {
                const auto i = sorted[k];
                wl += weights_[i];
                if (data_.y[i]) wl_pos += weights_[i];
                const double xv = data_.x(i, f), xn = data_.x(sorted[k + 1], f);
                if (xv == xn) continue;
                const double impurity = wl * gini(wl_pos, wl) + (w_tot - wl) * gini(w_pos - wl_pos, w_tot - wl);
                if (impurity < best_impurity) {
                    best_impurity = impurity;
                    best_feature = static_cast<int>(f);
                    double mid = 0.5 * (xv + xn);
                    if (!(mid < xn)) mid = xv;
                    best_threshold = mid;
                }
            }
        }
        if (best_feature < 0) return id;

        std::vector<std::size_t> left, right;
        for (auto i : rows)
            (data_.x(i, static_cast<std::size_t>(best_feature)) <= best_threshold ? left : right).push_back(i);
        rows.clear();
        rows.shrink_to_fit();
        const int l = build(left, depth + 1);
        const int r = build(right, depth + 1);
        auto& node = tree_.nodes[static_cast<std::size_t>(id)];
        node.feature = best_feature;
        node.threshold = best_threshold;
        node.left = l;
        node.right = r;
        return id;
    }

    const WeightedRows& data_;
    std::span<const double> weights_;
    TreeConfig cfg_;
    Rng rng_;
    std::size_t max_features_ = 0;
    std::vector<std::size_t> features_;
    DecisionTree tree_;
};

}  // namespace detail

/// Grows a gini tree using `weights` as sample weights (defaults to the row multiplicities).
inline DecisionTree grow_tree(const WeightedRows& data, const TreeConfig& cfg, std::span<const double> weights = {}) {
    if (weights.empty()) weights = data.w;
    if (weights.size() != data.size()) throw InvalidArgument("decision tree: weight length mismatch");
    return detail::TreeGrower(data, weights, cfg).grow();
}

// ---------------------------------------------------------------------------
// AdaBoost (SAMME, two classes)
// ---------------------------------------------------------------------------

struct AdaBoostModel {
    std::vector<DecisionTree> trees;
    std::vector<double> alphas;

    static double vote(const DecisionTree& t, std::span<const double> x) { return t.score(x) > 0.5 ? 1.0 : -1.0; }

    /// Sum of alpha_t * h_t(x) over the first `rounds` learners, h in {-1, +1}.
    double score(std::span<const double> x, std::size_t rounds) const {
        double s = 0.0;
        for (std::size_t t = 0; t < std::min(rounds, trees.size()); ++t) s += alphas[t] * vote(trees[t], x);
        return s;
    }
    double score(std::span<const double> x) const { return score(x, trees.size()); }
};

struct AdaBoostConfig {
    std::size_t n_estimators = 50;
    std::size_t max_depth = 1;
    std::uint64_t seed = 0;
};

/// Learner weight ln((1 - err) / err). A perfect learner is kept with weight 1 and
/// ends boosting; a learner with err >= 0.5 ends boosting and is kept (weight 1)
/// only when it is the first one.
inline AdaBoostModel train_adaboost(const WeightedRows& data, const AdaBoostConfig& cfg) {
    AdaBoostModel model;
    std::vector<double> w(data.w);
    const double total = data.total_weight();
    for (double& v : w) v /= total;

    for (std::size_t round = 0; round < cfg.n_estimators; ++round) {
        TreeConfig tc{cfg.max_depth, 0, mix_seed(cfg.seed + round)};
        DecisionTree tree = grow_tree(data, tc, w);
        double err = 0.0, sum = 0.0;
        std::vector<char> miss(data.size());
        for (std::size_t i = 0; i < data.size(); ++i) {
            const bool pred = tree.score(data.x.row(i)) > 0.5;
            miss[i] = pred != static_cast<bool>(data.y[i]);
            if (miss[i]) err += w[i];
            sum += w[i];
        }
        err /= sum;
        if (err <= 0.0) {
            model.trees.push_back(std::move(tree));
            model.alphas.push_back(1.0);
            break;
        }
        if (err >= 0.5) {
            if (model.trees.empty()) {
                model.trees.push_back(std::move(tree));
                model.alphas.push_back(1.0);
            }
            break;
        }
        const double alpha = std::log((1.0 - err) / err);
        double norm = 0.0;
        for (std::size_t i = 0; i < data.size(); ++i) {
            if (miss[i]) w[i] *= std::exp(alpha);
            norm += w[i];
        }
        for (double& v : w) v /= norm;
        model.trees.push_back(std::move(tree));
        model.alphas.push_back(alpha);
    }
    return model;
}

// ---------------------------------------------------------------------------
// Random forest
// ---------------------------------------------------------------------------

struct ForestModel {
    std::vector<DecisionTree> trees;

    /// Mean leaf attack fraction over the trees.
    double score(std::span<const double> x) const {
        double s = 0.0;
        for (const auto& t : trees) s += t.score(x);
        return s / static_cast<double>(trees.size());
    }
};

struct ForestConfig {
    std::size_t n_estimators = 10;
    std::size_t max_depth = 5;
    std::size_t max_features = 5;
    bool bootstrap = true;
    std::uint64_t seed = 0;
};

/// Tree t is grown with seed `seed + t`. With bootstrap, each tree sees a sample of
/// the original rows drawn with replacement (same size as the training set).
inline ForestModel train_forest(const WeightedRows& data, const ForestConfig& cfg) {
    if (cfg.n_estimators == 0) throw InvalidArgument("random forest: n_estimators must be >= 1");
    ForestModel model;
    std::vector<std::uint64_t> cumulative(data.size());
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        acc += static_cast<std::uint64_t>(std::llround(data.w[i]));
        cumulative[i] = acc;
    }
    for (std::size_t t = 0; t < cfg.n_estimators; ++t) {
        const std::uint64_t tree_seed = cfg.seed + t;
        TreeConfig tc{cfg.max_depth, cfg.max_features, tree_seed};
        if (!cfg.bootstrap) {
            model.trees.push_back(grow_tree(data, tc));
            continue;
        }
        Rng rng(mix_seed(tree_seed));
        std::vector<double> counts(data.size(), 0.0);
        for (std::uint64_t k = 0; k < acc; ++k) {
            const std::uint64_t u = uniform_index(rng, acc);
            const auto pos = std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin();
            counts[static_cast<std::size_t>(pos)] += 1.0;
        }
        model.trees.push_back(grow_tree(data, tc, counts));
    }
    return model;
}

}  // namespace pcaenc
