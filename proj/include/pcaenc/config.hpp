#pragma once

// Grid configuration file: one `key = value` per line, '#' starts a comment.
//
//   train = data/KDDTrain+.txt          # relative paths resolve against the file's directory
//   test = data/KDDTest+.txt
//   thresholds = 0.5, 1.87, 5           # percent
//   pc_counts = 1, 2, 3
//   classifiers = linear_svm, random_forest
//   encoders = proposed, one_hot, polynomial   # or: proposed, all
//   seed = 7
//   subsample = 0.1
//   sort = harmonic_accuracy
//   threads = 4
//   allow_any_threshold = false
//   linear_svm.c = 0.5                  # per-classifier settings
//   random_forest.n_estimators = 20
//   hashing.n_buckets = 8               # baseline encoder settings

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "pcaenc/baseline_encoders.hpp"
#include "pcaenc/classifiers.hpp"
#include "pcaenc/error.hpp"
#include "pcaenc/format.hpp"
#include "pcaenc/grid_search.hpp"

namespace pcaenc {

namespace detail {

inline std::vector<std::string> split_list(std::string_view v) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : v) {
        if (ch == ',' || ch == ' ' || ch == '\t') {
            if (!cur.empty()) out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

inline double config_real(const std::string& key, std::string_view v) {
    double out = 0.0;
    if (!parse_real(v, out) || !std::isfinite(out)) throw ConfigError(key, "'" + std::string(v) + "' is not a number");
    return out;
}

inline std::uint64_t config_uint(const std::string& key, std::string_view v) {
    v = trim(v);
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (v.empty() || ec != std::errc() || ptr != v.data() + v.size())
        throw ConfigError(key, "'" + std::string(v) + "' is not a non-negative integer");
    return out;
}

inline bool config_bool(const std::string& key, std::string_view v) {
    v = trim(v);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(key, "'" + std::string(v) + "' is not a boolean");
}

inline void apply_classifier_key(ClassifierConfig& c, const std::string& key, const std::string& field,
                                 std::string_view v) {
    if (field == "c") {
        c.c = config_real(key, v);
        if (!(c.c > 0.0)) throw ConfigError(key, "must be > 0");
    } else if (field == "max_iter") {
        c.max_iter = config_uint(key, v);
        if (c.max_iter == 0) throw ConfigError(key, "must be >= 1");
    } else if (field == "tol") {
        c.tol = config_real(key, v);
        if (!(c.tol >= 0.0)) throw ConfigError(key, "must be >= 0");
    } else if (field == "max_depth") {
        c.max_depth = config_uint(key, v);
    } else if (field == "max_features") {
        c.max_features = config_uint(key, v);
    } else if (field == "n_estimators") {
        c.n_estimators = config_uint(key, v);
        if (c.n_estimators == 0) throw ConfigError(key, "must be >= 1");
    } else if (field == "bootstrap") {
        c.bootstrap = config_bool(key, v);
    } else if (field == "var_smoothing") {
        c.var_smoothing = config_real(key, v);
        if (!(c.var_smoothing >= 0.0)) throw ConfigError(key, "must be >= 0");
    } else {
        throw ConfigError(key, "unknown classifier setting '" + field + "'");
    }
}

inline void apply_baseline_key(BaselineParams& p, const std::string& key, std::string_view v) {
    if (key == "base_n.base") {
        const auto b = config_uint(key, v);
        if (b < 2 || b > 36) throw ConfigError(key, "base must be in [2, 36]");
        p.base = static_cast<unsigned>(b);
    } else if (key == "hashing.n_buckets") {
        p.n_buckets = config_uint(key, v);
        if (p.n_buckets == 0) throw ConfigError(key, "must be >= 1");
    } else if (key == "m_estimate.m") {
        p.m = config_real(key, v);
    } else if (key == "target.min_samples_leaf") {
        p.min_samples_leaf = config_real(key, v);
    } else if (key == "target.smoothing") {
        p.smoothing = config_real(key, v);
    } else if (key == "catboost.prior_weight") {
        p.catboost_prior_weight = config_real(key, v);
    } else if (key == "catboost.seed") {
        p.catboost_seed = config_uint(key, v);
    } else if (key == "woe.regularization") {
        p.woe_regularization = config_real(key, v);
    } else {
        throw ConfigError(key, "unknown key");
    }
}

}  // namespace detail

/// Parses a grid configuration. Relative dataset paths are resolved against `base_dir`.
inline GridSpec parse_grid_config(std::istream& in, const std::filesystem::path& base_dir = {}) {
    GridSpec spec;
    std::vector<std::string> classifier_names;
    bool classifiers_set = false;
    bool encoders_set = false;
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> classifier_keys;  // name -> (field, value)
    std::map<std::string, std::size_t> seen;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view s = line;
        if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(std::string(s), "line " + std::to_string(line_no) + " is not 'key = value'");
        const std::string key(trim(s.substr(0, eq)));
        const std::string_view value = trim(s.substr(eq + 1));
        if (key.empty()) throw ConfigError("", "line " + std::to_string(line_no) + " has an empty key");
        if (seen.contains(key))
            throw ConfigError(key, "duplicate key (lines " + std::to_string(seen[key]) + " and " +
                                       std::to_string(line_no) + ")");
        seen[key] = line_no;

        auto path_of = [&](std::string_view v) {
            std::filesystem::path p{std::string(v)};
            if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
            return p.lexically_normal().generic_string();
        };

        if (key == "train") {
            spec.train_path = path_of(value);
        } else if (key == "test") {
            spec.test_path = path_of(value);
        } else if (key == "thresholds") {
            spec.thresholds.clear();
            for (const auto& t : detail::split_list(value)) spec.thresholds.push_back(detail::config_real(key, t));
        } else if (key == "pc_counts") {
            spec.pc_counts.clear();
            for (const auto& t : detail::split_list(value)) spec.pc_counts.push_back(detail::config_uint(key, t));
        } else if (key == "classifiers") {
            classifiers_set = true;
            classifier_names = detail::split_list(value);
            for (const auto& n : classifier_names)
                if (!parse_classifier(n)) throw ConfigError(key, "unknown classifier '" + n + "'");
        } else if (key == "encoders") {
            encoders_set = true;
            spec.include_proposed = false;
            spec.encoders.clear();
            for (const auto& n : detail::split_list(value)) {
                if (n == kProposedLabel) {
                    spec.include_proposed = true;
                } else if (n == "all") {
                    for (const auto& [s, name] : kSchemeNames) spec.encoders.push_back(s);
                } else if (auto s = parse_scheme(n)) {
                    spec.encoders.push_back(*s);
                } else {
                    throw ConfigError(key, "unknown encoder '" + n + "'");
                }
            }
        } else if (key == "seed") {
            spec.seed = detail::config_uint(key, value);
        } else if (key == "subsample") {
            spec.subsample = detail::config_real(key, value);
        } else if (key == "sort") {
            auto m = parse_sort_metric(trim(value));
            if (!m) throw ConfigError(key, "unknown sort metric '" + std::string(value) + "'");
            spec.sort_metric = *m;
        } else if (key == "threads") {
            spec.threads = detail::config_uint(key, value);
        } else if (key == "allow_any_threshold") {
            spec.allow_any_threshold = detail::config_bool(key, value);
        } else if (const auto dot = key.find('.'); dot != std::string::npos) {
            const std::string head = key.substr(0, dot), field = key.substr(dot + 1);
            if (parse_classifier(head)) classifier_keys[head].emplace_back(field, std::string(value));
            else detail::apply_baseline_key(spec.baseline_params, key, value);
        } else {
            throw ConfigError(key, "unknown key");
        }
    }

    if (spec.train_path.empty()) throw ConfigError("train", "missing");
    if (spec.test_path.empty()) throw ConfigError("test", "missing");
    if (!classifiers_set)
        for (const auto& [k, name] : kClassifierNames) classifier_names.emplace_back(name);
    if (!encoders_set)
        for (const auto& [s, name] : kSchemeNames) spec.encoders.push_back(s);

    for (const auto& name : classifier_names) {
        auto cfg = default_config(*parse_classifier(name));
        if (auto it = classifier_keys.find(name); it != classifier_keys.end())
            for (const auto& [field, value] : it->second)
                detail::apply_classifier_key(cfg, name + "." + field, field, value);
        spec.classifiers.push_back(cfg);
    }
    for (const auto& [name, keys] : classifier_keys)
        if (std::find(classifier_names.begin(), classifier_names.end(), name) == classifier_names.end())
            throw ConfigError(name + "." + keys.front().first, "classifier '" + name + "' is not selected");

    spec.validate();
    return spec;
}

inline GridSpec load_grid_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("<file>", "cannot open " + path.string());
    return parse_grid_config(in, path.parent_path());
}

/// Every setting, defaults included, in the same format parse_grid_config reads.
inline std::string resolved_config(const GridSpec& spec) {
    std::ostringstream out;
    auto join = [&](const auto& xs, auto fmt) {
        std::string s;
        for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + fmt(xs[i]);
        return s;
    };
    out << "train = " << spec.train_path << "\n";
    out << "test = " << spec.test_path << "\n";
    out << "thresholds = " << join(spec.thresholds, [](double t) { return format_shortest(t); }) << "\n";
    out << "pc_counts = " << join(spec.pc_counts, [](std::size_t k) { return std::to_string(k); }) << "\n";
    out << "classifiers = "
        << join(spec.classifiers, [](const ClassifierConfig& c) { return std::string(classifier_name(c.kind)); })
        << "\n";
    std::vector<std::string> enc;
    if (spec.include_proposed) enc.emplace_back(kProposedLabel);
    for (auto s : spec.encoders) enc.emplace_back(scheme_name(s));
    out << "encoders = " << join(enc, [](const std::string& s) { return s; }) << "\n";
    out << "seed = " << spec.seed << "\n";
    if (spec.subsample) out << "subsample = " << format_shortest(*spec.subsample) << "\n";
    out << "sort = " << sort_metric_name(spec.sort_metric) << "\n";
    out << "threads = " << spec.threads << "\n";
    out << "allow_any_threshold = " << (spec.allow_any_threshold ? "true" : "false") << "\n";
    for (const auto& c : spec.classifiers) {
        const std::string p(classifier_name(c.kind));
        switch (c.kind) {
            case ClassifierKind::logistic_regression:
            case ClassifierKind::linear_svm:
                out << p << ".c = " << format_shortest(c.c) << "\n";
                out << p << ".max_iter = " << c.max_iter << "\n";
                out << p << ".tol = " << format_shortest(c.tol) << "\n";
                break;
            case ClassifierKind::decision_tree:
                out << p << ".max_depth = " << c.max_depth << "\n";
                out << p << ".max_features = " << c.max_features << "\n";
                break;
            case ClassifierKind::adaboost_stumps:
            case ClassifierKind::adaboost_depth5:
                out << p << ".max_depth = " << c.max_depth << "\n";
                out << p << ".n_estimators = " << c.n_estimators << "\n";
                break;
            case ClassifierKind::random_forest:
                out << p << ".max_depth = " << c.max_depth << "\n";
                out << p << ".max_features = " << c.max_features << "\n";
                out << p << ".n_estimators = " << c.n_estimators << "\n";
                out << p << ".bootstrap = " << (c.bootstrap ? "true" : "false") << "\n";
                break;
            case ClassifierKind::gaussian_nb:
                out << p << ".var_smoothing = " << format_shortest(c.var_smoothing) << "\n";
                break;
        }
    }
    const auto& b = spec.baseline_params;
    out << "base_n.base = " << b.base << "\n";
    out << "hashing.n_buckets = " << b.n_buckets << "\n";
    out << "m_estimate.m = " << format_shortest(b.m) << "\n";
    out << "target.min_samples_leaf = " << format_shortest(b.min_samples_leaf) << "\n";
    out << "target.smoothing = " << format_shortest(b.smoothing) << "\n";
    out << "catboost.prior_weight = " << format_shortest(b.catboost_prior_weight) << "\n";
    if (b.catboost_seed) out << "catboost.seed = " << *b.catboost_seed << "\n";
    out << "woe.regularization = " << format_shortest(b.woe_regularization) << "\n";
    return out.str();
}

}  // namespace pcaenc
