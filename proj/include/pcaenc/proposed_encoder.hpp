#pragma once

// Threshold/PCA category encoder.
//
// Each categorical variable becomes two indicator columns whose state depends on
// the category's conditional class probabilities and a single threshold:
//
//   (1,0)  p1 > p2 and p2 > threshold
//   (0,1)  p1 < p2 and p1 > threshold
//   (0,0)  otherwise (min(p1, p2) <= threshold, exact ties, unseen categories)
//
// The 2N indicator columns are centered and projected onto the leading K
// principal components, and the K scores are standardized with statistics of
// the training split.

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"
#include "pcaenc/category_stats.hpp"
#include "pcaenc/dataset.hpp"
#include "pcaenc/error.hpp"
#include "pcaenc/matrix.hpp"
#include "pcaenc/pca.hpp"

namespace pcaenc {

enum class IndicatorState : std::uint8_t {
    none = 0,  // (0,0)
    c1 = 1,    // (1,0)
    c2 = 2,    // (0,1)
};

inline constexpr std::pair<int, int> indicator_pair(IndicatorState s) {
    switch (s) {
        case IndicatorState::c1: return {1, 0};
        case IndicatorState::c2: return {0, 1};
        default: return {0, 0};
    }
}

inline IndicatorState indicator_state(double p1, double p2, double threshold) {
    if (p1 > p2 && p2 > threshold) return IndicatorState::c1;
    if (p1 < p2 && p1 > threshold) return IndicatorState::c2;
    return IndicatorState::none;
}

inline void check_threshold(double threshold) {
    if (!(threshold >= 0.0 && threshold <= 0.5))
        throw InvalidArgument("threshold must be a fraction in [0, 0.5], got " + std::to_string(threshold));
}

struct VariableStates {
    std::string variable;
    std::vector<std::pair<std::string, IndicatorState>> categories;  // fit-time first-appearance order

    IndicatorState state_of(std::string_view category) const {
        for (const auto& [name, state] : categories)
            if (name == category) return state;
        return IndicatorState::none;
    }
};

struct ThresholdMap {
    double threshold = 0.0;
    std::vector<VariableStates> variables;
};

inline ThresholdMap build_threshold_map(const std::vector<CategoryStats>& stats, double threshold) {
    check_threshold(threshold);
    ThresholdMap map;
    map.threshold = threshold;
    for (const auto& s : stats) {
        VariableStates vs;
        vs.variable = s.variable();
        for (const auto& r : s.records()) vs.categories.emplace_back(r.category, indicator_state(r.p1, r.p2, threshold));
        map.variables.push_back(std::move(vs));
    }
    return map;
}

/// Per-dataset-id lookup for one variable: the state of every id in `ds`'s intern table.
inline std::vector<IndicatorState> states_by_id(const Dataset& ds, std::size_t col, const VariableStates& vs) {
    std::unordered_map<std::string_view, IndicatorState> index;
    for (const auto& [name, state] : vs.categories) index.emplace(name, state);
    const auto& table = ds.interns(col);
    std::vector<IndicatorState> out(table.size(), IndicatorState::none);
    for (std::size_t id = 0; id < table.size(); ++id) {
        auto it = index.find(table.resolve(static_cast<CategoryId>(id)));
        if (it != index.end()) out[id] = it->second;
    }
    return out;
}

inline std::size_t categorical_column_of(const Dataset& ds, const std::string& variable) {
    std::size_t col = 0;
    try {
        col = ds.column_index(variable);
    } catch (const InvalidArgument&) {
        throw SchemaMismatch("dataset has no column '" + variable + "'");
    }
    if (ds.schema()[col].kind != ColumnKind::categorical)
        throw SchemaMismatch("column '" + variable + "' is not categorical");
    return col;
}

/// n_rows x 2N indicator matrix; variable i fills columns 2i and 2i+1.
inline Matrix expand_indicators(const Dataset& ds, const ThresholdMap& map) {
    const std::size_t n_vars = map.variables.size();
    Matrix out(ds.n_rows(), 2 * n_vars);
    for (std::size_t i = 0; i < n_vars; ++i) {
        const auto col = categorical_column_of(ds, map.variables[i].variable);
        const auto lookup = states_by_id(ds, col, map.variables[i]);
        for (std::size_t r = 0; r < ds.n_rows(); ++r) {
            const auto [a, b] = indicator_pair(lookup[ds.category(r, col)]);
            out(r, 2 * i) = a;
            out(r, 2 * i + 1) = b;
        }
    }
    return out;
}

struct ProposedEncoder {
    ThresholdMap map;
    PCAModel pca;
    Standardizer standardizer;
    std::size_t requested_components = 0;

    double threshold() const noexcept { return map.threshold; }
    /// Output width K after clamping to the usable component count.
    std::size_t components() const noexcept { return pca.retained; }
    bool clamped() const noexcept { return components() != requested_components; }

    Matrix transform(const Dataset& ds) const {
        Matrix scores = pca.project(expand_indicators(ds, map), components());
        standardizer.apply(scores);
        return scores;
    }
};

/// Fits the encoder on every categorical column of `train`. `k` is clamped to the
/// number of non-degenerate principal components.
inline ProposedEncoder fit_proposed(const Dataset& train, double threshold, std::size_t k) {
    if (k < 1) throw InvalidArgument("number of principal components must be >= 1");
    check_threshold(threshold);
    ProposedEncoder enc;
    enc.requested_components = k;
    enc.map = build_threshold_map(fit_all_stats(train), threshold);
    const Matrix indicators = expand_indicators(train, enc.map);
    enc.pca = fit_pca(indicators);
    if (enc.pca.usable() == 0)
        throw InvalidArgument("indicator matrix has no variance at threshold " + std::to_string(threshold));
    enc.pca.retained = std::min(k, enc.pca.usable());
    enc.standardizer = Standardizer::fit(enc.pca.project(indicators, enc.pca.retained));
    return enc;
}

inline Matrix transform(const ProposedEncoder& enc, const Dataset& ds) { return enc.transform(ds); }

inline std::vector<std::string> output_names(const ProposedEncoder& enc) {
    std::vector<std::string> names;
    for (std::size_t j = 0; j < enc.components(); ++j) names.push_back("pc" + std::to_string(j + 1));
    return names;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

using Json = nlohmann::ordered_json;

inline constexpr int kEncoderFormatVersion = 1;

namespace detail {

inline Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) rows.push_back(std::vector<double>(m.row(r).begin(), m.row(r).end()));
    return rows;
}

inline Matrix matrix_from_json(const Json& j, std::size_t cols) {
    Matrix m(j.size(), cols);
    for (std::size_t r = 0; r < j.size(); ++r) {
        const auto row = j.at(r).get<std::vector<double>>();
        if (row.size() != cols) throw ParseError("", 0, "encoder JSON: component row has wrong width");
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = row[c];
    }
    return m;
}

inline void check_envelope(const Json& j, std::string_view scheme) {
    if (j.value("format", "") != "pcaenc-encoder") throw ParseError("", 0, "not an encoder document");
    if (j.value("version", 0) != kEncoderFormatVersion)
        throw ParseError("", 0, "unsupported encoder document version");
    if (j.value("scheme", "") != scheme)
        throw ParseError("", 0, "encoder document holds scheme '" + j.value("scheme", "") + "'");
}

}  // namespace detail

inline Json to_json(const ProposedEncoder& enc) {
    Json j;
    j["format"] = "pcaenc-encoder";
    j["version"] = kEncoderFormatVersion;
    j["scheme"] = "proposed";
    j["threshold"] = enc.threshold();
    j["requested_components"] = enc.requested_components;
    j["components_retained"] = enc.components();
    Json vars = Json::array();
    for (const auto& v : enc.map.variables) {
        Json cats = Json::array();
        for (const auto& [name, state] : v.categories) {
            const auto [a, b] = indicator_pair(state);
            cats.push_back(Json{{"category", name}, {"state", {a, b}}});
        }
        vars.push_back(Json{{"name", v.variable}, {"categories", std::move(cats)}});
    }
    j["variables"] = std::move(vars);
    j["pca"] = Json{{"means", enc.pca.means},
                    {"components", detail::matrix_to_json(enc.pca.components)},
                    {"explained_variance", enc.pca.explained_variance}};
    j["standardizer"] = Json{{"mean", enc.standardizer.mean}, {"std", enc.standardizer.stddev}};
    return j;
}

inline ProposedEncoder proposed_from_json(const Json& j) {
    try {
        detail::check_envelope(j, "proposed");
        ProposedEncoder enc;
        enc.map.threshold = j.at("threshold").get<double>();
        check_threshold(enc.map.threshold);
        enc.requested_components = j.at("requested_components").get<std::size_t>();
        for (const auto& v : j.at("variables")) {
            VariableStates vs;
            vs.variable = v.at("name").get<std::string>();
            for (const auto& c : v.at("categories")) {
                const auto st = c.at("state").get<std::vector<int>>();
                IndicatorState s = IndicatorState::none;
                if (st == std::vector<int>{1, 0}) s = IndicatorState::c1;
                else if (st == std::vector<int>{0, 1}) s = IndicatorState::c2;
                else if (st != std::vector<int>{0, 0}) throw ParseError("", 0, "invalid indicator state");
                vs.categories.emplace_back(c.at("category").get<std::string>(), s);
            }
            enc.map.variables.push_back(std::move(vs));
        }
        const auto& p = j.at("pca");
        enc.pca.means = p.at("means").get<std::vector<double>>();
        enc.pca.components = detail::matrix_from_json(p.at("components"), enc.pca.means.size());
        enc.pca.explained_variance = p.at("explained_variance").get<std::vector<double>>();
        enc.pca.retained = j.at("components_retained").get<std::size_t>();
        if (enc.pca.means.size() != 2 * enc.map.variables.size() || enc.pca.retained < 1 ||
            enc.pca.retained > enc.pca.usable() || enc.pca.explained_variance.size() != enc.pca.usable())
            throw ParseError("", 0, "encoder JSON: inconsistent PCA dimensions");
        enc.standardizer.mean = j.at("standardizer").at("mean").get<std::vector<double>>();
        enc.standardizer.stddev = j.at("standardizer").at("std").get<std::vector<double>>();
        if (enc.standardizer.mean.size() != enc.pca.retained || enc.standardizer.stddev.size() != enc.pca.retained)
            throw ParseError("", 0, "encoder JSON: standardizer width mismatch");
        return enc;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("", 0, std::string("encoder JSON: ") + e.what());
    }
}

}  // namespace pcaenc
