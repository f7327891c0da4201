#pragma once

// Classical category encoders used as comparison baselines.
//
// Unseen categories: indicator/digit/contrast blocks are all zero, ordinal uses
// the reserved code 0, count gives 0, the target-statistic family gives the
// training prior and WOE gives 0.

#include <cmath>
#include <cstdint>
#include <optional>
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
#include "pcaenc/random.hpp"

namespace pcaenc {

enum class Scheme {
    one_hot,
    ordinal,
    count,
    binary,
    base_n,
    hashing,
    target,
    m_estimate,
    james_stein,
    leave_one_out,
    catboost_ordered,
    woe,
    sum_contrast,
    helmert_contrast,
    backward_difference_contrast,
    polynomial_contrast,
};

inline constexpr std::pair<Scheme, std::string_view> kSchemeNames[] = {
    {Scheme::one_hot, "one_hot"},
    {Scheme::ordinal, "ordinal"},
    {Scheme::count, "count"},
    {Scheme::binary, "binary"},
    {Scheme::base_n, "base_n"},
    {Scheme::hashing, "hashing"},
    {Scheme::target, "target"},
    {Scheme::m_estimate, "m_estimate"},
    {Scheme::james_stein, "james_stein"},
    {Scheme::leave_one_out, "leave_one_out"},
    {Scheme::catboost_ordered, "catboost"},
    {Scheme::woe, "woe"},
    {Scheme::sum_contrast, "sum"},
    {Scheme::helmert_contrast, "helmert"},
    {Scheme::backward_difference_contrast, "backward_difference"},
    {Scheme::polynomial_contrast, "polynomial"},
};

inline std::string_view scheme_name(Scheme s) {
    for (const auto& [scheme, name] : kSchemeNames)
        if (scheme == s) return name;
    return "unknown";
}

inline std::optional<Scheme> parse_scheme(std::string_view name) {
    for (const auto& [scheme, n] : kSchemeNames)
        if (n == name) return scheme;
    return std::nullopt;
}

inline bool is_contrast(Scheme s) {
    return s == Scheme::sum_contrast || s == Scheme::helmert_contrast ||
           s == Scheme::backward_difference_contrast || s == Scheme::polynomial_contrast;
}

inline bool is_target_statistic(Scheme s) {
    return s == Scheme::target || s == Scheme::m_estimate || s == Scheme::james_stein ||
           s == Scheme::leave_one_out || s == Scheme::catboost_ordered || s == Scheme::woe;
}

struct BaselineParams {
    unsigned base = 2;                 // base_n (binary always uses 2)
    std::size_t n_buckets = 8;         // hashing
    double m = 1.0;                    // m_estimate
    double min_samples_leaf = 20.0;    // target: sigmoid midpoint k
    double smoothing = 10.0;           // target: sigmoid slope f
    double catboost_prior_weight = 1.0;
    std::optional<std::uint64_t> catboost_seed;  // unset: file order
    double woe_regularization = 0.5;

    void validate() const {
        if (base < 2) throw InvalidArgument("base_n: base must be >= 2");
        if (n_buckets < 1) throw InvalidArgument("hashing: n_buckets must be >= 1");
        if (!(m >= 0.0)) throw InvalidArgument("m_estimate: m must be >= 0");
        if (!(smoothing > 0.0)) throw InvalidArgument("target: smoothing must be > 0");
        if (!(catboost_prior_weight > 0.0)) throw InvalidArgument("catboost: prior weight must be > 0");
        if (!(woe_regularization > 0.0)) throw InvalidArgument("woe: regularization must be > 0");
    }
};

// ---------------------------------------------------------------------------
// Contrast matrices: c rows (levels in ordinal order) x (c - 1) columns.
// ---------------------------------------------------------------------------

/// Deviation coding: level k < c-1 maps to e_k, the last level to all -1.
inline Matrix sum_contrast(std::size_t c) {
    Matrix m(c, c ? c - 1 : 0);
    for (std::size_t k = 0; k + 1 < c; ++k) {
        m(k, k) = 1.0;
        m(c - 1, k) = -1.0;
    }
    return m;
}

/// Column j contrasts level j+1 with the mean of levels 0..j.
inline Matrix helmert_contrast(std::size_t c) {
    Matrix m(c, c ? c - 1 : 0);
    for (std::size_t j = 0; j + 1 < c; ++j) {
        for (std::size_t k = 0; k <= j; ++k) m(k, j) = -1.0;
        m(j + 1, j) = static_cast<double>(j + 1);
    }
    return m;
}

/// Column j contrasts level j+1 with level j.
inline Matrix backward_difference_contrast(std::size_t c) {
    Matrix m(c, c ? c - 1 : 0);
    const double n = static_cast<double>(c);
    for (std::size_t j = 0; j + 1 < c; ++j)
        for (std::size_t k = 0; k < c; ++k)
            m(k, j) = k <= j ? -static_cast<double>(c - 1 - j) / n : static_cast<double>(j + 1) / n;
    return m;
}

/// Orthonormal polynomial contrasts over equally spaced levels 0..c-1 (degrees 1..c-1).
/// Built by Lanczos on diag(levels) with full reorthogonalization, which stays
/// orthogonal for high degree where a Vandermonde basis would not.
inline Matrix polynomial_contrast(std::size_t c) {
    Matrix m(c, c ? c - 1 : 0);
    if (c < 2) return m;
    const double mid = 0.5 * static_cast<double>(c - 1);
    std::vector<std::vector<double>> basis;
    basis.emplace_back(c, 1.0 / std::sqrt(static_cast<double>(c)));
    for (std::size_t deg = 1; deg < c; ++deg) {
        std::vector<double> v(c);
        for (std::size_t k = 0; k < c; ++k) v[k] = (static_cast<double>(k) - mid) * basis.back()[k];
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& b : basis) {
                double dot = 0.0;
                for (std::size_t k = 0; k < c; ++k) dot += v[k] * b[k];
                for (std::size_t k = 0; k < c; ++k) v[k] -= dot * b[k];
            }
        }
        double norm = 0.0;
        for (double x : v) norm += x * x;
        norm = std::sqrt(norm);
        for (double& x : v) x /= norm;
        for (std::size_t k = 0; k < c; ++k) m(k, deg - 1) = v[k];
        basis.push_back(std::move(v));
    }
    return m;
}

inline Matrix contrast_matrix(Scheme s, std::size_t c) {
    switch (s) {
        case Scheme::sum_contrast: return sum_contrast(c);
        case Scheme::helmert_contrast: return helmert_contrast(c);
        case Scheme::backward_difference_contrast: return backward_difference_contrast(c);
        case Scheme::polynomial_contrast: return polynomial_contrast(c);
        default: throw InvalidArgument("not a contrast scheme");
    }
}

/// Number of base-`base` digits needed to write `max_code`.
inline std::size_t digits_for(std::uint64_t max_code, unsigned base) {
    std::size_t d = 1;
    for (std::uint64_t v = max_code / base; v > 0; v /= base) ++d;
    return d;
}

/// 64-bit FNV-1a of the bytes of `s`.
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

struct BaselineVariable {
    std::string name;
    std::vector<std::string> categories;  // first-appearance order; ordinal code = index + 1
    std::vector<std::uint64_t> count_total;
    std::vector<std::uint64_t> count_c2;
    std::vector<double> value;  // scalar schemes: encoded value per category
    Matrix contrast;            // contrast schemes
    std::size_t width = 0;      // output columns contributed
};

struct FittedBaseline {
    Scheme scheme = Scheme::one_hot;
    BaselineParams params;
    double prior = 0.0;  // fraction of class C2 (attack) in the training split
    std::uint64_t n_c1 = 0;
    std::uint64_t n_c2 = 0;
    std::vector<BaselineVariable> variables;
    std::size_t output_dim = 0;

    std::vector<std::string> output_names() const {
        std::vector<std::string> names;
        if (scheme == Scheme::hashing) {
            for (std::size_t b = 0; b < params.n_buckets; ++b) names.push_back("hash_" + std::to_string(b));
            return names;
        }
        for (const auto& v : variables) {
            if (scheme == Scheme::one_hot)
                for (const auto& c : v.categories) names.push_back(v.name + "=" + c);
            else if (v.width == 1)
                names.push_back(v.name);
            else
                for (std::size_t j = 0; j < v.width; ++j) names.push_back(v.name + "_" + std::to_string(j));
        }
        return names;
    }
};

namespace detail {

inline double target_value(Scheme scheme, const BaselineParams& p, double prior, double global_var,
                           std::uint64_t n, std::uint64_t c2, std::uint64_t c1, std::uint64_t n_c1,
                           std::uint64_t n_c2, std::size_t n_categories) {
    const double nn = static_cast<double>(n);
    const double mean = static_cast<double>(c2) / nn;
    switch (scheme) {
        case Scheme::target: {
            const double s = 1.0 / (1.0 + std::exp(-(nn - p.min_samples_leaf) / p.smoothing));
            return prior * (1.0 - s) + mean * s;
        }
        case Scheme::m_estimate:
            return (static_cast<double>(c2) + p.m * prior) / (nn + p.m);
        case Scheme::james_stein: {
            // Shrink toward the prior by the share of the category mean's sampling variance.
            const double within = mean * (1.0 - mean) / nn;
            const double denom = within + global_var;
            const double b = denom > 0.0 ? within / denom : 0.0;
            return (1.0 - b) * mean + b * prior;
        }
        case Scheme::leave_one_out:
            return mean;
        case Scheme::catboost_ordered:
            return (static_cast<double>(c2) + p.catboost_prior_weight * prior) / (nn + p.catboost_prior_weight);
        case Scheme::woe: {
            const double a = p.woe_regularization;
            const double k = static_cast<double>(n_categories);
            const double p_c2 = (static_cast<double>(c2) + a) / (static_cast<double>(n_c2) + a * k);
            const double p_c1 = (static_cast<double>(c1) + a) / (static_cast<double>(n_c1) + a * k);
            return std::log(p_c2 / p_c1);
        }
        default:
            return 0.0;
    }
}

/// For each id of `ds`'s column, the fitted category index or -1 when unseen.
inline std::vector<std::ptrdiff_t> category_index(const Dataset& ds, std::size_t col, const BaselineVariable& v) {
    std::unordered_map<std::string_view, std::ptrdiff_t> index;
    for (std::size_t i = 0; i < v.categories.size(); ++i) index.emplace(v.categories[i], static_cast<std::ptrdiff_t>(i));
    const auto& table = ds.interns(col);
    std::vector<std::ptrdiff_t> out(table.size(), -1);
    for (std::size_t id = 0; id < table.size(); ++id) {
        auto it = index.find(table.resolve(static_cast<CategoryId>(id)));
        if (it != index.end()) out[id] = it->second;
    }
    return out;
}

inline std::size_t baseline_column(const Dataset& ds, const std::string& name) {
    std::size_t col = 0;
    try {
        col = ds.column_index(name);
    } catch (const InvalidArgument&) {
        throw SchemaMismatch("dataset has no column '" + name + "'");
    }
    if (ds.schema()[col].kind != ColumnKind::categorical) throw SchemaMismatch("column '" + name + "' is not categorical");
    return col;
}

}  // namespace detail

inline FittedBaseline fit_baseline(const Dataset& train, Scheme scheme, const BaselineParams& params = {}) {
    params.validate();
    if (train.n_rows() == 0) throw InvalidArgument("fit_baseline: empty dataset");
    FittedBaseline enc;
    enc.scheme = scheme;
    enc.params = params;
    if (scheme == Scheme::binary) enc.params.base = 2;
    for (auto t : train.targets()) (t == TargetClass::attack ? enc.n_c2 : enc.n_c1) += 1;
    enc.prior = static_cast<double>(enc.n_c2) / static_cast<double>(train.n_rows());
    const double global_var = enc.prior * (1.0 - enc.prior);

    for (const auto& stats : fit_all_stats(train)) {
        BaselineVariable v;
        v.name = stats.variable();
        for (const auto& r : stats.records()) {
            v.categories.push_back(r.category);
            v.count_total.push_back(r.count_total);
            v.count_c2.push_back(r.count_c2);
        }
        const std::size_t c = v.categories.size();
        switch (scheme) {
            case Scheme::one_hot:
                v.width = c;
                break;
            case Scheme::binary:
            case Scheme::base_n:
                v.width = digits_for(c, enc.params.base);
                break;
            case Scheme::hashing:
                v.width = 0;
                break;
            case Scheme::ordinal:
                v.width = 1;
                for (std::size_t i = 0; i < c; ++i) v.value.push_back(static_cast<double>(i + 1));
                break;
            case Scheme::count:
                v.width = 1;
                for (auto n : v.count_total) v.value.push_back(static_cast<double>(n));
                break;
            default:
                if (is_contrast(scheme)) {
                    v.contrast = contrast_matrix(scheme, c);
                    v.width = v.contrast.cols();
                } else {
                    v.width = 1;
                    for (std::size_t i = 0; i < c; ++i)
                        v.value.push_back(detail::target_value(scheme, enc.params, enc.prior, global_var, v.count_total[i],
                                                               v.count_c2[i], v.count_total[i] - v.count_c2[i], enc.n_c1,
                                                               enc.n_c2, c));
                }
        }
        enc.output_dim += v.width;
        enc.variables.push_back(std::move(v));
    }
    if (scheme == Scheme::hashing) enc.output_dim = enc.params.n_buckets;
    return enc;
}

/// Encodes `ds` with the fitted tables (inference mode).
inline Matrix transform_baseline(const FittedBaseline& enc, const Dataset& ds) {
    Matrix out(ds.n_rows(), enc.output_dim);
    std::size_t offset = 0;
    const double unseen_scalar = enc.scheme == Scheme::woe                ? 0.0
                                 : is_target_statistic(enc.scheme)        ? enc.prior
                                                                          : 0.0;
    for (const auto& v : enc.variables) {
        const auto col = detail::baseline_column(ds, v.name);
        if (enc.scheme == Scheme::hashing) {
            const auto& table = ds.interns(col);
            std::vector<std::size_t> bucket(table.size());
            for (std::size_t id = 0; id < table.size(); ++id)
                bucket[id] = fnv1a64(table.resolve(static_cast<CategoryId>(id))) % enc.params.n_buckets;
            for (std::size_t r = 0; r < ds.n_rows(); ++r) out(r, bucket[ds.category(r, col)]) += 1.0;
            continue;
        }
        const auto idx = detail::category_index(ds, col, v);
        for (std::size_t r = 0; r < ds.n_rows(); ++r) {
            const auto i = idx[ds.category(r, col)];
            switch (enc.scheme) {
                case Scheme::one_hot:
                    if (i >= 0) out(r, offset + static_cast<std::size_t>(i)) = 1.0;
                    break;
                case Scheme::binary:
                case Scheme::base_n: {
                    if (i < 0) break;
                    std::uint64_t code = static_cast<std::uint64_t>(i) + 1;
                    for (std::size_t d = v.width; d-- > 0;) {
                        out(r, offset + d) = static_cast<double>(code % enc.params.base);
                        code /= enc.params.base;
                    }
                    break;
                }
                default:
                    if (is_contrast(enc.scheme)) {
                        if (i >= 0)
                            for (std::size_t j = 0; j < v.width; ++j)
                                out(r, offset + j) = v.contrast(static_cast<std::size_t>(i), j);
                    } else {
                        out(r, offset) = i >= 0 ? v.value[static_cast<std::size_t>(i)] : unseen_scalar;
                    }
            }
        }
        offset += v.width;
    }
    return out;
}

/// Fits on `train` and encodes it in training mode: leave-one-out excludes each
/// row's own target and catboost uses ordered running statistics. Every other
/// scheme is fit followed by transform.
inline std::pair<FittedBaseline, Matrix> fit_transform_baseline(const Dataset& train, Scheme scheme,
                                                                const BaselineParams& params = {}) {
    FittedBaseline enc = fit_baseline(train, scheme, params);
    if (scheme != Scheme::leave_one_out && scheme != Scheme::catboost_ordered) {
        Matrix x = transform_baseline(enc, train);
        return {std::move(enc), std::move(x)};
    }

    Matrix out(train.n_rows(), enc.output_dim);
    std::vector<std::size_t> order(train.n_rows());
    for (std::size_t r = 0; r < order.size(); ++r) order[r] = r;
    if (scheme == Scheme::catboost_ordered && enc.params.catboost_seed) {
        Rng rng(*enc.params.catboost_seed);
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[uniform_index(rng, i)]);
    }

    for (std::size_t vi = 0; vi < enc.variables.size(); ++vi) {
        const auto& v = enc.variables[vi];
        const auto col = detail::baseline_column(train, v.name);
        const auto idx = detail::category_index(train, col, v);
        if (scheme == Scheme::leave_one_out) {
            for (std::size_t r = 0; r < train.n_rows(); ++r) {
                const auto i = static_cast<std::size_t>(idx[train.category(r, col)]);
                const auto n = v.count_total[i];
                const double own = train.target(r) == TargetClass::attack ? 1.0 : 0.0;
                out(r, vi) = n > 1 ? (static_cast<double>(v.count_c2[i]) - own) / static_cast<double>(n - 1) : enc.prior;
            }
        } else {
            std::vector<double> seen_n(v.categories.size(), 0.0), seen_c2(v.categories.size(), 0.0);
            const double a = enc.params.catboost_prior_weight;
            for (auto r : order) {
                const auto i = static_cast<std::size_t>(idx[train.category(r, col)]);
                out(r, vi) = (seen_c2[i] + a * enc.prior) / (seen_n[i] + a);
                seen_n[i] += 1.0;
                if (train.target(r) == TargetClass::attack) seen_c2[i] += 1.0;
            }
        }
    }
    return {std::move(enc), std::move(out)};
}

// ---------------------------------------------------------------------------
// Serialization (same envelope as the proposed encoder)
// ---------------------------------------------------------------------------

inline nlohmann::ordered_json to_json(const FittedBaseline& enc) {
    nlohmann::ordered_json j;
    j["format"] = "pcaenc-encoder";
    j["version"] = 1;
    j["scheme"] = std::string(scheme_name(enc.scheme));
    j["params"] = {{"base", enc.params.base},
                   {"n_buckets", enc.params.n_buckets},
                   {"m", enc.params.m},
                   {"min_samples_leaf", enc.params.min_samples_leaf},
                   {"smoothing", enc.params.smoothing},
                   {"catboost_prior_weight", enc.params.catboost_prior_weight},
                   {"woe_regularization", enc.params.woe_regularization}};
    if (enc.params.catboost_seed) j["params"]["catboost_seed"] = *enc.params.catboost_seed;
    j["prior"] = enc.prior;
    j["n_c1"] = enc.n_c1;
    j["n_c2"] = enc.n_c2;
    j["output_dim"] = enc.output_dim;
    auto vars = nlohmann::ordered_json::array();
    for (const auto& v : enc.variables) {
        nlohmann::ordered_json jv;
        jv["name"] = v.name;
        jv["categories"] = v.categories;
        jv["count_total"] = v.count_total;
        jv["count_c2"] = v.count_c2;
        if (!v.value.empty()) jv["value"] = v.value;
        jv["width"] = v.width;
        vars.push_back(std::move(jv));
    }
    j["variables"] = std::move(vars);
    return j;
}

inline FittedBaseline baseline_from_json(const nlohmann::ordered_json& j) {
    try {
        if (j.value("format", "") != "pcaenc-encoder" || j.value("version", 0) != 1)
            throw ParseError("", 0, "not a version-1 encoder document");
        const auto scheme = parse_scheme(j.value("scheme", ""));
        if (!scheme) throw ParseError("", 0, "unknown baseline scheme '" + j.value("scheme", "") + "'");
        FittedBaseline enc;
        enc.scheme = *scheme;
        const auto& p = j.at("params");
        enc.params.base = p.at("base").get<unsigned>();
        enc.params.n_buckets = p.at("n_buckets").get<std::size_t>();
        enc.params.m = p.at("m").get<double>();
        enc.params.min_samples_leaf = p.at("min_samples_leaf").get<double>();
        enc.params.smoothing = p.at("smoothing").get<double>();
        enc.params.catboost_prior_weight = p.at("catboost_prior_weight").get<double>();
        enc.params.woe_regularization = p.at("woe_regularization").get<double>();
        if (p.contains("catboost_seed")) enc.params.catboost_seed = p.at("catboost_seed").get<std::uint64_t>();
        enc.params.validate();
        enc.prior = j.at("prior").get<double>();
        enc.n_c1 = j.at("n_c1").get<std::uint64_t>();
        enc.n_c2 = j.at("n_c2").get<std::uint64_t>();
        enc.output_dim = j.at("output_dim").get<std::size_t>();
        for (const auto& jv : j.at("variables")) {
            BaselineVariable v;
            v.name = jv.at("name").get<std::string>();
            v.categories = jv.at("categories").get<std::vector<std::string>>();
            v.count_total = jv.at("count_total").get<std::vector<std::uint64_t>>();
            v.count_c2 = jv.at("count_c2").get<std::vector<std::uint64_t>>();
            if (jv.contains("value")) v.value = jv.at("value").get<std::vector<double>>();
            v.width = jv.at("width").get<std::size_t>();
            if (is_contrast(enc.scheme)) v.contrast = contrast_matrix(enc.scheme, v.categories.size());
            enc.variables.push_back(std::move(v));
        }
        return enc;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError("", 0, std::string("encoder JSON: ") + e.what());
    }
}

}  // namespace pcaenc
