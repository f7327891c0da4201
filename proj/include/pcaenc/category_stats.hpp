#pragma once

// Per-category class counts and conditional class probabilities of a training split.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pcaenc/dataset.hpp"
#include "pcaenc/error.hpp"
#include "pcaenc/format.hpp"

namespace pcaenc {

struct CategoryRecord {
    CategoryId id = 0;      // id in the fitting dataset's intern table
    std::string category;   // resolved string, used to match other datasets
    std::uint64_t count_total = 0;
    std::uint64_t count_c1 = 0;  // normal
    std::uint64_t count_c2 = 0;  // attack
    double p1 = 0.0;  // P(target = C1 | category)
    double p2 = 0.0;  // P(target = C2 | category)
};

struct ProbabilityPair {
    double p1 = 0.0;
    double p2 = 0.0;
};

class CategoryStats {
public:
    CategoryStats() = default;
    CategoryStats(std::string variable, std::vector<CategoryRecord> records)
        : variable_(std::move(variable)), records_(std::move(records)) {
        for (std::size_t i = 0; i < records_.size(); ++i) {
            by_id_.emplace(records_[i].id, i);
            by_name_.emplace(records_[i].category, i);
        }
    }

    const std::string& variable() const noexcept { return variable_; }
    /// Records in first-appearance order of the fitting dataset.
    const std::vector<CategoryRecord>& records() const noexcept { return records_; }

    std::uint64_t total_count() const {
        std::uint64_t n = 0;
        for (const auto& r : records_) n += r.count_total;
        return n;
    }

    /// Probability pair for an id of the fitting dataset; empty for categories not seen at fit time.
    std::optional<ProbabilityPair> lookup(CategoryId id) const {
        auto it = by_id_.find(id);
        if (it == by_id_.end()) return std::nullopt;
        return ProbabilityPair{records_[it->second].p1, records_[it->second].p2};
    }

    std::optional<ProbabilityPair> lookup(std::string_view category) const {
        auto it = by_name_.find(std::string(category));
        if (it == by_name_.end()) return std::nullopt;
        return ProbabilityPair{records_[it->second].p1, records_[it->second].p2};
    }

    const CategoryRecord* find(std::string_view category) const {
        auto it = by_name_.find(std::string(category));
        return it == by_name_.end() ? nullptr : &records_[it->second];
    }

private:
    std::string variable_;
    std::vector<CategoryRecord> records_;
    std::unordered_map<CategoryId, std::size_t> by_id_;
    std::unordered_map<std::string, std::size_t> by_name_;
};

inline CategoryStats fit_stats(const Dataset& ds, std::string_view variable) {
    const auto col = ds.column_index(variable);
    if (ds.schema()[col].kind != ColumnKind::categorical)
        throw InvalidArgument("fit_stats: variable '" + std::string(variable) + "' is not categorical");
    if (ds.n_rows() == 0) throw InvalidArgument("fit_stats: empty dataset");

    const auto& table = ds.interns(col);
    std::vector<std::uint64_t> c1(table.size(), 0), c2(table.size(), 0);
    std::vector<CategoryId> order;
    for (std::size_t r = 0; r < ds.n_rows(); ++r) {
        const auto id = ds.category(r, col);
        if (c1[id] + c2[id] == 0) order.push_back(id);
        (ds.target(r) == TargetClass::normal ? c1 : c2)[id] += 1;
    }

    std::vector<CategoryRecord> records;
    records.reserve(order.size());
    for (auto id : order) {
        CategoryRecord rec;
        rec.id = id;
        rec.category = table.resolve(id);
        rec.count_c1 = c1[id];
        rec.count_c2 = c2[id];
        rec.count_total = c1[id] + c2[id];
        const auto n = static_cast<double>(rec.count_total);
        rec.p1 = static_cast<double>(rec.count_c1) / n;
        rec.p2 = static_cast<double>(rec.count_c2) / n;
        records.push_back(std::move(rec));
    }
    return CategoryStats(std::string(variable), std::move(records));
}

/// Stats for every categorical column of `ds`, in schema order.
inline std::vector<CategoryStats> fit_all_stats(const Dataset& ds) {
    std::vector<CategoryStats> out;
    for (auto col : ds.categorical_columns()) out.push_back(fit_stats(ds, ds.schema()[col].name));
    return out;
}

/// Debug dump: `variable,category,count_c1,count_c2,p1,p2`.
inline void dump_stats_csv(const std::vector<CategoryStats>& stats, std::ostream& out) {
    out << "variable,category,count_c1,count_c2,p1,p2\n";
    for (const auto& s : stats)
        for (const auto& r : s.records())
            out << s.variable() << ',' << r.category << ',' << r.count_c1 << ',' << r.count_c2 << ','
                << format_real(r.p1) << ',' << format_real(r.p2) << '\n';
}

}  // namespace pcaenc
