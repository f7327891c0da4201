#pragma once

// Tabular dataset with interned categorical columns, NSL-KDD ingestion and
// class-balance reporting.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pcaenc/error.hpp"
#include "pcaenc/format.hpp"
#include "pcaenc/random.hpp"

namespace pcaenc {

enum class ColumnKind { categorical, numeric, label, difficulty };

struct ColumnSchema {
    std::string name;
    ColumnKind kind = ColumnKind::numeric;
    std::size_t position = 0;

    friend bool operator==(const ColumnSchema&, const ColumnSchema&) = default;
};

enum class SplitRole { train, test };

/// Binary target. `normal` is class C1, `attack` is class C2 (the positive class for scores).
enum class TargetClass : std::uint8_t { normal = 0, attack = 1 };

using CategoryId = std::uint32_t;

/// Per-column string interning; ids are assigned in first-appearance order starting at 0.
class InternTable {
public:
    CategoryId intern(std::string_view s) {
        auto it = ids_.find(std::string(s));
        if (it != ids_.end()) return it->second;
        const auto id = static_cast<CategoryId>(strings_.size());
        strings_.emplace_back(s);
        ids_.emplace(strings_.back(), id);
        return id;
    }

    std::optional<CategoryId> find(std::string_view s) const {
        auto it = ids_.find(std::string(s));
        if (it == ids_.end()) return std::nullopt;
        return it->second;
    }

    const std::string& resolve(CategoryId id) const {
        if (id >= strings_.size()) throw InvalidArgument("category id " + std::to_string(id) + " not in intern table");
        return strings_[id];
    }

    std::size_t size() const noexcept { return strings_.size(); }

private:
    std::vector<std::string> strings_;
    std::unordered_map<std::string, CategoryId> ids_;
};

inline void validate_schema(const std::vector<ColumnSchema>& schema) {
    std::size_t labels = 0;
    for (std::size_t i = 0; i < schema.size(); ++i) {
        if (schema[i].position != i) throw InvalidArgument("schema positions must be unique and contiguous from 0");
        if (schema[i].kind == ColumnKind::label) ++labels;
    }
    if (labels != 1) throw InvalidArgument("schema must contain exactly one label column");
}

/// Immutable table. Cells are stored row-major; categorical and label cells hold intern ids.
class Dataset {
public:
    const std::vector<ColumnSchema>& schema() const noexcept { return schema_; }
    SplitRole role() const noexcept { return role_; }
    std::size_t n_rows() const noexcept { return target_.size(); }
    std::size_t n_cols() const noexcept { return schema_.size(); }

    std::size_t column_index(std::string_view name) const {
        for (const auto& c : schema_)
            if (c.name == name) return c.position;
        throw InvalidArgument("unknown column '" + std::string(name) + "'");
    }

    /// Positions of the categorical feature columns, in schema order.
    std::vector<std::size_t> categorical_columns() const {
        std::vector<std::size_t> out;
        for (const auto& c : schema_)
            if (c.kind == ColumnKind::categorical) out.push_back(c.position);
        return out;
    }

    std::size_t label_column() const {
        for (const auto& c : schema_)
            if (c.kind == ColumnKind::label) return c.position;
        return 0;  // unreachable for a validated schema
    }

    CategoryId category(std::size_t row, std::size_t col) const {
        return static_cast<CategoryId>(cells_[row * schema_.size() + col]);
    }
    double numeric(std::size_t row, std::size_t col) const { return cells_[row * schema_.size() + col]; }
    const std::string& category_string(std::size_t row, std::size_t col) const {
        return interns_[col].resolve(category(row, col));
    }
    const InternTable& interns(std::size_t col) const { return interns_[col]; }

    TargetClass target(std::size_t row) const { return target_[row]; }
    const std::vector<TargetClass>& targets() const noexcept { return target_; }

    /// New dataset holding the given rows in the given order; intern tables are shared by value.
    Dataset select_rows(std::span<const std::size_t> rows) const {
        Dataset out;
        out.schema_ = schema_;
        out.role_ = role_;
        out.interns_ = interns_;
        out.cells_.reserve(rows.size() * schema_.size());
        out.target_.reserve(rows.size());
        for (auto r : rows) {
            if (r >= n_rows()) throw InvalidArgument("select_rows: row index out of range");
            auto first = cells_.begin() + static_cast<std::ptrdiff_t>(r * schema_.size());
            out.cells_.insert(out.cells_.end(), first, first + static_cast<std::ptrdiff_t>(schema_.size()));
            out.target_.push_back(target_[r]);
        }
        return out;
    }

private:
    friend class DatasetBuilder;

    std::vector<ColumnSchema> schema_;
    SplitRole role_ = SplitRole::train;
    std::vector<double> cells_;
    std::vector<TargetClass> target_;
    std::vector<InternTable> interns_;
};

/// Label binarization: trimmed, case-sensitive equality with "normal".
inline TargetClass binarize_label(std::string_view label) {
    return trim(label) == "normal" ? TargetClass::normal : TargetClass::attack;
}

class DatasetBuilder {
public:
    DatasetBuilder(std::vector<ColumnSchema> schema, SplitRole role) {
        validate_schema(schema);
        ds_.schema_ = std::move(schema);
        ds_.role_ = role;
        ds_.interns_.resize(ds_.schema_.size());
    }

    /// Appends one row of raw field text. Throws InvalidArgument on width or number errors.
    void add_row(std::span<const std::string_view> fields) {
        const auto width = ds_.schema_.size();
        if (fields.size() != width)
            throw InvalidArgument("expected " + std::to_string(width) + " fields, got " + std::to_string(fields.size()));
        // numbers first so a bad row leaves the builder untouched
        row_.assign(width, 0.0);
        for (std::size_t c = 0; c < width; ++c) {
            const auto& col = ds_.schema_[c];
            if (col.kind != ColumnKind::numeric && col.kind != ColumnKind::difficulty) continue;
            const auto text = trim(fields[c]);
            if (!parse_real(text, row_[c]))
                throw InvalidArgument("column '" + col.name + "': not a number: '" + std::string(text) + "'");
        }
        for (std::size_t c = 0; c < width; ++c) {
            const auto kind = ds_.schema_[c].kind;
            if (kind != ColumnKind::categorical && kind != ColumnKind::label) continue;
            const auto text = trim(fields[c]);
            row_[c] = static_cast<double>(ds_.interns_[c].intern(text));
            if (kind == ColumnKind::label) ds_.target_.push_back(binarize_label(text));
        }
        ds_.cells_.insert(ds_.cells_.end(), row_.begin(), row_.end());
    }

    void add_row(std::initializer_list<std::string_view> fields) {
        add_row(std::span<const std::string_view>(fields.begin(), fields.size()));
    }

    std::size_t n_rows() const noexcept { return ds_.target_.size(); }

    Dataset build() && { return std::move(ds_); }

private:
    Dataset ds_;
    std::vector<double> row_;
};

/// The 43-column NSL-KDD layout: 41 features, the attack label, and the difficulty level.
inline std::vector<ColumnSchema> nslkdd_schema() {
    static constexpr std::string_view names[] = {
        "duration", "protocol_type", "service", "flag", "src_bytes", "dst_bytes", "land",
        "wrong_fragment", "urgent", "hot", "num_failed_logins", "logged_in", "num_compromised",
        "root_shell", "su_attempted", "num_root", "num_file_creations", "num_shells",
        "num_access_files", "num_outbound_cmds", "is_host_login", "is_guest_login", "count",
        "srv_count", "serror_rate", "srv_serror_rate", "rerror_rate", "srv_rerror_rate",
        "same_srv_rate", "diff_srv_rate", "srv_diff_host_rate", "dst_host_count",
        "dst_host_srv_count", "dst_host_same_srv_rate", "dst_host_diff_srv_rate",
        "dst_host_same_src_port_rate", "dst_host_srv_diff_host_rate", "dst_host_serror_rate",
        "dst_host_srv_serror_rate", "dst_host_rerror_rate", "dst_host_srv_rerror_rate", "label",
        "difficulty"};
    std::vector<ColumnSchema> schema;
    for (std::size_t i = 0; i < std::size(names); ++i) {
        ColumnKind kind = ColumnKind::numeric;
        if (i >= 1 && i <= 3) kind = ColumnKind::categorical;
        if (i == 41) kind = ColumnKind::label;
        if (i == 42) kind = ColumnKind::difficulty;
        schema.push_back({std::string(names[i]), kind, i});
    }
    return schema;
}

inline constexpr std::size_t kNslKddFields = 43;

inline std::vector<std::string_view> split_fields(std::string_view line, char sep = ',') {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

/// Parses NSL-KDD text (no header, 43 comma-separated fields per line). Blank lines are skipped.
inline Dataset parse_nslkdd(std::istream& in, SplitRole role, const std::string& source = "<stream>") {
    DatasetBuilder builder(nslkdd_schema(), role);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(trim(line));
        if (fields.size() != kNslKddFields)
            throw ParseError(source, line_no,
                             "expected " + std::to_string(kNslKddFields) + " fields, got " + std::to_string(fields.size()));
        try {
            builder.add_row(fields);
        } catch (const InvalidArgument& e) {
            throw ParseError(source, line_no, e.what());
        }
    }
    if (builder.n_rows() == 0) throw ParseError(source, 0, "empty file");
    return std::move(builder).build();
}

inline Dataset parse_nslkdd(const std::string& path, SplitRole role) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, 0, "cannot open file");
    return parse_nslkdd(in, role, path);
}

/// Writes rows back in the input text format (numeric cells in shortest round-trip form).
inline void write_csv_rows(const Dataset& ds, std::ostream& out) {
    for (std::size_t r = 0; r < ds.n_rows(); ++r) {
        for (std::size_t c = 0; c < ds.n_cols(); ++c) {
            if (c) out << ',';
            const auto kind = ds.schema()[c].kind;
            if (kind == ColumnKind::categorical || kind == ColumnKind::label)
                out << ds.category_string(r, c);
            else
                out << format_shortest(ds.numeric(r, c));
        }
        out << '\n';
    }
}

struct BalanceReport {
    std::size_t n_rows = 0;
    std::size_t n_normal = 0;
    std::size_t n_attack = 0;
    double frac_normal = 0.0;  // class C1
    double frac_attack = 0.0;  // class C2
    std::map<std::string, std::size_t> cardinality;
};

/// Distinct category ids of column `col` that occur in the rows of `ds`.
inline std::set<CategoryId> categories_present(const Dataset& ds, std::size_t col) {
    std::vector<char> seen(ds.interns(col).size(), 0);
    for (std::size_t r = 0; r < ds.n_rows(); ++r) seen[ds.category(r, col)] = 1;
    std::set<CategoryId> out;
    for (std::size_t id = 0; id < seen.size(); ++id)
        if (seen[id]) out.insert(static_cast<CategoryId>(id));
    return out;
}

inline BalanceReport balance_report(const Dataset& ds) {
    if (ds.n_rows() == 0) throw InvalidArgument("balance_report: empty dataset");
    BalanceReport rep;
    rep.n_rows = ds.n_rows();
    rep.n_attack = static_cast<std::size_t>(std::count(ds.targets().begin(), ds.targets().end(), TargetClass::attack));
    rep.n_normal = rep.n_rows - rep.n_attack;
    rep.frac_attack = static_cast<double>(rep.n_attack) / static_cast<double>(rep.n_rows);
    rep.frac_normal = static_cast<double>(rep.n_normal) / static_cast<double>(rep.n_rows);
    for (auto col : ds.categorical_columns())
        rep.cardinality[ds.schema()[col].name] = categories_present(ds, col).size();
    return rep;
}

/// Category ids (of `test`) for `variable` that occur in `test` but never in `train`.
inline std::set<CategoryId> unseen_categories(const Dataset& train, const Dataset& test, std::string_view variable) {
    const auto train_col = train.column_index(variable);
    const auto test_col = test.column_index(variable);
    if (train.schema()[train_col].kind != ColumnKind::categorical ||
        test.schema()[test_col].kind != ColumnKind::categorical)
        throw InvalidArgument("variable '" + std::string(variable) + "' is not categorical");

    std::set<std::string_view> train_values;
    for (auto id : categories_present(train, train_col)) train_values.insert(train.interns(train_col).resolve(id));

    std::set<CategoryId> out;
    for (auto id : categories_present(test, test_col))
        if (!train_values.contains(test.interns(test_col).resolve(id))) out.insert(id);
    return out;
}

/// Row indices keeping `fraction` of each class (rounded), sampled with `seed`, returned in file order.
inline std::vector<std::size_t> stratified_sample(const Dataset& ds, double fraction, std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction <= 1.0)) throw InvalidArgument("subsample fraction must be in (0, 1]");
    std::vector<std::size_t> picked;
    Rng rng(seed);
    for (auto cls : {TargetClass::normal, TargetClass::attack}) {
        std::vector<std::size_t> idx;
        for (std::size_t r = 0; r < ds.n_rows(); ++r)
            if (ds.target(r) == cls) idx.push_back(r);
        const auto keep = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(idx.size())));
        // partial Fisher-Yates
        for (std::size_t i = 0; i < keep && i < idx.size(); ++i)
            std::swap(idx[i], idx[i + uniform_index(rng, idx.size() - i)]);
        idx.resize(std::min(keep, idx.size()));
        picked.insert(picked.end(), idx.begin(), idx.end());
    }
    std::sort(picked.begin(), picked.end());
    return picked;
}

}  // namespace pcaenc
