#pragma once

// Threshold x PC-count x classifier sweep for the proposed encoder plus every
// baseline scheme x classifier, with a per-encoder leaderboard and scatter exports.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <tuple>
#include <vector>

#include "pcaenc/baseline_encoders.hpp"
#include "pcaenc/classifiers.hpp"
#include "pcaenc/dataset.hpp"
#include "pcaenc/error.hpp"
#include "pcaenc/format.hpp"
#include "pcaenc/metrics.hpp"
#include "pcaenc/proposed_encoder.hpp"
#include "pcaenc/version.hpp"

namespace pcaenc {

inline constexpr std::string_view kProposedLabel = "proposed";

enum class SortMetric { test_accuracy, harmonic_accuracy, mse_accuracy, test_auc, harmonic_auc, mse_auc };

inline constexpr std::pair<SortMetric, std::string_view> kSortMetricNames[] = {
    {SortMetric::test_accuracy, "test_accuracy"}, {SortMetric::harmonic_accuracy, "harmonic_accuracy"},
    {SortMetric::mse_accuracy, "mse_accuracy"},   {SortMetric::test_auc, "test_auc"},
    {SortMetric::harmonic_auc, "harmonic_auc"},   {SortMetric::mse_auc, "mse_auc"},
};

inline std::string_view sort_metric_name(SortMetric m) {
    for (const auto& [k, n] : kSortMetricNames)
        if (k == m) return n;
    return "unknown";
}

inline std::optional<SortMetric> parse_sort_metric(std::string_view name) {
    for (const auto& [k, n] : kSortMetricNames)
        if (n == name) return k;
    return std::nullopt;
}

inline double metric_value(const EvalRecord& r, SortMetric m) {
    switch (m) {
        case SortMetric::test_accuracy: return r.test_accuracy;
        case SortMetric::harmonic_accuracy: return r.harmonic_accuracy;
        case SortMetric::mse_accuracy: return r.mse_accuracy;
        case SortMetric::test_auc: return r.test_auc;
        case SortMetric::harmonic_auc: return r.harmonic_auc;
        case SortMetric::mse_auc: return r.mse_auc;
    }
    return 0.0;
}

inline bool lower_is_better(SortMetric m) { return m == SortMetric::mse_accuracy || m == SortMetric::mse_auc; }

inline const std::vector<double>& default_thresholds() {
    static const std::vector<double> t{0.01, 0.02, 0.05, 0.1, 0.2, 0.5, 1,  1.87, 2,  3,
                                       3.64, 5,    5.45, 10,  11.9, 15,  20, 30,   40, 50};
    return t;
}

struct GridSpec {
    std::string train_path;
    std::string test_path;
    std::vector<double> thresholds = default_thresholds();  // percent
    std::vector<std::size_t> pc_counts{1, 2, 3, 4, 5, 6};
    std::vector<ClassifierConfig> classifiers;
    bool include_proposed = true;
    std::vector<Scheme> encoders;
    BaselineParams baseline_params;
    std::uint64_t seed = 0;
    std::optional<double> subsample;  // stratified fraction of each split
    SortMetric sort_metric = SortMetric::harmonic_accuracy;
    bool allow_any_threshold = false;  // lift the [0.01, 50] percent range to (0, 50]
    std::size_t threads = 0;  // 0: hardware concurrency

    /// Checks everything that does not depend on the data.
    void validate() const {
        if (classifiers.empty()) throw ConfigError("classifiers", "at least one classifier is required");
        if (!include_proposed && encoders.empty()) throw ConfigError("encoders", "no encoders selected");
        if (include_proposed) {
            if (thresholds.empty()) throw ConfigError("thresholds", "empty list");
            if (pc_counts.empty()) throw ConfigError("pc_counts", "empty list");
        }
        const double lo = allow_any_threshold ? 0.0 : 0.01;
        for (double t : thresholds) {
            const bool ok = allow_any_threshold ? (t > lo && t <= 50.0) : (t >= lo && t <= 50.0);
            if (!ok)
                throw ConfigError("thresholds", "value " + format_shortest(t) + " outside " +
                                                    (allow_any_threshold ? "(0, 50]" : "[0.01, 50]") + " percent");
        }
        for (auto k : pc_counts)
            if (k == 0) throw ConfigError("pc_counts", "counts must be >= 1");
        if (subsample && !(*subsample > 0.0 && *subsample <= 1.0))
            throw ConfigError("subsample", "fraction must be in (0, 1]");
        try {
            baseline_params.validate();
        } catch (const InvalidArgument& e) {
            throw ConfigError("baseline parameters", e.what());
        }
    }

    /// Checks pc_counts against 2N for a dataset with N categorical variables.
    void validate_for(const Dataset& train) const {
        const std::size_t limit = 2 * train.categorical_columns().size();
        if (!include_proposed) return;
        for (auto k : pc_counts)
            if (k > limit)
                throw ConfigError("pc_counts", "count " + std::to_string(k) + " exceeds 2N = " + std::to_string(limit));
    }
};

struct LeaderboardRow {
    EvalRecord record;
    std::vector<std::string> ties;  // other hyperparameter settings reaching the same value
};

struct GridResult {
    std::vector<EvalRecord> records;
    std::vector<LeaderboardRow> leaderboard;
    SortMetric sort_metric = SortMetric::harmonic_accuracy;

    std::size_t n_failed() const {
        return static_cast<std::size_t>(std::count_if(records.begin(), records.end(), [](const auto& r) { return !r.ok; }));
    }
};

namespace detail {

inline std::string hyperparam_label(const EvalRecord& r) {
    std::string s(r.classifier);
    if (r.has_hyperparams) s += " t=" + format_shortest(r.threshold_percent) + "% K=" + std::to_string(r.components);
    return s;
}

/// Strict weak order inside one encoder: better metric first, then classifier
/// label, threshold and K ascending.
inline bool better_within(const EvalRecord& a, const EvalRecord& b, SortMetric m) {
    const double va = metric_value(a, m), vb = metric_value(b, m);
    if (va != vb) return lower_is_better(m) ? va < vb : va > vb;
    return std::tie(a.classifier, a.threshold_percent, a.components) <
           std::tie(b.classifier, b.threshold_percent, b.components);
}

}  // namespace detail

/// Best successful record per encoder under `metric`, ordered best first; ties
/// between encoders fall back to the encoder label.
inline std::vector<LeaderboardRow> leaderboard(const std::vector<EvalRecord>& records, SortMetric metric) {
    if (records.empty()) throw InvalidArgument("leaderboard: no records");
    std::map<std::string, std::vector<const EvalRecord*>> by_encoder;
    for (const auto& r : records)
        if (r.ok) by_encoder[r.encoder].push_back(&r);
    if (by_encoder.empty()) throw InvalidArgument("leaderboard: every record failed");

    std::vector<LeaderboardRow> rows;
    for (auto& [name, group] : by_encoder) {
        std::sort(group.begin(), group.end(),
                  [&](const EvalRecord* a, const EvalRecord* b) { return detail::better_within(*a, *b, metric); });
        LeaderboardRow row{*group.front(), {}};
        const double best = metric_value(row.record, metric);
        for (std::size_t i = 1; i < group.size() && metric_value(*group[i], metric) == best; ++i)
            row.ties.push_back(detail::hyperparam_label(*group[i]));
        rows.push_back(std::move(row));
    }
    std::stable_sort(rows.begin(), rows.end(), [&](const LeaderboardRow& a, const LeaderboardRow& b) {
        const double va = metric_value(a.record, metric), vb = metric_value(b.record, metric);
        if (va != vb) return lower_is_better(metric) ? va < vb : va > vb;
        return a.record.encoder < b.record.encoder;
    });
    return rows;
}

namespace detail {

inline EvalRecord evaluate_cell(const Matrix& x_train, const Labels& y_train, const Matrix& x_test,
                                const Labels& y_test, const ClassifierConfig& cfg, std::string encoder) {
    const TrainedModel model = train(x_train, y_train, cfg);
    const auto s_train = model.scores(x_train);
    const auto s_test = model.scores(x_test);
    return make_record(std::move(encoder), std::string(classifier_name(cfg.kind)),
                       accuracy(model.threshold_scores(s_train), y_train),
                       accuracy(model.threshold_scores(s_test), y_test), auc(s_train, y_train), auc(s_test, y_test));
}

inline EvalRecord failed_record(std::string encoder, const ClassifierConfig& cfg, std::string what) {
    EvalRecord r;
    r.encoder = std::move(encoder);
    r.classifier = std::string(classifier_name(cfg.kind));
    r.ok = false;
    r.error = std::move(what);
    return r;
}

/// One encoder configuration and the contiguous slice of records it fills.
struct Job {
    std::optional<Scheme> scheme;  // empty: proposed encoder
    double threshold_percent = 0.0;
    std::size_t k = 0;
    std::size_t first_slot = 0;
};

}  // namespace detail

/// Runs the sweep on already loaded splits. Records appear in GridSpec order: the
/// proposed encoder over thresholds x pc_counts x classifiers, then each baseline
/// scheme over classifiers.
inline GridResult run_grid(const GridSpec& spec, const Dataset& train_in, const Dataset& test_in) {
    spec.validate();
    spec.validate_for(train_in);

    std::optional<Dataset> train_sub, test_sub;
    if (spec.subsample && *spec.subsample < 1.0) {
        train_sub = train_in.select_rows(stratified_sample(train_in, *spec.subsample, spec.seed));
        test_sub = test_in.select_rows(stratified_sample(test_in, *spec.subsample, mix_seed(spec.seed)));
    }
    const Dataset& train_ds = train_sub ? *train_sub : train_in;
    const Dataset& test_ds = test_sub ? *test_sub : test_in;
    const Labels y_train = labels_of(train_ds);
    const Labels y_test = labels_of(test_ds);

    std::vector<ClassifierConfig> classifiers = spec.classifiers;
    for (auto& c : classifiers) c.seed = spec.seed;
    const std::size_t nc = classifiers.size();

    std::vector<detail::Job> jobs;
    std::size_t slot = 0;
    if (spec.include_proposed)
        for (double t : spec.thresholds)
            for (auto k : spec.pc_counts) {
                jobs.push_back({std::nullopt, t, k, slot});
                slot += nc;
            }
    for (auto s : spec.encoders) {
        jobs.push_back({s, 0.0, 0, slot});
        slot += nc;
    }

    GridResult result;
    result.sort_metric = spec.sort_metric;
    result.records.resize(slot);

    auto run_job = [&](const detail::Job& job) {
        const std::string label = job.scheme ? std::string(scheme_name(*job.scheme)) : std::string(kProposedLabel);
        Matrix x_train, x_test;
        std::size_t dim = 0;
        std::string encode_error;
        try {
            if (job.scheme) {
                auto [enc, xt] = fit_transform_baseline(train_ds, *job.scheme, spec.baseline_params);
                x_train = std::move(xt);
                x_test = transform_baseline(enc, test_ds);
                dim = enc.output_dim;
            } else {
                const auto enc = fit_proposed(train_ds, job.threshold_percent / 100.0, job.k);
                x_train = enc.transform(train_ds);
                x_test = enc.transform(test_ds);
                dim = enc.components();
            }
        } catch (const std::exception& e) {
            encode_error = std::string("encoder: ") + e.what();
        }
        for (std::size_t c = 0; c < nc; ++c) {
            EvalRecord r;
            if (!encode_error.empty()) {
                r = detail::failed_record(label, classifiers[c], encode_error);
            } else {
                try {
                    r = detail::evaluate_cell(x_train, y_train, x_test, y_test, classifiers[c], label);
                } catch (const std::exception& e) {
                    r = detail::failed_record(label, classifiers[c], e.what());
                }
                r.output_dim = dim;
            }
            if (!job.scheme) {
                r.has_hyperparams = true;
                r.threshold_percent = job.threshold_percent;
                r.components = job.k;
            }
            result.records[job.first_slot + c] = std::move(r);
        }
    };

    std::size_t n_threads = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min(n_threads, jobs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t j = next++; j < jobs.size(); j = next++) run_job(jobs[j]);
    };
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    }

    if (result.n_failed() < result.records.size()) result.leaderboard = leaderboard(result.records, spec.sort_metric);
    return result;
}

inline GridResult run_grid(const GridSpec& spec) {
    spec.validate();
    const Dataset train_ds = parse_nslkdd(spec.train_path, SplitRole::train);
    const Dataset test_ds = parse_nslkdd(spec.test_path, SplitRole::test);
    return run_grid(spec, train_ds, test_ds);
}

// ---------------------------------------------------------------------------
// Output files
// ---------------------------------------------------------------------------

inline std::string provenance_line(std::uint64_t seed) {
    return std::string("# pcaenc ") + kVersion + " seed=" + std::to_string(seed) + "\n";
}

inline void write_records_csv(const std::vector<EvalRecord>& records, std::ostream& out) {
    out << kRecordCsvHeader << '\n';
    for (const auto& r : records) write_record_csv(r, out);
}

inline void write_leaderboard_csv(const std::vector<LeaderboardRow>& rows, SortMetric metric, std::ostream& out) {
    out << "rank,sort_metric,value," << kRecordCsvHeader << ",tied_hyperparams\n";
    std::size_t rank = 1;
    for (const auto& row : rows) {
        out << rank++ << ',' << sort_metric_name(metric) << ',' << format_real(metric_value(row.record, metric)) << ',';
        std::ostringstream rec;
        write_record_csv(row.record, rec);
        std::string line = rec.str();
        line.pop_back();
        out << line << ',';
        for (std::size_t i = 0; i < row.ties.size(); ++i) out << (i ? ";" : "") << row.ties[i];
        out << '\n';
    }
}

struct ScatterCsv {
    std::string accuracy;
    std::string auc;
    std::string grid;
};

/// Train-vs-test scatter data. The first data row of each metric file is the
/// ideal point, marked by encoder "ideal".
inline ScatterCsv scatter_export(const std::vector<EvalRecord>& records) {
    if (records.empty()) throw InvalidArgument("scatter_export: no records");
    std::ostringstream acc, au, grid;
    acc << "train_accuracy,test_accuracy,encoder,classifier\n" << format_real(100.0) << ',' << format_real(100.0)
        << ",ideal,\n";
    au << "train_auc,test_auc,encoder,classifier\n" << format_real(1.0) << ',' << format_real(1.0) << ",ideal,\n";
    grid << "threshold_percent,components,classifier,train_accuracy,test_accuracy,train_auc,test_auc\n";
    for (const auto& r : records) {
        if (!r.ok) continue;
        acc << format_real(r.train_accuracy) << ',' << format_real(r.test_accuracy) << ',' << r.encoder << ','
            << r.classifier << '\n';
        au << format_real(r.train_auc) << ',' << format_real(r.test_auc) << ',' << r.encoder << ',' << r.classifier
           << '\n';
        if (r.has_hyperparams)
            grid << format_real(r.threshold_percent) << ',' << r.components << ',' << r.classifier << ','
                 << format_real(r.train_accuracy) << ',' << format_real(r.test_accuracy) << ','
                 << format_real(r.train_auc) << ',' << format_real(r.test_auc) << '\n';
    }
    return {acc.str(), au.str(), grid.str()};
}

inline std::string summary_text(const GridSpec& spec, const GridResult& result) {
    std::ostringstream out;
    out << "cells: " << result.records.size() << "\n";
    out << "failed cells: " << result.n_failed() << "\n";
    out << "sort metric: " << sort_metric_name(result.sort_metric) << "\n";
    if (spec.subsample) out << "subsample: " << format_shortest(*spec.subsample) << "\n";
    out << "\nleaderboard\n";
    std::size_t rank = 1;
    for (const auto& row : result.leaderboard) {
        const auto& r = row.record;
        out << rank++ << ". " << r.encoder << " / " << detail::hyperparam_label(r) << "  "
            << sort_metric_name(result.sort_metric) << '=' << format_shortest(metric_value(r, result.sort_metric))
            << "  train_acc=" << format_shortest(r.train_accuracy) << " test_acc=" << format_shortest(r.test_accuracy)
            << " dim=" << r.output_dim << "\n";
    }
    for (const auto& r : result.records)
        if (!r.ok) out << "failed: " << r.encoder << " / " << detail::hyperparam_label(r) << ": " << r.error << "\n";
    return out.str();
}

/// Writes records.csv, leaderboard.csv, the three scatter files and summary.txt.
inline void write_grid_outputs(const GridSpec& spec, const GridResult& result, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto open = [&](const char* name) {
        std::ofstream f(dir / name, std::ios::binary);
        if (!f) throw Error("cannot write " + (dir / name).string());
        f << provenance_line(spec.seed);
        return f;
    };
    {
        auto f = open("records.csv");
        write_records_csv(result.records, f);
    }
    {
        auto f = open("leaderboard.csv");
        write_leaderboard_csv(result.leaderboard, result.sort_metric, f);
    }
    const auto scatter = scatter_export(result.records);
    open("scatter_accuracy.csv") << scatter.accuracy;
    open("scatter_auc.csv") << scatter.auc;
    open("grid_scatter.csv") << scatter.grid;
    open("summary.txt") << summary_text(spec, result);
}

}  // namespace pcaenc
