// pcaenc: inspect NSL-KDD splits, encode categorical columns, benchmark one
// encoder/classifier cell, run a grid sweep, and re-rank saved records.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pcaenc/baseline_encoders.hpp"
#include "pcaenc/category_stats.hpp"
#include "pcaenc/classifiers.hpp"
#include "pcaenc/config.hpp"
#include "pcaenc/dataset.hpp"
#include "pcaenc/grid_search.hpp"
#include "pcaenc/metrics.hpp"
#include "pcaenc/proposed_encoder.hpp"
#include "pcaenc/version.hpp"

namespace fs = std::filesystem;
using namespace pcaenc;

namespace {

struct EncoderOptions {
    std::string scheme = "proposed";
    double threshold_percent = 1.87;
    std::size_t components = 3;
    BaselineParams params;
    std::optional<std::uint64_t> catboost_seed;
};

void add_encoder_options(CLI::App* cmd, EncoderOptions& o) {
    cmd->add_option("--scheme", o.scheme, "proposed or a baseline scheme (one_hot, ordinal, count, binary, base_n, "
                                          "hashing, target, m_estimate, james_stein, leave_one_out, catboost, woe, "
                                          "sum, helmert, backward_difference, polynomial)")
        ->capture_default_str();
    cmd->add_option("--threshold", o.threshold_percent,
                    "proposed: threshold in percent, 0 to 50 (used internally as a fraction, e.g. 1.87 -> 0.0187)")
        ->capture_default_str()
        ->check(CLI::Range(0.0, 50.0));
    cmd->add_option("--components,-k", o.components, "proposed: number of principal components")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--base", o.params.base, "base_n: digit base")->capture_default_str()->check(CLI::Range(2u, 36u));
    cmd->add_option("--buckets", o.params.n_buckets, "hashing: bucket count")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--m", o.params.m, "m_estimate: prior weight m")->capture_default_str()->check(CLI::NonNegativeNumber);
    cmd->add_option("--woe-regularization", o.params.woe_regularization, "woe: additive count regularization")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--catboost-seed", o.catboost_seed, "catboost: shuffle the training order with this seed");
}

/// Validates the scheme name before any file is read.
std::optional<Scheme> resolve_scheme(const EncoderOptions& o) {
    if (o.scheme == kProposedLabel) return std::nullopt;
    auto s = parse_scheme(o.scheme);
    if (!s) throw CLI::ValidationError("--scheme", "unknown scheme '" + o.scheme + "'");
    return s;
}

std::string join_names(const std::vector<std::string>& names) {
    std::string s;
    for (std::size_t i = 0; i < names.size(); ++i) s += (i ? "," : "") + names[i];
    return s;
}

void write_matrix_csv(const Matrix& m, const std::vector<std::string>& names, std::uint64_t seed, std::ostream& out) {
    out << provenance_line(seed) << join_names(names) << '\n';
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) out << (c ? "," : "") << format_real(m(r, c));
        out << '\n';
    }
}

// ---------------------------------------------------------------------------

int cmd_inspect(const std::string& train_path, const std::string& test_path, const std::string& stats_out) {
    const auto train = parse_nslkdd(train_path, SplitRole::train);
    const auto test = parse_nslkdd(test_path, SplitRole::test);
    auto& out = std::cout;
    for (const auto* ds : {&train, &test}) {
        const auto rep = balance_report(*ds);
        out << (ds == &train ? "train" : "test") << ": " << rep.n_rows << " rows\n";
        out << "  normal " << rep.n_normal << " (" << format_shortest(100.0 * rep.frac_normal) << "%)\n";
        out << "  attack " << rep.n_attack << " (" << format_shortest(100.0 * rep.frac_attack) << "%)\n";
        for (const auto& [name, card] : rep.cardinality) out << "  " << name << ": " << card << " categories\n";
    }
    out << "categories in test but not in train:\n";
    for (auto col : train.categorical_columns()) {
        const auto& name = train.schema()[col].name;
        const auto unseen = unseen_categories(train, test, name);
        out << "  " << name << ": " << unseen.size();
        if (!unseen.empty()) {
            std::vector<std::string> names;
            for (auto id : unseen) names.push_back(test.interns(test.column_index(name)).resolve(id));
            std::sort(names.begin(), names.end());
            out << " (";
            for (std::size_t i = 0; i < names.size(); ++i) out << (i ? " " : "") << names[i];
            out << ")";
        }
        out << "\n";
    }
    if (!stats_out.empty()) {
        std::ofstream f(stats_out, std::ios::binary);
        if (!f) throw Error("cannot write " + stats_out);
        dump_stats_csv(fit_all_stats(train), f);
    }
    return 0;
}

int cmd_encode(const std::string& train_path, const std::string& input_path, const EncoderOptions& o,
               bool training_mode, const std::string& out_path) {
    const auto scheme = resolve_scheme(o);
    BaselineParams params = o.params;
    params.catboost_seed = o.catboost_seed;
    if (scheme) params.validate();

    const auto train = parse_nslkdd(train_path, SplitRole::train);
    Matrix x;
    std::vector<std::string> names;
    std::string json;
    if (!scheme) {
        const auto enc = fit_proposed(train, o.threshold_percent / 100.0, o.components);
        if (enc.clamped())
            std::cerr << "note: " << o.components << " components requested, " << enc.components() << " usable\n";
        x = training_mode ? enc.transform(train) : enc.transform(parse_nslkdd(input_path, SplitRole::test));
        names = output_names(enc);
        json = to_json(enc).dump(2);
    } else {
        FittedBaseline enc;
        if (training_mode) {
            auto fitted = fit_transform_baseline(train, *scheme, params);
            enc = std::move(fitted.first);
            x = std::move(fitted.second);
        } else {
            enc = fit_baseline(train, *scheme, params);
            x = transform_baseline(enc, parse_nslkdd(input_path, SplitRole::test));
        }
        names = enc.output_names();
        json = to_json(enc).dump(2);
    }
    {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw Error("cannot write " + out_path);
        write_matrix_csv(x, names, params.catboost_seed.value_or(0), f);
    }
    std::ofstream j(out_path + ".encoder.json", std::ios::binary);
    if (!j) throw Error("cannot write " + out_path + ".encoder.json");
    j << json << '\n';
    std::cerr << "wrote " << x.rows() << " x " << x.cols() << " to " << out_path << "\n";
    return 0;
}

int cmd_bench(const std::string& train_path, const std::string& test_path, const EncoderOptions& o,
              const std::string& classifier, std::uint64_t seed) {
    const auto scheme = resolve_scheme(o);
    const auto kind = parse_classifier(classifier);
    if (!kind) throw CLI::ValidationError("--classifier", "unknown classifier '" + classifier + "'");
    GridSpec spec;
    spec.train_path = train_path;
    spec.test_path = test_path;
    spec.seed = seed;
    spec.threads = 1;
    spec.allow_any_threshold = true;
    spec.classifiers = {default_config(*kind)};
    spec.baseline_params = o.params;
    spec.baseline_params.catboost_seed = o.catboost_seed;
    if (scheme) {
        spec.include_proposed = false;
        spec.encoders = {*scheme};
    } else {
        spec.thresholds = {o.threshold_percent};
        spec.pc_counts = {o.components};
    }
    if (!scheme && o.threshold_percent <= 0.0) throw CLI::ValidationError("--threshold", "must be > 0 for bench");
    spec.validate();
    const auto result = run_grid(spec);
    std::cout << provenance_line(seed);
    write_records_csv(result.records, std::cout);
    const auto& r = result.records.front();
    if (!r.ok) std::cerr << "cell failed: " << r.error << "\n";
    return 0;
}

int cmd_grid(const std::string& config_path, const std::string& out_dir, const std::string& sort,
             std::optional<std::size_t> threads) {
    GridSpec spec = load_grid_config(config_path);
    if (!sort.empty()) {
        const auto m = parse_sort_metric(sort);
        if (!m) throw CLI::ValidationError("--sort", "unknown metric '" + sort + "'");
        spec.sort_metric = *m;
    }
    if (threads) spec.threads = *threads;
    const auto result = run_grid(spec);
    write_grid_outputs(spec, result, out_dir);
    {
        std::ofstream f(fs::path(out_dir) / "resolved_config.txt", std::ios::binary);
        f << provenance_line(spec.seed) << resolved_config(spec);
    }
    std::cout << summary_text(spec, result);
    return 0;
}

int cmd_report(const std::string& records_path, const std::string& sort, const std::string& out_path) {
    const auto metric = parse_sort_metric(sort);
    if (!metric) throw CLI::ValidationError("--sort", "unknown metric '" + sort + "'");
    std::ifstream in(records_path);
    if (!in) throw ParseError(records_path, 0, "cannot open file");
    std::vector<EvalRecord> records;
    std::string line;
    std::size_t line_no = 0;
    std::uint64_t seed = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (const auto p = line.find("seed="); p != std::string::npos) seed = std::stoull(line.substr(p + 5));
            continue;
        }
        if (line.rfind("encoder,", 0) == 0) continue;
        try {
            records.push_back(parse_record_csv(line));
        } catch (const ParseError& e) {
            throw ParseError(records_path, line_no, e.what());
        }
    }
    const auto lb = leaderboard(records, *metric);
    std::ostringstream csv;
    csv << provenance_line(seed);
    write_leaderboard_csv(lb, *metric, csv);
    if (out_path.empty()) {
        std::cout << csv.str();
    } else {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw Error("cannot write " + out_path);
        f << csv.str();
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Supervised categorical encoders, reference classifiers and grid benchmarks for NSL-KDD data"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    std::string train_path, test_path, input_path, out_path, stats_out, config_path, out_dir, classifier = "linear_svm",
                                                                                         sort, records_path;
    bool training_mode = false;
    std::uint64_t seed = 0;
    std::optional<std::size_t> threads;
    EncoderOptions enc_opts;

    auto* inspect = app.add_subcommand("inspect", "row counts, class balance, cardinalities and unseen categories");
    inspect->add_option("--train", train_path, "training split")->required()->check(CLI::ExistingFile);
    inspect->add_option("--test", test_path, "test split")->required()->check(CLI::ExistingFile);
    inspect->add_option("--stats", stats_out, "also write per-category conditional probabilities to this CSV");

    auto* encode = app.add_subcommand("encode", "fit an encoder on the training split and encode a file");
    encode->add_option("--train", train_path, "training split used for fitting")->required()->check(CLI::ExistingFile);
    encode->add_option("--input", input_path, "file to encode (defaults to the training split)")
        ->check(CLI::ExistingFile);
    encode->add_option("--out,-o", out_path, "output CSV; the fitted encoder goes to <out>.encoder.json")->required();
    encode->add_flag("--training-mode", training_mode,
                     "encode the training split itself with training-mode statistics (leave_one_out, catboost)");
    add_encoder_options(encode, enc_opts);

    auto* bench = app.add_subcommand("bench", "evaluate one encoder with one classifier on train and test");
    bench->add_option("--train", train_path, "training split")->required()->check(CLI::ExistingFile);
    bench->add_option("--test", test_path, "test split")->required()->check(CLI::ExistingFile);
    bench->add_option("--classifier", classifier,
                      "logistic_regression, linear_svm, decision_tree, adaboost_stumps, adaboost_depth5, "
                      "random_forest or gaussian_nb")
        ->capture_default_str();
    bench->add_option("--seed", seed, "seed for stochastic learners")->capture_default_str();
    add_encoder_options(bench, enc_opts);

    auto* grid = app.add_subcommand("grid", "run the threshold x components x classifier sweep from a config file");
    grid->add_option("config", config_path, "grid configuration file")->required()->check(CLI::ExistingFile);
    grid->add_option("--out,-o", out_dir, "output directory")->required();
    grid->add_option("--sort", sort,
                     "leaderboard metric: test_accuracy, harmonic_accuracy, mse_accuracy, test_auc, harmonic_auc, "
                     "mse_auc (default from config, else harmonic_accuracy)");
    grid->add_option("--threads", threads, "worker threads (0: all cores)");

    auto* report = app.add_subcommand("report", "rebuild a leaderboard from a records.csv file");
    report->add_option("records", records_path, "records.csv written by the grid verb")
        ->required()
        ->check(CLI::ExistingFile);
    report->add_option("--sort", sort, "leaderboard metric")->default_str("harmonic_accuracy");
    report->add_option("--out,-o", out_path, "write the leaderboard here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (inspect->parsed()) return cmd_inspect(train_path, test_path, stats_out);
        if (encode->parsed())
            return cmd_encode(train_path, input_path.empty() ? train_path : input_path, enc_opts,
                              training_mode || input_path.empty(), out_path);
        if (bench->parsed()) return cmd_bench(train_path, test_path, enc_opts, classifier, seed);
        if (grid->parsed()) return cmd_grid(config_path, out_dir, sort, threads);
        if (report->parsed()) return cmd_report(records_path, sort.empty() ? "harmonic_accuracy" : sort, out_path);
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
