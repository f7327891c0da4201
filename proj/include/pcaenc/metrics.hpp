#pragma once

// Accuracy, ROC AUC and the train/test trade-off metrics.
//
// Conventions: accuracies are percentages in [0, 100], AUCs are fractions in [0, 1].

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pcaenc/error.hpp"
#include "pcaenc/format.hpp"

namespace pcaenc {

inline double accuracy(std::span<const std::uint8_t> pred, std::span<const std::uint8_t> truth) {
    if (pred.size() != truth.size()) throw InvalidArgument("accuracy: length mismatch");
    if (truth.empty()) throw InvalidArgument("accuracy: empty input");
    std::size_t correct = 0;
    for (std::size_t i = 0; i < pred.size(); ++i) correct += (pred[i] != 0) == (truth[i] != 0);
    return 100.0 * static_cast<double>(correct) / static_cast<double>(truth.size());
}

/// Mann-Whitney AUC: P(score of a random positive > score of a random negative),
/// tied pairs counting one half. Computed from mid-ranks in O(n log n).
inline double auc(std::span<const double> scores, std::span<const std::uint8_t> truth) {
    if (scores.size() != truth.size()) throw InvalidArgument("auc: length mismatch");
    std::size_t n_pos = 0;
    for (auto t : truth) n_pos += t != 0;
    const std::size_t n_neg = truth.size() - n_pos;
    if (n_pos == 0 || n_neg == 0) throw InvalidArgument("auc: both classes must be present");
    for (double s : scores)
        if (std::isnan(s)) throw InvalidArgument("auc: NaN score");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Twice the rank sum of the positives keeps mid-ranks integral.
    std::uint64_t twice_rank_sum = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        std::size_t pos_in_group = 0;
        while (j < order.size() && scores[order[j]] == scores[order[i]]) {
            pos_in_group += truth[order[j]] != 0;
            ++j;
        }
        // ranks i+1..j, mid-rank (i + 1 + j) / 2
        twice_rank_sum += static_cast<std::uint64_t>(pos_in_group) * (i + 1 + j);
        i = j;
    }
    const std::uint64_t twice_u = twice_rank_sum - static_cast<std::uint64_t>(n_pos) * (n_pos + 1);
    return static_cast<double>(twice_u) / (2.0 * static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

inline void check_percent(double v, const char* what) {
    if (!(v >= 0.0 && v <= 100.0)) throw InvalidArgument(std::string(what) + " must be a percentage in [0, 100]");
}

inline void check_fraction(double v, const char* what) {
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument(std::string(what) + " must be a fraction in [0, 1]");
}

/// 0.5 [(100 - a)^2 + (100 - b)^2] for train/test accuracies a, b in percent.
inline double mse_to_ideal_accuracy(double a, double b) {
    check_percent(a, "train accuracy");
    check_percent(b, "test accuracy");
    return 0.5 * ((100.0 - a) * (100.0 - a) + (100.0 - b) * (100.0 - b));
}

/// 0.5 [(1 - c)^2 + (1 - d)^2] for train/test AUCs c, d.
inline double mse_to_ideal_auc(double c, double d) {
    check_fraction(c, "train AUC");
    check_fraction(d, "test AUC");
    return 0.5 * ((1.0 - c) * (1.0 - c) + (1.0 - d) * (1.0 - d));
}

inline double harmonic_avg(double e, double f) {
    if (!(e > 0.0 && f > 0.0)) throw InvalidArgument("harmonic_avg: inputs must be positive");
    return 2.0 * e * f / (e + f);
}

/// One evaluated (encoder, classifier) cell.
struct EvalRecord {
    std::string encoder;
    std::string classifier;
    bool has_hyperparams = false;
    double threshold_percent = 0.0;
    std::size_t components = 0;  // K requested
    std::size_t output_dim = 0;
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
    double train_auc = 0.0;
    double test_auc = 0.0;
    double mse_accuracy = 0.0;
    double mse_auc = 0.0;
    double harmonic_accuracy = 0.0;
    double harmonic_auc = 0.0;
    bool ok = true;
    std::string error;

    friend bool operator==(const EvalRecord&, const EvalRecord&) = default;
};

/// Fills the derived metrics from the four measured ones.
inline EvalRecord make_record(std::string encoder, std::string classifier, double train_acc, double test_acc,
                              double train_auc, double test_auc) {
    EvalRecord r;
    r.encoder = std::move(encoder);
    r.classifier = std::move(classifier);
    r.train_accuracy = train_acc;
    r.test_accuracy = test_acc;
    r.train_auc = train_auc;
    r.test_auc = test_auc;
    r.mse_accuracy = mse_to_ideal_accuracy(train_acc, test_acc);
    r.mse_auc = mse_to_ideal_auc(train_auc, test_auc);
    // A zero metric makes the harmonic mean degenerate; its limit is 0.
    r.harmonic_accuracy = train_acc > 0.0 && test_acc > 0.0 ? harmonic_avg(train_acc, test_acc) : 0.0;
    r.harmonic_auc = train_auc > 0.0 && test_auc > 0.0 ? harmonic_avg(train_auc, test_auc) : 0.0;
    return r;
}

inline constexpr const char* kRecordCsvHeader =
    "encoder,classifier,threshold_percent,components,output_dim,train_accuracy,test_accuracy,train_auc,test_auc,"
    "mse_accuracy,mse_auc,harmonic_accuracy,harmonic_auc,status,error";

inline void write_record_csv(const EvalRecord& r, std::ostream& out) {
    out << r.encoder << ',' << r.classifier << ',';
    if (r.has_hyperparams) out << format_real(r.threshold_percent) << ',' << r.components;
    else out << ',';
    out << ',' << r.output_dim;
    for (double v : {r.train_accuracy, r.test_accuracy, r.train_auc, r.test_auc, r.mse_accuracy, r.mse_auc,
                     r.harmonic_accuracy, r.harmonic_auc})
        out << ',' << (r.ok ? format_real(v) : std::string());
    std::string err = r.error;
    std::replace(err.begin(), err.end(), ',', ';');
    std::replace(err.begin(), err.end(), '\n', ' ');
    out << ',' << (r.ok ? "ok" : "failed") << ',' << err << '\n';
}

/// Parses one data line written by write_record_csv.
inline EvalRecord parse_record_csv(std::string_view line) {
    std::vector<std::string> f;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        f.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    if (f.size() != 15) throw ParseError("", 0, "record row has " + std::to_string(f.size()) + " fields, expected 15");
    EvalRecord r;
    r.encoder = f[0];
    r.classifier = f[1];
    auto real = [&](std::size_t i) {
        double v = 0.0;
        if (!parse_real(f[i], v)) throw ParseError("", 0, "record field " + std::to_string(i + 1) + " is not a number");
        return v;
    };
    r.has_hyperparams = !f[2].empty();
    if (r.has_hyperparams) {
        r.threshold_percent = real(2);
        r.components = static_cast<std::size_t>(real(3));
    }
    r.output_dim = static_cast<std::size_t>(real(4));
    r.ok = f[13] == "ok";
    r.error = f[14];
    if (r.ok) {
        r.train_accuracy = real(5);
        r.test_accuracy = real(6);
        r.train_auc = real(7);
        r.test_auc = real(8);
        r.mse_accuracy = real(9);
        r.mse_auc = real(10);
        r.harmonic_accuracy = real(11);
        r.harmonic_auc = real(12);
    }
    return r;
}

}  // namespace pcaenc
