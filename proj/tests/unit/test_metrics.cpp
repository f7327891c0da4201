#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "pcaenc/metrics.hpp"

using namespace pcaenc;

namespace {

double pairwise_auc(const std::vector<double>& s, const std::vector<std::uint8_t>& y) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = 0; j < s.size(); ++j)
            if (y[i] && !y[j]) {
                den += 1.0;
                num += s[i] > s[j] ? 1.0 : s[i] == s[j] ? 0.5 : 0.0;
            }
    return num / den;
}

}  // namespace

TEST(Metrics, Accuracy) {
    const std::vector<std::uint8_t> p{1, 0, 1, 1}, t{1, 1, 1, 0};
    EXPECT_DOUBLE_EQ(accuracy(p, t), 50.0);
    EXPECT_THROW(accuracy(p, std::vector<std::uint8_t>{1}), InvalidArgument);
    EXPECT_THROW(accuracy(std::vector<std::uint8_t>{}, std::vector<std::uint8_t>{}), InvalidArgument);
}

TEST(Metrics, AucSmallCases) {
    EXPECT_DOUBLE_EQ(auc(std::vector<double>{0.1, 0.9}, std::vector<std::uint8_t>{0, 1}), 1.0);
    EXPECT_DOUBLE_EQ(auc(std::vector<double>{0.9, 0.1}, std::vector<std::uint8_t>{0, 1}), 0.0);
    EXPECT_DOUBLE_EQ(auc(std::vector<double>{0.5, 0.5}, std::vector<std::uint8_t>{0, 1}), 0.5);
    EXPECT_THROW(auc(std::vector<double>{0.5, 0.5}, std::vector<std::uint8_t>{1, 1}), InvalidArgument);
    EXPECT_THROW(auc(std::vector<double>{std::nan(""), 0.5}, std::vector<std::uint8_t>{0, 1}), InvalidArgument);
}

TEST(Metrics, AucMatchesPairwiseOracleWithTies) {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + rng() % 60;
        std::vector<double> s(n);
        std::vector<std::uint8_t> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = static_cast<double>(rng() % 7) / 7.0;
            y[i] = rng() % 2;
        }
        y[0] = 0;
        y[1] = 1;
        EXPECT_NEAR(auc(s, y), pairwise_auc(s, y), 1e-12);
        std::vector<double> mono(s);
        for (double& v : mono) v = std::exp(3.0 * v) - 2.0;
        EXPECT_EQ(auc(mono, y), auc(s, y));
    }
}

TEST(Metrics, TradeoffArithmetic) {
    EXPECT_DOUBLE_EQ(mse_to_ideal_accuracy(100, 100), 0.0);
    EXPECT_DOUBLE_EQ(mse_to_ideal_accuracy(90, 80), 250.0);
    EXPECT_DOUBLE_EQ(mse_to_ideal_auc(1, 1), 0.0);
    EXPECT_NEAR(mse_to_ideal_auc(0.9, 0.8), 0.025, 1e-15);
    EXPECT_DOUBLE_EQ(harmonic_avg(7.5, 7.5), 7.5);
    EXPECT_NEAR(harmonic_avg(92.18, 89.11), 90.6161, 0.005);
    EXPECT_THROW(mse_to_ideal_accuracy(101, 50), InvalidArgument);
    EXPECT_THROW(mse_to_ideal_auc(0.5, 1.2), InvalidArgument);
    EXPECT_THROW(harmonic_avg(0.0, 1.0), InvalidArgument);
}

TEST(Metrics, MakeRecordDerivesMetrics) {
    const auto r = make_record("proposed", "linear_svm", 92.18, 89.11, 0.95, 0.9);
    EXPECT_NEAR(r.harmonic_accuracy, 90.6161, 0.005);
    EXPECT_DOUBLE_EQ(r.mse_accuracy, mse_to_ideal_accuracy(92.18, 89.11));
    const auto zero = make_record("a", "b", 0.0, 50.0, 0.5, 0.5);
    EXPECT_EQ(zero.harmonic_accuracy, 0.0);
}

TEST(Metrics, RecordCsvRoundTrip) {
    auto r = make_record("proposed", "linear_svm", 92.18, 89.11, 0.95, 0.9);
    r.has_hyperparams = true;
    r.threshold_percent = 1.87;
    r.components = 3;
    r.output_dim = 3;
    std::ostringstream out;
    write_record_csv(r, out);
    std::string line = out.str();
    line.pop_back();
    EXPECT_EQ(parse_record_csv(line), r);

    EvalRecord failed;
    failed.encoder = "woe";
    failed.classifier = "gaussian_nb";
    failed.ok = false;
    failed.error = "boom, bang";
    std::ostringstream out2;
    write_record_csv(failed, out2);
    line = out2.str();
    line.pop_back();
    const auto back = parse_record_csv(line);
    EXPECT_FALSE(back.ok);
    EXPECT_EQ(back.error, "boom; bang");
    EXPECT_THROW(parse_record_csv("a,b,c"), ParseError);
}
