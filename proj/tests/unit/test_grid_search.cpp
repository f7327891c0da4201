#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "pcaenc/grid_search.hpp"
#include "test_helpers.hpp"

using namespace pcaenc;
using pcaenc::test::mini_test;
using pcaenc::test::mini_train;

namespace {

GridSpec small_spec() {
    GridSpec spec;
    spec.thresholds = {1.87, 10, 20};
    spec.pc_counts = {1, 3, 6};
    spec.classifiers = {default_config(ClassifierKind::linear_svm), default_config(ClassifierKind::gaussian_nb)};
    spec.encoders = {Scheme::one_hot, Scheme::polynomial_contrast, Scheme::woe};
    spec.seed = 3;
    spec.threads = 3;
    return spec;
}

EvalRecord rec(std::string enc, std::string cls, double train, double test) {
    return make_record(std::move(enc), std::move(cls), train, test, 0.5, 0.5);
}

}  // namespace

TEST(Grid, SingleCellCount) {
    GridSpec spec;
    spec.thresholds = {1.87};
    spec.pc_counts = {3};
    spec.classifiers = {default_config(ClassifierKind::linear_svm)};
    spec.encoders = {};
    const auto result = run_grid(spec, mini_train(), mini_test());
    ASSERT_EQ(result.records.size(), 1u);
    EXPECT_EQ(result.records[0].encoder, "proposed");
    EXPECT_TRUE(result.records[0].ok) << result.records[0].error;
    EXPECT_EQ(result.leaderboard.size(), 1u);
}

TEST(Grid, RecordsFollowSpecOrder) {
    const auto spec = small_spec();
    const auto result = run_grid(spec, mini_train(), mini_test());
    ASSERT_EQ(result.records.size(), 3u * 3u * 2u + 3u * 2u);
    std::size_t i = 0;
    for (double t : spec.thresholds)
        for (auto k : spec.pc_counts)
            for (const auto& c : spec.classifiers) {
                const auto& r = result.records[i++];
                EXPECT_EQ(r.encoder, "proposed");
                EXPECT_EQ(r.threshold_percent, t);
                EXPECT_EQ(r.components, k);
                EXPECT_EQ(r.classifier, classifier_name(c.kind));
            }
    for (auto s : spec.encoders)
        for (const auto& c : spec.classifiers) {
            const auto& r = result.records[i++];
            EXPECT_EQ(r.encoder, scheme_name(s));
            EXPECT_FALSE(r.has_hyperparams);
            EXPECT_EQ(r.classifier, classifier_name(c.kind));
        }
}

TEST(Grid, ProposedDimensionIsClampedK) {
    const auto result = run_grid(small_spec(), mini_train(), mini_test());
    for (const auto& r : result.records) {
        if (r.encoder != "proposed" || !r.ok) continue;
        const auto usable = fit_proposed(mini_train(), r.threshold_percent / 100.0, 6).components();
        EXPECT_EQ(r.output_dim, std::min(r.components, usable));
    }
}

TEST(Grid, DeterministicAcrossThreadCounts) {
    auto spec = small_spec();
    const auto a = run_grid(spec, mini_train(), mini_test());
    spec.threads = 1;
    const auto b = run_grid(spec, mini_train(), mini_test());
    EXPECT_EQ(a.records, b.records);
}

TEST(Grid, CellIndependence) {
    const auto full = run_grid(small_spec(), mini_train(), mini_test());
    auto spec = small_spec();
    spec.thresholds = {10};
    spec.pc_counts = {3};
    spec.classifiers = {default_config(ClassifierKind::gaussian_nb)};
    spec.encoders = {Scheme::woe};
    const auto part = run_grid(spec, mini_train(), mini_test());
    ASSERT_EQ(part.records.size(), 2u);
    for (const auto& r : part.records) {
        const auto it = std::find_if(full.records.begin(), full.records.end(), [&](const EvalRecord& f) {
            return f.encoder == r.encoder && f.classifier == r.classifier && f.threshold_percent == r.threshold_percent &&
                   f.components == r.components;
        });
        ASSERT_NE(it, full.records.end());
        EXPECT_EQ(*it, r);
    }
}

TEST(Grid, FailedCellsAreRecordedNotFatal) {
    GridSpec spec;
    spec.thresholds = {50, 1.87};  // 50% silences every indicator
    spec.pc_counts = {2};
    spec.classifiers = {default_config(ClassifierKind::gaussian_nb)};
    spec.encoders = {};
    const auto result = run_grid(spec, mini_train(), mini_test());
    ASSERT_EQ(result.records.size(), 2u);
    EXPECT_FALSE(result.records[0].ok);
    EXPECT_NE(result.records[0].error.find("encoder"), std::string::npos);
    EXPECT_TRUE(result.records[1].ok);
    EXPECT_EQ(result.n_failed(), 1u);
    ASSERT_EQ(result.leaderboard.size(), 1u);
    EXPECT_EQ(result.leaderboard[0].record.threshold_percent, 1.87);
}

TEST(Grid, SpecValidation) {
    auto spec = small_spec();
    spec.thresholds = {0.001};
    EXPECT_THROW(spec.validate(), ConfigError);
    spec.allow_any_threshold = true;
    EXPECT_NO_THROW(spec.validate());
    spec.thresholds = {51};
    EXPECT_THROW(spec.validate(), ConfigError);
    spec = small_spec();
    spec.pc_counts = {7};
    try {
        run_grid(spec, mini_train(), mini_test());
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.key(), "pc_counts");
    }
    spec = small_spec();
    spec.classifiers.clear();
    EXPECT_THROW(spec.validate(), ConfigError);
    spec = small_spec();
    spec.subsample = 1.5;
    EXPECT_THROW(spec.validate(), ConfigError);
}

TEST(Grid, SubsampleShrinksBothSplits) {
    auto spec = small_spec();
    spec.subsample = 0.5;
    spec.thresholds = {1.87};
    spec.pc_counts = {2};
    const auto a = run_grid(spec, mini_train(), mini_test());
    const auto b = run_grid(spec, mini_train(), mini_test());
    EXPECT_EQ(a.records, b.records);
    EXPECT_NE(a.records, run_grid(small_spec(), mini_train(), mini_test()).records);
}

TEST(Leaderboard, PicksBestPerEncoder) {
    const std::vector<EvalRecord> one{rec("a", "x", 90, 80)};
    const auto lb1 = leaderboard(one, SortMetric::harmonic_accuracy);
    ASSERT_EQ(lb1.size(), 1u);
    EXPECT_EQ(lb1[0].record, one[0]);

    auto low = rec("a", "x", 87.1, 87.1);
    auto high = rec("a", "y", 90.6, 90.6);
    const auto lb = leaderboard({low, high, rec("b", "x", 88, 88)}, SortMetric::harmonic_accuracy);
    ASSERT_EQ(lb.size(), 2u);
    EXPECT_EQ(lb[0].record.classifier, "y");
    EXPECT_EQ(lb[1].record.encoder, "b");
    EXPECT_THROW(leaderboard({}, SortMetric::test_accuracy), InvalidArgument);
}

TEST(Leaderboard, MseSortsAscending) {
    const auto lb = leaderboard({rec("wide", "x", 96.3, 79.5), rec("narrow", "x", 95, 89)}, SortMetric::mse_accuracy);
    EXPECT_EQ(lb[0].record.encoder, "narrow");
    EXPECT_DOUBLE_EQ(lb[0].record.mse_accuracy, 73.0);
    EXPECT_NEAR(lb[1].record.mse_accuracy, 216.97, 1e-9);
    const auto by_test = leaderboard({rec("wide", "x", 96.3, 79.5), rec("narrow", "x", 95, 89)}, SortMetric::test_accuracy);
    EXPECT_EQ(by_test[0].record.encoder, "narrow");
    const auto by_harm =
        leaderboard({rec("wide", "x", 99.9, 80.0), rec("narrow", "x", 85, 85.5)}, SortMetric::harmonic_accuracy);
    const auto by_test2 =
        leaderboard({rec("wide", "x", 99.9, 80.0), rec("narrow", "x", 85, 85.5)}, SortMetric::test_accuracy);
    EXPECT_EQ(by_harm[0].record.encoder, "wide");
    EXPECT_EQ(by_test2[0].record.encoder, "narrow");
}

TEST(Leaderboard, StableUnderPermutationAndListsTies) {
    std::vector<EvalRecord> records;
    for (double t : {3.64, 5.45, 1.0}) {
        auto r = rec("proposed", "linear_svm", 90, t == 1.0 ? 85 : 89.64);
        r.has_hyperparams = true;
        r.threshold_percent = t;
        r.components = 2;
        records.push_back(r);
    }
    records.push_back(rec("one_hot", "random_forest", 92, 80));
    records.push_back(rec("one_hot", "gaussian_nb", 92, 80));
    const auto base = leaderboard(records, SortMetric::test_accuracy);
    std::mt19937_64 rng(1);
    for (int i = 0; i < 20; ++i) {
        std::shuffle(records.begin(), records.end(), rng);
        const auto lb = leaderboard(records, SortMetric::test_accuracy);
        ASSERT_EQ(lb.size(), base.size());
        for (std::size_t k = 0; k < lb.size(); ++k) {
            EXPECT_EQ(lb[k].record, base[k].record);
            EXPECT_EQ(lb[k].ties, base[k].ties);
        }
    }
    EXPECT_EQ(base[0].record.threshold_percent, 3.64);
    EXPECT_EQ(base[0].ties, (std::vector<std::string>{"linear_svm t=5.45% K=2"}));
    EXPECT_EQ(base[1].record.classifier, "gaussian_nb");
}

TEST(Scatter, OneRowPerRecordPlusIdealMarker) {
    auto r = rec("proposed", "linear_svm", 90, 80);
    r.has_hyperparams = true;
    r.threshold_percent = 1.87;
    r.components = 3;
    const auto s = scatter_export({r});
    EXPECT_EQ(std::count(s.accuracy.begin(), s.accuracy.end(), '\n'), 3);
    EXPECT_NE(s.accuracy.find("100,100,ideal,"), std::string::npos);
    EXPECT_NE(s.auc.find("1,1,ideal,"), std::string::npos);
    EXPECT_EQ(std::count(s.grid.begin(), s.grid.end(), '\n'), 2);
    EXPECT_NE(s.grid.find("1.8700000000000001,3,linear_svm,90,80"), std::string::npos);
    EXPECT_THROW(scatter_export({}), InvalidArgument);
}

TEST(Scatter, FullRunCountsCells) {
    const auto result = run_grid(small_spec(), mini_train(), mini_test());
    const auto s = scatter_export(result.records);
    const auto ok = result.records.size() - result.n_failed();
    EXPECT_EQ(static_cast<std::size_t>(std::count(s.accuracy.begin(), s.accuracy.end(), '\n')), ok + 2);
}

TEST(Outputs, LeaderboardCsvHasRankAndTies) {
    const auto result = run_grid(small_spec(), mini_train(), mini_test());
    std::ostringstream out;
    write_leaderboard_csv(result.leaderboard, result.sort_metric, out);
    const auto text = out.str();
    EXPECT_EQ(text.rfind("rank,sort_metric,value,encoder,", 0), 0u);
    EXPECT_EQ(static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n')), result.leaderboard.size() + 1);
    EXPECT_NE(text.find("\n1,harmonic_accuracy,"), std::string::npos);
    EXPECT_EQ(provenance_line(7), std::string("# pcaenc ") + kVersion + " seed=7\n");
}
