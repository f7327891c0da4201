#include <gtest/gtest.h>

#include <thread>

#include "pcaenc/proposed_encoder.hpp"
#include "test_helpers.hpp"

using namespace pcaenc;
using pcaenc::test::json_matrix;
using pcaenc::test::load_json;
using pcaenc::test::mini_test;
using pcaenc::test::mini_train;
using pcaenc::test::toy_dataset;

namespace {

IndicatorState parse_state(const std::string& s) {
    if (s == "c1") return IndicatorState::c1;
    if (s == "c2") return IndicatorState::c2;
    return IndicatorState::none;
}

void expect_matrix_near(const Matrix& a, const Matrix& b, double tol) {
    ASSERT_EQ(a.rows(), b.rows());
    ASSERT_EQ(a.cols(), b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r)
        for (std::size_t c = 0; c < a.cols(); ++c) EXPECT_NEAR(a(r, c), b(r, c), tol) << "at " << r << "," << c;
}

}  // namespace

TEST(IndicatorState, ThreeStateRule) {
    EXPECT_EQ(indicator_state(0.8, 0.2, 0.1), IndicatorState::c1);
    EXPECT_EQ(indicator_state(0.2, 0.8, 0.1), IndicatorState::c2);
    EXPECT_EQ(indicator_state(0.95, 0.05, 0.1), IndicatorState::none);
    EXPECT_EQ(indicator_state(0.05, 0.95, 0.1), IndicatorState::none);
    EXPECT_EQ(indicator_state(0.5, 0.5, 0.1), IndicatorState::none);
    // boundary: the minority probability must exceed the threshold strictly
    EXPECT_EQ(indicator_state(0.9, 0.1, 0.1), IndicatorState::none);
    EXPECT_EQ(indicator_state(1.0, 0.0, 0.0), IndicatorState::none);
    EXPECT_EQ(indicator_state(0.99, 0.01, 0.0), IndicatorState::c1);
    EXPECT_EQ(indicator_pair(IndicatorState::c1), (std::pair<int, int>{1, 0}));
    EXPECT_EQ(indicator_pair(IndicatorState::c2), (std::pair<int, int>{0, 1}));
    EXPECT_EQ(indicator_pair(IndicatorState::none), (std::pair<int, int>{0, 0}));
}

TEST(IndicatorState, ThresholdRange) {
    EXPECT_NO_THROW(check_threshold(0.0));
    EXPECT_NO_THROW(check_threshold(0.5));
    EXPECT_THROW(check_threshold(0.51), InvalidArgument);
    EXPECT_THROW(check_threshold(-0.01), InvalidArgument);
    EXPECT_THROW(fit_proposed(mini_train(), 0.7, 2), InvalidArgument);
    EXPECT_THROW(fit_proposed(mini_train(), 0.05, 0), InvalidArgument);
}

TEST(ProposedEncoder, MatchesOracleGoldens) {
    const auto golden = load_json("proposed_golden.json");
    for (const auto& c : golden["cases"]) {
        SCOPED_TRACE("threshold " + std::to_string(c["threshold"].get<double>()));
        const auto enc = fit_proposed(mini_train(), c["threshold"].get<double>(), c["k"].get<std::size_t>());
        EXPECT_EQ(enc.components(), c["retained"].get<std::size_t>());
        EXPECT_EQ(enc.pca.usable(), c["usable"].get<std::size_t>());
        EXPECT_EQ(enc.clamped(), c["retained"].get<std::size_t>() != c["k"].get<std::size_t>());
        for (const auto& vs : enc.map.variables)
            for (const auto& [cat, state] : vs.categories)
                EXPECT_EQ(state, parse_state(c["states"][vs.variable][cat].get<std::string>())) << cat;
        const auto ev = c["explained_variance"].get<std::vector<double>>();
        ASSERT_EQ(ev.size(), enc.pca.explained_variance.size());
        for (std::size_t i = 0; i < ev.size(); ++i) EXPECT_NEAR(enc.pca.explained_variance[i], ev[i], 1e-12);
        expect_matrix_near(enc.transform(mini_train()), json_matrix(c["train"]), 1e-9);
        expect_matrix_near(enc.transform(mini_test()), json_matrix(c["test"]), 1e-9);
    }
}

TEST(ProposedEncoder, TrainScoresAreStandardized) {
    const auto enc = fit_proposed(mini_train(), 0.0187, 5);
    const auto x = enc.transform(mini_train());
    for (std::size_t c = 0; c < x.cols(); ++c) {
        double m = 0.0, v = 0.0;
        for (std::size_t r = 0; r < x.rows(); ++r) m += x(r, c);
        m /= static_cast<double>(x.rows());
        for (std::size_t r = 0; r < x.rows(); ++r) v += (x(r, c) - m) * (x(r, c) - m);
        EXPECT_NEAR(m, 0.0, 1e-12);
        EXPECT_NEAR(v / static_cast<double>(x.rows()), 1.0, 1e-12);
    }
}

TEST(ProposedEncoder, UnseenCategoryMapsLikeNoneState) {
    const auto enc = fit_proposed(mini_train(), 0.0187, 3);
    const auto a = toy_dataset({{"tcp", "brand_new_service", "SF", "normal"}}, SplitRole::test);
    const auto b = toy_dataset({{"tcp", "http", "SF", "normal"}}, SplitRole::test);
    ASSERT_EQ(enc.map.variables[1].state_of("http"), IndicatorState::none);
    EXPECT_EQ(enc.transform(a), enc.transform(b));
}

TEST(ProposedEncoder, OutputWidthIsClampedK) {
    for (std::size_t k = 1; k <= 6; ++k) {
        const auto enc = fit_proposed(mini_train(), 0.2, k);
        EXPECT_EQ(enc.transform(mini_test()).cols(), std::min<std::size_t>(k, 3));
        EXPECT_EQ(output_names(enc).size(), enc.components());
    }
    EXPECT_EQ(output_names(fit_proposed(mini_train(), 0.2, 2)), (std::vector<std::string>{"pc1", "pc2"}));
}

TEST(ProposedEncoder, AllNoneIndicatorsIsAnError) {
    // every minority probability is <= 0.5, so threshold 0.5 silences every category
    EXPECT_THROW(fit_proposed(mini_train(), 0.5, 2), InvalidArgument);
}

TEST(ProposedEncoder, SchemaMismatchOnTransform) {
    const auto enc = fit_proposed(mini_train(), 0.0187, 3);
    auto schema = nslkdd_schema();
    schema[2].name = "svc";
    DatasetBuilder b(schema, SplitRole::test);
    std::vector<std::string> f(kNslKddFields, "0");
    f[1] = "tcp";
    f[2] = "http";
    f[3] = "SF";
    f[41] = "normal";
    std::vector<std::string_view> v(f.begin(), f.end());
    b.add_row(v);
    EXPECT_THROW(enc.transform(std::move(b).build()), SchemaMismatch);
}

TEST(ProposedEncoder, DeterministicAndThreadSafeTransform) {
    const auto a = fit_proposed(mini_train(), 0.1, 4);
    const auto b = fit_proposed(mini_train(), 0.1, 4);
    EXPECT_EQ(a.pca.components, b.pca.components);
    const auto expected = a.transform(mini_test());
    std::vector<Matrix> outs(4);
    {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < outs.size(); ++t) pool.emplace_back([&, t] { outs[t] = a.transform(mini_test()); });
    }
    for (const auto& m : outs) EXPECT_EQ(m, expected);
}

TEST(ProposedEncoder, JsonRoundTrip) {
    const auto enc = fit_proposed(mini_train(), 0.0187, 3);
    const auto j = to_json(enc);
    EXPECT_EQ(j["format"], "pcaenc-encoder");
    EXPECT_EQ(j["version"], kEncoderFormatVersion);
    const auto back = proposed_from_json(Json::parse(j.dump()));
    EXPECT_EQ(back.transform(mini_test()), enc.transform(mini_test()));
    EXPECT_EQ(to_json(back).dump(), j.dump());
}

TEST(ProposedEncoder, JsonRejectsBadDocuments) {
    auto j = to_json(fit_proposed(mini_train(), 0.0187, 3));
    auto wrong_version = j;
    wrong_version["version"] = 99;
    EXPECT_THROW(proposed_from_json(wrong_version), Error);
    auto wrong_scheme = j;
    wrong_scheme["scheme"] = "one_hot";
    EXPECT_THROW(proposed_from_json(wrong_scheme), Error);
    EXPECT_THROW(proposed_from_json(Json::parse("{}")), Error);
}
