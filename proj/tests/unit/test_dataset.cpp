#include <gtest/gtest.h>

#include <sstream>

#include "pcaenc/dataset.hpp"
#include "test_helpers.hpp"

using namespace pcaenc;
using pcaenc::test::mini_test;
using pcaenc::test::mini_train;
using pcaenc::test::toy_dataset;

namespace {

std::string nsl_line(std::string_view proto, std::string_view service, std::string_view flag, std::string_view label) {
    std::string s = "0," + std::string(proto) + "," + std::string(service) + "," + std::string(flag);
    for (int i = 4; i < 41; ++i) s += ",0";
    return s + "," + std::string(label) + ",21";
}

}  // namespace

TEST(Dataset, SchemaHasThreeCategoricalColumns) {
    const auto schema = nslkdd_schema();
    ASSERT_EQ(schema.size(), kNslKddFields);
    EXPECT_EQ(schema[1].name, "protocol_type");
    EXPECT_EQ(schema[2].name, "service");
    EXPECT_EQ(schema[3].name, "flag");
    EXPECT_EQ(schema[41].kind, ColumnKind::label);
    EXPECT_EQ(schema[42].kind, ColumnKind::difficulty);
    std::size_t n_cat = 0;
    for (const auto& c : schema) n_cat += c.kind == ColumnKind::categorical;
    EXPECT_EQ(n_cat, 3u);
}

TEST(Dataset, ParsesMiniFixture) {
    EXPECT_EQ(mini_train().n_rows(), 150u);
    EXPECT_EQ(mini_test().n_rows(), 60u);
    EXPECT_EQ(mini_train().categorical_columns(), (std::vector<std::size_t>{1, 2, 3}));
    EXPECT_EQ(mini_train().category_string(0, 2), "finger");
    EXPECT_EQ(mini_train().target(0), TargetClass::normal);
    EXPECT_EQ(mini_train().target(1), TargetClass::attack);
    EXPECT_DOUBLE_EQ(mini_train().numeric(0, 4), 15440.0);
}

TEST(Dataset, LabelBinarization) {
    EXPECT_EQ(binarize_label("normal"), TargetClass::normal);
    EXPECT_EQ(binarize_label(" normal "), TargetClass::normal);
    EXPECT_EQ(binarize_label("neptune"), TargetClass::attack);
    EXPECT_EQ(binarize_label("Normal"), TargetClass::attack);
}

TEST(Dataset, BlankLinesAndCrlfAreTolerated) {
    std::istringstream in(nsl_line("tcp", "http", "SF", "normal") + "\r\n\n   \n" + nsl_line("udp", "private", "SF", "teardrop") + "\n");
    const auto ds = parse_nslkdd(in, SplitRole::train);
    ASSERT_EQ(ds.n_rows(), 2u);
    EXPECT_EQ(ds.category_string(0, 3), "SF");
    EXPECT_EQ(ds.target(1), TargetClass::attack);
}

TEST(Dataset, WrongFieldCountReportsLine) {
    std::istringstream in(nsl_line("tcp", "http", "SF", "normal") + "\n0,tcp,http\n");
    try {
        parse_nslkdd(in, SplitRole::train, "x.txt");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
        EXPECT_EQ(e.file(), "x.txt");
        EXPECT_NE(std::string(e.what()).find("x.txt:2"), std::string::npos);
    }
}

TEST(Dataset, NonNumericFieldReportsLine) {
    std::string bad = nsl_line("tcp", "http", "SF", "normal");
    bad.replace(bad.find(",0,"), 3, ",abc,");
    std::istringstream in(nsl_line("tcp", "http", "SF", "normal") + "\n" + nsl_line("tcp", "http", "SF", "normal") +
                          "\n" + bad + "\n");
    try {
        parse_nslkdd(in, SplitRole::train);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(Dataset, EmptyInputIsAnError) {
    std::istringstream in("\n\n");
    EXPECT_THROW(parse_nslkdd(in, SplitRole::train), ParseError);
    EXPECT_THROW(parse_nslkdd("/nonexistent/file.txt", SplitRole::train), ParseError);
}

TEST(Dataset, BuilderRejectsBadRowWithoutSideEffects) {
    DatasetBuilder b(nslkdd_schema(), SplitRole::train);
    std::vector<std::string> f(kNslKddFields, "0");
    f[1] = "tcp";
    f[2] = "http";
    f[3] = "SF";
    f[41] = "normal";
    std::vector<std::string_view> v(f.begin(), f.end());
    b.add_row(v);
    v[5] = "oops";
    v[2] = "never_interned";
    EXPECT_THROW(b.add_row(v), InvalidArgument);
    EXPECT_EQ(b.n_rows(), 1u);
    const auto ds = std::move(b).build();
    EXPECT_FALSE(ds.interns(2).find("never_interned").has_value());
    std::vector<std::string_view> short_row(v.begin(), v.begin() + 10);
    DatasetBuilder b2(nslkdd_schema(), SplitRole::train);
    EXPECT_THROW(b2.add_row(short_row), InvalidArgument);
}

TEST(Dataset, SchemaValidation) {
    auto schema = nslkdd_schema();
    schema[42].kind = ColumnKind::label;
    EXPECT_THROW(validate_schema(schema), InvalidArgument);
    schema = nslkdd_schema();
    schema[5].position = 9;
    EXPECT_THROW(validate_schema(schema), InvalidArgument);
}

TEST(Dataset, ColumnIndexUnknownName) {
    EXPECT_EQ(mini_train().column_index("flag"), 3u);
    EXPECT_THROW(mini_train().column_index("nope"), InvalidArgument);
}

TEST(Dataset, BalanceReport) {
    const auto rep = balance_report(mini_train());
    EXPECT_EQ(rep.n_rows, 150u);
    EXPECT_EQ(rep.n_normal, 89u);
    EXPECT_EQ(rep.n_attack, 61u);
    EXPECT_DOUBLE_EQ(rep.frac_normal + rep.frac_attack, 1.0);
    EXPECT_EQ(rep.cardinality.at("protocol_type"), 3u);
    EXPECT_EQ(rep.cardinality.at("service"), 15u);
    EXPECT_EQ(rep.cardinality.at("flag"), 7u);
}

TEST(Dataset, UnseenCategories) {
    const auto unseen = unseen_categories(mini_train(), mini_test(), "service");
    std::set<std::string> names;
    const auto col = mini_test().column_index("service");
    for (auto id : unseen) names.insert(mini_test().interns(col).resolve(id));
    EXPECT_EQ(names, (std::set<std::string>{"snmp", "tftp_u"}));
    EXPECT_TRUE(unseen_categories(mini_train(), mini_test(), "protocol_type").empty());
    EXPECT_THROW(unseen_categories(mini_train(), mini_test(), "duration"), InvalidArgument);
}

TEST(Dataset, SelectRowsKeepsOrderAndValidatesIndices) {
    const std::vector<std::size_t> rows{5, 1, 5};
    const auto sub = mini_train().select_rows(rows);
    ASSERT_EQ(sub.n_rows(), 3u);
    EXPECT_EQ(sub.category_string(0, 2), mini_train().category_string(5, 2));
    EXPECT_EQ(sub.category_string(1, 2), mini_train().category_string(1, 2));
    const std::vector<std::size_t> bad{1000};
    EXPECT_THROW(mini_train().select_rows(bad), InvalidArgument);
}

TEST(Dataset, StratifiedSampleIsSeededAndBalanced) {
    const auto a = stratified_sample(mini_train(), 0.2, 3);
    const auto b = stratified_sample(mini_train(), 0.2, 3);
    const auto c = stratified_sample(mini_train(), 0.2, 4);
    EXPECT_EQ(a, b);
    EXPECT_NE(a, c);
    EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
    std::size_t attacks = 0;
    for (auto r : a) attacks += mini_train().target(r) == TargetClass::attack;
    EXPECT_EQ(attacks, 12u);  // round(0.2 * 61)
    EXPECT_EQ(a.size() - attacks, 18u);  // round(0.2 * 89)
    EXPECT_THROW(stratified_sample(mini_train(), 0.0, 1), InvalidArgument);
    EXPECT_EQ(stratified_sample(mini_train(), 1.0, 9).size(), 150u);
}

TEST(Dataset, RewriteRoundTrips) {
    std::ostringstream out;
    write_csv_rows(mini_train(), out);
    std::istringstream in(out.str());
    const auto again = parse_nslkdd(in, SplitRole::train);
    ASSERT_EQ(again.n_rows(), mini_train().n_rows());
    for (std::size_t r = 0; r < again.n_rows(); ++r)
        for (std::size_t c = 0; c < kNslKddFields; ++c) {
            const auto kind = again.schema()[c].kind;
            if (kind == ColumnKind::categorical || kind == ColumnKind::label)
                EXPECT_EQ(again.category_string(r, c), mini_train().category_string(r, c));
            else
                EXPECT_EQ(again.numeric(r, c), mini_train().numeric(r, c));
        }
}

TEST(Dataset, ToyHelperBuildsRows) {
    const auto ds = toy_dataset({{"tcp", "http", "SF", "normal"}, {"udp", "dns", "S0", "smurf"}});
    EXPECT_EQ(ds.n_rows(), 2u);
    EXPECT_EQ(ds.target(1), TargetClass::attack);
}
