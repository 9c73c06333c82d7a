#include "support.hpp"

#include <bagus/errors.hpp>
#include <bagus/io.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>

using namespace bagus;
using namespace bagus::testing;
namespace fs = std::filesystem;

namespace {

class TempDir : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / (std::string("bagus-io-") + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path file(const std::string& name) const { return dir_ / name; }

    void write_text(const std::string& name, const std::string& text) const {
        std::ofstream(file(name), std::ios::binary) << text;
    }

    fs::path dir_;
};

} // namespace

TEST(FormatDouble, RoundTripsExactly) {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<std::uint64_t> bits;
    for (int k = 0; k < 10000; ++k) {
        double v;
        const std::uint64_t b = bits(rng);
        std::memcpy(&v, &b, sizeof v);
        if (!std::isfinite(v)) {
            continue;
        }
        EXPECT_EQ(std::strtod(format_double(v).c_str(), nullptr), v);
    }
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
    EXPECT_EQ(format_double(-2.0), "-2");
}

TEST(ParseCsv, SkipsCommentsAndBlankLines) {
    const Matrix m = parse_matrix_csv("# header\n\n1, 2,3\n  # mid\n-4e-3,+5,6\r\n\n");
    Matrix want(2, 3);
    want << 1, 2, 3, -4e-3, 5, 6;
    EXPECT_EQ(m, want);
}

TEST(ParseCsv, Errors) {
    EXPECT_THROW(parse_matrix_csv("1,2\n3\n"), ParseError);
    EXPECT_THROW(parse_matrix_csv("1,abc\n"), ParseError);
    EXPECT_THROW(parse_matrix_csv("1,,2\n"), ParseError);
    EXPECT_THROW(parse_matrix_csv("# only a comment\n"), ParseError);
    EXPECT_THROW(parse_matrix_csv("1 2\n"), ParseError);
    try {
        parse_matrix_csv("1,2\n3,4\n5,x\n", "data.csv");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("data.csv:3"), std::string::npos) << e.what();
    }
}

TEST_F(TempDir, MatrixRoundTrip) {
    std::mt19937_64 rng(2);
    Matrix m = random_matrix(rng, 13, 7) * 1e5;
    m(0, 0) = std::numeric_limits<double>::denorm_min();
    m(1, 1) = 1.0 / 3.0;
    write_matrix_csv(file("m.csv"), m, "x,y");
    EXPECT_EQ(read_matrix_csv(file("m.csv")), m);
    std::ifstream in(file("m.csv"));
    std::string first;
    std::getline(in, first);
    EXPECT_EQ(first, "# x,y");
    EXPECT_THROW(read_matrix_csv(file("missing.csv")), InvalidDataError);
}

TEST_F(TempDir, DatasetRoundTrip) {
    SimulationSpec spec;
    spec.model = GraphModel::ar2;
    spec.p = 6;
    spec.n = 40;
    spec.seed = 18446744073709551615ULL;
    const Dataset d = simulate(spec);
    write_dataset(file("sub/run.csv"), d);
    EXPECT_TRUE(fs::exists(file("sub/run.truth.csv")));

    std::ifstream in(file("sub/run.csv"));
    std::string first;
    std::getline(in, first);
    EXPECT_EQ(first, "# bagus-dataset v1, n=40, p=6, seed=18446744073709551615, model=ar2");

    const DatasetFile back = read_dataset(file("sub/run.csv"));
    EXPECT_TRUE(back.tagged);
    EXPECT_EQ(back.data.rows, d.rows);
    EXPECT_EQ(back.data.seed, d.seed);
    EXPECT_EQ(back.data.model, "ar2");
    ASSERT_TRUE(back.data.truth.has_value());
    EXPECT_EQ(*back.data.truth, *d.truth);
}

TEST_F(TempDir, PlainCsvDataset) {
    write_text("plain.csv", "1,2\n3,4\n5,6\n");
    const DatasetFile f = read_dataset(file("plain.csv"));
    EXPECT_FALSE(f.tagged);
    EXPECT_EQ(f.data.n(), 3);
    EXPECT_FALSE(f.data.truth.has_value());
}

TEST_F(TempDir, DatasetHeaderErrors) {
    write_text("short.csv", "# bagus-dataset v1, n=3, p=2, seed=1, model=star\n1,2\n3,4\n");
    EXPECT_THROW(read_dataset(file("short.csv")), ParseError);
    write_text("bad.csv", "# bagus-dataset v1, n=two, p=2\n1,2\n");
    EXPECT_THROW(read_dataset(file("bad.csv")), ParseError);
    write_text("t.csv", "# bagus-dataset v1, n=1, p=2, seed=1, model=star\n1,2\n");
    write_text("t.truth.csv", "1,0,0\n0,1,0\n0,0,1\n");
    EXPECT_THROW(read_dataset(file("t.csv")), ParseError);
    write_text("t.truth.csv", "1,0.5\n0.4,1\n");
    EXPECT_THROW(read_dataset(file("t.csv")), ParseError);
    write_text("nan.csv", "1,nan\n");
    EXPECT_THROW(read_dataset(file("nan.csv")), InvalidDataError);
}

TEST(TruthPath, ReplacesExtension) {
    EXPECT_EQ(truth_path("a/b/data.csv"), fs::path("a/b/data.truth.csv"));
    EXPECT_EQ(truth_path("x"), fs::path("x.truth.csv"));
}

TEST_F(TempDir, JsonHelpers) {
    MetricsReport r;
    r.fnorm = 1.5;
    r.mcc = 0.25;
    Json j = to_json(r);
    EXPECT_EQ(j["fnorm"], 1.5);
    EXPECT_FALSE(j.contains("auc"));
    r.auc = 0.9;
    EXPECT_EQ(to_json(r)["auc"], 0.9);
    const std::vector<std::string> keys{"fnorm", "max_norm", "spectral_err", "sensitivity", "specificity", "mcc"};
    std::vector<std::string> got;
    for (const auto& item : j.items()) {
        got.push_back(item.key());
    }
    EXPECT_EQ(got, keys);

    const Json s = to_json(std::map<std::string, Summary>{{"mcc", summarize({0.5, 0.7})}});
    EXPECT_EQ(s["mcc"]["formatted"], "0.600(0.141)");
    EXPECT_EQ(s["mcc"]["count"], 2);

    Json doc{{"schema", kSchema}, {"x", 0.1}};
    write_json(file("out/doc.json"), doc);
    EXPECT_EQ(read_json(file("out/doc.json")), doc);
    write_text("broken.json", "{\"a\": ");
    EXPECT_THROW(read_json(file("broken.json")), ParseError);
}
