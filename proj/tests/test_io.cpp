#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <vector>

#include "cdk/cdk.hpp"
#include "cdk/config.hpp"
#include "cdk/io.hpp"

namespace {

using cdk::HPoint;
using cdk::Measure;
using nlohmann::json;

TEST(Double, RoundTripIsExact) {
    std::mt19937_64 rng(1);
    for (int i = 0; i < 20000; ++i) {
        const double v = std::bit_cast<double>(rng());
        if (!std::isfinite(v)) continue;
        EXPECT_EQ(cdk::io::parse_double(cdk::io::format_double(v)), v);
    }
    EXPECT_EQ(cdk::io::format_double(0.1), "0.10000000000000001");
    EXPECT_EQ(cdk::io::format_double(INFINITY), "inf");
    EXPECT_TRUE(std::isnan(cdk::io::parse_double(cdk::io::format_double(NAN))));
}

TEST(Double, RejectsGarbage) {
    EXPECT_THROW(cdk::io::parse_double(""), cdk::ParseError);
    EXPECT_THROW(cdk::io::parse_double("1.5x"), cdk::ParseError);
    EXPECT_THROW(cdk::io::parse_double("abc"), cdk::ParseError);
    EXPECT_EQ(cdk::io::parse_double(" 2.5 "), 2.5);
    EXPECT_THROW(cdk::io::parse_double("1e999"), cdk::ParseError);
    EXPECT_EQ(cdk::io::parse_double("4.9406564584124654e-324"), std::numeric_limits<double>::denorm_min());
}

TEST(Points, CsvWithCommentsAndBlanks) {
    std::istringstream in("# header\n1,2,3\n\n  0.5 , -1\n# tail\n7\n");
    const auto pts = cdk::io::read_points_csv(in);
    ASSERT_EQ(pts.size(), 3u);
    EXPECT_EQ(pts[0], (HPoint{1, 2, 3}));
    EXPECT_EQ(pts[1], (HPoint{0.5, -1}));
    EXPECT_EQ(pts[2], (HPoint{7}));
}

TEST(Points, CsvErrorsCarryLineNumbers) {
    std::istringstream in("1,2\n1,,3\n");
    try {
        cdk::io::read_points_csv(in);
        FAIL() << "expected ParseError";
    } catch (const cdk::ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    }
    std::istringstream nan_in("1,nan\n");
    EXPECT_THROW(cdk::io::read_points_csv(nan_in), cdk::ParseError);
}

TEST(Points, Jsonl) {
    std::istringstream in("[1, 2.5]\n# c\n[]\n[-3]\n");
    const auto pts = cdk::io::read_points_jsonl(in);
    ASSERT_EQ(pts.size(), 3u);
    EXPECT_EQ(pts[0], (HPoint{1, 2.5}));
    EXPECT_EQ(pts[1], HPoint{});
    std::istringstream bad("[1]\n{\"a\": 1}\n");
    EXPECT_THROW(cdk::io::read_points_jsonl(bad), cdk::ParseError);
    std::istringstream bad2("[1, \"x\"]\n");
    EXPECT_THROW(cdk::io::read_points_jsonl(bad2), cdk::ParseError);
}

TEST(Points, WriteReadRoundTrip) {
    const auto pts = cdk::sample(cdk::HilbertCube{}, 4, 50, 3);
    std::stringstream s;
    cdk::io::write_points_csv(s, pts);
    const auto back = cdk::io::read_points_csv(s);
    ASSERT_EQ(back.size(), pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) EXPECT_EQ(back[i], pts[i]);
}

TEST(Model, MomentMatrixRoundTripIsExact) {
    const auto mm = cdk::assemble(Measure::empirical(cdk::sample(cdk::Ball(HPoint{}, 1.0), 3, 40, 4)), 2, 3);
    std::stringstream s;
    cdk::io::write_moment_matrix(s, mm);
    const auto back = cdk::io::read_moment_matrix(s);
    EXPECT_EQ(back.matrix(), mm.matrix());
    EXPECT_EQ(back.degree(), 2u);
    EXPECT_EQ(back.harmonic(), 3u);
    EXPECT_EQ(back.measure_description(), mm.measure_description());
    EXPECT_EQ(back.data_truncation(), 3u);
}

TEST(Model, RoundTripGivesIdenticalScores) {
    const auto pts = cdk::sample(cdk::Ball(HPoint{}, 1.0), 3, 120, 5);
    for (const cdk::InverseMode mode : {cdk::InverseMode::Full, cdk::InverseMode::Pseudo}) {
        const cdk::CDModel model = cdk::fit(Measure::empirical(pts), 2, 3, {.ridge = 1e-9, .mode = mode});
        std::stringstream s;
        cdk::io::write_model(s, model);
        const std::string text = s.str();
        const cdk::CDModel back = cdk::io::read_model(s);
        EXPECT_EQ(back.mode(), mode);
        EXPECT_EQ(back.factorization().ridge, 1e-9);
        EXPECT_EQ(back.factorization().eigenvalues, model.factorization().eigenvalues);
        EXPECT_EQ(cdk::score(back, pts), cdk::score(model, pts));
        std::stringstream again;
        cdk::io::write_model(again, back);
        EXPECT_EQ(again.str(), text);
    }
}

TEST(Model, RejectsCorruptInput) {
    const cdk::CDModel model = cdk::fit(Measure::cube_uniform(), 1, 1);
    std::stringstream s;
    cdk::io::write_model(s, model);
    const std::string text = s.str();

    std::istringstream empty("");
    EXPECT_THROW(cdk::io::read_model(empty), cdk::ParseError);
    std::istringstream magic("not-a-model\n" + text.substr(text.find('\n') + 1));
    EXPECT_THROW(cdk::io::read_model(magic), cdk::ParseError);
    std::istringstream truncated(text.substr(0, text.size() / 2));
    EXPECT_THROW(cdk::io::read_model(truncated), cdk::ParseError);
    EXPECT_THROW(cdk::io::read_model("/nonexistent/model.txt"), cdk::InvalidArgument);
}

TEST(Csv, Scores) {
    std::ostringstream empty;
    cdk::io::write_scores_csv(empty, std::vector<double>{});
    EXPECT_EQ(empty.str(), "index,cd_polynomial,christoffel\n");
    std::ostringstream out;
    cdk::io::write_scores_csv(out, std::vector<double>{4.0, 0.0});
    EXPECT_EQ(out.str(), "index,cd_polynomial,christoffel\n0,4,0.25\n1,0,inf\n");
}

TEST(Csv, Sweep) {
    cdk::SweepResult r;
    cdk::SweepEntry e;
    e.d = 2;
    e.n = 3;
    e.value = 0.5;
    e.reference = 0.25;
    e.pass = true;
    r.entries.push_back(e);
    std::ostringstream out;
    cdk::io::write_sweep_csv(out, r);
    EXPECT_EQ(out.str(), "d,n,d_min_n,value,reference,pass\n2,3,2,0.5,0.25,true\n");
}

TEST(Config, Sets) {
    const auto ball = cdk::config::parse_set(json::parse(R"({"type":"ball","center":[1,2],"radius":0.5})"));
    EXPECT_EQ(cdk::diameter(ball), 1.0);
    const auto e = cdk::config::parse_set(json::parse(R"({"type":"ellipsoid","power":2})"));
    EXPECT_DOUBLE_EQ(cdk::tail_bound(e, 1), 0.25);
    const auto t = cdk::config::parse_set(json::parse(R"({"type":"ellipsoid","weights":[1,4]})"));
    EXPECT_EQ(cdk::diameter(t), 2.0);
    EXPECT_TRUE(std::holds_alternative<cdk::HilbertCube>(cdk::config::parse_set(json::parse(R"({"type":"hilbert_cube"})"))));
    EXPECT_THROW(cdk::config::parse_set(json::parse(R"({"type":"torus"})")), cdk::InvalidArgument);
    EXPECT_THROW(cdk::config::parse_set(json::parse(R"({"type":"ball"})")), cdk::InvalidArgument);
}

TEST(Config, Measures) {
    const auto dir = std::filesystem::temp_directory_path() / "cdk_test_io_config";
    std::filesystem::create_directories(dir);
    {
        std::ofstream f(dir / "pts.csv");
        f << "0.5,0\n-0.5,0\n";
    }
    const Measure emp =
        cdk::config::parse_measure(json::parse(R"({"type":"empirical","data":"pts.csv"})"), dir);
    EXPECT_DOUBLE_EQ(cdk::moment(emp, cdk::MultiIndex{2}), 0.25);
    const Measure inline_pts = cdk::config::parse_measure(
        json::parse(R"({"type":"empirical","points":[[1],[3]],"weights":[0.25,0.75]})"));
    EXPECT_DOUBLE_EQ(cdk::moment(inline_pts, cdk::MultiIndex{1}), 2.5);
    const Measure mix = cdk::config::parse_measure(json::parse(R"({"type":"mixture","components":[
        {"weight":0.3,"measure":{"type":"dirac","point":[0.2]}},
        {"weight":0.7,"measure":{"type":"cube_uniform","n_trunc":3}}]})"));
    EXPECT_DOUBLE_EQ(cdk::atom_mass(mix, HPoint{0.2}), 0.3);
    const Measure s = cdk::config::parse_measure(
        json::parse(R"({"type":"sample","set":{"type":"hilbert_cube"},"n_trunc":2,"count":10,"seed":4})"));
    EXPECT_EQ(std::get<cdk::Empirical>(s.variant()).points.size(), 10u);
    const Measure g = cdk::config::parse_measure(json::parse(R"({"type":"gaussian","decay":2})"));
    EXPECT_DOUBLE_EQ(cdk::moment(g, cdk::MultiIndex{0, 2}), 0.25);
    EXPECT_THROW(cdk::config::parse_measure(json::parse(R"({"type":"empirical","data":"missing.csv"})"), dir),
                 cdk::InvalidArgument);
    EXPECT_THROW(cdk::config::parse_measure(json::parse(R"({"type":"dirac"})")), cdk::InvalidArgument);
    EXPECT_THROW(cdk::config::parse_measure(json::parse(R"({"type":"cube_uniform","n_trunc":-1})")),
                 cdk::InvalidArgument);
    std::filesystem::remove_all(dir);
}

TEST(Config, Schedules) {
    EXPECT_EQ(cdk::config::parse_schedule(json::parse("[[1,1],[2,3]]")), (std::vector<cdk::Order>{{1, 1}, {2, 3}}));
    EXPECT_EQ(cdk::config::parse_schedule(json::parse(R"({"diagonal":[2,4]})")),
              (std::vector<cdk::Order>{{2, 2}, {3, 3}, {4, 4}}));
    EXPECT_THROW(cdk::config::parse_schedule(json::parse("[[2,2],[3,2]]")), cdk::InvalidArgument);
    EXPECT_THROW(cdk::config::parse_schedule(json::parse("[]")), cdk::InvalidArgument);
    EXPECT_THROW(cdk::config::parse_schedule(json::parse("[[1]]")), cdk::InvalidArgument);
    EXPECT_THROW(cdk::config::parse_schedule(json::parse(R"({"diagonal":[3,1]})")), cdk::InvalidArgument);
}

}  // namespace
