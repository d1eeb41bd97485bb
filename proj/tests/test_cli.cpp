#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli_support.hpp"

namespace {

std::size_t count_lines(const std::string& s) {
    std::size_t n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

std::vector<double> score_column(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    std::vector<double> v;
    while (std::getline(in, line)) {
        const auto a = line.find(',');
        const auto b = line.find(',', a + 1);
        v.push_back(std::stod(line.substr(a + 1, b - a - 1)));
    }
    return v;
}

TEST(Cli, Basis) {
    const auto r = cli::run("basis --d 2 --n 4");
    EXPECT_EQ(r.exit_code, 0);
    EXPECT_EQ(count_lines(r.out), 16u);
    EXPECT_NE(r.out.find("dim = 15"), std::string::npos);
    EXPECT_EQ(r.out.substr(0, 12), "0 1\n1 x1\n2 x");
    EXPECT_EQ(count_lines(cli::run("basis --d 0 --n 3").out), 2u);
    EXPECT_NE(cli::run("basis --d 2 --n 2").out.find("5 x2^2\ndim = 6\n"), std::string::npos);
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(cli::run("basis --d 2 2>/dev/null").exit_code, 2);
    EXPECT_EQ(cli::run("nonsense 2>/dev/null").exit_code, 2);
    EXPECT_EQ(cli::run("fit --d 2 --n 2 2>/dev/null").exit_code, 2);
    EXPECT_EQ(cli::run("fit --config /nonexistent.json 2>/dev/null").exit_code, 2);
    EXPECT_EQ(cli::run("basis --d 30 --n 30 2>/dev/null").exit_code, 2);
}

TEST(Cli, FitIsReproducible) {
    const auto dir = cli::scratch("cli_fit");
    const auto a = cli::run("fit --config " + cli::data("fit.json") + " -o " + (dir / "a.txt").string());
    ASSERT_EQ(a.exit_code, 0);
    EXPECT_NE(a.out.find("dim = 15"), std::string::npos);
    EXPECT_NE(a.out.find("effective rank = 15"), std::string::npos);
    EXPECT_EQ(cli::run("fit --config " + cli::data("fit.json") + " --workers 3 -o " + (dir / "b.txt").string()).exit_code,
              0);
    EXPECT_EQ(cli::run("fit --data " + cli::data("ball_train.csv") + " --d 2 --n 4 -o " + (dir / "c.txt").string())
                  .exit_code,
              0);
    const std::string ma = cli::slurp(dir / "a.txt");
    EXPECT_FALSE(ma.empty());
    EXPECT_EQ(ma, cli::slurp(dir / "b.txt"));
    EXPECT_EQ(ma, cli::slurp(dir / "c.txt"));
    // model to stdout, log to stderr
    const auto s = cli::run("fit --config " + cli::data("fit.json") + " 2>/dev/null");
    EXPECT_EQ(s.out, ma);
}

TEST(Cli, SingularFitIsANumericalError) {
    const auto r = cli::run("fit --config " + cli::data("singular.json") + " 2>&1 >/dev/null");
    EXPECT_EQ(r.exit_code, 3);
    EXPECT_NE(r.out.find("pseudo-inverse"), std::string::npos);
    EXPECT_EQ(cli::run("fit --config " + cli::data("singular.json") + " --pinv >/dev/null 2>&1").exit_code, 0);
    const auto ridge = cli::run("fit --config " + cli::data("singular.json") + " --ridge 1e-6 2>&1 >/dev/null");
    EXPECT_EQ(ridge.exit_code, 0);
    EXPECT_NE(ridge.out.find("effective rank = 6"), std::string::npos);
}

TEST(Cli, ScoreMeanEqualsDimension) {
    const auto dir = cli::scratch("cli_score");
    const std::string model = (dir / "m.txt").string();
    ASSERT_EQ(cli::run("fit --config " + cli::data("fit.json") + " -o " + model).exit_code, 0);
    const auto r = cli::run("score --model " + model + " --data " + cli::data("ball_train.csv"));
    ASSERT_EQ(r.exit_code, 0);
    const auto s = score_column(r.out);
    ASSERT_EQ(s.size(), 400u);
    double mean = 0.0;
    for (double v : s) mean += v / 400.0;
    EXPECT_NEAR(mean, 15.0, 1e-6);

    const auto test = cli::run("score --model " + model + " --data " + cli::data("ball_test.csv"));
    EXPECT_EQ(score_column(test.out).size(), 100u);
    const auto far = score_column(cli::run("score --model " + model + " --data " + cli::data("ball_far.csv")).out);
    for (double v : far) EXPECT_GT(v, *std::max_element(s.begin(), s.end()));
}

TEST(Cli, ScoreEdgeCases) {
    const auto dir = cli::scratch("cli_score_edges");
    const std::string model = (dir / "m.txt").string();
    ASSERT_EQ(cli::run("fit --config " + cli::data("fit.json") + " -o " + model).exit_code, 0);
    const auto empty = cli::run("score --model " + model + " --data " + cli::data("empty.csv"));
    EXPECT_EQ(empty.exit_code, 0);
    EXPECT_EQ(empty.out, "index,cd_polynomial,christoffel\n");
    const auto mismatch = cli::run("score --model " + model + " --data " + cli::data("ball_2d.csv") + " 2>&1");
    EXPECT_EQ(mismatch.exit_code, 2);
    EXPECT_NE(mismatch.out.find("coefficients"), std::string::npos);
    EXPECT_EQ(cli::run("score --model /nonexistent --data " + cli::data("ball_test.csv") + " 2>/dev/null").exit_code, 2);
}

TEST(Cli, ScoreIsWorkerIndependent) {
    const auto dir = cli::scratch("cli_score_workers");
    const std::string model = (dir / "m.txt").string();
    ASSERT_EQ(cli::run("fit --config " + cli::data("fit.json") + " -o " + model).exit_code, 0);
    const std::string base = "score --model " + model + " --data " + cli::data("ball_test.csv");
    const auto one = cli::run(base + " --workers 1");
    EXPECT_EQ(one.out, cli::run(base + " --workers 4").out);
    EXPECT_EQ(one.out, cli::run(base + " --workers 0").out);
}

TEST(Cli, Verify) {
    for (const char* seed : {"1", "2", "17"}) {
        const auto r = cli::run(std::string("verify --seed ") + seed);
        EXPECT_EQ(r.exit_code, 0) << r.out;
        EXPECT_EQ(r.out.find("FAIL"), std::string::npos) << r.out;
    }
    const auto ridge = cli::run("verify --ridge 1e-6");
    EXPECT_EQ(ridge.exit_code, 0) << ridge.out;
    EXPECT_NE(ridge.out.find("effective rank"), std::string::npos);
}

TEST(Cli, Sweeps) {
    for (const char* c : {"sweep_atom.json", "sweep_outside.json", "sweep_outside_ellipsoid.json"}) {
        const auto r = cli::run("sweep --config " + cli::data(c) + " 2>/dev/null");
        EXPECT_EQ(r.exit_code, 0) << c;
        EXPECT_EQ(r.out.rfind("d,n,d_min_n,value,reference,pass\n", 0), 0u);
        EXPECT_EQ(r.out.find("false"), std::string::npos);
    }
    EXPECT_EQ(count_lines(cli::run("sweep --config " + cli::data("sweep_outside.json") + " 2>/dev/null").out), 11u);
    EXPECT_EQ(cli::run("sweep --config " + cli::data("sweep_bad_schedule.json") + " 2>/dev/null").exit_code, 2);
    EXPECT_EQ(cli::run("sweep 2>/dev/null").exit_code, 2);
}

TEST(Cli, SweepFailureExitCode) {
    // a Dirac atom without ridge or pseudo-inverse cannot be fitted at any order
    const auto dir = cli::scratch("cli_sweep_fail");
    {
        std::ofstream f(dir / "c.json");
        f << R"({"kind":"atom","measure":{"type":"dirac","point":[0.5]},"z":[0.5],"schedule":[[1,1],[2,2]]})";
    }
    EXPECT_EQ(cli::run("sweep --config " + (dir / "c.json").string() + " >/dev/null 2>&1").exit_code, 1);
    EXPECT_EQ(cli::run("sweep --config " + (dir / "c.json").string() + " --pinv >/dev/null 2>&1").exit_code, 0);
}

TEST(Cli, SweepIsReproducible) {
    const std::string base = "sweep --config " + cli::data("sweep_atom.json") + " 2>/dev/null";
    const auto a = cli::run(base + " --workers 1");
    EXPECT_EQ(a.out, cli::run(base + " --workers 4").out);
    EXPECT_EQ(a.out, cli::run(base).out);
}

TEST(Cli, Sample) {
    const auto a = cli::run("sample --set '{\"type\":\"hilbert_cube\"}' --n-trunc 3 --count 5 --seed 9");
    EXPECT_EQ(a.exit_code, 0);
    EXPECT_EQ(count_lines(a.out), 5u);
    EXPECT_EQ(a.out, cli::run("sample --set '{\"type\":\"hilbert_cube\"}' --n-trunc 3 --count 5 --seed 9").out);
    EXPECT_EQ(cli::run("sample --set '{\"type\":\"bogus\"}' --n-trunc 3 --count 5 2>/dev/null").exit_code, 2);
    EXPECT_EQ(cli::run("sample --set 'not json' --n-trunc 3 --count 5 2>/dev/null").exit_code, 2);
}

}  // namespace
