// Outlier scoring for sampled curves on [0, 1].
//
// Each curve is projected onto the cosine system e_1 = 1,
// e_k(t) = sqrt(2) cos((k - 1) pi t), which is orthonormal in L^2(0, 1).
// A CD model fitted on the coefficients of regular curves then scores new
// curves; scores far above the basis dimension flag curves whose leading
// coefficients leave the support of the training data.

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <vector>

#include "cdk/cdk.hpp"

namespace {

constexpr std::size_t kGrid = 512;
constexpr std::size_t kCoefficients = 4;

double basis_function(std::size_t k, double t) {
    return k == 1 ? 1.0 : std::sqrt(2.0) * std::cos(static_cast<double>(k - 1) * std::numbers::pi * t);
}

/// Midpoint-rule coefficients <f, e_k>, k = 1..kCoefficients.
cdk::HPoint project_curve(const std::vector<double>& samples) {
    std::vector<double> c(kCoefficients, 0.0);
    for (std::size_t i = 0; i < kGrid; ++i) {
        const double t = (static_cast<double>(i) + 0.5) / kGrid;
        for (std::size_t k = 1; k <= kCoefficients; ++k) c[k - 1] += samples[i] * basis_function(k, t) / kGrid;
    }
    return cdk::HPoint(std::move(c));
}

std::vector<double> regular_curve(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> amplitude(8);
    for (std::size_t k = 1; k <= amplitude.size(); ++k) amplitude[k - 1] = (k == 1 ? 0.5 : 0.0) + 0.3 * g(rng) / static_cast<double>(k);
    std::vector<double> f(kGrid);
    for (std::size_t i = 0; i < kGrid; ++i) {
        const double t = (static_cast<double>(i) + 0.5) / kGrid;
        double v = 0.02 * g(rng);
        for (std::size_t k = 1; k <= amplitude.size(); ++k) v += amplitude[k - 1] * basis_function(k, t);
        f[i] = v;
    }
    return f;
}

}  // namespace

int main() {
    std::mt19937_64 rng(2024);
    std::vector<cdk::HPoint> training;
    for (int i = 0; i < 400; ++i) training.push_back(project_curve(regular_curve(rng)));

    const std::size_t d = 2;
    const cdk::CDModel model = cdk::fit(cdk::Measure::empirical(training), d, kCoefficients);
    std::printf("fitted P_{%zu,%zu}: dim = %zu, effective rank = %zu\n", d, kCoefficients, model.size(),
                model.factorization().rank);

    std::vector<cdk::HPoint> queries;
    std::vector<const char*> labels;
    for (int i = 0; i < 3; ++i) {
        queries.push_back(project_curve(regular_curve(rng)));
        labels.push_back("regular");
    }
    {
        auto f = regular_curve(rng);
        for (std::size_t i = 0; i < kGrid; ++i) f[i] += 0.8 * std::cos(3.0 * std::numbers::pi * (i + 0.5) / kGrid);
        queries.push_back(project_curve(f));
        labels.push_back("high-frequency");
    }
    {
        auto f = regular_curve(rng);
        for (double& v : f) v += 1.5;
        queries.push_back(project_curve(f));
        labels.push_back("shifted level");
    }

    const auto scores = cdk::score(model, queries);
    for (std::size_t i = 0; i < queries.size(); ++i) {
        std::printf("%-15s p = %12.4g  ratio to dim = %8.3g\n", labels[i], scores[i],
                    scores[i] / static_cast<double>(model.size()));
    }
    return 0;
}
