#ifndef CDK_CHECKS_HPP
#define CDK_CHECKS_HPP

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cdk/asymptotics.hpp"
#include "cdk/cdkernel.hpp"
#include "cdk/hilbert.hpp"
#include "cdk/measures.hpp"
#include "cdk/multiindex.hpp"

// Self-checks behind `cdk verify`: each one exercises an identity or bound of
// the Christoffel-Darboux construction on seeded data.

namespace cdk::checks {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct VerifyOptions {
    std::uint64_t seed = 1;
    /// Ridge applied to the singular Dirac fit in the trace check.
    double ridge = 0.0;
    unsigned workers = 1;
};

namespace detail {

struct Outcome {
    bool passed = true;
    std::ostringstream detail;
};

inline Measure random_cloud(std::uint64_t seed, std::size_t n_trunc, std::size_t count) {
    return Measure::empirical(sample(Ball(HPoint{}, 1.0), n_trunc, count, seed));
}

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t size) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<double> v(size);
    for (double& x : v) x = g(rng);
    return v;
}

inline double poly_eval(const BasisIndex& basis, std::span<const double> p, const HPoint& x) {
    const std::vector<double> b = basis.evaluate(x);
    double s = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) s += p[i] * b[i];
    return s;
}

inline void dimension(Outcome& out, const VerifyOptions&) {
    for (std::size_t d = 0; d <= 8; ++d) {
        for (std::size_t n = 0; n <= 8; ++n) {
            const std::size_t got = BasisIndex(d, n).size();
            // C(n+d, n) by Pascal's rule
            std::vector<std::vector<std::size_t>> pascal(d + n + 1);
            for (std::size_t i = 0; i <= d + n; ++i) {
                pascal[i].assign(i + 1, 1);
                for (std::size_t j = 1; j < i; ++j) pascal[i][j] = pascal[i - 1][j - 1] + pascal[i - 1][j];
            }
            if (got != pascal[d + n][n]) {
                out.passed = false;
                out.detail << "P_{" << d << "," << n << "} has " << got << " elements; ";
            }
        }
    }
    out.detail << "dim P_{4,2} = " << BasisIndex(4, 2).size();
}

inline void trace_identity(Outcome& out, const VerifyOptions& opt) {
    double worst = 0.0;
    std::vector<Measure> measures;
    for (std::uint64_t k = 0; k < 5; ++k) measures.push_back(random_cloud(opt.seed * 1000 + k, 3, 120));
    measures.push_back(Measure::cube_uniform());
    FitOptions fo;
    fo.workers = opt.workers;
    for (const Measure& mu : measures) {
        for (std::size_t d = 1; d <= 3; ++d) {
            for (std::size_t n = 1; n <= 3; ++n) {
                const CDModel model = fit(mu, d, n, fo);
                const AverageReport avg = average_cd(model, mu, opt.workers);
                const double dim = static_cast<double>(model.size());
                worst = std::max(worst, std::abs(avg.value - dim) / dim);
            }
        }
    }
    if (worst > 1e-9) out.passed = false;
    out.detail << "max relative trace error " << worst;

    const Measure dirac = Measure::dirac(HPoint{});
    FitOptions pinv;
    pinv.mode = InverseMode::Pseudo;
    const AverageReport pr = average_cd(fit(dirac, 2, 2, pinv), dirac);
    if (std::abs(pr.value - 1.0) > 1e-9 || pr.effective_rank != 1) out.passed = false;
    out.detail << "; Dirac pseudo-inverse average " << pr.value << " (effective rank " << pr.effective_rank << ")";
    if (opt.ridge > 0.0) {
        FitOptions ridged;
        ridged.ridge = opt.ridge;
        const CDModel m = fit(dirac, 2, 2, ridged);
        const AverageReport rr = average_cd(m, dirac);
        if (rr.identity_applies || rr.value > static_cast<double>(m.size())) out.passed = false;
        out.detail << "; ridge " << opt.ridge << " on Dirac: average " << rr.value << ", effective rank "
                   << rr.effective_rank << ", identity not applicable";
    }
}

inline void reproducing(Outcome& out, const VerifyOptions& opt) {
    std::mt19937_64 rng(opt.seed);
    double worst = 0.0;
    for (std::uint64_t k = 0; k < 3; ++k) {
        const Measure mu = random_cloud(opt.seed * 7 + k, 3, 100);
        const auto& points = std::get<Empirical>(mu.variant()).points;
        const CDModel model = fit(mu, 3, 3);
        const auto ys = sample(Ball(HPoint{}, 1.0), 3, 20, opt.seed * 11 + k);
        for (const HPoint& y : ys) {
            const std::vector<double> p = random_vector(rng, model.size());
            const double py = poly_eval(model.basis(), p, y);
            double lhs = 0.0;
            for (const HPoint& x : points) lhs += poly_eval(model.basis(), p, x) * model.kernel(x, y);
            lhs /= static_cast<double>(points.size());
            worst = std::max(worst, std::abs(lhs - py) / (1.0 + std::abs(py)));
        }
    }
    if (worst > 1e-8) out.passed = false;
    out.detail << "max |<p,K(.,y)> - p(y)| / (1+|p(y)|) = " << worst;
}

inline void qp_oracle(Outcome& out, const VerifyOptions& opt) {
    double worst = 0.0;
    double worst_constraint = 0.0;
    for (std::uint64_t k = 0; k < 20; ++k) {
        const std::size_t d = 1 + k % 3;
        const std::size_t n = 1 + (k / 3) % 3;
        const Measure mu = random_cloud(opt.seed * 13 + k, 3, 80);
        const HPoint z = sample(Ball(HPoint{}, 1.2), 3, 1, opt.seed * 17 + k).front();
        const CDModel model = fit(mu, d, n);
        const double closed = model.christoffel(z);
        const QPSolution qp = christoffel_qp_oracle(mu, d, n, z);
        worst = std::max(worst, std::abs(closed - qp.value) / qp.value);
        const std::vector<double> p = model.minimizer(z);
        worst_constraint = std::max(worst_constraint, std::abs(poly_eval(model.basis(), p, z) - 1.0));
    }
    if (worst > 1e-8 || worst_constraint > 1e-10) out.passed = false;
    out.detail << "max relative gap " << worst << ", max |p(z)-1| " << worst_constraint;
}

inline void monotonicity(Outcome& out, const VerifyOptions& opt) {
    std::size_t violations = 0;
    for (std::uint64_t k = 0; k < 3; ++k) {
        const double w = 0.1 + 0.2 * static_cast<double>(k);
        const HPoint z = sample(Ball(HPoint{}, 0.5), 4, 1, opt.seed * 19 + k).front();
        const Measure mu =
            Measure::mixture({w, 1.0 - w}, {Measure::dirac(z), random_cloud(opt.seed * 23 + k, 4, 300)});
        const SweepResult r = sweep_atom(mu, z, diagonal_schedule(1, 4));
        if (!r.all_pass()) ++violations;
        out.detail << "w=" << w << ": C_4 = " << r.entries.back().value << "; ";
    }
    if (violations) out.passed = false;
    out.detail << violations << " failing sweeps";
}

inline void growth(Outcome& out, const VerifyOptions& opt) {
    const Measure mu = Measure::empirical(sample(Ball(HPoint{}, 1.0), 2, 400, opt.seed * 29));
    std::size_t failures = 0;
    for (double r : {1.5, 2.5, 4.0}) {
        const SweepResult res = sweep_outside(mu, Ball(HPoint{}, 1.0), HPoint{r, 0.0}, 2,
                                              {1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
        if (!res.all_pass()) ++failures;
    }
    if (failures) out.passed = false;
    out.detail << failures << " failing outside sweeps";
}

inline void chebyshev(Outcome& out, const VerifyOptions&) {
    double worst = 0.0;
    for (std::size_t d = 0; d <= 30; ++d) {
        for (int i = 0; i < 1000; ++i) {
            const double t = -1.0 + 2.0 * i / 999.0;
            worst = std::max(worst, std::abs(chebyshev_T(d, t) - std::cos(static_cast<double>(d) * std::acos(t))));
        }
    }
    std::size_t bullet_failures = 0;
    for (std::size_t d = 1; d <= 30; ++d) {
        for (double delta : {0.05, 0.2, 0.5, 0.9}) {
            if (std::abs(chebyshev_witness(d, delta, 0.0) - 1.0) > 1e-12) ++bullet_failures;
            for (int i = 0; i <= 200; ++i) {
                const double r = i / 200.0;
                const double q = std::abs(chebyshev_witness(d, delta, r));
                if (q > 1.0 + 1e-12) ++bullet_failures;
                if (r >= delta && q > std::exp2(1.0 - delta * static_cast<double>(d)) + 1e-12) ++bullet_failures;
            }
        }
    }
    if (worst > 1e-10 || bullet_failures) out.passed = false;
    out.detail << "max |T_d - cos(d acos)| " << worst << ", " << bullet_failures << " witness bound failures";
}

inline void tail_bounds(Outcome& out, const VerifyOptions& opt) {
    std::size_t failures = 0;
    const std::vector<CompactSet> sets{Ellipsoid(PowerWeights{1.0}), HilbertCube{}};
    for (const CompactSet& set : sets) {
        const auto points = sample(set, 60, 2000, opt.seed * 31);
        for (std::size_t n : {1, 5, 10, 50}) {
            const double bound = tail_bound(set, n);
            for (const HPoint& x : points) {
                if (tail_energy(x, n) > bound) ++failures;
            }
        }
    }
    if (failures) out.passed = false;
    out.detail << failures << " sampled tails above the bound";
}

inline void witness_bound(Outcome& out, const VerifyOptions& opt) {
    std::size_t failures = 0;
    for (std::uint64_t k = 0; k < 4; ++k) {
        const Measure mu = Measure::empirical(sample(Ball(HPoint{}, 0.5), 2, 200, opt.seed * 37 + k));
        const HPoint z = sample(Ball(HPoint{}, 0.3), 2, 1, opt.seed * 41 + k).front();
        for (std::size_t d = 1; d <= 2; ++d) {
            const double bound = witness_upper_bound(mu, z, d, 2);
            const double c = fit(mu, 2 * d, 2).christoffel(z);
            if (c > bound * (1.0 + 1e-9)) ++failures;
        }
    }
    if (failures) out.passed = false;
    out.detail << failures << " Christoffel values above the witness bound";
}

}  // namespace detail

/// Runs every check; never throws for a failing identity (exceptions are
/// reported as failures of the check that raised them).
inline std::vector<CheckResult> run_verification(const VerifyOptions& options = {}) {
    using Fn = void (*)(detail::Outcome&, const VerifyOptions&);
    const std::vector<std::pair<const char*, Fn>> suite{
        {"dimension", detail::dimension},         {"trace_identity", detail::trace_identity},
        {"reproducing_property", detail::reproducing}, {"christoffel_qp_oracle", detail::qp_oracle},
        {"atom_monotonicity", detail::monotonicity}, {"outside_growth", detail::growth},
        {"chebyshev", detail::chebyshev},         {"tail_bounds", detail::tail_bounds},
        {"witness_upper_bound", detail::witness_bound},
    };
    std::vector<CheckResult> results;
    for (const auto& [name, fn] : suite) {
        const auto start = std::chrono::steady_clock::now();
        detail::Outcome outcome;
        try {
            fn(outcome, options);
        } catch (const std::exception& e) {
            outcome.passed = false;
            outcome.detail << "exception: " << e.what();
        }
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        results.push_back({name, outcome.passed, outcome.detail.str(), elapsed.count()});
    }
    return results;
}

}  // namespace cdk::checks

#endif
