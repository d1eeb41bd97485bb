#ifndef CDK_ASYMPTOTICS_HPP
#define CDK_ASYMPTOTICS_HPP

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "cdk/cdkernel.hpp"
#include "cdk/errors.hpp"
#include "cdk/hilbert.hpp"
#include "cdk/measures.hpp"
#include "cdk/overloaded.hpp"

namespace cdk {

/// Chebyshev polynomial of the first kind, by the three-term recurrence.
template <std::floating_point T>
T chebyshev_T(std::size_t d, T t) noexcept {
    if (d == 0) return T(1);
    T prev = T(1);
    T cur = t;
    for (std::size_t k = 1; k < d; ++k) {
        const T next = T(2) * t * cur - prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

/// q(x) = T_d(1 + delta^2 - r^2) / T_d(1 + delta^2) with r = |pi_n(x)|.
///
/// q equals 1 at r = 0, is bounded by 1 in absolute value for r <= 1 and by
/// 2^{1 - delta d} for delta <= r <= 1 (0 < delta < 1).
inline double chebyshev_witness(std::size_t d, double delta, double r) noexcept {
    return chebyshev_T(d, 1.0 + delta * delta - r * r) / chebyshev_T(d, 1.0 + delta * delta);
}

/// 2^{delta_bar d - 3} with delta_bar = delta / (delta + diam).
inline double growth_lower_bound(double delta, double diam, std::size_t d) {
    if (!(delta > 0.0) || !(diam > 0.0)) throw InvalidArgument("growth bound needs delta > 0 and diam > 0");
    const double delta_bar = delta / (delta + diam);
    return std::exp2(delta_bar * static_cast<double>(d) - 3.0);
}

namespace detail {

/// sup over the support of |pi_n(x - z)|^2.
inline double support_radius_sq(const Measure& mu, const HPoint& z, std::size_t n) {
    return std::visit(
        overloaded{
            [&](const Empirical& e) {
                double r = 0.0;
                for (const HPoint& x : e.points) r = std::max(r, projected_distance_sq(x, z, n));
                return r;
            },
            [&](const ProductAnalytic& p) {
                if (p.rule != CoordinateRule::CubeUniform) {
                    throw WitnessInvalidError("witness invalid for this geometry: the Gaussian measure has unbounded support");
                }
                if (p.n_trunc != 0 && n > p.n_trunc) {
                    throw UndefinedMomentError("measure has no rule past coordinate " + std::to_string(p.n_trunc));
                }
                double r = 0.0;
                for (std::size_t k = 1; k <= n; ++k) {
                    const double t = std::abs(z.coefficient(k)) + 1.0 / static_cast<double>(k);
                    r += t * t;
                }
                return r;
            },
            [&](const Mixture& m) {
                double r = 0.0;
                for (const Measure& c : m.components) r = std::max(r, support_radius_sq(c, z, n));
                return r;
            },
        },
        mu.variant());
}

inline double binomial(std::size_t n, std::size_t k) {
    double c = 1.0;
    for (std::size_t i = 1; i <= k; ++i) c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
    return c;
}

/// int (1 - |pi_n(x - z)|^2)^power dmu
inline double witness_integral(const Measure& mu, const HPoint& z, std::size_t n, std::size_t power) {
    return std::visit(
        overloaded{
            [&](const Empirical& e) {
                std::vector<double> terms(e.points.size());
                for (std::size_t i = 0; i < terms.size(); ++i) {
                    terms[i] = e.weights[i] * std::pow(1.0 - projected_distance_sq(e.points[i], z, n), static_cast<double>(power));
                }
                return pairwise_sum<double>(terms);
            },
            [&](const ProductAnalytic&) {
                // With Y_k = (x_k - z_k)^2 independent, build G(j) = E[(Y_1 + ... + Y_k)^j]
                // coordinate by coordinate, then expand (1 - S)^power binomially.
                std::vector<double> g(power + 1, 0.0);
                g[0] = 1.0;
                for (std::size_t k = 1; k <= n; ++k) {
                    const double zk = z.coefficient(k);
                    std::vector<double> ey(power + 1, 0.0);  // E[Y_k^j]
                    for (std::size_t j = 0; j <= power; ++j) {
                        double s = 0.0;
                        for (std::size_t i = 0; i <= 2 * j; ++i) {
                            const MultiIndex a = MultiIndex::from_entries({{static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(i)}});
                            s += binomial(2 * j, i) * moment(mu, a) * std::pow(-zk, static_cast<double>(2 * j - i));
                        }
                        ey[j] = s;
                    }
                    std::vector<double> next(power + 1, 0.0);
                    for (std::size_t j = 0; j <= power; ++j) {
                        for (std::size_t i = 0; i <= j; ++i) next[j] += binomial(j, i) * g[i] * ey[j - i];
                    }
                    g = std::move(next);
                }
                double v = 0.0;
                for (std::size_t j = 0; j <= power; ++j) v += binomial(power, j) * ((j % 2) ? -1.0 : 1.0) * g[j];
                return v;
            },
            [&](const Mixture& m) {
                double v = 0.0;
                for (std::size_t j = 0; j < m.components.size(); ++j) v += m.weights[j] * witness_integral(m.components[j], z, n, power);
                return v;
            },
        },
        mu.variant());
}

}  // namespace detail

/// Upper bound on C_{2d,n}(z) from the admissible polynomial
/// p(x) = (1 - |pi_n(x - z)|^2)^d, i.e. int (1 - |pi_n(x - z)|^2)^{2d} dmu.
///
/// Only a certified bound when |pi_n(x - z)| <= 1 on the support; otherwise
/// throws WitnessInvalidError.
inline double witness_upper_bound(const Measure& mu, const HPoint& z, std::size_t d, std::size_t n) {
    const double radius_sq = detail::support_radius_sq(mu, z, n);
    if (radius_sq > 1.0 + kMembershipSlack) {
        throw WitnessInvalidError("witness invalid for this geometry: the support reaches projected distance " +
                                  std::to_string(std::sqrt(radius_sq)) + " > 1 from z");
    }
    return detail::witness_integral(mu, z, n, 2 * d);
}

// ---------------------------------------------------------------------------
// Sweeps

struct Order {
    std::size_t d = 0;
    std::size_t n = 0;
    friend bool operator==(const Order&, const Order&) = default;
};

struct SweepEntry {
    std::size_t d = 0;
    std::size_t n = 0;
    /// Christoffel value (atom sweep) or CD polynomial (outside sweep); NaN when the fit failed.
    double value = std::numeric_limits<double>::quiet_NaN();
    double reference = std::numeric_limits<double>::quiet_NaN();
    bool pass = false;
    std::string error;

    std::size_t d_min_n() const noexcept { return std::min(d, n); }
};

struct SweepResult {
    std::vector<SweepEntry> entries;
    /// Atom mass (atom sweep) or certified delta (outside sweep).
    double target = std::numeric_limits<double>::quiet_NaN();
    std::size_t monotone_violations = 0;
    /// "exact" when the reference values rest on closed-form geometry.
    std::string certification;

    bool all_pass() const noexcept {
        return monotone_violations == 0 &&
               std::all_of(entries.begin(), entries.end(), [](const SweepEntry& e) { return e.pass; });
    }
};

/// Relative slack for order comparisons between separately factorized fits.
inline constexpr double kSweepSlack = 1e-9;

/// Schedule must be nonempty and strictly increasing in d∧n.
inline void validate_schedule(const std::vector<Order>& schedule) {
    if (schedule.empty()) throw InvalidArgument("sweep schedule is empty");
    for (std::size_t i = 1; i < schedule.size(); ++i) {
        if (std::min(schedule[i].d, schedule[i].n) <= std::min(schedule[i - 1].d, schedule[i - 1].n)) {
            throw InvalidArgument("sweep schedule must be strictly increasing in min(d, n)");
        }
    }
}

/// d = n = first..last.
inline std::vector<Order> diagonal_schedule(std::size_t first, std::size_t last) {
    std::vector<Order> s;
    for (std::size_t k = first; k <= last; ++k) s.push_back({k, k});
    return s;
}

/// Christoffel function at an atom z along a schedule of orders.
///
/// Each entry passes when C_{d,n}(z) >= mu({z}) and no earlier entry with a
/// coordinate-wise smaller order lies below it. Fit failures are recorded on
/// the entry and the sweep continues.
inline SweepResult sweep_atom(const Measure& mu, const HPoint& z, const std::vector<Order>& schedule,
                              const FitOptions& options = {}) {
    validate_schedule(schedule);
    const double w = atom_mass(mu, z);
    if (!(w > 0.0)) throw InvalidArgument("measure has no atom at the sweep point");

    SweepResult result;
    result.target = w;
    result.certification = "exact";
    for (const Order& o : schedule) {
        SweepEntry e;
        e.d = o.d;
        e.n = o.n;
        e.reference = w;
        try {
            e.value = fit(mu, o.d, o.n, options).christoffel(z);
            e.pass = e.value >= w * (1.0 - kSweepSlack);
        } catch (const Error& err) {
            e.error = err.what();
        }
        result.entries.push_back(std::move(e));
    }
    for (std::size_t j = 0; j < result.entries.size(); ++j) {
        SweepEntry& later = result.entries[j];
        for (std::size_t i = 0; i < j; ++i) {
            const SweepEntry& earlier = result.entries[i];
            if (earlier.d > later.d || earlier.n > later.n) continue;
            if (std::isnan(earlier.value) || std::isnan(later.value)) continue;
            if (later.value > earlier.value * (1.0 + kSweepSlack)) {
                ++result.monotone_violations;
                later.pass = false;
            }
        }
    }
    return result;
}

/// Sample points of mu that fall outside X (empirical parts only).
inline std::size_t support_violations(const Measure& mu, const CompactSet& set) {
    return std::visit(overloaded{
                          [&](const Empirical& e) {
                              return static_cast<std::size_t>(std::count_if(
                                  e.points.begin(), e.points.end(), [&](const HPoint& x) { return !contains(set, x); }));
                          },
                          [](const ProductAnalytic&) { return std::size_t{0}; },
                          [&](const Mixture& m) {
                              std::size_t v = 0;
                              for (const Measure& c : m.components) v += support_violations(c, set);
                              return v;
                          },
                      },
                      mu.variant());
}

/// CD polynomial at a point z outside X against 2^{delta_bar d - 3}, for each
/// degree in d_range at harmonic degree n.
///
/// delta is min_{x in X} |pi_n(x - z)|, computed from the closed-form
/// projection of X. Entries pass when p_{d,n}(z) >= bound; a decrease of
/// p_{d,n}(z) in d counts as a monotonicity violation.
inline SweepResult sweep_outside(const Measure& mu, const CompactSet& set, const HPoint& z, std::size_t n,
                                 const std::vector<std::size_t>& d_range, const FitOptions& options = {}) {
    if (d_range.empty()) throw InvalidArgument("degree range is empty");
    for (std::size_t i = 0; i < d_range.size(); ++i) {
        if (d_range[i] == 0) throw InvalidArgument("growth bound needs degrees d >= 1");
        if (i > 0 && d_range[i] <= d_range[i - 1]) throw InvalidArgument("degree range must be strictly increasing");
    }
    if (const std::size_t bad = support_violations(mu, set); bad != 0) {
        throw InvalidArgument(std::to_string(bad) + " support points of the measure lie outside the set");
    }
    const double delta = projected_distance(set, z, n);
    if (!(delta > 1e-12)) {
        throw CertificationError("cannot certify a positive distance between z and the projected set (delta = " +
                                 std::to_string(delta) + ")");
    }
    const double diam = diameter(set);

    SweepResult result;
    result.target = delta;
    result.certification = "exact";
    double previous = std::numeric_limits<double>::quiet_NaN();
    for (const std::size_t d : d_range) {
        SweepEntry e;
        e.d = d;
        e.n = n;
        e.reference = growth_lower_bound(delta, diam, d);
        try {
            e.value = fit(mu, d, n, options).cd_polynomial(z);
            e.pass = e.value >= e.reference;
            if (!std::isnan(previous) && e.value < previous * (1.0 - kSweepSlack)) {
                ++result.monotone_violations;
                e.pass = false;
            }
            previous = e.value;
        } catch (const Error& err) {
            e.error = err.what();
        }
        result.entries.push_back(std::move(e));
    }
    return result;
}

}  // namespace cdk

#endif
