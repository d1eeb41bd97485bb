#ifndef CDK_HILBERT_HPP
#define CDK_HILBERT_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "cdk/errors.hpp"
#include "cdk/overloaded.hpp"
#include "cdk/point.hpp"

namespace cdk {

/// pi_n(x): keeps the first n coefficients.
inline HPoint project(const HPoint& x, std::size_t n) {
    const auto c = x.coefficients();
    return HPoint(std::vector<double>(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(std::min(n, c.size()))));
}

inline double inner(const HPoint& x, const HPoint& y) noexcept {
    const std::size_t len = std::min(x.truncation(), y.truncation());
    double s = 0.0;
    for (std::size_t k = 1; k <= len; ++k) s += x.coefficient(k) * y.coefficient(k);
    return s;
}

inline double norm_sq(const HPoint& x) noexcept { return inner(x, x); }

/// |x|^2 - |pi_n(x)|^2, summed directly over the coefficients past n.
inline double tail_energy(const HPoint& x, std::size_t n) noexcept {
    double s = 0.0;
    for (std::size_t k = n + 1; k <= x.truncation(); ++k) s += x.coefficient(k) * x.coefficient(k);
    return s;
}

/// Coordinate-wise x - y with zero extension.
inline HPoint subtract(const HPoint& x, const HPoint& y) {
    std::vector<double> out(std::max(x.truncation(), y.truncation()));
    for (std::size_t k = 1; k <= out.size(); ++k) out[k - 1] = x.coefficient(k) - y.coefficient(k);
    return HPoint(std::move(out));
}

/// |pi_n(x - y)|^2
inline double projected_distance_sq(const HPoint& x, const HPoint& y, std::size_t n) noexcept {
    double s = 0.0;
    const std::size_t len = std::min(n, std::max(x.truncation(), y.truncation()));
    for (std::size_t k = 1; k <= len; ++k) {
        const double t = x.coefficient(k) - y.coefficient(k);
        s += t * t;
    }
    return s;
}

// ---------------------------------------------------------------------------
// Compact sets

/// p_k = k^m.
struct PowerWeights {
    double m = 1.0;
};

/// Explicit weights p_1..p_L; coordinates past L are outside the rule.
struct TableWeights {
    std::vector<double> values;
};

/// { x : sum_k p_k <x,e_k>^2 <= 1 } with positive, strictly increasing p_k.
class Ellipsoid {
public:
    using Rule = std::variant<PowerWeights, TableWeights>;

    explicit Ellipsoid(Rule rule = PowerWeights{}) : rule_(std::move(rule)) {
        if (const auto* pw = std::get_if<PowerWeights>(&rule_)) {
            if (!(pw->m > 0.0) || !std::isfinite(pw->m)) throw InvalidArgument("ellipsoid power weights need m > 0");
        } else {
            const auto& v = std::get<TableWeights>(rule_).values;
            if (v.empty()) throw InvalidArgument("ellipsoid weight table is empty");
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (!(v[i] > 0.0) || !std::isfinite(v[i])) throw InvalidArgument("ellipsoid weights must be positive");
                if (i > 0 && !(v[i] > v[i - 1])) throw InvalidArgument("ellipsoid weights must be strictly increasing");
            }
        }
    }

    const Rule& rule() const noexcept { return rule_; }

    /// Largest coordinate with a defined weight (SIZE_MAX for a closed-form rule).
    std::size_t defined_length() const noexcept {
        if (const auto* t = std::get_if<TableWeights>(&rule_)) return t->values.size();
        return SIZE_MAX;
    }

    double weight(std::size_t k) const {
        if (const auto* pw = std::get_if<PowerWeights>(&rule_)) return std::pow(static_cast<double>(k), pw->m);
        const auto& v = std::get<TableWeights>(rule_).values;
        if (k == 0 || k > v.size()) {
            throw InvalidArgument("ellipsoid weight p_" + std::to_string(k) + " is outside the weight table");
        }
        return v[k - 1];
    }

private:
    Rule rule_;
};

/// { x : |<x,e_k>| <= 1/k for all k }
struct HilbertCube {};

/// { x : |x - center| <= radius }
class Ball {
public:
    Ball(HPoint center, double radius) : center_(std::move(center)), radius_(radius) {
        if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidArgument("ball radius must be positive");
    }

    const HPoint& center() const noexcept { return center_; }
    double radius() const noexcept { return radius_; }

private:
    HPoint center_;
    double radius_;
};

using CompactSet = std::variant<Ellipsoid, HilbertCube, Ball>;

/// Relative slack for boundary points in membership tests.
inline constexpr double kMembershipSlack = 1e-12;

inline bool contains(const CompactSet& set, const HPoint& x) {
    return std::visit(
        overloaded{
            [&](const Ellipsoid& e) {
                if (x.truncation() > e.defined_length()) {
                    for (std::size_t k = e.defined_length() + 1; k <= x.truncation(); ++k) {
                        if (x.coefficient(k) != 0.0) return false;
                    }
                }
                double s = 0.0;
                for (std::size_t k = 1; k <= std::min(x.truncation(), e.defined_length()); ++k) {
                    s += e.weight(k) * x.coefficient(k) * x.coefficient(k);
                }
                return s <= 1.0 + kMembershipSlack;
            },
            [&](const HilbertCube&) {
                for (std::size_t k = 1; k <= x.truncation(); ++k) {
                    if (std::abs(x.coefficient(k)) > (1.0 + kMembershipSlack) / static_cast<double>(k)) return false;
                }
                return true;
            },
            [&](const Ball& b) {
                return projected_distance_sq(x, b.center(), SIZE_MAX) <=
                       b.radius() * b.radius() * (1.0 + kMembershipSlack);
            },
        },
        set);
}

/// Upper bound on sup_{x in X} |x|^2 - |pi_n(x)|^2.
///
///  - Hilbert cube: sum_{k>n} 1/k^2 <= 1/n (n >= 1), pi^2/6 at n = 0.
///  - Ellipsoid with increasing weights: the tail satisfies
///    p_{n+1} * sum_{k>n} c_k^2 <= sum_{k>n} p_k c_k^2 <= 1, so 1/p_{n+1};
///    only available for the closed-form power rule.
///  - Ball: (|tail of the center| + radius)^2.
inline double tail_bound(const CompactSet& set, std::size_t n) {
    return std::visit(
        overloaded{
            [&](const Ellipsoid& e) {
                if (!std::holds_alternative<PowerWeights>(e.rule())) {
                    throw NoAnalyticBoundError("no analytic tail bound for a tabulated ellipsoid weight rule");
                }
                return 1.0 / e.weight(n + 1);
            },
            [&](const HilbertCube&) {
                return n == 0 ? std::numbers::pi * std::numbers::pi / 6.0 : 1.0 / static_cast<double>(n);
            },
            [&](const Ball& b) {
                const double t = std::sqrt(tail_energy(b.center(), n)) + b.radius();
                return t * t;
            },
        },
        set);
}

inline double diameter(const CompactSet& set) {
    return std::visit(overloaded{
                          [](const Ellipsoid& e) { return 2.0 / std::sqrt(e.weight(1)); },
                          [](const HilbertCube&) { return 2.0 * std::numbers::pi / std::sqrt(6.0); },
                          [](const Ball& b) { return 2.0 * b.radius(); },
                      },
                      set);
}

/// Lower bound on min_{x in X} |pi_n(x - z)|, exact up to rounding.
///
/// The projection of each set is explicit: a ball of the same radius, a box,
/// or the n-dimensional ellipsoid. For the ellipsoid the Lagrangian dual value
/// at a bisected multiplier is returned, which never exceeds the true distance.
inline double projected_distance(const CompactSet& set, const HPoint& z, std::size_t n) {
    return std::visit(
        overloaded{
            [&](const Ellipsoid& e) {
                if (n > e.defined_length()) throw InvalidArgument("projection order exceeds the ellipsoid weight table");
                std::vector<double> p(n), c(n);
                double level = 0.0;
                for (std::size_t k = 1; k <= n; ++k) {
                    p[k - 1] = e.weight(k);
                    c[k - 1] = z.coefficient(k);
                    level += p[k - 1] * c[k - 1] * c[k - 1];
                }
                if (level <= 1.0) return 0.0;
                auto constraint = [&](double lambda) {
                    double s = 0.0;
                    for (std::size_t k = 0; k < n; ++k) {
                        const double y = c[k] / (1.0 + lambda * p[k]);
                        s += p[k] * y * y;
                    }
                    return s;
                };
                double lo = 0.0;
                double hi = 1.0;
                while (constraint(hi) > 1.0) hi *= 2.0;
                for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    (constraint(mid) > 1.0 ? lo : hi) = mid;
                }
                // dual value g(lambda) = sum c_k^2 lambda p_k / (1 + lambda p_k) - lambda
                const double lambda = 0.5 * (lo + hi);
                double dual = -lambda;
                for (std::size_t k = 0; k < n; ++k) dual += c[k] * c[k] * lambda * p[k] / (1.0 + lambda * p[k]);
                return std::sqrt(std::max(dual, 0.0));
            },
            [&](const HilbertCube&) {
                double s = 0.0;
                for (std::size_t k = 1; k <= n; ++k) {
                    const double gap = std::max(std::abs(z.coefficient(k)) - 1.0 / static_cast<double>(k), 0.0);
                    s += gap * gap;
                }
                return std::sqrt(s);
            },
            [&](const Ball& b) { return std::max(std::sqrt(projected_distance_sq(b.center(), z, n)) - b.radius(), 0.0); },
        },
        set);
}

/// Seeded points of X with truncation n_trunc.
///
/// Ellipsoid: Gaussian direction scaled by 1/sqrt(p_k), normalized to the
/// boundary and shrunk by sqrt(u). Cube: independent uniforms on [-1/k, 1/k].
/// Ball: uniform in the n_trunc-dimensional section through the center.
/// Membership is guaranteed; uniformity on X is not.
inline std::vector<HPoint> sample(const CompactSet& set, std::size_t n_trunc, std::size_t count, std::uint64_t seed) {
    if (n_trunc == 0) throw InvalidArgument("sample needs n_trunc >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<HPoint> out;
    out.reserve(count);

    std::visit(overloaded{
                   [&](const Ellipsoid& e) {
                       if (n_trunc > e.defined_length()) throw InvalidArgument("n_trunc exceeds the ellipsoid weight table");
                       std::vector<double> inv_sqrt_p(n_trunc);
                       for (std::size_t k = 1; k <= n_trunc; ++k) inv_sqrt_p[k - 1] = 1.0 / std::sqrt(e.weight(k));
                       for (std::size_t i = 0; i < count; ++i) {
                           std::vector<double> c(n_trunc);
                           double g2 = 0.0;
                           for (std::size_t k = 0; k < n_trunc; ++k) {
                               const double g = gauss(rng);
                               g2 += g * g;
                               c[k] = g * inv_sqrt_p[k];
                           }
                           const double scale = g2 > 0.0 ? std::sqrt(unit(rng) / g2) : 0.0;
                           for (double& v : c) v *= scale;
                           out.emplace_back(std::move(c));
                       }
                   },
                   [&](const HilbertCube&) {
                       for (std::size_t i = 0; i < count; ++i) {
                           std::vector<double> c(n_trunc);
                           for (std::size_t k = 1; k <= n_trunc; ++k) {
                               c[k - 1] = (2.0 * unit(rng) - 1.0) / static_cast<double>(k);
                           }
                           out.emplace_back(std::move(c));
                       }
                   },
                   [&](const Ball& b) {
                       if (b.center().truncation() > n_trunc) {
                           throw InvalidArgument("ball center has more coefficients than n_trunc");
                       }
                       for (std::size_t i = 0; i < count; ++i) {
                           std::vector<double> c(n_trunc);
                           double g2 = 0.0;
                           for (double& v : c) {
                               v = gauss(rng);
                               g2 += v * v;
                           }
                           const double r = b.radius() * std::pow(unit(rng), 1.0 / static_cast<double>(n_trunc));
                           const double scale = g2 > 0.0 ? r / std::sqrt(g2) : 0.0;
                           for (std::size_t k = 1; k <= n_trunc; ++k) c[k - 1] = b.center().coefficient(k) + scale * c[k - 1];
                           out.emplace_back(std::move(c));
                       }
                   },
               },
               set);
    return out;
}

}  // namespace cdk

#endif
