#ifndef CDK_MEASURES_HPP
#define CDK_MEASURES_HPP

#include <cmath>
#include <cstddef>
#include <cstdio>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "cdk/errors.hpp"
#include "cdk/multiindex.hpp"
#include "cdk/overloaded.hpp"
#include "cdk/parallel.hpp"
#include "cdk/point.hpp"

namespace cdk {

/// Tolerance on |sum of weights - 1| for probability measures.
inline constexpr double kWeightSumTolerance = 1e-12;

class Measure;

/// Weighted point cloud sum_i w_i delta_{x_i}.
struct Empirical {
    std::vector<HPoint> points;
    std::vector<double> weights;
};

/// Closed-form coordinate moment rules for product measures.
enum class CoordinateRule {
    /// uniform on [-1/k, 1/k]
    CubeUniform,
    /// centered Gaussian with variance k^{-decay}; not compactly supported
    Gaussian,
};

/// Product of independent coordinate laws. Coordinates past n_trunc have no
/// rule (n_trunc = 0 means every coordinate is defined).
struct ProductAnalytic {
    CoordinateRule rule = CoordinateRule::CubeUniform;
    double decay = 2.0;
    std::size_t n_trunc = 0;
};

struct Mixture {
    std::vector<double> weights;
    std::vector<Measure> components;
};

/// Probability measure on H with a moment oracle.
class Measure {
public:
    using Variant = std::variant<Empirical, ProductAnalytic, Mixture>;

    /// Uniform weights 1/N when `weights` is empty.
    static Measure empirical(std::vector<HPoint> points, std::vector<double> weights = {}) {
        if (points.empty()) throw InvalidArgument("empirical measure needs at least one point");
        if (weights.empty()) {
            weights.assign(points.size(), 1.0 / static_cast<double>(points.size()));
        } else {
            if (weights.size() != points.size()) throw InvalidArgument("empirical weights and points differ in length");
            check_weights(weights);
        }
        return Measure(Empirical{std::move(points), std::move(weights)});
    }

    static Measure dirac(HPoint z) { return empirical({std::move(z)}); }

    static Measure cube_uniform(std::size_t n_trunc = 0) {
        return Measure(ProductAnalytic{CoordinateRule::CubeUniform, 0.0, n_trunc});
    }

    static Measure gaussian(double decay, std::size_t n_trunc = 0) {
        if (!(decay > 1.0)) throw InvalidArgument("gaussian coordinate variances k^-s need s > 1");
        return Measure(ProductAnalytic{CoordinateRule::Gaussian, decay, n_trunc});
    }

    static Measure mixture(std::vector<double> weights, std::vector<Measure> components) {
        if (components.empty()) throw InvalidArgument("mixture needs at least one component");
        if (weights.size() != components.size()) throw InvalidArgument("mixture weights and components differ in length");
        check_weights(weights);
        return Measure(Mixture{std::move(weights), std::move(components)});
    }

    const Variant& variant() const noexcept { return value_; }

private:
    explicit Measure(Variant v) : value_(std::move(v)) {}

    static void check_weights(std::span<const double> weights) {
        double total = 0.0;
        for (double w : weights) {
            if (!(w > 0.0) || !std::isfinite(w)) throw InvalidArgument("measure weights must be positive");
            total += w;
        }
        if (std::abs(total - 1.0) > kWeightSumTolerance) {
            throw InvalidArgument("measure weights sum to " + std::to_string(total) + ", not 1");
        }
    }

    Variant value_;
};

namespace detail {

inline double coordinate_moment(const ProductAnalytic& m, std::size_t k, unsigned j) {
    if (m.n_trunc != 0 && k > m.n_trunc) {
        throw UndefinedMomentError("no moment rule for coordinate " + std::to_string(k) + " (measure defined up to " +
                                   std::to_string(m.n_trunc) + ")");
    }
    if (j % 2 == 1) return 0.0;
    switch (m.rule) {
        case CoordinateRule::CubeUniform:
            return std::pow(1.0 / static_cast<double>(k), j) / static_cast<double>(j + 1);
        case CoordinateRule::Gaussian: {
            const double variance = std::pow(static_cast<double>(k), -m.decay);
            double dfact = 1.0;  // (j-1)!!
            for (unsigned i = j - 1; i >= 1 && i < j; i -= 2) dfact *= i;
            return std::pow(variance, j / 2) * dfact;
        }
    }
    return 0.0;
}

}  // namespace detail

/// int x^a dmu(x)
inline double moment(const Measure& mu, const MultiIndex& a) {
    return std::visit(
        overloaded{
            [&](const Empirical& e) {
                std::vector<double> terms(e.points.size());
                for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = e.weights[i] * monomial_eval(a, e.points[i]);
                return pairwise_sum<double>(terms);
            },
            [&](const ProductAnalytic& p) {
                double v = 1.0;
                for (const auto& entry : a.entries()) v *= detail::coordinate_moment(p, entry.coordinate, entry.exponent);
                return v;
            },
            [&](const Mixture& m) {
                double v = 0.0;
                for (std::size_t j = 0; j < m.components.size(); ++j) v += m.weights[j] * moment(m.components[j], a);
                return v;
            },
        },
        mu.variant());
}

/// mu({z}), the mass of the discrete part at z.
inline double atom_mass(const Measure& mu, const HPoint& z) {
    return std::visit(overloaded{
                          [&](const Empirical& e) {
                              double w = 0.0;
                              for (std::size_t i = 0; i < e.points.size(); ++i) {
                                  if (e.points[i] == z) w += e.weights[i];
                              }
                              return w;
                          },
                          [](const ProductAnalytic&) { return 0.0; },
                          [&](const Mixture& m) {
                              double w = 0.0;
                              for (std::size_t j = 0; j < m.components.size(); ++j) {
                                  w += m.weights[j] * atom_mass(m.components[j], z);
                              }
                              return w;
                          },
                      },
                      mu.variant());
}

/// Largest coefficient count of an empirical support point (0 when no
/// empirical part is present).
inline std::size_t data_truncation(const Measure& mu) {
    return std::visit(overloaded{
                          [](const Empirical& e) {
                              std::size_t t = 0;
                              for (const HPoint& x : e.points) t = std::max(t, x.truncation());
                              return t;
                          },
                          [](const ProductAnalytic&) { return std::size_t{0}; },
                          [](const Mixture& m) {
                              std::size_t t = 0;
                              for (const Measure& c : m.components) t = std::max(t, data_truncation(c));
                              return t;
                          },
                      },
                      mu.variant());
}

/// One-line human-readable description, recorded as provenance.
inline std::string describe(const Measure& mu) {
    return std::visit(overloaded{
                          [](const Empirical& e) {
                              std::size_t t = 0;
                              for (const HPoint& x : e.points) t = std::max(t, x.truncation());
                              return "empirical(points=" + std::to_string(e.points.size()) +
                                     ",truncation=" + std::to_string(t) + ")";
                          },
                          [](const ProductAnalytic& p) {
                              std::string s = p.rule == CoordinateRule::CubeUniform ? "cube_uniform(" : "gaussian(";
                              if (p.rule == CoordinateRule::Gaussian) {
                                  char buf[32];
                                  std::snprintf(buf, sizeof buf, "decay=%.17g,", p.decay);
                                  s += buf;
                              }
                              return s + "n_trunc=" + std::to_string(p.n_trunc) + ")";
                          },
                          [](const Mixture& m) {
                              std::string s = "mixture(";
                              for (std::size_t j = 0; j < m.components.size(); ++j) {
                                  char buf[32];
                                  std::snprintf(buf, sizeof buf, "%.17g*", m.weights[j]);
                                  if (j) s += ';';
                                  s += buf + describe(m.components[j]);
                              }
                              return s + ")";
                          },
                      },
                      mu.variant());
}

/// sum_a p_a * moment(mu, a) over the basis.
inline double integrate_poly(const Measure& mu, std::span<const double> coeffs, const BasisIndex& basis) {
    if (coeffs.size() != basis.size()) throw InvalidArgument("coefficient vector does not match the basis size");
    std::vector<double> terms(coeffs.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i) terms[i] = coeffs[i] == 0.0 ? 0.0 : coeffs[i] * moment(mu, basis[i]);
    return pairwise_sum<double>(terms);
}

/// int p^2 dmu = sum_{i,j} p_i p_j moment(mu, a_i + a_j).
inline double integrate_sq(const Measure& mu, std::span<const double> coeffs, const BasisIndex& basis) {
    if (coeffs.size() != basis.size()) throw InvalidArgument("coefficient vector does not match the basis size");
    std::unordered_map<MultiIndex, double, MultiIndexHash> cache;
    std::vector<double> terms;
    terms.reserve(coeffs.size() * coeffs.size());
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        if (coeffs[i] == 0.0) continue;
        for (std::size_t j = 0; j < coeffs.size(); ++j) {
            if (coeffs[j] == 0.0) continue;
            const MultiIndex sum = basis[i] + basis[j];
            auto it = cache.find(sum);
            if (it == cache.end()) it = cache.emplace(sum, moment(mu, sum)).first;
            terms.push_back(coeffs[i] * coeffs[j] * it->second);
        }
    }
    return pairwise_sum<double>(terms);
}

}  // namespace cdk

#endif
