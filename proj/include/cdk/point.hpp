#ifndef CDK_POINT_HPP
#define CDK_POINT_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cdk/errors.hpp"

namespace cdk {

/// A point of the Hilbert space, stored as its finitely many coefficients
/// c_k = <x, e_k> for k = 1..N. Every coefficient beyond N is zero.
class HPoint {
public:
    HPoint() = default;

    explicit HPoint(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) { validate(); }

    HPoint(std::initializer_list<double> coeffs) : coeffs_(coeffs) { validate(); }

    /// Number of stored coefficients N.
    std::size_t truncation() const noexcept { return coeffs_.size(); }

    /// Coefficient <x, e_k> for a 1-based coordinate k; zero beyond the truncation.
    double coefficient(std::size_t k) const noexcept {
        return (k >= 1 && k <= coeffs_.size()) ? coeffs_[k - 1] : 0.0;
    }

    std::span<const double> coefficients() const noexcept { return coeffs_; }

    /// Exact equality of the represented element (trailing zeros are ignored).
    friend bool operator==(const HPoint& a, const HPoint& b) noexcept {
        const std::size_t len = std::max(a.truncation(), b.truncation());
        for (std::size_t k = 1; k <= len; ++k) {
            if (a.coefficient(k) != b.coefficient(k)) return false;
        }
        return true;
    }

private:
    void validate() const {
        for (std::size_t i = 0; i < coeffs_.size(); ++i) {
            if (!std::isfinite(coeffs_[i])) {
                throw InvalidArgument("HPoint coefficient " + std::to_string(i + 1) + " is not finite");
            }
        }
    }

    std::vector<double> coeffs_;
};

}  // namespace cdk

#endif
