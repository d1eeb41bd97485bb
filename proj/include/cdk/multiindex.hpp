#ifndef CDK_MULTIINDEX_HPP
#define CDK_MULTIINDEX_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cdk/errors.hpp"
#include "cdk/point.hpp"

namespace cdk {

/// Finitely supported exponent sequence a = (a_1, a_2, ...) addressing the
/// monomial x^a = prod_k <x, e_k>^{a_k}.
///
/// Stored sparse: strictly increasing coordinates (1-based), strictly
/// positive exponents.
class MultiIndex {
public:
    struct Entry {
        std::uint32_t coordinate;
        std::uint32_t exponent;
        friend bool operator==(const Entry&, const Entry&) = default;
        friend auto operator<=>(const Entry&, const Entry&) = default;
    };

    MultiIndex() = default;

    /// Dense form: the i-th value (0-based) is the exponent of coordinate i+1.
    MultiIndex(std::initializer_list<unsigned> dense) : MultiIndex(from_dense(std::vector<unsigned>(dense))) {}

    static MultiIndex from_dense(std::span<const unsigned> dense) {
        MultiIndex a;
        for (std::size_t i = 0; i < dense.size(); ++i) {
            if (dense[i] != 0) a.push_back(static_cast<std::uint32_t>(i + 1), dense[i]);
        }
        return a;
    }

    /// Builds from arbitrary (coordinate, exponent) pairs: sorts, merges
    /// repeated coordinates and drops zero exponents.
    static MultiIndex from_entries(std::vector<Entry> entries) {
        std::sort(entries.begin(), entries.end(),
                  [](const Entry& l, const Entry& r) { return l.coordinate < r.coordinate; });
        MultiIndex a;
        for (const Entry& e : entries) {
            if (e.coordinate == 0) throw InvalidArgument("multi-index coordinates are 1-based");
            if (e.exponent == 0) continue;
            if (!a.entries_.empty() && a.entries_.back().coordinate == e.coordinate) {
                a.entries_.back().exponent += e.exponent;
                a.degree_ += e.exponent;
            } else {
                a.push_back(e.coordinate, e.exponent);
            }
        }
        return a;
    }

    std::span<const Entry> entries() const noexcept { return entries_; }
    bool is_zero() const noexcept { return entries_.empty(); }

    unsigned exponent(std::size_t coordinate) const noexcept {
        for (const Entry& e : entries_) {
            if (e.coordinate == coordinate) return e.exponent;
            if (e.coordinate > coordinate) break;
        }
        return 0;
    }

    /// Sum of exponents.
    std::size_t algebraic_degree() const noexcept { return degree_; }

    /// Largest active coordinate; 0 for the zero index.
    std::size_t harmonic_degree() const noexcept { return entries_.empty() ? 0 : entries_.back().coordinate; }

    friend bool operator==(const MultiIndex& a, const MultiIndex& b) noexcept { return a.entries_ == b.entries_; }

    friend MultiIndex operator+(const MultiIndex& a, const MultiIndex& b) {
        MultiIndex out;
        out.entries_.reserve(a.entries_.size() + b.entries_.size());
        auto i = a.entries_.begin();
        auto j = b.entries_.begin();
        while (i != a.entries_.end() || j != b.entries_.end()) {
            if (j == b.entries_.end() || (i != a.entries_.end() && i->coordinate < j->coordinate)) {
                out.push_back(i->coordinate, i->exponent);
                ++i;
            } else if (i == a.entries_.end() || j->coordinate < i->coordinate) {
                out.push_back(j->coordinate, j->exponent);
                ++j;
            } else {
                out.push_back(i->coordinate, i->exponent + j->exponent);
                ++i;
                ++j;
            }
        }
        return out;
    }

    std::size_t hash() const noexcept {
        std::size_t h = 0x9e3779b97f4a7c15ULL;
        for (const Entry& e : entries_) {
            const std::uint64_t v = (std::uint64_t{e.coordinate} << 32) | e.exponent;
            h ^= std::hash<std::uint64_t>{}(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return h;
    }

private:
    void push_back(std::uint32_t coordinate, std::uint32_t exponent) {
        entries_.push_back({coordinate, exponent});
        degree_ += exponent;
    }

    std::vector<Entry> entries_;
    std::size_t degree_ = 0;
};

struct MultiIndexHash {
    std::size_t operator()(const MultiIndex& a) const noexcept { return a.hash(); }
};

inline std::size_t algebraic_degree(const MultiIndex& a) noexcept { return a.algebraic_degree(); }
inline std::size_t harmonic_degree(const MultiIndex& a) noexcept { return a.harmonic_degree(); }
inline MultiIndex add_indices(const MultiIndex& a, const MultiIndex& b) { return a + b; }

/// x^a. Coordinates beyond the truncation of x contribute a zero factor;
/// overflow propagates as +-inf.
inline double monomial_eval(const MultiIndex& a, const HPoint& x) noexcept {
    double value = 1.0;
    for (const auto& e : a.entries()) {
        const double c = x.coefficient(e.coordinate);
        if (c == 0.0) return 0.0;
        double p = 1.0;
        for (std::uint32_t i = 0; i < e.exponent; ++i) p *= c;
        value *= p;
    }
    return value;
}

/// Renders as "x1^3*x2"; the zero index renders as "1".
inline std::string to_string(const MultiIndex& a) {
    if (a.is_zero()) return "1";
    std::string out;
    for (const auto& e : a.entries()) {
        if (!out.empty()) out += '*';
        out += 'x';
        out += std::to_string(e.coordinate);
        if (e.exponent != 1) {
            out += '^';
            out += std::to_string(e.exponent);
        }
    }
    return out;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::uint32_t parse_positive(std::string_view s, std::string_view whole) {
    std::uint32_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || v == 0) {
        throw ParseError("bad multi-index term in '" + std::string(whole) + "'");
    }
    return v;
}

}  // namespace detail

/// Inverse of to_string. Accepts repeated factors ("x1*x1" == "x1^2").
inline MultiIndex parse_multi_index(std::string_view text) {
    const std::string_view s = detail::trim(text);
    if (s == "1") return {};
    if (s.empty()) throw ParseError("empty multi-index");
    std::vector<MultiIndex::Entry> entries;
    std::size_t start = 0;
    while (start <= s.size()) {
        std::size_t stop = s.find('*', start);
        if (stop == std::string_view::npos) stop = s.size();
        const std::string_view term = detail::trim(s.substr(start, stop - start));
        if (term.size() < 2 || term.front() != 'x') throw ParseError("bad multi-index term in '" + std::string(s) + "'");
        const std::size_t caret = term.find('^');
        const std::uint32_t coordinate = detail::parse_positive(term.substr(1, caret == std::string_view::npos ? std::string_view::npos : caret - 1), s);
        const std::uint32_t exponent = caret == std::string_view::npos ? 1 : detail::parse_positive(term.substr(caret + 1), s);
        entries.push_back({coordinate, exponent});
        start = stop + 1;
    }
    return MultiIndex::from_entries(std::move(entries));
}

inline constexpr std::size_t kDefaultMaxBasisSize = 100000;

/// C(n+d, n), saturating at SIZE_MAX.
inline std::size_t basis_dimension(std::size_t d, std::size_t n) noexcept {
    const std::size_t k = std::min(d, n);
    const std::size_t top = d + n;
    unsigned __int128 c = 1;
    for (std::size_t i = 1; i <= k; ++i) {
        c = c * (top - k + i) / i;
        if (c > SIZE_MAX) return SIZE_MAX;
    }
    return static_cast<std::size_t>(c);
}

/// Ordered monomial basis of P_{d,n}: every multi-index with algebraic degree
/// at most d supported on coordinates 1..n.
///
/// Ordering is graded (by algebraic degree), then descending lexicographic on
/// the dense exponent vector (a_1, ..., a_n) within a grade. For fixed n the
/// basis of degree d is a prefix of the basis of any degree d' >= d.
class BasisIndex {
public:
    BasisIndex(std::size_t d, std::size_t n, std::size_t max_size = kDefaultMaxBasisSize) : d_(d), n_(n) {
        const std::size_t dim = basis_dimension(d, n);
        if (dim > max_size) {
            throw CapacityError("basis of P_{" + std::to_string(d) + "," + std::to_string(n) + "} has " +
                                (dim == SIZE_MAX ? std::string("overflowing") : std::to_string(dim)) +
                                " elements, above the limit " + std::to_string(max_size));
        }
        elements_.reserve(dim);
        std::vector<unsigned> dense(n, 0);
        for (std::size_t grade = 0; grade <= d; ++grade) fill_grade(dense, 0, grade);
        positions_.reserve(dim);
        for (std::size_t i = 0; i < elements_.size(); ++i) positions_.emplace(elements_[i], i);
    }

    std::size_t max_degree() const noexcept { return d_; }
    std::size_t max_harmonic() const noexcept { return n_; }
    std::size_t size() const noexcept { return elements_.size(); }

    const MultiIndex& operator[](std::size_t i) const { return elements_.at(i); }
    std::span<const MultiIndex> elements() const noexcept { return elements_; }
    auto begin() const noexcept { return elements_.begin(); }
    auto end() const noexcept { return elements_.end(); }

    /// Ordinal of a, or size() when a is not in the basis.
    std::size_t position(const MultiIndex& a) const {
        const auto it = positions_.find(a);
        return it == positions_.end() ? elements_.size() : it->second;
    }

    bool contains(const MultiIndex& a) const { return positions_.count(a) != 0; }

    /// b(x): every basis monomial evaluated at x, in basis order.
    void evaluate(const HPoint& x, std::span<double> out) const {
        if (out.size() != elements_.size()) throw InvalidArgument("basis evaluation buffer has the wrong size");
        // powers[(k-1)*(d+1) + e] = c_k^e
        std::vector<double> powers(n_ * (d_ + 1));
        for (std::size_t k = 1; k <= n_; ++k) {
            const double c = x.coefficient(k);
            double p = 1.0;
            for (std::size_t e = 0; e <= d_; ++e) {
                powers[(k - 1) * (d_ + 1) + e] = p;
                p *= c;
            }
        }
        for (std::size_t i = 0; i < elements_.size(); ++i) {
            double v = 1.0;
            for (const auto& e : elements_[i].entries()) v *= powers[(e.coordinate - 1) * (d_ + 1) + e.exponent];
            out[i] = v;
        }
    }

    std::vector<double> evaluate(const HPoint& x) const {
        std::vector<double> out(elements_.size());
        evaluate(x, out);
        return out;
    }

private:
    void fill_grade(std::vector<unsigned>& dense, std::size_t k, std::size_t remaining) {
        if (k + 1 >= n_) {
            if (n_ == 0) {
                if (remaining == 0) elements_.emplace_back();
                return;
            }
            dense[k] = static_cast<unsigned>(remaining);
            elements_.push_back(MultiIndex::from_dense(dense));
            dense[k] = 0;
            return;
        }
        for (std::size_t e = remaining + 1; e-- > 0;) {
            dense[k] = static_cast<unsigned>(e);
            fill_grade(dense, k + 1, remaining - e);
        }
        dense[k] = 0;
    }

    std::size_t d_;
    std::size_t n_;
    std::vector<MultiIndex> elements_;
    std::unordered_map<MultiIndex, std::size_t, MultiIndexHash> positions_;
};

inline BasisIndex enumerate_basis(std::size_t d, std::size_t n, std::size_t max_size = kDefaultMaxBasisSize) {
    return BasisIndex(d, n, max_size);
}

}  // namespace cdk

#endif
