#ifndef CDK_IO_HPP
#define CDK_IO_HPP

#include <Eigen/Dense>
#include <cerrno>
#include <charconv>
#include <limits>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cdk/asymptotics.hpp"
#include "cdk/cdkernel.hpp"
#include "cdk/errors.hpp"
#include "cdk/moments.hpp"
#include "cdk/point.hpp"
#include "json.hpp"

namespace cdk::io {

/// 17 significant digits: parses back to the same double.
inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_double(std::string_view token) {
    const std::string s(detail::trim(token));
    if (s.empty()) throw ParseError("empty numeric field");
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    // ERANGE on underflow still yields the correctly rounded subnormal
    if (end != s.c_str() + s.size() || (errno == ERANGE && std::isinf(v))) {
        throw ParseError("bad number '" + s + "'");
    }
    return v;
}

namespace detail {

inline bool skip_line(std::string_view line) {
    const std::string_view t = cdk::detail::trim(line);
    return t.empty() || t.front() == '#';
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t stop = s.find(sep, start);
        out.push_back(s.substr(start, stop == std::string_view::npos ? std::string_view::npos : stop - start));
        if (stop == std::string_view::npos) break;
        start = stop + 1;
    }
    return out;
}

inline std::vector<double> parse_row(std::string_view line, char sep) {
    std::vector<double> row;
    for (std::string_view tok : split(line, sep)) {
        if (sep == ' ' && cdk::detail::trim(tok).empty()) continue;
        row.push_back(parse_double(tok));
    }
    return row;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Points

/// One point per line, comma-separated coefficients.
inline std::vector<HPoint> read_points_csv(std::istream& in) {
    std::vector<HPoint> points;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::skip_line(line)) continue;
        try {
            points.emplace_back(detail::parse_row(line, ','));
        } catch (const Error& e) {
            throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return points;
}

/// One JSON array of numbers per line.
inline std::vector<HPoint> read_points_jsonl(std::istream& in) {
    std::vector<HPoint> points;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (detail::skip_line(line)) continue;
        try {
            const nlohmann::json j = nlohmann::json::parse(line);
            if (!j.is_array()) throw ParseError("expected a JSON array");
            std::vector<double> c;
            for (const auto& v : j) {
                if (!v.is_number()) throw ParseError("non-numeric coefficient");
                c.push_back(v.get<double>());
            }
            points.emplace_back(std::move(c));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
        } catch (const Error& e) {
            throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return points;
}

/// Dispatches on the extension: ".jsonl" is JSONL, anything else CSV.
inline std::vector<HPoint> read_points(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open data file '" + path + "'");
    const bool jsonl = path.size() >= 6 && path.compare(path.size() - 6, 6, ".jsonl") == 0;
    return jsonl ? read_points_jsonl(in) : read_points_csv(in);
}

inline void write_points_csv(std::ostream& out, std::span<const HPoint> points) {
    for (const HPoint& x : points) {
        bool first = true;
        for (double c : x.coefficients()) {
            if (!first) out << ',';
            out << format_double(c);
            first = false;
        }
        out << '\n';
    }
}

// ---------------------------------------------------------------------------
// Moment matrix and model files

inline constexpr std::string_view kMatrixMagic = "cdk-moment-matrix 1";
inline constexpr std::string_view kFactorMagic = "cdk-factorization 1";
inline constexpr std::string_view kOrdering = "graded-lex-1";

namespace detail {

inline void write_row(std::ostream& out, const auto& values) {
    for (Eigen::Index j = 0; j < values.size(); ++j) {
        if (j) out << ' ';
        out << format_double(values(j));
    }
    out << '\n';
}

class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    std::string next() {
        std::string line;
        while (std::getline(in_, line)) {
            ++lineno_;
            if (!skip_line(line)) return std::string(cdk::detail::trim(line));
        }
        throw ParseError("unexpected end of file after line " + std::to_string(lineno_));
    }

    void expect(std::string_view literal) {
        const std::string line = next();
        if (line != literal) fail("expected '" + std::string(literal) + "', found '" + line + "'");
    }

    /// "key value..." -> value part
    std::string field(std::string_view key) {
        const std::string line = next();
        if (line.compare(0, key.size(), key) != 0 || (line.size() > key.size() && line[key.size()] != ' ')) {
            fail("expected field '" + std::string(key) + "'");
        }
        return line.size() > key.size() ? line.substr(key.size() + 1) : std::string{};
    }

    std::size_t size_field(std::string_view key) {
        const std::string v = field(key);
        std::size_t out = 0;
        const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        if (ec != std::errc{} || ptr != v.data() + v.size()) fail("bad integer for '" + std::string(key) + "'");
        return out;
    }

    double double_field(std::string_view key) { return parse_double(field(key)); }

    Eigen::RowVectorXd row(std::size_t expected) {
        const std::vector<double> v = parse_row(next(), ' ');
        if (v.size() != expected) fail("expected " + std::to_string(expected) + " values, found " + std::to_string(v.size()));
        return Eigen::Map<const Eigen::RowVectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    }

    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError("line " + std::to_string(lineno_) + ": " + what);
    }

private:
    std::istream& in_;
    std::size_t lineno_ = 0;
};

inline MomentMatrix read_moment_matrix(LineReader& r) {
    r.expect(kMatrixMagic);
    if (r.field("ordering") != kOrdering) r.fail("unsupported basis ordering");
    const std::size_t d = r.size_field("d");
    const std::size_t n = r.size_field("n");
    const std::size_t dim = r.size_field("dim");
    const std::size_t truncation = r.size_field("truncation");
    std::string measure = r.field("measure");
    BasisIndex basis(d, n, SIZE_MAX);
    if (basis.size() != dim) r.fail("dim does not equal C(n+d, n)");
    r.expect("matrix");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i) m.row(static_cast<Eigen::Index>(i)) = r.row(dim);
    return MomentMatrix(std::move(basis), std::move(m), std::move(measure), truncation);
}

}  // namespace detail

/// Header (format version, ordering, d, n, dim, data truncation, measure
/// description) followed by the row-major matrix at 17 significant digits.
inline void write_moment_matrix(std::ostream& out, const MomentMatrix& mm) {
    out << kMatrixMagic << '\n'
        << "ordering " << kOrdering << '\n'
        << "d " << mm.degree() << '\n'
        << "n " << mm.harmonic() << '\n'
        << "dim " << mm.size() << '\n'
        << "truncation " << mm.data_truncation() << '\n'
        << "measure " << mm.measure_description() << '\n'
        << "matrix\n";
    for (Eigen::Index i = 0; i < mm.matrix().rows(); ++i) detail::write_row(out, mm.matrix().row(i));
}

inline MomentMatrix read_moment_matrix(std::istream& in) {
    detail::LineReader r(in);
    return detail::read_moment_matrix(r);
}

/// Moment matrix block followed by the factorization block.
inline void write_model(std::ostream& out, const CDModel& model) {
    write_moment_matrix(out, model.moment_matrix());
    const SpectralFactorization& f = model.factorization();
    out << kFactorMagic << '\n'
        << "mode " << (model.mode() == InverseMode::Full ? "full" : "pseudo") << '\n'
        << "ridge " << format_double(f.ridge) << '\n'
        << "rank_tol " << format_double(f.rank_tolerance) << '\n'
        << "rank " << f.rank << '\n'
        << "eigenvalues\n";
    detail::write_row(out, f.eigenvalues.transpose());
    out << "eigenvectors\n";
    for (Eigen::Index i = 0; i < f.eigenvectors.rows(); ++i) detail::write_row(out, f.eigenvectors.row(i));
    out << "end\n";
}

inline CDModel read_model(std::istream& in) {
    detail::LineReader r(in);
    MomentMatrix mm = detail::read_moment_matrix(r);
    const std::size_t dim = mm.size();
    r.expect(kFactorMagic);
    const std::string mode = r.field("mode");
    if (mode != "full" && mode != "pseudo") r.fail("mode must be 'full' or 'pseudo'");
    SpectralFactorization f;
    f.ridge = r.double_field("ridge");
    f.rank_tolerance = r.double_field("rank_tol");
    f.rank = r.size_field("rank");
    if (f.rank > dim) r.fail("rank exceeds the dimension");
    r.expect("eigenvalues");
    f.eigenvalues = r.row(dim).transpose();
    r.expect("eigenvectors");
    f.eigenvectors.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t i = 0; i < dim; ++i) f.eigenvectors.row(static_cast<Eigen::Index>(i)) = r.row(dim);
    r.expect("end");
    return CDModel(std::move(mm), std::move(f), mode == "full" ? InverseMode::Full : InverseMode::Pseudo);
}

inline CDModel read_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open model file '" + path + "'");
    return read_model(in);
}

// ---------------------------------------------------------------------------
// CSV outputs

/// index,cd_polynomial,christoffel. The Christoffel column is "inf" where the
/// CD polynomial is degenerate.
inline void write_scores_csv(std::ostream& out, std::span<const double> scores) {
    out << "index,cd_polynomial,christoffel\n";
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const double c = scores[i] > kDegenerateKernel ? 1.0 / scores[i] : std::numeric_limits<double>::infinity();
        out << i << ',' << format_double(scores[i]) << ',' << format_double(c) << '\n';
    }
}

inline void write_sweep_csv(std::ostream& out, const SweepResult& result) {
    out << "d,n,d_min_n,value,reference,pass\n";
    for (const SweepEntry& e : result.entries) {
        out << e.d << ',' << e.n << ',' << e.d_min_n() << ',' << format_double(e.value) << ','
            << format_double(e.reference) << ',' << (e.pass ? "true" : "false") << '\n';
    }
}

}  // namespace cdk::io

#endif
