#ifndef CDK_CONFIG_HPP
#define CDK_CONFIG_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "cdk/asymptotics.hpp"
#include "cdk/errors.hpp"
#include "cdk/hilbert.hpp"
#include "cdk/io.hpp"
#include "cdk/measures.hpp"
#include "json.hpp"

// JSON descriptions of measures, sets and sweep schedules. Relative data
// paths resolve against `base`, the directory of the config file.

namespace cdk::config {

using nlohmann::json;

namespace detail {

inline const json& require(const json& j, const char* key, const char* what) {
    if (!j.is_object() || !j.contains(key)) {
        throw InvalidArgument(std::string(what) + " is missing \"" + key + "\"");
    }
    return j.at(key);
}

inline double number(const json& j, const char* key, const char* what) {
    const json& v = require(j, key, what);
    if (!v.is_number()) throw InvalidArgument(std::string(what) + ": \"" + key + "\" must be a number");
    return v.get<double>();
}

inline std::size_t count(const json& j, const char* key, const char* what) {
    const json& v = require(j, key, what);
    if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw InvalidArgument(std::string(what) + ": \"" + key + "\" must be a nonnegative integer");
    }
    return v.get<std::size_t>();
}

}  // namespace detail

inline HPoint parse_point(const json& j) {
    if (!j.is_array()) throw InvalidArgument("a point must be a JSON array of numbers");
    std::vector<double> c;
    for (const json& v : j) {
        if (!v.is_number()) throw InvalidArgument("a point must be a JSON array of numbers");
        c.push_back(v.get<double>());
    }
    return HPoint(std::move(c));
}

/// {"type":"ball","center":[...],"radius":r} | {"type":"ellipsoid","power":m}
/// | {"type":"ellipsoid","weights":[...]} | {"type":"hilbert_cube"}
inline CompactSet parse_set(const json& j) {
    const std::string type = detail::require(j, "type", "set").get<std::string>();
    if (type == "ball") {
        HPoint center = j.contains("center") ? parse_point(j.at("center")) : HPoint{};
        return Ball(std::move(center), detail::number(j, "radius", "ball"));
    }
    if (type == "ellipsoid") {
        if (j.contains("weights")) return Ellipsoid(TableWeights{j.at("weights").get<std::vector<double>>()});
        return Ellipsoid(PowerWeights{j.contains("power") ? detail::number(j, "power", "ellipsoid") : 1.0});
    }
    if (type == "hilbert_cube") return HilbertCube{};
    throw InvalidArgument("unknown set type '" + type + "'");
}

/// See README for the accepted measure descriptions.
inline Measure parse_measure(const json& j, const std::filesystem::path& base = {}) {
    const std::string type = detail::require(j, "type", "measure").get<std::string>();
    if (type == "empirical") {
        std::vector<HPoint> points;
        if (j.contains("data")) {
            std::filesystem::path p = j.at("data").get<std::string>();
            if (p.is_relative()) p = base / p;
            points = io::read_points(p.string());
        } else {
            for (const json& x : detail::require(j, "points", "empirical measure")) points.push_back(parse_point(x));
        }
        std::vector<double> weights;
        if (j.contains("weights")) weights = j.at("weights").get<std::vector<double>>();
        return Measure::empirical(std::move(points), std::move(weights));
    }
    if (type == "dirac") return Measure::dirac(parse_point(detail::require(j, "point", "dirac measure")));
    if (type == "cube_uniform") {
        return Measure::cube_uniform(j.contains("n_trunc") ? detail::count(j, "n_trunc", "cube_uniform") : 0);
    }
    if (type == "gaussian") {
        return Measure::gaussian(detail::number(j, "decay", "gaussian"),
                                 j.contains("n_trunc") ? detail::count(j, "n_trunc", "gaussian") : 0);
    }
    if (type == "sample") {
        const CompactSet set = parse_set(detail::require(j, "set", "sample measure"));
        const std::size_t seed = j.contains("seed") ? detail::count(j, "seed", "sample measure") : 0;
        return Measure::empirical(sample(set, detail::count(j, "n_trunc", "sample measure"),
                                         detail::count(j, "count", "sample measure"), seed));
    }
    if (type == "mixture") {
        std::vector<double> weights;
        std::vector<Measure> components;
        for (const json& c : detail::require(j, "components", "mixture")) {
            weights.push_back(detail::number(c, "weight", "mixture component"));
            components.push_back(parse_measure(detail::require(c, "measure", "mixture component"), base));
        }
        return Measure::mixture(std::move(weights), std::move(components));
    }
    throw InvalidArgument("unknown measure type '" + type + "'");
}

/// [[d, n], ...] or {"diagonal": [first, last]}.
inline std::vector<Order> parse_schedule(const json& j) {
    std::vector<Order> schedule;
    if (j.is_object() && j.contains("diagonal")) {
        const json& r = j.at("diagonal");
        if (!r.is_array() || r.size() != 2 || !r[0].is_number_unsigned() || !r[1].is_number_unsigned() ||
            r[0].get<std::size_t>() > r[1].get<std::size_t>()) {
            throw InvalidArgument("schedule \"diagonal\" must be [first, last] with first <= last");
        }
        schedule = diagonal_schedule(r[0].get<std::size_t>(), r[1].get<std::size_t>());
    } else if (j.is_array()) {
        for (const json& e : j) {
            if (!e.is_array() || e.size() != 2 || !e[0].is_number_unsigned() || !e[1].is_number_unsigned()) {
                throw InvalidArgument("schedule entries must be [d, n] pairs of nonnegative integers");
            }
            schedule.push_back({e[0].get<std::size_t>(), e[1].get<std::size_t>()});
        }
    } else {
        throw InvalidArgument("schedule must be a list of [d, n] pairs or {\"diagonal\": [first, last]}");
    }
    validate_schedule(schedule);
    return schedule;
}

}  // namespace cdk::config

#endif
