// cdk: command-line front end for Christoffel-Darboux models.
//
// Exit codes: 0 success, 1 check failure, 2 usage/config error,
// 3 numerical error (singular moment matrix, degenerate evaluation).

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "cdk/cdk.hpp"
#include "cdk/checks.hpp"
#include "cdk/config.hpp"
#include "cdk/io.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitCheckFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

struct Config {
    json doc = json::object();
    fs::path base;

    static Config load(const std::string& path) {
        Config c;
        if (path.empty()) return c;
        std::ifstream in(path);
        if (!in) throw cdk::InvalidArgument("cannot open config file '" + path + "'");
        c.doc = json::parse(in);
        if (!c.doc.is_object()) throw cdk::InvalidArgument("config must be a JSON object");
        c.base = fs::path(path).parent_path();
        return c;
    }

    bool has(const char* key) const { return doc.contains(key); }

    template <class T>
    T get(const char* key, T fallback) const {
        return doc.contains(key) ? doc.at(key).get<T>() : fallback;
    }

    std::string path(const char* key) const {
        fs::path p = doc.at(key).get<std::string>();
        return (p.is_relative() ? base / p : p).string();
    }
};

/// Flag value when given on the command line, otherwise the config value.
template <class T>
T pick(const CLI::Option* flag, const T& flag_value, const Config& cfg, const char* key, T fallback) {
    if (flag->count() > 0) return flag_value;
    return cfg.get<T>(key, fallback);
}

class Output {
public:
    explicit Output(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_.open(path);
            if (!file_) throw cdk::InvalidArgument("cannot write '" + path + "'");
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

private:
    std::ofstream file_;
};

struct FitFlags {
    std::string config;
    std::size_t d = 0, n = 0;
    double ridge = 0.0, rank_tol = cdk::kDefaultRankTolerance;
    bool pinv = false;
    unsigned workers = 0;
    std::string output;
    CLI::Option *d_opt, *n_opt, *ridge_opt, *rank_opt, *pinv_opt, *workers_opt, *output_opt;

    void add_to(CLI::App* app) {
        app->add_option("--config", config, "JSON config file");
        d_opt = app->add_option("--d", d, "max algebraic degree");
        n_opt = app->add_option("--n", n, "max harmonic degree");
        ridge_opt = app->add_option("--ridge", ridge, "ridge added to the moment matrix");
        rank_opt = app->add_option("--rank-tol", rank_tol, "relative eigenvalue threshold for the effective rank");
        pinv_opt = app->add_flag("--pinv", pinv, "use the pseudo-inverse on rank-deficient moment matrices");
        workers_opt = app->add_option("--workers", workers, "worker threads (0 = available parallelism)");
        output_opt = app->add_option("--output,-o", output, "output path (default stdout)");
    }

    cdk::FitOptions options(const Config& cfg) const {
        cdk::FitOptions o;
        o.ridge = pick(ridge_opt, ridge, cfg, "ridge", 0.0);
        o.rank_tolerance = pick(rank_opt, rank_tol, cfg, "rank_tol", cdk::kDefaultRankTolerance);
        o.mode = pick(pinv_opt, pinv, cfg, "pseudo_inverse", false) ? cdk::InverseMode::Pseudo : cdk::InverseMode::Full;
        o.workers = pick(workers_opt, workers, cfg, "workers", 0u);
        if (!(o.ridge >= 0.0)) throw cdk::InvalidArgument("ridge must be >= 0");
        if (!(o.rank_tolerance > 0.0 && o.rank_tolerance < 1.0)) throw cdk::InvalidArgument("rank_tol must lie in (0, 1)");
        return o;
    }
};

int cmd_basis(std::size_t d, std::size_t n) {
    const cdk::BasisIndex basis(d, n);
    for (std::size_t i = 0; i < basis.size(); ++i) std::cout << i << ' ' << cdk::to_string(basis[i]) << '\n';
    std::cout << "dim = " << basis.size() << '\n';
    return 0;
}

int cmd_fit(const FitFlags& flags, const std::string& data) {
    const Config cfg = Config::load(flags.config);
    const cdk::FitOptions options = flags.options(cfg);
    const std::size_t d = pick(flags.d_opt, flags.d, cfg, "d", std::size_t{0});
    const std::size_t n = pick(flags.n_opt, flags.n, cfg, "n", std::size_t{0});
    if (!flags.d_opt->count() && !cfg.has("d")) throw cdk::InvalidArgument("fit needs --d");
    if (!flags.n_opt->count() && !cfg.has("n")) throw cdk::InvalidArgument("fit needs --n");

    std::optional<cdk::Measure> mu;
    if (!data.empty()) {
        mu = cdk::Measure::empirical(cdk::io::read_points(data));
    } else if (cfg.has("data")) {
        mu = cdk::Measure::empirical(cdk::io::read_points(cfg.path("data")));
    } else if (cfg.has("measure")) {
        mu = cdk::config::parse_measure(cfg.doc.at("measure"), cfg.base);
    } else {
        throw cdk::InvalidArgument("fit needs --data or a \"measure\" in the config");
    }

    const cdk::CDModel model = cdk::fit(*mu, d, n, options);
    const std::string out_path = flags.output_opt->count() ? flags.output
                                 : cfg.has("output")        ? cfg.path("output")
                                                            : std::string{};
    Output out(out_path);
    cdk::io::write_model(out.stream(), model);

    std::ostream& log = out_path.empty() || out_path == "-" ? std::cerr : std::cout;
    const auto& f = model.factorization();
    log << "dim = " << model.size() << " (C(n+d,n) with d=" << d << ", n=" << n << ")\n"
        << "effective rank = " << f.rank << '\n'
        << "max eigenvalue = " << cdk::io::format_double(f.max_eigenvalue()) << '\n'
        << "min eigenvalue = " << cdk::io::format_double(f.min_eigenvalue()) << '\n';
    return 0;
}

int cmd_score(const std::string& config_path, const std::string& model_arg, const std::string& data_arg,
              const std::string& output_arg, unsigned workers_arg, const CLI::Option* workers_opt) {
    const Config cfg = Config::load(config_path);
    const std::string model_path = !model_arg.empty() ? model_arg : cfg.has("model") ? cfg.path("model") : "";
    const std::string data_path = !data_arg.empty() ? data_arg : cfg.has("data") ? cfg.path("data") : "";
    if (model_path.empty() || data_path.empty()) throw cdk::InvalidArgument("score needs --model and --data");
    const unsigned workers = pick(workers_opt, workers_arg, cfg, "workers", 0u);

    const cdk::CDModel model = cdk::io::read_model(model_path);
    const std::vector<cdk::HPoint> points = cdk::io::read_points(data_path);
    if (const std::size_t t = model.moment_matrix().data_truncation(); t != 0) {
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (points[i].truncation() != t) {
                throw cdk::InvalidArgument("point " + std::to_string(i) + " has " +
                                           std::to_string(points[i].truncation()) +
                                           " coefficients but the model was fitted on " + std::to_string(t));
            }
        }
    }
    const std::vector<double> scores = cdk::score(model, points, workers);
    Output out(!output_arg.empty() ? output_arg : cfg.has("output") ? cfg.path("output") : "");
    cdk::io::write_scores_csv(out.stream(), scores);
    return 0;
}

int cmd_verify(std::uint64_t seed, double ridge, unsigned workers) {
    cdk::checks::VerifyOptions o;
    o.seed = seed;
    o.ridge = ridge;
    o.workers = workers;
    bool ok = true;
    for (const auto& r : cdk::checks::run_verification(o)) {
        char timing[32];
        std::snprintf(timing, sizeof timing, "%.3fs", r.seconds);
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << timing << "): " << r.detail << '\n';
        ok = ok && r.passed;
    }
    return ok ? 0 : kExitCheckFailure;
}

int cmd_sweep(const FitFlags& flags) {
    if (flags.config.empty()) throw cdk::InvalidArgument("sweep needs --config");
    const Config cfg = Config::load(flags.config);
    const cdk::FitOptions options = flags.options(cfg);
    const std::string kind = cfg.get<std::string>("kind", "");
    if (!cfg.has("measure") || !cfg.has("z")) throw cdk::InvalidArgument("sweep config needs \"measure\" and \"z\"");
    const cdk::Measure mu = cdk::config::parse_measure(cfg.doc.at("measure"), cfg.base);
    const cdk::HPoint z = cdk::config::parse_point(cfg.doc.at("z"));

    cdk::SweepResult result;
    if (kind == "atom") {
        if (!cfg.has("schedule")) throw cdk::InvalidArgument("atom sweep needs a \"schedule\"");
        result = cdk::sweep_atom(mu, z, cdk::config::parse_schedule(cfg.doc.at("schedule")), options);
    } else if (kind == "outside") {
        if (!cfg.has("set") || !cfg.has("n") || !cfg.has("d_range")) {
            throw cdk::InvalidArgument("outside sweep needs \"set\", \"n\" and \"d_range\"");
        }
        const json& range = cfg.doc.at("d_range");
        std::vector<std::size_t> degrees;
        if (range.is_object()) {
            const auto first = range.at("first").get<std::size_t>();
            const auto last = range.at("last").get<std::size_t>();
            for (std::size_t d = first; d <= last; ++d) degrees.push_back(d);
        } else {
            degrees = range.get<std::vector<std::size_t>>();
        }
        result = cdk::sweep_outside(mu, cdk::config::parse_set(cfg.doc.at("set")), z, cfg.doc.at("n").get<std::size_t>(),
                                    degrees, options);
    } else {
        throw cdk::InvalidArgument("sweep \"kind\" must be \"atom\" or \"outside\"");
    }

    const std::string out_path = flags.output_opt->count() ? flags.output
                                 : cfg.has("output")        ? cfg.path("output")
                                                            : std::string{};
    Output out(out_path);
    cdk::io::write_sweep_csv(out.stream(), result);
    for (const auto& e : result.entries) {
        if (!e.error.empty()) std::cerr << "d=" << e.d << " n=" << e.n << ": " << e.error << '\n';
    }
    std::cerr << "target = " << cdk::io::format_double(result.target) << " (" << result.certification
              << "), monotone violations = " << result.monotone_violations << '\n';
    return result.all_pass() ? 0 : kExitCheckFailure;
}

int cmd_sample(const std::string& set_json, std::size_t n_trunc, std::size_t count, std::uint64_t seed,
               const std::string& output) {
    const cdk::CompactSet set = cdk::config::parse_set(json::parse(set_json));
    const auto points = cdk::sample(set, n_trunc, count, seed);
    Output out(output);
    cdk::io::write_points_csv(out.stream(), points);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Christoffel-Darboux kernels and Christoffel functions on truncated Hilbert-space data"};
    app.require_subcommand(1);

    std::size_t basis_d = 0, basis_n = 0;
    auto* basis = app.add_subcommand("basis", "list the ordered monomial basis of P_{d,n}");
    basis->add_option("--d", basis_d, "max algebraic degree")->required();
    basis->add_option("--n", basis_n, "max harmonic degree")->required();

    FitFlags fit_flags;
    std::string fit_data;
    auto* fit = app.add_subcommand("fit", "assemble and factorize the moment matrix, write a model file");
    fit_flags.add_to(fit);
    fit->add_option("--data", fit_data, "CSV or JSONL coefficient file (uniform empirical measure)");

    std::string score_config, score_model, score_data, score_output;
    unsigned score_workers = 0;
    auto* score = app.add_subcommand("score", "CD polynomial and Christoffel function for every data point");
    score->add_option("--config", score_config, "JSON config file");
    score->add_option("--model", score_model, "model file written by fit");
    score->add_option("--data", score_data, "CSV or JSONL coefficient file");
    score->add_option("--output,-o", score_output, "output CSV (default stdout)");
    auto* score_workers_opt = score->add_option("--workers", score_workers, "worker threads (0 = available parallelism)");

    std::uint64_t verify_seed = 1;
    double verify_ridge = 0.0;
    unsigned verify_workers = 0;
    auto* verify = app.add_subcommand("verify", "run the identity and bound checks");
    verify->add_option("--seed", verify_seed, "seed for the randomized checks");
    verify->add_option("--ridge", verify_ridge, "ridge for the singular Dirac case of the trace check");
    verify->add_option("--workers", verify_workers, "worker threads (0 = available parallelism)");

    FitFlags sweep_flags;
    auto* sweep = app.add_subcommand("sweep", "atom or outside-support sweep over model orders");
    sweep_flags.add_to(sweep);

    std::string sample_set, sample_output;
    std::size_t sample_trunc = 1, sample_count = 0;
    std::uint64_t sample_seed = 0;
    auto* sample = app.add_subcommand("sample", "write seeded points of a compact set as CSV");
    sample->add_option("--set", sample_set, "set description as JSON, e.g. {\"type\":\"hilbert_cube\"}")->required();
    sample->add_option("--n-trunc", sample_trunc, "coefficients per point")->required();
    sample->add_option("--count", sample_count, "number of points")->required();
    sample->add_option("--seed", sample_seed, "random seed");
    sample->add_option("--output,-o", sample_output, "output CSV (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (*basis) return cmd_basis(basis_d, basis_n);
        if (*fit) return cmd_fit(fit_flags, fit_data);
        if (*score) return cmd_score(score_config, score_model, score_data, score_output, score_workers, score_workers_opt);
        if (*verify) return cmd_verify(verify_seed, verify_ridge, verify_workers);
        if (*sweep) return cmd_sweep(sweep_flags);
        if (*sample) return cmd_sample(sample_set, sample_trunc, sample_count, sample_seed, sample_output);
    } catch (const cdk::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const cdk::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
