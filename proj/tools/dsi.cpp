#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "dsi/io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string hash8(const std::string& bytes) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(bytes)));
    return std::string(buf).substr(8);
}

json load_config(const fs::path& file) {
    std::ifstream is(file);
    if (!is) throw dsi::Error("cannot open config file " + file.string());
    return json::parse(is);
}

void write_text(const fs::path& file, const std::string& text) {
    std::ofstream os(file, std::ios::binary);
    if (!os) throw dsi::Error("cannot open " + file.string() + " for writing");
    os << text;
}

std::vector<std::int64_t> int_array(const json& obj, const std::string& key,
                                    std::vector<std::string>& errors, const std::string& ctx) {
    if (!obj.contains(key) || !obj[key].is_array()) {
        errors.push_back("missing or non-array key '" + key + "' in " + ctx);
        return {};
    }
    std::vector<std::int64_t> out;
    for (const auto& v : obj[key]) {
        if (!v.is_number_integer()) {
            errors.push_back("non-integer entry in '" + key + "' in " + ctx);
            return {};
        }
        out.push_back(v.get<std::int64_t>());
    }
    return out;
}

struct CommonOpts {
    fs::path config_path;
    fs::path out_dir = "out";
    fs::path data_path;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
};

fs::path make_out_dir(const CommonOpts& opts, const std::string& command, const json& config) {
    std::string bytes = command + config.dump();
    if (opts.seed) bytes += ";seed=" + std::to_string(*opts.seed);
    const fs::path dir = opts.out_dir / (command + "-" + hash8(bytes));
    fs::create_directories(dir / "tables");
    return dir;
}

json section(const json& config, const std::string& name) {
    if (!config.contains(name))
        throw dsi::ConfigError({"config is missing the '" + name + "' section"});
    return config[name];
}

dsi::SampledPath load_input_path(const CommonOpts& opts) {
    if (opts.data_path.empty()) throw dsi::ConfigError({"--data PATH is required for this command"});
    return dsi::read_path_csv(opts.data_path);
}

std::vector<double> grid_from(const json& obj, std::vector<std::string>& errors,
                              const std::string& ctx) {
    std::vector<double> grid;
    if (!obj.contains("grid") || !obj["grid"].is_array()) {
        errors.push_back("missing or non-array key 'grid' in " + ctx);
        return grid;
    }
    for (const auto& v : obj["grid"]) {
        if (!v.is_number()) {
            errors.push_back("non-numeric grid entry in " + ctx);
            return {};
        }
        grid.push_back(v.get<double>());
    }
    return grid;
}

int cmd_simulate(const CommonOpts& opts) {
    const json config = load_config(opts.config_path);
    const json sim = section(config, "simulate");
    std::vector<std::string> errors;
    dsi::check_keys(sim,
                    {"mode", "grid", "n_paths", "seed", "format", "threads", "lambda", "h_vec",
                     "sigma_vec", "points_per_scale", "n_scales", "deterministic"},
                    "simulate", errors);
    const std::string mode = sim.value("mode", "exact");
    const std::uint64_t seed = opts.seed ? *opts.seed : sim.value("seed", 0ULL);
    const int threads = opts.threads ? *opts.threads : sim.value("threads", 1);
    const fs::path dir = make_out_dir(opts, "simulate", config);

    json report{{"command", "simulate"}, {"mode", mode}, {"seed", seed}};
    if (mode == "exact") {
        const auto model = dsi::model_from_json(section(config, "model"));
        const auto grid = grid_from(sim, errors, "simulate");
        const int n_paths = sim.value("n_paths", 0);
        if (n_paths < 0) errors.push_back("n_paths must be nonnegative");
        if (!errors.empty()) throw dsi::ConfigError(std::move(errors));
        const auto paths = dsi::sample_exact_paths(model, grid, n_paths, seed, threads);
        const std::string format = sim.value("format", "csv");
        if (format == "csv" || format == "both")
            dsi::write_paths_csv(paths, grid, dir / "tables" / "paths.csv");
        if (format == "bin" || format == "both")
            dsi::write_paths_binary(paths, dir / "tables" / "paths.bin");
        report["n_paths"] = n_paths;
        report["grid"] = grid;
    } else if (mode == "study") {
        dsi::StudySpec spec;
        spec.lambda = sim.value("lambda", 2.0);
        spec.h_vec = sim.value("h_vec", std::vector<double>{});
        spec.sigma_vec = sim.value("sigma_vec", std::vector<double>(spec.h_vec.size(), 1.0));
        spec.points_per_scale = sim.value("points_per_scale", 80);
        spec.n_scales = sim.value("n_scales", 4);
        spec.deterministic_increments = sim.value("deterministic", false);
        if (!errors.empty()) throw dsi::ConfigError(std::move(errors));
        const auto series = dsi::gen_dsi_study_series(spec, seed);
        dsi::write_path_csv(series, dir / "tables" / "series.csv");
        report["n_points"] = series.times.size();
    } else {
        throw dsi::ConfigError({"simulate.mode must be 'exact' or 'study'"});
    }
    write_text(dir / "report.json", report.dump(2) + "\n");
    std::cout << dir.string() << "\n";
    return 0;
}

int cmd_covariance(const CommonOpts& opts) {
    const json config = load_config(opts.config_path);
    const json cov = section(config, "covariance");
    std::vector<std::string> errors;
    dsi::check_keys(cov, {"grid"}, "covariance", errors);
    const auto grid = grid_from(cov, errors, "covariance");
    if (!errors.empty()) throw dsi::ConfigError(std::move(errors));
    const auto model = dsi::model_from_json(section(config, "model"));
    const auto result = dsi::cov_matrix(model, grid);

    const fs::path dir = make_out_dir(opts, "covariance", config);
    std::ostringstream os;
    for (Eigen::Index r = 0; r < result.cov.rows(); ++r) {
        for (Eigen::Index c = 0; c < result.cov.cols(); ++c)
            os << (c ? "," : "") << dsi::fmt17(result.cov(r, c));
        os << '\n';
    }
    write_text(dir / "tables" / "cov.csv", os.str());
    json report{{"command", "covariance"},
                {"grid", grid},
                {"min_eigenvalue", result.min_eigenvalue},
                {"jitter_used", result.jitter_used},
                {"factorized", result.factorized}};
    write_text(dir / "report.json", report.dump(2) + "\n");
    std::cout << dir.string() << "\n";
    return 0;
}

int cmd_estimate(const CommonOpts& opts) {
    const json config = load_config(opts.config_path);
    const json est = section(config, "estimate");
    std::vector<std::string> errors;
    dsi::check_keys(est,
                    {"lambda", "scale_starts", "offsets", "offsets_count", "sub_offsets",
                     "direction", "merge", "date_column", "value_column", "date_from", "date_to",
                     "index_base"},
                    "estimate", errors);
    const double lambda = est.value("lambda", 0.0);
    const auto scale_starts_raw = int_array(est, "scale_starts", errors, "estimate");
    std::vector<std::int64_t> offsets;
    if (est.contains("offsets_count")) {
        for (std::int64_t k = 0; k < est["offsets_count"].get<std::int64_t>(); ++k)
            offsets.push_back(k);
    } else {
        offsets = int_array(est, "offsets", errors, "estimate");
    }
    const auto sub_offsets = int_array(est, "sub_offsets", errors, "estimate");
    const std::string direction = est.value("direction", "forward");
    if (direction != "forward" && direction != "backward")
        errors.push_back("estimate.direction must be 'forward' or 'backward'");
    const std::int64_t index_base = est.value("index_base", 1);
    if (!errors.empty()) throw dsi::ConfigError(std::move(errors));

    if (opts.data_path.empty()) throw dsi::ConfigError({"--data PATH is required for estimate"});
    const auto series = dsi::ingest_csv(opts.data_path, est.value("date_column", "Date"),
                                        est.value("value_column", "Close"),
                                        est.value("date_from", ""), est.value("date_to", ""));
    const auto raw = series.to_path();

    std::vector<std::int64_t> scale_starts;
    for (std::int64_t b : scale_starts_raw) scale_starts.push_back(b - index_base);

    const auto resampled = dsi::resample_series(
        raw, scale_starts, lambda, offsets, sub_offsets,
        direction == "forward" ? dsi::AnchorDirection::Forward : dsi::AnchorDirection::Backward);
    auto hurst = dsi::hurst_vector(dsi::quadratic_variations(resampled.series, resampled.partition),
                                   lambda);
    hurst.baseline = dsi::baseline_hurst(resampled.series, resampled.partition);

    const fs::path dir = make_out_dir(opts, "estimate", config);
    json report{{"command", "estimate"},
                {"rows_ingested", series.dates.size()},
                {"estimate", dsi::to_json(hurst)}};
    if (est.contains("merge")) {
        std::vector<std::vector<int>> grouping;
        for (const auto& group : est["merge"]) grouping.push_back(group.get<std::vector<int>>());
        const auto merged = dsi::merge_groups(resampled.series, resampled.partition, grouping);
        report["merged"] = dsi::to_json(merged);
    }
    {
        const auto suggestion = dsi::suggest_grouping(hurst);
        report["suggested_grouping"] = suggestion;
    }
    dsi::write_path_csv(resampled.series, dir / "tables" / "resampled.csv");
    write_text(dir / "report.json", report.dump(2) + "\n");
    write_text(dir / "tables" / "report.txt", dsi::hurst_report_text(hurst));
    std::cout << dir.string() << "\n";
    return 0;
}

int cmd_mse_study(const CommonOpts& opts) {
    const json config = load_config(opts.config_path);
    const json study = section(config, "mse_study");
    std::vector<std::string> errors;
    dsi::check_keys(study,
                    {"lambda", "points_per_scale", "n_scales", "h_grid", "h_offsets", "sigma_vec",
                     "n_reps", "seed", "threads"},
                    "mse_study", errors);
    if (!errors.empty()) throw dsi::ConfigError(std::move(errors));

    dsi::MseStudyConfig mc;
    mc.base.lambda = study.value("lambda", 2.0);
    mc.base.points_per_scale = study.value("points_per_scale", 80);
    mc.base.n_scales = study.value("n_scales", 4);
    mc.h_grid = study.value("h_grid", std::vector<double>{});
    mc.h_offsets = study.value("h_offsets", std::vector<double>{});
    mc.base.sigma_vec = study.value("sigma_vec", std::vector<double>(mc.h_offsets.size(), 1.0));
    mc.n_reps = study.value("n_reps", 100);
    mc.seed = opts.seed ? *opts.seed : study.value("seed", 0ULL);
    mc.n_threads = opts.threads ? *opts.threads : study.value("threads", 1);

    const auto report = dsi::mse_study(mc);
    const fs::path dir = make_out_dir(opts, "mse-study", config);
    write_text(dir / "report.json", dsi::to_json(report).dump(2) + "\n");
    write_text(dir / "tables" / "mse.csv", dsi::study_report_csv(report));
    std::cout << dir.string() << "\n";
    return 0;
}

int cmd_lamperti(const CommonOpts& opts) {
    const json config = load_config(opts.config_path);
    const json lam = section(config, "lamperti");
    std::vector<std::string> errors;
    dsi::check_keys(lam, {"direction", "H", "alpha"}, "lamperti", errors);
    const std::string direction = lam.value("direction", "forward");
    if (direction != "forward" && direction != "inverse")
        errors.push_back("lamperti.direction must be 'forward' or 'inverse'");
    if (!errors.empty()) throw dsi::ConfigError(std::move(errors));
    const double hurst = lam.value("H", 0.5);
    const double alpha = lam.value("alpha", 2.0);

    const auto input = load_input_path(opts);
    const auto output = direction == "forward" ? dsi::lamperti_forward(input, hurst, alpha)
                                               : dsi::lamperti_inverse(input, hurst, alpha);
    const fs::path dir = make_out_dir(opts, "lamperti", config);
    dsi::write_path_csv(output, dir / "tables" / "transformed.csv");
    json report{{"command", "lamperti"}, {"direction", direction}, {"H", hurst}, {"alpha", alpha},
                {"n_points", output.times.size()}};
    write_text(dir / "report.json", report.dump(2) + "\n");
    std::cout << dir.string() << "\n";
    return 0;
}

int cmd_estimate_scale(const CommonOpts& opts) {
    const json config = load_config(opts.config_path);
    const json scan = section(config, "estimate_scale");
    std::vector<std::string> errors;
    dsi::check_keys(scan,
                    {"lo", "hi", "n_candidates", "m", "q", "date_column", "value_column",
                     "date_from", "date_to", "input"},
                    "estimate_scale", errors);
    if (!errors.empty()) throw dsi::ConfigError(std::move(errors));

    dsi::SampledPath series;
    const std::string input = scan.value("input", "index");
    if (input == "path") {
        series = load_input_path(opts);
    } else {
        if (opts.data_path.empty())
            throw dsi::ConfigError({"--data PATH is required for estimate-scale"});
        series = dsi::ingest_csv(opts.data_path, scan.value("date_column", "Date"),
                                 scan.value("value_column", "Close"), scan.value("date_from", ""),
                                 scan.value("date_to", ""))
                     .to_path();
    }
    const auto result =
        dsi::estimate_scale(series, scan.value("lo", 1.2), scan.value("hi", 3.0),
                            scan.value("n_candidates", 37), scan.value("m", 4), scan.value("q", 4));

    const fs::path dir = make_out_dir(opts, "estimate-scale", config);
    std::ostringstream os;
    os << "lambda,score\n";
    for (std::size_t c = 0; c < result.candidates.size(); ++c)
        os << dsi::fmt17(result.candidates[c]) << ',' << dsi::fmt17(result.scores[c]) << '\n';
    write_text(dir / "tables" / "scores.csv", os.str());
    json report{{"command", "estimate-scale"},
                {"lambda_hat", result.lambda_hat},
                {"no_scale_preference", result.no_scale_preference},
                {"note", "heuristic; analysis paths take lambda as input"}};
    write_text(dir / "report.json", report.dump(2) + "\n");
    std::cout << dir.string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete scale invariant process toolkit: simulation, covariance, "
                 "Hurst vector estimation"};
    app.require_subcommand(1);

    CommonOpts opts;
    app.add_option("--config", opts.config_path, "Config file (JSON, sections per command)")
        ->required();
    app.add_option("--out", opts.out_dir, "Output directory");
    std::uint64_t seed_flag = 0;
    auto* seed_opt = app.add_option("--seed", seed_flag, "Seed override");
    int threads_flag = 1;
    auto* threads_opt = app.add_option("--threads", threads_flag, "Worker thread override");
    app.add_option("--data", opts.data_path, "Input data CSV");

    auto* simulate = app.add_subcommand("simulate", "Generate exact Gaussian paths or a study series");
    auto* covariance = app.add_subcommand("covariance", "Evaluate the closed-form covariance matrix");
    auto* estimate = app.add_subcommand("estimate", "Per-subinterval Hurst vector from an index CSV");
    auto* mse_study = app.add_subcommand("mse-study", "Repeated simulate/estimate MSE study");
    auto* lamperti = app.add_subcommand("lamperti", "Quasi-Lamperti transform of a sampled path");
    auto* estimate_scale = app.add_subcommand("estimate-scale", "Heuristic preferred-scale scan");

    CLI11_PARSE(app, argc, argv);
    if (*seed_opt) opts.seed = seed_flag;
    if (*threads_opt) opts.threads = threads_flag;

    try {
        if (simulate->parsed()) return cmd_simulate(opts);
        if (covariance->parsed()) return cmd_covariance(opts);
        if (estimate->parsed()) return cmd_estimate(opts);
        if (mse_study->parsed()) return cmd_mse_study(opts);
        if (lamperti->parsed()) return cmd_lamperti(opts);
        if (estimate_scale->parsed()) return cmd_estimate_scale(opts);
    } catch (const dsi::ConfigError& e) {
        json err{{"error", "config"}, {"violations", e.violations()}};
        std::cerr << err.dump(2) << "\n";
        return 2;
    } catch (const std::exception& e) {
        json err{{"error", "runtime"}, {"message", e.what()}};
        std::cerr << err.dump(2) << "\n";
        return 1;
    }
    return 0;
}
