#include "dsi/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace dsi {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void check_keys(const nlohmann::json& obj, const std::vector<std::string>& allowed,
                const std::string& context, std::vector<std::string>& errors) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end())
            errors.push_back("unknown key '" + it.key() + "' in " + context);
    }
}

static double require_number(const nlohmann::json& obj, const std::string& key,
                             const std::string& context, std::vector<std::string>& errors) {
    if (!obj.contains(key) || !obj[key].is_number()) {
        errors.push_back("missing or non-numeric key '" + key + "' in " + context);
        return 0.0;
    }
    return obj[key].get<double>();
}

static std::vector<double> require_array(const nlohmann::json& obj, const std::string& key,
                                         const std::string& context,
                                         std::vector<std::string>& errors) {
    if (!obj.contains(key) || !obj[key].is_array()) {
        errors.push_back("missing or non-array key '" + key + "' in " + context);
        return {};
    }
    std::vector<double> out;
    for (const auto& v : obj[key]) {
        if (!v.is_number()) {
            errors.push_back("non-numeric entry in '" + key + "' in " + context);
            return {};
        }
        out.push_back(v.get<double>());
    }
    return out;
}

nlohmann::json to_json(const SamplingScheme& scheme) {
    return nlohmann::json{{"lambda", scheme.lambda},
                          {"boundaries", scheme.boundaries},
                          {"n_scales", scheme.n_scales}};
}

SamplingScheme scheme_from_json(const nlohmann::json& obj) {
    std::vector<std::string> errors;
    SamplingScheme scheme;
    scheme.lambda = require_number(obj, "lambda", "scheme", errors);
    scheme.boundaries = require_array(obj, "boundaries", "scheme", errors);
    scheme.n_scales = static_cast<int>(require_number(obj, "n_scales", "scheme", errors));
    if (errors.empty())
        for (auto& v : scheme.violations()) errors.push_back(std::move(v));
    check_keys(obj, {"lambda", "boundaries", "n_scales"}, "scheme", errors);
    if (!errors.empty()) throw ConfigError(std::move(errors));
    return scheme;
}

nlohmann::json to_json(const SubsidiaryModel& model) {
    nlohmann::json obj = to_json(model.scheme);
    obj["H"] = model.hurst;
    obj["beta"] = model.beta;
    std::vector<double> g;
    for (Eigen::Index r = 0; r < model.gram.rows(); ++r)
        for (Eigen::Index c = 0; c < model.gram.cols(); ++c) g.push_back(model.gram(r, c));
    obj["G"] = g;
    obj["mu"] = std::vector<double>(model.mean.data(), model.mean.data() + model.mean.size());
    return obj;
}

SubsidiaryModel model_from_json(const nlohmann::json& obj) {
    std::vector<std::string> errors;
    SubsidiaryModel model;
    model.scheme.lambda = require_number(obj, "lambda", "model", errors);
    model.scheme.boundaries = require_array(obj, "boundaries", "model", errors);
    model.scheme.n_scales = static_cast<int>(require_number(obj, "n_scales", "model", errors));
    model.hurst = require_number(obj, "H", "model", errors);
    model.beta = require_number(obj, "beta", "model", errors);
    const auto g = require_array(obj, "G", "model", errors);
    const auto mu = require_array(obj, "mu", "model", errors);
    const int q = model.scheme.q();
    if (q > 0 && g.size() == static_cast<std::size_t>(q) * q) {
        model.gram.resize(q, q);
        for (int r = 0; r < q; ++r)
            for (int c = 0; c < q; ++c) model.gram(r, c) = g[static_cast<std::size_t>(r) * q + c];
    } else {
        errors.push_back("G must have q*q row-major entries");
    }
    if (q > 0 && mu.size() == static_cast<std::size_t>(q)) {
        model.mean = Eigen::Map<const Eigen::VectorXd>(mu.data(), q);
    } else {
        errors.push_back("mu must have q entries");
    }
    if (errors.empty())
        for (auto& v : model.violations()) errors.push_back(std::move(v));
    check_keys(obj, {"lambda", "boundaries", "n_scales", "H", "beta", "G", "mu"}, "model", errors);
    if (!errors.empty()) throw ConfigError(std::move(errors));
    return model;
}

nlohmann::json to_json(const HurstEstimate& est) {
    nlohmann::json obj;
    obj["per_sub"] = std::vector<double>(est.per_sub.data(), est.per_sub.data() + est.per_sub.size());
    nlohmann::json pairs = nlohmann::json::array();
    for (Eigen::Index j = 0; j < est.per_pair.rows(); ++j) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index i = 0; i < est.per_pair.cols(); ++i) row.push_back(est.per_pair(j, i));
        pairs.push_back(row);
    }
    obj["per_pair"] = pairs;
    obj["baseline"] = est.baseline;
    obj["lambda_used"] = est.lambda_used;
    return obj;
}

std::string hurst_report_text(const HurstEstimate& est) {
    std::ostringstream os;
    os << "Hurst estimates (lambda = " << fmt17(est.lambda_used) << ")\n";
    os << "subinterval  H_hat\n";
    for (Eigen::Index i = 0; i < est.per_sub.size(); ++i) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%11lld  %.4f\n", static_cast<long long>(i + 1),
                      est.per_sub(i));
        os << buf;
    }
    if (std::isfinite(est.baseline)) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "baseline (whole-interval): %.4f\n", est.baseline);
        os << buf;
    }
    return os.str();
}

nlohmann::json to_json(const StudyReport& report) {
    nlohmann::json obj;
    obj["h_grid"] = report.h_grid;
    nlohmann::json mse = nlohmann::json::array();
    for (Eigen::Index r = 0; r < report.mse_per_sub.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < report.mse_per_sub.cols(); ++c)
            row.push_back(report.mse_per_sub(r, c));
        mse.push_back(row);
    }
    obj["mse_per_sub"] = mse;
    obj["mse_baseline_mean"] = report.mse_baseline_mean;
    obj["mse_baseline_max"] = report.mse_baseline_max;
    obj["mse_baseline_min"] = report.mse_baseline_min;
    obj["dropped"] = report.dropped;
    obj["n_reps"] = report.n_reps;
    obj["seed"] = report.seed;
    return obj;
}

std::string study_report_csv(const StudyReport& report) {
    std::ostringstream os;
    os << "h,subinterval,mse,mse_baseline_mean,mse_baseline_max,mse_baseline_min,dropped\n";
    for (std::size_t hi = 0; hi < report.h_grid.size(); ++hi) {
        for (Eigen::Index i = 0; i < report.mse_per_sub.cols(); ++i) {
            os << fmt17(report.h_grid[hi]) << ',' << (i + 1) << ','
               << fmt17(report.mse_per_sub(static_cast<Eigen::Index>(hi), i)) << ','
               << fmt17(report.mse_baseline_mean[hi]) << ',' << fmt17(report.mse_baseline_max[hi])
               << ',' << fmt17(report.mse_baseline_min[hi]) << ',' << report.dropped[hi] << '\n';
        }
    }
    return os.str();
}

void write_path_csv(const SampledPath& path, const std::filesystem::path& file) {
    std::ofstream os(file);
    if (!os) throw Error("cannot open " + file.string() + " for writing");
    os << "time,value\n";
    for (std::size_t k = 0; k < path.times.size(); ++k)
        os << fmt17(path.times[k]) << ',' << fmt17(path.values[k]) << '\n';
}

SampledPath read_path_csv(const std::filesystem::path& file) {
    std::ifstream is(file);
    if (!is) throw Error("cannot open " + file.string());
    SampledPath path;
    std::string line;
    long line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (line_no == 1) continue;  // header
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError("expected 'time,value'", line_no);
        try {
            path.times.push_back(std::stod(line.substr(0, comma)));
            path.values.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw ParseError("non-numeric field", line_no);
        }
    }
    path.validate();
    return path;
}

void write_paths_csv(const Eigen::MatrixXd& paths, const std::vector<double>& grid,
                     const std::filesystem::path& file) {
    std::ofstream os(file);
    if (!os) throw Error("cannot open " + file.string() + " for writing");
    for (std::size_t a = 0; a < grid.size(); ++a) os << (a ? "," : "") << fmt17(grid[a]);
    os << '\n';
    for (Eigen::Index r = 0; r < paths.rows(); ++r) {
        for (Eigen::Index c = 0; c < paths.cols(); ++c) os << (c ? "," : "") << fmt17(paths(r, c));
        os << '\n';
    }
}

void write_paths_binary(const Eigen::MatrixXd& paths, const std::filesystem::path& file) {
    std::ofstream os(file, std::ios::binary);
    if (!os) throw Error("cannot open " + file.string() + " for writing");
    os.write("DSI1", 4);
    const std::uint64_t rows = static_cast<std::uint64_t>(paths.rows());
    const std::uint64_t cols = static_cast<std::uint64_t>(paths.cols());
    os.write(reinterpret_cast<const char*>(&rows), 8);
    os.write(reinterpret_cast<const char*>(&cols), 8);
    for (Eigen::Index r = 0; r < paths.rows(); ++r)
        for (Eigen::Index c = 0; c < paths.cols(); ++c) {
            const double v = paths(r, c);
            os.write(reinterpret_cast<const char*>(&v), 8);
        }
}

Eigen::MatrixXd read_paths_binary(const std::filesystem::path& file) {
    std::ifstream is(file, std::ios::binary);
    if (!is) throw Error("cannot open " + file.string());
    char magic[4];
    is.read(magic, 4);
    if (!is || std::string(magic, 4) != "DSI1") throw Error("bad magic in " + file.string());
    std::uint64_t rows = 0, cols = 0;
    is.read(reinterpret_cast<char*>(&rows), 8);
    is.read(reinterpret_cast<char*>(&cols), 8);
    Eigen::MatrixXd paths(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (std::uint64_t r = 0; r < rows; ++r)
        for (std::uint64_t c = 0; c < cols; ++c) {
            double v;
            is.read(reinterpret_cast<char*>(&v), 8);
            paths(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = v;
        }
    if (!is) throw Error("truncated binary block in " + file.string());
    return paths;
}

SampledPath IndexSeries::to_path() const {
    SampledPath path;
    path.meta = source;
    path.values = closes;
    path.times.resize(closes.size());
    for (std::size_t k = 0; k < closes.size(); ++k) path.times[k] = static_cast<double>(k);
    return path;
}

static std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream is(line);
    while (std::getline(is, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

static bool iso_date_valid(const std::string& d) {
    if (d.size() != 10 || d[4] != '-' || d[7] != '-') return false;
    for (std::size_t k : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
        if (!std::isdigit(static_cast<unsigned char>(d[k]))) return false;
    return true;
}

IndexSeries ingest_csv(const std::filesystem::path& file, const std::string& date_column,
                       const std::string& value_column, const std::string& date_from,
                       const std::string& date_to) {
    std::ifstream is(file);
    if (!is) throw Error("cannot open " + file.string());

    std::string line;
    if (!std::getline(is, line)) throw ParseError("empty file", 0);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_csv_line(line);
    std::ptrdiff_t date_idx = -1, value_idx = -1;
    for (std::size_t k = 0; k < header.size(); ++k) {
        if (header[k] == date_column) date_idx = static_cast<std::ptrdiff_t>(k);
        if (header[k] == value_column) value_idx = static_cast<std::ptrdiff_t>(k);
    }
    if (date_idx < 0) throw ParseError("date column '" + date_column + "' not found", 1);
    if (value_idx < 0) throw ParseError("value column '" + value_column + "' not found", 1);

    IndexSeries series;
    series.source = file.filename().string();
    long line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (static_cast<std::ptrdiff_t>(fields.size()) <= std::max(date_idx, value_idx))
            throw ParseError("too few fields", line_no);
        const std::string& date = fields[static_cast<std::size_t>(date_idx)];
        if (!iso_date_valid(date)) throw ParseError("invalid ISO date '" + date + "'", line_no);
        if (!date_from.empty() && date < date_from) continue;
        if (!date_to.empty() && date > date_to) continue;
        double close;
        try {
            close = std::stod(fields[static_cast<std::size_t>(value_idx)]);
        } catch (const std::exception&) {
            throw ParseError("non-numeric value field", line_no);
        }
        if (!(close > 0.0)) throw ParseError("index close must be positive", line_no);
        if (!series.dates.empty() && !(date > series.dates.back()))
            throw NonMonotoneDatesError("dates not strictly increasing at line " +
                                        std::to_string(line_no));
        series.dates.push_back(date);
        series.closes.push_back(close);
    }
    if (series.dates.empty()) throw EmptySelectionError("no rows in the selected date range");
    return series;
}

}  // namespace dsi
