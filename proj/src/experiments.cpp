#include "dsi/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "dsi/rng.hpp"

namespace dsi {

std::vector<std::string> MseStudyConfig::violations() const {
    std::vector<std::string> v;
    if (h_grid.empty()) v.push_back("h_grid must be non-empty");
    if (h_offsets.empty()) v.push_back("h_offsets must be non-empty");
    if (n_reps < 2) v.push_back("n_reps must be at least 2");
    if (n_threads < 1) v.push_back("n_threads must be positive");
    for (double h : h_grid) {
        for (double off : h_offsets) {
            const double hv = h + off;
            if (!(hv > 0.0) || hv > 1.5) {
                v.push_back("every h + offset must lie in (0, 1.5]");
                return v;
            }
        }
    }
    StudySpec probe = base;
    probe.h_vec.assign(h_offsets.size(), 0.5);
    probe.sigma_vec.resize(h_offsets.size(), 1.0);
    for (auto& s : probe.violations()) v.push_back(std::move(s));
    return v;
}

void MseStudyConfig::validate() const {
    auto v = violations();
    if (!v.empty()) throw ConfigError(std::move(v));
}

ScalePartition study_partition(const StudySpec& spec) {
    ScalePartition part;
    part.lambda = spec.lambda;
    part.scale_endpoints.push_back(0);
    const int nq = spec.q();
    std::ptrdiff_t pos = 0;
    for (int j = 1; j <= spec.n_scales; ++j) {
        std::vector<std::ptrdiff_t> interior;
        for (int i = 1; i < nq; ++i) {
            interior.push_back(pos + (static_cast<std::ptrdiff_t>(i) * spec.points_per_scale) / nq);
        }
        pos += spec.points_per_scale;
        part.sub_boundaries.push_back(std::move(interior));
        part.scale_endpoints.push_back(pos);
    }
    return part;
}

namespace {

struct RepOutcome {
    bool dropped = false;
    Eigen::VectorXd sq_err;  // per subinterval
    double base_mean = 0.0, base_max = 0.0, base_min = 0.0;
};

}  // namespace

StudyReport mse_study(const MseStudyConfig& config) {
    config.validate();
    const int q = static_cast<int>(config.h_offsets.size());
    const auto nh = config.h_grid.size();

    StudyReport report;
    report.h_grid = config.h_grid;
    report.mse_per_sub = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nh), q);
    report.mse_baseline_mean.assign(nh, 0.0);
    report.mse_baseline_max.assign(nh, 0.0);
    report.mse_baseline_min.assign(nh, 0.0);
    report.dropped.assign(nh, 0);
    report.n_reps = config.n_reps;
    report.seed = config.seed;

    for (std::size_t hi = 0; hi < nh; ++hi) {
        StudySpec spec = config.base;
        spec.h_vec.resize(q);
        for (int i = 0; i < q; ++i) spec.h_vec[i] = config.h_grid[hi] + config.h_offsets[i];
        if (spec.sigma_vec.empty()) spec.sigma_vec.assign(q, 1.0);
        spec.validate();

        const Eigen::Map<const Eigen::VectorXd> h_true(spec.h_vec.data(), q);
        const double h_mean = h_true.mean();
        const double h_max = h_true.maxCoeff();
        const double h_min = h_true.minCoeff();
        const ScalePartition part = study_partition(spec);

        std::vector<RepOutcome> outcomes(config.n_reps);
        const auto run_rep = [&](int r) {
            const std::uint64_t rep_seed =
                mix64(config.seed ^ mix64((static_cast<std::uint64_t>(hi) << 32) ^
                                          static_cast<std::uint64_t>(r)));
            RepOutcome& out = outcomes[r];
            try {
                const SampledPath series = gen_dsi_study_series(spec, rep_seed);
                const auto table = quadratic_variations(series, part);
                const auto est = hurst_vector(table, spec.lambda);
                const double base = baseline_hurst(series, part);
                out.sq_err = (est.per_sub - h_true).array().square();
                out.base_mean = (base - h_mean) * (base - h_mean);
                out.base_max = (base - h_max) * (base - h_max);
                out.base_min = (base - h_min) * (base - h_min);
            } catch (const ZeroVariationError&) {
                out.dropped = true;
            }
        };

        if (config.n_threads <= 1) {
            for (int r = 0; r < config.n_reps; ++r) run_rep(r);
        } else {
            std::vector<std::thread> workers;
            const int chunk = (config.n_reps + config.n_threads - 1) / config.n_threads;
            for (int w = 0; w < config.n_threads; ++w) {
                const int lo = w * chunk;
                const int hi_r = std::min(config.n_reps, lo + chunk);
                if (lo >= hi_r) break;
                workers.emplace_back([&, lo, hi_r] {
                    for (int r = lo; r < hi_r; ++r) run_rep(r);
                });
            }
            for (auto& t : workers) t.join();
        }

        // Aggregation in repetition order keeps reports bit-stable.
        int kept = 0;
        for (int r = 0; r < config.n_reps; ++r) {
            const RepOutcome& out = outcomes[r];
            if (out.dropped) {
                ++report.dropped[hi];
                continue;
            }
            ++kept;
            report.mse_per_sub.row(static_cast<Eigen::Index>(hi)) += out.sq_err.transpose();
            report.mse_baseline_mean[hi] += out.base_mean;
            report.mse_baseline_max[hi] += out.base_max;
            report.mse_baseline_min[hi] += out.base_min;
        }
        if (kept == 0) continue;
        report.mse_per_sub.row(static_cast<Eigen::Index>(hi)) /= kept;
        report.mse_baseline_mean[hi] /= kept;
        report.mse_baseline_max[hi] /= kept;
        report.mse_baseline_min[hi] /= kept;
    }
    return report;
}

}  // namespace dsi
