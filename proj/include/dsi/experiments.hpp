#pragma once

#include "dsi/estimator.hpp"
#include "dsi/simulator.hpp"

namespace dsi {

// Repeated generate/estimate study: for each h in h_grid the true per-subinterval
// exponents are h + h_offsets, and both the per-subinterval estimator and the
// whole-interval baseline are scored by MSE over n_reps repetitions.
struct MseStudyConfig {
    StudySpec base;                // h_vec ignored; defines lambda, sigma, layout
    std::vector<double> h_grid;    // swept base values
    std::vector<double> h_offsets; // per-subinterval offsets added to each h
    int n_reps = 100;
    std::uint64_t seed = 0;
    int n_threads = 1;

    std::vector<std::string> violations() const;
    void validate() const;
};

struct StudyReport {
    std::vector<double> h_grid;
    Eigen::MatrixXd mse_per_sub;            // |h_grid| x q
    std::vector<double> mse_baseline_mean;  // baseline scored against mean(H_vec)
    std::vector<double> mse_baseline_max;   // ... against max(H_vec)
    std::vector<double> mse_baseline_min;   // ... against min(H_vec)
    std::vector<int> dropped;               // ZeroVariation repetitions per h
    int n_reps = 0;
    std::uint64_t seed = 0;
};

// Equal-count partition matching the study generator's layout.
ScalePartition study_partition(const StudySpec& spec);

StudyReport mse_study(const MseStudyConfig& config);

}  // namespace dsi
