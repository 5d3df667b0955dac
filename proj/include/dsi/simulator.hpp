#pragma once

#include <cstdint>

#include "dsi/covariance.hpp"
#include "dsi/lamperti.hpp"

namespace dsi {

// Piecewise-scaling study generator: points_per_scale equally spaced points per
// scale interval, increments inside subinterval i of scale interval j drawn with
// standard deviation lambda^{(j-1) H_i} sigma_i, so E[SS_{j+1,i}] / E[SS_{j,i}]
// equals lambda^{2 H_i} by construction.
struct StudySpec {
    double lambda = 2.0;
    std::vector<double> h_vec;      // per-subinterval Hurst exponents, in (0, 1.5]
    std::vector<double> sigma_vec;  // base increment standard deviations, positive
    int points_per_scale = 80;
    int n_scales = 4;
    // Replaces each increment by its standard deviation with alternating sign;
    // quadratic-variation ratios then equal lambda^{2 H_i} exactly.
    bool deterministic_increments = false;

    int q() const { return static_cast<int>(h_vec.size()); }

    std::vector<std::string> violations() const;
    void validate() const;

    // Point count of subinterval i (1-based) within one scale interval.
    int sub_count(int i) const;
};

// Exact Gaussian draws from the closed-form mean and covariance: n rows, one per
// path, columns follow the grid. Deterministic in (seed); independent of n_threads.
Eigen::MatrixXd sample_exact_paths(const SubsidiaryModel& model, const std::vector<double>& grid,
                                   int n, std::uint64_t seed, int n_threads = 1);

SampledPath gen_dsi_study_series(const StudySpec& spec, std::uint64_t seed);

struct McCovEstimate {
    double estimate = 0.0;
    double standard_error = 0.0;
};

// Unbiased sample covariance between the grid columns at t and u, with its
// standard error. Throws InsufficientPathsError for fewer than two paths.
McCovEstimate mc_covariance(const Eigen::MatrixXd& paths, const std::vector<double>& grid,
                            double t, double u);

}  // namespace dsi
