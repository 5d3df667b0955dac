#pragma once

#include <cstdint>
#include <limits>

#include <Eigen/Dense>

#include "dsi/lamperti.hpp"

namespace dsi {

// Partition of a sampled series into m scale intervals of q subintervals each,
// expressed as 0-based positions into the series. Scale interval j covers
// positions [scale_endpoints[j-1], scale_endpoints[j]); sub_boundaries[j-1]
// holds the q-1 interior split positions.
struct ScalePartition {
    std::vector<std::ptrdiff_t> scale_endpoints;              // m+1 positions
    std::vector<std::vector<std::ptrdiff_t>> sub_boundaries;  // m lists of q-1 positions
    double lambda = 2.0;

    int m() const { return static_cast<int>(scale_endpoints.size()) - 1; }
    int q() const {
        return sub_boundaries.empty() ? 1 : static_cast<int>(sub_boundaries.front().size()) + 1;
    }
    // [begin, end) positions of subinterval (j, i), both 1-based.
    std::pair<std::ptrdiff_t, std::ptrdiff_t> sub_range(int j, int i) const;

    std::vector<std::string> violations() const;
    void validate() const;
};

struct QuadraticVariationTable {
    Eigen::MatrixXd ss;      // m x q, mean squared consecutive difference
    Eigen::MatrixXi counts;  // m x q, points per subinterval
};

struct HurstEstimate {
    Eigen::VectorXd per_sub;   // length q
    Eigen::MatrixXd per_pair;  // (m-1) x q, mu_{j,i}
    double baseline = std::numeric_limits<double>::quiet_NaN();
    double lambda_used = 2.0;
};

// SS_{j,i}: divisor l_i - 1; differences never straddle subinterval boundaries.
QuadraticVariationTable quadratic_variations(const SampledPath& series, const ScalePartition& part);

// mu_{j,i} = log(SS_{j+1,i} / SS_{j,i}) / (2 log lambda); H_i = mean over j.
HurstEstimate hurst_vector(const QuadraticVariationTable& table, double lambda);

// Whole-scale-interval variant (q = 1 collapse), averaged over the m-1 ratios.
double baseline_hurst(const SampledPath& series, const ScalePartition& part);

enum class AnchorDirection {
    Forward,   // scale j index factor lambda^{j-1} (offsets anchored at the first scale)
    Backward,  // scale j index factor lambda^{m-j} (offsets anchored at the last scale)
};

struct ResampleResult {
    SampledPath series;
    ScalePartition partition;
};

// Geometric resampling b_j + floor(lambda^. * offset) per scale interval.
// scale_starts are 0-based positions into the raw series; sub_offsets are the
// q-1 interior offsets (in the offset domain) splitting each scale interval.
ResampleResult resample_series(const SampledPath& raw, const std::vector<std::int64_t>& scale_starts,
                               double lambda, const std::vector<std::int64_t>& offsets,
                               const std::vector<std::int64_t>& sub_offsets,
                               AnchorDirection direction = AnchorDirection::Forward);

// Recompute SS and the Hurst vector with contiguous groups of subintervals merged.
// grouping is an ordered partition of 1..q, e.g. {{1,2,3,4},{5,6}}.
HurstEstimate merge_groups(const SampledPath& series, const ScalePartition& part,
                           const std::vector<std::vector<int>>& grouping);

// Suggests a grouping by greedily merging adjacent subintervals whose estimates
// differ by at most eps. Advisory only; merging is otherwise user-specified.
std::vector<std::vector<int>> suggest_grouping(const HurstEstimate& est, double eps = 0.05);

struct ScaleScanResult {
    double lambda_hat = 0.0;
    std::vector<double> candidates;
    std::vector<double> scores;  // variance of mu_{j,i} across j, averaged over i
    bool no_scale_preference = false;
};

// Heuristic grid search for the preferred scale: equal-ratio scale intervals in
// time from the series start, equal-ratio subintervals, scored by the spread of
// the per-pair Hurst ratios. Not part of any reproduction path; those take
// lambda as an input.
ScaleScanResult estimate_scale(const SampledPath& series, double lo, double hi, int n_candidates,
                               int m = 4, int q = 4);

}  // namespace dsi
