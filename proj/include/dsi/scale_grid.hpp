#pragma once

#include <cstdint>
#include <vector>

#include "dsi/errors.hpp"

namespace dsi {

// Geometric partition of (1, lambda^m] into scale intervals B_j = (lambda^{j-1}, lambda^j]
// and subintervals B_{j,i} = (lambda^{j-1} s_{i-1}, lambda^{j-1} s_i], i = 1..q.
// Boundary ratios satisfy s_0 = 1 < s_1 < ... < s_q = lambda, so the q subintervals
// tile each scale interval exactly.
struct SamplingScheme {
    double lambda = 2.0;
    std::vector<double> boundaries;  // s_0 .. s_q
    int n_scales = 1;

    int q() const { return static_cast<int>(boundaries.size()) - 1; }

    // m_{j,i} = lambda^{j-1} (s_i - s_{i-1}); satisfies m_{j+1,i} = lambda * m_{j,i}.
    double sub_length(int j, int i) const;

    // Left and right endpoints of B_{j,i}.
    double sub_lo(int j, int i) const;
    double sub_hi(int j, int i) const;

    double t_max() const;

    // Returns every violated invariant; empty when valid.
    std::vector<std::string> violations() const;
    void validate() const;
};

// Location of a point t > 1 on the grid: t = lambda^{j-1} * s_star with
// s_{i-1} < s_star <= s_i (left-open, right-closed).
struct GridLocation {
    int j = 1;
    int i = 1;
    double s_star = 1.0;
};

struct InterpCoeff {
    double a = 1.0;      // (s_star - s_{i-1}) / (s_i - s_{i-1}), in (0, 1]
    double a_bar = 0.0;  // 1 - a
};

// Locates t in its subinterval. Boundary points within a 1e-9*t band resolve to the
// lower interval (right-closed convention). Throws OutOfRangeError for t <= 1 or
// t > lambda^n_scales.
GridLocation locate(double t, const SamplingScheme& scheme);

InterpCoeff interp_coeff(const GridLocation& loc, const SamplingScheme& scheme);

// Geometric resampling index map: b_start + floor(lambda^{j-1} * offset) for each
// offset, duplicates (possible after flooring) removed, order preserved.
std::vector<std::int64_t> sample_grid(std::int64_t b_start, double lambda, int j,
                                      const std::vector<std::int64_t>& offsets);

}  // namespace dsi
