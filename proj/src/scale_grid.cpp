#include "dsi/scale_grid.hpp"

#include <algorithm>
#include <cmath>

namespace dsi {

double SamplingScheme::sub_length(int j, int i) const {
    return std::pow(lambda, j - 1) * (boundaries[i] - boundaries[i - 1]);
}

double SamplingScheme::sub_lo(int j, int i) const {
    return std::pow(lambda, j - 1) * boundaries[i - 1];
}

double SamplingScheme::sub_hi(int j, int i) const {
    return std::pow(lambda, j - 1) * boundaries[i];
}

double SamplingScheme::t_max() const { return std::pow(lambda, n_scales); }

std::vector<std::string> SamplingScheme::violations() const {
    std::vector<std::string> v;
    if (!(lambda > 1.0)) v.push_back("lambda must be > 1");
    if (boundaries.size() < 2) {
        v.push_back("boundaries must contain at least s_0 and s_1");
        return v;
    }
    if (boundaries.front() != 1.0) v.push_back("boundaries must start at s_0 = 1");
    if (boundaries.back() != lambda) v.push_back("boundaries must end at s_q = lambda");
    for (std::size_t k = 1; k < boundaries.size(); ++k) {
        if (!(boundaries[k] > boundaries[k - 1])) {
            v.push_back("boundaries must be strictly increasing");
            break;
        }
    }
    if (n_scales < 1) v.push_back("n_scales must be positive");
    return v;
}

void SamplingScheme::validate() const {
    auto v = violations();
    if (!v.empty()) throw ConfigError(std::move(v));
}

GridLocation locate(double t, const SamplingScheme& scheme) {
    const double lambda = scheme.lambda;
    const double tol = 1e-9 * t;
    if (!(t > 1.0) || t > scheme.t_max() + tol)
        throw OutOfRangeError("t out of range (1, lambda^m]: t = " + std::to_string(t));

    int j = static_cast<int>(std::ceil(std::log(t) / std::log(lambda)));
    if (j < 1) j = 1;
    // Snap boundary points to the lower (right-closed) interval.
    if (j > 1 && std::abs(t - std::pow(lambda, j - 1)) <= tol) --j;
    while (t > std::pow(lambda, j) + tol) ++j;
    if (j > scheme.n_scales) j = scheme.n_scales;

    double s_star = t / std::pow(lambda, j - 1);
    const int q = scheme.q();
    const double stol = 1e-9 * s_star;
    int i = 1;
    while (i < q && s_star > scheme.boundaries[i] + stol) ++i;
    // Clamp onto the boundary when within tolerance so interpolation hits 0/1 exactly.
    if (std::abs(s_star - scheme.boundaries[i]) <= stol) s_star = scheme.boundaries[i];
    if (std::abs(s_star - scheme.boundaries[i - 1]) <= stol) s_star = scheme.boundaries[i - 1];
    return GridLocation{j, i, s_star};
}

InterpCoeff interp_coeff(const GridLocation& loc, const SamplingScheme& scheme) {
    const double lo = scheme.boundaries[loc.i - 1];
    const double hi = scheme.boundaries[loc.i];
    double a = (loc.s_star - lo) / (hi - lo);
    a = std::clamp(a, 0.0, 1.0);
    return InterpCoeff{a, 1.0 - a};
}

std::vector<std::int64_t> sample_grid(std::int64_t b_start, double lambda, int j,
                                      const std::vector<std::int64_t>& offsets) {
    const double factor = std::pow(lambda, j - 1);
    std::vector<std::int64_t> out;
    out.reserve(offsets.size());
    for (std::int64_t off : offsets) {
        const std::int64_t idx = b_start + static_cast<std::int64_t>(std::floor(factor * static_cast<double>(off)));
        if (out.empty() || out.back() != idx) out.push_back(idx);
    }
    return out;
}

}  // namespace dsi
