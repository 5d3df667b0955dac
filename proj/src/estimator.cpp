#include "dsi/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "dsi/scale_grid.hpp"

namespace dsi {

std::pair<std::ptrdiff_t, std::ptrdiff_t> ScalePartition::sub_range(int j, int i) const {
    const auto& interior = sub_boundaries[j - 1];
    const std::ptrdiff_t begin = (i == 1) ? scale_endpoints[j - 1] : interior[i - 2];
    const std::ptrdiff_t end = (i == q()) ? scale_endpoints[j] : interior[i - 1];
    return {begin, end};
}

std::vector<std::string> ScalePartition::violations() const {
    std::vector<std::string> v;
    if (scale_endpoints.size() < 2) {
        v.push_back("partition needs at least one scale interval");
        return v;
    }
    for (std::size_t k = 1; k < scale_endpoints.size(); ++k)
        if (!(scale_endpoints[k] > scale_endpoints[k - 1])) {
            v.push_back("scale endpoints must be strictly increasing");
            break;
        }
    if (static_cast<int>(sub_boundaries.size()) != m())
        v.push_back("sub_boundaries must have one list per scale interval");
    else {
        const std::size_t nq = sub_boundaries.front().size();
        for (int j = 1; j <= m(); ++j) {
            const auto& interior = sub_boundaries[j - 1];
            if (interior.size() != nq) {
                v.push_back("every scale interval must split into the same number of subintervals");
                break;
            }
            std::ptrdiff_t prev = scale_endpoints[j - 1];
            bool ok = true;
            for (std::ptrdiff_t b : interior) {
                if (!(b > prev)) ok = false;
                prev = b;
            }
            if (!(scale_endpoints[j] > prev)) ok = false;
            if (!ok) {
                v.push_back("subinterval boundaries must be strictly increasing inside scale interval " +
                            std::to_string(j));
                break;
            }
        }
    }
    if (!(lambda > 0.0)) v.push_back("lambda must be positive");
    return v;
}

void ScalePartition::validate() const {
    auto v = violations();
    if (!v.empty()) throw ConfigError(std::move(v));
}

QuadraticVariationTable quadratic_variations(const SampledPath& series, const ScalePartition& part) {
    part.validate();
    const int m = part.m();
    const int q = part.q();
    const auto n = static_cast<std::ptrdiff_t>(series.values.size());
    if (part.scale_endpoints.front() < 0 || part.scale_endpoints.back() > n)
        throw OutOfRangeError("partition exceeds series length");

    QuadraticVariationTable table;
    table.ss.resize(m, q);
    table.counts.resize(m, q);
    for (int j = 1; j <= m; ++j) {
        for (int i = 1; i <= q; ++i) {
            const auto [lo, hi] = part.sub_range(j, i);
            const std::ptrdiff_t count = hi - lo;
            if (count < 2)
                throw TooFewPointsError("subinterval (" + std::to_string(j) + ", " +
                                        std::to_string(i) + ") has fewer than 2 points");
            double acc = 0.0;
            for (std::ptrdiff_t k = lo + 1; k < hi; ++k) {
                const double d = series.values[k] - series.values[k - 1];
                acc += d * d;
            }
            table.ss(j - 1, i - 1) = acc / static_cast<double>(count - 1);
            table.counts(j - 1, i - 1) = static_cast<int>(count);
        }
    }
    return table;
}

HurstEstimate hurst_vector(const QuadraticVariationTable& table, double lambda) {
    const int m = static_cast<int>(table.ss.rows());
    const int q = static_cast<int>(table.ss.cols());
    if (m < 2) throw ConfigError({"at least two scale intervals are required"});
    if (!(lambda > 1.0)) throw ConfigError({"lambda must be > 1"});
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < q; ++i)
            if (!(table.ss(j, i) > 0.0)) throw ZeroVariationError(j + 1, i + 1);

    HurstEstimate est;
    est.lambda_used = lambda;
    est.per_pair.resize(m - 1, q);
    est.per_sub.resize(q);
    const double denom = 2.0 * std::log(lambda);
    for (int i = 0; i < q; ++i) {
        for (int j = 0; j + 1 < m; ++j)
            est.per_pair(j, i) = std::log(table.ss(j + 1, i) / table.ss(j, i)) / denom;
        est.per_sub(i) = est.per_pair.col(i).mean();
    }
    return est;
}

// Collapses the subinterval structure: one quadratic variation per scale interval.
static ScalePartition collapse_partition(const ScalePartition& part) {
    ScalePartition whole;
    whole.scale_endpoints = part.scale_endpoints;
    whole.sub_boundaries.assign(part.m(), {});
    whole.lambda = part.lambda;
    return whole;
}

double baseline_hurst(const SampledPath& series, const ScalePartition& part) {
    const auto table = quadratic_variations(series, collapse_partition(part));
    return hurst_vector(table, part.lambda).per_sub(0);
}

ResampleResult resample_series(const SampledPath& raw, const std::vector<std::int64_t>& scale_starts,
                               double lambda, const std::vector<std::int64_t>& offsets,
                               const std::vector<std::int64_t>& sub_offsets,
                               AnchorDirection direction) {
    raw.validate();
    if (scale_starts.empty()) throw ConfigError({"at least one scale start is required"});
    if (offsets.size() < 2) throw ConfigError({"at least two offsets are required"});
    for (std::size_t k = 1; k < offsets.size(); ++k)
        if (!(offsets[k] > offsets[k - 1])) throw ConfigError({"offsets must be strictly increasing"});
    for (std::size_t k = 0; k < sub_offsets.size(); ++k)
        if (sub_offsets[k] <= (k == 0 ? offsets.front() : sub_offsets[k - 1]) ||
            sub_offsets[k] > offsets.back())
            throw ConfigError({"sub_offsets must be strictly increasing interior offsets"});

    const int m = static_cast<int>(scale_starts.size());
    const auto raw_n = static_cast<std::int64_t>(raw.values.size());

    ResampleResult out;
    out.partition.lambda = lambda;
    out.partition.scale_endpoints.push_back(0);
    out.series.meta = raw.meta;

    for (int j = 1; j <= m; ++j) {
        const int exponent = direction == AnchorDirection::Forward ? j : m - j + 1;
        const auto indices = sample_grid(scale_starts[j - 1], lambda, exponent, offsets);

        // Offsets that survived deduplication, aligned with `indices`.
        std::vector<std::int64_t> kept_off;
        kept_off.reserve(indices.size());
        {
            const double factor = std::pow(lambda, exponent - 1);
            std::int64_t prev = std::numeric_limits<std::int64_t>::min();
            for (std::int64_t off : offsets) {
                const auto idx = scale_starts[j - 1] +
                                 static_cast<std::int64_t>(std::floor(factor * static_cast<double>(off)));
                if (idx != prev) kept_off.push_back(off);
                prev = idx;
            }
        }

        const std::ptrdiff_t base = static_cast<std::ptrdiff_t>(out.series.values.size());
        for (std::int64_t idx : indices) {
            if (idx < 0 || idx >= raw_n)
                throw IndexOutOfDataError("mapped index " + std::to_string(idx) +
                                          " exceeds the raw series (length " +
                                          std::to_string(raw_n) + ")");
            out.series.times.push_back(raw.times[static_cast<std::size_t>(idx)]);
            out.series.values.push_back(raw.values[static_cast<std::size_t>(idx)]);
        }

        std::vector<std::ptrdiff_t> interior;
        for (std::int64_t s : sub_offsets) {
            const auto pos = std::lower_bound(kept_off.begin(), kept_off.end(), s) - kept_off.begin();
            interior.push_back(base + pos);
        }
        out.partition.sub_boundaries.push_back(std::move(interior));
        out.partition.scale_endpoints.push_back(base + static_cast<std::ptrdiff_t>(indices.size()));
    }
    out.partition.validate();
    return out;
}

HurstEstimate merge_groups(const SampledPath& series, const ScalePartition& part,
                           const std::vector<std::vector<int>>& grouping) {
    part.validate();
    const int q = part.q();
    int expect = 1;
    for (const auto& group : grouping) {
        if (group.empty()) throw NonContiguousGroupError("empty group");
        for (int idx : group) {
            if (idx != expect)
                throw NonContiguousGroupError(
                    "grouping must be an ordered partition of 1.." + std::to_string(q));
            ++expect;
        }
    }
    if (expect != q + 1)
        throw NonContiguousGroupError("grouping must cover every subinterval 1.." + std::to_string(q));

    ScalePartition merged;
    merged.lambda = part.lambda;
    merged.scale_endpoints = part.scale_endpoints;
    for (int j = 1; j <= part.m(); ++j) {
        std::vector<std::ptrdiff_t> interior;
        for (std::size_t g = 0; g + 1 < grouping.size(); ++g) {
            const int last = grouping[g].back();
            interior.push_back(part.sub_boundaries[j - 1][last - 1]);
        }
        merged.sub_boundaries.push_back(std::move(interior));
    }

    auto est = hurst_vector(quadratic_variations(series, merged), merged.lambda);
    est.baseline = baseline_hurst(series, merged);
    return est;
}

std::vector<std::vector<int>> suggest_grouping(const HurstEstimate& est, double eps) {
    std::vector<std::vector<int>> groups;
    for (int i = 1; i <= est.per_sub.size(); ++i) {
        if (!groups.empty() &&
            std::abs(est.per_sub(i - 1) - est.per_sub(groups.back().front() - 1)) <= eps) {
            groups.back().push_back(i);
        } else {
            groups.push_back({i});
        }
    }
    return groups;
}

ScaleScanResult estimate_scale(const SampledPath& series, double lo, double hi, int n_candidates,
                               int m, int q) {
    series.validate();
    if (!(lo > 1.0)) throw ConfigError({"candidate range must start above 1"});
    if (!(hi > lo) || n_candidates < 2)
        throw RangeTooNarrowError("need hi > lo and at least 2 candidates");
    if (series.times.size() < static_cast<std::size_t>(2 * m * q))
        throw TooFewPointsError("series too short for the requested partition");

    const auto& times = series.times;
    const auto n = static_cast<std::ptrdiff_t>(times.size());
    // One spacing before the first sample approximates the interval start.
    const double t_begin = times[0] - (times[1] - times[0]);
    const double t_end = times.back();

    ScaleScanResult result;
    const double inf = std::numeric_limits<double>::infinity();
    for (int c = 0; c < n_candidates; ++c) {
        const double lam = lo + (hi - lo) * c / (n_candidates - 1);
        result.candidates.push_back(lam);

        double total = 0.0;
        for (int j = 0; j < m; ++j) total += std::pow(lam, j);
        const double unit = (t_end - t_begin) / total;

        ScalePartition part;
        part.lambda = lam;
        part.scale_endpoints.push_back(0);
        double tau = t_begin;
        bool ok = true;
        for (int j = 1; j <= m && ok; ++j) {
            const double len = unit * std::pow(lam, j - 1);
            std::vector<std::ptrdiff_t> interior;
            for (int i = 1; i < q; ++i) {
                const double edge = tau + len * i / q;
                interior.push_back(std::upper_bound(times.begin(), times.end(), edge) - times.begin());
            }
            tau += len;
            std::ptrdiff_t end =
                (j == m) ? n : std::upper_bound(times.begin(), times.end(), tau) - times.begin();
            // Require >= 2 points per subinterval; otherwise the candidate is unusable.
            std::ptrdiff_t prev = part.scale_endpoints.back();
            for (std::ptrdiff_t b : interior) {
                if (b - prev < 2) ok = false;
                prev = b;
            }
            if (end - prev < 2) ok = false;
            part.sub_boundaries.push_back(std::move(interior));
            part.scale_endpoints.push_back(end);
        }
        if (!ok) {
            result.scores.push_back(inf);
            continue;
        }
        try {
            const auto est = hurst_vector(quadratic_variations(series, part), lam);
            double score = 0.0;
            for (int i = 0; i < q; ++i) {
                const auto col = est.per_pair.col(i);
                score += (col.array() - col.mean()).square().mean();
            }
            result.scores.push_back(score / q);
        } catch (const Error&) {
            result.scores.push_back(inf);
        }
    }

    double best = inf, worst = -inf;
    std::size_t best_idx = 0;
    bool any = false;
    for (std::size_t c = 0; c < result.scores.size(); ++c) {
        const double s = result.scores[c];
        if (!std::isfinite(s)) continue;
        any = true;
        if (s < best) {
            best = s;
            best_idx = c;
        }
        worst = std::max(worst, s);
    }
    if (!any) throw TooFewPointsError("no scale candidate admits the partition");
    result.lambda_hat = result.candidates[best_idx];
    result.no_scale_preference = (worst - best) < 0.05;
    return result;
}

}  // namespace dsi
