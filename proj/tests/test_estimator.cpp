#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "dsi/estimator.hpp"
#include "dsi/experiments.hpp"
#include "dsi/rng.hpp"
#include "dsi/simulator.hpp"

using namespace dsi;

namespace {

SampledPath path_of(std::vector<double> values) {
    SampledPath p;
    p.values = std::move(values);
    p.times.resize(p.values.size());
    for (std::size_t k = 0; k < p.times.size(); ++k) p.times[k] = static_cast<double>(k);
    return p;
}

ScalePartition single_scale(std::ptrdiff_t n, double lambda = 2.0) {
    ScalePartition part;
    part.lambda = lambda;
    part.scale_endpoints = {0, n};
    part.sub_boundaries = {{}};
    return part;
}

}  // namespace

TEST_CASE("quadratic variations") {
    // constant series -> 0
    auto table = quadratic_variations(path_of({3, 3, 3, 3, 3}), single_scale(5));
    CHECK(table.ss(0, 0) == 0.0);
    // alternating 0,1 with l=5 -> 1
    table = quadratic_variations(path_of({0, 1, 0, 1, 0}), single_scale(5));
    CHECK(table.ss(0, 0) == doctest::Approx(1.0));
    // (0, 2, 3), l=3 -> (4+1)/2 = 2.5
    table = quadratic_variations(path_of({0, 2, 3}), single_scale(3));
    CHECK(table.ss(0, 0) == doctest::Approx(2.5));
    CHECK(table.counts(0, 0) == 3);
    CHECK_THROWS_AS(quadratic_variations(path_of({1}), single_scale(1)), TooFewPointsError);
}

TEST_CASE("differences never straddle subinterval boundaries") {
    // jump of 100 at the boundary must not enter either SS
    ScalePartition part;
    part.lambda = 2.0;
    part.scale_endpoints = {0, 6};
    part.sub_boundaries = {{3}};
    const auto table =
        quadratic_variations(path_of({0, 1, 2, 102, 103, 104}), part);
    CHECK(table.ss(0, 0) == doctest::Approx(1.0));
    CHECK(table.ss(0, 1) == doctest::Approx(1.0));
}

TEST_CASE("hurst_vector from quadratic variation tables") {
    QuadraticVariationTable table;
    table.ss.resize(4, 1);
    table.ss << 1, 4, 16, 64;
    table.counts = Eigen::MatrixXi::Constant(4, 1, 10);
    auto est = hurst_vector(table, 4.0);
    CHECK(est.per_pair(0, 0) == doctest::Approx(0.5));
    CHECK(est.per_pair(1, 0) == doctest::Approx(0.5));
    CHECK(est.per_pair(2, 0) == doctest::Approx(0.5));
    CHECK(est.per_sub(0) == doctest::Approx(0.5));

    // constant SS -> 0
    table.ss.setConstant(3.7);
    est = hurst_vector(table, 4.0);
    CHECK(est.per_sub(0) == doctest::Approx(0.0));

    // exact lambda^{2h} ratios
    const double h = 0.35, lambda = 1.66;
    table.ss(0, 0) = 2.0;
    for (int j = 1; j < 4; ++j) table.ss(j, 0) = table.ss(j - 1, 0) * std::pow(lambda, 2 * h);
    est = hurst_vector(table, lambda);
    CHECK(est.per_sub(0) == doctest::Approx(h).epsilon(1e-13));

    table.ss(2, 0) = 0.0;
    CHECK_THROWS_AS(hurst_vector(table, lambda), ZeroVariationError);
}

TEST_CASE("baseline equals the q=1 collapse") {
    StudySpec spec;
    spec.lambda = 2.0;
    spec.h_vec = {0.45, 0.45, 0.45, 0.45};
    spec.sigma_vec = {1.0, 1.0, 1.0, 1.0};
    spec.points_per_scale = 80;
    spec.n_scales = 4;
    spec.deterministic_increments = true;
    const auto series = gen_dsi_study_series(spec, 0);
    const auto part = study_partition(spec);
    // constant H and sigma: whole-interval quadratic variations scale exactly
    CHECK(baseline_hurst(series, part) == doctest::Approx(0.45).epsilon(1e-13));
}

TEST_CASE("scale and shift invariance of the estimates") {
    StudySpec spec;
    spec.lambda = 2.0;
    spec.h_vec = {0.2, 0.5, 0.7, 0.9};
    spec.sigma_vec = {1.0, 1.0, 1.0, 1.0};
    spec.points_per_scale = 80;
    spec.n_scales = 4;
    const auto series = gen_dsi_study_series(spec, 21);
    const auto part = study_partition(spec);
    const auto base = hurst_vector(quadratic_variations(series, part), spec.lambda);

    SampledPath scaled = series;
    for (auto& v : scaled.values) v = 5.0 * v + 12.0;
    const auto other = hurst_vector(quadratic_variations(scaled, part), spec.lambda);
    for (int i = 0; i < 4; ++i)
        CHECK(other.per_sub(i) == doctest::Approx(base.per_sub(i)).epsilon(1e-12));

    SampledPath shifted = series;
    for (auto& v : shifted.values) v += 3.25;
    const auto shifted_est = hurst_vector(quadratic_variations(shifted, part), spec.lambda);
    for (int i = 0; i < 4; ++i)
        CHECK(shifted_est.per_sub(i) == doctest::Approx(base.per_sub(i)).epsilon(1e-12));

    // With H=1 the increments are signed powers of two, so every sum and the
    // shift by 3.25 are exact and the shifted estimate matches bitwise.
    StudySpec exact_spec = spec;
    exact_spec.h_vec = {1.0, 1.0, 1.0, 1.0};
    exact_spec.deterministic_increments = true;
    const auto exact_series = gen_dsi_study_series(exact_spec, 0);
    const auto exact_base = hurst_vector(quadratic_variations(exact_series, part), spec.lambda);
    SampledPath exact_shifted = exact_series;
    for (auto& v : exact_shifted.values) v += 3.25;
    const auto exact_est = hurst_vector(quadratic_variations(exact_shifted, part), spec.lambda);
    CHECK((exact_est.per_sub.array() == exact_base.per_sub.array()).all());
}

TEST_CASE("resample_series reproduces the S&P subinterval layout") {
    SampledPath raw = path_of(std::vector<double>(700, 0.0));
    std::mt19937_64 eng(3);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (auto& v : raw.values) v = gauss(eng);

    std::vector<std::int64_t> offsets(42);
    for (int k = 0; k < 42; ++k) offsets[k] = k;
    const auto result = resample_series(raw, {200, 246, 317, 431}, 1.66, offsets,
                                        {6, 12, 19, 26, 33}, AnchorDirection::Forward);
    CHECK(result.partition.m() == 4);
    CHECK(result.partition.q() == 6);
    const int expected_counts[6] = {6, 6, 7, 7, 7, 9};
    for (int j = 1; j <= 4; ++j) {
        for (int i = 1; i <= 6; ++i) {
            const auto [lo, hi] = result.partition.sub_range(j, i);
            CHECK(hi - lo == expected_counts[i - 1]);
        }
    }
    // first scale samples raw positions 200..241 verbatim
    for (int k = 0; k < 42; ++k)
        CHECK(result.series.values[k] == raw.values[200 + k]);
}

TEST_CASE("resample_series supports backward anchoring (Dow layout)") {
    SampledPath raw = path_of(std::vector<double>(3168, 0.0));
    for (std::size_t k = 0; k < raw.values.size(); ++k) raw.values[k] = std::sin(0.01 * k);

    std::vector<std::int64_t> offsets(113);
    for (int k = 0; k < 113; ++k) offsets[k] = k;
    const auto result = resample_series(raw, {1853, 2225, 2503, 2671}, 1.493, offsets, {27, 70, 95},
                                        AnchorDirection::Backward);
    CHECK(result.partition.m() == 4);
    CHECK(result.partition.q() == 4);
    const int expected_counts[4] = {27, 43, 25, 18};
    for (int j = 1; j <= 4; ++j)
        for (int i = 1; i <= 4; ++i) {
            const auto [lo, hi] = result.partition.sub_range(j, i);
            CHECK(hi - lo == expected_counts[i - 1]);
        }
    // the last scale interval is sampled densely: 2671, 2672, ...
    const auto [lo4, hi4] = result.partition.sub_range(4, 1);
    CHECK(result.series.values[lo4] == raw.values[2671]);
    CHECK(result.series.values[lo4 + 1] == raw.values[2672]);
}

TEST_CASE("resample_series degenerate lambda=1 keeps identical spacing") {
    SampledPath raw = path_of(std::vector<double>(100, 0.0));
    for (std::size_t k = 0; k < raw.values.size(); ++k) raw.values[k] = static_cast<double>(k);
    const auto result =
        resample_series(raw, {0, 20, 40}, 1.0, {0, 2, 4, 6, 8}, {4}, AnchorDirection::Forward);
    for (int j = 1; j <= 3; ++j) {
        const auto [lo, hi] = result.partition.sub_range(j, 1);
        CHECK(hi - lo == 2);  // offsets 0,2 below sub-offset 4
    }
    CHECK(result.series.values[0] == 0.0);
    CHECK(result.series.values[1] == 2.0);
}

TEST_CASE("resample_series rejects indices beyond the data") {
    SampledPath raw = path_of(std::vector<double>(50, 1.0));
    CHECK_THROWS_AS(
        resample_series(raw, {40}, 2.0, {0, 5, 20}, {5}, AnchorDirection::Forward),
        IndexOutOfDataError);
}

TEST_CASE("merge_groups") {
    StudySpec spec;
    spec.lambda = 2.0;
    spec.h_vec = {0.2, 0.4, 0.6, 0.8};
    spec.sigma_vec = {1.0, 1.0, 1.0, 1.0};
    spec.points_per_scale = 80;
    spec.n_scales = 4;
    const auto series = gen_dsi_study_series(spec, 9);
    const auto part = study_partition(spec);
    const auto direct = hurst_vector(quadratic_variations(series, part), spec.lambda);

    // singleton grouping reproduces hurst_vector bit-for-bit
    const auto singles = merge_groups(series, part, {{1}, {2}, {3}, {4}});
    CHECK((singles.per_sub.array() == direct.per_sub.array()).all());
    CHECK((singles.per_pair.array() == direct.per_pair.array()).all());

    // one group of all collapses to the baseline
    const auto whole = merge_groups(series, part, {{1, 2, 3, 4}});
    CHECK(whole.per_sub(0) == doctest::Approx(baseline_hurst(series, part)).epsilon(1e-14));

    CHECK_THROWS_AS(merge_groups(series, part, {{1, 3}, {2, 4}}), NonContiguousGroupError);
    CHECK_THROWS_AS(merge_groups(series, part, {{1, 2}}), NonContiguousGroupError);
    CHECK_THROWS_AS(merge_groups(series, part, std::vector<std::vector<int>>{{1, 2}, {}, {3, 4}}),
                    NonContiguousGroupError);
}

TEST_CASE("suggest_grouping merges near-equal adjacent estimates") {
    HurstEstimate est;
    est.per_sub.resize(6);
    est.per_sub << 0.24, 0.23, 0.21, 0.24, 0.07, 0.05;
    const auto groups = suggest_grouping(est, 0.05);
    CHECK(groups.size() == 2);
    CHECK(groups[0] == std::vector<int>{1, 2, 3, 4});
    CHECK(groups[1] == std::vector<int>{5, 6});
}

namespace {

// Uniform-in-time series over (1, lambda^m] whose increments carry the exact
// per-subinterval scaling, with alternating signs (or Gaussian when eng != nullptr).
SampledPath uniform_time_series(double lambda, int m, const std::vector<double>& h_vec, int n,
                                std::mt19937_64* eng) {
    const int q = static_cast<int>(h_vec.size());
    SampledPath out;
    const double t0 = 1.0;
    const double span = std::pow(lambda, m) - t0;
    std::normal_distribution<double> gauss(0.0, 1.0);
    double value = 0.0;
    for (int k = 1; k <= n; ++k) {
        const double t = t0 + span * k / n;
        // scale interval containing t (right-closed)
        int j = static_cast<int>(std::ceil(std::log(t) / std::log(lambda) - 1e-12));
        j = std::max(1, std::min(m, j));
        const double s = t / std::pow(lambda, j - 1);
        int i = static_cast<int>(std::ceil((s - 1.0) / ((lambda - 1.0) / q) - 1e-12));
        i = std::max(1, std::min(q, i));
        const double sd = std::pow(lambda, (j - 1) * h_vec[i - 1]);
        const double incr = eng ? sd * gauss(*eng) : (k % 2 ? sd : -sd);
        value += incr;
        out.times.push_back(t);
        out.values.push_back(value);
    }
    return out;
}

}  // namespace

TEST_CASE("estimate_scale finds the true scale of a deterministic series") {
    const auto series = uniform_time_series(2.0, 4, {0.3, 0.5, 0.7, 0.9}, 600, nullptr);
    const auto scan = estimate_scale(series, 1.5, 2.5, 21, 4, 4);
    CHECK(scan.lambda_hat == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_FALSE(scan.no_scale_preference);
}

TEST_CASE("estimate_scale flags white noise as having no scale preference") {
    std::mt19937_64 eng(17);
    std::normal_distribution<double> gauss(0.0, 1.0);
    int flagged = 0;
    const int runs = 100;
    for (int r = 0; r < runs; ++r) {
        SampledPath noise;
        for (int k = 0; k < 16000; ++k) {
            noise.times.push_back(1.0 + 0.01 * (k + 1));
            noise.values.push_back(gauss(eng));
        }
        const auto scan = estimate_scale(noise, 1.5, 2.5, 11, 4, 4);
        if (scan.no_scale_preference) ++flagged;
    }
    CHECK(flagged >= 90);
}

TEST_CASE("estimate_scale recovers lambda=2 from study series in most seeded runs") {
    StudySpec spec;
    spec.lambda = 2.0;
    spec.h_vec = {0.2, 0.6, 1.0, 1.4};
    spec.sigma_vec = {1.0, 1.0, 1.0, 1.0};
    spec.points_per_scale = 1000;
    spec.n_scales = 4;
    int hits = 0;
    const int runs = 100;
    for (int r = 0; r < runs; ++r) {
        const auto series = gen_dsi_study_series(spec, 5000 + r);
        const auto scan = estimate_scale(series, 1.5, 2.5, 21, 4, 4);
        if (scan.lambda_hat >= 1.9 && scan.lambda_hat <= 2.1) ++hits;
    }
    CHECK(hits >= 90);
}

TEST_CASE("estimate_scale argument validation") {
    SampledPath tiny = path_of({1, 2, 3});
    CHECK_THROWS_AS(estimate_scale(tiny, 1.5, 2.5, 10), TooFewPointsError);
    const auto series = uniform_time_series(2.0, 4, {0.5, 0.5, 0.5, 0.5}, 400, nullptr);
    CHECK_THROWS_AS(estimate_scale(series, 0.9, 2.5, 10), ConfigError);
    CHECK_THROWS_AS(estimate_scale(series, 1.5, 1.5, 10), RangeTooNarrowError);
    CHECK_THROWS_AS(estimate_scale(series, 1.5, 2.5, 1), RangeTooNarrowError);
}
