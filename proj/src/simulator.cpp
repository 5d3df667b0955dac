#include "dsi/simulator.hpp"

#include <cmath>
#include <thread>

#include "dsi/rng.hpp"

namespace dsi {

std::vector<std::string> StudySpec::violations() const {
    std::vector<std::string> v;
    if (!(lambda > 1.0)) v.push_back("lambda must be > 1");
    if (h_vec.empty()) v.push_back("H_vec must be non-empty");
    for (double h : h_vec)
        if (!(h > 0.0) || h > 1.5) {
            v.push_back("H_vec entries must lie in (0, 1.5]");
            break;
        }
    if (sigma_vec.size() != h_vec.size())
        v.push_back("sigma_vec must have the same length as H_vec");
    for (double s : sigma_vec)
        if (!(s > 0.0)) {
            v.push_back("sigma_vec entries must be positive");
            break;
        }
    if (!h_vec.empty() && points_per_scale < 2 * q())
        v.push_back("points_per_scale must be at least 2q");
    if (n_scales < 1) v.push_back("n_scales must be positive");
    return v;
}

void StudySpec::validate() const {
    auto v = violations();
    if (!v.empty()) throw ConfigError(std::move(v));
}

int StudySpec::sub_count(int i) const {
    const int nq = q();
    const auto edge = [&](int k) { return (k * points_per_scale) / nq; };
    return edge(i) - edge(i - 1);
}

static Eigen::MatrixXd factor_covariance(const SubsidiaryModel& model,
                                         const std::vector<double>& grid) {
    const Eigen::MatrixXd sigma = cov_matrix(model, grid).cov;
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() == Eigen::Success) return llt.matrixL();
    // Rank-deficient covariances (exactly scale-correlated nodes) land here.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma);
    if (es.info() != Eigen::Success)
        throw NotPsdError("eigendecomposition of covariance matrix failed");
    Eigen::VectorXd eig = es.eigenvalues();
    const double max_eig = eig.cwiseAbs().maxCoeff();
    if (eig.minCoeff() < -1e-10 * max_eig)
        throw NotPsdError("covariance matrix has a significantly negative eigenvalue");
    eig = eig.cwiseMax(0.0);
    return es.eigenvectors() * eig.cwiseSqrt().asDiagonal();
}

Eigen::MatrixXd sample_exact_paths(const SubsidiaryModel& model, const std::vector<double>& grid,
                                   int n, std::uint64_t seed, int n_threads) {
    model.validate();
    const auto g = static_cast<Eigen::Index>(grid.size());
    Eigen::MatrixXd paths(n, g);
    if (n == 0) return paths;

    const Eigen::MatrixXd factor = factor_covariance(model, grid);
    Eigen::VectorXd mean(g);
    for (Eigen::Index a = 0; a < g; ++a) mean(a) = process_mean(model, grid[a]);

    const auto draw_range = [&](int lo, int hi) {
        Eigen::VectorXd z(factor.cols());
        for (int p = lo; p < hi; ++p) {
            auto eng = make_stream(seed, static_cast<std::uint64_t>(p));
            std::normal_distribution<double> gauss(0.0, 1.0);
            for (Eigen::Index a = 0; a < z.size(); ++a) z(a) = gauss(eng);
            paths.row(p) = (mean + factor * z).transpose();
        }
    };

    if (n_threads <= 1) {
        draw_range(0, n);
    } else {
        std::vector<std::thread> workers;
        const int chunk = (n + n_threads - 1) / n_threads;
        for (int w = 0; w < n_threads; ++w) {
            const int lo = w * chunk;
            const int hi = std::min(n, lo + chunk);
            if (lo >= hi) break;
            workers.emplace_back(draw_range, lo, hi);
        }
        for (auto& t : workers) t.join();
    }
    return paths;
}

SampledPath gen_dsi_study_series(const StudySpec& spec, std::uint64_t seed) {
    spec.validate();
    const int nq = spec.q();
    const int per_scale = spec.points_per_scale;

    SampledPath out;
    out.meta = "dsi";
    out.times.reserve(static_cast<std::size_t>(spec.n_scales) * per_scale);
    out.values.reserve(out.times.capacity());

    auto eng = make_stream(seed, 0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    double value = 0.0;
    long k_global = 0;
    for (int j = 1; j <= spec.n_scales; ++j) {
        const double lo = std::pow(spec.lambda, j - 1);
        const double step = lo * (spec.lambda - 1.0) / per_scale;
        int k = 0;
        for (int i = 1; i <= nq; ++i) {
            const double sd = std::exp((j - 1) * spec.h_vec[i - 1] * std::log(spec.lambda)) *
                              spec.sigma_vec[i - 1];
            for (int c = 0; c < spec.sub_count(i); ++c, ++k, ++k_global) {
                double incr;
                if (spec.deterministic_increments) {
                    incr = (k_global % 2 == 0) ? sd : -sd;
                } else {
                    incr = sd * gauss(eng);
                }
                value += incr;
                out.times.push_back(lo + (k + 1) * step);
                out.values.push_back(value);
            }
        }
    }
    return out;
}

McCovEstimate mc_covariance(const Eigen::MatrixXd& paths, const std::vector<double>& grid,
                            double t, double u) {
    const auto n = paths.rows();
    if (n < 2) throw InsufficientPathsError("need at least 2 paths for a sample covariance");

    const auto find_col = [&](double x) -> Eigen::Index {
        for (std::size_t a = 0; a < grid.size(); ++a)
            if (std::abs(grid[a] - x) <= 1e-12 * std::max(1.0, std::abs(x)))
                return static_cast<Eigen::Index>(a);
        throw OutOfRangeError("time " + std::to_string(x) + " is not on the grid");
    };

    const Eigen::VectorXd dx = paths.col(find_col(t)).array() - paths.col(find_col(t)).mean();
    const Eigen::VectorXd dy = paths.col(find_col(u)).array() - paths.col(find_col(u)).mean();
    const Eigen::VectorXd prod = dx.cwiseProduct(dy);
    const double nn = static_cast<double>(n);

    McCovEstimate est;
    est.estimate = prod.sum() / (nn - 1.0);
    const double pmean = prod.mean();
    const double pvar = (prod.array() - pmean).square().sum() / (nn - 1.0);
    est.standard_error = std::sqrt(pvar / nn);
    return est;
}

}  // namespace dsi
