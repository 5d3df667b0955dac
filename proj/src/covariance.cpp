#include "dsi/covariance.hpp"

#include <algorithm>
#include <cmath>

namespace dsi {

std::vector<std::string> SubsidiaryModel::violations() const {
    std::vector<std::string> v = scheme.violations();
    const int q = scheme.q();
    if (!(hurst > 0.0)) v.push_back("H must be > 0");
    if (beta < 0.0 || beta > 1.0) v.push_back("beta must lie in [0, 1]");
    if (gram.rows() != q || gram.cols() != q) {
        v.push_back("G must be q x q with q = " + std::to_string(q));
        return v;
    }
    if (mean.size() != q) v.push_back("mu must have length q = " + std::to_string(q));
    if (!gram.isApprox(gram.transpose(), 1e-12)) v.push_back("G must be symmetric");
    for (int i = 0; i < q; ++i) {
        if (!(gram(i, i) > 0.0)) {
            v.push_back("G diagonal must be strictly positive");
            break;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (gram + gram.transpose()),
                                                      Eigen::EigenvaluesOnly);
    if (es.info() == Eigen::Success) {
        const double max_eig = es.eigenvalues().cwiseAbs().maxCoeff();
        if (es.eigenvalues().minCoeff() < -1e-10 * max_eig)
            v.push_back("G must be positive semidefinite");
    }
    return v;
}

void SubsidiaryModel::validate() const {
    auto v = violations();
    if (!v.empty()) throw ConfigError(std::move(v));
}

double SubsidiaryModel::scale_pow(double x) const {
    return std::exp(x * hurst * std::log(scheme.lambda));
}

void validate_slice(const IntervalSlice& a, const SubsidiaryModel& model) {
    const auto& scheme = model.scheme;
    if (a.j < 1 || a.i < 1 || a.i > scheme.q())
        throw IndexError("slice indices out of range");
    if (!(a.lo < a.hi)) throw OutOfRangeError("slice must have positive length");
    const double tol = 1e-9 * a.hi;
    if (a.lo < scheme.sub_lo(a.j, a.i) - tol || a.hi > scheme.sub_hi(a.j, a.i) + tol)
        throw OutOfRangeError("slice not contained in its subinterval");
}

NodeIndex canonical_node(int j, int i, const SubsidiaryModel& model) {
    const int q = model.scheme.q();
    if (i == 0) {
        j -= 1;
        i = q;
    }
    if (i < 1 || i > q) throw IndexError("subinterval index out of range: " + std::to_string(i));
    if (j < 0) throw IndexError("scale index out of range: " + std::to_string(j));
    return NodeIndex{j, i};
}

double sigma_discrete(const SubsidiaryModel& model, int j, int i, int k, int l) {
    const NodeIndex a = canonical_node(j, i, model);
    const NodeIndex b = canonical_node(k, l, model);
    return model.scale_pow(a.j + b.j - 2) * model.gram(a.i - 1, b.i - 1);
}

// Scaled mean of node (j,i): E[X^d_{(j-1)q+i}] = lambda^{(j-1)H} mu(i).
static double node_mean(const SubsidiaryModel& model, int j, int i) {
    const NodeIndex n = canonical_node(j, i, model);
    return model.scale_pow(n.j - 1) * model.mean(n.i - 1);
}

double measure_mean(const SubsidiaryModel& model, const IntervalSlice& a) {
    if (a.length() == 0.0) return 0.0;
    validate_slice(a, model);
    const double m = model.scheme.sub_length(a.j, a.i);
    return a.length() / m * node_mean(model, a.j, a.i);
}

double measure_cov(const SubsidiaryModel& model, const IntervalSlice& a, const IntervalSlice& b) {
    if (a.length() == 0.0 || b.length() == 0.0) return 0.0;
    validate_slice(a, model);
    validate_slice(b, model);
    if (a.j == b.j && a.i == b.i) {
        const double m = model.scheme.sub_length(a.j, a.i);
        const double overlap = std::max(0.0, std::min(a.hi, b.hi) - std::max(a.lo, b.lo));
        const double kernel = model.beta * a.length() * b.length() + (1.0 - model.beta) * m * overlap;
        return kernel / (m * m) * sigma_discrete(model, a.j, a.i, a.j, a.i);
    }
    const double ma = model.scheme.sub_length(a.j, a.i);
    const double mb = model.scheme.sub_length(b.j, b.i);
    return a.length() * b.length() / (ma * mb) * sigma_discrete(model, a.j, a.i, b.j, b.i);
}

double partial_cov(const SubsidiaryModel& model, double t, double u) {
    const GridLocation lt = locate(t, model.scheme);
    const GridLocation lu = locate(u, model.scheme);
    double at = interp_coeff(lt, model.scheme).a;
    double au = interp_coeff(lu, model.scheme).a;
    if (lt.j == lu.j && lt.i == lu.i) {
        if (at > au) std::swap(at, au);
        const double sigma = sigma_discrete(model, lt.j, lt.i, lt.j, lt.i);
        return (model.beta * at * au + (1.0 - model.beta) * at) * sigma;
    }
    return at * au * sigma_discrete(model, lt.j, lt.i, lu.j, lu.i);
}

double cross_cov_node_partial(const SubsidiaryModel& model, int node_j, int node_i, double u) {
    const GridLocation lu = locate(u, model.scheme);
    const double au = interp_coeff(lu, model.scheme).a;
    return au * sigma_discrete(model, node_j, node_i, lu.j, lu.i);
}

double process_mean(const SubsidiaryModel& model, double t) {
    const GridLocation lt = locate(t, model.scheme);
    const InterpCoeff c = interp_coeff(lt, model.scheme);
    return c.a_bar * node_mean(model, lt.j, lt.i - 1) + c.a * node_mean(model, lt.j, lt.i);
}

double process_cov(const SubsidiaryModel& model, double t, double u) {
    GridLocation lt = locate(t, model.scheme);
    GridLocation lu = locate(u, model.scheme);
    double at = interp_coeff(lt, model.scheme).a;
    double au = interp_coeff(lu, model.scheme).a;
    // Order so the same-subinterval branch sees t <= u.
    if (std::make_pair(lt.j, lt.s_star) > std::make_pair(lu.j, lu.s_star)) {
        std::swap(lt, lu);
        std::swap(at, au);
    }
    const double abt = 1.0 - at;
    const double abu = 1.0 - au;
    if (lt.j == lu.j && lt.i == lu.i) {
        const int j = lt.j, i = lt.i;
        const double s_prev = sigma_discrete(model, j, i - 1, j, i - 1);
        const double s_cross = sigma_discrete(model, j, i - 1, j, i);
        const double s_cur = sigma_discrete(model, j, i, j, i);
        const double blend = model.beta * at * au + (1.0 - model.beta) * at;
        return abt * (abu * s_prev + au * s_cross) + at * abu * s_cross + blend * s_cur;
    }
    const int j = lt.j, i = lt.i, k = lu.j, l = lu.i;
    return abt * (abu * sigma_discrete(model, j, i - 1, k, l - 1) +
                  au * sigma_discrete(model, j, i - 1, k, l)) +
           at * (abu * sigma_discrete(model, j, i, k, l - 1) +
                 au * sigma_discrete(model, j, i, k, l));
}

CovMatrixResult cov_matrix(const SubsidiaryModel& model, const std::vector<double>& grid) {
    const auto n = static_cast<Eigen::Index>(grid.size());
    for (std::size_t a = 1; a < grid.size(); ++a)
        if (!(grid[a] > grid[a - 1]))
            throw OutOfRangeError("covariance grid must be strictly increasing");
    Eigen::MatrixXd sigma(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = a; b < n; ++b) {
            const double v = process_cov(model, grid[a], grid[b]);
            sigma(a, b) = v;
            sigma(b, a) = v;
        }
    }
    CovMatrixResult result;
    result.cov = sigma;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sigma, Eigen::EigenvaluesOnly);
    result.min_eigenvalue = es.eigenvalues().minCoeff();

    const double base = n > 0 ? sigma.trace() / static_cast<double>(n) : 0.0;
    for (double eps : {0.0, 1e-12, 1e-10}) {
        Eigen::MatrixXd shifted = sigma;
        shifted.diagonal().array() += eps * base;
        Eigen::LLT<Eigen::MatrixXd> llt(shifted);
        if (llt.info() == Eigen::Success) {
            result.jitter_used = eps * base;
            result.factorized = true;
            return result;
        }
    }
    throw NotPsdError("covariance matrix is not positive semidefinite within the jitter ladder");
}

}  // namespace dsi
