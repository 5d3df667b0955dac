#pragma once

#include <Eigen/Dense>

#include "dsi/scale_grid.hpp"

namespace dsi {

// Second-order model of the subsidiary sequence: base Gram matrix
// G(i,l) = <X^d_i, X^d_l>, base means E[X^d_i], Hurst exponent H and the
// blending parameter beta of the within-subinterval measure kernel.
// Every covariance of the induced continuous-time process derives from these.
struct SubsidiaryModel {
    SamplingScheme scheme;
    double hurst = 0.5;
    double beta = 0.0;
    Eigen::MatrixXd gram;  // q x q, symmetric PSD, positive diagonal
    Eigen::VectorXd mean;  // length q

    std::vector<std::string> violations() const;
    void validate() const;

    // lambda^{x * H}
    double scale_pow(double x) const;
};

// A = (lo, hi] contained in subinterval B_{j,i}.
struct IntervalSlice {
    int j = 1;
    int i = 1;
    double lo = 0.0;
    double hi = 0.0;

    double length() const { return hi - lo; }
};

void validate_slice(const IntervalSlice& a, const SubsidiaryModel& model);

// Node index (j,i) with i=0 meaning the closing node of the previous scale
// interval: (j,0) == (j-1,q). For j=1 this extends one scale down, consistent
// with the wide-sense scaling identity.
struct NodeIndex {
    int j;
    int i;
};
NodeIndex canonical_node(int j, int i, const SubsidiaryModel& model);

// sigma^d_{j_i k_l} = lambda^{(j+k-2)H} G(i,l); i or l may be 0 (canonicalized).
double sigma_discrete(const SubsidiaryModel& model, int j, int i, int k, int l);

// E[M_i(A)] = (|A| / m_{j,i}) lambda^{(j-1)H} mu(i)
double measure_mean(const SubsidiaryModel& model, const IntervalSlice& a);

// <M_i(A), M_l(B)>; beta-blended kernel within a subinterval, product kernel across.
double measure_cov(const SubsidiaryModel& model, const IntervalSlice& a, const IntervalSlice& b);

// Covariance of the partial processes X^d_{(j-1)q+i}(t) = M_i(lambda^{j-1}s_{i-1}, t].
double partial_cov(const SubsidiaryModel& model, double t, double u);

// <X^d_{(j-1)q+i}, X^d_{(k-1)q+l}(u)> = a(u) sigma^d_{j_i k_l}
double cross_cov_node_partial(const SubsidiaryModel& model, int node_j, int node_i, double u);

// E[X^d(t)] = a_bar(t) E[X^d_{(j-1)q+i-1}] + a(t) E[X^d_{(j-1)q+i}]
double process_mean(const SubsidiaryModel& model, double t);

// Covariance of the process X^d(t); two-case formula over same/different subintervals.
double process_cov(const SubsidiaryModel& model, double t, double u);

struct CovMatrixResult {
    Eigen::MatrixXd cov;
    double min_eigenvalue = 0.0;  // estimate from symmetric eigendecomposition
    double jitter_used = 0.0;     // diagonal shift at which factorization succeeded
    bool factorized = false;
};

// Assembles Sigma_ab = process_cov(grid_a, grid_b) and attempts a Cholesky
// factorization with jitter ladder eps * trace/n, eps in {0, 1e-12, 1e-10}.
// Throws NotPsdError beyond the ladder (inadmissible (G, beta) combination).
CovMatrixResult cov_matrix(const SubsidiaryModel& model, const std::vector<double>& grid);

}  // namespace dsi
