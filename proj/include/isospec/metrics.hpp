#pragma once

#include <Eigen/Dense>

#include "isospec/linalg.hpp"
#include "isospec/rng.hpp"

namespace isospec {

// Uniform-weight empirical measure on the line; atoms kept sorted.
struct EmpiricalMeasure1D {
    Eigen::VectorXd atoms;

    static EmpiricalMeasure1D from_data(Eigen::VectorXd data);  // sorts
    int size() const { return static_cast<int>(atoms.size()); }
};

// m x d array of Monte Carlo draws with RNG provenance.
struct EmpiricalSample {
    Eigen::MatrixXd data;
    RngStream rng_provenance;

    int m() const { return static_cast<int>(data.rows()); }
    int d() const { return static_cast<int>(data.cols()); }
};

double normal_cdf(double x);
double normal_quantile(double p);  // Wichura AS241

// exact W1 between equal-size empirical measures: sorted matching
double w1_1d(const EmpiricalMeasure1D& x, const EmpiricalMeasure1D& y);

// quantile-coupling W1 between an empirical measure and N(mean, sd^2),
// midpoint rule at u_i = (i - 1/2) / m
double w1_1d_vs_gaussian(const EmpiricalMeasure1D& x, double mean, double sd);

inline constexpr int kDefaultAssignmentCap = 4096;

// exact W1 between equal-size multivariate empirical measures via an
// optimal assignment on the Euclidean cost matrix
double w1_multi(const EmpiricalSample& x, const EmpiricalSample& y,
                int cap = kDefaultAssignmentCap);

// histogram estimate of d_TV(x, N(mean, sd^2)); equal-width bins spanning
// mean +- 6 sd plus two outer tail bins
double tv_1d(const EmpiricalMeasure1D& x, double mean, double sd, int bins);

// recommended bin count for tv_1d
int tv_default_bins(int m);

// semicircle law with unit-mass density (1/2pi) sqrt(4 - t^2) on [-2,2]
double semicircle_cdf(double t);
double semicircle_quantile(double u);

// quantile-coupling W1 between an eigenvalue measure and the semicircle
// law, 64 midpoint sub-nodes per atom interval
double w1_spectral_semicircle(const EmpiricalMeasure1D& eigs);

// empirical measure of scale * eigenvalues(A)
EmpiricalMeasure1D spectral_measure(const HermitianMatrix& a, double scale);

}  // namespace isospec
