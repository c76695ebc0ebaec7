#include "isospec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace isospec {

EmpiricalMeasure1D EmpiricalMeasure1D::from_data(Eigen::VectorXd data) {
    std::sort(data.begin(), data.end());
    return EmpiricalMeasure1D{std::move(data)};
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

// Wichura's algorithm AS241 (PPND16), |error| < 1e-15
double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        if (p == 0.0) return -std::numeric_limits<double>::infinity();
        if (p == 1.0) return std::numeric_limits<double>::infinity();
        throw std::invalid_argument("normal_quantile: p outside [0,1]");
    }
    double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        double r = 0.180625 - q * q;
        return q *
               (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                     6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                   1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
                 1.3314166789178437745e2) * r + 3.3871328727963666080e0) /
               (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
                     3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
                   5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
                 4.2313330701600911252e1) * r + 1.0);
    }
    double r = (q < 0.0) ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        val = (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                    2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                  3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
                4.63033784615654529590e0) * r + 1.42343711074968357734e0) /
              (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                    1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                  6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
                2.05319162663775882187e0) * r + 1.0);
    } else {
        r -= 5.0;
        val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                    1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                  2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
                5.46378491116411436990e0) * r + 6.65790464350110377720e0) /
              (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                    1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                  1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
                5.99832206555887937690e-1) * r + 1.0);
    }
    return (q < 0.0) ? -val : val;
}

double w1_1d(const EmpiricalMeasure1D& x, const EmpiricalMeasure1D& y) {
    if (x.size() != y.size())
        throw std::invalid_argument("w1_1d: unequal atom counts (resample first)");
    return (x.atoms - y.atoms).cwiseAbs().sum() / x.size();
}

double w1_1d_vs_gaussian(const EmpiricalMeasure1D& x, double mean, double sd) {
    if (!(sd > 0.0)) throw std::invalid_argument("w1_1d_vs_gaussian: sd <= 0");
    int m = x.size();
    double acc = 0.0;
    for (int i = 0; i < m; ++i) {
        double u = (i + 0.5) / m;
        acc += std::abs(x.atoms[i] - (mean + sd * normal_quantile(u)));
    }
    return acc / m;
}

namespace {

// shortest-augmenting-path assignment (Jonker-Volgenant style), minimizes
// total cost; cost is row-major m x m
double solve_assignment(const std::vector<double>& cost, int m) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(m + 1, 0.0), v(m + 1, 0.0);
    std::vector<int> match(m + 1, 0), way(m + 1, 0);
    for (int i = 1; i <= m; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(m + 1, inf);
        std::vector<char> used(m + 1, 0);
        do {
            used[j0] = 1;
            int i0 = match[j0], j1 = -1;
            double delta = inf;
            for (int j = 1; j <= m; ++j) {
                if (used[j]) continue;
                double cur = cost[static_cast<std::size_t>(i0 - 1) * m + (j - 1)] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= m; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0);
    }
    double total = 0.0;
    for (int j = 1; j <= m; ++j)
        total += cost[static_cast<std::size_t>(match[j] - 1) * m + (j - 1)];
    return total;
}

}  // namespace

double w1_multi(const EmpiricalSample& x, const EmpiricalSample& y, int cap) {
    if (x.m() != y.m() || x.d() != y.d())
        throw std::invalid_argument("w1_multi: shape mismatch");
    int m = x.m();
    if (m > cap) throw std::invalid_argument("w1_multi: sample count exceeds assignment cap");
    std::vector<double> cost(static_cast<std::size_t>(m) * m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            cost[static_cast<std::size_t>(i) * m + j] = (x.data.row(i) - y.data.row(j)).norm();
    return solve_assignment(cost, m) / m;
}

double tv_1d(const EmpiricalMeasure1D& x, double mean, double sd, int bins) {
    if (bins < 2) throw std::invalid_argument("tv_1d: bins < 2");
    if (!(sd > 0.0)) throw std::invalid_argument("tv_1d: sd <= 0");
    int m = x.size();
    double lo = mean - 6.0 * sd, hi = mean + 6.0 * sd;
    double width = (hi - lo) / bins;
    std::vector<long> counts(static_cast<std::size_t>(bins) + 2, 0);
    for (double t : x.atoms) {
        if (t < lo) {
            ++counts[0];
        } else if (t >= hi) {
            ++counts[static_cast<std::size_t>(bins) + 1];
        } else {
            int b = static_cast<int>((t - lo) / width);
            b = std::clamp(b, 0, bins - 1);
            ++counts[static_cast<std::size_t>(b) + 1];
        }
    }
    double acc = std::abs(static_cast<double>(counts[0]) / m - normal_cdf((lo - mean) / sd));
    for (int b = 0; b < bins; ++b) {
        double p = normal_cdf((lo + (b + 1) * width - mean) / sd) -
                   normal_cdf((lo + b * width - mean) / sd);
        acc += std::abs(static_cast<double>(counts[static_cast<std::size_t>(b) + 1]) / m - p);
    }
    acc += std::abs(static_cast<double>(counts[static_cast<std::size_t>(bins) + 1]) / m -
                    (1.0 - normal_cdf((hi - mean) / sd)));
    return 0.5 * acc;
}

int tv_default_bins(int m) {
    return std::max(2, static_cast<int>(std::ceil(std::cbrt(static_cast<double>(m)))));
}

double semicircle_cdf(double t) {
    if (t < -2.0 || t > 2.0) throw std::invalid_argument("semicircle_cdf: t outside [-2,2]");
    return 0.5 + t * std::sqrt(4.0 - t * t) / (4.0 * M_PI) + std::asin(0.5 * t) / M_PI;
}

double semicircle_quantile(double u) {
    if (u < 0.0 || u > 1.0) throw std::invalid_argument("semicircle_quantile: u outside [0,1]");
    double lo = -2.0, hi = 2.0;
    while (hi - lo > 1e-12) {
        double mid = 0.5 * (lo + hi);
        if (semicircle_cdf(mid) < u)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double w1_spectral_semicircle(const EmpiricalMeasure1D& eigs) {
    int k = eigs.size();
    if (k < 1) throw std::invalid_argument("w1_spectral_semicircle: empty measure");
    constexpr int sub = 64;
    double acc = 0.0;
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < sub; ++j) {
            double u = (i + (j + 0.5) / sub) / k;
            acc += std::abs(eigs.atoms[i] - semicircle_quantile(u));
        }
    return acc / (static_cast<double>(k) * sub);
}

EmpiricalMeasure1D spectral_measure(const HermitianMatrix& a, double scale) {
    Eigen::VectorXd ev = a.eigenvalues() * scale;
    return EmpiricalMeasure1D::from_data(std::move(ev));
}

}  // namespace isospec
