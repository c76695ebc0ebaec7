#include "isospec/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace isospec {

double unitary_degree4_moment(int i, int j, int k, int l, int n) {
    if (n < 2) throw std::invalid_argument("unitary_degree4_moment: n < 2");
    for (int idx : {i, j, k, l})
        if (idx < 1 || idx > n) throw std::invalid_argument("unitary_degree4_moment: index out of range");
    double dik = (i == k) ? 1.0 : 0.0;
    double djl = (j == l) ? 1.0 : 0.0;
    double denom = static_cast<double>(n - 1) * n * (n + 1);
    return (n * dik + n * djl - dik * djl - 1.0) / denom;
}

HermitianMatrix expected_A_squared(const Spectrum& spectrum) {
    int n = spectrum.n();
    double hs2 = spectrum.values.squaredNorm();
    return HermitianMatrix::diagonal(Eigen::VectorXd::Constant(n, hs2 / n));
}

double expected_tr_ABAC(const Spectrum& spectrum, const HermitianMatrix& b,
                        const HermitianMatrix& c) {
    int n = spectrum.n();
    if (b.dim() != n || c.dim() != n) throw std::invalid_argument("expected_tr_ABAC: dimension mismatch");
    if (n < 2) throw std::invalid_argument("expected_tr_ABAC: n < 2");
    double hs2 = spectrum.values.squaredNorm();
    double tr_lambda = spectrum.trace();
    double tr_bc = hs_inner(b, c);
    double denom = static_cast<double>(n - 1) * n * (n + 1);
    // general-spectrum form; the (tr Lambda)^2 terms vanish in the
    // recentered setting and restore the scalar-matrix limit c^2 tr(BC)
    return (hs2 * (n * b.trace() * c.trace() - tr_bc) +
            tr_lambda * tr_lambda * (n * tr_bc - b.trace() * c.trace())) /
           denom;
}

double expected_trQF_trQG(const Eigen::MatrixXcd& f, const Eigen::MatrixXcd& g, int n) {
    if (n < 2) throw std::invalid_argument("expected_trQF_trQG: n < 2");
    if (f.rows() != n || f.cols() != n || g.rows() != n || g.cols() != n)
        throw std::invalid_argument("expected_trQF_trQG: dimension mismatch");
    std::complex<double> val = f.trace() * g.trace() -
                               static_cast<double>(n) * (f * g).trace();
    double denom = static_cast<double>(n - 1) * n * (n + 1);
    return 2.0 * val.real() / denom;
}

double sphere_abs_moment(const std::vector<long>& alphas) {
    long n = static_cast<long>(alphas.size());
    if (n < 1) throw std::invalid_argument("sphere_abs_moment: empty exponent vector");
    double log_num = std::lgamma(static_cast<double>(n));
    double beta = 0.0;
    for (long a : alphas) {
        if (a < 0 || a % 2 != 0) throw std::invalid_argument("sphere_abs_moment: exponents must be even and >= 0");
        double bj = 0.5 * a + 1.0;
        log_num += std::lgamma(bj);
        beta += bj;
    }
    return std::exp(log_num - std::lgamma(beta));
}

double sphere_mixed_moment(const MomentQuery& q) {
    if (q.n < 1) throw std::invalid_argument("sphere_mixed_moment: n < 1");
    if (q.top_indices.size() != q.bottom_indices.size()) return 0.0;
    std::map<int, long> top, bottom;
    for (int i : q.top_indices) {
        if (i < 1 || i > q.n) throw std::invalid_argument("sphere_mixed_moment: index out of range");
        ++top[i];
    }
    for (int i : q.bottom_indices) {
        if (i < 1 || i > q.n) throw std::invalid_argument("sphere_mixed_moment: index out of range");
        ++bottom[i];
    }
    if (top != bottom) return 0.0;
    long k = static_cast<long>(q.top_indices.size());
    // matchings = product of multiplicity factorials; computed against the
    // rising factorial n (n+1) ... (n+k-1) in log space
    double log_match = 0.0;
    for (const auto& [idx, mult] : top) log_match += std::lgamma(static_cast<double>(mult) + 1.0);
    double log_denom = std::lgamma(static_cast<double>(q.n) + k) - std::lgamma(static_cast<double>(q.n));
    return std::exp(log_match - log_denom);
}

namespace {

void require_traceless(const HermitianMatrix& m, const char* who) {
    if (std::abs(m.trace()) > 1e-10)
        throw std::invalid_argument(std::string(who) + ": input is not traceless");
}

}  // namespace

double quad_form_cov(const HermitianMatrix& b, const HermitianMatrix& c) {
    if (b.dim() != c.dim()) throw std::invalid_argument("quad_form_cov: dimension mismatch");
    require_traceless(b, "quad_form_cov");
    require_traceless(c, "quad_form_cov");
    double n = b.dim();
    return hs_inner(b, c) / (n * (n + 1.0));
}

double quad_form_deg4(const HermitianMatrix& b, const HermitianMatrix& c, QuadFormKind which) {
    if (b.dim() != c.dim()) throw std::invalid_argument("quad_form_deg4: dimension mismatch");
    double n = b.dim();
    const Eigen::MatrixXcd& B = b.mat();
    const Eigen::MatrixXcd& C = c.mat();
    switch (which) {
        case QuadFormKind::Sq: {
            std::complex<double> t1 = (B * C).trace();
            std::complex<double> t2 = (B * C * B * C).trace();
            return (t1 * t1 + t2).real() / (n * (n + 1.0));
        }
        case QuadFormKind::AbsSq: {
            std::complex<double> t1 = (B * B * C * C).trace();
            std::complex<double> t2 = (B * C).trace();
            return (t1 + t2 * t2).real() / (n * (n + 1.0));
        }
        case QuadFormKind::Cross: {
            require_traceless(b, "quad_form_deg4[cross]");
            require_traceless(c, "quad_form_deg4[cross]");
            std::complex<double> t1 = (B * C).trace();
            std::complex<double> t2 = (B * B * C * C).trace();
            std::complex<double> t3 = (B * C * B * C).trace();
            return (t1 * t1 + t2 + t3).real() / (n * (n + 1.0) * (n + 2.0));
        }
        case QuadFormKind::Full: {
            require_traceless(b, "quad_form_deg4[full]");
            require_traceless(c, "quad_form_deg4[full]");
            double tb2 = (B * B).trace().real();
            double tc2 = (C * C).trace().real();
            double tb2c2 = (B * B * C * C).trace().real();
            std::complex<double> tbc = (B * C).trace();
            double tbcbc = (B * C * B * C).trace().real();
            return (tb2 * tc2 + 4.0 * tb2c2 + 2.0 * (tbc * tbc).real() + 2.0 * tbcbc) /
                   (n * (n + 1.0) * (n + 2.0) * (n + 3.0));
        }
    }
    throw std::logic_error("quad_form_deg4: unreachable");
}

}  // namespace isospec
