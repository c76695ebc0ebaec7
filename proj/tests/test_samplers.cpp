#include <cmath>

#include "doctest.h"
#include "isospec/linalg.hpp"
#include "isospec/oracles.hpp"
#include "isospec/rng.hpp"
#include "isospec/samplers.hpp"

using namespace isospec;

TEST_SUITE_BEGIN("samplers");

TEST_CASE("haar_matrix is unitary / orthogonal") {
    RandomEngine rng(RngStream{11, 0});
    for (FieldTag f : {FieldTag::Complex, FieldTag::Real}) {
        Eigen::MatrixXcd u = haar_matrix(8, f, rng);
        CHECK((u.adjoint() * u - Eigen::MatrixXcd::Identity(8, 8)).norm() < 1e-10);
        if (f == FieldTag::Real) CHECK(u.imag().norm() == 0.0);
    }
    CHECK_THROWS_AS(haar_matrix(0, FieldTag::Complex, rng), std::invalid_argument);
}

TEST_CASE("haar_matrix n=1 has uniform argument") {
    RandomEngine rng(RngStream{12, 0});
    const long m = 200000;
    double csum = 0.0, ssum = 0.0;
    for (long i = 0; i < m; ++i) {
        std::complex<double> u = haar_matrix(1, FieldTag::Complex, rng)(0, 0);
        CHECK(std::abs(std::abs(u) - 1.0) < 1e-12);
        csum += u.real();
        ssum += u.imag();
    }
    double se = 5.0 * std::sqrt(0.5 / m);
    CHECK(std::abs(csum / m) < se);
    CHECK(std::abs(ssum / m) < se);
}

TEST_CASE("haar_matrix entry second moment is 1/n") {
    RandomEngine rng(RngStream{13, 0});
    const int n = 5;
    const long m = 20000;
    double sum = 0.0;
    for (long i = 0; i < m; ++i) {
        Eigen::MatrixXcd u = haar_matrix(n, FieldTag::Complex, rng);
        sum += std::norm(u(0, 0));
    }
    // |u_11|^2 is Beta(1, n-1): variance (n-1)/(n^2 (n+1))
    double se = std::sqrt((n - 1.0) / (double(n) * n * (n + 1.0)) / m);
    CHECK(std::abs(sum / m - 1.0 / n) < 5.0 * se);
}

TEST_CASE("haar_rows are orthonormal rows of the right length") {
    RandomEngine rng(RngStream{14, 0});
    Eigen::MatrixXcd w = haar_rows(200, 6, FieldTag::Complex, rng);
    CHECK(w.rows() == 6);
    CHECK(w.cols() == 200);
    CHECK((w * w.adjoint() - Eigen::MatrixXcd::Identity(6, 6)).norm() < 1e-10);
    Eigen::MatrixXcd wr = haar_rows(50, 3, FieldTag::Real, rng);
    CHECK(wr.imag().norm() == 0.0);
    CHECK((wr * wr.adjoint() - Eigen::MatrixXcd::Identity(3, 3)).norm() < 1e-10);
    CHECK_THROWS_AS(haar_rows(4, 5, FieldTag::Complex, rng), std::invalid_argument);
}

TEST_CASE("haar_rows r=1 matches sphere moments") {
    RandomEngine rng(RngStream{15, 0});
    const int n = 6;
    const long m = 100000;
    double p2 = 0.0, p4 = 0.0;
    for (long i = 0; i < m; ++i) {
        Eigen::MatrixXcd w = haar_rows(n, 1, FieldTag::Complex, rng);
        double a2 = std::norm(w(0, 0));
        p2 += a2;
        p4 += a2 * a2;
    }
    CHECK(std::abs(p2 / m - 1.0 / n) < 5.0 * std::sqrt(1.0 / (double(n) * n * m)));
    double ex4 = 2.0 / (double(n) * (n + 1.0));
    CHECK(std::abs(p4 / m - ex4) < 5.0 * std::sqrt(24.0 / std::pow(double(n), 4) / m));
}

TEST_CASE("haar_rows r=2 cross moment matches full Haar") {
    RandomEngine rng(RngStream{16, 0});
    const int n = 5;
    const long m = 200000;
    // E |u_11|^2 |u_21|^2 with (i,j,k,l) = (1,1,2,1) in the degree-4 oracle
    double target = unitary_degree4_moment(1, 1, 2, 1, n);
    double sum = 0.0;
    for (long i = 0; i < m; ++i) {
        Eigen::MatrixXcd w = haar_rows(n, 2, FieldTag::Complex, rng);
        sum += std::norm(w(0, 0)) * std::norm(w(1, 0));
    }
    CHECK(std::abs(sum / m - target) < 5.0 * std::sqrt(10.0 * target * target / m + 1e-6 / m));
}

TEST_CASE("sphere_uniform moments") {
    RandomEngine rng(RngStream{17, 0});
    const int n = 4;
    const long m = 200000;
    double p2 = 0.0, p4 = 0.0;
    std::complex<double> cross = 0.0;
    for (long i = 0; i < m; ++i) {
        Eigen::VectorXcd z = sphere_uniform(n, FieldTag::Complex, rng);
        CHECK(std::abs(z.norm() - 1.0) < 1e-12);
        double a2 = std::norm(z[0]);
        p2 += a2;
        p4 += a2 * a2;
        cross += z[0] * std::conj(z[1]);
    }
    CHECK(std::abs(p2 / m - 1.0 / n) < 5.0 * std::sqrt(0.05 / m));
    CHECK(std::abs(p4 / m - 2.0 / (double(n) * (n + 1.0))) < 5.0 * std::sqrt(0.1 / m));
    CHECK(std::abs(cross) / m < 5.0 * std::sqrt(0.25 / m));
}

TEST_CASE("gaussian_ensemble variance conventions") {
    RandomEngine rng(RngStream{18, 0});
    const int n = 4;
    const long m = 100000;
    double cd = 0.0, cor = 0.0, coi = 0.0, rd = 0.0, ro = 0.0;
    for (long i = 0; i < m; ++i) {
        HermitianMatrix g = gaussian_ensemble(n, FieldTag::Complex, rng);
        cd += std::norm(g.mat()(0, 0));
        cor += g.mat()(0, 1).real() * g.mat()(0, 1).real();
        coi += g.mat()(0, 1).imag() * g.mat()(0, 1).imag();
        HermitianMatrix h = gaussian_ensemble(n, FieldTag::Real, rng);
        rd += std::norm(h.mat()(0, 0));
        ro += h.mat()(0, 1).real() * h.mat()(0, 1).real();
    }
    CHECK(std::abs(cd / m - 1.0) < 5.0 * std::sqrt(2.0 / m));
    CHECK(std::abs(cor / m - 0.5) < 5.0 * std::sqrt(0.5 / m));
    CHECK(std::abs(coi / m - 0.5) < 5.0 * std::sqrt(0.5 / m));
    CHECK(std::abs(rd / m - 2.0) < 5.0 * std::sqrt(8.0 / m));
    CHECK(std::abs(ro / m - 1.0) < 5.0 * std::sqrt(2.0 / m));
}

TEST_CASE("isospectral preserves the prescribed spectrum") {
    RandomEngine rng(RngStream{19, 0});
    Eigen::VectorXd lam(5);
    lam << -3, -1, 0, 2, 7;
    for (FieldTag f : {FieldTag::Complex, FieldTag::Real}) {
        HermitianMatrix a = isospectral(Spectrum{lam}, f, rng);
        CHECK((a.eigenvalues() - lam).norm() < 1e-9);
        if (f == FieldTag::Real) CHECK(a.mat().imag().norm() == 0.0);
    }
}

TEST_CASE("isospectral with scalar spectrum is deterministic") {
    RandomEngine rng(RngStream{20, 0});
    Eigen::VectorXd lam(4);
    lam << 2.5, 2.5, 2.5, 2.5;
    HermitianMatrix a = isospectral(Spectrum{lam}, FieldTag::Complex, rng);
    CHECK((a.mat() - 2.5 * Eigen::MatrixXcd::Identity(4, 4)).norm() < 1e-10);
}

TEST_CASE("isospectral mean is (tr Lambda / n) I") {
    RandomEngine rng(RngStream{21, 0});
    Eigen::VectorXd lam(3);
    lam << 1, 2, 6;
    const long m = 50000;
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(3, 3);
    for (long i = 0; i < m; ++i) sum += isospectral(Spectrum{lam}, FieldTag::Complex, rng).mat();
    Eigen::MatrixXcd mean = sum / double(m);
    CHECK((mean - 3.0 * Eigen::MatrixXcd::Identity(3, 3)).norm() < 5.0 * 6.0 * 3.0 / std::sqrt(double(m)));
}

TEST_CASE("entry marginal block matches full isospectral statistics") {
    RandomEngine rng(RngStream{22, 0});
    Eigen::VectorXd lam(6);
    lam << -2, -1, 0, 1, 2, 3;
    Spectrum sp{lam};
    const long m = 60000;

    double mean1 = 0.0, var1 = 0.0;
    for (long i = 0; i < m; ++i) {
        HermitianMatrix blk = isospectral_entry_marginal(sp, {2}, FieldTag::Complex, rng);
        CHECK(blk.dim() == 1);
        double a = blk.mat()(0, 0).real();
        mean1 += a;
        var1 += a * a;
    }
    mean1 /= m;
    var1 = var1 / m - mean1 * mean1;
    CHECK(std::abs(mean1 - sp.trace() / 6.0) < 5.0 * std::sqrt(4.0 / m));
    // Var a_jj = ||Lambda-tilde||^2 / (n(n+1)): the row of |u|^2 weights is
    // Dirichlet(1,...,1), with E x_i^2 = 2/(n(n+1)) and E x_i x_l = 1/(n(n+1))
    double hs2 = sp.recentered().squaredNorm();
    double target = hs2 / (6.0 * 7.0);
    CHECK(std::abs(var1 - target) < 5.0 * std::sqrt(40.0 / m));

    // 2x2 block of a full draw vs the fast path: compare off-diagonal second moment
    double fast = 0.0, full = 0.0;
    for (long i = 0; i < m / 4; ++i) {
        HermitianMatrix blk = isospectral_entry_marginal(sp, {1, 4}, FieldTag::Complex, rng);
        fast += std::norm(blk.mat()(0, 1));
        HermitianMatrix a = isospectral(sp, FieldTag::Complex, rng);
        full += std::norm(a.mat()(0, 3));
    }
    CHECK(std::abs(fast - full) / (m / 4) < 5.0 * std::sqrt(80.0 / (m / 4)));
}

TEST_CASE("induced_state basics") {
    RandomEngine rng(RngStream{23, 0});
    HermitianMatrix rho = induced_state(3, 1, rng);
    CHECK(rho.trace() == doctest::Approx(1.0).epsilon(1e-12));
    Eigen::VectorXd ev = rho.eigenvalues();
    CHECK(ev.minCoeff() > -1e-12);
    // s=1 is a pure state: one eigenvalue 1, rest 0
    CHECK(ev.maxCoeff() == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(ev.head(2).sum()) < 1e-10);

    const long m = 20000;
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(3, 3);
    for (long i = 0; i < m; ++i) {
        HermitianMatrix r = induced_state(3, 5, rng);
        CHECK(r.trace() == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(r.eigenvalues().minCoeff() > -1e-12);
        sum += r.mat();
    }
    CHECK((sum / double(m) - Eigen::MatrixXcd::Identity(3, 3) / 3.0).norm() <
          5.0 * 1.0 / std::sqrt(double(m)));
}

TEST_CASE("perturbation_rotation is unitary and epsilon-small") {
    RandomEngine rng(RngStream{24, 0});
    const int n = 8;
    const double eps = 1e-2;
    for (int t = 0; t < 50; ++t) {
        Eigen::MatrixXcd r = perturbation_rotation(n, eps, FieldTag::Complex, rng);
        CHECK((r.adjoint() * r - Eigen::MatrixXcd::Identity(n, n)).norm() < 1e-10);
        CHECK((r - Eigen::MatrixXcd::Identity(n, n)).operatorNorm() < 3.0 * eps);
    }
    CHECK_THROWS_AS(perturbation_rotation(n, 1.5, FieldTag::Complex, rng), std::invalid_argument);
}

TEST_CASE("exchangeable_perturbation keeps U unitary") {
    RandomEngine rng(RngStream{25, 0});
    Eigen::MatrixXcd u = haar_matrix(6, FieldTag::Complex, rng);
    Eigen::MatrixXcd v = exchangeable_perturbation(u, 1e-3, rng);
    CHECK((v.adjoint() * v - Eigen::MatrixXcd::Identity(6, 6)).norm() < 1e-10);
    CHECK((v - u).operatorNorm() < 3e-3);
}

TEST_CASE("invariant ensemble n=1 quadratic potential") {
    // density exp(-x^2): mean 0, variance 1/2
    InvariantEnsembleSpec spec = InvariantEnsembleSpec::quadratic(1);
    RandomEngine rng(RngStream{26, 0});
    const long m = 5000;
    double sum = 0.0, sumsq = 0.0;
    for (long i = 0; i < m; ++i) {
        double x = invariant_ensemble_eigs(spec, rng).values[0];
        sum += x;
        sumsq += x * x;
    }
    // MCMC draws autocorrelate, so widen the iid bands
    CHECK(std::abs(sum / m) < 0.05);
    CHECK(std::abs(sumsq / m - 0.5) < 0.05);
}

TEST_CASE("invariant ensemble quadratic potential matches scaled GUE at n=8") {
    const int n = 8;
    InvariantEnsembleSpec spec = InvariantEnsembleSpec::quadratic(n);
    RandomEngine rng(RngStream{27, 0});
    const long m = 400;
    double inv2 = 0.0;
    for (long i = 0; i < m; ++i) inv2 += invariant_ensemble_eigs(spec, rng).values.squaredNorm();
    inv2 /= m;
    double gue2 = 0.0;
    for (long i = 0; i < m * 10; ++i) {
        HermitianMatrix g = gaussian_ensemble(n, FieldTag::Complex, rng);
        gue2 += g.mat().squaredNorm() / (2.0 * n);
    }
    gue2 /= m * 10;
    CHECK(std::abs(inv2 - gue2) < 0.15 * gue2);
}

TEST_CASE("invariant ensemble draws are stream-reproducible") {
    InvariantEnsembleSpec spec = InvariantEnsembleSpec::quadratic(3);
    RandomEngine a(RngStream{28, 5});
    RandomEngine b(RngStream{28, 5});
    Spectrum sa = invariant_ensemble_eigs(spec, a);
    Spectrum sb = invariant_ensemble_eigs(spec, b);
    CHECK((sa.values - sb.values).norm() == 0.0);
    for (int i = 1; i < 3; ++i) CHECK(sa.values[i] >= sa.values[i - 1]);
}

TEST_SUITE_END();
