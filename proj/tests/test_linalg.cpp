#include <cmath>

#include "doctest.h"
#include "isospec/linalg.hpp"
#include "isospec/rng.hpp"
#include "isospec/samplers.hpp"

using namespace isospec;

namespace {

HermitianMatrix diag2(double a, double b) {
    Eigen::VectorXd v(2);
    v << a, b;
    return HermitianMatrix::diagonal(v);
}

}  // namespace

TEST_SUITE_BEGIN("linalg");

TEST_CASE("traceless recentering") {
    CHECK(traceless(HermitianMatrix::identity(4)).hs_norm() == doctest::Approx(0.0).epsilon(1e-14));
    HermitianMatrix d = traceless(diag2(1, -1));
    CHECK(d.mat()(0, 0).real() == doctest::Approx(1.0));
    CHECK(d.mat()(1, 1).real() == doctest::Approx(-1.0));
    HermitianMatrix e = traceless(diag2(2, 0));
    CHECK(e.mat()(0, 0).real() == doctest::Approx(1.0));
    CHECK(e.mat()(1, 1).real() == doctest::Approx(-1.0));
}

TEST_CASE("traceless is an idempotent orthogonal projection") {
    RandomEngine rng(RngStream{1, 0});
    HermitianMatrix b = gaussian_ensemble(5, FieldTag::Complex, rng);
    HermitianMatrix bt = traceless(b);
    CHECK(std::abs(bt.trace()) < 1e-12 * 5 * b.hs_norm());
    HermitianMatrix btt = traceless(bt);
    CHECK((btt.mat() - bt.mat()).norm() < 1e-13);
    CHECK(std::abs(hs_inner(bt, HermitianMatrix::identity(5, FieldTag::Complex))) < 1e-12);
}

TEST_CASE("hs_inner basic values") {
    CHECK(hs_inner(HermitianMatrix::identity(2), HermitianMatrix::identity(2)) ==
          doctest::Approx(2.0));
    CHECK(hs_inner(diag2(1, -1), HermitianMatrix::identity(2)) == doctest::Approx(0.0));
    CHECK(hs_inner(diag2(1, -1), diag2(1, -1)) == doctest::Approx(2.0));
    CHECK_THROWS_AS(hs_inner(diag2(1, -1), HermitianMatrix::identity(3)), std::invalid_argument);
}

TEST_CASE("schatten norms") {
    CHECK(schatten_norm(HermitianMatrix::identity(3), 2.0) == doctest::Approx(std::sqrt(3.0)));
    CHECK(schatten_norm(diag2(3, 4), std::numeric_limits<double>::infinity()) ==
          doctest::Approx(4.0));
    Eigen::VectorXd v(4);
    v << 1, 1, -1, -1;
    CHECK(schatten_norm(HermitianMatrix::diagonal(v), 4.0) ==
          doctest::Approx(std::pow(4.0, 0.25)));
    CHECK_THROWS_AS(schatten_norm(diag2(1, 1), 0.5), std::invalid_argument);
}

TEST_CASE("norm chain and p=2 equals entrywise norm") {
    RandomEngine rng(RngStream{2, 0});
    for (int t = 0; t < 20; ++t) {
        HermitianMatrix a = gaussian_ensemble(6, FieldTag::Complex, rng);
        double op = schatten_norm(a, std::numeric_limits<double>::infinity());
        double s4 = schatten_norm(a, 4.0);
        double hs = schatten_norm(a, 2.0);
        CHECK(op <= s4 + 1e-12);
        CHECK(s4 <= hs + 1e-12);
        CHECK(hs == doctest::Approx(a.hs_norm()).epsilon(1e-10));
    }
}

TEST_CASE("stable rank") {
    CHECK(stable_rank(HermitianMatrix::identity(7)) == doctest::Approx(7.0));
    Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(4, 4);
    p(0, 0) = 1.0;
    CHECK(stable_rank(HermitianMatrix(p, FieldTag::Complex)) == doctest::Approx(1.0));
    Spectrum split = Spectrum::pm_sqrt_n(16);
    CHECK(stable_rank(HermitianMatrix::diagonal(split.values)) == doctest::Approx(16.0));
    CHECK_THROWS_AS(stable_rank(HermitianMatrix::zero(3)), std::invalid_argument);
    RandomEngine rng(RngStream{3, 0});
    for (int t = 0; t < 10; ++t) {
        HermitianMatrix a = gaussian_ensemble(5, FieldTag::Complex, rng);
        double sr = stable_rank(a);
        CHECK(sr >= 1.0 - 1e-12);
        CHECK(sr <= 5.0 + 1e-12);
    }
}

TEST_CASE("marginal_vector basics and conjugation invariance") {
    CoefficientFrame frame{{HermitianMatrix(diag2(1, -1).mat() / std::sqrt(2.0), FieldTag::Real)},
                           true, true};
    Eigen::VectorXd x = marginal_vector(HermitianMatrix::identity(2), frame);
    CHECK(x[0] == doctest::Approx(0.0));
    Eigen::VectorXd y = marginal_vector(diag2(1, -1), frame);
    CHECK(y[0] == doctest::Approx(std::sqrt(2.0)));

    RandomEngine rng(RngStream{4, 0});
    HermitianMatrix a = gaussian_ensemble(5, FieldTag::Complex, rng);
    CoefficientFrame f = orthonormalize_traceless(
        {gaussian_ensemble(5, FieldTag::Complex, rng), gaussian_ensemble(5, FieldTag::Complex, rng)});
    Eigen::MatrixXcd w = haar_matrix(5, FieldTag::Complex, rng);
    HermitianMatrix aw(w * a.mat() * w.adjoint(), FieldTag::Complex);
    CoefficientFrame fw = f;
    for (auto& b : fw.matrices) b = HermitianMatrix(w * b.mat() * w.adjoint(), FieldTag::Complex);
    Eigen::VectorXd v0 = marginal_vector(a, f);
    Eigen::VectorXd v1 = marginal_vector(aw, fw);
    CHECK((v0 - v1).norm() < 1e-11);
}

TEST_CASE("entry_frame structure") {
    auto [f1, a1] = entry_frame(3, {EntrySelector::parse("R 1 2")});
    CHECK(f1.d() == 1);
    CHECK(f1.traceless);
    CHECK(f1.matrices[0].mat()(0, 1).real() == doctest::Approx(1.0 / std::sqrt(2.0)));
    CHECK(a1.sigma(0, 0) == doctest::Approx(1.0));

    auto [f2, a2] = entry_frame(3, {EntrySelector::parse("D 1")});
    CHECK_FALSE(f2.traceless);
    CHECK(f2.matrices[0].mat()(0, 0).real() == doctest::Approx(1.0));
    CHECK(a2.sigma(0, 0) == doctest::Approx(1.0 - 1.0 / 3.0));

    auto [f3, a3] = entry_frame(4, {EntrySelector::parse("D 1"), EntrySelector::parse("D 2")});
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a3.sigma);
    CHECK(es.eigenvalues()[0] == doctest::Approx(1.0 - 2.0 / 4.0));
    CHECK(es.eigenvalues()[1] == doctest::Approx(1.0));
    (void)f3;

    // orthonormality invariant is exact for the hand-built frames
    auto [fm, am] = entry_frame(5, {EntrySelector::parse("D 2"), EntrySelector::parse("R 1 3"),
                                    EntrySelector::parse("I 2 4")});
    for (int i = 0; i < fm.d(); ++i)
        for (int j = 0; j < fm.d(); ++j)
            CHECK(hs_inner(fm.matrices[i], fm.matrices[j]) ==
                  doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-14));
    (void)am;

    CHECK_THROWS_AS(entry_frame(3, {EntrySelector::parse("R 1 2"), EntrySelector::parse("R 1 2")}),
                    std::invalid_argument);
    CHECK_THROWS_AS(entry_frame(3, {EntrySelector{EntrySelector::Kind::Re, 2, 1}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(entry_frame(3, {EntrySelector::parse("I 1 2")}, FieldTag::Real),
                    std::invalid_argument);
}

TEST_CASE("gram_and_shift") {
    RandomEngine rng(RngStream{5, 0});
    CoefficientFrame f = orthonormalize_traceless(
        {gaussian_ensemble(4, FieldTag::Complex, rng), gaussian_ensemble(4, FieldTag::Complex, rng)});
    Eigen::VectorXd lam(4);
    lam << 1, 2, 3, 4;
    AffineData ad = gram_and_shift(f.matrices, Spectrum{lam});
    CHECK((ad.sigma - Eigen::MatrixXd::Identity(2, 2)).norm() < 1e-10);
    CHECK(ad.shift.norm() < 1e-10);

    Eigen::VectorXd lam2(2);
    lam2 << 1, 3;
    AffineData ai = gram_and_shift({HermitianMatrix::identity(2)}, Spectrum{lam2});
    CHECK(ai.sigma(0, 0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(ai.shift[0] == doctest::Approx(4.0));

    Eigen::MatrixXcd e11 = Eigen::MatrixXcd::Zero(2, 2);
    e11(0, 0) = 1.0;
    AffineData ae = gram_and_shift({HermitianMatrix(e11, FieldTag::Complex)}, Spectrum{lam2});
    CHECK(ae.sigma(0, 0) == doctest::Approx(0.5));
}

TEST_CASE("orthonormalize_traceless") {
    CoefficientFrame f = orthonormalize_traceless({diag2(1, -1)});
    CHECK(f.matrices[0].mat()(0, 0).real() == doctest::Approx(1.0 / std::sqrt(2.0)));

    CHECK_THROWS_AS(orthonormalize_traceless({HermitianMatrix::identity(3)}), RankDeficiencyError);
    try {
        orthonormalize_traceless({diag2(1, -1), HermitianMatrix::identity(2)});
    } catch (const RankDeficiencyError& e) {
        CHECK(e.index == 1);
    }

    Eigen::VectorXd v1(3), v2(3);
    v1 << 1, -1, 0;
    v2 << 1, 1, -2;
    CoefficientFrame g = orthonormalize_traceless(
        {HermitianMatrix::diagonal(v1), HermitianMatrix::diagonal(v2)});
    CHECK(g.orthonormal);
    CHECK(g.traceless);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            CHECK(hs_inner(g.matrices[i], g.matrices[j]) ==
                  doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
}

TEST_CASE("partial_trace_second") {
    RandomEngine rng(RngStream{6, 0});
    // tensor product input: tr_2(A (x) B) = (tr B) A
    HermitianMatrix a = gaussian_ensemble(2, FieldTag::Complex, rng);
    HermitianMatrix b = gaussian_ensemble(3, FieldTag::Complex, rng);
    Eigen::MatrixXcd kron(6, 6);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            kron.block(3 * i, 3 * j, 3, 3) = a.mat()(i, j) * b.mat();
    HermitianMatrix pt = partial_trace_second(kron, 2, 3);
    CHECK((pt.mat() - b.trace() * a.mat()).norm() < 1e-12);

    HermitianMatrix pi = partial_trace_second(Eigen::MatrixXcd::Identity(12, 12), 4, 3);
    CHECK((pi.mat() - 3.0 * Eigen::MatrixXcd::Identity(4, 4)).norm() < 1e-12);

    // random PSD input: trace preserved, PSD preserved
    Eigen::MatrixXcd g(6, 4);
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 4; ++j) g(i, j) = rng.complex_normal();
    Eigen::MatrixXcd psd = g * g.adjoint();
    HermitianMatrix ppt = partial_trace_second(psd, 2, 3);
    CHECK(ppt.trace() == doctest::Approx(psd.trace().real()).epsilon(1e-12));
    CHECK(ppt.eigenvalues().minCoeff() > -1e-12);

    CHECK_THROWS_AS(partial_trace_second(Eigen::MatrixXcd::Identity(5, 5), 2, 3),
                    std::invalid_argument);
}

TEST_CASE("spectrum helpers") {
    Spectrum s = Spectrum::pm_sqrt_n(4);
    CHECK(s.trace() == doctest::Approx(0.0));
    CHECK(s.values.cwiseAbs().maxCoeff() == doctest::Approx(2.0));
    CHECK(s.nonscalar());
    CHECK_THROWS_AS(Spectrum::pm_sqrt_n(5), std::invalid_argument);
    Eigen::VectorXd c(3);
    c << 2, 2, 2;
    CHECK_FALSE(Spectrum{c}.nonscalar());
    CHECK(Spectrum{c}.recentered().norm() == doctest::Approx(0.0));
}

TEST_CASE("hermitian construction symmetrizes and flags") {
    Eigen::MatrixXcd m(2, 2);
    m << 1.0, std::complex<double>(0, 1), std::complex<double>(0, 1), 2.0;
    HermitianMatrix h(m, FieldTag::Complex);
    CHECK((h.mat() - h.mat().adjoint()).norm() < 1e-14);
    CHECK_FALSE(h.construction_clean());

    Eigen::MatrixXcd ok(2, 2);
    ok << 1.0, std::complex<double>(0, 1), std::complex<double>(0, -1), 2.0;
    CHECK(HermitianMatrix(ok, FieldTag::Complex).construction_clean());
}

TEST_CASE("eigenvalues ascend") {
    Eigen::VectorXd v(4);
    v << 3, -1, 2, 0;
    Eigen::VectorXd ev = HermitianMatrix::diagonal(v).eigenvalues();
    for (int i = 1; i < 4; ++i) CHECK(ev[i] >= ev[i - 1]);
}

TEST_CASE("entry selector parse and print") {
    EntrySelector d = EntrySelector::parse("D 3");
    CHECK(d.kind == EntrySelector::Kind::Diag);
    CHECK(d.j == 3);
    EntrySelector r = EntrySelector::parse("R 1 2");
    CHECK(r.kind == EntrySelector::Kind::Re);
    CHECK(r.str() == "R 1 2");
    EntrySelector i = EntrySelector::parse("I 2 5");
    CHECK(i.kind == EntrySelector::Kind::Im);
    CHECK(i.k == 5);
    CHECK_THROWS_AS(EntrySelector::parse("Q 1 2"), std::invalid_argument);
}

TEST_CASE("matrix json round trip") {
    RandomEngine rng(RngStream{7, 0});
    HermitianMatrix a = gaussian_ensemble(3, FieldTag::Complex, rng);
    HermitianMatrix back = matrix_from_json(matrix_to_json(a));
    CHECK((a.mat() - back.mat()).norm() < 1e-15);
    CHECK(back.field() == FieldTag::Complex);

    HermitianMatrix r = gaussian_ensemble(3, FieldTag::Real, rng);
    nlohmann::json jr = matrix_to_json(r);
    CHECK_FALSE(jr.contains("im"));
    CHECK((matrix_from_json(jr).mat() - r.mat()).norm() < 1e-15);

    Spectrum s = Spectrum::pm_sqrt_n(6);
    Spectrum s2 = spectrum_from_json(spectrum_to_json(s));
    CHECK((s.values - s2.values).norm() == 0.0);
}

TEST_SUITE_END();
