#include "isospec/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace isospec {

std::string to_string(FieldTag field) {
    return field == FieldTag::Real ? "real" : "complex";
}

FieldTag field_from_string(const std::string& s) {
    if (s == "real" || s == "Real" || s == "R") return FieldTag::Real;
    if (s == "complex" || s == "Complex" || s == "C") return FieldTag::Complex;
    throw std::invalid_argument("unknown field tag: " + s);
}

bool Spectrum::nonscalar() const {
    if (n() < 2) return false;
    return (values.array() != values[0]).any();
}

Eigen::VectorXd Spectrum::recentered() const {
    return values.array() - values.mean();
}

Spectrum Spectrum::pm_sqrt_n(int n) {
    if (n < 2 || n % 2 != 0) throw std::invalid_argument("pm_sqrt_n requires even n >= 2");
    Eigen::VectorXd v(n);
    double r = std::sqrt(static_cast<double>(n));
    v.head(n / 2).setConstant(r);
    v.tail(n / 2).setConstant(-r);
    return Spectrum{v};
}

HermitianMatrix::HermitianMatrix(Eigen::MatrixXcd entries, FieldTag field) : field_(field) {
    if (entries.rows() != entries.cols() || entries.rows() < 1)
        throw std::invalid_argument("HermitianMatrix requires a square nonempty matrix");
    if (field == FieldTag::Real && entries.imag().norm() > 1e-12 * (1.0 + entries.norm()))
        throw std::invalid_argument("real-field matrix has nonzero imaginary part");
    Eigen::MatrixXcd sym = 0.5 * (entries + entries.adjoint());
    double correction = (sym - entries).norm();
    clean_ = correction <= 1e-8 * std::max(1e-300, sym.norm());
    m_ = std::move(sym);
    m_.diagonal() = m_.diagonal().real().cast<std::complex<double>>();
}

HermitianMatrix HermitianMatrix::diagonal(const Eigen::VectorXd& diag, FieldTag field) {
    Eigen::MatrixXcd m = diag.cast<std::complex<double>>().asDiagonal();
    return HermitianMatrix(std::move(m), field);
}

HermitianMatrix HermitianMatrix::identity(int n, FieldTag field) {
    return HermitianMatrix(Eigen::MatrixXcd::Identity(n, n), field);
}

HermitianMatrix HermitianMatrix::zero(int n, FieldTag field) {
    return HermitianMatrix(Eigen::MatrixXcd::Zero(n, n), field);
}

Eigen::VectorXd HermitianMatrix::eigenvalues() const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m_, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
    return solver.eigenvalues();  // ascending
}

void CoefficientFrame::validate() const {
    int n = dim();
    for (const auto& b : matrices)
        if (b.dim() != n) throw std::invalid_argument("frame matrices have mixed dimensions");
    if (orthonormal) {
        for (int i = 0; i < d(); ++i)
            for (int j = i; j < d(); ++j) {
                double g = hs_inner(matrices[i], matrices[j]);
                double target = (i == j) ? 1.0 : 0.0;
                if (std::abs(g - target) > 1e-10)
                    throw std::invalid_argument("frame is not orthonormal at pair (" +
                                                std::to_string(i) + "," + std::to_string(j) + ")");
            }
    }
    if (traceless) {
        for (int i = 0; i < d(); ++i)
            if (std::abs(matrices[i].trace()) > 1e-10 * n)
                throw std::invalid_argument("frame matrix " + std::to_string(i) +
                                            " is not traceless");
    }
}

HermitianMatrix traceless(const HermitianMatrix& b) {
    int n = b.dim();
    Eigen::MatrixXcd m = b.mat();
    m.diagonal().array() -= b.trace() / n;
    return HermitianMatrix(std::move(m), b.field());
}

double hs_inner(const HermitianMatrix& a, const HermitianMatrix& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("hs_inner: dimension mismatch");
    if (a.field() != b.field()) throw std::invalid_argument("hs_inner: field mismatch");
    // tr(AB*) for self-adjoint A, B; real by construction
    return a.mat().cwiseProduct(b.mat().conjugate()).sum().real();
}

double schatten_norm(const HermitianMatrix& a, double p) {
    if (p < 1.0) throw std::invalid_argument("schatten_norm requires p >= 1");
    if (p == 2.0) return a.hs_norm();
    Eigen::VectorXd ev = a.eigenvalues();
    if (std::isinf(p)) return ev.cwiseAbs().maxCoeff();
    double s = 0.0;
    for (double lam : ev) s += std::pow(std::abs(lam), p);
    return std::pow(s, 1.0 / p);
}

double stable_rank(const HermitianMatrix& a) {
    double hs = a.hs_norm();
    if (hs == 0.0) throw std::invalid_argument("stable_rank of the zero matrix");
    double op = schatten_norm(a, std::numeric_limits<double>::infinity());
    return (hs / op) * (hs / op);
}

Eigen::VectorXd marginal_vector(const HermitianMatrix& a, const CoefficientFrame& frame) {
    Eigen::VectorXd x(frame.d());
    for (int i = 0; i < frame.d(); ++i) {
        if (frame.matrices[i].dim() != a.dim())
            throw std::invalid_argument("marginal_vector: dimension mismatch");
        x[i] = a.mat().cwiseProduct(frame.matrices[i].mat().conjugate()).sum().real();
    }
    return x;
}

EntrySelector EntrySelector::parse(const std::string& text) {
    std::istringstream in(text);
    std::string kind;
    in >> kind;
    EntrySelector sel{};
    if (kind == "D") {
        sel.kind = Kind::Diag;
        if (!(in >> sel.j)) throw std::invalid_argument("bad selector: " + text);
        sel.k = sel.j;
    } else if (kind == "R" || kind == "I") {
        sel.kind = (kind == "R") ? Kind::Re : Kind::Im;
        if (!(in >> sel.j >> sel.k)) throw std::invalid_argument("bad selector: " + text);
    } else {
        throw std::invalid_argument("bad selector: " + text);
    }
    return sel;
}

std::string EntrySelector::str() const {
    switch (kind) {
        case Kind::Diag: return "D " + std::to_string(j);
        case Kind::Re: return "R " + std::to_string(j) + " " + std::to_string(k);
        default: return "I " + std::to_string(j) + " " + std::to_string(k);
    }
}

std::pair<CoefficientFrame, AffineData> entry_frame(int n, const std::vector<EntrySelector>& picks,
                                                    FieldTag field) {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    CoefficientFrame frame;
    frame.orthonormal = true;
    frame.traceless = true;
    for (std::size_t a = 0; a < picks.size(); ++a) {
        const auto& p = picks[a];
        for (std::size_t b = 0; b < a; ++b)
            if (picks[b].kind == p.kind && picks[b].j == p.j && picks[b].k == p.k)
                throw std::invalid_argument("duplicate selector: " + p.str());
        if (p.j < 1 || p.j > n) throw std::invalid_argument("selector index out of range: " + p.str());
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
        switch (p.kind) {
            case EntrySelector::Kind::Diag:
                m(p.j - 1, p.j - 1) = 1.0;
                frame.traceless = false;
                break;
            case EntrySelector::Kind::Re:
                if (p.j >= p.k || p.k > n)
                    throw std::invalid_argument("off-diagonal selector needs j < k <= n: " + p.str());
                m(p.j - 1, p.k - 1) = inv_sqrt2;
                m(p.k - 1, p.j - 1) = inv_sqrt2;
                break;
            case EntrySelector::Kind::Im:
                if (field != FieldTag::Complex)
                    throw std::invalid_argument("imaginary-part selector requires complex field");
                if (p.j >= p.k || p.k > n)
                    throw std::invalid_argument("off-diagonal selector needs j < k <= n: " + p.str());
                m(p.j - 1, p.k - 1) = std::complex<double>(0.0, inv_sqrt2);
                m(p.k - 1, p.j - 1) = std::complex<double>(0.0, -inv_sqrt2);
                break;
        }
        frame.matrices.emplace_back(std::move(m), field);
    }

    int d = frame.d();
    // Sigma_ij = delta_ij - tr(B_i) tr(B_j) / n; with the D picks listed
    // first this is exactly I_d - J_r / n.
    Eigen::VectorXd traces(d);
    for (int i = 0; i < d; ++i) traces[i] = frame.matrices[i].trace();
    AffineData affine;
    affine.sigma = Eigen::MatrixXd::Identity(d, d) - traces * traces.transpose() / n;
    affine.shift = Eigen::VectorXd::Zero(d);  // traceless-Lambda context
    return {std::move(frame), std::move(affine)};
}

AffineData gram_and_shift(const std::vector<HermitianMatrix>& raw, const Spectrum& spectrum) {
    int d = static_cast<int>(raw.size());
    int n = spectrum.n();
    std::vector<HermitianMatrix> recentered;
    recentered.reserve(raw.size());
    for (const auto& b : raw) {
        if (b.dim() != n) throw std::invalid_argument("gram_and_shift: dimension mismatch");
        recentered.push_back(traceless(b));
    }
    AffineData out;
    out.sigma.resize(d, d);
    out.shift.resize(d);
    for (int i = 0; i < d; ++i) {
        for (int j = i; j < d; ++j) {
            double g = hs_inner(recentered[i], recentered[j]);
            out.sigma(i, j) = g;
            out.sigma(j, i) = g;
        }
        out.shift[i] = spectrum.trace() * raw[i].trace() / n;
    }
    return out;
}

CoefficientFrame orthonormalize_traceless(const std::vector<HermitianMatrix>& raw) {
    CoefficientFrame frame;
    frame.orthonormal = true;
    frame.traceless = true;
    for (std::size_t idx = 0; idx < raw.size(); ++idx) {
        HermitianMatrix b = traceless(raw[idx]);
        Eigen::MatrixXcd m = b.mat();
        for (const auto& prev : frame.matrices)
            m -= hs_inner(b, prev) * prev.mat();
        // re-orthogonalize once; classical Gram-Schmidt alone drifts
        HermitianMatrix h1(m, b.field());
        for (const auto& prev : frame.matrices)
            m -= hs_inner(h1, prev) * prev.mat();
        double norm = m.norm();
        if (norm < 1e-10) throw RankDeficiencyError(static_cast<int>(idx));
        frame.matrices.emplace_back(m / norm, b.field());
    }
    return frame;
}

HermitianMatrix partial_trace_second(const Eigen::MatrixXcd& m, int n, int s) {
    if (n < 1 || s < 1 || m.rows() != m.cols() || m.rows() != static_cast<long>(n) * s)
        throw std::invalid_argument("partial_trace_second: dimension not factorable as n*s");
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < s; ++c)
                out(a, b) += m(a * s + c, b * s + c);
    return HermitianMatrix(std::move(out), FieldTag::Complex);
}

nlohmann::json matrix_to_json(const HermitianMatrix& a) {
    int n = a.dim();
    nlohmann::json j;
    j["n"] = n;
    j["field"] = to_string(a.field());
    std::vector<double> re;
    re.reserve(static_cast<std::size_t>(n) * n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) re.push_back(a.mat()(r, c).real());
    j["re"] = std::move(re);
    if (a.field() == FieldTag::Complex) {
        std::vector<double> im;
        im.reserve(static_cast<std::size_t>(n) * n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) im.push_back(a.mat()(r, c).imag());
        j["im"] = std::move(im);
    }
    return j;
}

HermitianMatrix matrix_from_json(const nlohmann::json& j) {
    int n = j.at("n").get<int>();
    FieldTag field = field_from_string(j.at("field").get<std::string>());
    auto re = j.at("re").get<std::vector<double>>();
    if (re.size() != static_cast<std::size_t>(n) * n)
        throw std::invalid_argument("matrix_from_json: wrong 're' length");
    std::vector<double> im;
    if (field == FieldTag::Complex && j.contains("im")) {
        im = j.at("im").get<std::vector<double>>();
        if (im.size() != re.size()) throw std::invalid_argument("matrix_from_json: wrong 'im' length");
    }
    Eigen::MatrixXcd m(n, n);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            std::size_t idx = static_cast<std::size_t>(r) * n + c;
            m(r, c) = {re[idx], im.empty() ? 0.0 : im[idx]};
        }
    return HermitianMatrix(std::move(m), field);
}

nlohmann::json spectrum_to_json(const Spectrum& s) {
    return std::vector<double>(s.values.begin(), s.values.end());
}

Spectrum spectrum_from_json(const nlohmann::json& j) {
    auto v = j.get<std::vector<double>>();
    Spectrum s;
    s.values = Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<long>(v.size()));
    return s;
}

}  // namespace isospec
