#include "isospec/bounds.hpp"

#include <cmath>
#include <limits>

namespace isospec {

namespace {

struct SpectralIngredients {
    int n;
    double hs;     // ||Lambda-tilde||_HS
    double op;     // ||Lambda-tilde||_op
    double srank;  // hs^2 / op^2
};

SpectralIngredients recentered_ingredients(const Spectrum& spectrum) {
    Eigen::VectorXd lt = spectrum.recentered();
    SpectralIngredients s;
    s.n = spectrum.n();
    s.hs = lt.norm();
    s.op = lt.cwiseAbs().maxCoeff();
    if (s.hs == 0.0) throw std::invalid_argument("scalar spectrum: recentered Lambda is zero");
    s.srank = (s.hs / s.op) * (s.hs / s.op);
    return s;
}

double sum_op_squared(const CoefficientFrame& frame) {
    double acc = 0.0;
    for (const auto& b : frame.matrices) {
        double op = schatten_norm(b, std::numeric_limits<double>::infinity());
        acc += op * op;
    }
    return acc;
}

double sum_inv_srank(const CoefficientFrame& frame) {
    double acc = 0.0;
    for (const auto& b : frame.matrices) acc += 1.0 / stable_rank(b);
    return acc;
}

}  // namespace

void ConstantsConfig::validate() const {
    if (!(c_r1 > 0.0 && c_dallaporta > 0.0 && kappa_invariant > 0.0))
        throw std::invalid_argument("ConstantsConfig: all constants must be positive");
}

nlohmann::json BoundReport::to_json() const {
    nlohmann::json j;
    j["theorem_id"] = theorem_id;
    j["value"] = value;
    if (!symbolic_constant.empty()) j["symbolic_constant"] = symbolic_constant;
    j["ingredients"] = ingredients;
    if (target_cov) {
        std::vector<double> cov(target_cov->data(), target_cov->data() + target_cov->size());
        j["target_cov"] = cov;
    }
    if (target_shift)
        j["target_shift"] = std::vector<double>(target_shift->begin(), target_shift->end());
    return j;
}

BoundReport bound_t0(const Spectrum& spectrum, const CoefficientFrame& frame, FieldTag field) {
    if (!spectrum.nonscalar()) throw std::invalid_argument("bound_t0: scalar spectrum");
    auto s = recentered_ingredients(spectrum);
    double n = s.n;
    double ratio = (s.op * s.op) / (s.hs * s.hs);
    double sum_op2 = sum_op_squared(frame);

    BoundReport report;
    double rhs, scaling;
    if (field == FieldTag::Real) {
        report.theorem_id = "t0_real_w1";
        rhs = 8.0 * std::sqrt(2.0) * (std::sqrt(n - 1.0) * (n + 2.0) / n) * ratio * sum_op2;
        scaling = std::sqrt((n - 1.0) * (n + 2.0)) / (std::sqrt(2.0) * s.hs);
    } else {
        report.theorem_id = "t0_complex_w1";
        rhs = 8.0 * std::sqrt(n) * ratio * sum_op2;
        scaling = std::sqrt(n * n - 1.0) / s.hs;
    }
    report.value = rhs;
    report.ingredients = {{"n", n},
                          {"d", static_cast<double>(frame.d())},
                          {"lambda_hs", s.hs},
                          {"lambda_op", s.op},
                          {"lambda_srank", s.srank},
                          {"sum_op2", sum_op2},
                          {"sum_inv_srank", sum_inv_srank(frame)},
                          {"scaling", scaling}};
    return report;
}

BoundReport bound_t0_tv(const Spectrum& spectrum, const HermitianMatrix& b, FieldTag field) {
    if (std::abs(b.trace()) > 1e-10 || std::abs(b.hs_norm() - 1.0) > 1e-8)
        throw std::invalid_argument("bound_t0_tv: coefficient must be traceless with unit HS norm");
    CoefficientFrame frame{{b}, true, true};
    BoundReport report = bound_t0(spectrum, frame, field);
    report.theorem_id = (field == FieldTag::Real) ? "t0_real_tv" : "t0_complex_tv";
    report.value *= 2.0;
    return report;
}

BoundReport bound_affine(const Spectrum& spectrum, const std::vector<HermitianMatrix>& raw) {
    if (!spectrum.nonscalar()) throw std::invalid_argument("bound_affine: scalar spectrum");
    auto s = recentered_ingredients(spectrum);
    double n = s.n;
    int d = static_cast<int>(raw.size());
    AffineData affine = gram_and_shift(raw, spectrum);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(affine.sigma, Eigen::EigenvaluesOnly);
    double sigma_max = std::max(0.0, es.eigenvalues().maxCoeff());
    double sigma_sqrt_op = std::sqrt(sigma_max);

    BoundReport report;
    report.theorem_id = "affine_complex_w1";
    report.value = (8.0 * d / std::sqrt(n - 1.0)) * sigma_sqrt_op * (s.op * s.op) / s.hs;
    report.ingredients = {{"n", n},
                          {"d", static_cast<double>(d)},
                          {"lambda_hs", s.hs},
                          {"lambda_op", s.op},
                          {"lambda_srank", s.srank},
                          {"sigma_sqrt_op", sigma_sqrt_op},
                          {"cov_factor", s.hs / std::sqrt(n * n - 1.0)}};
    // target law: (||Lambda-tilde||_HS / sqrt(n^2-1)) Sigma^(1/2) g + v
    report.target_cov = affine.sigma;
    report.target_shift = affine.shift;
    return report;
}

BoundReport statistic_quartic(const CoefficientFrame& frame, int n, std::optional<int> s,
                              const ConstantsConfig& constants) {
    constants.validate();
    double sum_q = 0.0;
    for (const auto& b : frame.matrices) {
        double s4 = schatten_norm(b, 4.0);
        sum_q += s4 * s4;
    }
    double sum_weak = 0.0;
    for (const auto& b : frame.matrices) sum_weak += 1.0 / std::sqrt(stable_rank(b));

    BoundReport report;
    report.theorem_id = s ? "induced_state_w1" : "rank_one_w1";
    report.symbolic_constant = "c_r1";
    double value = constants.c_r1 * sum_q;
    double scaling = std::sqrt(static_cast<double>(n) * (n + 1.0));
    if (s) {
        value /= std::sqrt(static_cast<double>(*s));
        scaling = std::sqrt(static_cast<double>(n) * (static_cast<double>(n) * (*s) + 1.0));
    }
    report.value = value;
    report.ingredients = {{"n", static_cast<double>(n)},
                          {"d", static_cast<double>(frame.d())},
                          {"sum_schatten4_sq", sum_q},
                          {"sum_inv_sqrt_srank", sum_weak},
                          {"scaling", scaling}};
    if (s) report.ingredients["s"] = static_cast<double>(*s);
    return report;
}

BoundReport bound_entries(const Spectrum& spectrum, int d) {
    if (std::abs(spectrum.trace()) > 1e-10)
        throw std::invalid_argument("bound_entries: nonzero trace");
    double hs = spectrum.values.norm();
    if (hs == 0.0) throw std::invalid_argument("bound_entries: zero spectrum");
    double op = spectrum.values.cwiseAbs().maxCoeff();
    double srank = (hs / op) * (hs / op);
    double n = spectrum.n();

    BoundReport report;
    report.theorem_id = "entries_w1";
    report.value = 9.0 * d * std::sqrt(n) / srank;
    report.ingredients = {{"n", n},
                          {"d", static_cast<double>(d)},
                          {"lambda_hs", hs},
                          {"lambda_op", op},
                          {"lambda_srank", srank},
                          {"scaling", std::sqrt(n * n - 1.0) / hs}};
    return report;
}

BoundReport bound_submatrix_semicircle(const Spectrum& spectrum, int k, double t,
                                       const ConstantsConfig& constants) {
    constants.validate();
    if (std::abs(spectrum.trace()) > 1e-10)
        throw std::invalid_argument("bound_submatrix_semicircle: nonzero trace");
    if (k < 1 || k > spectrum.n())
        throw std::invalid_argument("bound_submatrix_semicircle: k outside [1, n]");
    if (t < 0.0) throw std::invalid_argument("bound_submatrix_semicircle: t < 0");
    double hs = spectrum.values.norm();
    double op = spectrum.values.cwiseAbs().maxCoeff();
    double srank = (hs / op) * (hs / op);
    double n = spectrum.n();

    auto expectation_bound = [&](double kk) {
        double rate = (kk >= 2.0) ? constants.c_dallaporta * std::sqrt(std::log(kk)) / kk : 0.0;
        return 18.0 * kk * kk * std::sqrt(n) / srank + rate;
    };

    double submatrix_term = 18.0 * static_cast<double>(k) * k * std::sqrt(n) / srank;
    double exp_bound = expectation_bound(k);
    double tail = std::exp(-static_cast<double>(k) * k * srank * t * t / (48.0 * n));

    // turning point: integer k minimizing the two-term expectation bound
    int k_star = 2;
    double best = std::numeric_limits<double>::infinity();
    for (int kk = 2; kk <= spectrum.n(); ++kk) {
        double v = expectation_bound(kk);
        if (v < best) {
            best = v;
            k_star = kk;
        }
    }

    BoundReport report;
    report.theorem_id = "submatrix_semicircle";
    report.value = exp_bound;
    report.symbolic_constant = "c_dallaporta";
    report.ingredients = {{"n", n},
                          {"k", static_cast<double>(k)},
                          {"lambda_hs", hs},
                          {"lambda_op", op},
                          {"lambda_srank", srank},
                          {"submatrix_w1_bound", submatrix_term},
                          {"semicircle_expectation_bound", exp_bound},
                          {"tail_probability_bound", tail},
                          {"tail_level", t},
                          {"k_turning_point", static_cast<double>(k_star)},
                          {"scaling", std::sqrt(n * n - 1.0) / hs}};
    return report;
}

BoundReport bound_invariant(const std::vector<Spectrum>& lambda_samples,
                            const CoefficientFrame& frame, const ConstantsConfig& constants) {
    constants.validate();
    if (lambda_samples.empty()) throw std::invalid_argument("bound_invariant: empty sample list");
    double n = lambda_samples.front().n();
    double mean_hs = 0.0, mean_ratio = 0.0;
    std::vector<double> hs_values;
    hs_values.reserve(lambda_samples.size());
    for (const auto& lam : lambda_samples) {
        auto s = recentered_ingredients(lam);
        hs_values.push_back(s.hs);
        mean_hs += s.hs;
        mean_ratio += (s.op * s.op) / s.hs;
    }
    mean_hs /= static_cast<double>(lambda_samples.size());
    mean_ratio /= static_cast<double>(lambda_samples.size());
    double mean_abs_dev = 0.0;
    for (double h : hs_values) mean_abs_dev += std::abs(h - mean_hs);
    mean_abs_dev /= static_cast<double>(hs_values.size());

    double s_inv = sum_inv_srank(frame);
    double d = frame.d();
    double bound_unscaled = (8.0 / std::sqrt(n)) * mean_ratio * s_inv;
    double fluct = std::sqrt(d) * mean_abs_dev / mean_hs;
    double bound_scaled = (8.0 * std::sqrt(n) / mean_hs) * mean_ratio * s_inv + fluct;
    double bound_cor = constants.kappa_invariant / std::sqrt(n) * s_inv;

    BoundReport report;
    report.theorem_id = "invariant_ensemble_w1";
    report.value = bound_scaled;
    report.symbolic_constant = "kappa_invariant";
    report.ingredients = {{"n", n},
                          {"d", d},
                          {"samples", static_cast<double>(lambda_samples.size())},
                          {"mean_hs", mean_hs},
                          {"mean_op2_over_hs", mean_ratio},
                          {"mean_abs_hs_dev", mean_abs_dev},
                          {"sum_inv_srank", s_inv},
                          {"bound_unscaled", bound_unscaled},
                          {"bound_scaled", bound_scaled},
                          {"fluctuation_term", fluct},
                          {"bound_invariant_cor", bound_cor},
                          {"scaling", std::sqrt(n * n - 1.0) / mean_hs}};
    return report;
}

}  // namespace isospec
