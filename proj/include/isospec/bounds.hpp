#pragma once

#include <map>
#include <optional>
#include <string>

#include "isospec/linalg.hpp"

namespace isospec {

// Universal constants the statements leave unspecified.  Defaults of 1 are
// reported symbolically, never asserted as ground truth.
struct ConstantsConfig {
    double c_r1 = 1.0;          // quartic-statistic constant C
    double c_dallaporta = 1.0;  // GUE semicircle rate constant C
    double kappa_invariant = 1.0;

    void validate() const;
};

// Evaluated right-hand side of one theorem, with every ingredient exposed.
struct BoundReport {
    std::string theorem_id;
    double value = 0.0;
    std::string symbolic_constant;  // e.g. "c_r1" when value carries an unknown C
    std::map<std::string, double> ingredients;

    // target-law parameters for the affine form
    std::optional<Eigen::MatrixXd> target_cov;
    std::optional<Eigen::VectorXd> target_shift;

    nlohmann::json to_json() const;
};

// W1 bound for marginals against an orthonormal traceless frame; the
// report's "scaling" ingredient is the factor applied to X on the left.
BoundReport bound_t0(const Spectrum& spectrum, const CoefficientFrame& frame, FieldTag field);

// total-variation form of the d=1 clause: twice the single-term W1 bound
BoundReport bound_t0_tv(const Spectrum& spectrum, const HermitianMatrix& b, FieldTag field);

// affine form for an arbitrary coefficient list
BoundReport bound_affine(const Spectrum& spectrum, const std::vector<HermitianMatrix>& raw);

// C sum ||B_j||_4^2 statistic (rank-one / induced-state theorems);
// dividing by sqrt(s) when s is given
BoundReport statistic_quartic(const CoefficientFrame& frame, int n, std::optional<int> s,
                              const ConstantsConfig& constants);

// entry-marginal bound 9 d sqrt(n) / srank(Lambda), traceless Lambda
BoundReport bound_entries(const Spectrum& spectrum, int d);

// submatrix W1 bound, semicircle expectation bound, and concentration tail
BoundReport bound_submatrix_semicircle(const Spectrum& spectrum, int k, double t,
                                       const ConstantsConfig& constants);

// plug-in Monte Carlo evaluation of the invariant-ensemble bounds from a
// set of eigenvalue samples
BoundReport bound_invariant(const std::vector<Spectrum>& lambda_samples,
                            const CoefficientFrame& frame, const ConstantsConfig& constants);

}  // namespace isospec
