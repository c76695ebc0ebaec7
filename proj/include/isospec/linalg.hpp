#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace isospec {

enum class FieldTag { Real, Complex };

std::string to_string(FieldTag field);
FieldTag field_from_string(const std::string& s);

// Prescribed eigenvalues (the diagonal of Lambda).
struct Spectrum {
    Eigen::VectorXd values;

    int n() const { return static_cast<int>(values.size()); }
    double trace() const { return values.sum(); }
    bool nonscalar() const;

    // eigenvalues minus their mean (the diagonal of Lambda-tilde)
    Eigen::VectorXd recentered() const;

    // n/2 entries at +sqrt(n), n/2 at -sqrt(n); requires even n
    static Spectrum pm_sqrt_n(int n);
};

// Dense self-adjoint matrix over R or C.  Real matrices are stored with
// zero imaginary parts so every kernel runs on one scalar type.
class HermitianMatrix {
  public:
    HermitianMatrix(Eigen::MatrixXcd entries, FieldTag field);

    static HermitianMatrix diagonal(const Eigen::VectorXd& diag, FieldTag field = FieldTag::Real);
    static HermitianMatrix identity(int n, FieldTag field = FieldTag::Real);
    static HermitianMatrix zero(int n, FieldTag field = FieldTag::Real);

    int dim() const { return static_cast<int>(m_.rows()); }
    FieldTag field() const { return field_; }
    const Eigen::MatrixXcd& mat() const { return m_; }

    // false if the symmetrization applied at construction moved the input
    // by more than 1e-8 * ||.||_HS
    bool construction_clean() const { return clean_; }

    double trace() const { return m_.trace().real(); }
    double hs_norm() const { return m_.norm(); }
    Eigen::VectorXd eigenvalues() const;  // ascending

  private:
    Eigen::MatrixXcd m_;
    FieldTag field_;
    bool clean_ = true;
};

// Ordered list of self-adjoint coefficient matrices B_1..B_d.
struct CoefficientFrame {
    std::vector<HermitianMatrix> matrices;
    bool orthonormal = false;
    bool traceless = false;

    int d() const { return static_cast<int>(matrices.size()); }
    int dim() const { return matrices.empty() ? 0 : matrices.front().dim(); }

    // checks the claimed orthonormality/tracelessness flags; throws on violation
    void validate() const;
};

// Gram matrix of the recentered frame plus the affine shift of Cor DL-B-C.
struct AffineData {
    Eigen::MatrixXd sigma;
    Eigen::VectorXd shift;
};

struct RankDeficiencyError : std::runtime_error {
    int index;
    explicit RankDeficiencyError(int idx)
        : std::runtime_error("rank deficiency at input index " + std::to_string(idx)),
          index(idx) {}
};

// B - (tr B / n) I
HermitianMatrix traceless(const HermitianMatrix& b);

// real Hilbert-Schmidt inner product tr(AB)
double hs_inner(const HermitianMatrix& a, const HermitianMatrix& b);

// l_p norm of the eigenvalue vector; p = infinity gives the operator norm
double schatten_norm(const HermitianMatrix& a, double p);

// ||A||_HS^2 / ||A||_op^2, in [1, rank A]
double stable_rank(const HermitianMatrix& a);

// X_i = tr(A B_i)
Eigen::VectorXd marginal_vector(const HermitianMatrix& a, const CoefficientFrame& frame);

// Entry selector for the frames of Cor DL-entries-C: a diagonal entry,
// or the real/imaginary part of an above-diagonal entry (1-based indices).
struct EntrySelector {
    enum class Kind { Diag, Re, Im };
    Kind kind;
    int j;
    int k;  // unused for Diag

    static EntrySelector parse(const std::string& text);
    std::string str() const;
};

std::pair<CoefficientFrame, AffineData> entry_frame(int n, const std::vector<EntrySelector>& picks,
                                                    FieldTag field = FieldTag::Complex);

AffineData gram_and_shift(const std::vector<HermitianMatrix>& raw, const Spectrum& spectrum);

// Gram-Schmidt in the HS inner product after traceless recentering.
CoefficientFrame orthonormalize_traceless(const std::vector<HermitianMatrix>& raw);

// tr_2 over the second factor of C^n (x) C^s, row-major tensor indexing
HermitianMatrix partial_trace_second(const Eigen::MatrixXcd& m, int n, int s);

// JSON schema: {n, field, re: row-major, im: row-major (omitted for Real)}
nlohmann::json matrix_to_json(const HermitianMatrix& a);
HermitianMatrix matrix_from_json(const nlohmann::json& j);
nlohmann::json spectrum_to_json(const Spectrum& s);
Spectrum spectrum_from_json(const nlohmann::json& j);

}  // namespace isospec
