#include "isospec/samplers.hpp"

#include <cmath>

namespace isospec {

namespace {

Eigen::MatrixXcd gaussian_matrix(int rows, int cols, FieldTag field, RandomEngine& rng) {
    Eigen::MatrixXcd g(rows, cols);
    // column-major fill so the draw order matches Eigen's storage
    for (int c = 0; c < cols; ++c)
        for (int r = 0; r < rows; ++r)
            g(r, c) = (field == FieldTag::Complex) ? rng.complex_normal()
                                                   : std::complex<double>(rng.normal(), 0.0);
    return g;
}

}  // namespace

void InvariantEnsembleSpec::validate() const {
    if (!potential) throw std::invalid_argument("invariant ensemble: missing potential");
    if (n < 1) throw std::invalid_argument("invariant ensemble: n < 1");
    if (mcmc_steps <= burn_in || burn_in < 0)
        throw std::invalid_argument("invariant ensemble: need mcmc_steps > burn_in >= 0");
    if (mcmc_step_size <= 0.0) throw std::invalid_argument("invariant ensemble: step_size <= 0");
}

InvariantEnsembleSpec InvariantEnsembleSpec::quadratic(int n) {
    InvariantEnsembleSpec spec;
    spec.potential = [](double x) { return x * x; };
    spec.potential_deriv = [](double x) { return 2.0 * x; };
    spec.n = n;
    spec.burn_in = 10000L * n;
    spec.mcmc_steps = spec.burn_in + 1000;
    spec.mcmc_step_size = 1.0 / std::sqrt(static_cast<double>(n));
    return spec;
}

Eigen::MatrixXcd haar_matrix(int n, FieldTag field, RandomEngine& rng) {
    if (n < 1) throw std::invalid_argument("haar_matrix: n < 1");
    if (n > kMaxFullHaarDim)
        throw std::invalid_argument("haar_matrix: n exceeds the full-matrix guard; use haar_rows");
    Eigen::MatrixXcd g = gaussian_matrix(n, n, field, rng);
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
    Eigen::MatrixXcd q = qr.householderQ();
    Eigen::MatrixXcd r = qr.matrixQR();
    // U = Q diag(r_ii / |r_ii|); without this correction the distribution
    // follows the QR sign convention instead of Haar measure
    for (int i = 0; i < n; ++i) {
        std::complex<double> d = r(i, i);
        double a = std::abs(d);
        q.col(i) *= (a > 0.0) ? d / a : 1.0;
    }
    return q;
}

Eigen::MatrixXcd haar_rows(int n, int r, FieldTag field, RandomEngine& rng) {
    if (r < 1 || r > n) throw std::invalid_argument("haar_rows: need 1 <= r <= n");
    // Work on contiguous columns of an n x r matrix, then hand back the
    // adjoint.  Modified Gram-Schmidt with one re-orthogonalization pass;
    // the map is equivariant under multiplication by fixed group elements,
    // so the output is exactly uniform on the Stiefel manifold.
    Eigen::MatrixXcd cols = gaussian_matrix(n, r, field, rng);
    for (int i = 0; i < r; ++i) {
        for (int pass = 0; pass < 2; ++pass)
            for (int j = 0; j < i; ++j) {
                std::complex<double> proj = cols.col(j).dot(cols.col(i));
                cols.col(i) -= proj * cols.col(j);
            }
        double norm = cols.col(i).norm();
        if (norm == 0.0) throw std::runtime_error("haar_rows: degenerate Gaussian draw");
        cols.col(i) /= norm;
    }
    return cols.adjoint();
}

Eigen::VectorXcd sphere_uniform(int n, FieldTag field, RandomEngine& rng) {
    if (n < 1) throw std::invalid_argument("sphere_uniform: n < 1");
    Eigen::VectorXcd z(n);
    for (int i = 0; i < n; ++i)
        z[i] = (field == FieldTag::Complex) ? rng.complex_normal()
                                            : std::complex<double>(rng.normal(), 0.0);
    double norm = z.norm();
    if (norm == 0.0) throw std::runtime_error("sphere_uniform: degenerate Gaussian draw");
    return z / norm;
}

HermitianMatrix gaussian_ensemble(int n, FieldTag field, RandomEngine& rng) {
    if (n < 1) throw std::invalid_argument("gaussian_ensemble: n < 1");
    Eigen::MatrixXcd g(n, n);
    const double sqrt2 = std::sqrt(2.0);
    for (int j = 0; j < n; ++j) {
        g(j, j) = (field == FieldTag::Complex) ? rng.normal() : sqrt2 * rng.normal();
        for (int i = j + 1; i < n; ++i) {
            std::complex<double> e = (field == FieldTag::Complex)
                                         ? rng.complex_normal()
                                         : std::complex<double>(rng.normal(), 0.0);
            g(i, j) = e;
            g(j, i) = std::conj(e);
        }
    }
    return HermitianMatrix(std::move(g), field);
}

HermitianMatrix isospectral(const Spectrum& spectrum, FieldTag field, RandomEngine& rng) {
    int n = spectrum.n();
    Eigen::MatrixXcd u = haar_matrix(n, field, rng);
    Eigen::MatrixXcd a = u * spectrum.values.cast<std::complex<double>>().asDiagonal() * u.adjoint();
    return HermitianMatrix(std::move(a), field);
}

HermitianMatrix isospectral_entry_marginal(const Spectrum& spectrum, const std::vector<int>& rows,
                                           FieldTag field, RandomEngine& rng) {
    int n = spectrum.n();
    int r = static_cast<int>(rows.size());
    if (r < 1 || r > n) throw std::invalid_argument("isospectral_entry_marginal: bad row set");
    for (int idx : rows)
        if (idx < 1 || idx > n)
            throw std::invalid_argument("isospectral_entry_marginal: row index out of range");
    // a_{jk} = sum_i u_{ji} lambda_i conj(u_{ki}) needs only the selected
    // rows of U; by invariance their joint law depends only on |rows|.
    Eigen::MatrixXcd u_rows = haar_rows(n, r, field, rng);
    Eigen::MatrixXcd block =
        u_rows * spectrum.values.cast<std::complex<double>>().asDiagonal() * u_rows.adjoint();
    return HermitianMatrix(std::move(block), field);
}

HermitianMatrix induced_state(int n, int s, RandomEngine& rng) {
    if (n < 1 || s < 1) throw std::invalid_argument("induced_state: n, s >= 1 required");
    Eigen::VectorXcd z = sphere_uniform(n * s, FieldTag::Complex, rng);
    // reshape to n x s with row-major tensor indexing (a,c) -> a*s + c,
    // then rho = M M* = tr_2(Z Z*)
    Eigen::MatrixXcd m(n, s);
    for (int a = 0; a < n; ++a)
        for (int c = 0; c < s; ++c) m(a, c) = z[static_cast<long>(a) * s + c];
    Eigen::MatrixXcd rho = m * m.adjoint();
    return HermitianMatrix(std::move(rho), FieldTag::Complex);
}

Eigen::MatrixXcd perturbation_rotation(int n, double epsilon, FieldTag field, RandomEngine& rng) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("perturbation_rotation: epsilon must be in (0,1)");
    if (n < 2) throw std::invalid_argument("perturbation_rotation: n < 2");
    // V R_eps V* = I + (c-1)(v1 v1* + v2 v2*) + eps (v1 v2* - v2 v1*),
    // where v1, v2 are the first two columns of Haar V.  Only those two
    // columns matter, so draw them as orthonormalized Gaussians.
    Eigen::MatrixXcd v = haar_rows(n, 2, field, rng).adjoint();  // n x 2 orthonormal columns
    double c = std::sqrt(1.0 - epsilon * epsilon);
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(n, n);
    out += (c - 1.0) * (v.col(0) * v.col(0).adjoint() + v.col(1) * v.col(1).adjoint());
    out += epsilon * (v.col(0) * v.col(1).adjoint() - v.col(1) * v.col(0).adjoint());
    return out;
}

Eigen::MatrixXcd exchangeable_perturbation(const Eigen::MatrixXcd& u, double epsilon,
                                           RandomEngine& rng, FieldTag field) {
    if (u.rows() != u.cols()) throw std::invalid_argument("exchangeable_perturbation: U not square");
    return u * perturbation_rotation(static_cast<int>(u.rows()), epsilon, field, rng);
}

Spectrum invariant_ensemble_eigs(const InvariantEnsembleSpec& spec, RandomEngine& rng) {
    spec.validate();
    int n = spec.n;
    Eigen::VectorXd lambda(n);
    for (int i = 0; i < n; ++i) lambda[i] = rng.normal();

    auto log_vandermonde_col = [&](int i, double x) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            double diff = std::abs(x - lambda[j]);
            if (diff == 0.0) return -std::numeric_limits<double>::infinity();
            acc += std::log(diff);
        }
        return acc;
    };

    for (long step = 0; step < spec.mcmc_steps; ++step) {
        for (int i = 0; i < n; ++i) {
            double proposal = lambda[i] + spec.mcmc_step_size * rng.normal();
            double v_old = spec.potential(lambda[i]);
            double v_new = spec.potential(proposal);
            if (!std::isfinite(v_new) || !std::isfinite(v_old))
                throw std::runtime_error("invariant_ensemble_eigs: non-finite potential value");
            double delta = 2.0 * (log_vandermonde_col(i, proposal) - log_vandermonde_col(i, lambda[i])) -
                           n * (v_new - v_old);
            if (delta >= 0.0 || std::log(rng.uniform_pos()) < delta) lambda[i] = proposal;
        }
    }
    std::sort(lambda.begin(), lambda.end());
    return Spectrum{lambda};
}

}  // namespace isospec
