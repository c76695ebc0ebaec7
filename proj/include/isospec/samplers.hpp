#pragma once

#include <functional>
#include <vector>

#include "isospec/linalg.hpp"
#include "isospec/rng.hpp"

namespace isospec {

// Unitarily invariant ensemble with matrix density proportional to
// exp(-n tr V), sampled through its eigenvalue law by random-walk
// Metropolis on the log-gas joint density.
struct InvariantEnsembleSpec {
    std::function<double(double)> potential;
    std::function<double(double)> potential_deriv;  // optional, informational
    int n = 0;
    long mcmc_steps = 0;  // total sweeps, including burn-in
    double mcmc_step_size = 0.0;
    long burn_in = 0;

    void validate() const;
    static InvariantEnsembleSpec quadratic(int n);  // V(x) = x^2 with default MCMC knobs
};

// Full Haar sampler refuses larger n; use the partial-row fast path instead.
inline constexpr int kMaxFullHaarDim = 16384;

// Haar-distributed unitary (Complex) or orthogonal (Real) matrix.
// QR with phase/sign correction of the R diagonal; plain QR is not Haar.
Eigen::MatrixXcd haar_matrix(int n, FieldTag field, RandomEngine& rng);

// First r rows of a Haar matrix, built by Gram-Schmidt on r Gaussian
// n-vectors.  Cost O(n r^2).
Eigen::MatrixXcd haar_rows(int n, int r, FieldTag field, RandomEngine& rng);

// Uniform point on the unit sphere of F^n.
Eigen::VectorXcd sphere_uniform(int n, FieldTag field, RandomEngine& rng);

// GUE (Complex) or GOE (Real, sqrt(2) scaling convention).
HermitianMatrix gaussian_ensemble(int n, FieldTag field, RandomEngine& rng);

// A = U Lambda U* with Haar U.
HermitianMatrix isospectral(const Spectrum& spectrum, FieldTag field, RandomEngine& rng);

// The r x r block of an isospectral draw on the given (1-based) row set,
// without generating the full Haar matrix.  Cost O(n r^2).
HermitianMatrix isospectral_entry_marginal(const Spectrum& spectrum, const std::vector<int>& rows,
                                           FieldTag field, RandomEngine& rng);

// Random induced density matrix rho_{n,s}: partial trace over C^s of a
// uniform pure state on C^n (x) C^s.
HermitianMatrix induced_state(int n, int s, RandomEngine& rng);

// V R_eps V* for fresh Haar V, as a dense matrix (rank-2 update of I).
Eigen::MatrixXcd perturbation_rotation(int n, double epsilon, FieldTag field, RandomEngine& rng);

// One step of the exchangeable pair: U -> U V R_eps V*.
Eigen::MatrixXcd exchangeable_perturbation(const Eigen::MatrixXcd& u, double epsilon,
                                           RandomEngine& rng,
                                           FieldTag field = FieldTag::Complex);

// One draw of the eigenvalue vector of an invariant ensemble (sorted).
Spectrum invariant_ensemble_eigs(const InvariantEnsembleSpec& spec, RandomEngine& rng);

}  // namespace isospec
