#pragma once

#include <vector>

#include "isospec/linalg.hpp"

namespace isospec {

// Mixed moment query E[Z_{i_1}..Z_{i_k} conj(Z_{j_1}..Z_{j_k})] for a
// sphere-uniform Z; indices are 1-based multisets.
struct MomentQuery {
    std::vector<int> top_indices;
    std::vector<int> bottom_indices;
    int n = 0;
};

// E[u_{ij} u_{kl} conj(u_{il}) conj(u_{kj})] for Haar U in U(n):
// (n d_ik + n d_jl - d_ik d_jl - 1) / ((n-1) n (n+1)); 1-based indices
double unitary_degree4_moment(int i, int j, int k, int l, int n);

// E A^2 = (||Lambda||_HS^2 / n) I_n for A = U Lambda U*
HermitianMatrix expected_A_squared(const Spectrum& spectrum);

// E tr(ABAC) = { ||Lambda||_HS^2 [n (tr B)(tr C) - tr(BC)]
//              + (tr Lambda)^2 [n tr(BC) - (tr B)(tr C)] } / ((n-1) n (n+1))
double expected_tr_ABAC(const Spectrum& spectrum, const HermitianMatrix& b,
                        const HermitianMatrix& c);

// E[tr(QF) tr(QG)] = 2 [(tr F)(tr G) - n tr(FG)] / ((n-1) n (n+1)),
// Q = v1 v2* - v2 v1* for v1, v2 the first two columns of Haar V
double expected_trQF_trQG(const Eigen::MatrixXcd& f, const Eigen::MatrixXcd& g, int n);

// E[|Z_1|^a1 ... |Z_n|^an] over the complex sphere via the Gamma formula,
// evaluated in log-Gamma space; exponents must be even
double sphere_abs_moment(const std::vector<long>& alphas);

// mixed sphere moment: (# matchings) / (n (n+1) ... (n+k-1)), zero unless
// the top and bottom index multisets agree
double sphere_mixed_moment(const MomentQuery& q);

// E[<BZ,Z><CZ,Z>] = tr(BC) / (n(n+1)) for traceless Hermitian B, C
double quad_form_cov(const HermitianMatrix& b, const HermitianMatrix& c);

enum class QuadFormKind {
    Sq,      // E <Bz,Cz>^2
    AbsSq,   // E |<Bz,Cz>|^2
    Cross,   // E [<Bz,Cz><Bz,z><Cz,z>]     (traceless inputs)
    Full,    // E [<Bz,z>^2 <Cz,z>^2]       (traceless inputs)
};

double quad_form_deg4(const HermitianMatrix& b, const HermitianMatrix& c, QuadFormKind which);

}  // namespace isospec
