#pragma once

#include "commfactor/matcore.hpp"

namespace commfactor {

struct CommutatorPair {
    CMatrix x;
    CMatrix y;
    double norm_x_to_1 = 0;
    double norm_y_to_1 = 0;
    // condition number of the similarity used to build the pair (1 for unitary routes)
    double condition = 1;

    CMatrix value() const { return commutator(x, y); }
    double max_dist_to_1() const { return std::max(norm_x_to_1, norm_y_to_1); }
};

CommutatorPair make_pair(CMatrix x, CMatrix y, double condition = 1);
CommutatorPair identity_pair(int n);
// q x q^{-1}, q y q^{-1}; q unitary keeps the recorded norms
CommutatorPair conjugate_pair(const CommutatorPair& p, const CMatrix& q, const CMatrix& q_inv);
// embeds a pair into coordinates idx of an n-dimensional identity
CommutatorPair embed_pair(const CommutatorPair& p, const std::vector<int>& idx, int n);

// (v, w) = diag(e^{it}, e^{-it}) with v, w in SU(2), |v - 1|, |w - 1| <= |e^{it} - 1|^{1/2}.
// v and w are rotations by one angle about orthogonal axes, conjugated so that
// their commutator is diagonal.
CommutatorPair su2_diag_commutator(double t);

// (v, w) = diag(alpha, conj(alpha)). Near 1 (|alpha - 1| < sqrt 2) this is the
// norm-controlled SU(2) pair; otherwise v = diag(alpha, 1) and w is the swap.
CommutatorPair swap_trick_commutator(cplx alpha, double tol = 1e-8);

// (x, y) = diag(lambda, 1/lambda): a pair of shears whose commutator has
// eigenvalues lambda, 1/lambda, brought to diagonal form by a unit-column similarity.
CommutatorPair invertible_diag_commutator(double lambda);

}  // namespace commfactor
