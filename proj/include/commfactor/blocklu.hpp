#pragma once

#include <vector>

#include "commfactor/matcore.hpp"
#include "commfactor/su2fact.hpp"

namespace commfactor {

// Measurements for one two-block split x = s d t with p the leading block.
struct SplitCertificate {
    int rank = 0;
    // |q x p (p x p)^{-1} p x q|
    double cross = 0;
    // 1 / |(q x q)^{-1}|, the admissibility threshold for cross
    double threshold = 0;
    // distances to the unitaries of the corner
    double dist_pxp = 0;
    double dist_pdp = 0;
    double dist_qxq = 0;
    double dist_qdq = 0;
    // both diagonal blocks of d positive definite (meaningful for positive x)
    bool positive_blocks = false;

    double margin() const { return threshold - cross; }
};

// x = s d t: s block lower unitriangular, d block diagonal, t block upper
// unitriangular, all with respect to `blocks`. In frame coordinates
// s = 1 + qxp (pxp)^{-1}, t = 1 + (pxp)^{-1} pxq and d = pxp + (qxq - qxp (pxp)^{-1} pxq).
struct StdFactors {
    CMatrix s;
    CMatrix t;
    CMatrix d;
    BlockDecomposition blocks;
    std::vector<SplitCertificate> levels;
    // |s d t - x| / |x|
    double recon_err = 0;
};

StdFactors schur_std(const CMatrix& x, const Projection& p, double tol = 1e-12);

struct ProjectionChoice {
    Projection p;
    SplitCertificate split;
    // distance of x to the unitaries (from the polar decomposition)
    double dist = 0;
    // right-hand side of the cross-term estimate (d + eps)^2 / sqrt(1 - 2.1 (d + eps))
    double cross_bound = 0;
    // bound shared by the two compression distances, d + eps
    double dist_bound = 0;
    bool positive = false;
};

// Rank-r projection aligned with eigenvectors: of x itself when x is positive,
// otherwise of the unitary polar part. Requires x positive or within 1/10 of
// the unitaries.
ProjectionChoice select_projection(const CMatrix& x, int r, double eps = 1e-3);

// Two rank classes as even as n allows: ceil(k/2) blocks of one rank, the rest of another.
std::vector<int> two_class_ranks(int n, int k);

// Nested splits with projections from select_projection, eps per level.
StdFactors recursive_std(const CMatrix& x, int k, double eps = 1e-3);

// (g, v) = t for block unitriangular t (upper or lower): g is block scalar
// with lambda_j = 2^{k-1-j} and v solves (lambda_i / lambda_j) v_ij = (t v)_ij
// outward from the diagonal. condition holds |g| |g^{-1}|.
CommutatorPair unitriangular_commutator(const CMatrix& t, const BlockDecomposition& blocks, double tol = 1e-9);

}  // namespace commfactor
