#include "commfactor/blocklu.hpp"

#include <cmath>
#include <string>

namespace commfactor {

namespace {

struct Split {
    CMatrix a, lower, upper, schur;
    SplitCertificate cert;
};

// one Schur step on y in its own coordinates, leading block of size r
Split split_leading(const CMatrix& y, int r, double tol) {
    const int n = y.rows();
    const CMatrix a = block(y, 0, 0, r, r), b = block(y, 0, r, r, n - r);
    const CMatrix c = block(y, r, 0, n - r, r), d = block(y, r, r, n - r, n - r);
    const double scale = std::max(norm2(y), 1e-300);
    if (smallest_singular_value(a) <= tol * scale) throw Error(ErrorKind::BlockSingular, "pxp is singular");
    const double d_min = smallest_singular_value(d);
    if (d_min <= tol * scale) throw Error(ErrorKind::BlockSingular, "qxq is singular");
    const CMatrix a_inv = inverse(a);
    Split s;
    s.a = a;
    s.lower = c * a_inv;
    s.upper = a_inv * b;
    const CMatrix cross = c * s.upper;
    s.schur = d - cross;
    s.cert.rank = r;
    s.cert.cross = norm2(cross);
    s.cert.threshold = d_min;
    if (!(s.cert.cross < s.cert.threshold))
        throw Error(ErrorKind::SchurConditionViolated, "cross term " + std::to_string(s.cert.cross) +
                                                           " is not below 1/|(qxq)^-1| = " +
                                                           std::to_string(s.cert.threshold));
    s.cert.dist_pxp = dist_to_unitaries(a);
    s.cert.dist_pdp = s.cert.dist_pxp;
    s.cert.dist_qxq = dist_to_unitaries(d);
    s.cert.dist_qdq = dist_to_unitaries(s.schur);
    s.cert.positive_blocks = a.is_positive_invertible() && s.schur.is_positive_invertible();
    return s;
}

void check_rank(int n, int r, const char* where) {
    if (r < 1 || r >= n)
        throw Error(ErrorKind::OutOfRange,
                    std::string(where) + ": rank " + std::to_string(r) + " must lie in [1, " + std::to_string(n - 1) + "]");
}

CMatrix conj_by(const CMatrix& f, const CMatrix& y) { return f * y * f.adjoint(); }

}  // namespace

StdFactors schur_std(const CMatrix& x, const Projection& p, double tol) {
    const int n = x.rows();
    if (!x.square() || p.matrix.rows() != n) throw Error(ErrorKind::DimMismatch, "schur_std: sizes differ");
    check_rank(n, p.rank, "schur_std");
    const CMatrix frame = p.frame.rows() == n ? p.frame : projection_from_matrix(p.matrix).frame;
    const Split sp = split_leading(frame.adjoint() * x * frame, p.rank, tol);
    const int r = p.rank;
    CMatrix s = CMatrix::identity(n), t = CMatrix::identity(n), d(n);
    set_block(s, r, 0, sp.lower);
    set_block(t, 0, r, sp.upper);
    set_block(d, 0, 0, sp.a);
    set_block(d, r, r, sp.schur);
    StdFactors out;
    out.s = conj_by(frame, s);
    out.t = conj_by(frame, t);
    out.d = conj_by(frame, d);
    out.blocks = make_block_decomposition(frame, {r, n - r});
    out.levels.push_back(sp.cert);
    out.recon_err = norm2(out.s * out.d * out.t - x) / std::max(norm2(x), 1e-300);
    return out;
}

ProjectionChoice select_projection(const CMatrix& x, int r, double eps) {
    if (!x.square()) throw Error(ErrorKind::DimMismatch, "select_projection: matrix must be square");
    const int n = x.rows();
    check_rank(n, r, "select_projection");
    ProjectionChoice out;
    out.positive = x.is_positive_invertible();
    out.dist = dist_to_unitaries(x);
    CMatrix frame;
    if (out.positive) {
        frame = eig_hermitian(0.5 * (x + x.adjoint())).vectors;
    } else {
        if (!(out.dist < 0.1))
            throw Error(ErrorKind::PreconditionDistance,
                        "select_projection: distance to the unitaries is " + std::to_string(out.dist) + ", need < 1/10");
        frame = eig_normal(polar(x).u).vectors;
    }
    out.p = make_projection(frame, r);
    const double de = out.dist + eps;
    out.dist_bound = de;
    out.cross_bound = 2.1 * de < 1 ? de * de / std::sqrt(1 - 2.1 * de) : INFINITY;
    try {
        out.split = split_leading(frame.adjoint() * x * frame, r, 1e-12).cert;
    } catch (const Error& e) {
        throw Error(ErrorKind::NoAdmissibleProjection, std::string("select_projection: ") + e.what());
    }
    if (out.dist < 0.1) {
        const auto& c = out.split;
        if (c.cross > out.cross_bound || c.dist_pxp > out.dist_bound || c.dist_qxq > out.dist_bound)
            throw Error(ErrorKind::NoAdmissibleProjection,
                        "select_projection: cross " + std::to_string(c.cross) + " (bound " +
                            std::to_string(out.cross_bound) + "), corner distances " + std::to_string(c.dist_pxp) +
                            ", " + std::to_string(c.dist_qxq) + " (bound " + std::to_string(out.dist_bound) + ")");
    }
    return out;
}

std::vector<int> two_class_ranks(int n, int k) {
    if (k < 1 || k > n)
        throw Error(ErrorKind::OutOfRange, "block count " + std::to_string(k) + " must lie in [1, " + std::to_string(n) + "]");
    const int ka = (k + 1) / 2, kb = k / 2;
    if (kb == 0) return {n};
    int best_a = -1, best_b = -1;
    for (int a = 1; a * ka < n; ++a) {
        const int rest = n - a * ka;
        if (rest % kb != 0) continue;
        const int b = rest / kb;
        if (best_a < 0 || std::abs(a - b) <= std::abs(best_a - best_b)) {  // ties: larger first class
            best_a = a;
            best_b = b;
        }
    }
    if (best_a < 0) {
        // no exact two-class split (e.g. n = 7, k = 4): let the last block take the remainder
        std::vector<int> ranks(k, n / k);
        ranks.back() += n - k * (n / k);
        return ranks;
    }
    std::vector<int> ranks(ka, best_a);
    ranks.insert(ranks.end(), kb, best_b);
    return ranks;
}

StdFactors recursive_std(const CMatrix& x, int k, double eps) {
    if (!x.square()) throw Error(ErrorKind::DimMismatch, "recursive_std: matrix must be square");
    const int n = x.rows();
    const std::vector<int> ranks = two_class_ranks(n, k);
    CMatrix frame = CMatrix::identity(n), s = CMatrix::identity(n), t = CMatrix::identity(n), d(n);
    CMatrix y = x;
    StdFactors out;
    int off = 0;
    for (size_t level = 0; level + 1 < ranks.size(); ++level) {
        const int m = n - off, r = ranks[level];
        ProjectionChoice choice;
        try {
            choice = select_projection(y, r, eps);
        } catch (const Error& e) {
            throw Error(e.kind(), "recursive_std level " + std::to_string(level) + ": " + e.what());
        }
        const CMatrix& g = choice.p.frame;
        // rotate the remaining coordinates; earlier off-diagonal blocks follow
        set_block(frame, 0, off, block(frame, 0, off, n, m) * g);
        if (off > 0) {
            set_block(s, off, 0, g.adjoint() * block(s, off, 0, m, off));
            set_block(t, 0, off, block(t, 0, off, off, m) * g);
        }
        const Split sp = split_leading(g.adjoint() * y * g, r, 1e-12);
        set_block(s, off + r, off, sp.lower);
        set_block(t, off, off + r, sp.upper);
        set_block(d, off, off, sp.a);
        out.levels.push_back(sp.cert);
        y = sp.schur;
        off += r;
    }
    set_block(d, off, off, y);
    out.s = conj_by(frame, s);
    out.t = conj_by(frame, t);
    out.d = conj_by(frame, d);
    out.blocks = make_block_decomposition(frame, ranks);
    out.recon_err = norm2(out.s * out.d * out.t - x) / std::max(norm2(x), 1e-300);
    return out;
}

CommutatorPair unitriangular_commutator(const CMatrix& t, const BlockDecomposition& blocks, double tol) {
    const int n = t.rows();
    if (!t.square() || blocks.total_dim != n) throw Error(ErrorKind::DimMismatch, "unitriangular_commutator: sizes differ");
    const CMatrix& f = blocks.frame;
    const CMatrix y = f.adjoint() * t * f;
    const auto ranks = blocks.ranks();
    const auto offs = blocks.offsets();
    const int k = static_cast<int>(ranks.size());
    const double scale = 1 + norm2(t);
    auto blk = [&](const CMatrix& m, int i, int j) { return block(m, offs[i], offs[j], ranks[i], ranks[j]); };
    double upper = 0, lower = 0;
    for (int i = 0; i < k; ++i) {
        for (int j = 0; j < k; ++j) {
            const double v = norm_max(blk(y, i, j) - (i == j ? CMatrix::identity(ranks[i]) : CMatrix(ranks[i], ranks[j])));
            if (i == j && v > tol * scale)
                throw Error(ErrorKind::NotUnitriangular, "diagonal block " + std::to_string(i) + " is not the identity");
            if (i < j) upper = std::max(upper, v);
            if (i > j) lower = std::max(lower, v);
        }
    }
    if (upper > tol * scale && lower > tol * scale)
        throw Error(ErrorKind::NotUnitriangular, "both strict triangles are nonzero");
    const bool is_upper = upper >= lower;
    std::vector<double> lambda(k);
    for (int j = 0; j < k; ++j) lambda[j] = std::ldexp(1.0, k - 1 - j);
    CMatrix v = CMatrix::identity(n);
    for (int gap = 1; gap < k; ++gap) {
        for (int i = 0; i < k; ++i) {
            const int j = is_upper ? i + gap : i - gap;
            if (j < 0 || j >= k) continue;
            CMatrix rhs = blk(y, i, j);
            const int lo = std::min(i, j), hi = std::max(i, j);
            for (int l = lo + 1; l < hi; ++l) rhs += blk(y, i, l) * blk(v, l, j);
            const double gapv = lambda[i] / lambda[j] - 1;
            if (std::abs(gapv) < 1e-3) throw Error(ErrorKind::IllConditioned, "block scalars too close");
            set_block(v, offs[i], offs[j], rhs * cplx(1.0 / gapv));
        }
    }
    std::vector<double> gdiag(n);
    for (int j = 0; j < k; ++j)
        for (int c = 0; c < ranks[j]; ++c) gdiag[offs[j] + c] = lambda[j];
    return make_pair(conj_by(f, CMatrix::diag_real(gdiag)), conj_by(f, v), lambda.front() / lambda.back());
}

}  // namespace commfactor
