#include "commfactor/su2fact.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace commfactor {

CommutatorPair make_pair(CMatrix x, CMatrix y, double condition) {
    CommutatorPair p;
    p.norm_x_to_1 = dist_to_identity(x);
    p.norm_y_to_1 = dist_to_identity(y);
    p.x = std::move(x);
    p.y = std::move(y);
    p.condition = condition;
    return p;
}

CommutatorPair identity_pair(int n) { return make_pair(CMatrix::identity(n), CMatrix::identity(n)); }

CommutatorPair conjugate_pair(const CommutatorPair& p, const CMatrix& q, const CMatrix& q_inv) {
    return make_pair(q * p.x * q_inv, q * p.y * q_inv, p.condition);
}

CommutatorPair embed_pair(const CommutatorPair& p, const std::vector<int>& idx, int n) {
    CommutatorPair out;
    out.x = embed(p.x, idx, n);
    out.y = embed(p.y, idx, n);
    out.norm_x_to_1 = p.norm_x_to_1;
    out.norm_y_to_1 = p.norm_y_to_1;
    out.condition = p.condition;
    return out;
}

namespace {

// valid while sin^2 a = |sin(t/2)| keeps a <= pi/2, which covers |t| <= pi/2 with room
CommutatorPair su2_kernel(double t) {
    if (t == 0.0) return identity_pair(2);

    // rotations by 2a about x and y; the commutator has trace 2(1 - 2 sin^4 a) = 2 cos t
    const double a = std::asin(std::sqrt(std::abs(std::sin(t / 2))));
    const double c = std::cos(a), s = std::sin(a);
    const cplx i(0, 1);
    const CMatrix v{{c, i * s}, {i * s, c}};
    const CMatrix w{{c, s}, {-s, c}};
    const CMatrix k = commutator(v, w);

    // k = cos|t| + i sin|t| (n . sigma) with n_z <= 0 on the admissible range;
    // (n_x - i n_y, 1 - n_z) is the eigenvector for e^{i|t|}
    const CMatrix m = cplx(0, -0.5) * (k - k.adjoint());
    const double nx = m(0, 1).real(), ny = m(1, 0).imag(), nz = m(0, 0).real();
    const double len = std::sqrt(nx * nx + ny * ny + nz * nz);
    const cplx e0(nx / len, -ny / len);
    const cplx e1(1 - nz / len);
    const double norm = std::sqrt(std::norm(e0) + std::norm(e1));
    const cplx p0 = e0 / norm, p1 = e1 / norm;
    // columns: eigenvector for e^{it} first
    CMatrix z = t > 0 ? CMatrix{{p0, -std::conj(p1)}, {p1, std::conj(p0)}}
                      : CMatrix{{-std::conj(p1), p0}, {std::conj(p0), p1}};
    const CMatrix zs = z.adjoint();
    return make_pair(zs * v * z, zs * w * z);
}

}  // namespace

CommutatorPair su2_diag_commutator(double t) {
    if (!(std::abs(t) < std::numbers::pi / 2))
        throw Error(ErrorKind::OutOfRange, "su2_diag_commutator: |t| must be below pi/2, got " + std::to_string(t));
    return su2_kernel(t);
}

CommutatorPair swap_trick_commutator(cplx alpha, double tol) {
    if (std::abs(std::abs(alpha) - 1.0) > tol)
        throw Error(ErrorKind::NotUnitModulus, "swap_trick_commutator: |alpha| must be 1");
    alpha /= std::abs(alpha);
    if (std::abs(alpha - 1.0) < std::sqrt(2.0)) return su2_kernel(std::arg(alpha));
    return make_pair(CMatrix::diag({alpha, 1.0}), CMatrix{{0, 1}, {1, 0}});
}

CommutatorPair invertible_diag_commutator(double lambda) {
    if (!(lambda > 0)) throw Error(ErrorKind::NonPositive, "invertible_diag_commutator: lambda must be positive");
    if (lambda == 1.0) return identity_pair(2);
    const double r = std::sqrt(lambda);
    const double mu = r - 1 / r;
    const double a = std::sqrt(std::abs(mu));
    const double b = mu > 0 ? a : -a;
    const CMatrix x{{1, a}, {0, 1}};
    const CMatrix y{{1, 0}, {b, 1}};
    // eigenvectors of (x, y) = [[1 + mu + mu^2, -a mu], [b mu, 1 - mu]] for lambda and 1/lambda
    const double c0 = std::hypot(r + 1, b), c1 = std::hypot(a, r + 1);
    const CMatrix sim{{(r + 1) / c0, a / c1}, {b / c0, (r + 1) / c1}};
    const CMatrix sim_inv = inverse(sim);
    const double cond = norm2(sim) * norm2(sim_inv);
    return make_pair(sim_inv * x * sim, sim_inv * y * sim, cond);
}

}  // namespace commfactor
