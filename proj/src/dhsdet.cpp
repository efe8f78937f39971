#include "commfactor/dhsdet.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace commfactor {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;
constexpr int kMaxDepth = 30;

// nodes and weights of 3-point Gauss on [-1, 1]
const double kNode = std::sqrt(0.6);
constexpr double kW0 = 8.0 / 9.0, kW1 = 5.0 / 9.0;

struct Segment {
    const CMatrix& a;  // value at the left end
    const CMatrix& s;  // slope
    const TraceFunctional& tau;
    size_t index;
};

// tau(s (a + u s)^{-1}); the trace is cyclic so this is Tr of a linear solve
cplx integrand(const Segment& seg, double u) {
    const CMatrix x = seg.a + cplx(u) * seg.s;
    try {
        return solve(x, seg.s).trace() / seg.tau.scale();
    } catch (const Error&) {
        throw Error(ErrorKind::SingularSample,
                    "path is singular inside segment " + std::to_string(seg.index) + " at offset " + std::to_string(u));
    }
}

cplx gauss3(const Segment& seg, double lo, double hi) {
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    return half * (kW0 * integrand(seg, mid) + kW1 * (integrand(seg, mid - half * kNode) + integrand(seg, mid + half * kNode)));
}

cplx adaptive(const Segment& seg, double lo, double hi, cplx whole, double tol, int depth) {
    const double mid = 0.5 * (lo + hi);
    const cplx left = gauss3(seg, lo, mid), right = gauss3(seg, mid, hi);
    if (std::abs(left + right - whole) <= tol) return left + right;
    if (depth >= kMaxDepth)
        throw Error(ErrorKind::NonConvergentQuadrature,
                    "quadrature did not settle on segment " + std::to_string(seg.index));
    return adaptive(seg, lo, mid, left, 0.5 * tol, depth + 1) + adaptive(seg, mid, hi, right, 0.5 * tol, depth + 1);
}

// log det increment along a + u s for u in [lo, hi]; pieces are halved until
// both halves rotate by less than pi/4, so a full turn cannot hide in a piece
cplx log_det_increment(const CMatrix& a, const CMatrix& s, double lo, double hi, cplx dlo, cplx dhi, int depth) {
    const double mid = 0.5 * (lo + hi);
    const cplx dmid = det(a + cplx(mid) * s);
    if (dmid == cplx(0)) throw Error(ErrorKind::SingularSample, "path determinant vanishes");
    const cplx r1 = dmid / dlo, r2 = dhi / dmid;
    if (std::abs(std::arg(r1)) < std::numbers::pi / 4 && std::abs(std::arg(r2)) < std::numbers::pi / 4)
        return std::log(r1) + std::log(r2);
    if (depth >= kMaxDepth) throw Error(ErrorKind::NonConvergentQuadrature, "determinant winding unresolved");
    return log_det_increment(a, s, lo, mid, dlo, dmid, depth + 1) + log_det_increment(a, s, mid, hi, dmid, dhi, depth + 1);
}

void check_samples(const MatrixPath& xi) {
    for (size_t i = 0; i < xi.size(); ++i)
        if (smallest_singular_value(xi[i]) <= 1e-12 * std::max(1.0, norm2(xi[i])))
            throw Error(ErrorKind::SingularSample, "path sample " + std::to_string(i) + " is singular");
}

}  // namespace

cplx TraceFunctional::operator()(const CMatrix& a) const {
    if (a.rows() != dim) throw Error(ErrorKind::DimMismatch, "trace functional dim differs from argument");
    return a.trace() / scale();
}

TraceFunctional normalized_trace(int n) { return {n, TraceNormalization::Normalized}; }
TraceFunctional unnormalized_trace(int n) { return {n, TraceNormalization::Unnormalized}; }

DhsValue reduce_value(cplx raw, double lattice_step) {
    DhsValue v;
    v.raw = raw;
    v.lattice_step = lattice_step;
    const double re = raw.real() - lattice_step * std::floor(raw.real() / lattice_step + 0.5);
    v.residue = cplx(re, raw.imag());
    v.dist_to_zero = std::abs(v.residue);
    return v;
}

cplx path_determinant(const MatrixPath& xi, const TraceFunctional& tau, double tol) {
    if (xi.dim() != tau.dim) throw Error(ErrorKind::DimMismatch, "path_determinant: trace dim differs");
    check_samples(xi);
    cplx total = 0;
    const double span = xi.grid().back() - xi.grid().front();
    for (size_t i = 0; i + 1 < xi.size(); ++i) {
        const CMatrix s = xi.slope(i);
        if (norm_max(s) == 0.0) continue;
        const double h = xi.grid()[i + 1] - xi.grid()[i];
        const Segment seg{xi[i], s, tau, i};
        const cplx whole = gauss3(seg, 0, h);
        total += adaptive(seg, 0, h, whole, tol * h / span, 0);
    }
    const cplx value = total / cplx(0, kTwoPi);
    if (xi.is_unitary_valued() && std::abs(value.imag()) > 1e-8)
        throw Error(ErrorKind::NonConvergentQuadrature, "unitary path produced a non-real determinant");
    return value;
}

cplx path_determinant_closed_form(const MatrixPath& xi, const TraceFunctional& tau) {
    if (xi.dim() != tau.dim) throw Error(ErrorKind::DimMismatch, "path_determinant: trace dim differs");
    check_samples(xi);
    cplx log_total = 0;
    for (size_t i = 0; i + 1 < xi.size(); ++i) {
        const CMatrix s = xi.slope(i);
        const double h = xi.grid()[i + 1] - xi.grid()[i];
        log_total += log_det_increment(xi[i], s, 0, h, det(xi[i]), det(xi[i + 1]), 0);
    }
    return log_total / cplx(0, kTwoPi * tau.scale());
}

DhsValue matrix_determinant_value(const CMatrix& x, const TraceFunctional& tau) {
    if (x.rows() != tau.dim) throw Error(ErrorKind::DimMismatch, "matrix_determinant_value: trace dim differs");
    if (smallest_singular_value(x) <= 1e-14 * std::max(1.0, norm2(x)))
        throw Error(ErrorKind::Singular, "matrix_determinant_value: input is singular");
    // log|det| from the singular values avoids overflow in the product
    double log_abs = 0;
    for (double s : singular_values(x)) log_abs += std::log(s);
    const double angle = std::arg(det(x));
    const cplx raw(angle / (kTwoPi * tau.scale()), -log_abs / (kTwoPi * tau.scale()));
    return reduce_value(raw, tau.lattice_step());
}

HomotopyDefect homotopy_defect(const MatrixPath& xi1, const MatrixPath& xi2, const TraceFunctional& tau,
                               double endpoint_tol) {
    if (xi1.dim() != xi2.dim()) throw Error(ErrorKind::DimMismatch, "homotopy_defect: dims differ");
    if (norm2(xi1.samples().front() - xi2.samples().front()) > endpoint_tol ||
        norm2(xi1.samples().back() - xi2.samples().back()) > endpoint_tol)
        throw Error(ErrorKind::EndpointMismatch, "homotopy_defect: paths do not share endpoints");
    HomotopyDefect d;
    d.difference = path_determinant(xi1, tau) - path_determinant(xi2, tau);
    const double step = tau.lattice_step();
    d.lattice_multiple = step * std::round(d.difference.real() / step);
    d.reduced = std::abs(d.difference - cplx(d.lattice_multiple));
    return d;
}

double continuity_radius(const CMatrix& y, double eps, const TraceFunctional& tau) {
    const double inv_norm = 1.0 / smallest_singular_value(y);
    return 0.99 * std::min(0.5, std::numbers::pi * eps * tau.scale() / tau.dim) / inv_norm;
}

}  // namespace commfactor
