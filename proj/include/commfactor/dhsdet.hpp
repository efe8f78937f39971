#pragma once

#include "commfactor/matcore.hpp"
#include "commfactor/pathfun.hpp"

namespace commfactor {

enum class TraceNormalization { Normalized, Unnormalized };

// Tr/n or Tr on M_n
struct TraceFunctional {
    int dim = 1;
    TraceNormalization normalization = TraceNormalization::Normalized;

    cplx operator()(const CMatrix& a) const;
    // divisor applied to the plain trace
    double scale() const { return normalization == TraceNormalization::Normalized ? dim : 1.0; }
    // image of K_0 under the trace: (1/n)Z or Z
    double lattice_step() const { return 1.0 / scale(); }
};

TraceFunctional normalized_trace(int n);
TraceFunctional unnormalized_trace(int n);

struct DhsValue {
    cplx raw;
    double lattice_step = 1;
    // real part reduced into [-step/2, step/2)
    cplx residue;
    double dist_to_zero = 0;

    bool is_zero(double tol = 1e-8) const { return dist_to_zero <= tol; }
};

DhsValue reduce_value(cplx raw, double lattice_step);

// (1/2 pi i) int_0^1 tau(xi' xi^{-1}) dt over the piecewise-linear interpolant,
// 3-point Gauss per segment with adaptive bisection
cplx path_determinant(const MatrixPath& xi, const TraceFunctional& tau, double tol = 1e-9);
// same quantity from the branch-tracked logarithm of det along the interpolant
cplx path_determinant_closed_form(const MatrixPath& xi, const TraceFunctional& tau);

// In M_n the value vanishes exactly when det x = 1.
DhsValue matrix_determinant_value(const CMatrix& x, const TraceFunctional& tau);

struct HomotopyDefect {
    cplx difference;
    // nearest lattice point to the real part of the difference
    double lattice_multiple = 0;
    // distance of the difference to that lattice point
    double reduced = 0;
};
HomotopyDefect homotopy_defect(const MatrixPath& xi1, const MatrixPath& xi2, const TraceFunctional& tau,
                               double endpoint_tol = 1e-9);

// A radius delta such that det y = 1 and |x - y| < delta force
// dist_to_zero(x) < eps. With k = |y^{-1}| delta <= 1/2 one has
// |Tr log(1 + y^{-1}(x - y))| <= 2 n k, so delta = min(1/2, pi eps scale / n) / |y^{-1}|, shrunk by 1%.
double continuity_radius(const CMatrix& y, double eps, const TraceFunctional& tau);

}  // namespace commfactor
