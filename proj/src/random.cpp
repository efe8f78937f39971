#include "commfactor/random.hpp"

#include <cmath>

namespace commfactor {

double Sampler::uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng_);
}

double Sampler::normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }

int Sampler::integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

cplx Sampler::complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re * M_SQRT1_2, im * M_SQRT1_2};
}

CMatrix Sampler::ginibre(int n) {
    CMatrix g(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = complex_normal();
    return g;
}

CMatrix Sampler::unitary(int n) {
    // Gram-Schmidt (twice) on a Ginibre matrix; diagonal phases of R folded
    // back in so the distribution is Haar.
    CMatrix q = ginibre(n);
    for (int j = 0; j < n; ++j) {
        for (int pass = 0; pass < 2; ++pass)
            for (int k = 0; k < j; ++k) {
                cplx d = 0;
                for (int i = 0; i < n; ++i) d += std::conj(q(i, k)) * q(i, j);
                for (int i = 0; i < n; ++i) q(i, j) -= d * q(i, k);
            }
        double nrm = 0;
        for (int i = 0; i < n; ++i) nrm += std::norm(q(i, j));
        nrm = std::sqrt(nrm);
        for (int i = 0; i < n; ++i) q(i, j) /= nrm;
    }
    return q;
}

CMatrix Sampler::special_unitary(int n) { return scale_to_unit_det(unitary(n)); }

CMatrix Sampler::hermitian(int n) {
    const CMatrix g = ginibre(n);
    return 0.5 * (g + g.adjoint());
}

CMatrix Sampler::positive(int n, double lo, double hi) {
    std::vector<double> d(n);
    for (auto& v : d) v = uniform(lo, hi);
    const CMatrix q = unitary(n);
    CMatrix p = q * CMatrix::diag_real(d) * q.adjoint();
    return 0.5 * (p + p.adjoint());
}

CMatrix Sampler::invertible(int n) {
    for (;;) {
        CMatrix g = ginibre(n);
        if (smallest_singular_value(g) > 1e-2) return g;
    }
}

CMatrix Sampler::special_linear(int n) { return scale_to_unit_det(invertible(n)); }

CMatrix scale_to_unit_det(const CMatrix& x) {
    const int n = x.dim();
    const cplx d = det(x);
    const cplx root = std::exp(std::log(d) / static_cast<double>(n));
    return (1.0 / root) * x;
}

}  // namespace commfactor
