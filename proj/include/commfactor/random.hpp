#pragma once

#include <cstdint>
#include <random>

#include "commfactor/matcore.hpp"

namespace commfactor {

// Seeded generators shared by the library demos and the test suites.
class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : rng_(seed) {}

    double uniform(double lo = 0.0, double hi = 1.0);
    double normal();
    int integer(int lo, int hi);  // inclusive
    cplx complex_normal();

    CMatrix ginibre(int n);
    CMatrix unitary(int n);
    CMatrix special_unitary(int n);
    CMatrix hermitian(int n);
    // eigenvalues spread in [lo, hi]
    CMatrix positive(int n, double lo = 0.2, double hi = 3.0);
    CMatrix invertible(int n);
    // det scaled to exactly one
    CMatrix special_linear(int n);

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

CMatrix scale_to_unit_det(const CMatrix& x);

}  // namespace commfactor
