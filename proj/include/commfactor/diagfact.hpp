#pragma once

#include <functional>
#include <vector>

#include "commfactor/factorization.hpp"
#include "commfactor/pathfun.hpp"

namespace commfactor {

// Closed grid-index intervals [first_j, last_j] covering the grid. Only
// neighbours overlap, each overlap spans at least one grid step, and
// intervals two apart are disjoint.
struct IntervalCover {
    std::vector<double> grid;
    std::vector<int> first;
    std::vector<int> last;
    std::vector<double> anchors;

    int size() const { return static_cast<int>(first.size()); }
    // largest number of intervals containing one grid point
    int max_multiplicity() const;
};

// Greedy left-to-right cover. extent(a) returns the largest b >= a such that
// [a, b] is admissible when the interval starts at a.
IntervalCover cover_from_extents(const std::vector<double>& grid, const std::function<int(int)>& extent);

// Cover on which theta stays within osc of an anchor. The anchor is 0 when
// |theta| <= osc on the whole interval; otherwise theta keeps one strict sign
// there and the anchor is the midpoint of its range. Intervals that touch a
// zero of theta therefore have anchor 0.
IntervalCover build_cover(const std::vector<double>& grid, const std::vector<double>& theta, double osc);

// f[j][i] on the grid: trapezoids whose ramps span exactly the overlaps
struct PartitionOfUnity {
    std::vector<std::vector<double>> f;
};
PartitionOfUnity partition_of_unity(const IntervalCover& cover);

// Order whose running sums stay inside [min phi, max phi]. While the running
// sum is positive only non-positive values are eligible (and vice versa);
// among those the one keeping the sum closest to 0 wins, ties to the smaller index.
std::vector<int> prefix_sum_permutation(const std::vector<double>& phis, double tol = 1e-9);

// diag(e^{i theta}, e^{-i theta}) as 4 commutators, any continuous theta
PathFactorization factor_diag2_general(const std::vector<double>& grid, const std::vector<double>& theta);

// diag(e^{i phi}) with zero-sum phi: 16 unitary pairs, no range condition
PathFactorization factor_diag_path_u16(const EigenFunctions& phi);
// 4 unitary pairs, |phi| < pi/2, factors within sqrt2 |u - 1|^{1/2}
PathFactorization factor_diag_path_u4(const EigenFunctions& phi);
// diag(e^{phi}) with zero-sum real phi: 4 invertible pairs, factors within 2 |z - 1|^{1/2} when |z - 1| <= 1/2
PathFactorization factor_diag_path_gl4(const EigenFunctions& phi);

// Constant-path versions for one matrix: a single interval, so only the two
// pairs of one parity class are needed.
MatrixFactorization factor_diag_unitary_point(const std::vector<double>& phi);
MatrixFactorization factor_diag_positive_point(const std::vector<double>& phi);

}  // namespace commfactor
