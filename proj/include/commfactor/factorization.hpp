#pragma once

#include <optional>
#include <string>
#include <vector>

#include "commfactor/matcore.hpp"
#include "commfactor/pathfun.hpp"
#include "commfactor/su2fact.hpp"

namespace commfactor {

struct Certificate {
    double recon_err = 0;
    int count = 0;
    double max_factor_dist_to_1 = 0;
    std::string strategy;
    // largest similarity condition number among invertible kernels
    double max_condition = 1;
    std::vector<std::string> warnings;
};

// x = (x_1, y_1) ... (x_k, y_k) z
struct MatrixFactorization {
    int dim = 0;
    std::vector<CommutatorPair> pairs;
    std::optional<CMatrix> residual;
    Certificate certificate;

    CMatrix product() const;
};

struct PathPair {
    MatrixPath x;
    MatrixPath y;
};

struct PathFactorization {
    int dim = 0;
    std::vector<PathPair> pairs;
    std::optional<MatrixPath> residual;
    Certificate certificate;

    MatrixPath product() const;
};

// fills recon_err, count and max_factor_dist_to_1 against the target
void certify(MatrixFactorization& f, const CMatrix& target);
void certify(PathFactorization& f, const MatrixPath& target);

// pointwise (x, y) of a path pair
MatrixPath path_commutator(const PathPair& p);

}  // namespace commfactor
