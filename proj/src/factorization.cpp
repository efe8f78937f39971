#include "commfactor/factorization.hpp"

#include <algorithm>

namespace commfactor {

CMatrix MatrixFactorization::product() const {
    CMatrix p = CMatrix::identity(dim);
    for (const auto& pair : pairs) p = p * commutator(pair.x, pair.y);
    if (residual) p = p * *residual;
    return p;
}

MatrixPath path_commutator(const PathPair& p) {
    const auto grid = merge_grids(p.x.grid(), p.y.grid());
    const MatrixPath x = resample(p.x, grid), y = resample(p.y, grid);
    std::vector<CMatrix> s;
    s.reserve(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) s.push_back(commutator(x[i], y[i]));
    return MatrixPath(grid, std::move(s));
}

MatrixPath PathFactorization::product() const {
    MatrixPath p = MatrixPath::constant(CMatrix::identity(dim), uniform_grid(2));
    for (const auto& pair : pairs) p = path_multiply(p, path_commutator(pair));
    if (residual) p = path_multiply(p, *residual);
    return p;
}

void certify(MatrixFactorization& f, const CMatrix& target) {
    f.certificate.count = static_cast<int>(f.pairs.size());
    f.certificate.recon_err = norm2(f.product() - target);
    double m = 0, c = 1;
    for (const auto& p : f.pairs) {
        m = std::max({m, dist_to_identity(p.x), dist_to_identity(p.y)});
        c = std::max(c, p.condition);
    }
    f.certificate.max_factor_dist_to_1 = m;
    f.certificate.max_condition = c;
}

void certify(PathFactorization& f, const MatrixPath& target) {
    f.certificate.count = static_cast<int>(f.pairs.size());
    f.certificate.recon_err = sup_distance(f.product(), target);
    double m = 0;
    for (const auto& p : f.pairs) {
        for (const auto& x : p.x.samples()) m = std::max(m, dist_to_identity(x));
        for (const auto& y : p.y.samples()) m = std::max(m, dist_to_identity(y));
    }
    f.certificate.max_factor_dist_to_1 = m;
}

}  // namespace commfactor
