#include "commfactor/diagfact.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "commfactor/su2fact.hpp"

namespace commfactor {

namespace {

constexpr double kPi = std::numbers::pi;

// one commutator slot sampled on the grid
struct Slot {
    std::vector<CMatrix> x, y;
};

Slot identity_slot(size_t points, int m) {
    return {std::vector<CMatrix>(points, CMatrix::identity(m)), std::vector<CMatrix>(points, CMatrix::identity(m))};
}

// left-multiplies by the 2x2 block b acting on coordinates (p, q)
void apply_block(CMatrix& target, const CMatrix& b, int p, int q) {
    for (int c = 0; c < target.cols(); ++c) {
        const cplx tp = target(p, c), tq = target(q, c);
        target(p, c) = b(0, 0) * tp + b(0, 1) * tq;
        target(q, c) = b(1, 0) * tp + b(1, 1) * tq;
    }
}

void apply_pair(Slot& slot, size_t i, const CommutatorPair& pair, int p, int q) {
    apply_block(slot.x[i], pair.x, p, q);
    apply_block(slot.y[i], pair.y, p, q);
}

// Diagonal det-one targets written as (V, P): P is the cyclic shift
// e_k -> e_{k+1} and V holds the running products of the entries, so that
// (V, P)_kk = v_k / v_{k-1}. For m = 2 this is (diag(alpha, 1), swap).
struct DiagonalSlot {
    std::vector<std::vector<cplx>> entries;
};

DiagonalSlot identity_diagonal_slot(size_t points, int m) {
    return {std::vector<std::vector<cplx>>(points, std::vector<cplx>(m, 1.0))};
}

CMatrix cyclic_shift(int m) {
    CMatrix p(m);
    for (int k = 0; k < m; ++k) p((k + 1) % m, k) = 1;
    return p;
}

Slot realize(const DiagonalSlot& d) {
    const int m = static_cast<int>(d.entries.front().size());
    const CMatrix shift = cyclic_shift(m);
    Slot s;
    for (const auto& e : d.entries) {
        std::vector<cplx> v(m);
        cplx run = 1;
        for (int k = 0; k < m; ++k) v[k] = run *= e[k];
        s.x.push_back(CMatrix::diag(v));
        s.y.push_back(shift);
    }
    return s;
}

PathPair to_path_pair(const std::vector<double>& grid, Slot s) {
    return {MatrixPath(grid, std::move(s.x)), MatrixPath(grid, std::move(s.y))};
}

void check_zero_sum(const std::vector<double>& phis, double tol, const std::string& where) {
    const double sum = std::accumulate(phis.begin(), phis.end(), 0.0);
    double scale = 1;
    for (double v : phis) scale = std::max(scale, std::abs(v));
    if (std::abs(sum) > tol * scale)
        throw Error(ErrorKind::SumNotZero, where + ": values sum to " + std::to_string(sum));
}

std::vector<double> prefix_sums(const std::vector<double>& phis, const std::vector<int>& sigma) {
    std::vector<double> out(phis.size());
    double run = 0;
    for (size_t k = 0; k < phis.size(); ++k) out[k] = run += phis[sigma[k]];
    return out;
}

// The outer cover: one permutation per interval, chosen at its left end and
// kept while all running sums stay within [min - delta, max + delta].
struct OuterCover {
    IntervalCover cover;
    PartitionOfUnity pou;
    std::vector<std::vector<int>> sigma;
};

OuterCover outer_cover(const EigenFunctions& phi, double delta) {
    const int N = static_cast<int>(phi.values.size());
    const auto admissible = [&](const std::vector<int>& sigma, int i) {
        const auto& v = phi.values[i];
        const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
        for (double p : prefix_sums(v, sigma))
            if (p < *lo - delta || p > *hi + delta) return false;
        return true;
    };
    OuterCover out;
    out.cover = cover_from_extents(phi.grid, [&](int a) {
        const auto sigma = prefix_sum_permutation(phi.values[a]);
        int b = a;
        while (b + 1 < N && admissible(sigma, b + 1)) ++b;
        return b;
    });
    for (int j = 0; j < out.cover.size(); ++j) {
        out.sigma.push_back(prefix_sum_permutation(phi.values[out.cover.first[j]]));
        out.cover.anchors[j] = 0;
    }
    out.pou = partition_of_unity(out.cover);
    return out;
}

// running-sum angle of the block at position p on outer interval j, grid point i
double block_angle(const EigenFunctions& phi, const OuterCover& oc, int j, int p, size_t i) {
    const double f = oc.pou.f[j][i];
    if (f == 0.0) return 0.0;
    double run = 0;
    for (int k = 0; k <= p; ++k) run += phi.values[i][oc.sigma[j][k]];
    return f * run;
}

// Factorization of the block diag(e^{i theta}, e^{-i theta}) on
// coordinates (p, q): anchors go to the diagonal slots, the remainders to
// SU(2) slots, split by the parity of the inner interval.
void general_block(const std::vector<double>& grid, const std::vector<double>& theta, int p, int q,
                   DiagonalSlot& anchor_odd, Slot& rest_odd, DiagonalSlot& anchor_even, Slot& rest_even) {
    if (std::all_of(theta.begin(), theta.end(), [](double t) { return t == 0.0; })) return;
    const IntervalCover cover = build_cover(grid, theta, kPi / 4);
    const PartitionOfUnity g = partition_of_unity(cover);
    for (int l = 0; l < cover.size(); ++l) {
        DiagonalSlot& anchor = l % 2 == 0 ? anchor_odd : anchor_even;
        Slot& rest = l % 2 == 0 ? rest_odd : rest_even;
        for (int i = cover.first[l]; i <= cover.last[l]; ++i) {
            const double w = g.f[l][i];
            if (w == 0.0) continue;
            const double a = w * cover.anchors[l];
            if (a != 0.0) {
                anchor.entries[i][p] *= std::polar(1.0, a);
                anchor.entries[i][q] *= std::polar(1.0, -a);
            }
            const double r = w * (theta[i] - cover.anchors[l]);
            if (r != 0.0) apply_pair(rest, i, su2_diag_commutator(r), p, q);
        }
    }
}

double max_abs(const EigenFunctions& phi) {
    double m = 0;
    for (const auto& v : phi.values)
        for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

bool all_zero(const EigenFunctions& phi) { return max_abs(phi) == 0.0; }

PathFactorization identity_factorization(const EigenFunctions& phi, int count, const std::string& tag) {
    PathFactorization f;
    f.dim = phi.dim;
    const MatrixPath id = MatrixPath::constant(CMatrix::identity(phi.dim), phi.grid);
    for (int k = 0; k < count; ++k) f.pairs.push_back({id, id});
    f.certificate.strategy = tag;
    certify(f, id);
    return f;
}

void validate(const EigenFunctions& phi, const std::string& where) {
    if (phi.values.size() != phi.grid.size()) throw Error(ErrorKind::DimMismatch, where + ": grid and values differ");
    for (const auto& v : phi.values) {
        if (static_cast<int>(v.size()) != phi.dim) throw Error(ErrorKind::DimMismatch, where + ": ragged values");
        check_zero_sum(v, 1e-8, where);
    }
}

// kernel(angle) returns a 2x2 pair whose commutator is diag(k(angle), 1/k(angle))
template <class Kernel>
PathFactorization blockwise_four(const EigenFunctions& phi, double delta, Kernel kernel, const std::string& tag) {
    const int m = phi.dim;
    const size_t N = phi.grid.size();
    const OuterCover oc = outer_cover(phi, delta);
    PathFactorization f;
    f.dim = m;
    f.certificate.strategy = tag;
    double cond = 1;
    // slot order: (odd, D1), (even, D1), (odd, D2), (even, D2) with odd/even counted from 1
    for (int part = 0; part < 2; ++part) {
        for (int parity = 0; parity < 2; ++parity) {
            Slot slot = identity_slot(N, m);
            for (int j = parity; j < oc.cover.size(); j += 2) {
                for (int i = oc.cover.first[j]; i <= oc.cover.last[j]; ++i) {
                    for (int p = part; p + 1 < m; p += 2) {
                        const double angle = block_angle(phi, oc, j, p, i);
                        if (angle == 0.0) continue;
                        const CommutatorPair pair = kernel(angle);
                        cond = std::max(cond, pair.condition);
                        apply_pair(slot, i, pair, oc.sigma[j][p], oc.sigma[j][p + 1]);
                    }
                }
            }
            f.pairs.push_back(to_path_pair(phi.grid, std::move(slot)));
        }
    }
    f.certificate.max_condition = cond;
    return f;
}

}  // namespace

int IntervalCover::max_multiplicity() const {
    int best = 0;
    for (size_t i = 0; i < grid.size(); ++i) {
        int c = 0;
        for (int j = 0; j < size(); ++j)
            if (first[j] <= static_cast<int>(i) && static_cast<int>(i) <= last[j]) ++c;
        best = std::max(best, c);
    }
    return best;
}

IntervalCover cover_from_extents(const std::vector<double>& grid, const std::function<int(int)>& extent) {
    const int N = static_cast<int>(grid.size());
    IntervalCover c;
    c.grid = grid;
    c.first.push_back(0);
    c.last.push_back(extent(0));
    while (c.last.back() < N - 1) {
        const int j = c.size();
        // the new interval must overlap its predecessor by at least one step
        // and start strictly after the interval two back ends
        int lo = c.first[j - 1] + 1;
        if (j >= 2) lo = std::max(lo, c.last[j - 2] + 1);
        const int hi = c.last[j - 1] - 1;
        // furthest reach wins, ties to the earlier start; taking the first
        // start that merely advances can leave no room for the next interval
        int chosen = -1, reach = c.last[j - 1];
        for (int a = lo; a <= hi; ++a) {
            const int b = extent(a);
            if (b > reach) {
                chosen = a;
                reach = b;
            }
        }
        if (chosen < 0)
            throw Error(ErrorKind::ResolutionTooCoarse,
                        "cover cannot advance past grid point " + std::to_string(c.last[j - 1]) + "; refine the grid");
        c.first.push_back(chosen);
        c.last.push_back(reach);
    }
    c.anchors.assign(c.first.size(), 0.0);
    return c;
}

IntervalCover build_cover(const std::vector<double>& grid, const std::vector<double>& theta, double osc) {
    if (!(osc > 0)) throw Error(ErrorKind::OutOfRange, "build_cover: oscillation bound must be positive");
    if (grid.size() != theta.size()) throw Error(ErrorKind::DimMismatch, "build_cover: grid and values differ");
    const int N = static_cast<int>(grid.size());
    const auto extent = [&](int a) {
        double lo = theta[a], hi = theta[a], absmax = std::abs(theta[a]);
        const int sign = theta[a] > 0 ? 1 : (theta[a] < 0 ? -1 : 0);
        bool near_zero = absmax <= osc;
        bool one_sign = sign != 0;
        int b = a;
        while (b + 1 < N) {
            const double t = theta[b + 1];
            const double nlo = std::min(lo, t), nhi = std::max(hi, t);
            const bool nz = near_zero && std::max(absmax, std::abs(t)) <= osc;
            const bool os = one_sign && (sign > 0 ? t > 0 : t < 0) && nhi - nlo <= 2 * osc;
            if (!nz && !os) break;
            lo = nlo;
            hi = nhi;
            absmax = std::max(absmax, std::abs(t));
            near_zero = nz;
            one_sign = os;
            ++b;
        }
        return b;
    };
    IntervalCover c = cover_from_extents(grid, extent);
    for (int j = 0; j < c.size(); ++j) {
        double lo = theta[c.first[j]], hi = lo, absmax = 0;
        for (int i = c.first[j]; i <= c.last[j]; ++i) {
            lo = std::min(lo, theta[i]);
            hi = std::max(hi, theta[i]);
            absmax = std::max(absmax, std::abs(theta[i]));
        }
        c.anchors[j] = absmax <= osc ? 0.0 : 0.5 * (lo + hi);
    }
    return c;
}

PartitionOfUnity partition_of_unity(const IntervalCover& cover) {
    const int N = static_cast<int>(cover.grid.size());
    const int n = cover.size();
    const auto& t = cover.grid;
    PartitionOfUnity pou;
    pou.f.assign(n, std::vector<double>(N, 0.0));
    for (int j = 0; j < n; ++j) {
        for (int i = cover.first[j]; i <= cover.last[j]; ++i) {
            double v = 1.0;
            // rising ramp across the overlap with j - 1
            if (j > 0 && i <= cover.last[j - 1]) {
                const double a = t[cover.first[j]], b = t[cover.last[j - 1]];
                v = (t[i] - a) / (b - a);
            }
            // falling ramp across the overlap with j + 1
            if (j + 1 < n && i >= cover.first[j + 1]) {
                const double a = t[cover.first[j + 1]], b = t[cover.last[j]];
                v = (b - t[i]) / (b - a);
            }
            pou.f[j][i] = std::clamp(v, 0.0, 1.0);
        }
    }
    // overlaps hold exactly two ramps; renormalize the rounding away
    for (int i = 0; i < N; ++i) {
        double s = 0;
        for (int j = 0; j < n; ++j) s += pou.f[j][i];
        for (int j = 0; j < n; ++j) pou.f[j][i] /= s;
    }
    return pou;
}

std::vector<int> prefix_sum_permutation(const std::vector<double>& phis, double tol) {
    check_zero_sum(phis, tol, "prefix_sum_permutation");
    const int m = static_cast<int>(phis.size());
    std::vector<int> order;
    std::vector<char> used(m, 0);
    double run = 0;
    for (int step = 0; step < m; ++step) {
        int best = -1;
        for (int k = 0; k < m; ++k) {
            if (used[k]) continue;
            if (run > 0 && phis[k] > 0) continue;
            if (run < 0 && phis[k] < 0) continue;
            if (best < 0 || std::abs(run + phis[k]) < std::abs(run + phis[best])) best = k;
        }
        if (best < 0) {
            // only rounding can leave the sign rule without candidates
            for (int k = 0; k < m && best < 0; ++k)
                if (!used[k]) best = k;
        }
        used[best] = 1;
        order.push_back(best);
        run += phis[best];
    }
    return order;
}

PathFactorization factor_diag2_general(const std::vector<double>& grid, const std::vector<double>& theta) {
    const size_t N = grid.size();
    DiagonalSlot ao = identity_diagonal_slot(N, 2), ae = identity_diagonal_slot(N, 2);
    Slot ro = identity_slot(N, 2), re = identity_slot(N, 2);
    general_block(grid, theta, 0, 1, ao, ro, ae, re);
    PathFactorization f;
    f.dim = 2;
    f.certificate.strategy = "diag2_general";
    f.pairs.push_back(to_path_pair(grid, realize(ao)));
    f.pairs.push_back(to_path_pair(grid, std::move(ro)));
    f.pairs.push_back(to_path_pair(grid, realize(ae)));
    f.pairs.push_back(to_path_pair(grid, std::move(re)));
    std::vector<CMatrix> target;
    for (double t : theta) target.push_back(CMatrix::diag({std::polar(1.0, t), std::polar(1.0, -t)}));
    certify(f, MatrixPath(grid, std::move(target)));
    return f;
}

PathFactorization factor_diag_path_u16(const EigenFunctions& phi) {
    validate(phi, "factor_diag_path_u16");
    if (all_zero(phi)) return identity_factorization(phi, 16, "diag_u16");
    const int m = phi.dim;
    const size_t N = phi.grid.size();
    const OuterCover oc = outer_cover(phi, kPi / 8);
    PathFactorization f;
    f.dim = m;
    f.certificate.strategy = "diag_u16";
    // outer parity x {D1, D2} x inner parity x {anchor, remainder}
    for (int parity = 0; parity < 2; ++parity) {
        for (int part = 0; part < 2; ++part) {
            DiagonalSlot ao = identity_diagonal_slot(N, m), ae = identity_diagonal_slot(N, m);
            Slot ro = identity_slot(N, m), re = identity_slot(N, m);
            for (int j = parity; j < oc.cover.size(); j += 2) {
                for (int p = part; p + 1 < m; p += 2) {
                    std::vector<double> theta(N, 0.0);
                    for (int i = oc.cover.first[j]; i <= oc.cover.last[j]; ++i) theta[i] = block_angle(phi, oc, j, p, i);
                    general_block(phi.grid, theta, oc.sigma[j][p], oc.sigma[j][p + 1], ao, ro, ae, re);
                }
            }
            f.pairs.push_back(to_path_pair(phi.grid, realize(ao)));
            f.pairs.push_back(to_path_pair(phi.grid, std::move(ro)));
            f.pairs.push_back(to_path_pair(phi.grid, realize(ae)));
            f.pairs.push_back(to_path_pair(phi.grid, std::move(re)));
        }
    }
    certify(f, diagonal_path(phi, true));
    return f;
}

PathFactorization factor_diag_path_u4(const EigenFunctions& phi) {
    validate(phi, "factor_diag_path_u4");
    const double top = max_abs(phi);
    if (top >= kPi / 2)
        throw Error(ErrorKind::RangeViolation,
                    "factor_diag_path_u4: eigenvalue functions reach " + std::to_string(top) + ", need < pi/2");
    if (top == 0.0) return identity_factorization(phi, 4, "diag_u4");
    // |e^{i delta} - 1| < |u - 1| = 2 sin(top/2) holds exactly when delta < top
    const double delta = std::min({kPi / 4, (kPi / 2 - top) / 2, 0.99 * top});
    PathFactorization f = blockwise_four(phi, delta, [](double a) { return su2_diag_commutator(a); }, "diag_u4");
    certify(f, diagonal_path(phi, true));
    return f;
}

PathFactorization factor_diag_path_gl4(const EigenFunctions& phi) {
    validate(phi, "factor_diag_path_gl4");
    if (all_zero(phi)) return identity_factorization(phi, 4, "diag_gl4");
    double z = 0;
    for (const auto& v : phi.values)
        for (double x : v) z = std::max(z, std::abs(std::exp(x) - 1));
    // e^delta - 1 <= |z - 1| / 4 keeps every running-sum block within about 1.4 |z - 1|
    const double delta = std::min(kPi / 4, std::log1p(z / 4));
    PathFactorization f =
        blockwise_four(phi, delta, [](double a) { return invertible_diag_commutator(std::exp(a)); }, "diag_gl4");
    const double cond = f.certificate.max_condition;
    certify(f, diagonal_path(phi, false));
    f.certificate.max_condition = cond;
    return f;
}

namespace {

template <class Kernel>
MatrixFactorization point_two(const std::vector<double>& phi, Kernel kernel, const std::string& tag, bool imaginary) {
    const int m = static_cast<int>(phi.size());
    const auto sigma = prefix_sum_permutation(phi, 1e-8);
    const auto run = prefix_sums(phi, sigma);
    MatrixFactorization f;
    f.dim = m;
    f.certificate.strategy = tag;
    for (int part = 0; part < 2; ++part) {
        CMatrix x = CMatrix::identity(m), y = CMatrix::identity(m);
        double cond = 1;
        for (int p = part; p + 1 < m; p += 2) {
            if (run[p] == 0.0) continue;
            const CommutatorPair pair = kernel(run[p]);
            cond = std::max(cond, pair.condition);
            apply_block(x, pair.x, sigma[p], sigma[p + 1]);
            apply_block(y, pair.y, sigma[p], sigma[p + 1]);
        }
        f.pairs.push_back(make_pair(std::move(x), std::move(y), cond));
    }
    std::vector<cplx> d(m);
    for (int k = 0; k < m; ++k) d[k] = imaginary ? std::polar(1.0, phi[k]) : cplx(std::exp(phi[k]));
    certify(f, CMatrix::diag(d));
    return f;
}

}  // namespace

MatrixFactorization factor_diag_unitary_point(const std::vector<double>& phi) {
    for (double v : phi)
        if (std::abs(v) >= kPi / 2) throw Error(ErrorKind::RangeViolation, "factor_diag_unitary_point: |phi| >= pi/2");
    return point_two(phi, [](double a) { return su2_diag_commutator(a); }, "diag_unitary_point", true);
}

MatrixFactorization factor_diag_positive_point(const std::vector<double>& phi) {
    return point_two(phi, [](double a) { return invertible_diag_commutator(std::exp(a)); }, "diag_positive_point",
                     false);
}

}  // namespace commfactor
