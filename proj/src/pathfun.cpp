#include "commfactor/pathfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <numbers>
#include <string>

namespace commfactor {

namespace {

constexpr double kMergeGap = 1e-14;

void check_grid(const std::vector<double>& g) {
    if (g.size() < 2) throw Error(ErrorKind::Parse, "path grid needs at least two points");
    if (std::abs(g.front()) > 1e-12 || std::abs(g.back() - 1.0) > 1e-12)
        throw Error(ErrorKind::Parse, "path grid must start at 0 and end at 1");
    for (size_t i = 1; i < g.size(); ++i)
        if (!(g[i] > g[i - 1])) throw Error(ErrorKind::Parse, "path grid must be strictly increasing");
}

double wrap_angle(double a) {
    a = std::remainder(a, 2 * std::numbers::pi);
    if (a <= -std::numbers::pi) a += 2 * std::numbers::pi;
    return a;
}

}  // namespace

std::vector<double> uniform_grid(int points) {
    if (points < 2) throw Error(ErrorKind::OutOfRange, "grid needs at least two points");
    std::vector<double> g(points);
    for (int i = 0; i < points; ++i) g[i] = static_cast<double>(i) / (points - 1);
    g.back() = 1.0;
    return g;
}

std::vector<double> merge_grids(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> all;
    all.reserve(a.size() + b.size());
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(all));
    std::vector<double> out;
    for (double t : all)
        if (out.empty() || t - out.back() > kMergeGap) out.push_back(t);
    return out;
}

std::vector<double> refine_grid(const std::vector<double>& g) {
    std::vector<double> out;
    out.reserve(2 * g.size());
    for (size_t i = 0; i + 1 < g.size(); ++i) {
        out.push_back(g[i]);
        out.push_back(0.5 * (g[i] + g[i + 1]));
    }
    out.push_back(g.back());
    return out;
}

MatrixPath::MatrixPath(std::vector<double> grid, std::vector<CMatrix> samples)
    : grid_(std::move(grid)), samples_(std::move(samples)) {
    check_grid(grid_);
    if (grid_.size() != samples_.size()) throw Error(ErrorKind::Parse, "grid and sample counts differ");
    const int n = samples_.front().rows();
    for (const auto& s : samples_)
        if (!s.square() || s.rows() != n) throw Error(ErrorKind::DimMismatch, "path samples must share one square dim");
}

MatrixPath MatrixPath::constant(const CMatrix& x, const std::vector<double>& grid) {
    return MatrixPath(grid, std::vector<CMatrix>(grid.size(), x));
}

MatrixPath MatrixPath::sample(const std::function<CMatrix(double)>& f, const std::vector<double>& grid) {
    std::vector<CMatrix> s;
    s.reserve(grid.size());
    for (double t : grid) s.push_back(f(t));
    return MatrixPath(grid, std::move(s));
}

CMatrix MatrixPath::at(double s) const {
    if (s <= grid_.front()) return samples_.front();
    if (s >= grid_.back()) return samples_.back();
    const size_t hi = std::upper_bound(grid_.begin(), grid_.end(), s) - grid_.begin();
    const size_t lo = hi - 1;
    const double w = (s - grid_[lo]) / (grid_[hi] - grid_[lo]);
    if (w == 0.0) return samples_[lo];
    return cplx(1 - w) * samples_[lo] + cplx(w) * samples_[hi];
}

CMatrix MatrixPath::slope(size_t i) const {
    return cplx(1.0 / (grid_[i + 1] - grid_[i])) * (samples_[i + 1] - samples_[i]);
}

bool MatrixPath::is_unitary_valued(double tol) const {
    return std::all_of(samples_.begin(), samples_.end(), [&](const CMatrix& x) { return x.is_unitary(tol); });
}

bool MatrixPath::is_hermitian_valued(double tol) const {
    return std::all_of(samples_.begin(), samples_.end(), [&](const CMatrix& x) { return x.is_hermitian(tol); });
}

bool MatrixPath::is_invertible_valued(double tol) const {
    return std::all_of(samples_.begin(), samples_.end(),
                       [&](const CMatrix& x) { return smallest_singular_value(x) > tol; });
}

MatrixPath resample(const MatrixPath& a, const std::vector<double>& grid) {
    if (grid == a.grid()) return a;
    return MatrixPath::sample([&](double s) { return a.at(s); }, grid);
}

MatrixPath map_path(const MatrixPath& a, const std::function<CMatrix(const CMatrix&)>& f) {
    std::vector<CMatrix> s;
    s.reserve(a.size());
    for (const auto& x : a.samples()) s.push_back(f(x));
    return MatrixPath(a.grid(), std::move(s));
}

MatrixPath path_adjoint(const MatrixPath& a) {
    return map_path(a, [](const CMatrix& x) { return x.adjoint(); });
}

MatrixPath path_multiply(const MatrixPath& a, const MatrixPath& b) {
    if (a.dim() != b.dim()) throw Error(ErrorKind::DimMismatch, "path_multiply: dims differ");
    const auto grid = merge_grids(a.grid(), b.grid());
    const MatrixPath ra = resample(a, grid), rb = resample(b, grid);
    std::vector<CMatrix> s;
    s.reserve(grid.size());
    for (size_t i = 0; i < grid.size(); ++i) s.push_back(ra[i] * rb[i]);
    return MatrixPath(grid, std::move(s));
}

MatrixPath concatenate(const MatrixPath& a, const MatrixPath& b) {
    if (a.dim() != b.dim()) throw Error(ErrorKind::DimMismatch, "concatenate: dims differ");
    if (norm_max(a.samples().back() - b.samples().front()) > 1e-9)
        throw Error(ErrorKind::EndpointMismatch, "concatenate: a(1) != b(0)");
    std::vector<double> grid;
    std::vector<CMatrix> s;
    for (size_t i = 0; i < a.size(); ++i) {
        grid.push_back(0.5 * a.grid()[i]);
        s.push_back(a[i]);
    }
    for (size_t i = 1; i < b.size(); ++i) {
        grid.push_back(0.5 + 0.5 * b.grid()[i]);
        s.push_back(b[i]);
    }
    return MatrixPath(std::move(grid), std::move(s));
}

double sup_distance(const MatrixPath& a, const MatrixPath& b) {
    if (a.dim() != b.dim()) throw Error(ErrorKind::DimMismatch, "sup_distance: dims differ");
    const auto grid = merge_grids(a.grid(), b.grid());
    double best = 0;
    for (double s : grid) best = std::max(best, norm2(a.at(s) - b.at(s)));
    return best;
}

RefinedDistance refined_sup_distance(const std::function<CMatrix(double)>& a,
                                     const std::function<CMatrix(double)>& b, int start_points, int max_points,
                                     double agree) {
    RefinedDistance r;
    auto grid = uniform_grid(start_points);
    double prev = -1;
    while (true) {
        double best = 0;
        for (double s : grid) best = std::max(best, norm2(a(s) - b(s)));
        r.value = best;
        r.points = static_cast<int>(grid.size());
        if (prev >= 0 && std::abs(best - prev) <= agree) {
            r.converged = true;
            return r;
        }
        if (2 * static_cast<int>(grid.size()) - 1 > max_points) return r;
        prev = best;
        grid = refine_grid(grid);
    }
}

std::vector<double> EigenFunctions::row(int k) const {
    std::vector<double> r(values.size());
    for (size_t i = 0; i < values.size(); ++i) r[i] = values[i][k];
    return r;
}

double EigenFunctions::max_jump() const {
    double j = 0;
    for (size_t i = 1; i < values.size(); ++i)
        for (int k = 0; k < dim; ++k) j = std::max(j, std::abs(values[i][k] - values[i - 1][k]));
    return j;
}

std::vector<double> EigenFunctions::sums() const {
    std::vector<double> s;
    s.reserve(values.size());
    for (const auto& v : values) s.push_back(std::accumulate(v.begin(), v.end(), 0.0));
    return s;
}

std::vector<int> min_cost_assignment(const std::vector<std::vector<double>>& cost) {
    // shortest augmenting paths with potentials, 1-based internally
    const int n = static_cast<int>(cost.size());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0), v(n + 1, 0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> result(n);
    for (int j = 1; j <= n; ++j) result[p[j] - 1] = j - 1;
    return result;
}

TrackedSpectrum track_eigenfunctions(const MatrixPath& u, SpectrumKind kind, double tol) {
    const bool unitary = kind == SpectrumKind::Unitary;
    if (unitary ? !u.is_unitary_valued(tol) : !u.is_hermitian_valued(tol))
        throw Error(ErrorKind::NotStructured,
                    unitary ? "track_eigenfunctions: path is not unitary-valued"
                            : "track_eigenfunctions: path is not Hermitian-valued");
    const int m = u.dim();
    const size_t N = u.size();

    // tracked (unsorted) branches: continuous values and matching eigenvectors
    std::vector<double> cur(m);
    CMatrix cur_vec;
    std::vector<std::vector<double>> tracked(N);
    std::vector<CMatrix> tracked_vec(N);

    for (size_t i = 0; i < N; ++i) {
        const auto e = eig_normal(u[i], tol);
        if (i == 0) {
            for (int k = 0; k < m; ++k) cur[k] = unitary ? std::arg(e.values[k]) : e.values[k].real();
            cur_vec = e.vectors;
        } else {
            // eigenvalue distance plus a frame-overlap term, so branches follow their eigenvectors
            // through crossings that fall between grid points
            std::vector<std::vector<double>> cost(m, std::vector<double>(m));
            for (int k = 0; k < m; ++k) {
                const cplx prev = unitary ? std::polar(1.0, cur[k]) : cplx(cur[k]);
                for (int j = 0; j < m; ++j) {
                    cplx ov = 0;
                    for (int r = 0; r < m; ++r) ov += std::conj(cur_vec(r, k)) * e.vectors(r, j);
                    cost[k][j] = std::abs(prev - e.values[j]) + 0.5 * (1.0 - std::norm(ov));
                }
            }
            const auto match = min_cost_assignment(cost);
            CMatrix next_vec(m);
            for (int k = 0; k < m; ++k) {
                const int j = match[k];
                const double step =
                    unitary ? wrap_angle(std::arg(e.values[j]) - cur[k]) : e.values[j].real() - cur[k];
                if (unitary && std::abs(step) > std::numbers::pi / 2)
                    throw Error(ErrorKind::TrackingAmbiguous,
                                "eigenvalue branch jumps by more than pi/2 at sample " + std::to_string(i));
                cur[k] += step;
                for (int r = 0; r < m; ++r) next_vec(r, k) = e.vectors(r, j);
            }
            cur_vec = next_vec;
        }
        tracked[i] = cur;
        tracked_vec[i] = cur_vec;
    }

    TrackedSpectrum out;
    out.phi.dim = m;
    out.phi.grid = u.grid();
    out.phi.values.resize(N);
    std::vector<CMatrix> frames(N);
    for (size_t i = 0; i < N; ++i) {
        std::vector<int> order(m);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return tracked[i][a] < tracked[i][b]; });
        out.phi.values[i].resize(m);
        frames[i] = CMatrix(m);
        for (int k = 0; k < m; ++k) {
            out.phi.values[i][k] = tracked[i][order[k]];
            for (int r = 0; r < m; ++r) frames[i](r, k) = tracked_vec[i](r, order[k]);
        }
    }
    out.frame = MatrixPath(u.grid(), std::move(frames));
    return out;
}

MatrixPath diagonal_path(const EigenFunctions& phi, bool imaginary) {
    std::vector<CMatrix> s;
    s.reserve(phi.values.size());
    for (const auto& v : phi.values) {
        std::vector<cplx> d(v.size());
        for (size_t k = 0; k < v.size(); ++k) d[k] = imaginary ? std::polar(1.0, v[k]) : cplx(std::exp(v[k]));
        s.push_back(CMatrix::diag(d));
    }
    return MatrixPath(phi.grid, std::move(s));
}

MatrixPath reassemble(const TrackedSpectrum& t, SpectrumKind kind) {
    std::vector<CMatrix> s;
    s.reserve(t.frame.size());
    for (size_t i = 0; i < t.frame.size(); ++i) {
        std::vector<cplx> d(t.phi.dim);
        for (int k = 0; k < t.phi.dim; ++k)
            d[k] = kind == SpectrumKind::Unitary ? std::polar(1.0, t.phi.values[i][k]) : cplx(t.phi.values[i][k]);
        s.push_back(t.frame[i] * CMatrix::diag(d) * t.frame[i].adjoint());
    }
    return MatrixPath(t.frame.grid(), std::move(s));
}

}  // namespace commfactor
