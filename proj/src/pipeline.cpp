#include "commfactor/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "commfactor/blocklu.hpp"
#include "commfactor/diagfact.hpp"
#include "commfactor/random.hpp"

namespace commfactor {

namespace {

constexpr double kPi = std::numbers::pi;
// parts closer than this to the identity are dropped rather than factored
constexpr double kTrivial = 1e-13;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

DhsValue checked_value(const CMatrix& x, const PipelineOptions& opt, std::vector<std::string>* warnings) {
    const DhsValue v = matrix_determinant_value(x, normalized_trace(x.rows()));
    if (v.dist_to_zero > opt.refuse_tol)
        throw Error(ErrorKind::DeterminantObstruction,
                    "determinant value is not trivial: residue " + fmt(v.dist_to_zero) + " (raw " + fmt(v.raw.real()) +
                        " + " + fmt(v.raw.imag()) + "i)");
    if (v.dist_to_zero > opt.warn_tol && warnings)
        warnings->push_back("determinant residue " + fmt(v.dist_to_zero) + " treated as numeric noise");
    return v;
}

CMatrix cyclic_shift(int n) {
    CMatrix s(n);
    for (int k = 0; k < n; ++k) s((k + 1) % n, k) = 1;
    return s;
}

// columns of y are eigenvectors of the upper triangular t
CMatrix triangular_eigenvectors(const CMatrix& t, double tol) {
    const int n = t.rows();
    const double scale = std::max(norm_max(t), 1e-300);
    CMatrix y(n);
    for (int k = 0; k < n; ++k) {
        y(k, k) = 1;
        for (int i = k - 1; i >= 0; --i) {
            cplx acc = 0;
            for (int l = i + 1; l <= k; ++l) acc += t(i, l) * y(l, k);
            const cplx gap = t(i, i) - t(k, k);
            if (std::abs(gap) <= tol * scale) {
                if (std::abs(acc) <= tol * scale) continue;
                throw Error(ErrorKind::IllConditioned, "repeated eigenvalue without a full eigenbasis");
            }
            y(i, k) = -acc / gap;
        }
        double nrm = 0;
        for (int i = 0; i <= k; ++i) nrm += std::norm(y(i, k));
        nrm = std::sqrt(nrm);
        for (int i = 0; i <= k; ++i) y(i, k) /= nrm;
    }
    return y;
}

std::vector<CommutatorPair> conjugate_all(const std::vector<CommutatorPair>& pairs, const CMatrix& q) {
    std::vector<CommutatorPair> out;
    const CMatrix qi = q.adjoint();
    for (const auto& p : pairs) out.push_back(conjugate_pair(p, q, qi));
    return out;
}

// block diagonal d as (V, P) Z: P cycles the blocks of each rank class, V
// carries the running products, and Z (one commutator) holds each class's
// total product in its first block.
std::vector<CommutatorPair> block_diagonal_pairs(const CMatrix& d, const BlockDecomposition& blocks) {
    const int n = d.rows();
    const CMatrix& f = blocks.frame;
    const CMatrix y = f.adjoint() * d * f;
    const auto ranks = blocks.ranks();
    const auto offs = blocks.offsets();
    std::vector<std::vector<int>> classes;
    for (int j = 0; j < static_cast<int>(ranks.size()); ++j) {
        auto it = std::find_if(classes.begin(), classes.end(), [&](const auto& c) { return ranks[c.front()] == ranks[j]; });
        if (it == classes.end())
            classes.push_back({j});
        else
            it->push_back(j);
    }
    CMatrix v = CMatrix::identity(n), p = CMatrix::identity(n), z = CMatrix::identity(n);
    std::vector<int> z_idx;
    for (const auto& c : classes) {
        const int r = ranks[c.front()];
        auto dblk = [&](int j) { return block(y, offs[j], offs[j], r, r); };
        CMatrix run = dblk(c.front());
        if (c.size() > 1) {
            set_block(v, offs[c.front()], offs[c.front()], run);
            for (size_t m = 1; m < c.size(); ++m) {
                run = dblk(c[m]) * run;
                set_block(v, offs[c[m]], offs[c[m]], run);
            }
            for (size_t m = 0; m < c.size(); ++m) {
                const int from = offs[c[m]], to = offs[c[(m + 1) % c.size()]];
                for (int a = 0; a < r; ++a) {
                    p(from + a, from + a) = 0;
                    p(to + a, from + a) = 1;
                }
            }
        }
        set_block(z, offs[c.front()], offs[c.front()], run);
        for (int a = 0; a < r; ++a) z_idx.push_back(offs[c.front()] + a);
    }
    std::vector<CommutatorPair> out;
    if (dist_to_identity(v) > kTrivial) out.push_back(make_pair(f * v * f.adjoint(), f * p * f.adjoint()));
    std::sort(z_idx.begin(), z_idx.end());
    const int zn = static_cast<int>(z_idx.size());
    CMatrix zc(zn);
    for (int a = 0; a < zn; ++a)
        for (int b = 0; b < zn; ++b) zc(a, b) = z(z_idx[a], z_idx[b]);
    if (dist_to_identity(zc) > kTrivial) {
        const CommutatorPair inner = embed_pair(cyclic_commutator(zc), z_idx, n);
        out.push_back(conjugate_pair(inner, f, f.adjoint()));
    }
    return out;
}

// unitary or positive input: s d t with s and t one commutator each
std::vector<CommutatorPair> structured_pairs(const CMatrix& x, const PipelineOptions& opt) {
    const int n = x.rows();
    if (dist_to_identity(x) <= kTrivial) return {};
    if (n < 2) return {};
    const StdFactors f = recursive_std(x, std::clamp(opt.k, 2, n));
    std::vector<CommutatorPair> out;
    if (dist_to_identity(f.s) > kTrivial) out.push_back(unitriangular_commutator(f.s, f.blocks));
    for (auto& p : block_diagonal_pairs(f.d, f.blocks)) out.push_back(std::move(p));
    if (dist_to_identity(f.t) > kTrivial) out.push_back(unitriangular_commutator(f.t, f.blocks));
    if (out.size() > 4) throw Error(ErrorKind::NoConvergence, "structured factorization exceeded 4 commutators");
    return out;
}

std::vector<double> zero_sum(std::vector<double> phi) {
    const double mean = std::accumulate(phi.begin(), phi.end(), 0.0) / static_cast<double>(phi.size());
    for (double& v : phi) v -= mean;
    return phi;
}

std::vector<CommutatorPair> unitary_point_pairs(const CMatrix& u) {
    const EigenDecomposition e = eig_normal(u);
    std::vector<double> phi;
    for (const cplx& l : e.values) phi.push_back(std::arg(l));
    const MatrixFactorization f = factor_diag_unitary_point(zero_sum(phi));
    return conjugate_all(f.pairs, e.vectors);
}

std::vector<CommutatorPair> positive_point_pairs(const CMatrix& h) {
    const EigenDecomposition e = eig_hermitian(0.5 * (h + h.adjoint()));
    std::vector<double> phi;
    for (const cplx& l : e.values) phi.push_back(std::log(l.real()));
    const MatrixFactorization f = factor_diag_positive_point(zero_sum(phi));
    return conjugate_all(f.pairs, e.vectors);
}

void drop_identities(std::vector<CommutatorPair>& pairs) {
    std::erase_if(pairs, [](const CommutatorPair& p) {
        return dist_to_identity(p.x) == 0.0 && dist_to_identity(p.y) == 0.0;
    });
}

}  // namespace

const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::PaperLdu: return "paper_ldu";
        case Strategy::Cyclic: return "cyclic";
        case Strategy::NormControlled: return "norm_controlled";
        case Strategy::Paper: return "paper";
    }
    return "?";
}

Strategy parse_strategy(const std::string& name) {
    for (Strategy s : {Strategy::PaperLdu, Strategy::Cyclic, Strategy::NormControlled, Strategy::Paper})
        if (name == strategy_name(s)) return s;
    throw Error(ErrorKind::Parse, "unknown strategy '" + name + "'");
}

PolarSplit polar_split(const CMatrix& x, const PipelineOptions& opt) {
    PolarSplit out;
    out.value = checked_value(x, opt, nullptr);
    const Polar p = polar(x);
    out.u = p.u;
    out.h = p.h;
    const TraceFunctional tau = normalized_trace(x.rows());
    out.u_value = matrix_determinant_value(p.u, tau);
    out.h_value = matrix_determinant_value(p.h, tau);
    for (const cplx& l : eig_hermitian(0.5 * (p.h + p.h.adjoint())).values) out.trace_log_h += std::log(l.real());
    return out;
}

CommutatorPair cyclic_commutator(const CMatrix& z, double tol) {
    if (!z.square()) throw Error(ErrorKind::DimMismatch, "cyclic_commutator: matrix must be square");
    const int n = z.rows();
    if (n == 1) {
        if (std::abs(z(0, 0) - 1.0) > 1e-6) throw Error(ErrorKind::DeterminantObstruction, "1x1 entry is not 1");
        return identity_pair(1);
    }
    CMatrix w, w_inv;
    std::vector<cplx> lambda;
    double cond = 1;
    if (z.is_normal(1e-9 * (1 + norm_max(z)))) {
        const EigenDecomposition e = eig_normal(z, 1e-9 * (1 + norm_max(z)));
        w = e.vectors;
        w_inv = w.adjoint();
        lambda = e.values;
    } else {
        const SchurForm s = schur(z);
        w = s.q * triangular_eigenvectors(s.t, tol);
        w_inv = inverse(w);
        cond = norm2(w) * norm2(w_inv);
        if (cond > 1e8) throw Error(ErrorKind::IllConditioned, "eigenbasis condition " + fmt(cond));
        lambda = s.t.diagonal();
    }
    cplx d = 1;
    for (const cplx& l : lambda) d *= l;
    if (std::abs(d - 1.0) > 1e-6) throw Error(ErrorKind::DeterminantObstruction, "determinant is " + fmt(std::abs(d)));
    // spread the rounding in det evenly so the running product closes at 1
    const cplx root = std::pow(d, 1.0 / n);
    std::vector<cplx> v(n);
    cplx run = 1;
    for (int k = 0; k < n; ++k) v[k] = run *= lambda[k] / root;
    return make_pair(w * CMatrix::diag(v) * w_inv, w * cyclic_shift(n) * w_inv, cond);
}

MatrixFactorization factor_matrix(const CMatrix& x, Strategy strategy, const PipelineOptions& opt) {
    if (!x.square()) throw Error(ErrorKind::DimMismatch, "factor_matrix: matrix must be square");
    if (strategy == Strategy::Paper)
        throw Error(ErrorKind::StrategyPreconditionViolated, "strategy 'paper' applies to paths only");
    const int n = x.rows();
    MatrixFactorization f;
    f.dim = n;
    f.certificate.strategy = strategy_name(strategy);
    const DhsValue value = checked_value(x, opt, &f.certificate.warnings);
    if (value.dist_to_zero > opt.warn_tol) {
        // factor x / det^{1/n}; the scalar residual carries the determinant defect
        const cplx root = std::pow(det(x), 1.0 / n);
        MatrixFactorization g = factor_matrix(x * (1.0 / root), strategy, opt);
        g.residual = CMatrix::identity(n) * root;
        g.certificate.warnings = f.certificate.warnings;
        certify(g, x);
        return g;
    }
    const bool unitary = x.is_unitary(1e-10);
    const bool positive = !unitary && x.is_positive_invertible(1e-10);
    auto append = [&](std::vector<CommutatorPair> ps) {
        for (auto& p : ps) f.pairs.push_back(std::move(p));
    };
    if (dist_to_identity(x) <= kTrivial) {
        // nothing to factor
    } else if (strategy == Strategy::PaperLdu) {
        if (unitary || positive) {
            append(structured_pairs(x, opt));
        } else {
            const PolarSplit p = polar_split(x, opt);
            append(structured_pairs(p.u, opt));
            append(structured_pairs(p.h, opt));
        }
    } else if (strategy == Strategy::Cyclic) {
        if (x.is_normal(1e-9 * (1 + norm_max(x)))) {
            f.pairs.push_back(cyclic_commutator(x));
        } else {
            const Polar p = polar(x);
            for (const CMatrix* part : {&p.u, &p.h})
                if (dist_to_identity(*part) > kTrivial) f.pairs.push_back(cyclic_commutator(*part));
        }
    } else if (strategy == Strategy::NormControlled) {
        const double dist = dist_to_identity(x);
        if (unitary) {
            if (!(dist < std::sqrt(2.0) / 100))
                throw Error(ErrorKind::StrategyPreconditionViolated,
                            "norm_controlled needs |u - 1| < sqrt2/100, got " + fmt(dist));
            append(unitary_point_pairs(x));
        } else {
            if (!(dist < 1e-3))
                throw Error(ErrorKind::StrategyPreconditionViolated,
                            "norm_controlled needs |x - 1| < 1/1000, got " + fmt(dist));
            const Polar p = polar(x);
            append(unitary_point_pairs(p.u));
            append(positive_point_pairs(p.h));
        }
        drop_identities(f.pairs);
        const double bound = (unitary ? 2 * std::sqrt(2.0) : 24.0) * std::sqrt(dist) + 1e-6;
        for (const auto& p : f.pairs)
            if (p.max_dist_to_1() > bound)
                throw Error(ErrorKind::NoConvergence,
                            "factor distance " + fmt(p.max_dist_to_1()) + " exceeds the bound " + fmt(bound));
    } else {
        throw Error(ErrorKind::StrategyPreconditionViolated, "strategy 'paper' applies to paths only");
    }
    certify(f, x);
    const double limit = opt.recon_tol * std::max(1.0, norm2(x));
    if (f.certificate.recon_err > limit)
        throw Error(ErrorKind::NoConvergence, "reconstruction error " + fmt(f.certificate.recon_err) + " above " + fmt(limit));
    const int ceiling = strategy == Strategy::Cyclic ? ((unitary || positive) ? 1 : 2) : ((unitary || positive) ? 4 : 8);
    if (f.certificate.count > ceiling)
        throw Error(ErrorKind::NoConvergence, "commutator count " + std::to_string(f.certificate.count) + " above " +
                                                  std::to_string(ceiling));
    return f;
}

PathFactorization factor_unitary_path(const MatrixPath& u, Strategy strategy, const PipelineOptions& opt) {
    if (strategy != Strategy::Paper && strategy != Strategy::Cyclic)
        throw Error(ErrorKind::StrategyPreconditionViolated, "paths take the strategies 'paper' or 'cyclic'");
    if (u.size() < 2) throw Error(ErrorKind::DimMismatch, "path needs at least two samples");
    if (!u.is_unitary_valued(1e-8)) throw Error(ErrorKind::NotUnitary, "path is not unitary-valued");
    const int n = u.dim();
    const TraceFunctional tau = normalized_trace(n);
    bool trivial = true;
    for (size_t i = 0; i < u.size(); ++i) {
        const DhsValue v = matrix_determinant_value(u[i], tau);
        if (v.dist_to_zero > opt.refuse_tol)
            throw Error(ErrorKind::DeterminantObstruction,
                        "det is not 1 at sample " + std::to_string(i) + ": residue " + fmt(v.dist_to_zero));
        trivial = trivial && dist_to_identity(u[i]) <= kTrivial;
    }
    PathFactorization f;
    f.dim = n;
    f.certificate.strategy = strategy_name(strategy);
    if (trivial) {
        certify(f, u);
        return f;
    }
    const TrackedSpectrum tracked = track_eigenfunctions(u, SpectrumKind::Unitary);
    EigenFunctions phi = tracked.phi;
    // the tracked sum is a constant multiple of 2 pi; move it off the top (or bottom) branches
    const double turns = std::accumulate(phi.values.front().begin(), phi.values.front().end(), 0.0) / (2 * kPi);
    const int w = static_cast<int>(std::lround(turns));
    for (size_t i = 0; i < phi.values.size(); ++i) {
        auto& v = phi.values[i];
        const double t = std::accumulate(v.begin(), v.end(), 0.0) / (2 * kPi);
        if (std::abs(t - w) > 1e-6)
            throw Error(ErrorKind::DeterminantObstruction,
                        "eigenvalue functions do not sum to a fixed multiple of 2 pi at sample " + std::to_string(i));
        for (int k = 0; k < std::abs(w); ++k) {
            if (w > 0) v[n - 1 - k] -= 2 * kPi;
            else v[k] += 2 * kPi;
        }
        v = zero_sum(v);
    }
    const auto& q = tracked.frame;
    if (strategy == Strategy::Cyclic) {
        std::vector<CMatrix> xs, ys;
        for (size_t i = 0; i < phi.values.size(); ++i) {
            std::vector<cplx> run(n);
            double acc = 0;
            for (int k = 0; k < n; ++k) run[k] = std::polar(1.0, acc += phi.values[i][k]);
            xs.push_back(q[i] * CMatrix::diag(run) * q[i].adjoint());
            ys.push_back(q[i] * cyclic_shift(n) * q[i].adjoint());
        }
        f.pairs.push_back({MatrixPath(phi.grid, std::move(xs)), MatrixPath(phi.grid, std::move(ys))});
    } else {
        double top = 0;
        for (const auto& v : phi.values)
            for (double x : v) top = std::max(top, std::abs(x));
        PathFactorization diag = top < kPi / 2 - 1e-3 ? factor_diag_path_u4(phi) : factor_diag_path_u16(phi);
        f.certificate.strategy = std::string("paper/") + diag.certificate.strategy;
        for (auto& pair : diag.pairs) {
            std::vector<CMatrix> xs, ys;
            for (size_t i = 0; i < q.size(); ++i) {
                xs.push_back(q[i] * pair.x[i] * q[i].adjoint());
                ys.push_back(q[i] * pair.y[i] * q[i].adjoint());
            }
            f.pairs.push_back({MatrixPath(q.grid(), std::move(xs)), MatrixPath(q.grid(), std::move(ys))});
        }
    }
    certify(f, u);
    if (f.certificate.recon_err > 1e-5)
        throw Error(ErrorKind::NoConvergence, "path reconstruction error " + fmt(f.certificate.recon_err));
    return f;
}

DescentReport descent_demo(const DescentOptions& opt) {
    if (opt.stages < 2 || opt.stages > 8) throw Error(ErrorKind::OutOfRange, "descent needs 2 to 8 stages");
    const int N = opt.stages;
    // orthogonal shells of halving rank, the last two equal
    std::vector<int> shell(N);
    for (int s = 0; s < N; ++s) shell[s] = opt.rank >> std::min(s + 1, N - 1);
    const int total = std::accumulate(shell.begin(), shell.end(), 0);
    if (total != opt.rank || shell.back() < 2)
        throw Error(ErrorKind::ScheduleInfeasible, "rank " + std::to_string(opt.rank) + " cannot hold " +
                                                       std::to_string(N) + " halving shells of rank >= 2");
    std::vector<int> off(N, 0);
    for (int s = 1; s < N; ++s) off[s] = off[s - 1] + shell[s - 1];
    const int R = opt.rank;
    Sampler rng(opt.seed);

    DescentReport rep;
    rep.stages = N;
    rep.rank = R;
    std::vector<CMatrix> x(N + 1, CMatrix::identity(R));
    for (int s = 0; s < N; ++s) {
        const int n = s + 1;
        DescentStage st;
        st.shell_rank = shell[s];
        st.schedule_bound = 1.0 / (100.0 * n * n);
        if (opt.fill > 0) {
            CMatrix h = rng.hermitian(shell[s]);
            const cplx tr = h.trace() / static_cast<double>(shell[s]);
            for (int a = 0; a < shell[s]; ++a) h(a, a) -= tr;
            // |e^{iH} - 1| = 2 sin(|H| / 2)
            const double target = opt.fill * st.schedule_bound;
            h = h * cplx(2 * std::asin(target / 2) / norm2(h));
            set_block(x[s], off[s], off[s], exp_i_hermitian(h));
        }
        st.dist_x = dist_to_identity(x[s]);
        rep.stage.push_back(st);
    }

    // c_n = x_n x_{n+1}^{-1} lives on shells n and n+1; factor it there
    std::vector<std::vector<CommutatorPair>> pairs(N);
    CMatrix partial = CMatrix::identity(R);
    for (int s = 0; s < N; ++s) {
        const CMatrix c = x[s] * x[s + 1].adjoint();
        std::vector<int> idx;
        const int span = s + 1 < N ? shell[s] + shell[s + 1] : shell[s];
        for (int a = 0; a < span; ++a) idx.push_back(off[s] + a);
        CMatrix local(span);
        for (int a = 0; a < span; ++a)
            for (int b = 0; b < span; ++b) local(a, b) = c(idx[a], idx[b]);
        auto& st = rep.stage[s];
        st.dist_c = dist_to_identity(local);
        st.factor_bound = 2 * std::sqrt(2.0) * std::sqrt(st.dist_c);
        if (st.dist_c > 0) {
            const MatrixFactorization mf = factor_matrix(local, Strategy::NormControlled);
            for (const auto& p : mf.pairs) {
                pairs[s].push_back(embed_pair(p, idx, R));
                st.factor_dist = std::max(st.factor_dist, p.max_dist_to_1());
            }
        }
        const CMatrix next = partial * c;
        st.increment = norm2(next - partial);
        partial = next;
        const double n = s + 1;
        rep.fitted_constant = std::max(rep.fitted_constant, n * n * st.increment);
    }

    // odd stages have disjoint supports, as do even ones, so each slot's
    // factors multiply into a single pair per parity
    CMatrix product = CMatrix::identity(R);
    for (int parity = 0; parity < 2; ++parity) {
        for (int slot = 0; slot < 2; ++slot) {
            CMatrix ys = CMatrix::identity(R), zs = CMatrix::identity(R);
            for (int s = parity; s < N; s += 2) {
                if (slot < static_cast<int>(pairs[s].size())) {
                    ys = ys * pairs[s][slot].x;
                    zs = zs * pairs[s][slot].y;
                }
            }
            product = product * commutator(ys, zs);
            ++rep.count;
        }
    }
    rep.final_recon = norm2(product - x[0]);
    bool within = true;
    for (const auto& st : rep.stage) within = within && st.dist_x < st.schedule_bound;
    rep.cauchy_ok = within && rep.fitted_constant <= 2 * rep.schedule_constant;
    return rep;
}

}  // namespace commfactor
