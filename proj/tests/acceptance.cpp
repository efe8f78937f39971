// One line per acceptance criterion. Every reconstruction and factor distance
// is recomputed here from the returned factors rather than read back from the
// certificates.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <numeric>
#include <sstream>
#include <tuple>

#include "commfactor/blocklu.hpp"
#include "commfactor/cli.hpp"
#include "commfactor/diagfact.hpp"
#include "commfactor/io.hpp"
#include "commfactor/pipeline.hpp"
#include "commfactor/random.hpp"

using namespace commfactor;
using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

// accumulates failures with the first offending case kept for the report
struct Tally {
    int cases = 0;
    int failed = 0;
    std::string first;
    void check(bool ok, const std::string& what) {
        ++cases;
        if (!ok && failed++ == 0) first = what;
    }
    Outcome outcome(const std::string& summary) const {
        if (failed == 0) return {true, summary};
        return {false, summary + "; " + std::to_string(failed) + "/" + std::to_string(cases) + " failed, first: " + first};
    }
};

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(3);
    s << v;
    return s.str();
}

CMatrix multiply_out(const std::vector<CommutatorPair>& pairs, int n) {
    CMatrix p = CMatrix::identity(n);
    for (const auto& q : pairs) p = p * (q.x * q.y * inverse(q.x) * inverse(q.y));
    return p;
}

double factor_dist(const std::vector<CommutatorPair>& pairs, int n) {
    double d = 0;
    for (const auto& q : pairs)
        d = std::max({d, norm2(q.x - CMatrix::identity(n)), norm2(q.y - CMatrix::identity(n))});
    return d;
}

MatrixPath multiply_out(const PathFactorization& f, const std::vector<double>& grid) {
    MatrixPath p = MatrixPath::constant(CMatrix::identity(f.dim), grid);
    for (const auto& q : f.pairs) p = path_multiply(p, path_commutator(q));
    return p;
}

double factor_dist(const PathFactorization& f) {
    double d = 0;
    for (const auto& q : f.pairs)
        for (const auto* path : {&q.x, &q.y})
            for (const auto& s : path->samples()) d = std::max(d, norm2(s - CMatrix::identity(f.dim)));
    return d;
}

// smooth zero-sum functions, sorted pointwise, sup |phi| = amplitude
EigenFunctions smooth_phi(int m, int points, double amplitude, std::uint64_t seed) {
    Sampler rng(seed);
    std::vector<double> a(m), w(m), c(m);
    for (int k = 0; k < m; ++k) {
        a[k] = rng.uniform(0.3, 1.0);
        w[k] = rng.uniform(0.5, 4.0);
        c[k] = rng.uniform(0.0, 2 * pi);
    }
    EigenFunctions phi;
    phi.dim = m;
    phi.grid = uniform_grid(points);
    double top = 0;
    for (double s : phi.grid) {
        std::vector<double> v(m);
        for (int k = 0; k < m; ++k) v[k] = a[k] * std::sin(w[k] * s + c[k]);
        const double mean = std::accumulate(v.begin(), v.end(), 0.0) / m;
        for (double& x : v) x -= mean;
        std::sort(v.begin(), v.end());
        for (double x : v) top = std::max(top, std::abs(x));
        phi.values.push_back(v);
    }
    for (auto& v : phi.values) {
        for (double& x : v) x *= amplitude / top;
        const double mean = std::accumulate(v.begin(), v.end(), 0.0) / m;
        for (double& x : v) x -= mean;
    }
    return phi;
}

double sup_dist_to_1(const EigenFunctions& phi, bool imaginary) {
    double z = 0;
    for (const auto& v : phi.values)
        for (double x : v) z = std::max(z, std::abs((imaginary ? std::polar(1.0, x) : cplx(std::exp(x))) - 1.0));
    return z;
}

CMatrix traceless_hermitian(Sampler& rng, int n, double norm) {
    CMatrix h = rng.hermitian(n);
    const cplx tr = h.trace() / double(n);
    for (int k = 0; k < n; ++k) h(k, k) -= tr;
    return h * cplx(norm / norm2(h));
}

CMatrix near_unitary(Sampler& rng, int n, double delta) {
    const CMatrix h = rng.hermitian(n);
    return rng.unitary(n) * (CMatrix::identity(n) + h * cplx(delta / norm2(h)));
}

// |y - 1| over the unitaries of the corner, from singular values
double corner_dist(const CMatrix& y) {
    double d = 0;
    for (double s : singular_values(y)) d = std::max(d, std::abs(s - 1));
    return d;
}

Outcome determinant_correctness() {
    Sampler rng(101);
    Tally t;
    int trivial = 0;
    for (int i = 0; i < 200; ++i) {
        const int n = rng.integer(2, 16);
        CMatrix x = rng.invertible(n);
        if (i % 2 == 0) x = scale_to_unit_det(x);
        else if (i % 4 == 1) x = scale_to_unit_det(x) * cplx(std::pow(1 + 1e-3 * rng.uniform(1, 10), 1.0 / n));
        const DhsValue v = matrix_determinant_value(x, normalized_trace(n));
        const bool a = v.dist_to_zero <= 1e-8, b = std::abs(det(x) - 1.0) <= 1e-6;
        trivial += b;
        t.check(a == b, "n=" + std::to_string(n) + " residue " + fmt(v.dist_to_zero) + " |det-1| " +
                            fmt(std::abs(det(x) - 1.0)));
    }
    return t.outcome("200 invertibles, " + std::to_string(trivial) + " with det 1, verdicts agree");
}

Outcome path_integral_consistency() {
    Tally t;
    const auto loop = MatrixPath::sample(
        [](double s) { return CMatrix::diag({std::polar(1.0, 2 * pi * s), cplx(1)}); }, uniform_grid(257));
    const cplx v = path_determinant(loop, normalized_trace(2));
    t.check(std::abs(v - 0.5) <= 1e-9, "loop value " + fmt(v.real()) + "+" + fmt(v.imag()) + "i");
    Sampler rng(202);
    double worst = 0;
    for (int i = 0; i < 50; ++i) {
        const int n = rng.integer(2, 5);
        const CMatrix a = rng.ginibre(n), b = rng.ginibre(n);
        const auto p1 = MatrixPath::sample([&](double s) { return expm(cplx(s) * a); }, uniform_grid(33));
        const CMatrix mid = p1.samples().back();
        const auto p2 = MatrixPath::sample([&](double s) { return mid * expm(cplx(s * s) * b); }, uniform_grid(33));
        const auto tau = normalized_trace(n);
        const double err = std::abs(path_determinant(concatenate(p1, p2), tau) - path_determinant(p1, tau) -
                                    path_determinant(p2, tau));
        worst = std::max(worst, err);
        t.check(err <= 1e-9, "pair " + std::to_string(i) + " additivity " + fmt(err));
    }
    return t.outcome("loop |value - 1/2| = " + fmt(std::abs(v - 0.5)) + ", additivity worst " + fmt(worst));
}

Outcome su2_suite() {
    Tally t;
    double worst_recon = 0, worst_slack = -1;
    for (int k = 0; k < 100; ++k) {
        const double s = -pi / 2 + pi * (k + 0.5) / 100;
        const CommutatorPair p = su2_diag_commutator(s);
        const CMatrix target = CMatrix::diag({std::polar(1.0, s), std::polar(1.0, -s)});
        const double recon = norm2(commutator(p.x, p.y) - target);
        const double bound = std::sqrt(std::abs(std::polar(1.0, s) - 1.0));
        const double d = std::max(dist_to_identity(p.x), dist_to_identity(p.y));
        worst_recon = std::max(worst_recon, recon);
        worst_slack = std::max(worst_slack, d - bound);
        t.check(recon <= 1e-10 && d <= bound + 1e-9, "t=" + fmt(s) + " recon " + fmt(recon) + " dist " + fmt(d));
    }
    return t.outcome("100 angles, recon worst " + fmt(worst_recon) + ", max(dist - bound) " + fmt(worst_slack));
}

Outcome circle_suite() {
    Tally t;
    double worst = 0;
    int bounded = 0;
    for (int k = 0; k < 360; ++k) {
        const cplx a = std::polar(1.0, 2 * pi * k / 360);
        const CommutatorPair p = swap_trick_commutator(a);
        const double recon = norm2(commutator(p.x, p.y) - CMatrix::diag({a, std::conj(a)}));
        worst = std::max(worst, recon);
        bool ok = recon <= 1e-10;
        if (std::abs(a - 1.0) < std::sqrt(2.0)) {
            ++bounded;
            ok = ok && std::max(dist_to_identity(p.x), dist_to_identity(p.y)) <= std::sqrt(std::abs(a - 1.0)) + 1e-9;
        }
        t.check(ok, "alpha at " + std::to_string(k) + " degrees");
    }
    return t.outcome("360 points, recon worst " + fmt(worst) + ", bound checked on " + std::to_string(bounded));
}

Outcome diagonal_unitary_suite() {
    Tally t;
    double worst = 0;
    for (int i = 0; i < 20; ++i) {
        const int m = 2 + 2 * (i % 3);
        Sampler rng(500 + i);
        const auto phi = smooth_phi(m, 257, rng.uniform(0.1, 1.45), 500 + i);
        const auto f = factor_diag_path_u4(phi);
        const double recon = sup_distance(multiply_out(f, phi.grid), diagonal_path(phi, true));
        const double bound = std::sqrt(2.0) * std::sqrt(sup_dist_to_1(phi, true)) + 1e-6;
        worst = std::max(worst, recon);
        t.check(f.pairs.size() == 4 && recon <= 1e-5 && factor_dist(f) <= bound,
                "u4 seed " + std::to_string(500 + i) + " pairs " + std::to_string(f.pairs.size()) + " recon " +
                    fmt(recon) + " dist " + fmt(factor_dist(f)) + " bound " + fmt(bound));
    }
    double worst16 = 0;
    for (int i = 0; i < 10; ++i) {
        const int m = 2 + i % 4;
        Sampler rng(600 + i);
        const auto phi = smooth_phi(m, 257, rng.uniform(1.8, 3.0), 600 + i);
        try {
            const auto f = factor_diag_path_u16(phi);
            const double recon = sup_distance(multiply_out(f, phi.grid), diagonal_path(phi, true));
            worst16 = std::max(worst16, recon);
            t.check(f.pairs.size() == 16 && recon <= 1e-5,
                    "u16 seed " + std::to_string(600 + i) + " pairs " + std::to_string(f.pairs.size()) + " recon " +
                        fmt(recon));
        } catch (const Error& e) {
            t.check(false, "u16 seed " + std::to_string(600 + i) + ": " + e.what());
        }
    }
    return t.outcome("4-pair recon worst " + fmt(worst) + ", 16-pair recon worst " + fmt(worst16));
}

Outcome diagonal_invertible_suite() {
    Tally t;
    double worst = 0;
    int bounded = 0;
    for (int i = 0; i < 20; ++i) {
        const int m = 2 + i % 5;
        Sampler rng(700 + i);
        const double amp = i % 2 == 0 ? rng.uniform(0.05, 0.3) : rng.uniform(0.5, 2.0);
        const auto phi = smooth_phi(m, 257, amp, 700 + i);
        const auto f = factor_diag_path_gl4(phi);
        const double recon = sup_distance(multiply_out(f, phi.grid), diagonal_path(phi, false));
        const double z = sup_dist_to_1(phi, false);
        worst = std::max(worst, recon);
        bool ok = f.pairs.size() == 4 && recon <= 1e-5;
        if (z <= 0.5) {
            ++bounded;
            ok = ok && factor_dist(f) <= 2 * std::sqrt(z) + 1e-6;
        }
        t.check(ok, "seed " + std::to_string(700 + i) + " recon " + fmt(recon) + " dist " + fmt(factor_dist(f)) +
                        " |z-1| " + fmt(z));
    }
    return t.outcome("20 inputs, recon worst " + fmt(worst) + ", bound checked on " + std::to_string(bounded));
}

Outcome block_factor_suite() {
    Tally t;
    Sampler rng(808);
    double worst = 0;
    int positive = 0;
    for (int i = 0; i < 100; ++i) {
        const int n = rng.integer(3, 10);
        const bool pos = i % 2 == 0;
        const CMatrix x = pos ? rng.positive(n, 0.2, 3.0) : near_unitary(rng, n, rng.uniform(0.0, 0.08));
        const int r = rng.integer(1, n - 1);
        const ProjectionChoice c = select_projection(x, r);
        const StdFactors f = schur_std(x, c.p);
        const double recon = norm2(f.s * f.d * f.t - x) / norm2(x);
        worst = std::max(worst, recon);
        bool ok = recon <= 1e-10;
        if (pos) {
            ++positive;
            const CMatrix y = f.blocks.frame.adjoint() * f.d * f.blocks.frame;
            ok = ok && block(y, 0, 0, r, r).is_positive_invertible() &&
                 block(y, r, r, n - r, n - r).is_positive_invertible();
        }
        t.check(ok, "input " + std::to_string(i) + " recon " + fmt(recon));
    }
    return t.outcome("100 inputs, relative recon worst " + fmt(worst) + ", positivity on " + std::to_string(positive));
}

Outcome projection_suite() {
    Tally t;
    Sampler rng(909);
    double margin = 1e9;
    for (int i = 0; i < 50; ++i) {
        const int n = rng.integer(6, 12);
        const int r = rng.integer(1, n - 1);
        const CMatrix x = near_unitary(rng, n, rng.uniform(0.001, 0.05));
        const ProjectionChoice c = select_projection(x, r);
        // bounds from the distance of x itself, compressions measured here
        const double de = dist_to_unitaries(x) + 1e-3;
        const CMatrix y = c.p.frame.adjoint() * x * c.p.frame;
        const CMatrix pxp = block(y, 0, 0, r, r), pxq = block(y, 0, r, r, n - r);
        const CMatrix qxp = block(y, r, 0, n - r, r), qxq = block(y, r, r, n - r, n - r);
        const double cross = norm2(qxp * inverse(pxp) * pxq);
        const double cross_bound = de * de / std::sqrt(1 - 2.1 * de);
        margin = std::min(margin, cross_bound - cross);
        t.check(c.p.rank == r && cross <= cross_bound && corner_dist(pxp) <= de && corner_dist(qxq) <= de,
                "n=" + std::to_string(n) + " r=" + std::to_string(r) + " cross " + fmt(cross) + " bound " +
                    fmt(cross_bound));
    }
    return t.outcome("50 near-unitaries, smallest cross-term margin " + fmt(margin));
}

Outcome pipeline_suite() {
    Tally t;
    Sampler rng(1001);
    double worst = 0;
    int max_count = 0;
    for (int i = 0; i < 100; ++i) {
        const int n = rng.integer(2, 8);
        const int kind = i % 3;
        CMatrix x = kind == 0 ? rng.special_unitary(n)
                    : kind == 1 ? scale_to_unit_det(rng.positive(n))
                                : rng.special_linear(n);
        try {
            const auto f = factor_matrix(x, Strategy::PaperLdu);
            CMatrix p = multiply_out(f.pairs, n);
            if (f.residual) p = p * *f.residual;
            const double recon = norm2(p - x) / std::max(1.0, norm2(x));
            const int count = static_cast<int>(f.pairs.size());
            const int ceiling = kind == 2 ? 8 : 4;
            worst = std::max(worst, recon);
            max_count = std::max(max_count, count);
            bool cyclic_ok = true;
            try {
                factor_matrix(x, Strategy::Cyclic);
            } catch (const Error&) {
                cyclic_ok = false;
            }
            t.check(count <= ceiling && recon <= 1e-8 && cyclic_ok,
                    "det-1 input " + std::to_string(i) + " count " + std::to_string(count) + " recon " + fmt(recon));
        } catch (const Error& e) {
            t.check(false, "det-1 input " + std::to_string(i) + ": " + e.what());
        }
    }
    int refused = 0;
    for (int i = 0; i < 100; ++i) {
        const int n = rng.integer(2, 8);
        CMatrix x = scale_to_unit_det(rng.invertible(n)) * cplx(std::pow(1 + rng.uniform(2e-3, 1.0), 1.0 / n));
        if (i % 2) x = x * cplx(std::polar(1.0, rng.uniform(0.01, 1.0) / n));
        auto refuses = [&](Strategy s) {
            try {
                factor_matrix(x, s);
            } catch (const Error& e) {
                return e.kind() == ErrorKind::DeterminantObstruction;
            }
            return false;
        };
        const bool a = refuses(Strategy::PaperLdu), b = refuses(Strategy::Cyclic);
        refused += a;
        t.check(a && b && std::abs(det(x) - 1.0) > 1e-3, "det-defect input " + std::to_string(i));
    }
    return t.outcome("max count " + std::to_string(max_count) + ", recon worst " + fmt(worst) + ", refused " +
                     std::to_string(refused) + "/100, cyclic agrees");
}

Outcome norm_controlled_suite() {
    Tally t;
    Sampler rng(1111);
    double ratio = 0;
    for (int i = 0; i < 30; ++i) {
        const int n = rng.integer(2, 8);
        const CMatrix q = rng.unitary(n);
        const CMatrix u = q * exp_i_hermitian(traceless_hermitian(rng, n, rng.uniform(1e-4, 0.013))) * q.adjoint();
        const double d = dist_to_identity(u);
        try {
            const auto f = factor_matrix(u, Strategy::NormControlled);
            const double fd = factor_dist(f.pairs, n);
            const double bound = 2 * std::sqrt(2.0) * std::sqrt(d);
            ratio = std::max(ratio, fd / bound);
            t.check(d < std::sqrt(2.0) / 100 && fd <= bound + 1e-6 &&
                        norm2(multiply_out(f.pairs, n) - u) <= 1e-8,
                    "unitary " + std::to_string(i) + " dist " + fmt(fd) + " bound " + fmt(bound));
        } catch (const Error& e) {
            t.check(false, "unitary " + std::to_string(i) + ": " + e.what());
        }
    }
    for (int i = 0; i < 30; ++i) {
        const int n = rng.integer(2, 8);
        CMatrix a = rng.ginibre(n);
        const cplx tr = a.trace() / double(n);
        for (int k = 0; k < n; ++k) a(k, k) -= tr;
        const CMatrix x = expm(a * cplx(rng.uniform(1e-5, 9e-4) / norm2(a)));
        const double d = dist_to_identity(x);
        try {
            const auto f = factor_matrix(x, Strategy::NormControlled);
            const double fd = factor_dist(f.pairs, n);
            const double bound = 24 * std::sqrt(d);
            ratio = std::max(ratio, fd / bound);
            t.check(d < 1e-3 && fd <= bound + 1e-6 && norm2(multiply_out(f.pairs, n) - x) <= 1e-8,
                    "invertible " + std::to_string(i) + " dist " + fmt(fd) + " bound " + fmt(bound));
        } catch (const Error& e) {
            t.check(false, "invertible " + std::to_string(i) + ": " + e.what());
        }
    }
    return t.outcome("60 inputs, worst factor distance / bound " + fmt(ratio));
}

Outcome descent_suite() {
    Tally t;
    const DescentReport r = descent_demo(DescentOptions{});
    for (size_t n = 1; n <= r.stage.size(); ++n) {
        const auto& s = r.stage[n - 1];
        const double scaled = s.increment * double(n * n);
        t.check(scaled <= 2 * r.schedule_constant, "stage " + std::to_string(n) + " n^2 increment " + fmt(scaled));
        t.check(s.dist_x < 1.0 / (100.0 * double(n * n)), "stage " + std::to_string(n) + " dist_x " + fmt(s.dist_x));
    }
    t.check(r.stage.size() == 6, "stage count");
    t.check(r.fitted_constant <= 2 * r.schedule_constant, "fitted constant " + fmt(r.fitted_constant));
    t.check(r.final_recon <= 1e-6, "final recon " + fmt(r.final_recon));
    return t.outcome("fitted C " + fmt(r.fitted_constant) + " vs schedule " + fmt(r.schedule_constant) +
                     ", final recon " + fmt(r.final_recon));
}

int cli(const std::vector<std::string>& args) {
    std::istringstream in;
    std::ostringstream out, err;
    return run_cli(args, in, out, err);
}

Outcome cli_round_trip() {
    Tally t;
    const fs::path dir = fs::temp_directory_path() / "commfactor_acceptance";
    fs::create_directories(dir);
    auto write = [&](const std::string& name, const json& j) {
        const fs::path p = dir / name;
        std::ofstream(p) << j.dump();
        return p.string();
    };
    Sampler rng(1212);
    int tampered = 0;
    for (int i = 0; i < 50; ++i) {
        json input;
        if (i < 40) {
            const int n = rng.integer(2, 6);
            const CMatrix x = i % 3 == 0   ? rng.special_unitary(n)
                              : i % 3 == 1 ? scale_to_unit_det(rng.positive(n))
                                           : rng.special_linear(n);
            input = to_json(x);
        } else {
            const int n = rng.integer(2, 4);
            const CMatrix a = traceless_hermitian(rng, n, rng.uniform(0.2, 2.5));
            const CMatrix b = traceless_hermitian(rng, n, rng.uniform(0.0, 0.5));
            const CMatrix q = rng.unitary(n);
            input = to_json(MatrixPath::sample(
                [&](double s) { return q * exp_i_hermitian(a * cplx(s) + b * cplx(s * s)) * q.adjoint(); },
                uniform_grid(129)));
        }
        const std::string in = write("in" + std::to_string(i) + ".json", input);
        const std::string fac = (dir / ("f" + std::to_string(i) + ".json")).string();
        const int code = cli({"factor", in, "--out", fac});
        t.check(code == kExitOk, "factor input " + std::to_string(i) + " exit " + std::to_string(code));
        if (code != kExitOk) continue;
        const int v = cli({"verify", fac, in});
        t.check(v == kExitOk, "verify input " + std::to_string(i) + " exit " + std::to_string(v));

        std::ifstream fin(fac);
        const json f = json::parse(fin);
        json bad = f;
        bad["certificate"]["recon_err"] = f["certificate"]["recon_err"].get<double>() + 1e-4;
        const int v1 = cli({"verify", write("bad_cert" + std::to_string(i) + ".json", bad), in});
        t.check(v1 == kExitMismatch, "tampered certificate " + std::to_string(i) + " exit " + std::to_string(v1));
        ++tampered;
        if (!f["pairs"].empty()) {
            // perturb y where x is farthest from 1; where x = 1 any y leaves the
            // commutator alone and the file would still be a valid factorization
            const AnyFactorization parsed = factorization_from_json(f);
            size_t pair = 0, sample = 0;
            double far = -1;
            auto consider = [&](size_t p, size_t s, const CMatrix& x) {
                const double d = dist_to_identity(x);
                if (d > far) std::tie(far, pair, sample) = std::tuple(d, p, s);
            };
            if (const auto* m = std::get_if<MatrixFactorization>(&parsed)) {
                for (size_t p = 0; p < m->pairs.size(); ++p) consider(p, 0, m->pairs[p].x);
            } else {
                const auto& pf = std::get<PathFactorization>(parsed);
                for (size_t p = 0; p < pf.pairs.size(); ++p)
                    for (size_t s = 0; s < pf.pairs[p].x.size(); ++s) consider(p, s, pf.pairs[p].x[s]);
            }
            json bp = f;
            json& y = bp["pairs"][pair]["y"];
            json& e = y.contains("samples") ? y["samples"][sample][0] : y["entries"][0];
            e[0] = e[0].get<double>() + 1e-3;
            const int v2 = cli({"verify", write("bad_pair" + std::to_string(i) + ".json", bp), in});
            t.check(v2 == kExitMismatch, "tampered pair " + std::to_string(i) + " exit " + std::to_string(v2));
            ++tampered;
        }
    }
    return t.outcome("50 inputs verified, " + std::to_string(tampered) + " tampered files rejected");
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"determinant correctness", determinant_correctness},
        {"path-integral consistency", path_integral_consistency},
        {"SU(2) diagonal commutator", su2_suite},
        {"circle swap-trick commutator", circle_suite},
        {"diagonal unitary paths (4 and 16 pairs)", diagonal_unitary_suite},
        {"diagonal invertible paths", diagonal_invertible_suite},
        {"block s d t factorization", block_factor_suite},
        {"projection selection bounds", projection_suite},
        {"matrix pipeline with refusal", pipeline_suite},
        {"norm-controlled regime", norm_controlled_suite},
        {"descent demo", descent_suite},
        {"CLI round trip", cli_round_trip},
    };
    // runtime ceilings in seconds; 0 means none stated
    const double limits[] = {5, 0, 0, 0, 60, 0, 0, 0, 0, 0, 120, 0};
    int failures = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (limits[i] > 0 && secs >= limits[i]) {
            o.pass = false;
            o.detail += "; over the " + fmt(limits[i]) + " s limit";
        }
        failures += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << "  " << (i + 1) << ". " << criteria[i].first << ": " << o.detail
                  << " (" << fmt(secs) << " s)\n";
    }
    std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed\n";
    return failures == 0 ? 0 : 1;
}
