#include "commfactor/cli.hpp"

#include <cmath>
#include <fstream>
#include <optional>

#include "CLI11.hpp"
#include "commfactor/io.hpp"

namespace commfactor {

namespace {

struct RunConfig {
    std::string strategy;
    int k = 4;
    int grid = 0;
    std::optional<double> tol;
    std::uint64_t seed = 1;
    std::string out;
    int stages = 6;
    int rank = 64;
};

void emit(const json& j, const RunConfig& cfg, std::ostream& out) {
    if (cfg.out.empty() || cfg.out == "-") {
        out << j.dump(2) << '\n';
        return;
    }
    std::ofstream f(cfg.out);
    if (!f) throw Error(ErrorKind::Parse, "cannot write '" + cfg.out + "'");
    f << j.dump(2) << '\n';
}

int cmd_det(const std::string& input, const RunConfig& cfg, std::istream& in, std::ostream& out) {
    const double tol = cfg.tol.value_or(1e-8);
    const MatrixOrPath x = input_from_json(read_json_file(input, in));
    DhsValue v;
    if (const auto* m = std::get_if<CMatrix>(&x)) {
        v = matrix_determinant_value(*m, normalized_trace(m->rows()));
    } else {
        const auto& p = std::get<MatrixPath>(x);
        const TraceFunctional tau = normalized_trace(p.dim());
        v = reduce_value(path_determinant(p, tau), tau.lattice_step());
    }
    out << to_json(v, tol).dump(2) << '\n';
    return v.is_zero(tol) ? kExitOk : kExitObstruction;
}

int cmd_factor(const std::string& input, const RunConfig& cfg, std::istream& in, std::ostream& out) {
    PipelineOptions opt;
    opt.k = cfg.k;
    if (cfg.tol) opt.refuse_tol = *cfg.tol;
    const MatrixOrPath x = input_from_json(read_json_file(input, in));
    if (const auto* m = std::get_if<CMatrix>(&x)) {
        const Strategy s = parse_strategy(cfg.strategy.empty() ? "paper_ldu" : cfg.strategy);
        emit(to_json(factor_matrix(*m, s, opt)), cfg, out);
    } else {
        MatrixPath p = std::get<MatrixPath>(x);
        if (cfg.grid >= 2) p = resample(p, uniform_grid(cfg.grid));
        const Strategy s = parse_strategy(cfg.strategy.empty() ? "paper" : cfg.strategy);
        emit(to_json(factor_unitary_path(p, s, opt)), cfg, out);
    }
    return kExitOk;
}

struct Check {
    std::string field;
    double stored;
    double recomputed;
    bool ok;
};

std::vector<Check> verify_matrix(const MatrixFactorization& f, const CMatrix& x) {
    const double scale = std::max(1.0, norm2(x));
    CMatrix p = CMatrix::identity(f.dim);
    double dist = 0, det_err = 0;
    for (const auto& pair : f.pairs) {
        const CMatrix c = pair.x * pair.y * inverse(pair.x) * inverse(pair.y);
        det_err = std::max(det_err, std::abs(det(c) - 1.0));
        p = p * c;
        dist = std::max({dist, norm2(pair.x - CMatrix::identity(f.dim)), norm2(pair.y - CMatrix::identity(f.dim))});
    }
    if (f.residual) p = p * *f.residual;
    const double recon = norm2(p - x);
    const auto& c = f.certificate;
    return {
        {"count", double(c.count), double(f.pairs.size()), c.count == static_cast<int>(f.pairs.size())},
        {"recon_err", c.recon_err, recon, std::abs(recon - c.recon_err) <= 1e-9 * scale && recon <= 1e-8 * scale},
        {"max_factor_dist_to_1", c.max_factor_dist_to_1, dist, std::abs(dist - c.max_factor_dist_to_1) <= 1e-9 * (1 + dist)},
        {"commutator_det", 0.0, det_err, det_err <= 1e-9},
    };
}

std::vector<Check> verify_path(const PathFactorization& f, const MatrixPath& u) {
    MatrixPath p = MatrixPath::constant(CMatrix::identity(f.dim), u.grid());
    double dist = 0;
    for (const auto& pair : f.pairs) {
        p = path_multiply(p, path_commutator(pair));
        for (const auto* path : {&pair.x, &pair.y})
            for (const auto& s : path->samples()) dist = std::max(dist, norm2(s - CMatrix::identity(f.dim)));
    }
    if (f.residual) p = path_multiply(p, *f.residual);
    const double recon = sup_distance(p, u);
    const auto& c = f.certificate;
    return {
        {"count", double(c.count), double(f.pairs.size()), c.count == static_cast<int>(f.pairs.size())},
        {"recon_err", c.recon_err, recon, std::abs(recon - c.recon_err) <= 1e-9 && recon <= 1e-5},
        {"max_factor_dist_to_1", c.max_factor_dist_to_1, dist, std::abs(dist - c.max_factor_dist_to_1) <= 1e-9 * (1 + dist)},
    };
}

int cmd_verify(const std::string& fact_path, const std::string& orig_path, std::istream& in, std::ostream& out,
               std::ostream& err) {
    const AnyFactorization f = factorization_from_json(read_json_file(fact_path, in));
    const MatrixOrPath x = input_from_json(read_json_file(orig_path, in));
    std::vector<Check> checks;
    const int fdim = std::visit([](const auto& v) { return v.dim; }, f);
    const int xdim = std::visit([](const auto& v) -> int {
        if constexpr (std::is_same_v<std::decay_t<decltype(v)>, CMatrix>) return v.rows();
        else return v.dim();
    }, x);
    if (fdim != xdim || f.index() != x.index()) {
        checks.push_back({"dim", double(fdim), double(xdim), false});
    } else if (const auto* mf = std::get_if<MatrixFactorization>(&f)) {
        checks = verify_matrix(*mf, std::get<CMatrix>(x));
    } else {
        checks = verify_path(std::get<PathFactorization>(f), std::get<MatrixPath>(x));
    }
    bool ok = true;
    json report = json::array();
    for (const auto& c : checks) {
        ok = ok && c.ok;
        report.push_back({{"field", c.field}, {"stored", c.stored}, {"recomputed", c.recomputed}, {"ok", c.ok}});
        if (!c.ok) err << "mismatch: " << c.field << " stored " << c.stored << " recomputed " << c.recomputed << '\n';
    }
    out << json{{"ok", ok}, {"checks", report}}.dump(2) << '\n';
    return ok ? kExitOk : kExitMismatch;
}

int cmd_descent(const RunConfig& cfg, std::ostream& out) {
    DescentOptions opt;
    opt.stages = cfg.stages;
    opt.rank = cfg.rank;
    opt.seed = cfg.seed;
    const DescentReport r = descent_demo(opt);
    emit(to_json(r), cfg, out);
    return r.cauchy_ok && r.final_recon <= 1e-6 ? kExitOk : kExitNumeric;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
    CLI::App app{"Determinant values and commutator factorizations of matrices and matrix paths", "commfactor"};
    app.fallthrough();
    app.require_subcommand(1);
    RunConfig cfg;
    double tol = 0;
    app.add_option("--strategy", cfg.strategy, "paper_ldu, cyclic, norm_controlled (matrices) or paper, cyclic (paths)")
        ->envname("COMMFACTOR_STRATEGY");
    app.add_option("--k", cfg.k, "block count for the nested splits")->envname("COMMFACTOR_K")->check(CLI::Range(1, 1 << 20));
    app.add_option("--grid", cfg.grid, "resample path inputs to this many uniform points")
        ->envname("COMMFACTOR_GRID")
        ->check(CLI::Range(2, 1 << 20));
    auto* tol_opt = app.add_option("--tol", tol, "determinant triviality tolerance")
                        ->envname("COMMFACTOR_TOL")
                        ->check(CLI::PositiveNumber);
    app.add_option("--seed", cfg.seed, "seed for generated data")->envname("COMMFACTOR_SEED");
    app.add_option("--out", cfg.out, "output file (standard output when absent or '-')")->envname("COMMFACTOR_OUT");

    std::string input, original;
    auto* det = app.add_subcommand("det", "determinant value of a matrix or path");
    det->add_option("input", input, "matrix or path JSON ('-' for standard input)")->required();
    auto* factor = app.add_subcommand("factor", "factor into commutators");
    factor->add_option("input", input, "matrix or path JSON ('-' for standard input)")->required();
    auto* verify = app.add_subcommand("verify", "recompute a factorization certificate");
    verify->add_option("factorization", input, "factorization JSON")->required();
    verify->add_option("original", original, "the factored matrix or path")->required();
    auto* demo = app.add_subcommand("demo-descent", "telescoping descent on orthogonal shells");
    demo->add_option("--stages", cfg.stages, "number of stages")->check(CLI::Range(2, 8));
    demo->add_option("--rank", cfg.rank, "ambient dimension");

    std::vector<std::string> argv_store{"commfactor"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return kExitOk;
        }
        err << e.what() << '\n';
        return kExitParse;
    }
    if (*tol_opt) cfg.tol = tol;

    try {
        if (*det) return cmd_det(input, cfg, in, out);
        if (*factor) return cmd_factor(input, cfg, in, out);
        if (*verify) return cmd_verify(input, original, in, out, err);
        return cmd_descent(cfg, out);
    } catch (const Error& e) {
        err << e.what() << '\n';
        if (e.kind() == ErrorKind::Parse) return kExitParse;
        if (e.kind() == ErrorKind::DeterminantObstruction) return kExitObstruction;
        return kExitNumeric;
    } catch (const json::exception& e) {
        err << e.what() << '\n';
        return kExitParse;
    } catch (const std::exception& e) {
        err << e.what() << '\n';
        return kExitNumeric;
    }
}

}  // namespace commfactor
