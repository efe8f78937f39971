#include "commfactor/io.hpp"

#include <fstream>
#include <sstream>

namespace commfactor {

namespace {

json entries(const CMatrix& m) {
    json e = json::array();
    for (const cplx& z : m.entries()) e.push_back({z.real(), z.imag()});
    return e;
}

CMatrix matrix_from_entries(int n, const json& e) {
    if (!e.is_array() || static_cast<int>(e.size()) != n * n)
        throw Error(ErrorKind::Parse, "expected " + std::to_string(n * n) + " entries");
    std::vector<cplx> a;
    a.reserve(e.size());
    for (const auto& z : e) {
        if (z.is_number()) {
            a.emplace_back(z.get<double>(), 0.0);
        } else if (z.is_array() && z.size() == 2 && z[0].is_number() && z[1].is_number()) {
            a.emplace_back(z[0].get<double>(), z[1].get<double>());
        } else {
            throw Error(ErrorKind::Parse, "entry must be a number or a [re, im] pair");
        }
    }
    return CMatrix(n, n, std::move(a));
}

int read_dim(const json& j) {
    if (!j.is_object() || !j.contains("dim") || !j["dim"].is_number_integer())
        throw Error(ErrorKind::Parse, "missing integer field 'dim'");
    const int n = j["dim"].get<int>();
    if (n < 1) throw Error(ErrorKind::Parse, "'dim' must be positive");
    return n;
}

template <class T>
T field(const json& j, const char* name) {
    if (!j.contains(name)) throw Error(ErrorKind::Parse, std::string("missing field '") + name + "'");
    try {
        return j[name].get<T>();
    } catch (const json::exception&) {
        throw Error(ErrorKind::Parse, std::string("field '") + name + "' has the wrong type");
    }
}

Certificate certificate_from_json(const json& j) {
    Certificate c;
    c.recon_err = field<double>(j, "recon_err");
    c.max_factor_dist_to_1 = field<double>(j, "max_factor_dist_to_1");
    c.count = field<int>(j, "count");
    if (j.contains("strategy")) c.strategy = field<std::string>(j, "strategy");
    if (j.contains("max_condition")) c.max_condition = field<double>(j, "max_condition");
    if (j.contains("warnings")) c.warnings = field<std::vector<std::string>>(j, "warnings");
    return c;
}

bool is_path_doc(const json& j) { return j.is_object() && j.contains("grid"); }

}  // namespace

json to_json(const CMatrix& m) { return {{"dim", m.rows()}, {"entries", entries(m)}}; }

CMatrix matrix_from_json(const json& j) {
    const int n = read_dim(j);
    if (!j.contains("entries")) throw Error(ErrorKind::Parse, "missing field 'entries'");
    return matrix_from_entries(n, j["entries"]);
}

json to_json(const MatrixPath& p) {
    json samples = json::array();
    for (const auto& s : p.samples()) samples.push_back(entries(s));
    return {{"dim", p.dim()}, {"grid", p.grid()}, {"samples", samples}};
}

MatrixPath path_from_json(const json& j) {
    const int n = read_dim(j);
    const auto grid = field<std::vector<double>>(j, "grid");
    if (!j.contains("samples") || !j["samples"].is_array() || j["samples"].size() != grid.size())
        throw Error(ErrorKind::Parse, "'samples' must hold one matrix per grid point");
    if (grid.size() < 2 || grid.front() != 0.0 || grid.back() != 1.0)
        throw Error(ErrorKind::Parse, "grid must run from 0 to 1 with at least two points");
    for (size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw Error(ErrorKind::Parse, "grid must be strictly increasing");
    std::vector<CMatrix> samples;
    for (const auto& s : j["samples"]) samples.push_back(matrix_from_entries(n, s));
    return MatrixPath(grid, std::move(samples));
}

MatrixOrPath input_from_json(const json& j) {
    if (is_path_doc(j)) return path_from_json(j);
    return matrix_from_json(j);
}

json to_json(const DhsValue& v, double tol) {
    return {{"raw", {v.raw.real(), v.raw.imag()}},
            {"lattice", v.lattice_step},
            {"residue", {v.residue.real(), v.residue.imag()}},
            {"is_zero", v.is_zero(tol)},
            {"tol", tol}};
}

json to_json(const Certificate& c) {
    return {{"recon_err", c.recon_err},
            {"max_factor_dist_to_1", c.max_factor_dist_to_1},
            {"count", c.count},
            {"strategy", c.strategy},
            {"max_condition", c.max_condition},
            {"warnings", c.warnings}};
}

json to_json(const MatrixFactorization& f) {
    json pairs = json::array();
    for (const auto& p : f.pairs) pairs.push_back({{"x", to_json(p.x)}, {"y", to_json(p.y)}});
    json j = {{"kind", "matrix"}, {"dim", f.dim}, {"pairs", pairs}, {"certificate", to_json(f.certificate)}};
    if (f.residual) j["residual"] = to_json(*f.residual);
    return j;
}

json to_json(const PathFactorization& f) {
    json pairs = json::array();
    for (const auto& p : f.pairs) pairs.push_back({{"x", to_json(p.x)}, {"y", to_json(p.y)}});
    json j = {{"kind", "path"}, {"dim", f.dim}, {"pairs", pairs}, {"certificate", to_json(f.certificate)}};
    if (f.residual) j["residual"] = to_json(*f.residual);
    return j;
}

json to_json(const StdFactors& f) {
    return {{"s", to_json(f.s)}, {"t", to_json(f.t)}, {"d", to_json(f.d)}, {"blocks", f.blocks.ranks()}};
}

json to_json(const DescentReport& r) {
    json stages = json::array();
    json schedule = json::array();
    for (size_t n = 0; n < r.stage.size(); ++n) {
        const auto& s = r.stage[n];
        schedule.push_back(s.schedule_bound);
        stages.push_back({{"n", n + 1},
                          {"shell_rank", s.shell_rank},
                          {"dist_x", s.dist_x},
                          {"dist_c", s.dist_c},
                          {"factor_dist", s.factor_dist},
                          {"factor_bound", s.factor_bound},
                          {"increment", s.increment}});
    }
    return {{"strategy", "norm_controlled"},
            {"schedule", schedule},
            {"stages", stages},
            {"rank", r.rank},
            {"schedule_constant", r.schedule_constant},
            {"fitted_constant", r.fitted_constant},
            {"final_recon", r.final_recon},
            {"count", r.count},
            {"cauchy_ok", r.cauchy_ok}};
}

AnyFactorization factorization_from_json(const json& j) {
    const int n = read_dim(j);
    if (!j.contains("pairs") || !j["pairs"].is_array()) throw Error(ErrorKind::Parse, "missing array 'pairs'");
    if (!j.contains("certificate")) throw Error(ErrorKind::Parse, "missing field 'certificate'");
    bool path = j.contains("kind") && j["kind"] == "path";
    if (!j["pairs"].empty()) path = is_path_doc(j["pairs"][0].value("x", json::object()));
    for (const auto& p : j["pairs"])
        if (!p.is_object() || !p.contains("x") || !p.contains("y")) throw Error(ErrorKind::Parse, "pair needs 'x' and 'y'");
    auto check_dim = [n](int d) {
        if (d != n) throw Error(ErrorKind::Parse, "pair dimension differs from 'dim'");
    };
    if (path) {
        PathFactorization f;
        f.dim = n;
        for (const auto& p : j["pairs"]) {
            PathPair pp{path_from_json(p["x"]), path_from_json(p["y"])};
            check_dim(pp.x.dim());
            check_dim(pp.y.dim());
            f.pairs.push_back(std::move(pp));
        }
        if (j.contains("residual")) f.residual = path_from_json(j["residual"]);
        f.certificate = certificate_from_json(j["certificate"]);
        return f;
    }
    MatrixFactorization f;
    f.dim = n;
    for (const auto& p : j["pairs"]) {
        CMatrix x = matrix_from_json(p["x"]), y = matrix_from_json(p["y"]);
        check_dim(x.rows());
        check_dim(y.rows());
        f.pairs.push_back(make_pair(std::move(x), std::move(y)));
    }
    if (j.contains("residual")) f.residual = matrix_from_json(j["residual"]);
    f.certificate = certificate_from_json(j["certificate"]);
    return f;
}

json read_json_file(const std::string& path, std::istream& stdin_stream) {
    std::stringstream buf;
    if (path == "-") {
        buf << stdin_stream.rdbuf();
    } else {
        std::ifstream in(path);
        if (!in) throw Error(ErrorKind::Parse, "cannot open '" + path + "'");
        buf << in.rdbuf();
    }
    try {
        return json::parse(buf.str());
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::Parse, "'" + path + "': " + e.what());
    }
}

}  // namespace commfactor
