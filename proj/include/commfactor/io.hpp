#pragma once

#include <iostream>
#include <string>
#include <variant>

#include "commfactor/blocklu.hpp"
#include "commfactor/dhsdet.hpp"
#include "commfactor/factorization.hpp"
#include "commfactor/pipeline.hpp"
#include "json.hpp"

namespace commfactor {

using json = nlohmann::json;

// {"dim": n, "entries": [[re, im], ...]} row-major
json to_json(const CMatrix& m);
CMatrix matrix_from_json(const json& j);

// {"dim": n, "grid": [...], "samples": [matrix entries, ...]}
json to_json(const MatrixPath& p);
MatrixPath path_from_json(const json& j);

using MatrixOrPath = std::variant<CMatrix, MatrixPath>;
// a path when the document carries a grid
MatrixOrPath input_from_json(const json& j);

json to_json(const DhsValue& v, double tol);
json to_json(const Certificate& c);
json to_json(const MatrixFactorization& f);
json to_json(const PathFactorization& f);
json to_json(const StdFactors& f);
json to_json(const DescentReport& r);

// either factorization kind, decided by the pair entries (or "kind" when empty)
using AnyFactorization = std::variant<MatrixFactorization, PathFactorization>;
AnyFactorization factorization_from_json(const json& j);

// reads a file, or standard input for "-"; throws Parse errors
json read_json_file(const std::string& path, std::istream& stdin_stream = std::cin);

}  // namespace commfactor
