#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "commfactor/dhsdet.hpp"
#include "commfactor/factorization.hpp"
#include "commfactor/pathfun.hpp"

namespace commfactor {

enum class Strategy { PaperLdu, Cyclic, NormControlled, Paper };

const char* strategy_name(Strategy s);
// accepts paper_ldu, cyclic, norm_controlled, paper
Strategy parse_strategy(const std::string& name);

struct PipelineOptions {
    // block count for the nested splits; clamped to [2, n]
    int k = 4;
    // residues above refuse_tol are obstructions, those above warn_tol only warn
    double refuse_tol = 1e-6;
    double warn_tol = 1e-8;
    // relative reconstruction requirement
    double recon_tol = 1e-8;
};

struct PolarSplit {
    CMatrix u;
    CMatrix h;
    DhsValue value;
    DhsValue u_value;
    DhsValue h_value;
    // Tr log h
    double trace_log_h = 0;
};

// x = u h; refuses when the determinant value of x is not trivial
PolarSplit polar_split(const CMatrix& x, const PipelineOptions& opt = {});

// (V, P) = z for a diagonalizable z with det 1: P permutes an eigenbasis
// cyclically and V holds the running products of the eigenvalues.
CommutatorPair cyclic_commutator(const CMatrix& z, double tol = 1e-10);

MatrixFactorization factor_matrix(const CMatrix& x, Strategy strategy, const PipelineOptions& opt = {});

// Unitary path with det = 1 pointwise; strategies paper (diagonal route, 4 or
// 16 pairs) or cyclic (one pointwise pair).
PathFactorization factor_unitary_path(const MatrixPath& u, Strategy strategy, const PipelineOptions& opt = {});

struct DescentOptions {
    int stages = 6;
    std::uint64_t seed = 1;
    int rank = 64;
    // |x_n - 1| is this fraction of the schedule bound 1/(100 n^2); 0 gives x_n = 1
    double fill = 0.9;
};

struct DescentStage {
    int shell_rank = 0;
    double schedule_bound = 0;
    double dist_x = 0;
    // c_n = x_n x_{n+1}^{-1}
    double dist_c = 0;
    double factor_dist = 0;
    double factor_bound = 0;
    // |P_n - P_{n-1}| for P_n = c_1 ... c_n
    double increment = 0;
};

struct DescentReport {
    int stages = 0;
    int rank = 0;
    std::vector<DescentStage> stage;
    double schedule_constant = 0.01;
    // max_n n^2 increment_n
    double fitted_constant = 0;
    double final_recon = 0;
    // commutators in the interleaved odd/even products
    int count = 0;
    bool cauchy_ok = false;
};

DescentReport descent_demo(const DescentOptions& opt);

}  // namespace commfactor
