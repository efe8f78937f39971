#pragma once

#include <functional>
#include <vector>

#include "commfactor/matcore.hpp"

namespace commfactor {

std::vector<double> uniform_grid(int points);
// sorted union; points closer than 1e-14 are merged
std::vector<double> merge_grids(const std::vector<double>& a, const std::vector<double>& b);
// inserts every midpoint
std::vector<double> refine_grid(const std::vector<double>& g);

// Sampled matrix function on [0,1], piecewise linear in the entries.
class MatrixPath {
public:
    MatrixPath() = default;
    MatrixPath(std::vector<double> grid, std::vector<CMatrix> samples);

    static MatrixPath constant(const CMatrix& x, const std::vector<double>& grid);
    static MatrixPath sample(const std::function<CMatrix(double)>& f, const std::vector<double>& grid);

    int dim() const { return samples_.empty() ? 0 : samples_.front().rows(); }
    size_t size() const { return grid_.size(); }
    const std::vector<double>& grid() const { return grid_; }
    const std::vector<CMatrix>& samples() const { return samples_; }
    const CMatrix& operator[](size_t i) const { return samples_[i]; }
    CMatrix& operator[](size_t i) { return samples_[i]; }

    CMatrix at(double s) const;
    // derivative of the interpolant on segment i
    CMatrix slope(size_t i) const;

    bool is_unitary_valued(double tol = 1e-8) const;
    bool is_hermitian_valued(double tol = 1e-8) const;
    bool is_invertible_valued(double tol = 1e-8) const;

private:
    std::vector<double> grid_;
    std::vector<CMatrix> samples_;
};

MatrixPath resample(const MatrixPath& a, const std::vector<double>& grid);
MatrixPath map_path(const MatrixPath& a, const std::function<CMatrix(const CMatrix&)>& f);
MatrixPath path_adjoint(const MatrixPath& a);
MatrixPath path_multiply(const MatrixPath& a, const MatrixPath& b);
// a on [0,1/2] then b on [1/2,1]; requires a(1) = b(0)
MatrixPath concatenate(const MatrixPath& a, const MatrixPath& b);

// Max over the union grid of the operator-norm distance. This is a lower
// bound for the sup norm of the interpolated difference.
double sup_distance(const MatrixPath& a, const MatrixPath& b);

struct RefinedDistance {
    double value = 0;
    int points = 0;
    bool converged = false;
};
// Samples two functions on doubling grids until successive maxima agree.
RefinedDistance refined_sup_distance(const std::function<CMatrix(double)>& a,
                                     const std::function<CMatrix(double)>& b, int start_points = 257,
                                     int max_points = 4097, double agree = 1e-7);

enum class SpectrumKind { Unitary, SelfAdjoint };

// values[i][k] is the k-th function at grid point i, ascending in k.
struct EigenFunctions {
    int dim = 0;
    std::vector<double> grid;
    std::vector<std::vector<double>> values;

    std::vector<double> row(int k) const;
    double max_jump() const;
    std::vector<double> sums() const;
};

struct TrackedSpectrum {
    EigenFunctions phi;
    // column k of frame(s) is the eigenvector of phi_k(s)
    MatrixPath frame;
};

TrackedSpectrum track_eigenfunctions(const MatrixPath& u, SpectrumKind kind, double tol = 1e-8);

// diag(e^{i phi}) or diag(e^{phi}) as a path
MatrixPath diagonal_path(const EigenFunctions& phi, bool imaginary = true);
// q diag(e^{i phi}) q* (unitary) or q diag(phi) q* (self-adjoint)
MatrixPath reassemble(const TrackedSpectrum& t, SpectrumKind kind);

// minimal-cost perfect matching; result[row] = column
std::vector<int> min_cost_assignment(const std::vector<std::vector<double>>& cost);

}  // namespace commfactor
