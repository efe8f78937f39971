#pragma once

#include <complex>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace commfactor {

using cplx = std::complex<double>;

enum class ErrorKind {
    Parse,
    DimMismatch,
    NotNormal,
    NoConvergence,
    BranchInfeasible,
    NotUnitary,
    Singular,
    NotStructured,
    TrackingAmbiguous,
    SingularSample,
    NonConvergentQuadrature,
    EndpointMismatch,
    OutOfRange,
    NotUnitModulus,
    NonPositive,
    SumNotZero,
    ResolutionTooCoarse,
    RangeViolation,
    BlockSingular,
    SchurConditionViolated,
    NoAdmissibleProjection,
    PreconditionDistance,
    NotUnitriangular,
    IllConditioned,
    DeterminantObstruction,
    StrategyPreconditionViolated,
    ScheduleInfeasible,
};

const char* error_kind_name(ErrorKind k);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what);
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

struct Tolerances {
    double structural = 1e-8;
    // reconstruction checks use recon * (1 + |x|)
    double recon = 1e-9;
};

// Dense complex matrix, row-major. Almost always square; rectangular shapes
// only appear as block views inside the block factorizations.
class CMatrix {
public:
    CMatrix() = default;
    explicit CMatrix(int n) : CMatrix(n, n) {}
    CMatrix(int rows, int cols);
    CMatrix(int rows, int cols, std::vector<cplx> entries);
    CMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

    static CMatrix identity(int n);
    static CMatrix diag(const std::vector<cplx>& d);
    static CMatrix diag_real(const std::vector<double>& d);

    int rows() const { return r_; }
    int cols() const { return c_; }
    int dim() const;
    bool square() const { return r_ == c_; }

    cplx& operator()(int i, int j) { return a_[static_cast<size_t>(i) * c_ + j]; }
    const cplx& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * c_ + j]; }
    const std::vector<cplx>& entries() const { return a_; }

    CMatrix adjoint() const;
    cplx trace() const;
    std::vector<cplx> diagonal() const;

    CMatrix& operator+=(const CMatrix& o);
    CMatrix& operator-=(const CMatrix& o);
    CMatrix& operator*=(cplx s);

    bool is_hermitian(double tol = 1e-8) const;
    bool is_normal(double tol = 1e-8) const;
    bool is_unitary(double tol = 1e-8) const;
    bool is_positive_invertible(double tol = 1e-8) const;
    bool is_projection(double tol = 1e-8) const;

private:
    int r_ = 0;
    int c_ = 0;
    std::vector<cplx> a_;
};

CMatrix operator+(CMatrix a, const CMatrix& b);
CMatrix operator-(CMatrix a, const CMatrix& b);
CMatrix operator*(const CMatrix& a, const CMatrix& b);
CMatrix operator*(cplx s, CMatrix a);
CMatrix operator*(CMatrix a, cplx s);

double norm_fro(const CMatrix& a);
double norm_max(const CMatrix& a);
// spectral norm (largest singular value)
double norm2(const CMatrix& a);
double dist_to_identity(const CMatrix& a);
double smallest_singular_value(const CMatrix& a);
std::vector<double> singular_values(const CMatrix& a);

CMatrix inverse(const CMatrix& a);
CMatrix solve(const CMatrix& a, const CMatrix& b);
cplx det(const CMatrix& a);
CMatrix expm(const CMatrix& a);

CMatrix block(const CMatrix& a, int r0, int c0, int rows, int cols);
void set_block(CMatrix& a, int r0, int c0, const CMatrix& b);
CMatrix direct_sum(const CMatrix& a, const CMatrix& b);
// embeds a k×k matrix into the coordinates `idx` of an identity of size n
CMatrix embed(const CMatrix& a, const std::vector<int>& idx, int n);
CMatrix permutation_matrix(const std::vector<int>& perm);

struct SchurForm {
    CMatrix q;  // unitary
    CMatrix t;  // upper triangular, a = q t q*
    int iterations = 0;
};
SchurForm schur(const CMatrix& a);

struct EigenDecomposition {
    std::vector<cplx> values;
    CMatrix vectors;  // unitary, columns in the order of `values`
};
// Hermitian input: ascending real order. Otherwise by principal argument in
// (-pi, pi], ties by imaginary part, then by original position.
EigenDecomposition eig_normal(const CMatrix& x, double tol = 1e-8);
EigenDecomposition eig_hermitian(const CMatrix& x, double tol = 1e-8);

CMatrix reconstruct(const EigenDecomposition& e);
CMatrix hermitian_function(const CMatrix& h, double (*f)(double));

CMatrix log_unitary(const CMatrix& u, double target_sum, double tol = 1e-8);
CMatrix exp_i_hermitian(const CMatrix& a);

struct Polar {
    CMatrix u;
    CMatrix h;
};
Polar polar(const CMatrix& x, double tol = 1e-12);
double dist_to_unitaries(const CMatrix& x);

CMatrix commutator(const CMatrix& x, const CMatrix& y);

struct Projection {
    CMatrix matrix;
    int rank = 0;
    // unitary whose first `rank` columns span the range
    CMatrix frame;
};
Projection make_projection(const CMatrix& frame, int rank);
Projection projection_from_matrix(const CMatrix& p, double tol = 1e-8);
bool equivalent(const Projection& p, const Projection& q);

struct BlockDecomposition {
    std::vector<Projection> blocks;
    int total_dim = 0;
    // columns grouped block by block
    CMatrix frame;

    std::vector<int> ranks() const;
    std::vector<int> offsets() const;
    bool valid(double tol = 1e-8) const;
};
BlockDecomposition make_block_decomposition(const CMatrix& frame, const std::vector<int>& ranks);

}  // namespace commfactor
