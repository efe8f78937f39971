#include "commfactor/matcore.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace commfactor {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

void require_same_shape(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw Error(ErrorKind::DimMismatch, "matrix shapes differ");
}

void require_square(const CMatrix& a) {
    if (!a.square()) throw Error(ErrorKind::DimMismatch, "square matrix required");
}

// principal argument in (-pi, pi]
double principal_arg(cplx z) {
    double t = std::arg(z);
    if (t <= -std::numbers::pi) t = std::numbers::pi;
    return t;
}

}  // namespace

const char* error_kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::Parse: return "Parse";
        case ErrorKind::DimMismatch: return "DimMismatch";
        case ErrorKind::NotNormal: return "NotNormal";
        case ErrorKind::NoConvergence: return "NoConvergence";
        case ErrorKind::BranchInfeasible: return "BranchInfeasible";
        case ErrorKind::NotUnitary: return "NotUnitary";
        case ErrorKind::Singular: return "Singular";
        case ErrorKind::NotStructured: return "NotStructured";
        case ErrorKind::TrackingAmbiguous: return "TrackingAmbiguous";
        case ErrorKind::SingularSample: return "SingularSample";
        case ErrorKind::NonConvergentQuadrature: return "NonConvergentQuadrature";
        case ErrorKind::EndpointMismatch: return "EndpointMismatch";
        case ErrorKind::OutOfRange: return "OutOfRange";
        case ErrorKind::NotUnitModulus: return "NotUnitModulus";
        case ErrorKind::NonPositive: return "NonPositive";
        case ErrorKind::SumNotZero: return "SumNotZero";
        case ErrorKind::ResolutionTooCoarse: return "ResolutionTooCoarse";
        case ErrorKind::RangeViolation: return "RangeViolation";
        case ErrorKind::BlockSingular: return "BlockSingular";
        case ErrorKind::SchurConditionViolated: return "SchurConditionViolated";
        case ErrorKind::NoAdmissibleProjection: return "NoAdmissibleProjection";
        case ErrorKind::PreconditionDistance: return "PreconditionDistance";
        case ErrorKind::NotUnitriangular: return "NotUnitriangular";
        case ErrorKind::IllConditioned: return "IllConditioned";
        case ErrorKind::DeterminantObstruction: return "DeterminantObstruction";
        case ErrorKind::StrategyPreconditionViolated: return "StrategyPreconditionViolated";
        case ErrorKind::ScheduleInfeasible: return "ScheduleInfeasible";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind) {}

// ---------------------------------------------------------------- CMatrix

CMatrix::CMatrix(int rows, int cols) : r_(rows), c_(cols), a_(static_cast<size_t>(rows) * cols) {
    if (rows < 0 || cols < 0) throw Error(ErrorKind::DimMismatch, "negative dimension");
}

CMatrix::CMatrix(int rows, int cols, std::vector<cplx> entries)
    : r_(rows), c_(cols), a_(std::move(entries)) {
    if (a_.size() != static_cast<size_t>(rows) * cols)
        throw Error(ErrorKind::DimMismatch, "entry count does not match shape");
}

CMatrix::CMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
    r_ = static_cast<int>(rows.size());
    c_ = r_ == 0 ? 0 : static_cast<int>(rows.begin()->size());
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != c_) throw Error(ErrorKind::DimMismatch, "ragged rows");
        a_.insert(a_.end(), row.begin(), row.end());
    }
}

CMatrix CMatrix::identity(int n) {
    CMatrix m(n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

CMatrix CMatrix::diag(const std::vector<cplx>& d) {
    CMatrix m(static_cast<int>(d.size()));
    for (size_t i = 0; i < d.size(); ++i) m(static_cast<int>(i), static_cast<int>(i)) = d[i];
    return m;
}

CMatrix CMatrix::diag_real(const std::vector<double>& d) {
    return diag(std::vector<cplx>(d.begin(), d.end()));
}

int CMatrix::dim() const {
    if (r_ != c_) throw Error(ErrorKind::DimMismatch, "dim() of a rectangular matrix");
    return r_;
}

CMatrix CMatrix::adjoint() const {
    CMatrix m(c_, r_);
    for (int i = 0; i < r_; ++i)
        for (int j = 0; j < c_; ++j) m(j, i) = std::conj((*this)(i, j));
    return m;
}

cplx CMatrix::trace() const {
    cplx s = 0;
    for (int i = 0; i < std::min(r_, c_); ++i) s += (*this)(i, i);
    return s;
}

std::vector<cplx> CMatrix::diagonal() const {
    std::vector<cplx> d(std::min(r_, c_));
    for (size_t i = 0; i < d.size(); ++i) d[i] = (*this)(static_cast<int>(i), static_cast<int>(i));
    return d;
}

CMatrix& CMatrix::operator+=(const CMatrix& o) {
    require_same_shape(*this, o);
    for (size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& o) {
    require_same_shape(*this, o);
    for (size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
    return *this;
}

CMatrix& CMatrix::operator*=(cplx s) {
    for (auto& v : a_) v *= s;
    return *this;
}

bool CMatrix::is_hermitian(double tol) const {
    if (!square()) return false;
    return norm2(*this - adjoint()) <= tol * std::max(1.0, norm_max(*this));
}

bool CMatrix::is_normal(double tol) const {
    if (!square()) return false;
    const CMatrix h = adjoint();
    const double s = norm_fro(*this);
    return norm_fro((*this) * h - h * (*this)) <= tol * std::max(1.0, s * s);
}

bool CMatrix::is_unitary(double tol) const {
    if (!square()) return false;
    return norm2(adjoint() * (*this) - identity(r_)) <= tol;
}

bool CMatrix::is_positive_invertible(double tol) const {
    if (!is_hermitian(tol)) return false;
    const auto e = eig_hermitian(*this, std::max(tol, 1e-8));
    return e.values.front().real() > tol;
}

bool CMatrix::is_projection(double tol) const {
    if (!square()) return false;
    return norm2((*this) * (*this) - (*this)) + norm2((*this) - adjoint()) <= tol;
}

CMatrix operator+(CMatrix a, const CMatrix& b) { return a += b; }
CMatrix operator-(CMatrix a, const CMatrix& b) { return a -= b; }

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
    if (a.cols() != b.rows()) throw Error(ErrorKind::DimMismatch, "product shapes differ");
    CMatrix c(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int k = 0; k < a.cols(); ++k) {
            const cplx aik = a(i, k);
            if (aik == cplx(0.0)) continue;
            for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

CMatrix operator*(cplx s, CMatrix a) { return a *= s; }
CMatrix operator*(CMatrix a, cplx s) { return a *= s; }

// ---------------------------------------------------------------- norms

double norm_fro(const CMatrix& a) {
    double s = 0;
    for (const auto& v : a.entries()) s += std::norm(v);
    return std::sqrt(s);
}

double norm_max(const CMatrix& a) {
    double m = 0;
    for (const auto& v : a.entries()) m = std::max(m, std::abs(v));
    return m;
}

std::vector<double> singular_values(const CMatrix& a) {
    const CMatrix g = a.adjoint() * a;
    const auto e = eig_hermitian(g, 1e-6);
    std::vector<double> s;
    for (auto it = e.values.rbegin(); it != e.values.rend(); ++it) s.push_back(std::sqrt(std::max(0.0, it->real())));
    return s;
}

double norm2(const CMatrix& a) {
    if (a.rows() == 0 || a.cols() == 0) return 0.0;
    if (a.rows() == 1 || a.cols() == 1) return norm_fro(a);
    const double scale = norm_max(a);
    if (scale == 0.0) return 0.0;
    const CMatrix b = (1.0 / scale) * a;
    return scale * singular_values(b).front();
}

double dist_to_identity(const CMatrix& a) { return norm2(a - CMatrix::identity(a.dim())); }

double smallest_singular_value(const CMatrix& a) {
    const double scale = norm_max(a);
    if (scale == 0.0) return 0.0;
    return scale * singular_values((1.0 / scale) * a).back();
}

// ---------------------------------------------------------------- LU

namespace {

struct LU {
    CMatrix lu;
    std::vector<int> piv;
    int sign = 1;
};

LU lu_factor(const CMatrix& a) {
    require_square(a);
    const int n = a.rows();
    LU f{a, std::vector<int>(n), 1};
    std::iota(f.piv.begin(), f.piv.end(), 0);
    const double scale = std::max(norm_max(a), std::numeric_limits<double>::min());
    CMatrix& m = f.lu;
    for (int k = 0; k < n; ++k) {
        int p = k;
        for (int i = k + 1; i < n; ++i)
            if (std::abs(m(i, k)) > std::abs(m(p, k))) p = i;
        if (std::abs(m(p, k)) <= 8 * n * kEps * scale) throw Error(ErrorKind::Singular, "matrix is numerically singular");
        if (p != k) {
            for (int j = 0; j < n; ++j) std::swap(m(k, j), m(p, j));
            std::swap(f.piv[k], f.piv[p]);
            f.sign = -f.sign;
        }
        for (int i = k + 1; i < n; ++i) {
            m(i, k) /= m(k, k);
            const cplx l = m(i, k);
            if (l == cplx(0.0)) continue;
            for (int j = k + 1; j < n; ++j) m(i, j) -= l * m(k, j);
        }
    }
    return f;
}

CMatrix lu_solve(const LU& f, const CMatrix& b) {
    const int n = f.lu.rows();
    CMatrix x(n, b.cols());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < b.cols(); ++j) x(i, j) = b(f.piv[i], j);
    for (int j = 0; j < b.cols(); ++j) {
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < i; ++k) x(i, j) -= f.lu(i, k) * x(k, j);
        for (int i = n - 1; i >= 0; --i) {
            for (int k = i + 1; k < n; ++k) x(i, j) -= f.lu(i, k) * x(k, j);
            x(i, j) /= f.lu(i, i);
        }
    }
    return x;
}

}  // namespace

CMatrix solve(const CMatrix& a, const CMatrix& b) {
    if (a.rows() != b.rows()) throw Error(ErrorKind::DimMismatch, "solve shapes differ");
    return lu_solve(lu_factor(a), b);
}

CMatrix inverse(const CMatrix& a) { return solve(a, CMatrix::identity(a.dim())); }

cplx det(const CMatrix& a) {
    require_square(a);
    if (a.rows() == 0) return 1.0;
    LU f;
    try {
        f = lu_factor(a);
    } catch (const Error&) {
        return 0.0;
    }
    cplx d = static_cast<double>(f.sign);
    for (int i = 0; i < a.rows(); ++i) d *= f.lu(i, i);
    return d;
}

CMatrix expm(const CMatrix& a) {
    require_square(a);
    const int n = a.rows();
    double norm1 = 0;
    for (int j = 0; j < n; ++j) {
        double s = 0;
        for (int i = 0; i < n; ++i) s += std::abs(a(i, j));
        norm1 = std::max(norm1, s);
    }
    int squarings = 0;
    if (norm1 > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm1 / 0.5)));
    const CMatrix b = std::ldexp(1.0, -squarings) * a;
    CMatrix result = CMatrix::identity(n);
    CMatrix term = CMatrix::identity(n);
    for (int k = 1; k <= 30; ++k) {
        term = (1.0 / k) * (term * b);
        result += term;
        if (norm_max(term) < 1e-18) break;
    }
    for (int s = 0; s < squarings; ++s) result = result * result;
    return result;
}

// ---------------------------------------------------------------- blocks

CMatrix block(const CMatrix& a, int r0, int c0, int rows, int cols) {
    if (r0 < 0 || c0 < 0 || r0 + rows > a.rows() || c0 + cols > a.cols())
        throw Error(ErrorKind::DimMismatch, "block out of range");
    CMatrix b(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) b(i, j) = a(r0 + i, c0 + j);
    return b;
}

void set_block(CMatrix& a, int r0, int c0, const CMatrix& b) {
    if (r0 < 0 || c0 < 0 || r0 + b.rows() > a.rows() || c0 + b.cols() > a.cols())
        throw Error(ErrorKind::DimMismatch, "block out of range");
    for (int i = 0; i < b.rows(); ++i)
        for (int j = 0; j < b.cols(); ++j) a(r0 + i, c0 + j) = b(i, j);
}

CMatrix direct_sum(const CMatrix& a, const CMatrix& b) {
    CMatrix m(a.rows() + b.rows(), a.cols() + b.cols());
    set_block(m, 0, 0, a);
    set_block(m, a.rows(), a.cols(), b);
    return m;
}

CMatrix embed(const CMatrix& a, const std::vector<int>& idx, int n) {
    if (a.rows() != static_cast<int>(idx.size()) || !a.square())
        throw Error(ErrorKind::DimMismatch, "embed index count");
    CMatrix m = CMatrix::identity(n);
    for (size_t i = 0; i < idx.size(); ++i)
        for (size_t j = 0; j < idx.size(); ++j) m(idx[i], idx[j]) = a(static_cast<int>(i), static_cast<int>(j));
    return m;
}

CMatrix permutation_matrix(const std::vector<int>& perm) {
    const int n = static_cast<int>(perm.size());
    CMatrix p(n);
    for (int j = 0; j < n; ++j) p(perm[j], j) = 1.0;
    return p;
}

// ---------------------------------------------------------------- Schur

namespace {

// Householder reduction to upper Hessenberg form; accumulates q.
void hessenberg(CMatrix& h, CMatrix& q) {
    const int n = h.rows();
    std::vector<cplx> v(n);
    for (int k = 0; k + 2 < n; ++k) {
        double xnorm = 0;
        for (int i = k + 1; i < n; ++i) xnorm += std::norm(h(i, k));
        xnorm = std::sqrt(xnorm);
        if (xnorm == 0.0) continue;
        const cplx x0 = h(k + 1, k);
        const cplx phase = std::abs(x0) == 0.0 ? cplx(1.0) : x0 / std::abs(x0);
        const cplx alpha = -phase * xnorm;
        double vnorm = 0;
        for (int i = k + 1; i < n; ++i) {
            v[i] = h(i, k);
            if (i == k + 1) v[i] -= alpha;
            vnorm += std::norm(v[i]);
        }
        vnorm = std::sqrt(vnorm);
        if (vnorm == 0.0) continue;
        for (int i = k + 1; i < n; ++i) v[i] /= vnorm;
        // h <- (I - 2vv*) h
        for (int j = 0; j < n; ++j) {
            cplx s = 0;
            for (int i = k + 1; i < n; ++i) s += std::conj(v[i]) * h(i, j);
            s *= 2.0;
            for (int i = k + 1; i < n; ++i) h(i, j) -= v[i] * s;
        }
        // h <- h (I - 2vv*), q <- q (I - 2vv*)
        for (int i = 0; i < n; ++i) {
            cplx s = 0, t = 0;
            for (int j = k + 1; j < n; ++j) {
                s += h(i, j) * v[j];
                t += q(i, j) * v[j];
            }
            s *= 2.0;
            t *= 2.0;
            for (int j = k + 1; j < n; ++j) {
                h(i, j) -= s * std::conj(v[j]);
                q(i, j) -= t * std::conj(v[j]);
            }
        }
        for (int i = k + 2; i < n; ++i) h(i, k) = 0.0;
        h(k + 1, k) = alpha;
    }
}

struct Givens {
    double c;
    cplx s;
};

// G = [[c, s], [-conj(s), c]] maps (a, b) to (r, 0)
Givens make_givens(cplx a, cplx b) {
    const double aa = std::abs(a), bb = std::abs(b);
    if (bb == 0.0) return {1.0, 0.0};
    if (aa == 0.0) return {0.0, std::conj(b) / bb};
    const double r = std::hypot(aa, bb);
    return {aa / r, (a / aa) * std::conj(b) / r};
}

}  // namespace

SchurForm schur(const CMatrix& a) {
    require_square(a);
    const int n = a.rows();
    SchurForm f{CMatrix::identity(n), a, 0};
    if (n <= 1) return f;
    CMatrix& t = f.t;
    CMatrix& q = f.q;
    hessenberg(t, q);
    const double anorm = std::max(norm_fro(a), std::numeric_limits<double>::min());
    const double small = kEps * anorm * 1e-3;
    int hi = n - 1;
    int since_deflation = 0;
    const int max_iter = 60 * n;
    std::vector<Givens> rot(n);
    while (hi > 0) {
        int lo = hi;
        while (lo > 0) {
            const double sub = std::abs(t(lo, lo - 1));
            const double ref = std::abs(t(lo, lo)) + std::abs(t(lo - 1, lo - 1));
            if (sub <= kEps * ref || sub <= small) {
                t(lo, lo - 1) = 0.0;
                break;
            }
            --lo;
        }
        if (lo == hi) {
            --hi;
            since_deflation = 0;
            continue;
        }
        if (++f.iterations > max_iter)
            throw Error(ErrorKind::NoConvergence, "QR iteration stalled after " + std::to_string(f.iterations) + " iterations");
        ++since_deflation;
        cplx mu;
        if (since_deflation % 11 == 10) {
            mu = t(hi, hi) + 0.75 * std::abs(t(hi, hi - 1));
        } else {
            const cplx aa = t(hi - 1, hi - 1), bb = t(hi - 1, hi), cc = t(hi, hi - 1), dd = t(hi, hi);
            const cplx p = 0.5 * (aa - dd);
            cplx disc = std::sqrt(p * p + bb * cc);
            if (std::abs(p + disc) < std::abs(p - disc)) disc = -disc;
            mu = (std::abs(p + disc) == 0.0) ? dd : dd - bb * cc / (p + disc);
        }
        for (int i = lo; i <= hi; ++i) t(i, i) -= mu;
        for (int k = lo; k < hi; ++k) {
            const Givens g = make_givens(t(k, k), t(k + 1, k));
            rot[k] = g;
            for (int j = k; j < n; ++j) {
                const cplx x = t(k, j), y = t(k + 1, j);
                t(k, j) = g.c * x + g.s * y;
                t(k + 1, j) = -std::conj(g.s) * x + g.c * y;
            }
        }
        for (int k = lo; k < hi; ++k) {
            const Givens g = rot[k];
            const int last = std::min(k + 2, hi);
            for (int i = 0; i <= last; ++i) {
                const cplx x = t(i, k), y = t(i, k + 1);
                t(i, k) = g.c * x + std::conj(g.s) * y;
                t(i, k + 1) = -g.s * x + g.c * y;
            }
            for (int i = 0; i < n; ++i) {
                const cplx x = q(i, k), y = q(i, k + 1);
                q(i, k) = g.c * x + std::conj(g.s) * y;
                q(i, k + 1) = -g.s * x + g.c * y;
            }
        }
        for (int i = lo; i <= hi; ++i) t(i, i) += mu;
    }
    for (int i = 1; i < n; ++i)
        for (int j = 0; j < i; ++j) t(i, j) = 0.0;
    return f;
}

// ---------------------------------------------------------------- eigen

namespace {

EigenDecomposition sorted_decomposition(const SchurForm& s, bool hermitian) {
    const int n = s.t.rows();
    std::vector<cplx> vals = s.t.diagonal();
    if (hermitian)
        for (auto& v : vals) v = v.real();
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    if (hermitian) {
        std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return vals[i].real() < vals[j].real(); });
    } else {
        std::stable_sort(order.begin(), order.end(), [&](int i, int j) {
            const double ai = principal_arg(vals[i]), aj = principal_arg(vals[j]);
            if (ai != aj) return ai < aj;
            if (vals[i].imag() != vals[j].imag()) return vals[i].imag() < vals[j].imag();
            return i < j;
        });
    }
    EigenDecomposition e{std::vector<cplx>(n), CMatrix(n)};
    for (int k = 0; k < n; ++k) {
        e.values[k] = vals[order[k]];
        for (int i = 0; i < n; ++i) e.vectors(i, k) = s.q(i, order[k]);
    }
    return e;
}

}  // namespace

EigenDecomposition eig_normal(const CMatrix& x, double tol) {
    require_square(x);
    if (!x.is_normal(tol)) throw Error(ErrorKind::NotNormal, "input fails the normality check");
    const bool herm = norm_fro(x - x.adjoint()) <= tol * std::max(1.0, norm_fro(x));
    return sorted_decomposition(schur(x), herm);
}

EigenDecomposition eig_hermitian(const CMatrix& x, double tol) {
    require_square(x);
    const CMatrix h = 0.5 * (x + x.adjoint());
    if (norm_fro(x - h) > tol * std::max(1.0, norm_fro(x))) throw Error(ErrorKind::NotNormal, "input is not Hermitian");
    return sorted_decomposition(schur(h), true);
}

CMatrix reconstruct(const EigenDecomposition& e) {
    return e.vectors * CMatrix::diag(e.values) * e.vectors.adjoint();
}

CMatrix hermitian_function(const CMatrix& h, double (*f)(double)) {
    const auto e = eig_hermitian(h);
    std::vector<cplx> d;
    for (const auto& v : e.values) d.emplace_back(f(v.real()));
    return e.vectors * CMatrix::diag(d) * e.vectors.adjoint();
}

CMatrix log_unitary(const CMatrix& u, double target_sum, double tol) {
    require_square(u);
    if (!u.is_unitary(tol)) throw Error(ErrorKind::NotUnitary, "log_unitary needs a unitary");
    const int n = u.rows();
    if (std::abs(std::exp(cplx(0.0, target_sum)) - det(u)) > std::max(tol, 1e-9 * n))
        throw Error(ErrorKind::BranchInfeasible, "exp(i target) differs from det(u)");
    const auto e = eig_normal(u, tol);
    std::vector<double> theta(n);
    double sum = 0;
    for (int k = 0; k < n; ++k) sum += theta[k] = principal_arg(e.values[k]);
    long shifts = std::lround((target_sum - sum) / (2 * std::numbers::pi));
    // raise the lowest angles or lower the highest ones, cycling if needed
    for (long s = 0; s < std::labs(shifts); ++s) {
        const int k = static_cast<int>(s % n);
        if (shifts > 0)
            theta[k] += 2 * std::numbers::pi;
        else
            theta[n - 1 - k] -= 2 * std::numbers::pi;
    }
    return e.vectors * CMatrix::diag_real(theta) * e.vectors.adjoint();
}

CMatrix exp_i_hermitian(const CMatrix& a) {
    const auto e = eig_hermitian(a, 1e-6);
    std::vector<cplx> d;
    for (const auto& v : e.values) d.push_back(std::exp(cplx(0.0, v.real())));
    return e.vectors * CMatrix::diag(d) * e.vectors.adjoint();
}

// ---------------------------------------------------------------- polar

Polar polar(const CMatrix& x, double tol) {
    require_square(x);
    const int n = x.rows();
    if (n == 0) return {x, x};
    const double scale = norm_max(x);
    if (scale == 0.0 || smallest_singular_value(x) <= tol * scale)
        throw Error(ErrorKind::Singular, "polar decomposition of a singular matrix");
    // scaled Newton iteration for the unitary factor
    CMatrix xk = x;
    bool scaled = true;
    for (int it = 0; it < 100; ++it) {
        const CMatrix inv_adj = inverse(xk).adjoint();
        double gamma = 1.0;
        if (scaled) {
            gamma = std::sqrt(norm_fro(inv_adj) / norm_fro(xk));
            if (std::abs(gamma - 1.0) < 1e-2) scaled = false;
        }
        CMatrix next = 0.5 * (gamma * xk + (1.0 / gamma) * inv_adj);
        const double change = norm_fro(next - xk);
        xk = std::move(next);
        if (!scaled && change <= 1e-13 * std::sqrt(static_cast<double>(n))) break;
    }
    Polar p;
    p.u = xk;
    CMatrix h = xk.adjoint() * x;
    p.h = 0.5 * (h + h.adjoint());
    return p;
}

double dist_to_unitaries(const CMatrix& x) {
    double d = 0;
    for (double s : singular_values(x)) d = std::max(d, std::abs(s - 1.0));
    return d;
}

CMatrix commutator(const CMatrix& x, const CMatrix& y) {
    return x * y * inverse(x) * inverse(y);
}

// ---------------------------------------------------------------- projections

Projection make_projection(const CMatrix& frame, int rank) {
    const int n = frame.dim();
    if (rank < 0 || rank > n) throw Error(ErrorKind::DimMismatch, "projection rank out of range");
    const CMatrix f = block(frame, 0, 0, n, rank);
    return {f * f.adjoint(), rank, frame};
}

Projection projection_from_matrix(const CMatrix& p, double tol) {
    if (!p.is_projection(tol)) throw Error(ErrorKind::NotStructured, "not a projection");
    const auto e = eig_hermitian(p, tol);
    const int n = p.dim();
    CMatrix frame(n);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i) frame(i, k) = e.vectors(i, n - 1 - k);
    const int rank = static_cast<int>(std::lround(p.trace().real()));
    return {p, rank, frame};
}

bool equivalent(const Projection& p, const Projection& q) { return p.rank == q.rank; }

std::vector<int> BlockDecomposition::ranks() const {
    std::vector<int> r;
    for (const auto& b : blocks) r.push_back(b.rank);
    return r;
}

std::vector<int> BlockDecomposition::offsets() const {
    std::vector<int> o{0};
    for (const auto& b : blocks) o.push_back(o.back() + b.rank);
    return o;
}

bool BlockDecomposition::valid(double tol) const {
    int sum = 0;
    for (size_t i = 0; i < blocks.size(); ++i) {
        sum += blocks[i].rank;
        for (size_t j = i + 1; j < blocks.size(); ++j)
            if (norm2(blocks[i].matrix * blocks[j].matrix) > tol) return false;
    }
    return sum == total_dim;
}

BlockDecomposition make_block_decomposition(const CMatrix& frame, const std::vector<int>& ranks) {
    const int n = frame.dim();
    BlockDecomposition d;
    d.total_dim = n;
    d.frame = frame;
    int off = 0;
    for (int r : ranks) {
        if (r <= 0 || off + r > n) throw Error(ErrorKind::DimMismatch, "block ranks do not fit");
        const CMatrix f = block(frame, 0, off, n, r);
        d.blocks.push_back({f * f.adjoint(), r, CMatrix()});
        off += r;
    }
    if (off != n) throw Error(ErrorKind::DimMismatch, "block ranks must sum to the dimension");
    return d;
}

}  // namespace commfactor
