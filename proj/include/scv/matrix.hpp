#pragma once

#include <cstddef>
#include <vector>

namespace scv {

// Orientation selector for the two conformal cones and related predicates.
enum class Sign { plus, minus };

/// Dense real n-by-n matrix, row-major storage, value semantics.
/// Dimensions 2 and 3 get closed-form fast paths; larger n is supported for
/// all operations except the fixed-layout minors vector.
struct SquareMatrix {
    int n = 0;
    std::vector<double> a;  // row-major, n*n entries

    SquareMatrix() = default;
    explicit SquareMatrix(int dim)
        : n(dim), a(static_cast<std::size_t>(dim) * dim, 0.0) {}
    SquareMatrix(int dim, std::vector<double> entries);

    double& operator()(int i, int j) {
        return a[static_cast<std::size_t>(i) * n + j];
    }
    double operator()(int i, int j) const {
        return a[static_cast<std::size_t>(i) * n + j];
    }

    static SquareMatrix zero(int dim);
    static SquareMatrix identity(int dim);
    /// diag(1,...,1,-1): the orientation-reversing reference point.
    static SquareMatrix reflected_identity(int dim);
    static SquareMatrix diagonal(const std::vector<double>& d);
};

SquareMatrix operator+(const SquareMatrix& A, const SquareMatrix& B);
SquareMatrix operator-(const SquareMatrix& A, const SquareMatrix& B);
SquareMatrix operator*(const SquareMatrix& A, const SquareMatrix& B);
SquareMatrix operator*(double s, const SquareMatrix& A);

SquareMatrix transpose(const SquareMatrix& A);
double frobenius_norm(const SquareMatrix& A);
double det(const SquareMatrix& A);

/// Cofactor matrix: cof(A) * A^T == det(A) * Id for every A.
SquareMatrix cofactor(const SquareMatrix& A);

/// Inverse via adjugate for n <= 3, LU otherwise. Throws EvalDomainError
/// when the matrix is singular.
SquareMatrix inverse(const SquareMatrix& A);

/// Largest singular value. Closed form for n == 2, cyclic Jacobi on A^T A
/// otherwise.
double operator_norm(const SquareMatrix& A);

/// Eigenvalues of a symmetric matrix, descending. Cyclic Jacobi sweeps;
/// converged when the off-diagonal Frobenius mass drops below 1e-14 * trace.
std::vector<double> symmetric_eigenvalues(SquareMatrix S);

/// Signed singular values lambda_1 >= ... >= lambda_{n-1} >= |lambda_n|
/// with sign(lambda_n) = sign(det), plus partial products
/// sigma_k = lambda_1 * ... * lambda_k (so sigma_n == det).
/// det == 0 yields a non-negative last value.
struct SignedSpectrum {
    std::vector<double> lambda;
    std::vector<double> sigma;
};
SignedSpectrum signed_singular_values(const SquareMatrix& A);

/// Norms of the conformal and anticonformal parts, plus the (t, d)
/// coordinates used by the planar certificate:
///   plus_norm  = (|A|^{n/2} + |A|^{-n/2} det A) / 2
///   minus_norm = (|A|^{n/2} - |A|^{-n/2} det A) / 2
///   t = minus_norm, d = det A.
/// Identities: plus_norm + minus_norm = |A|^{n/2},
/// plus_norm^2 - minus_norm^2 = det A, t^2 + d >= 0.
struct ConformalCoordinates {
    double plus_norm = 0.0;
    double minus_norm = 0.0;
    double t = 0.0;
    double d = 0.0;
};
ConformalCoordinates conformal_coordinates(const SquareMatrix& A);

/// The conformal/anticonformal splitting itself:
///   part^{+/-} = (|A|^{(n-2)/2} A +/- |A|^{(2-n)/2} cof A) / 2.
/// operator_norm(plus) == coords.plus_norm and likewise for minus.
struct ConformalParts {
    SquareMatrix plus;
    SquareMatrix minus;
    ConformalCoordinates coords;
};
ConformalParts conformal_parts(const SquareMatrix& A);

/// True when A lies in the (anti)conformal cone up to tol:
/// cof A == -/+ |A|^{n-2} A within tol * max(1, |A|^{n-1}) in Frobenius
/// norm, and +/- det A >= -tol.
bool is_conformal(const SquareMatrix& A, Sign sign, double tol = 1e-12);

/// Membership in the quasiconformal cone {|A|^n <= +/- K det A}.
bool qco_membership(const SquareMatrix& A, double K, Sign sign);

/// Vector of all minors in the fixed order used by the polyconvexity
/// machinery: the n*n entries of A row-major, then (n == 3 only) the
/// entries of cof(A) row-major, then det(A).
/// Lengths: 5 for n == 2, 19 for n == 3. Other dimensions are rejected.
struct MinorsVector {
    int n = 0;
    std::vector<double> values;
};
MinorsVector minors_vector(const SquareMatrix& A);
std::size_t minors_length(int n);

}  // namespace scv
