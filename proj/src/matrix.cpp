#include "scv/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <utility>

#include "scv/errors.hpp"

namespace scv {

SquareMatrix::SquareMatrix(int dim, std::vector<double> entries)
    : n(dim), a(std::move(entries)) {
    if (n < 1 || a.size() != static_cast<std::size_t>(n) * n) {
        throw PreconditionError("SquareMatrix: entry count does not match dimension");
    }
}

SquareMatrix SquareMatrix::zero(int dim) { return SquareMatrix(dim); }

SquareMatrix SquareMatrix::identity(int dim) {
    SquareMatrix m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

SquareMatrix SquareMatrix::reflected_identity(int dim) {
    SquareMatrix m = identity(dim);
    m(dim - 1, dim - 1) = -1.0;
    return m;
}

SquareMatrix SquareMatrix::diagonal(const std::vector<double>& d) {
    SquareMatrix m(static_cast<int>(d.size()));
    for (int i = 0; i < m.n; ++i) m(i, i) = d[static_cast<std::size_t>(i)];
    return m;
}

SquareMatrix operator+(const SquareMatrix& A, const SquareMatrix& B) {
    SquareMatrix r(A.n);
    for (std::size_t k = 0; k < r.a.size(); ++k) r.a[k] = A.a[k] + B.a[k];
    return r;
}

SquareMatrix operator-(const SquareMatrix& A, const SquareMatrix& B) {
    SquareMatrix r(A.n);
    for (std::size_t k = 0; k < r.a.size(); ++k) r.a[k] = A.a[k] - B.a[k];
    return r;
}

SquareMatrix operator*(const SquareMatrix& A, const SquareMatrix& B) {
    const int n = A.n;
    SquareMatrix r(n);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) {
            const double aik = A(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < n; ++j) r(i, j) += aik * B(k, j);
        }
    }
    return r;
}

SquareMatrix operator*(double s, const SquareMatrix& A) {
    SquareMatrix r(A.n);
    for (std::size_t k = 0; k < r.a.size(); ++k) r.a[k] = s * A.a[k];
    return r;
}

SquareMatrix transpose(const SquareMatrix& A) {
    SquareMatrix r(A.n);
    for (int i = 0; i < A.n; ++i)
        for (int j = 0; j < A.n; ++j) r(j, i) = A(i, j);
    return r;
}

double frobenius_norm(const SquareMatrix& A) {
    double s = 0.0;
    for (double v : A.a) s += v * v;
    return std::sqrt(s);
}

namespace {

// LU with partial pivoting; the pivot product carries the determinant.
double lu_det(SquareMatrix M) {
    const int n = M.n;
    double d = 1.0;
    for (int k = 0; k < n; ++k) {
        int piv = k;
        double best = std::abs(M(k, k));
        for (int r = k + 1; r < n; ++r) {
            const double v = std::abs(M(r, k));
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best == 0.0) return 0.0;
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(M(k, j), M(piv, j));
            d = -d;
        }
        d *= M(k, k);
        for (int r = k + 1; r < n; ++r) {
            const double f = M(r, k) / M(k, k);
            for (int j = k; j < n; ++j) M(r, j) -= f * M(k, j);
        }
    }
    return d;
}

SquareMatrix submatrix(const SquareMatrix& A, int drop_row, int drop_col) {
    SquareMatrix r(A.n - 1);
    int ri = 0;
    for (int i = 0; i < A.n; ++i) {
        if (i == drop_row) continue;
        int rj = 0;
        for (int j = 0; j < A.n; ++j) {
            if (j == drop_col) continue;
            r(ri, rj) = A(i, j);
            ++rj;
        }
        ++ri;
    }
    return r;
}

}  // namespace

double det(const SquareMatrix& A) {
    switch (A.n) {
        case 1:
            return A.a[0];
        case 2:
            return A(0, 0) * A(1, 1) - A(0, 1) * A(1, 0);
        case 3:
            return A(0, 0) * (A(1, 1) * A(2, 2) - A(1, 2) * A(2, 1)) -
                   A(0, 1) * (A(1, 0) * A(2, 2) - A(1, 2) * A(2, 0)) +
                   A(0, 2) * (A(1, 0) * A(2, 1) - A(1, 1) * A(2, 0));
        default:
            return lu_det(A);
    }
}

SquareMatrix cofactor(const SquareMatrix& A) {
    const int n = A.n;
    SquareMatrix C(n);
    if (n == 1) {
        C(0, 0) = 1.0;
        return C;
    }
    if (n == 2) {
        C(0, 0) = A(1, 1);
        C(0, 1) = -A(1, 0);
        C(1, 0) = -A(0, 1);
        C(1, 1) = A(0, 0);
        return C;
    }
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const double m = det(submatrix(A, i, j));
            C(i, j) = ((i + j) % 2 == 0) ? m : -m;
        }
    }
    return C;
}

SquareMatrix inverse(const SquareMatrix& A) {
    const double d = det(A);
    if (d == 0.0 || !std::isfinite(1.0 / d)) {
        throw EvalDomainError("inverse: matrix is singular");
    }
    SquareMatrix adj = transpose(cofactor(A));
    return (1.0 / d) * adj;
}

std::vector<double> symmetric_eigenvalues(SquareMatrix S) {
    const int n = S.n;
    const double trace_scale = [&] {
        double t = 0.0;
        for (int i = 0; i < n; ++i) t += std::abs(S(i, i));
        return t;
    }();
    if (trace_scale == 0.0) {
        // Off-diagonal mass of a PSD Gram matrix vanishes with the trace;
        // for a general symmetric input fall through to the sweeps below.
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += S(i, j) * S(i, j);
        if (off == 0.0) return std::vector<double>(static_cast<std::size_t>(n), 0.0);
    }

    const int max_sweeps = 60;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += S(i, j) * S(i, j);
        off = std::sqrt(2.0 * off);
        if (off <= 1e-14 * std::max(trace_scale, 1e-300)) break;

        for (int i = 0; i < n - 1; ++i) {
            for (int j = i + 1; j < n; ++j) {
                const double sij = S(i, j);
                if (sij == 0.0) continue;
                const double tau = (S(j, j) - S(i, i)) / (2.0 * sij);
                const double t = (tau >= 0.0)
                                     ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                                     : -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double ski = S(k, i);
                    const double skj = S(k, j);
                    S(k, i) = c * ski - s * skj;
                    S(k, j) = s * ski + c * skj;
                }
                for (int k = 0; k < n; ++k) {
                    const double sik = S(i, k);
                    const double sjk = S(j, k);
                    S(i, k) = c * sik - s * sjk;
                    S(j, k) = s * sik + c * sjk;
                }
            }
        }
    }
    std::vector<double> ev(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = S(i, i);
    std::sort(ev.begin(), ev.end(), std::greater<double>());
    return ev;
}

double operator_norm(const SquareMatrix& A) {
    if (A.n == 1) return std::abs(A.a[0]);
    if (A.n == 2) {
        // |A|_F^2 +- 2 det A as sums of squares: no cancellation on either
        // conformal cone.
        const double u = std::hypot(A.a[0] + A.a[3], A.a[1] - A.a[2]);
        const double v = std::hypot(A.a[0] - A.a[3], A.a[1] + A.a[2]);
        return 0.5 * (u + v);
    }
    SquareMatrix G = transpose(A) * A;
    std::vector<double> ev = symmetric_eigenvalues(std::move(G));
    return std::sqrt(std::max(ev.front(), 0.0));
}

SignedSpectrum signed_singular_values(const SquareMatrix& A) {
    const int n = A.n;
    SignedSpectrum sp;
    sp.lambda.resize(static_cast<std::size_t>(n));
    sp.sigma.resize(static_cast<std::size_t>(n));

    if (n == 2) {
        const double dt = det(A);
        const double s1 = operator_norm(A);
        // Dividing by s1 keeps the small value accurate and carries the
        // determinant's sign (0 maps to +0).
        const double s2 = (s1 > 0.0) ? dt / s1 : 0.0;
        sp.lambda = {s1, s2};
        sp.sigma = {s1, s1 * s2};
        return sp;
    }

    const double dt = det(A);
    SquareMatrix G = transpose(A) * A;
    std::vector<double> ev = symmetric_eigenvalues(std::move(G));
    for (int i = 0; i < n; ++i) {
        sp.lambda[static_cast<std::size_t>(i)] =
            std::sqrt(std::max(ev[static_cast<std::size_t>(i)], 0.0));
    }
    // Re-anchor the last value so the full product reproduces det exactly;
    // the adjustment stays within eigensolver roundoff.
    double head = 1.0;
    for (int i = 0; i < n - 1; ++i) head *= sp.lambda[static_cast<std::size_t>(i)];
    if (head > 0.0) {
        sp.lambda[static_cast<std::size_t>(n - 1)] = dt / head;
    } else if (dt < 0.0) {
        sp.lambda[static_cast<std::size_t>(n - 1)] =
            -sp.lambda[static_cast<std::size_t>(n - 1)];
    }
    double prod = 1.0;
    for (int i = 0; i < n; ++i) {
        prod *= sp.lambda[static_cast<std::size_t>(i)];
        sp.sigma[static_cast<std::size_t>(i)] = prod;
    }
    return sp;
}

ConformalCoordinates conformal_coordinates(const SquareMatrix& A) {
    ConformalCoordinates c;
    if (A.n == 2) {
        // Planar split in entry form: exact on both cones.
        c.plus_norm = 0.5 * std::hypot(A.a[0] + A.a[3], A.a[1] - A.a[2]);
        c.minus_norm = 0.5 * std::hypot(A.a[0] - A.a[3], A.a[1] + A.a[2]);
        c.t = c.minus_norm;
        c.d = det(A);
        return c;
    }
    const double s = operator_norm(A);
    if (s == 0.0) return c;
    const double dt = det(A);
    const double x = std::pow(s, A.n / 2.0);
    const double y = dt / x;  // |A|^{-n/2} det A
    c.plus_norm = 0.5 * (x + y);
    c.minus_norm = 0.5 * (x - y);
    c.t = c.minus_norm;
    c.d = dt;
    return c;
}

ConformalParts conformal_parts(const SquareMatrix& A) {
    ConformalParts parts{SquareMatrix::zero(A.n), SquareMatrix::zero(A.n), {}};
    const double s = operator_norm(A);
    if (s == 0.0) return parts;
    parts.coords = conformal_coordinates(A);
    const double w = std::pow(s, (A.n - 2) / 2.0);
    const SquareMatrix C = cofactor(A);
    const SquareMatrix wa = w * A;
    const SquareMatrix wc = (1.0 / w) * C;
    parts.plus = 0.5 * (wa + wc);
    parts.minus = 0.5 * (wa - wc);
    return parts;
}

bool is_conformal(const SquareMatrix& A, Sign sign, double tol) {
    const double s = operator_norm(A);
    const double dt = det(A);
    const SquareMatrix C = cofactor(A);
    const double w = std::pow(s, A.n - 2);
    SquareMatrix R(A.n);
    for (std::size_t k = 0; k < R.a.size(); ++k) {
        R.a[k] = (sign == Sign::plus) ? C.a[k] - w * A.a[k] : C.a[k] + w * A.a[k];
    }
    const double scale = std::max(1.0, std::pow(s, A.n - 1));
    const double oriented_det = (sign == Sign::plus) ? dt : -dt;
    return frobenius_norm(R) <= tol * scale && oriented_det >= -tol;
}

bool qco_membership(const SquareMatrix& A, double K, Sign sign) {
    if (K < 1.0) throw PreconditionError("qco_membership: distortion K must be >= 1");
    const double s = operator_norm(A);
    const double dt = det(A);
    const double oriented = (sign == Sign::plus) ? dt : -dt;
    return std::pow(s, A.n) <= K * oriented;
}

std::size_t minors_length(int n) {
    if (n == 2) return 5;
    if (n == 3) return 19;
    throw PreconditionError("minors_length: fixed layout exists only for n in {2, 3}");
}

MinorsVector minors_vector(const SquareMatrix& A) {
    MinorsVector m;
    m.n = A.n;
    if (A.n == 2) {
        m.values = {A.a[0], A.a[1], A.a[2], A.a[3], det(A)};
        return m;
    }
    if (A.n == 3) {
        m.values.reserve(19);
        m.values.insert(m.values.end(), A.a.begin(), A.a.end());
        const SquareMatrix C = cofactor(A);
        m.values.insert(m.values.end(), C.a.begin(), C.a.end());
        m.values.push_back(det(A));
        return m;
    }
    throw PreconditionError("minors_vector: supported only for n in {2, 3}");
}

}  // namespace scv
