#include "scv/rng.hpp"

#include <algorithm>
#include <cmath>

namespace scv {

double Rng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    // 1 - uniform() lies in (0, 1], keeping the log finite.
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
}

Rng stream_for(std::uint64_t seed, std::uint64_t index) {
    // Mix the pair through splitmix so neighboring indices decorrelate.
    std::uint64_t sm = seed ^ (0x632be59bd9b4e019ULL + index * 0x9e3779b97f4a7c15ULL);
    const std::uint64_t derived = splitmix64_next(sm) ^ splitmix64_next(sm);
    return Rng(derived);
}

SquareMatrix random_box_matrix(Rng& rng, int n, double half_width) {
    SquareMatrix A(n);
    for (auto& v : A.a) v = rng.uniform(-half_width, half_width);
    return A;
}

SquareMatrix random_rotation(Rng& rng, int n) {
    for (int attempt = 0; attempt < 64; ++attempt) {
        SquareMatrix G(n);
        for (auto& v : G.a) v = rng.normal();

        // Modified Gram-Schmidt on columns; the positive normalization is the
        // R_jj > 0 convention that makes Q Haar-distributed on O(n).
        SquareMatrix Q(n);
        bool degenerate = false;
        for (int j = 0; j < n && !degenerate; ++j) {
            std::vector<double> v(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] = G(i, j);
            for (int k = 0; k < j; ++k) {
                double proj = 0.0;
                for (int i = 0; i < n; ++i) proj += Q(i, k) * v[static_cast<std::size_t>(i)];
                for (int i = 0; i < n; ++i) v[static_cast<std::size_t>(i)] -= proj * Q(i, k);
            }
            double norm = 0.0;
            for (double x : v) norm += x * x;
            norm = std::sqrt(norm);
            if (norm < 1e-12) {
                degenerate = true;
                break;
            }
            for (int i = 0; i < n; ++i) Q(i, j) = v[static_cast<std::size_t>(i)] / norm;
        }
        if (degenerate) continue;

        if (det(Q) < 0.0) {
            for (int i = 0; i < n; ++i) Q(i, n - 1) = -Q(i, n - 1);
        }
        return Q;
    }
    return SquareMatrix::identity(n);
}

SquareMatrix random_conformal(Rng& rng, int n, double tmax, Sign sign) {
    const double t = rng.uniform(0.0, tmax);
    SquareMatrix Q = random_rotation(rng, n);
    if (sign == Sign::minus) Q = Q * SquareMatrix::reflected_identity(n);
    return t * Q;
}

std::vector<double> random_ordered_spectrum(Rng& rng, int n, double lo, double hi,
                                            double min_gap) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int attempt = 0; attempt < 200; ++attempt) {
        for (auto& x : v) x = rng.uniform(lo, hi);
        std::sort(v.begin(), v.end(), std::greater<double>());
        const double gap_floor = min_gap * std::max(1.0, v.front());
        bool ok = true;
        for (int i = 0; i + 1 < n; ++i) {
            if (v[static_cast<std::size_t>(i)] - v[static_cast<std::size_t>(i + 1)] <
                gap_floor) {
                ok = false;
                break;
            }
        }
        if (ok) return v;
    }
    // Force a valid spectrum after repeated near-ties.
    for (int i = 0; i < n; ++i) {
        v[static_cast<std::size_t>(i)] =
            hi - (hi - lo) * static_cast<double>(i) / std::max(1, n);
    }
    return v;
}

}  // namespace scv
