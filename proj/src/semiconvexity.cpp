#include "scv/semiconvexity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "scv/errors.hpp"
#include "scv/optim.hpp"
#include "scv/parallel.hpp"

namespace scv {

namespace {

constexpr double kBig = 1e100;

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

std::vector<double> random_unit_vector(Rng& rng, int n) {
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int attempt = 0; attempt < 16; ++attempt) {
        for (auto& x : v) x = rng.normal();
        const double nv = norm2(v);
        if (nv > 1e-8) {
            for (auto& x : v) x /= nv;
            return v;
        }
    }
    v.assign(static_cast<std::size_t>(n), 0.0);
    v[0] = 1.0;
    return v;
}

}  // namespace

RankOneDirection RankOneDirection::normalized(std::vector<double> x, std::vector<double> y) {
    if (x.empty() || y.size() != x.size())
        throw PreconditionError("rank-one factors must have equal nonzero length");
    const double nx = norm2(x);
    const double ny = norm2(y);
    if (nx <= 0.0 || ny <= 0.0) throw PreconditionError("rank-one factors must be nonzero");
    for (auto& v : x) v /= nx;
    for (auto& v : y) v /= ny;
    return RankOneDirection{std::move(x), std::move(y)};
}

SquareMatrix RankOneDirection::outer() const {
    const int n = static_cast<int>(x.size());
    if (n == 0 || y.size() != x.size())
        throw PreconditionError("rank-one factors must have equal nonzero length");
    SquareMatrix M(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) M(i, j) = x[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(j)];
    return M;
}

double minors_relation_residual(const MinorsDecomposition& dec) {
    if (dec.weights.size() != dec.points.size() || dec.points.empty())
        throw PreconditionError("decomposition needs matching nonempty weights and points");
    const MinorsVector mc = minors_vector(dec.center);
    std::vector<double> acc(mc.values.size(), 0.0);
    for (std::size_t i = 0; i < dec.points.size(); ++i) {
        const MinorsVector mp = minors_vector(dec.points[i]);
        for (std::size_t j = 0; j < acc.size(); ++j)
            acc[j] += dec.weights[i] * mp.values[j];
    }
    double worst = 0.0;
    for (std::size_t j = 0; j < acc.size(); ++j) {
        const double scale = std::max(1.0, std::fabs(mc.values[j]));
        worst = std::max(worst, std::fabs(acc[j] - mc.values[j]) / scale);
    }
    return worst;
}

double jensen_gap(const Integrand& F, const MinorsDecomposition& dec) {
    double avg = 0.0;
    for (std::size_t i = 0; i < dec.points.size(); ++i)
        avg += dec.weights[i] * F(dec.points[i]);
    return avg - F(dec.center);
}

double rank_one_second_difference(const Integrand& F, const SquareMatrix& A,
                                  const RankOneDirection& dir, double h) {
    if (!(h > 0.0)) throw PreconditionError("finite-difference step must be positive");
    const SquareMatrix X = dir.outer();
    const SquareMatrix hX = h * X;
    return (F(A + hX) - 2.0 * F(A) + F(A - hX)) / (h * h);
}

CheckReport rank_one_convexity_scan(const Integrand& F, double box_half_width,
                                    long long samples, std::uint64_t seed, double tol,
                                    int threads) {
    if (!(box_half_width > 0.0)) throw PreconditionError("box half-width must be positive");
    const int n = F.dim();

    struct Sample {
        SquareMatrix A;
        RankOneDirection dir;
        double residual = 0.0;
    };
    auto sample_at = [&](long long i) {
        Rng rng = stream_for(seed, static_cast<std::uint64_t>(i));
        Sample s{random_box_matrix(rng, n, box_half_width),
                 RankOneDirection{random_unit_vector(rng, n), random_unit_vector(rng, n)}, 0.0};
        const double h = 1e-4 * std::max(1.0, operator_norm(s.A));
        try {
            const double sd = rank_one_second_difference(F, s.A, s.dir, h);
            s.residual = sd / std::max(1.0, std::fabs(F(s.A)));
        } catch (const EvalDomainError&) {
            s.residual = 0.0;  // outside the integrand's domain: nothing to assert
        }
        return s;
    };

    const ScanStats stats = parallel_min_scan(samples, threads,
                                              [&](long long i) { return sample_at(i).residual; });

    CheckReport report;
    report.name = "rank_one_convexity_scan(" + F.name() + ")";
    report.samples = samples;
    report.seed = seed;
    report.worst_residual = stats.worst;
    report.residual_histogram = stats.histogram;
    report.passed = stats.worst >= -tol;
    if (stats.worst_index >= 0) {
        const Sample worst = sample_at(stats.worst_index);
        report.witness = {{"sample_index", stats.worst_index},
                          {"matrix", matrix_to_json(worst.A)},
                          {"x", worst.dir.x},
                          {"y", worst.dir.y},
                          {"scaled_second_difference", worst.residual}};
    }
    return report;
}

double baker_ericksen_value(const Integrand& F, const std::vector<double>& lambda,
                            int i, int j, double fd_step) {
    const int n = static_cast<int>(lambda.size());
    if (n != F.dim()) throw PreconditionError("spectrum length must match the integrand dimension");
    if (i == j || i < 0 || j < 0 || i >= n || j >= n)
        throw PreconditionError("indices must be distinct and in range");
    for (double v : lambda)
        if (!(v > 0.0)) throw PreconditionError("spectrum entries must be positive");
    const double li = lambda[static_cast<std::size_t>(i)];
    const double lj = lambda[static_cast<std::size_t>(j)];
    if (std::fabs(li - lj) <= 1e-12 * std::max(1.0, std::max(li, lj)))
        throw PreconditionError("spectrum entries i and j must be separated");
    if (!(fd_step > 0.0)) throw PreconditionError("finite-difference step must be positive");

    // Fourth-order differences with the step scaled to the entry: the
    // division by lambda_i - lambda_j amplifies derivative noise by up to
    // the inverse spectral gap, so second-order one-shot differences at a
    // fixed step cannot hold the sweep floor.
    auto partial = [&](int k) {
        const double h = fd_step * std::max(1.0, std::fabs(lambda[static_cast<std::size_t>(k)]));
        auto shifted = [&](double offset) {
            std::vector<double> probe = lambda;
            probe[static_cast<std::size_t>(k)] += offset;
            return F(SquareMatrix::diagonal(probe));
        };
        return (-shifted(2.0 * h) + 8.0 * shifted(h) - 8.0 * shifted(-h) +
                shifted(-2.0 * h)) /
               (12.0 * h);
    };
    return (li * partial(i) - lj * partial(j)) / (li - lj);
}

CheckReport baker_ericksen_sweep(const Integrand& F, long long samples,
                                 std::uint64_t seed, double tol, int threads) {
    const int n = F.dim();

    struct Sample {
        std::vector<double> lambda;
        int i = 0, j = 1;
        double value = 0.0;
    };
    auto sample_at = [&](long long idx) {
        Rng rng = stream_for(seed, static_cast<std::uint64_t>(idx));
        Sample s;
        s.lambda = random_ordered_spectrum(rng, n, 0.2, 5.0, 5e-3);
        s.value = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const double v = baker_ericksen_value(F, s.lambda, i, j);
                if (v < s.value) {
                    s.value = v;
                    s.i = i;
                    s.j = j;
                }
            }
        return s;
    };

    const ScanStats stats = parallel_min_scan(samples, threads,
                                              [&](long long i) { return sample_at(i).value; });

    CheckReport report;
    report.name = "baker_ericksen_sweep(" + F.name() + ")";
    report.samples = samples;
    report.seed = seed;
    report.worst_residual = stats.worst;
    report.residual_histogram = stats.histogram;
    report.passed = stats.worst >= -tol;
    if (stats.worst_index >= 0) {
        const Sample worst = sample_at(stats.worst_index);
        report.witness = {{"sample_index", stats.worst_index},
                          {"spectrum", worst.lambda},
                          {"pair", {worst.i, worst.j}},
                          {"value", worst.value}};
    }
    return report;
}

bool monotonicity_precondition(const SquareMatrix& A, const SquareMatrix& B, double tol) {
    if (A.n != B.n) return false;
    const SignedSpectrum sa = signed_singular_values(A);
    const SignedSpectrum sb = signed_singular_values(B);
    const int n = A.n;
    for (int k = 0; k + 1 < n; ++k) {
        const double slack = tol * std::max(1.0, std::fabs(sb.sigma[static_cast<std::size_t>(k)]));
        if (sa.sigma[static_cast<std::size_t>(k)] > sb.sigma[static_cast<std::size_t>(k)] + slack)
            return false;
    }
    const double slack = tol * std::max(1.0, std::fabs(sb.sigma.back()));
    return std::fabs(sa.sigma.back() - sb.sigma.back()) <= slack;
}

CheckReport monotonicity_check(const Integrand& F, const SquareMatrix& A,
                               const SquareMatrix& B, double tol) {
    if (A.n != F.dim() || B.n != F.dim())
        throw PreconditionError("matrix dimensions must match the integrand");
    if (!monotonicity_precondition(A, B))
        throw PreconditionError(
            "partial products of A must not exceed those of B, with matching determinant");
    const double fa = F(A);
    const double fb = F(B);
    const double residual = (fa - fb) / std::max(1.0, std::fabs(fb));

    CheckReport report;
    report.name = "monotonicity_check(" + F.name() + ")";
    report.samples = 1;
    report.worst_residual = residual;
    report.passed = residual <= tol;
    report.witness = {{"A", matrix_to_json(A)},
                      {"B", matrix_to_json(B)},
                      {"F_A", fa},
                      {"F_B", fb}};
    return report;
}

std::pair<SquareMatrix, SquareMatrix> monotonicity_pair_sampler(Rng& rng, int n) {
    if (n != 2 && n != 3) throw PreconditionError("pair sampler supports n in {2, 3}");

    // B spectrum: smallest entry first, then multiplicative gaps.
    std::vector<double> asc(static_cast<std::size_t>(n));
    asc[0] = rng.uniform(0.25, 1.0);
    for (int k = 1; k < n; ++k)
        asc[static_cast<std::size_t>(k)] = asc[static_cast<std::size_t>(k - 1)] * rng.uniform(1.1, 2.2);
    std::vector<double> lb(asc.rbegin(), asc.rend());

    double s = 1.0;
    for (double v : lb) s *= v;

    auto log_interp = [](double lo, double hi, double xi) {
        return std::exp((1.0 - xi) * std::log(lo) + xi * std::log(hi));
    };

    std::vector<double> la(static_cast<std::size_t>(n));
    if (n == 2) {
        const double lo = std::sqrt(s);
        const double hi = lb[0];
        la[0] = log_interp(lo, hi, rng.uniform(0.1, 0.9));
        la[1] = s / la[0];
    } else {
        const double sigma2 = lb[0] * lb[1];
        const double lo1 = std::cbrt(s);
        const double hi1 = std::min(lb[0], sigma2 * sigma2 / s);
        la[0] = log_interp(lo1, hi1, rng.uniform(0.1, 0.9));
        const double lo2 = std::sqrt(s / la[0]);
        const double hi2 = std::min(la[0], sigma2 / la[0]);
        la[1] = log_interp(lo2, hi2, rng.uniform(0.1, 0.9));
        la[2] = s / (la[0] * la[1]);
    }

    if (rng.uniform() < 0.5) {
        la[static_cast<std::size_t>(n - 1)] *= -1.0;
        lb[static_cast<std::size_t>(n - 1)] *= -1.0;
    }

    const SquareMatrix qa = random_rotation(rng, n);
    const SquareMatrix ra = random_rotation(rng, n);
    const SquareMatrix qb = random_rotation(rng, n);
    const SquareMatrix rb = random_rotation(rng, n);
    return {qa * SquareMatrix::diagonal(la) * ra, qb * SquareMatrix::diagonal(lb) * rb};
}

CheckReport monotonicity_sweep(const Integrand& F, long long samples,
                               std::uint64_t seed, double tol, int threads) {
    const int n = F.dim();

    struct Sample {
        SquareMatrix A, B;
        double residual = 0.0;
    };
    auto sample_at = [&](long long i) {
        Rng rng = stream_for(seed, static_cast<std::uint64_t>(i));
        auto [A, B] = monotonicity_pair_sampler(rng, n);
        const double fb = F(B);
        const double residual = (F(A) - fb) / std::max(1.0, std::fabs(fb));
        return Sample{std::move(A), std::move(B), residual};
    };

    const ScanStats stats = parallel_max_scan(samples, threads,
                                              [&](long long i) { return sample_at(i).residual; });

    CheckReport report;
    report.name = "monotonicity_sweep(" + F.name() + ")";
    report.samples = samples;
    report.seed = seed;
    report.worst_residual = stats.worst;
    report.residual_histogram = stats.histogram;
    report.passed = stats.worst <= tol;
    if (stats.worst_index >= 0) {
        const Sample worst = sample_at(stats.worst_index);
        report.witness = {{"sample_index", stats.worst_index},
                          {"A", matrix_to_json(worst.A)},
                          {"B", matrix_to_json(worst.B)},
                          {"scaled_excess", worst.residual}};
    }
    return report;
}

CheckReport infimum_reduction_probe(const Integrand& F, long long samples,
                                    std::uint64_t seed, double tol, int threads) {
    const int n = F.dim();
    const bool positive_only = F.requires_positive_det();

    auto box_matrix_at = [&](long long i) {
        Rng rng = stream_for(seed, 2 * static_cast<std::uint64_t>(i));
        SquareMatrix A = random_box_matrix(rng, n, 5.0);
        const double target = 5.0 * rng.uniform(0.05, 1.0);
        const double op = operator_norm(A);
        if (op > 1e-12) A = (target / op) * A;
        if (positive_only && det(A) <= 0.0)
            for (int j = 0; j < n; ++j) A(0, j) = -A(0, j);
        return A;
    };
    auto box_value_at = [&](long long i) {
        try {
            return F(box_matrix_at(i));
        } catch (const EvalDomainError&) {
            return kBig;
        }
    };
    auto cone_matrix_at = [&](long long i) {
        Rng rng = stream_for(seed, 2 * static_cast<std::uint64_t>(i) + 1);
        const Sign sign = (positive_only || rng.uniform() < 0.5) ? Sign::plus : Sign::minus;
        return random_conformal(rng, n, 5.0, sign);
    };
    auto cone_value_at = [&](long long i) {
        try {
            return F(cone_matrix_at(i));
        } catch (const EvalDomainError&) {
            return kBig;
        }
    };

    const ScanStats box = parallel_min_scan(samples, threads, box_value_at);
    const ScanStats cone = parallel_min_scan(samples, threads, cone_value_at);
    const double residual = (cone.worst - box.worst) / std::max(1.0, std::fabs(cone.worst));

    CheckReport report;
    report.name = "infimum_reduction_probe(" + F.name() + ")";
    report.samples = samples;
    report.seed = seed;
    report.worst_residual = residual;
    report.residual_histogram = box.histogram;
    report.passed = residual <= tol;
    report.witness = {{"box_min", box.worst},
                      {"cone_min", cone.worst},
                      {"box_argmin", matrix_to_json(box_matrix_at(std::max(0LL, box.worst_index)))},
                      {"cone_argmin", matrix_to_json(cone_matrix_at(std::max(0LL, cone.worst_index)))}};
    return report;
}

CheckReport polyconvexity_certificate_check(const Integrand& F, const SquareMatrix& A,
                                            const MinorsCertificate& G,
                                            long long samples, std::uint64_t seed,
                                            double tol, int threads) {
    const int n = F.dim();
    if (A.n != n) throw PreconditionError("touch point dimension must match the integrand");

    auto scaled_gap = [&](const SquareMatrix& X) {
        const double fx = F(X);
        return (fx - G(minors_vector(X))) / std::max(1.0, std::fabs(fx));
    };
    auto matrix_at = [&](long long i) {
        Rng rng = stream_for(seed, static_cast<std::uint64_t>(i));
        return random_box_matrix(rng, n, 5.0);
    };
    auto value_at = [&](long long i) {
        try {
            return scaled_gap(matrix_at(i));
        } catch (const EvalDomainError&) {
            return kBig;
        }
    };

    const double touch = std::fabs(F(A) - G(minors_vector(A))) / std::max(1.0, std::fabs(F(A)));
    const ScanStats stats = parallel_min_scan(samples, threads, value_at);

    // Local descent from scattered starts, hunting for a dip below zero that
    // uniform sampling missed.
    const int dims = n * n;
    auto objective = [&](const std::vector<double>& x) {
        SquareMatrix X(n);
        X.a = x;
        try {
            return scaled_gap(X);
        } catch (const EvalDomainError&) {
            return kBig;
        }
    };
    double descent_min = kBig;
    std::vector<double> descent_arg;
    for (int j = 0; j < 50; ++j) {
        Rng rng = stream_for(seed, 1000000 + static_cast<std::uint64_t>(j));
        std::vector<double> start(static_cast<std::size_t>(dims));
        for (auto& v : start) v = rng.uniform(-5.0, 5.0);
        const NelderMeadResult res = nelder_mead(objective, std::move(start), 0.8, 300, 1e-13);
        if (res.value < descent_min) {
            descent_min = res.value;
            descent_arg = res.x;
        }
    }

    const double worst = std::min(stats.worst, descent_min);

    CheckReport report;
    report.name = "polyconvexity_certificate_check(" + F.name() + ")";
    report.samples = samples;
    report.seed = seed;
    report.worst_residual = worst;
    report.residual_histogram = stats.histogram;
    report.passed = touch <= tol && worst >= -tol;
    report.witness = {{"touch_residual", touch}, {"sampled_min_gap", stats.worst},
                      {"descent_min_gap", descent_min}};
    if (descent_min < stats.worst && !descent_arg.empty()) {
        SquareMatrix X(n);
        X.a = descent_arg;
        report.witness["gap_argmin"] = matrix_to_json(X);
    } else if (stats.worst_index >= 0) {
        report.witness["gap_argmin"] = matrix_to_json(matrix_at(stats.worst_index));
    }
    return report;
}

namespace {

struct ScalarIdentity {
    bool yes = false;
    double s = 0.0;
};

ScalarIdentity scalar_identity_of(const SquareMatrix& A) {
    const double s = A(0, 0);
    if (!(s > 0.0)) return {};
    const double slack = 1e-12 * std::max(1.0, s);
    for (int i = 0; i < A.n; ++i)
        for (int j = 0; j < A.n; ++j) {
            const double expected = (i == j) ? s : 0.0;
            if (std::fabs(A(i, j) - expected) > slack) return {};
        }
    return {true, s};
}

bool is_diagonal(const SquareMatrix& A) {
    const double slack = 1e-12 * std::max(1.0, operator_norm(A));
    for (int i = 0; i < A.n; ++i)
        for (int j = 0; j < A.n; ++j)
            if (i != j && std::fabs(A(i, j)) > slack) return false;
    return true;
}

// Equal-weight three-point diagonal family centered at s * Id (n == 2) with
// the entry and determinant averages matching the center exactly:
//   b - c = 3 + a  and  b c = (a^2 - 3) / 2, solvable for a > sqrt(3).
MinorsDecomposition diagonal_ansatz(double a, double s) {
    const double c = 0.5 * (std::sqrt(3.0) * (a + 1.0) - (3.0 + a));
    const double b = 3.0 + a + c;
    MinorsDecomposition dec;
    dec.weights = {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    dec.points = {SquareMatrix::diagonal({-s * a, -s * a}),
                  SquareMatrix::diagonal({s * b, -s * c}),
                  SquareMatrix::diagonal({-s * c, s * b})};
    dec.center = SquareMatrix::diagonal({s, s});
    return dec;
}

// One conformal point diag(s0, s0) with weight 1 - 2v plus a swapped pair
// diag(x, -y), diag(-y, x) with weight v each; v and s0 are forced by the
// entry and determinant relations around the identity.
struct ConeAnsatz {
    bool feasible = false;
    double v = 0.0;
    double s0 = 0.0;
};

ConeAnsatz cone_ansatz_parameters(double x, double y) {
    if (!(x > 1.0 + 1e-9) || !(y > -1.0 + 1e-9) || std::fabs(x + y) < 1e-9) return {};
    const double v = 2.0 * (x - 1.0) * (y + 1.0) / ((x + y) * (x + y));
    if (!(v > 1e-12) || !(v < 0.5 - 1e-12)) return {};
    // s0 = (1 - v(x-y)) / (1 - 2v) blows up as v -> 1/2 and the relation
    // arithmetic degenerates with it, so cap the conformal point's size.
    const double s0 = (1.0 - v * (x - y)) / (1.0 - 2.0 * v);
    if (!(s0 > 1e-9) || !(s0 < 1e4)) return {};
    return {true, v, s0};
}

MinorsDecomposition cone_ansatz(double x, double y, double scale) {
    const ConeAnsatz par = cone_ansatz_parameters(x, y);
    MinorsDecomposition dec;
    dec.weights = {1.0 - 2.0 * par.v, par.v, par.v};
    dec.points = {SquareMatrix::diagonal({scale * par.s0, scale * par.s0}),
                  SquareMatrix::diagonal({scale * x, -scale * y}),
                  SquareMatrix::diagonal({-scale * y, scale * x})};
    dec.center = SquareMatrix::diagonal({scale, scale});
    return dec;
}

double guarded_gap(const Integrand& F, const MinorsDecomposition& dec) {
    try {
        return jensen_gap(F, dec);
    } catch (const EvalDomainError&) {
        return kBig;
    }
}

std::vector<double> softmax(const std::vector<double>& logits) {
    double top = -std::numeric_limits<double>::infinity();
    for (double v : logits) top = std::max(top, v);
    std::vector<double> w(logits.size());
    double total = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        w[i] = std::exp(logits[i] - top);
        total += w[i];
    }
    for (auto& v : w) v /= total;
    return w;
}

// theta -> decomposition for the penalty phases: k point parameter blocks
// (diagonal entries or full row-major entries) followed by k weight logits.
MinorsDecomposition build_from_theta(const std::vector<double>& theta, int k, int n,
                                     bool diagonal_only, const SquareMatrix& center) {
    const int block = diagonal_only ? n : n * n;
    MinorsDecomposition dec;
    dec.center = center;
    dec.points.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        if (diagonal_only) {
            std::vector<double> d(theta.begin() + static_cast<std::ptrdiff_t>(i) * block,
                                  theta.begin() + static_cast<std::ptrdiff_t>(i + 1) * block);
            dec.points.push_back(SquareMatrix::diagonal(d));
        } else {
            SquareMatrix P(n);
            std::copy(theta.begin() + static_cast<std::ptrdiff_t>(i) * block,
                      theta.begin() + static_cast<std::ptrdiff_t>(i + 1) * block, P.a.begin());
            dec.points.push_back(std::move(P));
        }
    }
    dec.weights = softmax(std::vector<double>(theta.end() - k, theta.end()));
    return dec;
}

// Scaled relation residual vector for Gauss-Newton.
std::vector<double> relation_residuals(const MinorsDecomposition& dec,
                                       const MinorsVector& mc) {
    std::vector<double> r(mc.values.size(), 0.0);
    for (std::size_t i = 0; i < dec.points.size(); ++i) {
        const MinorsVector mp = minors_vector(dec.points[i]);
        for (std::size_t j = 0; j < r.size(); ++j) r[j] += dec.weights[i] * mp.values[j];
    }
    for (std::size_t j = 0; j < r.size(); ++j)
        r[j] = (r[j] - mc.values[j]) / std::max(1.0, std::fabs(mc.values[j]));
    return r;
}

bool project_onto_relations(std::vector<double>& theta, int k, int n, bool diagonal_only,
                            const SquareMatrix& center) {
    const MinorsVector mc = minors_vector(center);
    const int m = static_cast<int>(mc.values.size());
    const int dims = static_cast<int>(theta.size());

    auto residuals_of = [&](const std::vector<double>& th) {
        return relation_residuals(build_from_theta(th, k, n, diagonal_only, center), mc);
    };

    for (int iter = 0; iter < 80; ++iter) {
        const std::vector<double> r = residuals_of(theta);
        double rn = 0.0;
        for (double v : r) rn = std::max(rn, std::fabs(v));
        if (rn <= 1e-12) return true;

        const double hstep = 1e-7;
        std::vector<std::vector<double>> J(static_cast<std::size_t>(m),
                                           std::vector<double>(static_cast<std::size_t>(dims)));
        for (int d = 0; d < dims; ++d) {
            std::vector<double> th = theta;
            th[static_cast<std::size_t>(d)] += hstep;
            const std::vector<double> rp = residuals_of(th);
            for (int j = 0; j < m; ++j)
                J[static_cast<std::size_t>(j)][static_cast<std::size_t>(d)] =
                    (rp[static_cast<std::size_t>(j)] - r[static_cast<std::size_t>(j)]) / hstep;
        }

        SquareMatrix JJt(m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j) {
                double acc = 0.0;
                for (int d = 0; d < dims; ++d)
                    acc += J[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)] *
                           J[static_cast<std::size_t>(j)][static_cast<std::size_t>(d)];
                JJt(i, j) = acc;
            }
        for (int i = 0; i < m; ++i) JJt(i, i) += 1e-12 * (1.0 + JJt(i, i));

        std::vector<double> y;
        try {
            y = solve_linear(JJt, r);
        } catch (const EvalDomainError&) {
            return false;
        }
        double step = 0.0;
        for (int d = 0; d < dims; ++d) {
            double delta = 0.0;
            for (int j = 0; j < m; ++j)
                delta += J[static_cast<std::size_t>(j)][static_cast<std::size_t>(d)] *
                         y[static_cast<std::size_t>(j)];
            theta[static_cast<std::size_t>(d)] -= delta;
            step = std::max(step, std::fabs(delta));
        }
        if (step < 1e-15) break;
    }
    const std::vector<double> r = residuals_of(theta);
    double rn = 0.0;
    for (double v : r) rn = std::max(rn, std::fabs(v));
    return rn <= 1e-11;
}

struct PenaltyCandidate {
    bool found = false;
    double gap = 0.0;
    MinorsDecomposition dec;
};

PenaltyCandidate penalty_phase(const Integrand& F, const SquareMatrix& A, int k,
                               bool diagonal_only, int restarts, std::uint64_t seed,
                               std::uint64_t stream_base, double tol) {
    const int n = A.n;
    const int block = diagonal_only ? n : n * n;
    const int dims = k * block + k;
    const MinorsVector mc = minors_vector(A);
    const double scale_ref = std::max(1.0, operator_norm(A));

    auto penalized = [&](double mu) {
        return [&, mu](const std::vector<double>& th) {
            const MinorsDecomposition dec = build_from_theta(th, k, n, diagonal_only, A);
            double value;
            try {
                value = jensen_gap(F, dec);
            } catch (const EvalDomainError&) {
                return kBig;
            }
            const std::vector<double> r = relation_residuals(dec, mc);
            for (double v : r) value += mu * v * v;
            return value;
        };
    };

    PenaltyCandidate best;
    for (int j = 0; j < restarts; ++j) {
        Rng rng = stream_for(seed, stream_base + static_cast<std::uint64_t>(j));
        std::vector<double> theta(static_cast<std::size_t>(dims));
        for (int d = 0; d < k * block; ++d)
            theta[static_cast<std::size_t>(d)] = scale_ref * rng.uniform(-2.5, 2.5);
        for (int d = k * block; d < dims; ++d)
            theta[static_cast<std::size_t>(d)] = rng.uniform(-0.5, 0.5);

        double radius = 1.5 * scale_ref;
        for (double mu = 1e2; mu <= 1e7 + 1.0; mu *= 10.0) {
            theta = coordinate_descent(penalized(mu), std::move(theta), radius, 2, 1e-4);
            radius *= 0.65;
        }

        if (!project_onto_relations(theta, k, n, diagonal_only, A)) continue;
        MinorsDecomposition dec = build_from_theta(theta, k, n, diagonal_only, A);
        if (minors_relation_residual(dec) > 1e-10) continue;
        const double gap = guarded_gap(F, dec);
        if (gap < -tol && (!best.found || gap < best.gap)) {
            best = {true, gap, std::move(dec)};
        }
    }
    return best;
}

}  // namespace

std::optional<MinorsDecomposition> polyconvexity_violation_search(
    const Integrand& F, const SquareMatrix& A, const ViolationSearchConfig& cfg) {
    const int n = F.dim();
    if (A.n != n) throw PreconditionError("center dimension must match the integrand");
    if (n != 2 && n != 3) throw PreconditionError("violation search supports n in {2, 3}");
    const int k = std::clamp(cfg.points, 2, static_cast<int>(minors_length(n)) + 1);

    const ScalarIdentity sid = scalar_identity_of(A);

    // Exact three-point diagonal family around scaled identities. The
    // canonical parameter is tried first so a violating integrand yields a
    // reproducible witness.
    if (n == 2 && sid.yes && k >= 3) {
        auto gap_of = [&](double a) { return guarded_gap(F, diagonal_ansatz(a, sid.s)); };
        if (gap_of(3.0) < -cfg.tol) return diagonal_ansatz(3.0, sid.s);

        const double root3 = std::sqrt(3.0);
        double best_a = 3.0;
        double best_gap = gap_of(3.0);
        for (double a : {2.0, root3 + 1e-3, 2.5, 4.0, 5.0, 6.0, 8.0}) {
            const double g = gap_of(a);
            if (g < best_gap) {
                best_gap = g;
                best_a = a;
            }
        }
        const double lo = std::max(root3 + 1e-3, 0.5 * best_a);
        const double hi = std::max(lo + 1e-3, 2.0 * best_a);
        const double polished = golden_section_min(gap_of, lo, hi, 1e-10);
        if (gap_of(polished) < best_gap) {
            best_gap = gap_of(polished);
            best_a = polished;
        }
        if (best_gap < -cfg.tol) return diagonal_ansatz(best_a, sid.s);
    }

    // Conformal-plus-swapped-pair family; catches violations the symmetric
    // diagonal family misses (notably in the subquadratic regime).
    if (n == 2 && sid.yes && k >= 3) {
        auto objective = [&](const std::vector<double>& u) {
            if (!cone_ansatz_parameters(u[0], u[1]).feasible) return kBig;
            const MinorsDecomposition dec = cone_ansatz(u[0], u[1], sid.s);
            // The relations hold exactly in reals, so any measured residual
            // is arithmetic breakdown; penalizing it keeps the descent away
            // from the degenerate corner where fake gaps appear.
            return guarded_gap(F, dec) + 1e10 * std::pow(minors_relation_residual(dec), 2);
        };
        double best = kBig;
        std::vector<double> best_u;
        for (int j = 0; j < std::max(4, cfg.restarts); ++j) {
            Rng rng = stream_for(cfg.seed, 100 + static_cast<std::uint64_t>(j));
            std::vector<double> start{rng.uniform(1.05, 6.0), rng.uniform(0.0, 3.0)};
            const NelderMeadResult res = nelder_mead(objective, std::move(start), 0.5, 250, 1e-12);
            if (res.value < best) {
                best = res.value;
                best_u = res.x;
            }
        }
        if (best < -cfg.tol) {
            MinorsDecomposition dec = cone_ansatz(best_u[0], best_u[1], sid.s);
            if (minors_relation_residual(dec) <= 1e-10 && jensen_gap(F, dec) < -cfg.tol)
                return dec;
        }
    }

    // Penalty descent with Gauss-Newton reprojection onto the relations:
    // diagonal points when the center allows it, then full matrices.
    if (is_diagonal(A)) {
        PenaltyCandidate cand = penalty_phase(F, A, k, true, std::max(2, cfg.restarts / 2),
                                              cfg.seed, 200, cfg.tol);
        if (cand.found) return std::move(cand.dec);
    }
    PenaltyCandidate cand = penalty_phase(F, A, k, false, std::max(2, cfg.restarts / 3),
                                          cfg.seed, 300, cfg.tol);
    if (cand.found) return std::move(cand.dec);
    return std::nullopt;
}

CheckReport convexity_segment_check(const std::function<double(double, double)>& g,
                                    std::array<double, 2> a, std::array<double, 2> b,
                                    int grid, double tol) {
    if (grid < 2) throw PreconditionError("segment grid needs at least two points");

    std::vector<std::array<double, 2>> pts(static_cast<std::size_t>(grid));
    std::vector<double> vals(static_cast<std::size_t>(grid));
    for (int i = 0; i < grid; ++i) {
        const double t = static_cast<double>(i) / (grid - 1);
        pts[static_cast<std::size_t>(i)] = {a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
        vals[static_cast<std::size_t>(i)] = g(pts[static_cast<std::size_t>(i)][0],
                                              pts[static_cast<std::size_t>(i)][1]);
    }

    double worst = -std::numeric_limits<double>::infinity();
    std::array<int, 2> worst_pair{0, 0};
    for (int i = 0; i < grid; ++i)
        for (int j = i + 1; j < grid; ++j) {
            const double mx = 0.5 * (pts[static_cast<std::size_t>(i)][0] + pts[static_cast<std::size_t>(j)][0]);
            const double my = 0.5 * (pts[static_cast<std::size_t>(i)][1] + pts[static_cast<std::size_t>(j)][1]);
            const double excess = g(mx, my) - 0.5 * (vals[static_cast<std::size_t>(i)] +
                                                     vals[static_cast<std::size_t>(j)]);
            if (excess > worst) {
                worst = excess;
                worst_pair = {i, j};
            }
        }

    CheckReport report;
    report.name = "segment_midpoint_convexity";
    report.samples = grid;
    report.worst_residual = worst;
    report.passed = worst <= tol;
    report.witness = {{"pair", worst_pair}, {"midpoint_excess", worst}};
    return report;
}

std::array<double, 2> h_plus_subgradient(double t, double d, double p) {
    if (!(p > 2.0)) throw ParseError("planar subgradient needs p > 2");
    if (t < 0.0) throw EvalDomainError("planar subgradient needs t >= 0");
    const double c = h_convexity_region_coefficient(p);
    // The clipped function vanishes on and outside the clipping boundary, so
    // the zero vector is a valid subgradient everywhere the value is zero.
    if (c * t * t + d <= 0.0) return {0.0, 0.0};
    return h_gradient(t, d, p);
}

CheckReport bppc_subgradient_check(const SquareMatrix& A, const SquareMatrix& B,
                                   double p, double tol) {
    if (A.n != 2 || B.n != 2) throw PreconditionError("planar subgradient check needs n == 2");
    const ConformalCoordinates ca = conformal_coordinates(A);
    const ConformalCoordinates cb = conformal_coordinates(B);
    const double va = h_plus_value(ca.t, ca.d, p);
    const double vb = h_plus_value(cb.t, cb.d, p);
    const std::array<double, 2> g = h_plus_subgradient(cb.t, cb.d, p);
    const double planar = g[0] * (ca.t - cb.t) + g[1] * (ca.d - cb.d);
    const double scale = std::max({1.0, std::fabs(va), std::fabs(vb)});
    const double residual = (va - vb - planar) / scale;

    CheckReport report;
    report.name = "bppc_subgradient_check(p=" + std::to_string(p) + ")";
    report.samples = 1;
    report.worst_residual = residual;
    report.passed = residual >= -tol;
    report.witness = {{"A", matrix_to_json(A)},       {"B", matrix_to_json(B)},
                      {"value_A", va},                {"value_B", vb},
                      {"subgradient", {g[0], g[1]}},  {"scaled_residual", residual}};
    return report;
}

CheckReport bppc_sweep(double p, long long samples, std::uint64_t seed,
                       double tol, int threads) {
    if (!(p > 2.0)) throw ParseError("planar subgradient sweep needs p > 2");

    struct Sample {
        SquareMatrix A, B;
        double residual = 0.0;
    };
    auto sample_at = [&](long long i) {
        Rng rng = stream_for(seed, static_cast<std::uint64_t>(i));
        Sample s{random_box_matrix(rng, 2, 5.0), random_box_matrix(rng, 2, 5.0), 0.0};
        const ConformalCoordinates ca = conformal_coordinates(s.A);
        const ConformalCoordinates cb = conformal_coordinates(s.B);
        const double va = h_plus_value(ca.t, ca.d, p);
        const double vb = h_plus_value(cb.t, cb.d, p);
        const std::array<double, 2> g = h_plus_subgradient(cb.t, cb.d, p);
        const double planar = g[0] * (ca.t - cb.t) + g[1] * (ca.d - cb.d);
        s.residual = (va - vb - planar) / std::max({1.0, std::fabs(va), std::fabs(vb)});
        return s;
    };

    const ScanStats stats = parallel_min_scan(samples, threads,
                                              [&](long long i) { return sample_at(i).residual; });

    CheckReport report;
    report.name = "bppc_sweep(p=" + std::to_string(p) + ")";
    report.samples = samples;
    report.seed = seed;
    report.worst_residual = stats.worst;
    report.residual_histogram = stats.histogram;
    report.passed = stats.worst >= -tol;
    if (stats.worst_index >= 0) {
        const Sample worst = sample_at(stats.worst_index);
        report.witness = {{"sample_index", stats.worst_index},
                          {"A", matrix_to_json(worst.A)},
                          {"B", matrix_to_json(worst.B)},
                          {"scaled_residual", worst.residual}};
    }
    return report;
}

CheckReport rank_one_dichotomy_check(const Integrand& F, long long samples,
                                     std::uint64_t seed, double tol, int threads) {
    const int n = F.dim();
    if (F.requires_positive_det())
        throw PreconditionError("dichotomy check needs an integrand defined at singular matrices");
    const double origin = F(SquareMatrix::zero(n));
    if (std::fabs(origin) > 1e-12)
        throw PreconditionError("dichotomy check needs F(0) == 0");

    struct Sample {
        SquareMatrix X;
        double residual = 0.0;
    };
    auto sample_at = [&](long long i) {
        Rng rng = stream_for(seed, static_cast<std::uint64_t>(i));
        const RankOneDirection dir{random_unit_vector(rng, n), random_unit_vector(rng, n)};
        const double t = rng.uniform(0.2, 4.0);
        Sample s{t * dir.outer(), 0.0};
        const double v1 = F(s.X);
        const double v2 = F(-1.0 * s.X);
        s.residual = std::max(v1, v2) / std::max({1.0, std::fabs(v1), std::fabs(v2)});
        return s;
    };

    const ScanStats stats = parallel_min_scan(samples, threads,
                                              [&](long long i) { return sample_at(i).residual; });

    CheckReport report;
    report.name = "rank_one_dichotomy_check(" + F.name() + ")";
    report.samples = samples;
    report.seed = seed;
    report.worst_residual = stats.worst;
    report.residual_histogram = stats.histogram;
    report.passed = stats.worst >= -tol;
    if (stats.worst_index >= 0) {
        const Sample worst = sample_at(stats.worst_index);
        report.witness = {{"sample_index", stats.worst_index},
                          {"X", matrix_to_json(worst.X)},
                          {"scaled_max_value", worst.residual}};
    }
    return report;
}

std::pair<Prop49Coefficients, CheckReport> minors_fit_obstruction(
    double p, double fd_step, double tol) {
    if (!(p > 3.0)) throw ParseError("the cubic obstruction needs p > 3");
    if (!(fd_step > 0.0) || !(fd_step < 0.25))
        throw PreconditionError("finite-difference step must lie in (0, 0.25)");

    const Integrand F = Integrand::burkholder_plus(p, 3);
    const double base = F(SquareMatrix::diagonal({1.0, 0.0, 0.0}));
    auto value = [&](double x, double y, double z) {
        return F(SquareMatrix::diagonal({x, y, z})) - base;
    };
    auto grad = [&](double x, double y, double z) {
        return std::array<double, 3>{
            (value(x + fd_step, y, z) - value(x - fd_step, y, z)) / (2.0 * fd_step),
            (value(x, y + fd_step, z) - value(x, y - fd_step, z)) / (2.0 * fd_step),
            (value(x, y, z + fd_step) - value(x, y, z - fd_step)) / (2.0 * fd_step)};
    };

    // Any affine function of the shifted minors basis
    //   (x-1), y, z, (x-1)y, (x-1)z, yz, (x-1)yz
    // that minorizes and touches at (1,0,0) has its gradient pinned on the
    // touching faces; successive gradient matches force every coefficient.
    const double y0 = 0.5;
    Prop49Coefficients coeffs;
    const auto g000 = grad(1.0, 0.0, 0.0);
    coeffs.c[0] = g000[0];
    coeffs.c[1] = g000[1];
    coeffs.c[2] = g000[2];
    const auto gy = grad(1.0, y0, 0.0);
    coeffs.c[3] = (gy[0] - coeffs.c[0]) / y0;
    coeffs.c[5] = gy[2] / y0;
    const auto gz = grad(1.0, 0.0, y0);
    coeffs.c[4] = (gz[0] - coeffs.c[0]) / y0;
    const double c5_cross = gz[1] / y0;
    const auto gyz = grad(1.0, y0, y0);
    coeffs.c[6] = (gyz[0] - coeffs.c[0]) / (y0 * y0);

    const std::array<double, 7> expected{p - 3.0, 0.0, 0.0, 0.0, 0.0, 1.0, p - 2.0};
    double coeff_dev = 0.0;
    for (std::size_t i = 0; i < 7; ++i)
        coeff_dev = std::max(coeff_dev, std::fabs(coeffs.c[i] - expected[i]));
    coeff_dev = std::max(coeff_dev, std::fabs(coeffs.c[5] - c5_cross));

    // On the segment diag(0, y, -y) the forced minorant exceeds the function
    // for y just above 1, with closed-form margin (p-3)((y^2-1) - (y^p-1)/p).
    auto forced_minorant = [&](double x, double y, double z) {
        return (p - 3.0) * (x - 1.0) + y * z + (p - 2.0) * (x - 1.0) * y * z;
    };
    auto margin = [&](double y) {
        return forced_minorant(0.0, y, -y) - value(0.0, y, -y);
    };
    auto margin_closed = [&](double y) {
        return (p - 3.0) * ((y * y - 1.0) - (std::pow(y, p) - 1.0) / p);
    };
    const double m_below = margin(0.99);
    const double m_above = margin(1.01);
    const double closed_dev = std::max(std::fabs(m_below - margin_closed(0.99)),
                                       std::fabs(m_above - margin_closed(1.01)));

    CheckReport report;
    report.name = "minors_fit_obstruction(p=" + std::to_string(p) + ")";
    report.samples = 1;
    report.worst_residual = coeff_dev;
    report.passed = coeff_dev <= tol && closed_dev <= 1e-10 && m_above > 0.0;
    report.witness = {{"coefficients", coeffs.c},
                      {"expected", expected},
                      {"margin_below_1", m_below},
                      {"margin_above_1", m_above},
                      {"closed_form_agreement", closed_dev},
                      {"slope_gap_at_1", p - 3.0}};
    return {coeffs, report};
}

}  // namespace scv
