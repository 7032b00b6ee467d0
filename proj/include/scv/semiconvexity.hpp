#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "scv/integrands.hpp"
#include "scv/matrix.hpp"
#include "scv/report.hpp"
#include "scv/rng.hpp"

namespace scv {

/// Unit vectors spanning a rank-one line t -> A + t x (x) y.
struct RankOneDirection {
    std::vector<double> x;
    std::vector<double> y;

    /// Normalizes both factors; throws PreconditionError on a zero vector.
    static RankOneDirection normalized(std::vector<double> x, std::vector<double> y);

    /// The rank-one matrix x (x) y.
    SquareMatrix outer() const;
};

/// Convex combination reproducing the minors of the center:
/// sum w_i M(points_i) = M(center) componentwise.
struct MinorsDecomposition {
    std::vector<double> weights;
    std::vector<SquareMatrix> points;
    SquareMatrix center;
};

/// Worst componentwise relation residual, scaled by max(1, |M(center)_j|).
double minors_relation_residual(const MinorsDecomposition& dec);

/// sum w_i F(points_i) - F(center); negative values witness a failure of
/// Jensen's inequality over the minors constraint.
double jensen_gap(const Integrand& F, const MinorsDecomposition& dec);

/// The seven coefficients forced on any affine-in-minors minorant touching
/// the cubic positive part at diag(1,0,0); see minors_fit_obstruction.
struct Prop49Coefficients {
    std::array<double, 7> c{};
};

/// (F(A + h x(x)y) - 2 F(A) + F(A - h x(x)y)) / h^2.
double rank_one_second_difference(const Integrand& F, const SquareMatrix& A,
                                  const RankOneDirection& dir, double h);

/// Samples (A, direction) pairs with entries in [-box_half_width,
/// box_half_width] and fails when any scaled second difference drops below
/// -tol. worst_residual is the most negative scaled second difference.
CheckReport rank_one_convexity_scan(const Integrand& F, double box_half_width,
                                    long long samples, std::uint64_t seed, double tol,
                                    int threads = 1);

/// (lambda_i d_i f - lambda_j d_j f) / (lambda_i - lambda_j) with f the
/// diagonal representation and fourth-order central differences of base
/// step fd_step, scaled per entry by max(1, |lambda_k|). The stencil spans
/// +-2 steps, so fd_step must stay below half the relative spectral gaps.
/// Requires i != j, distinct entries, all entries positive.
double baker_ericksen_value(const Integrand& F, const std::vector<double>& lambda,
                            int i, int j, double fd_step = 1e-3);

/// Sweeps random strictly ordered positive spectra; worst_residual is the
/// smallest pair expression, which must stay above -tol.
CheckReport baker_ericksen_sweep(const Integrand& F, long long samples,
                                 std::uint64_t seed, double tol = 1e-6,
                                 int threads = 1);

/// True when sigma_k(A) <= sigma_k(B) for k < n and sigma_n(A) = sigma_n(B),
/// both within tol * max(1, |sigma_k(B)|).
bool monotonicity_precondition(const SquareMatrix& A, const SquareMatrix& B,
                               double tol = 1e-12);

/// Asserts F(A) <= F(B) + tol * max(1, |F(B)|) for a pair satisfying the
/// partial-product ordering; throws PreconditionError otherwise.
CheckReport monotonicity_check(const Integrand& F, const SquareMatrix& A,
                               const SquareMatrix& B, double tol = 1e-9);

/// Draws B with random well-separated spectrum, then A by log-interpolating
/// inside the feasible intervals that pin det A = det B and shrink the outer
/// partial products; both get independent rotations, and half the draws
/// flip the determinant sign on both sides.
std::pair<SquareMatrix, SquareMatrix> monotonicity_pair_sampler(Rng& rng, int n);

CheckReport monotonicity_sweep(const Integrand& F, long long samples,
                               std::uint64_t seed, double tol = 1e-9, int threads = 1);

/// Compares the sampled minimum over the operator-norm ball of radius 5
/// against the sampled minimum over conformal/anticonformal matrices of the
/// same scale; passes unless the former undercuts the latter by more than
/// tol (scaled).
CheckReport infimum_reduction_probe(const Integrand& F, long long samples,
                                    std::uint64_t seed, double tol = 1e-7,
                                    int threads = 1);

/// Convex-in-minors certificate evaluated through a callback.
using MinorsCertificate = std::function<double(const MinorsVector&)>;

/// Verifies G(M(A)) = F(A) (touching) and F >= G o M on random samples plus
/// 50 multistart local minimizations of the scaled gap.
CheckReport polyconvexity_certificate_check(const Integrand& F, const SquareMatrix& A,
                                            const MinorsCertificate& G,
                                            long long samples, std::uint64_t seed,
                                            double tol = 1e-9, int threads = 1);

struct ViolationSearchConfig {
    int points = 3;  // decomposition size k, at most minors_length(n) + 1
    int restarts = 12;
    std::uint64_t seed = 42;
    double tol = 1e-7;
};

/// Searches for a minors decomposition of A whose weighted value average
/// undercuts F(A): a three-point diagonal ansatz with exact relations is
/// tried first (deterministic for the scaled-identity centers it covers),
/// then a conformal-plus-cone ansatz, then penalty-method descent over
/// diagonal and full matrices with a Gauss-Newton reprojection onto the
/// relations. Returns the decomposition found, or nullopt.
std::optional<MinorsDecomposition> polyconvexity_violation_search(
    const Integrand& F, const SquareMatrix& A, const ViolationSearchConfig& cfg = {});

/// Midpoint convexity of g on all pairs of grid points along [a, b].
CheckReport convexity_segment_check(const std::function<double(double, double)>& g,
                                    std::array<double, 2> a, std::array<double, 2> b,
                                    int grid, double tol = 1e-12);

/// A subgradient of the clipped certificate function h^+ at (t, d): the
/// closed-form gradient inside its convexity region, the zero vector
/// outside and at the degenerate corner.
std::array<double, 2> h_plus_subgradient(double t, double d, double p);

/// Asserts the planar subgradient inequality between the clipped integrand
/// values at A and B; exact in reals, so tol only absorbs roundoff.
CheckReport bppc_subgradient_check(const SquareMatrix& A, const SquareMatrix& B,
                                   double p, double tol = 1e-9);

CheckReport bppc_sweep(double p, long long samples, std::uint64_t seed,
                       double tol = 1e-9, int threads = 1);

/// For F with F(0) = 0: samples rank-one X and asserts F(X) >= 0 or
/// F(-X) >= 0 (scaled); a consequence of rank-one convexity.
CheckReport rank_one_dichotomy_check(const Integrand& F, long long samples,
                                     std::uint64_t seed, double tol = 1e-9,
                                     int threads = 1);

/// Derives, by finite differences, the unique coefficients any affine
/// function of the minors must take to minorize and touch the cubic
/// positive part at diag(1,0,0), then exhibits the sign obstruction on the
/// segment diag(0, y, -y). Requires p > 3. The report carries the
/// coefficient residuals and the closed-form margins on both sides of y=1.
std::pair<Prop49Coefficients, CheckReport> minors_fit_obstruction(
    double p, double fd_step = 1e-6, double tol = 1e-6);

}  // namespace scv
