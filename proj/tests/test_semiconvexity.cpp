#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "scv/errors.hpp"
#include "scv/integrands.hpp"
#include "scv/matrix.hpp"
#include "scv/rng.hpp"
#include "scv/semiconvexity.hpp"

using namespace scv;

TEST_CASE("rank-one directions normalize and reject zero factors") {
    const RankOneDirection dir = RankOneDirection::normalized({3.0, 4.0}, {0.0, 2.0});
    CHECK(dir.x[0] == doctest::Approx(0.6));
    CHECK(dir.x[1] == doctest::Approx(0.8));
    CHECK(dir.y[1] == doctest::Approx(1.0));
    const SquareMatrix X = dir.outer();
    CHECK(X(0, 1) == doctest::Approx(0.6));
    CHECK(X(1, 0) == doctest::Approx(0.0).scale(1.0));
    CHECK_THROWS_AS(RankOneDirection::normalized({0.0, 0.0}, {1.0, 0.0}),
                    PreconditionError);
    CHECK_THROWS_AS(RankOneDirection::normalized({1.0}, {1.0, 0.0}), PreconditionError);
}

TEST_CASE("second difference is exact on a rank-one quadratic") {
    // F(A) = <A, X>^2 has second difference 2 ||X||_F^4 = 2 along X itself.
    const RankOneDirection dir = RankOneDirection::normalized({1.0, 2.0}, {2.0, -1.0});
    const SquareMatrix X = dir.outer();
    const Integrand F = Integrand::custom(
        "pairing_square", 2,
        [X](const SquareMatrix& A) {
            double s = 0.0;
            for (std::size_t k = 0; k < A.a.size(); ++k) s += A.a[k] * X.a[k];
            return s * s;
        },
        2.0);
    for (double h : {1e-2, 1e-3, 1e-4}) {
        CHECK(rank_one_second_difference(F, SquareMatrix::identity(2), dir, h) ==
              doctest::Approx(2.0).epsilon(1e-6));
    }
}

TEST_CASE("rank-one convexity scan passes the catalog and fails a concave control") {
    const CheckReport ok =
        rank_one_convexity_scan(Integrand::burkholder(4.0, 2), 5.0, 2000, 42, 1e-7, 2);
    CHECK(ok.passed);
    CHECK(ok.samples == 2000);

    const Integrand bad = Integrand::custom(
        "negative_frobenius_square", 2,
        [](const SquareMatrix& A) {
            double s = 0.0;
            for (double v : A.a) s += v * v;
            return -s;
        },
        2.0);
    const CheckReport report = rank_one_convexity_scan(bad, 5.0, 2000, 42, 1e-7, 2);
    CHECK_FALSE(report.passed);
    CHECK(report.worst_residual < -1.0);
    REQUIRE_FALSE(report.witness.is_null());
    CHECK(report.witness.contains("matrix"));
    CHECK(report.witness.contains("x"));
}

TEST_CASE("ordered-force values and sweeps") {
    // p = 3, n = 2 at diag(2, 1): the pair expression evaluates to 12.
    const double v = baker_ericksen_value(Integrand::burkholder(3.0, 2), {2.0, 1.0}, 0, 1);
    CHECK(v == doctest::Approx(12.0).epsilon(1e-6));

    CHECK_THROWS_AS(
        baker_ericksen_value(Integrand::burkholder(3.0, 2), {2.0, 1.0}, 0, 0),
        PreconditionError);
    CHECK_THROWS_AS(
        baker_ericksen_value(Integrand::burkholder(3.0, 2), {2.0, -1.0}, 0, 1),
        PreconditionError);
    CHECK_THROWS_AS(
        baker_ericksen_value(Integrand::burkholder(3.0, 2), {1.0, 1.0}, 0, 1),
        PreconditionError);

    const CheckReport sweep =
        baker_ericksen_sweep(Integrand::burkholder(3.0, 2), 2000, 42, 1e-6, 2);
    CHECK(sweep.passed);
    CHECK(sweep.worst_residual >= -1e-6);
}

TEST_CASE("partial-product monotonicity") {
    const SquareMatrix id = SquareMatrix::identity(2);
    const SquareMatrix wide = SquareMatrix::diagonal({2.0, 0.5});
    CHECK(monotonicity_precondition(id, wide));
    CHECK_FALSE(monotonicity_precondition(wide, id));

    const CheckReport ok = monotonicity_check(Integrand::burkholder(4.0, 2), id, wide);
    CHECK(ok.passed);
    CHECK(ok.witness["F_A"].get<double>() == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(ok.witness["F_B"].get<double>() == doctest::Approx(12.0).epsilon(1e-12));

    CHECK_THROWS_AS(monotonicity_check(Integrand::burkholder(4.0, 2), wide, id),
                    PreconditionError);

    // Decreasing control: the inequality direction flips.
    const Integrand bad = Integrand::custom(
        "negative_operator_norm", 2,
        [](const SquareMatrix& A) { return -operator_norm(A); }, 1.0);
    CHECK_FALSE(monotonicity_check(bad, id, wide).passed);

    // A degenerate pair with vanishing determinant on both sides.
    CHECK(monotonicity_precondition(SquareMatrix::diagonal({1.0, 0.0}),
                                    SquareMatrix::diagonal({2.0, 0.0})));
}

TEST_CASE("monotonicity sampler produces valid ordered pairs of both signs") {
    for (int n : {2, 3}) {
        Rng rng(73);
        int negative = 0;
        for (int trial = 0; trial < 500; ++trial) {
            const auto [A, B] = monotonicity_pair_sampler(rng, n);
            CHECK(monotonicity_precondition(A, B, 1e-9));
            if (det(B) < 0.0) ++negative;
        }
        CHECK(negative > 100);
        CHECK(negative < 400);
    }
    const CheckReport sweep =
        monotonicity_sweep(Integrand::burkholder(4.0, 2), 2000, 42, 1e-9, 2);
    CHECK(sweep.passed);
}

TEST_CASE("minors decompositions and the Jensen gap") {
    MinorsDecomposition dec;
    dec.center = SquareMatrix::identity(2);
    dec.weights = {0.5, 0.5};
    dec.points = {SquareMatrix::diagonal({2.0, 1.0}), SquareMatrix::diagonal({0.0, 1.0})};
    CHECK(minors_relation_residual(dec) <= 1e-15);

    // An affine function of the minors has zero gap.
    const Integrand affine = Integrand::custom(
        "det_plus_trace", 2,
        [](const SquareMatrix& A) { return det(A) + A(0, 0) + A(1, 1); });
    CHECK(jensen_gap(affine, dec) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));

    // A strictly convex non-affine function has positive gap on this pair.
    const Integrand frob = Integrand::custom(
        "frobenius_square", 2,
        [](const SquareMatrix& A) {
            double s = 0.0;
            for (double v : A.a) s += v * v;
            return s;
        });
    CHECK(jensen_gap(frob, dec) == doctest::Approx(1.0).epsilon(1e-13));

    dec.weights = {0.7, 0.5};
    CHECK(minors_relation_residual(dec) > 1e-2);
}

TEST_CASE("violation search finds the anisotropic witness deterministically") {
    ViolationSearchConfig cfg;
    cfg.restarts = 4;
    const auto found =
        polyconvexity_violation_search(Integrand::fp_aniso(3.0), SquareMatrix::identity(2), cfg);
    REQUIRE(found.has_value());
    REQUIRE(found->points.size() == 3);
    CHECK(found->weights[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(found->points[0](0, 0) == doctest::Approx(-3.0).epsilon(1e-12));
    CHECK(found->points[0](1, 1) == doctest::Approx(-3.0).epsilon(1e-12));
    CHECK(found->points[1](0, 0) == doctest::Approx(3.0 + 2.0 * std::sqrt(3.0)).epsilon(1e-12));
    CHECK(found->points[1](1, 1) == doctest::Approx(3.0 - 2.0 * std::sqrt(3.0)).epsilon(1e-12));
    CHECK(minors_relation_residual(*found) <= 1e-14);
    CHECK(jensen_gap(Integrand::fp_aniso(3.0), *found) == doctest::Approx(-1.0).epsilon(1e-9));

    // The same witness defeats every exponent: all three points carry a
    // non-positive diagonal entry, so the average value is zero.
    CHECK(jensen_gap(Integrand::fp_aniso(4.0), *found) == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("violation search respects polyconvex integrands") {
    ViolationSearchConfig cfg;
    cfg.restarts = 4;
    // The determinant is affine in the minors; no decomposition can undercut it.
    const auto none =
        polyconvexity_violation_search(Integrand::burkholder(2.0, 2),
                                       SquareMatrix::identity(2), cfg);
    CHECK_FALSE(none.has_value());
}

TEST_CASE("violation search below the planar convexity threshold") {
    ViolationSearchConfig cfg;
    cfg.restarts = 6;
    const auto found = polyconvexity_violation_search(
        Integrand::burkholder_plus(1.5, 2), SquareMatrix::identity(2), cfg);
    REQUIRE(found.has_value());
    CHECK(minors_relation_residual(*found) <= 1e-10);
    CHECK(jensen_gap(Integrand::burkholder_plus(1.5, 2), *found) < -1e-3);
}

TEST_CASE("polyconvexity certificate accepts the determinant and rejects a fake") {
    const Integrand F = Integrand::burkholder(2.0, 2);
    const MinorsCertificate certificate = [](const MinorsVector& m) {
        return m.values.back();
    };
    const CheckReport ok =
        polyconvexity_certificate_check(F, SquareMatrix::identity(2), certificate, 2000, 42,
                                        1e-9, 2);
    CHECK(ok.passed);
    CHECK(std::fabs(ok.witness["touch_residual"].get<double>()) <= 1e-12);

    // The affine minorant forced at the identity fails for the anisotropic
    // family; the sampled gap dips below zero.
    const Integrand G = Integrand::fp_aniso(3.0);
    const MinorsCertificate touching = [](const MinorsVector& m) {
        // Affine in the minors and touching at the identity, but dominated
        // nowhere near the negative quadrant.
        return 0.5 * (m.values[0] + m.values[3]) + 1.5 * m.values[4] - 1.5;
    };
    const CheckReport bad =
        polyconvexity_certificate_check(G, SquareMatrix::identity(2), touching, 2000, 42,
                                        1e-9, 2);
    CHECK_FALSE(bad.passed);
}

TEST_CASE("infimum reduction to the conformal cones") {
    const CheckReport report =
        infimum_reduction_probe(Integrand::burkholder_plus(3.0, 2), 2000, 42, 1e-7, 2);
    CHECK(report.passed);
    CHECK(report.witness["box_min"].get<double>() >= -1e-12);
    CHECK(report.witness["cone_min"].get<double>() >= -1e-12);
}

TEST_CASE("segment midpoint convexity harness") {
    const auto linear = [](double t, double d) { return 3.0 * t - 0.5 * d + 1.0; };
    const CheckReport ok =
        convexity_segment_check(linear, {0.0, -1.0}, {2.0, 3.0}, 41, 1e-12);
    CHECK(ok.passed);
    const auto concave = [](double t, double d) { return -(t * t + d * d); };
    const CheckReport bad =
        convexity_segment_check(concave, {0.0, -1.0}, {2.0, 3.0}, 41, 1e-12);
    CHECK_FALSE(bad.passed);
    CHECK(bad.worst_residual > 0.1);
}

TEST_CASE("clipped subgradient selection") {
    const double p = 2.5;
    const double c = h_convexity_region_coefficient(p);
    // Interior: matches the closed-form gradient.
    const auto g_in = h_plus_subgradient(1.0, 0.5, p);
    const auto g_ref = h_gradient(1.0, 0.5, p);
    CHECK(g_in[0] == doctest::Approx(g_ref[0]).epsilon(1e-14));
    CHECK(g_in[1] == doctest::Approx(g_ref[1]).epsilon(1e-14));
    // Outside the convexity region and at the origin: the zero vector.
    const auto g_out = h_plus_subgradient(1.0, -c - 0.1, p);
    CHECK(g_out[0] == 0.0);
    CHECK(g_out[1] == 0.0);
    const auto g_origin = h_plus_subgradient(0.0, 0.0, p);
    CHECK(g_origin[0] == 0.0);
    CHECK(g_origin[1] == 0.0);
    CHECK_THROWS_AS(h_plus_subgradient(-1.0, 0.0, p), EvalDomainError);
    CHECK_THROWS_AS(h_plus_subgradient(1.0, 0.0, 2.0), ParseError);
}

TEST_CASE("planar subgradient inequality") {
    const double p = 4.0;
    const SquareMatrix A(2, {1.0, 2.0, -1.0, 0.5});
    const CheckReport same = bppc_subgradient_check(A, A, p);
    CHECK(same.passed);
    CHECK(same.worst_residual == doctest::Approx(0.0).scale(1.0).epsilon(1e-13));

    // Base point in the clipped region: zero subgradient, inequality reduces
    // to non-negativity of the clipped value.
    const SquareMatrix B = SquareMatrix::diagonal({1.0, -1.0});
    CHECK(bppc_subgradient_check(A, B, p).passed);

    for (double q : {2.5, 4.0}) {
        const CheckReport sweep = bppc_sweep(q, 2000, 42, 1e-9, 2);
        CHECK(sweep.passed);
        CHECK(sweep.worst_residual >= 0.0);
    }
}

TEST_CASE("rank-one dichotomy preconditions and sweep") {
    CHECK(rank_one_dichotomy_check(Integrand::burkholder(1.5, 2), 2000, 42, 1e-9, 2).passed);
    CHECK_THROWS_AS(rank_one_dichotomy_check(Integrand::b_sharp(), 100, 42),
                    PreconditionError);
    const Integrand shifted = Integrand::custom(
        "frobenius_plus_one", 2,
        [](const SquareMatrix& A) {
            double s = 1.0;
            for (double v : A.a) s += v * v;
            return s;
        });
    CHECK_THROWS_AS(rank_one_dichotomy_check(shifted, 100, 42), PreconditionError);
}

TEST_CASE("forced minorant coefficients and the sign obstruction") {
    const auto [coeffs, report] = minors_fit_obstruction(4.0);
    const std::array<double, 7> expected{1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 2.0};
    for (std::size_t i = 0; i < expected.size(); ++i) {
        CHECK(coeffs.c[i] == doctest::Approx(expected[i]).scale(1.0).epsilon(1e-6));
    }
    CHECK(report.passed);
    CHECK(report.witness["margin_below_1"].get<double>() ==
          doctest::Approx(-0.0100490025).epsilon(1e-8));
    CHECK(report.witness["margin_above_1"].get<double>() ==
          doctest::Approx(0.0099489975).epsilon(1e-8));
    CHECK(report.witness["slope_gap_at_1"].get<double>() == doctest::Approx(1.0));
    CHECK_THROWS_AS(minors_fit_obstruction(3.0), ParseError);
}
