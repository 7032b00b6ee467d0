#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "scv/errors.hpp"
#include "scv/integrands.hpp"
#include "scv/matrix.hpp"
#include "scv/rng.hpp"

using namespace scv;

TEST_CASE("normalization at the identity and the reflected identity") {
    struct Case {
        double p;
        int n;
    };
    for (const Case c : {Case{1.0, 2}, Case{1.5, 2}, Case{2.0, 2}, Case{1.5, 3},
                         Case{2.0, 3}, Case{3.0, 3}}) {
        const Integrand F = Integrand::burkholder(c.p, c.n);
        CHECK(F(SquareMatrix::identity(c.n)) ==
              doctest::Approx(c.n / c.p).epsilon(1e-14));
    }
    for (const Case c : {Case{2.0, 2}, Case{3.0, 2}, Case{4.0, 2}, Case{3.0, 3}}) {
        const Integrand F = Integrand::burkholder(c.p, c.n);
        CHECK(F(SquareMatrix::identity(c.n)) ==
              doctest::Approx(2.0 - c.n / c.p).epsilon(1e-14));
        CHECK(F(SquareMatrix::reflected_identity(c.n)) ==
              doctest::Approx(-c.n / c.p).epsilon(1e-14));
    }
    // p = 4, n = 2: (|1 - 1/2| - 1) * 1 = -1/2 at the reflected identity.
    CHECK(Integrand::burkholder(4.0, 2)(SquareMatrix::reflected_identity(2)) ==
          doctest::Approx(-0.5).epsilon(1e-14));
}

TEST_CASE("p = n reduces to the determinant") {
    Rng rng(41);
    for (int n : {2, 3}) {
        const Integrand F = Integrand::burkholder(static_cast<double>(n), n);
        for (int trial = 0; trial < 40; ++trial) {
            const SquareMatrix A = random_box_matrix(rng, n, 5.0);
            CHECK(F(A) == doctest::Approx(det(A)).epsilon(1e-11));
        }
    }
}

TEST_CASE("product form agrees with the defining formula for n = 2, p > 2") {
    Rng rng(43);
    for (double p : {2.5, 3.0, 4.0}) {
        const Integrand F = Integrand::burkholder(p, 2);
        for (int trial = 0; trial < 60; ++trial) {
            const SquareMatrix A = random_box_matrix(rng, 2, 5.0);
            const double ref = F(A);
            CHECK(burkholder_alt(A, p) ==
                  doctest::Approx(ref).epsilon(1e-10).scale(std::max(1.0, std::fabs(ref))));
        }
    }
}

TEST_CASE("positive homogeneity of degree p") {
    Rng rng(47);
    const Integrand F = Integrand::burkholder(2.5, 2);
    for (int trial = 0; trial < 40; ++trial) {
        const SquareMatrix A = random_box_matrix(rng, 2, 3.0);
        const double s = rng.uniform(0.1, 4.0);
        const double lhs = F(s * A);
        const double rhs = std::pow(s, 2.5) * F(A);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11).scale(std::max(1.0, std::fabs(rhs))));
    }
    CHECK(F.homogeneity() == doctest::Approx(2.5));
    CHECK_FALSE(Integrand::b_sharp().homogeneity().has_value());
}

TEST_CASE("isotropy under two-sided rotations") {
    Rng rng(53);
    for (const char* desc :
         {"burkholder:p=1.5,n=3", "det_plus_power:p=3,n=2", "conf_norm_minus:n=2"}) {
        const Integrand F = parse_integrand(desc);
        const int n = F.dim();
        for (int trial = 0; trial < 25; ++trial) {
            const SquareMatrix A = random_box_matrix(rng, n, 4.0);
            const SquareMatrix Q = random_rotation(rng, n);
            const SquareMatrix R = random_rotation(rng, n);
            const double ref = F(A);
            CHECK(F(Q * A * R) ==
                  doctest::Approx(ref).epsilon(1e-9).scale(std::max(1.0, std::fabs(ref))));
        }
    }
}

TEST_CASE("symmetry probe accepts isotropic integrands and rejects a control") {
    const CheckReport ok = symmetry_probe(Integrand::burkholder(2.5, 2), 500, 97);
    CHECK(ok.passed);
    CHECK(ok.worst_residual <= 1e-9);

    // Entry-wise integrand, not isotropic: F(A) = a_00.
    const Integrand bad = Integrand::custom(
        "first_entry", 2, [](const SquareMatrix& A) { return A(0, 0); }, 1.0);
    const CheckReport report = symmetry_probe(bad, 500, 97);
    CHECK_FALSE(report.passed);
    CHECK(report.worst_residual > 1e-3);
}

TEST_CASE("anisotropic family values") {
    const Integrand F = Integrand::fp_aniso(3.0);
    CHECK(F(SquareMatrix::identity(2)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(F(SquareMatrix::diagonal({9.0, -3.0})) == 0.0);
    CHECK(F(SquareMatrix::diagonal({-3.0, 9.0})) == 0.0);
    CHECK(F(SquareMatrix(2, {0.0, 1.0, -1.0, 0.0})) == doctest::Approx(1.0).epsilon(1e-14));
    // (1*1 + (4 + 0)/2)^{3/2} = 3^{3/2}
    CHECK(F(SquareMatrix(2, {1.0, 2.0, 0.0, 1.0})) ==
          doctest::Approx(std::pow(3.0, 1.5)).epsilon(1e-13));
}

TEST_CASE("conformal norms as integrands") {
    Rng rng(59);
    const Integrand plus = Integrand::conf_norm(Sign::plus, 2);
    const Integrand minus = Integrand::conf_norm(Sign::minus, 2);
    const SquareMatrix Q = random_rotation(rng, 2);
    CHECK(plus(3.0 * Q) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(minus(3.0 * Q) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    const SquareMatrix R = 2.0 * Q * SquareMatrix::reflected_identity(2);
    CHECK(plus(R) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(minus(R) == doctest::Approx(2.0).epsilon(1e-12));
    // The tilde transform swaps the two cones.
    const Integrand swapped = Integrand::tilde(plus);
    for (int trial = 0; trial < 20; ++trial) {
        const SquareMatrix A = random_box_matrix(rng, 2, 4.0);
        CHECK(swapped(A) == doctest::Approx(minus(A)).epsilon(1e-12));
    }
}

TEST_CASE("hat transform and its involution") {
    Rng rng(61);
    const Integrand F = Integrand::burkholder(3.0, 2);
    const Integrand Fhat = Integrand::hat(F);
    CHECK(Fhat.requires_positive_det());
    CHECK_FALSE(F.requires_positive_det());
    CHECK_THROWS_AS(Fhat(SquareMatrix::diagonal({1.0, -1.0})), EvalDomainError);
    const Integrand Fhathat = Integrand::hat(Fhat);
    for (int trial = 0; trial < 30; ++trial) {
        SquareMatrix A = random_box_matrix(rng, 2, 3.0);
        if (det(A) <= 1e-6) {
            A = A + 3.0 * SquareMatrix::identity(2);
            if (det(A) <= 1e-6) continue;
        }
        const SquareMatrix inv = inverse(A);
        CHECK(Fhat(A) == doctest::Approx(F(inv) * det(A)).epsilon(1e-11));
        const double ref = F(A);
        CHECK(Fhathat(A) ==
              doctest::Approx(ref).epsilon(1e-10).scale(std::max(1.0, std::fabs(ref))));
    }
}

TEST_CASE("positive part and power composition") {
    const Integrand B = Integrand::burkholder(4.0, 2);
    const Integrand Bplus = Integrand::positive_part(B);
    const SquareMatrix Abar = SquareMatrix::reflected_identity(2);
    CHECK(B(Abar) < 0.0);
    CHECK(Bplus(Abar) == 0.0);
    CHECK(Bplus(SquareMatrix::identity(2)) == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(Integrand::burkholder_plus(4.0, 2)(Abar) == 0.0);

    const Integrand pow2 = Integrand::power_compose(B, 2.0);
    CHECK(pow2.homogeneity() == doctest::Approx(8.0));
    CHECK(pow2(SquareMatrix::identity(2)) == doctest::Approx(2.25).epsilon(1e-14));
    CHECK(pow2(Abar) == 0.0);
}

TEST_CASE("descriptor grammar round trips and rejections") {
    CHECK(parse_integrand("burkholder:p=1,n=2")(SquareMatrix::identity(2)) ==
          doctest::Approx(2.0).epsilon(1e-14));
    CHECK(parse_integrand("burkholder:p=1.5").dim() == 2);  // n defaults to 2
    CHECK(parse_integrand("hat(b_sharp)").requires_positive_det());
    CHECK(parse_integrand(" burkholder : p = 2 , n = 3 ").name() == "burkholder:p=2,n=3");
    CHECK(parse_integrand("pow(det_plus:n=2,q=2)").homogeneity() == doctest::Approx(4.0));
    CHECK(parse_integrand("plus(burkholder:p=4,n=2)")(SquareMatrix::reflected_identity(2)) ==
          0.0);

    CHECK_THROWS_AS(parse_integrand(""), ParseError);
    CHECK_THROWS_AS(parse_integrand("unknown_kind"), ParseError);
    CHECK_THROWS_AS(parse_integrand("burkholder:p=1,n=2,junk=3"), ParseError);
    CHECK_THROWS_AS(parse_integrand("burkholder:n=2"), ParseError);  // p required
    CHECK_THROWS_AS(parse_integrand("burkholder:p=0.5,n=2"), ParseError);  // p < n/2
    CHECK_THROWS_AS(parse_integrand("fp_aniso:p=3,n=3"), ParseError);
    CHECK_THROWS_AS(parse_integrand("fp_aniso:p=1.5"), ParseError);  // p < 2
    CHECK_THROWS_AS(parse_integrand("det_plus_power:p=1.5,n=2"), ParseError);  // p < n
    CHECK_THROWS_AS(parse_integrand("hat(b_sharp"), ParseError);
    CHECK_THROWS_AS(parse_integrand("pow(b_sharp)"), ParseError);  // q required
    CHECK_THROWS_AS(parse_integrand("spin(b_sharp)"), ParseError);
    CHECK_THROWS_AS(parse_integrand("burkholder:p=abc"), ParseError);
}

TEST_CASE("evaluation rejects dimension mismatches") {
    const Integrand F = Integrand::burkholder(2.0, 2);
    CHECK_THROWS_AS(F(SquareMatrix::identity(3)), PreconditionError);
}

TEST_CASE("limit integrand values and quotient convergence") {
    const SquareMatrix A = SquareMatrix::diagonal({2.0, 1.0});
    CHECK(b_sharp_value(A) == doctest::Approx(2.0 + std::log(4.0)).epsilon(1e-14));
    CHECK_THROWS_AS(b_sharp_value(SquareMatrix::diagonal({1.0, -1.0})), EvalDomainError);

    const double ref = b_sharp_value(A);
    const double coarse = std::fabs(b_sharp_limit_quotient(A, 2.0 + 1e-2) - ref);
    const double fine = std::fabs(b_sharp_limit_quotient(A, 2.0 + 1e-3) - ref);
    CHECK(fine < coarse);
    const double ratio = coarse / fine;
    CHECK(ratio >= 8.0);
    CHECK(ratio <= 12.0);
    CHECK_THROWS_AS(b_sharp_limit_quotient(A, 2.0), ParseError);
}

TEST_CASE("hat of the limit integrand matches its closed form") {
    Rng rng(67);
    const Integrand Fhat = Integrand::hat(Integrand::b_sharp());
    for (int trial = 0; trial < 200; ++trial) {
        SquareMatrix A = random_box_matrix(rng, 2, 3.0);
        if (det(A) <= 1e-4) continue;
        const double ref = b_sharp_hat_closed_form(A);
        CHECK(Fhat(A) ==
              doctest::Approx(ref).epsilon(1e-11).scale(std::max(1.0, std::fabs(ref))));
    }
}

TEST_CASE("planar certificate function values and derivatives") {
    Rng rng(71);
    for (double p : {2.5, 3.0, 4.0}) {
        const Integrand F = Integrand::burkholder(p, 2);
        for (int trial = 0; trial < 60; ++trial) {
            const SquareMatrix A = random_box_matrix(rng, 2, 4.0);
            const ConformalCoordinates c = conformal_coordinates(A);
            const double ref = F(A);
            CHECK(h_value(c.t, c.d, p) ==
                  doctest::Approx(ref).epsilon(1e-10).scale(std::max(1.0, std::fabs(ref))));
        }
        // Central differences against the closed-form gradient.
        const double step = 1e-6;
        for (const auto& pt : std::vector<std::array<double, 2>>{
                 {1.0, 0.5}, {0.7, -0.2}, {2.0, 3.0}, {1.5, -0.5}}) {
            const auto g = h_gradient(pt[0], pt[1], p);
            const double gt =
                (h_value(pt[0] + step, pt[1], p) - h_value(pt[0] - step, pt[1], p)) /
                (2.0 * step);
            const double gd =
                (h_value(pt[0], pt[1] + step, p) - h_value(pt[0], pt[1] - step, p)) /
                (2.0 * step);
            CHECK(g[0] == doctest::Approx(gt).epsilon(5e-8).scale(std::max(1.0, std::fabs(gt))));
            CHECK(g[1] == doctest::Approx(gd).epsilon(5e-8).scale(std::max(1.0, std::fabs(gd))));
        }
    }
}

TEST_CASE("certificate Hessian is rank one and blows up on the cone boundary") {
    const double p = 3.0;
    const SquareMatrix H = h_hessian(1.2, 0.4, p);
    CHECK(det(H) == doctest::Approx(0.0).scale(std::fabs(H(0, 0)) + 1.0).epsilon(1e-11));
    CHECK(H(0, 1) == doctest::Approx(H(1, 0)).epsilon(1e-14));
    CHECK(H(0, 0) > 0.0);
    CHECK_THROWS_AS(h_hessian(1.0, -1.0, p), EvalDomainError);
}

TEST_CASE("clipped certificate vanishes on the degeneracy curve") {
    for (double p : {2.5, 3.0, 4.0}) {
        const double c = h_convexity_region_coefficient(p);
        CHECK(c == doctest::Approx(p * (p - 2.0) / ((p - 1.0) * (p - 1.0))).epsilon(1e-15));
        CHECK(c < 1.0);
        for (double t : {0.5, 1.0, 2.0}) {
            CHECK(std::fabs(h_value(t, -c * t * t, p)) <= 1e-12);
            CHECK(h_plus_value(t, -c * t * t, p) == doctest::Approx(0.0).scale(1.0));
            // Strictly outside the region the clipped value is exactly zero.
            CHECK(h_plus_value(t, -c * t * t - 0.1, p) == 0.0);
            CHECK(h_plus_value(t, -c * t * t + 0.1, p) > 0.0);
        }
    }
}
