// Acceptance gate: every release criterion in one binary, one verdict line
// each, exit 0 only if all pass. Criteria 1-13 call the library directly;
// criterion 14 shells out to the CLI whose path arrives as argv[1].
#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "scv/integrands.hpp"
#include "scv/matrix.hpp"
#include "scv/radial.hpp"
#include "scv/reproduce.hpp"
#include "scv/rng.hpp"
#include "scv/semiconvexity.hpp"

using namespace scv;

namespace {

constexpr std::uint64_t kSeed = 42;
constexpr int kThreads = 4;

struct Gate {
    int failures = 0;

    void run(int id, const std::function<bool(std::string&)>& body) {
        std::string detail;
        bool ok = false;
        try {
            ok = body(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
            ok = false;
        }
        std::printf("criterion %2d: %s (%s)\n", id, ok ? "PASS" : "FAIL", detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
};

std::string fmt(double v) {
    std::ostringstream out;
    out.precision(3);
    out << std::scientific << v;
    return out.str();
}

SquareMatrix positive_det_sample(Rng& rng, int n) {
    for (int attempt = 0; attempt < 32; ++attempt) {
        SquareMatrix A = random_box_matrix(rng, n, 2.0);
        if (det(A) < 0.0)
            for (int j = 0; j < n; ++j) A(0, j) = -A(0, j);
        if (det(A) > 1e-3) return A;
    }
    return SquareMatrix::identity(n);
}

struct CliRun {
    int exit_code = -1;
    std::string out;
};

CliRun run_cli(const std::string& cli, const std::string& args) {
    const std::string cmd = cli + " " + args + " 2>/dev/null";
    CliRun result;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return result;
    char buf[8192];
    while (std::size_t got = std::fread(buf, 1, sizeof(buf), pipe))
        result.out.append(buf, got);
    const int status = pclose(pipe);
    result.exit_code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status) : -1;
    return result;
}

const std::vector<std::pair<int, double>>& normalization_pairs() {
    static const std::vector<std::pair<int, double>> pairs{
        {2, 1.0}, {2, 1.5}, {2, 2.0}, {3, 1.5}, {3, 2.0}, {3, 3.0}};
    return pairs;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: acceptance <path-to-cli>\n");
        return 2;
    }
    const std::string cli = argv[1];
    Gate gate;

    // Normalization at the identity across the exponent range.
    gate.run(1, [](std::string& detail) {
        double worst = 0.0;
        for (const auto& [n, p] : normalization_pairs()) {
            const double v = Integrand::burkholder(p, n)(SquareMatrix::identity(n));
            worst = std::max(worst, std::fabs(v - n / p));
        }
        detail = "max |value - n/p| = " + fmt(worst);
        return worst <= 1e-12;
    });

    // Conformal-part norm identities over a large random sample.
    gate.run(2, [](std::string& detail) {
        double worst_sum = 0.0;
        double worst_det = 0.0;
        for (std::uint64_t i = 0; i < 100000; ++i) {
            Rng rng = stream_for(kSeed, i);
            const int n = (i % 2 == 0) ? 2 : 3;
            const SquareMatrix A = random_box_matrix(rng, n, 3.0);
            const ConformalCoordinates cc = conformal_coordinates(A);
            const double norm_half = std::pow(operator_norm(A), 0.5 * n);
            const double dt = det(A);
            worst_sum = std::max(worst_sum,
                                 std::fabs(cc.plus_norm + cc.minus_norm - norm_half) /
                                     std::max(1.0, norm_half));
            worst_det = std::max(
                worst_det,
                std::fabs(cc.plus_norm * cc.plus_norm - cc.minus_norm * cc.minus_norm - dt) /
                    std::max(1.0, norm_half * norm_half));
        }
        detail = "sum identity " + fmt(worst_sum) + ", det identity " + fmt(worst_det);
        return worst_sum <= 1e-11 && worst_det <= 1e-11;
    });

    // Radial energies of nonexpanding two-piece profiles are quasiaffine.
    gate.run(3, [](std::string& detail) {
        const QuadratureSpec quad;
        double worst = 0.0;
        const std::array<double, 5> alphas{-1.0, -0.5, 0.0, 0.5, 1.0};
        for (const auto& [n, p] : normalization_pairs()) {
            const Integrand F = Integrand::burkholder(p, n);
            for (double alpha : alphas) {
                const double e =
                    radial_energy(F, RadialProfile::two_piece_power(alpha), false, quad);
                worst = std::max(worst, std::fabs(e - n / p));
            }
        }
        for (double p : {2.0, 3.0, 4.0}) {
            const Integrand F = Integrand::burkholder(p, 2);
            for (double alpha : alphas) {
                const double e =
                    radial_energy(F, RadialProfile::two_piece_power(alpha), true, quad);
                worst = std::max(worst, std::fabs(e + 2.0 / p));
            }
        }
        detail = "max |energy - reference| = " + fmt(worst);
        return worst <= 1e-8;
    });

    // The three-point polyconvexity counterexample for the anisotropic family.
    gate.run(4, [](std::string& detail) {
        const Integrand F = Integrand::fp_aniso(3.0);
        ViolationSearchConfig cfg;
        cfg.seed = kSeed;
        const auto dec = polyconvexity_violation_search(F, SquareMatrix::identity(2), cfg);
        if (!dec) {
            detail = "no decomposition found";
            return false;
        }
        const double relres = minors_relation_residual(*dec);
        const double center = F(dec->center);
        double averaged = 0.0;
        for (std::size_t i = 0; i < dec->points.size(); ++i)
            averaged += dec->weights[i] * F(dec->points[i]);
        const double gap = jensen_gap(F, *dec);
        detail = "relation residual " + fmt(relres) + ", averaged " + fmt(averaged) +
                 ", gap " + fmt(gap);
        return relres <= 1e-14 && std::fabs(center - 1.0) <= 1e-12 &&
               std::fabs(averaged) <= 1e-14 && std::fabs(gap + 1.0) <= 1e-12;
    });

    // The clipped p = 1.5 integrand: strict Jensen deficiency plus the affine
    // segment that pins the failure of polyconvexity at the identity.
    gate.run(5, [](std::string& detail) {
        const double p = 1.5;
        const Integrand F = Integrand::burkholder_plus(p, 2);
        const double two_point = 0.5 * F(SquareMatrix::diagonal({2.0, 0.0})) +
                                 0.5 * F(SquareMatrix::diagonal({0.0, 2.0}));
        const double center = F(SquareMatrix::identity(2));
        const double t0 = 1.0 - 1.0 / p;
        auto seg = [&](double t) {
            return F(SquareMatrix::diagonal({1.0, 2.0 * t - 1.0}));
        };
        const double v0 = seg(t0);
        const double v1 = seg(1.0);
        double affinity = 0.0;
        for (int i = 0; i <= 100; ++i) {
            const double t = t0 + (1.0 - t0) * i / 100.0;
            const double line = v0 + (v1 - v0) * (t - t0) / (1.0 - t0);
            affinity = std::max(affinity, std::fabs(seg(t) - line));
        }
        detail = "two-point average " + fmt(two_point) + ", affinity residual " +
                 fmt(affinity);
        return std::fabs(two_point - std::pow(2.0, 1.5) / 3.0) <= 1e-12 &&
               two_point < center && std::fabs(center - 4.0 / 3.0) <= 1e-12 &&
               affinity <= 1e-12 && std::fabs(v0) <= 1e-12;
    });

    // The planar convexity certificate: closed-form Hessian against finite
    // differences, rank-one degeneracy, and the boundary zeros.
    gate.run(6, [](std::string& detail) {
        double worst_fd = 0.0;
        double worst_det = 0.0;
        double worst_boundary = 0.0;
        for (double p : {2.5, 3.0, 4.0}) {
            const double c = h_convexity_region_coefficient(p);
            for (int i = 0; i < 20; ++i) {
                const double t = 0.25 + (2.5 - 0.25) * i / 19.0;
                for (int j = 0; j < 20; ++j) {
                    const double lo = -0.8 * c * t * t;
                    const double d = lo + (4.0 - lo) * j / 19.0;
                    const SquareMatrix H = h_hessian(t, d, p);
                    auto f = [&](double tt, double dd) { return h_value(tt, dd, p); };
                    // Fourth-order stencils: one-shot second differences sit
                    // on a roundoff floor of about 1e-5 |h| / step^2 here.
                    const double h = 2e-4 * std::max(1.0, t + std::sqrt(t * t + d));
                    auto axis = [&](bool along_t) {
                        auto g = [&](double k) {
                            return along_t ? f(t + k, d) : f(t, d + k);
                        };
                        return (-g(2.0 * h) + 16.0 * g(h) - 30.0 * g(0.0) + 16.0 * g(-h) -
                                g(-2.0 * h)) /
                               (12.0 * h * h);
                    };
                    auto cross = [&](double s) {
                        return (f(t + s, d + s) - f(t + s, d - s) - f(t - s, d + s) +
                                f(t - s, d - s)) /
                               (4.0 * s * s);
                    };
                    const double htt = axis(true);
                    const double hdd = axis(false);
                    const double htd = (4.0 * cross(0.5 * h) - cross(h)) / 3.0;
                    worst_fd = std::max(worst_fd, std::fabs(htt - H(0, 0)) /
                                                      std::max(1.0, std::fabs(H(0, 0))));
                    worst_fd = std::max(worst_fd, std::fabs(hdd - H(1, 1)) /
                                                      std::max(1.0, std::fabs(H(1, 1))));
                    worst_fd = std::max(worst_fd, std::fabs(htd - H(0, 1)) /
                                                      std::max(1.0, std::fabs(H(0, 1))));
                    const double hdet = H(0, 0) * H(1, 1) - H(0, 1) * H(1, 0);
                    worst_det = std::max(
                        worst_det,
                        std::fabs(hdet) / std::max(1.0, std::fabs(H(0, 0) * H(1, 1))));
                }
            }
            for (double t : {0.5, 1.0, 2.0})
                worst_boundary =
                    std::max(worst_boundary, std::fabs(h_value(t, -c * t * t, p)));
        }
        detail = "fd " + fmt(worst_fd) + ", det " + fmt(worst_det) + ", boundary " +
                 fmt(worst_boundary);
        return worst_fd <= 1e-6 && worst_det <= 1e-9 && worst_boundary <= 1e-12;
    });

    // Subgradient inequality for the clipped planar certificate.
    gate.run(7, [](std::string& detail) {
        double worst = 0.0;
        bool ok = true;
        for (double p : {2.5, 4.0}) {
            const CheckReport rep = bppc_sweep(p, 10000, kSeed, 1e-9, kThreads);
            ok = ok && rep.passed;
            worst = std::min(worst, rep.worst_residual);
        }
        detail = "min scaled margin = " + fmt(worst);
        return ok && worst >= -1e-9;
    });

    // Baker-Ericksen inequalities across the exponent range.
    gate.run(8, [](std::string& detail) {
        double worst = 0.0;
        bool ok = true;
        for (const auto& [n, p] : normalization_pairs()) {
            const CheckReport rep = baker_ericksen_sweep(Integrand::burkholder(p, n), 10000,
                                                         kSeed, 1e-6, kThreads);
            ok = ok && rep.passed;
            worst = std::min(worst, rep.worst_residual);
        }
        detail = "min expression value = " + fmt(worst);
        return ok && worst >= -1e-6;
    });

    // Monotonicity along the ordered-spectrum preorder. The sweep residual
    // is the scaled excess F(A) - F(B), so the worst case is a maximum.
    gate.run(9, [](std::string& detail) {
        const std::vector<Integrand> catalog{Integrand::burkholder(4.0, 2),
                                             Integrand::burkholder(4.0, 3),
                                             Integrand::burkholder_plus(3.0, 2)};
        double worst = -1.0;
        bool ok = true;
        for (const Integrand& F : catalog) {
            const CheckReport rep = monotonicity_sweep(F, 10000, kSeed, 1e-9, kThreads);
            ok = ok && rep.passed;
            worst = std::max(worst, rep.worst_residual);
        }
        detail = "max scaled excess = " + fmt(worst);
        return ok && worst <= 1e-9;
    });

    // The determinant-power certificate minorizes the clipped integrand.
    gate.run(10, [](std::string& detail) {
        const std::vector<std::pair<int, double>> cases{{2, 2.0}, {2, 4.0}, {3, 3.0},
                                                        {3, 5.0}};
        double worst_gap = 0.0;
        double worst_touch = 0.0;
        bool ok = true;
        for (const auto& [n, p] : cases) {
            const Integrand F = Integrand::burkholder_plus(p, n);
            const double scale = F(SquareMatrix::identity(n));
            const double exponent = p / n;
            auto G = [scale, exponent](const MinorsVector& m) {
                return scale * std::pow(std::max(m.values.back(), 0.0), exponent);
            };
            const CheckReport rep = polyconvexity_certificate_check(
                F, SquareMatrix::identity(n), G, 100000, kSeed, 1e-9, kThreads);
            ok = ok && rep.passed;
            worst_gap = std::min(worst_gap, rep.worst_residual);
            worst_touch =
                std::max(worst_touch, rep.witness["touch_residual"].get<double>());
        }
        detail = "min scaled gap " + fmt(worst_gap) + ", touch residual " +
                 fmt(worst_touch);
        return ok && worst_gap >= -1e-9 && worst_touch <= 1e-9;
    });

    // The forced affine-minors fit and its sign obstruction at p = 4.
    gate.run(11, [](std::string& detail) {
        const auto [coeffs, rep] = minors_fit_obstruction(4.0);
        const std::array<double, 7> expected{1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 2.0};
        double coeff_dev = 0.0;
        for (std::size_t i = 0; i < 7; ++i)
            coeff_dev = std::max(coeff_dev, std::fabs(coeffs.c[i] - expected[i]));
        auto closed = [](double y) {
            return (4.0 - 3.0) * ((y * y - 1.0) - (std::pow(y, 4.0) - 1.0) / 4.0);
        };
        const double below = rep.witness["margin_below_1"].get<double>();
        const double above = rep.witness["margin_above_1"].get<double>();
        const double agree = std::max(std::fabs(below - closed(0.99)),
                                      std::fabs(above - closed(1.01)));
        detail = "coefficients " + fmt(coeff_dev) + ", closed form " + fmt(agree) +
                 "; closed-form margin is negative at y=0.99 and positive at y=1.01; "
                 "positivity asserted at y=1.01";
        return coeff_dev <= 1e-6 && agree <= 1e-10 && above > 0.0 && below < 0.0;
    });

    // Rank-one convexity scans across the catalog plus a failing control.
    gate.run(12, [](std::string& detail) {
        bool ok = true;
        double worst = 0.0;
        // 1e-6 is the second-difference roundoff floor class: exact zeros
        // along null directions read back as noise of a few times 1e-8.
        for (const auto& [n, p] : normalization_pairs()) {
            const CheckReport rep = rank_one_convexity_scan(Integrand::burkholder(p, n), 5.0,
                                                            100000, kSeed, 1e-6, kThreads);
            ok = ok && rep.passed;
            worst = std::min(worst, rep.worst_residual);
        }
        for (double p : {2.0, 3.0}) {
            const CheckReport rep = rank_one_convexity_scan(Integrand::fp_aniso(p), 5.0,
                                                            100000, kSeed, 1e-6, kThreads);
            ok = ok && rep.passed;
            worst = std::min(worst, rep.worst_residual);
        }
        const Integrand control = Integrand::custom(
            "neg_first_entry_square", 2,
            [](const SquareMatrix& A) { return -A(0, 0) * A(0, 0); }, 2.0);
        const CheckReport bad =
            rank_one_convexity_scan(control, 5.0, 2000, kSeed, 1e-6, kThreads);
        detail = "catalog min margin " + fmt(worst) + ", control " +
                 (bad.passed ? "missed" : "caught with witness");
        return ok && !bad.passed && !bad.witness.is_null();
    });

    // The log-determinant pivot integrand: limit quotient and hat closure.
    gate.run(13, [](std::string& detail) {
        const Integrand sharp = Integrand::b_sharp();
        const Integrand hat_sharp = Integrand::hat(sharp);
        const Integrand hat_hat = Integrand::hat(hat_sharp);
        double err_fine = 0.0;
        double err_coarse = 0.0;
        for (std::uint64_t i = 0; i < 200; ++i) {
            Rng rng = stream_for(kSeed, i);
            const SquareMatrix A = positive_det_sample(rng, 2);
            const double ref = sharp(A);
            const double scale = std::max(1.0, std::fabs(ref));
            err_fine = std::max(
                err_fine, std::fabs(b_sharp_limit_quotient(A, 2.0 + 1e-3) - ref) / scale);
            err_coarse = std::max(
                err_coarse, std::fabs(b_sharp_limit_quotient(A, 2.0 + 1e-2) - ref) / scale);
        }
        const double ratio = err_coarse / err_fine;
        double invol = 0.0;
        double closed = 0.0;
        for (std::uint64_t i = 0; i < 1000; ++i) {
            Rng rng = stream_for(kSeed, 1000 + i);
            const SquareMatrix A = positive_det_sample(rng, 2);
            const double ref = sharp(A);
            invol = std::max(invol,
                             std::fabs(hat_hat(A) - ref) / std::max(1.0, std::fabs(ref)));
            closed = std::max(closed, std::fabs(hat_sharp(A) - b_sharp_hat_closed_form(A)) /
                                          std::max(1.0, std::fabs(hat_sharp(A))));
        }
        detail = "quotient error " + fmt(err_fine) + ", ratio " + fmt(ratio) +
                 ", involution " + fmt(invol) + ", closed form " + fmt(closed);
        return err_fine <= 1e-2 && ratio >= 8.0 && ratio <= 12.0 && invol <= 1e-12 &&
               closed <= 1e-11;
    });

    // Byte-identical reproduction output across repeats and thread counts.
    gate.run(14, [&cli](std::string& detail) {
        std::size_t bytes = 0;
        for (const std::string& id : reproduction_ids()) {
            std::string reference;
            for (int threads : {1, 8}) {
                for (int repeat = 0; repeat < 2; ++repeat) {
                    const std::string args = "reproduce " + id +
                                             " --samples 2000 --seed 42 --threads " +
                                             std::to_string(threads) + " --output json";
                    const CliRun run = run_cli(cli, args);
                    if (run.exit_code != 0) {
                        detail = id + " exited " + std::to_string(run.exit_code);
                        return false;
                    }
                    if (reference.empty()) {
                        reference = run.out;
                    } else if (run.out != reference) {
                        detail = id + " output differs between runs";
                        return false;
                    }
                }
            }
            bytes += reference.size();
        }
        detail = "12 ids x {1,8} threads x 2 runs, " + std::to_string(bytes) +
                 " bytes compared";
        return true;
    });

    std::printf("%s\n", gate.failures == 0 ? "ACCEPTANCE: ALL CRITERIA PASS"
                                           : "ACCEPTANCE: FAILURES PRESENT");
    return gate.failures == 0 ? 0 : 1;
}
