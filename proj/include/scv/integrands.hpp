#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scv/matrix.hpp"
#include "scv/report.hpp"

namespace scv {

enum class IntegrandKind {
    burkholder,        // (|1 - n/p| |A|^n + det A) |A|^{p-n}
    burkholder_plus,   // max(burkholder, 0)
    det_plus,          // max(det A, 0)
    det_plus_power,    // scale * (det^+)^{p/n}
    fp_aniso,          // (max(a,0) max(d,0) + (b^2 + c^2)/2)^{p/2}, n = 2
    conf_norm_plus,    // |A^+|
    conf_norm_minus,   // |A^-|
    b_sharp,           // (|A|^2 + det A log |A|^2)/2 on det > 0, n = 2
    isotropic_profile, // f(signed singular values) for a caller-supplied f
    transformed,       // hat / tilde / positive part / power composition
    custom,            // arbitrary callable, used for controls in checks
};

enum class TransformKind { hat, tilde, positive_part, power_compose };

/// Immutable handle to an integrand. Cheap to copy; composition shares the
/// inner handle. Construction validates parameter regimes and throws
/// ParseError on violations; evaluation throws EvalDomainError when the
/// matrix leaves the integrand's domain.
class Integrand {
public:
    static Integrand burkholder(double p, int n);
    static Integrand burkholder_plus(double p, int n);
    static Integrand det_plus(int n);
    static Integrand det_plus_power(double p, int n, double scale = 1.0);
    static Integrand fp_aniso(double p);
    static Integrand conf_norm(Sign sign, int n);
    static Integrand b_sharp();
    static Integrand isotropic_profile(std::string name, int n,
                                       std::function<double(const std::vector<double>&)> f,
                                       std::optional<double> homogeneity = std::nullopt);
    static Integrand custom(std::string name, int n,
                            std::function<double(const SquareMatrix&)> f,
                            std::optional<double> homogeneity = std::nullopt,
                            bool norm_det_form = false);

    /// F-hat(A) = F(A^{-1}) det A; evaluation requires det A > 0.
    static Integrand hat(Integrand inner);
    /// F-tilde(A) = F(reflected_identity * A).
    static Integrand tilde(Integrand inner);
    /// max(F, 0).
    static Integrand positive_part(Integrand inner);
    /// (max(F, 0))^q.
    static Integrand power_compose(Integrand inner, double q);

    double operator()(const SquareMatrix& A) const { return evaluate(A); }
    double evaluate(const SquareMatrix& A) const;

    IntegrandKind kind() const;
    int dim() const;
    double p() const;

    /// Degree of positive homogeneity when well defined (b_sharp has none).
    std::optional<double> homogeneity() const;

    /// True when any link of the composition requires det A > 0.
    bool requires_positive_det() const;

    /// True when the integrand is a function of (|A|^n, det A) alone, i.e.
    /// has the two-variable normal form assumed by the extremality scan.
    bool has_norm_det_form() const;

    /// Canonical descriptor, e.g. "burkholder:p=1.5,n=2" or "hat(b_sharp)".
    const std::string& name() const;

private:
    struct Impl;
    explicit Integrand(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;
};

/// Parses the descriptor grammar:
///   expr      := transform '(' expr [',' 'q=' REAL] ')' | kind [':' params]
///   transform := 'hat' | 'tilde' | 'plus' | 'pow'
///   params    := key '=' REAL {',' key '=' REAL},  keys: p, n, scale
/// Kinds: burkholder, burkholder_plus, det_plus, det_plus_power, fp_aniso,
/// conf_norm_plus, conf_norm_minus, b_sharp. n defaults to 2.
Integrand parse_integrand(const std::string& descriptor);

// ---- closed forms used by the planar certificate (n = 2, p > 2) ----

/// Alternate product form (2/p)((p-1)|A^+| - |A^-|) |A|^{p-1}; equals the
/// burkholder value for n = 2, p > 2.
double burkholder_alt(const SquareMatrix& A, double p);

/// h(t, d) = ((1 - 2/p)(t + sqrt(t^2 + d))^2 + d)(t + sqrt(t^2 + d))^{p-2}
/// on S = {t >= 0, t^2 + d >= 0}. h(|A^-|, det A) == burkholder(A).
double h_value(double t, double d, double p);

/// Closed-form gradient of h in the interior of S.
std::array<double, 2> h_gradient(double t, double d, double p);

/// Closed-form Hessian [[h_tt, h_td], [h_td, h_dd]]; its determinant
/// vanishes identically. Unbounded as t^2 + d -> 0, so the boundary is
/// rejected with EvalDomainError.
SquareMatrix h_hessian(double t, double d, double p);

/// Coefficient c in the convexity region S' = {t >= 0, c t^2 + d >= 0}:
/// c = p(p-2)/(p-1)^2.
double h_convexity_region_coefficient(double p);

/// h on S', 0 outside; convex on {t >= 0} x R. h vanishes on the S'
/// boundary, so both branches agree there.
double h_plus_value(double t, double d, double p);

// ---- the p -> 2 limit integrand (n = 2) ----

/// (|A|^2 + det A log |A|^2)/2; requires det A > 0.
double b_sharp_value(const SquareMatrix& A);

/// Difference quotient (burkholder_plus_p(A) - det A)/(p - 2), p > 2;
/// converges to b_sharp_value(A) linearly in p - 2.
double b_sharp_limit_quotient(const SquareMatrix& A, double p);

/// Closed form of hat(b_sharp):
/// (|A|^2/det A + log(|A|^2/det A) - log det A)/2 on det A > 0.
double b_sharp_hat_closed_form(const SquareMatrix& A);

// ---- sampled invariant probes ----

/// Samples |F(QAR) - F(A)| for rotations Q, R and, when the handle has a
/// homogeneity degree, |F(tA) - t^p F(A)|. worst_residual is the largest
/// scaled residual; pass means every sample stayed within tol.
CheckReport symmetry_probe(const Integrand& F, long long samples, std::uint64_t seed,
                           double tol = 1e-9, int threads = 1);

}  // namespace scv
