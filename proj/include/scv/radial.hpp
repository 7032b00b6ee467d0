#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scv/integrands.hpp"
#include "scv/matrix.hpp"
#include "scv/quadrature.hpp"
#include "scv/report.hpp"

namespace scv {

/// One resolved segment of a profile: rho(r) = coeff * r^exponent on power
/// pieces, offset + coeff * r on linear ones, valid on [lo, hi].
struct ProfilePiece {
    double lo = 0.0;
    double hi = 1.0;
    bool is_power = false;
    double coeff = 1.0;
    double exponent = 1.0;  // power pieces only
    double offset = 0.0;    // linear pieces only
};

/// Continuous piecewise profile rho: [0,1] -> R with rho(0) = 0, rho(1) = 1.
/// Coefficients are resolved right to left from rho(1) = 1, so each piece is
/// pinned by continuity with its right neighbour.
class RadialProfile {
public:
    /// Grammar:
    ///   "identity"
    ///   "power:alpha=<real>@thm41"        two pieces: chord to 1/2, then r^alpha
    ///   "pw:[(<end>,<kind>),...]"         kinds: lin (first piece chord),
    ///                                     lin:<slope>, pow:<alpha>; ends
    ///                                     strictly increasing, last = 1
    static RadialProfile parse(const std::string& descriptor);
    static RadialProfile identity();
    static RadialProfile two_piece_power(double alpha);
    /// All-power profile with the given piece ends (increasing, last 1.0)
    /// and per-piece exponents; the search family's constructor.
    static RadialProfile all_power(const std::vector<double>& ends,
                                   const std::vector<double>& exponents);

    double value(double r) const;
    /// One-sided from the left at interior knots; the r = 0 value is the
    /// limit from the right.
    double derivative(double r) const;

    const std::vector<ProfilePiece>& pieces() const { return pieces_; }
    /// Interior breakpoints, exclusive of 0 and 1.
    std::vector<double> knots() const;
    const std::string& descriptor() const { return descriptor_; }

private:
    RadialProfile() = default;
    const ProfilePiece& piece_at(double r) const;

    std::vector<ProfilePiece> pieces_;
    std::string descriptor_;
};

/// Spectrum of the stretching gradient at radius r: rho/r with multiplicity
/// n-1 and rho' once, ordered by magnitude with the smallest carrying the
/// determinant sign. The conjugate flag negates the determinant.
SignedSpectrum gradient_spectrum(const RadialProfile& rho, double r, int n,
                                 bool conjugate);

/// The diagonal representative diag(rho/r, ..., rho/r, +-rho').
SquareMatrix gradient_matrix(const RadialProfile& rho, double r, int n, bool conjugate);

/// Ball average of F over the stretching: n * integral of
/// F(gradient_matrix(r)) r^{n-1} dr over [0,1], integrated piece by piece.
/// The r = 0 endpoint is excluded (open start at 1e-12); a leading power
/// piece with a homogeneous F contributes its head segment in closed form,
/// so singular-but-integrable spectra cost no accuracy.
double radial_energy(const Integrand& F, const RadialProfile& rho, bool conjugate,
                     const QuadratureSpec& quad = {});

/// Checks |rho'| <= rho/r pointwise: analytically per power piece (|alpha|
/// <= 1 passes) and on a grid for linear pieces. grid >= 10.
CheckReport nonexpanding_check(const RadialProfile& rho, int grid);

/// Asserts the stretching average of the degree-p integrand over each
/// profile equals its value at the center: the identity branch (conjugate
/// false, n/2 <= p <= n) or the reflected branch (conjugate true, p >= n).
/// Profiles failing nonexpanding_check are reported as skipped.
CheckReport quasiaffinity_check(double p, int n, const std::vector<RadialProfile>& profiles,
                                bool conjugate, const QuadratureSpec& quad = {});

struct RadialSearchConfig {
    int pieces = 4;         // all-power candidate profiles, pieces - 1 knots
    int multistarts = 20;
    int iterations = 300;   // simplex reflections per start
    std::uint64_t seed = 42;
    double tol = 1e-7;
    int threads = 1;
    bool at_reflected = false;  // probe at reflected identity via conjugates
    QuadratureSpec quad{};
};

/// Minimizes radial_energy(F, rho) - F(center) over a piecewise-power
/// profile family. worst_residual is the smallest gap found; a gap below
/// -tol fails the check and reports the offending profile.
CheckReport radial_quasiconvexity_search(const Integrand& F, const RadialSearchConfig& cfg);

/// Grid check of reference_dominated: the degree-p reference integrand stays
/// below F along the segment diag(1, ..., 1, 2t-1), t in [0,1], which pins
/// both functions by homogeneity and the two-variable structure. Requires
/// has_norm_det_form, matching homogeneity, and the branch normalization
/// F = reference at the identity (p <= n) or reflected identity (p >= n).
CheckReport extremality_scan(const Integrand& F, double p, int n, int grid,
                             double tol = 1e-9);

}  // namespace scv
