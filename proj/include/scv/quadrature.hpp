#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace scv {

enum class QuadratureMethod { adaptive_simpson, gauss_legendre_composite };

struct QuadratureSpec {
    QuadratureMethod method = QuadratureMethod::adaptive_simpson;
    double abs_tol = 1e-10;
    int max_depth = 40;   // adaptive_simpson recursion guard
    int gl_order = 16;    // nodes per panel
    int gl_panels = 64;   // panels per knot segment
};

/// Integrates f over [a, b]. Interior `knots` split the interval, with the
/// absolute tolerance divided among segments in proportion to length, so
/// piecewise-defined integrands converge without the subdivision hunting for
/// the kinks. Throws QuadratureError when f returns a non-finite value or
/// the tolerance is not reached within the depth guard.
double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec = {}, std::vector<double> knots = {});

/// Gauss-Legendre (node, weight) pairs on [-1, 1], computed by Newton
/// iteration on the Legendre recurrence.
std::vector<std::pair<double, double>> gauss_legendre_nodes(int order);

}  // namespace scv
