#include "scv/quadrature.hpp"

#include <algorithm>
#include <cmath>

#include "scv/errors.hpp"

namespace scv {

namespace {

double sample(const std::function<double(double)>& f, double x) {
    const double v = f(x);
    if (!std::isfinite(v)) {
        throw QuadratureError("integrand returned a non-finite value at x = " +
                              std::to_string(x));
    }
    return v;
}

double simpson_recurse(const std::function<double(double)>& f, double a, double b,
                       double fa, double fm, double fb, double whole, double tol,
                       int depth) {
    if (depth <= 0) {
        throw QuadratureError("adaptive Simpson hit the depth guard before converging");
    }
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = sample(f, lm);
    const double frm = sample(f, rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol) {
        return left + right + delta / 15.0;
    }
    return simpson_recurse(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_recurse(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth) {
    const double fa = sample(f, a);
    const double fb = sample(f, b);
    const double fm = sample(f, 0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_recurse(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

double gauss_segment(const std::function<double(double)>& f, double a, double b,
                     const std::vector<std::pair<double, double>>& nodes, int panels) {
    const double width = (b - a) / panels;
    double total = 0.0;
    for (int i = 0; i < panels; ++i) {
        const double lo = a + i * width;
        const double mid = lo + 0.5 * width;
        double acc = 0.0;
        for (const auto& [x, w] : nodes) acc += w * sample(f, mid + 0.5 * width * x);
        total += 0.5 * width * acc;
    }
    return total;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureSpec& spec, std::vector<double> knots) {
    if (!(a < b)) {
        if (a == b) return 0.0;
        throw PreconditionError("integrate: requires a <= b");
    }
    std::sort(knots.begin(), knots.end());
    std::vector<double> cuts{a};
    for (double k : knots) {
        if (k > cuts.back() && k < b) cuts.push_back(k);
    }
    cuts.push_back(b);

    std::vector<std::pair<double, double>> gl;
    if (spec.method == QuadratureMethod::gauss_legendre_composite) {
        gl = gauss_legendre_nodes(spec.gl_order);
    }

    const double total_len = b - a;
    double result = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = cuts[i];
        const double hi = cuts[i + 1];
        if (spec.method == QuadratureMethod::adaptive_simpson) {
            const double tol = spec.abs_tol * (hi - lo) / total_len;
            result += adaptive_simpson(f, lo, hi, tol, spec.max_depth);
        } else {
            result += gauss_segment(f, lo, hi, gl, spec.gl_panels);
        }
    }
    return result;
}

std::vector<std::pair<double, double>> gauss_legendre_nodes(int order) {
    if (order < 1) throw PreconditionError("gauss_legendre_nodes: order must be >= 1");
    std::vector<std::pair<double, double>> nodes(order);
    for (int k = 0; k < order; ++k) {
        // Chebyshev-based initial guess, then Newton on P_order.
        double x = std::cos(M_PI * (k + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int m = 2; m <= order; ++m) {
                const double p2 = ((2.0 * m - 1.0) * x * p1 - (m - 1.0) * p0) / m;
                p0 = p1;
                p1 = p2;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double step = p1 / dp;
            x -= step;
            if (std::abs(step) < 1e-15) break;
        }
        nodes[k] = {x, 2.0 / ((1.0 - x * x) * dp * dp)};
    }
    std::sort(nodes.begin(), nodes.end());
    return nodes;
}

}  // namespace scv
