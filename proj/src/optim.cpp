#include "scv/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "scv/errors.hpp"

namespace scv {

NelderMeadResult nelder_mead(const ObjectiveFn& f, std::vector<double> start,
                             double step, int max_iter, double tol) {
    const std::size_t k = start.size();
    if (k == 0) throw PreconditionError("nelder_mead: empty start point");

    std::vector<std::vector<double>> verts(k + 1, start);
    for (std::size_t i = 0; i < k; ++i) verts[i + 1][i] += step;
    std::vector<double> vals(k + 1);
    for (std::size_t i = 0; i <= k; ++i) vals[i] = f(verts[i]);

    std::vector<std::size_t> order(k + 1);
    NelderMeadResult result;
    for (int iter = 0; iter < max_iter; ++iter) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        result.iterations = iter;
        if (vals[order[k]] - vals[order[0]] <= tol) break;

        const std::size_t lo = order[0];
        const std::size_t hi = order[k];
        const std::size_t second_hi = order[k - 1];

        std::vector<double> centroid(k, 0.0);
        for (std::size_t i = 0; i <= k; ++i) {
            if (i == hi) continue;
            for (std::size_t j = 0; j < k; ++j) centroid[j] += verts[i][j];
        }
        for (double& c : centroid) c /= static_cast<double>(k);

        auto blend = [&](double coeff) {
            std::vector<double> x(k);
            for (std::size_t j = 0; j < k; ++j)
                x[j] = centroid[j] + coeff * (verts[hi][j] - centroid[j]);
            return x;
        };

        const std::vector<double> refl = blend(-1.0);
        const double refl_val = f(refl);
        if (refl_val < vals[lo]) {
            const std::vector<double> exp = blend(-2.0);
            const double exp_val = f(exp);
            if (exp_val < refl_val) {
                verts[hi] = exp;
                vals[hi] = exp_val;
            } else {
                verts[hi] = refl;
                vals[hi] = refl_val;
            }
            continue;
        }
        if (refl_val < vals[second_hi]) {
            verts[hi] = refl;
            vals[hi] = refl_val;
            continue;
        }
        const std::vector<double> contr = blend(0.5);
        const double contr_val = f(contr);
        if (contr_val < vals[hi]) {
            verts[hi] = contr;
            vals[hi] = contr_val;
            continue;
        }
        for (std::size_t i = 0; i <= k; ++i) {
            if (i == lo) continue;
            for (std::size_t j = 0; j < k; ++j)
                verts[i][j] = verts[lo][j] + 0.5 * (verts[i][j] - verts[lo][j]);
            vals[i] = f(verts[i]);
        }
    }

    const std::size_t best =
        static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin());
    result.x = verts[best];
    result.value = vals[best];
    return result;
}

double golden_section_min(const std::function<double(double)>& f, double a, double b,
                          double tol) {
    if (!(a < b)) throw PreconditionError("golden_section_min: requires a < b");
    const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    while (b - a > tol) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    return 0.5 * (a + b);
}

std::vector<double> coordinate_descent(const ObjectiveFn& f, std::vector<double> x,
                                       double radius, int rounds, double line_tol) {
    if (x.empty()) throw PreconditionError("coordinate_descent: empty start point");
    for (int round = 0; round < rounds; ++round) {
        for (std::size_t j = 0; j < x.size(); ++j) {
            auto line = [&](double xi) {
                std::vector<double> y = x;
                y[j] = xi;
                return f(y);
            };
            x[j] = golden_section_min(line, x[j] - radius, x[j] + radius, line_tol);
        }
        radius *= 0.5;
    }
    return x;
}

std::vector<double> solve_linear(SquareMatrix A, std::vector<double> b) {
    const int n = A.n;
    if (static_cast<int>(b.size()) != n) {
        throw PreconditionError("solve_linear: dimension mismatch");
    }
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(A(r, col)) > std::abs(A(pivot, col))) pivot = r;
        if (std::abs(A(pivot, col)) < 1e-300) {
            throw EvalDomainError("solve_linear: singular system");
        }
        if (pivot != col) {
            for (int c = 0; c < n; ++c) std::swap(A(col, c), A(pivot, c));
            std::swap(b[col], b[pivot]);
        }
        for (int r = col + 1; r < n; ++r) {
            const double m = A(r, col) / A(col, col);
            if (m == 0.0) continue;
            for (int c = col; c < n; ++c) A(r, c) -= m * A(col, c);
            b[r] -= m * b[col];
        }
    }
    std::vector<double> x(b.size());
    for (int r = n - 1; r >= 0; --r) {
        double acc = b[r];
        for (int c = r + 1; c < n; ++c) acc -= A(r, c) * x[c];
        x[r] = acc / A(r, r);
    }
    return x;
}

}  // namespace scv
