#pragma once

#include <functional>
#include <vector>

#include "scv/matrix.hpp"

namespace scv {

using ObjectiveFn = std::function<double(const std::vector<double>&)>;

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
};

/// Derivative-free simplex descent. The initial simplex places one vertex at
/// `start` and offsets each coordinate by `step`. Stops when the vertex value
/// spread falls below `tol` or after `max_iter` reflections.
NelderMeadResult nelder_mead(const ObjectiveFn& f, std::vector<double> start,
                             double step, int max_iter, double tol);

/// Golden-section minimum of a unimodal function on [a, b]; returns the
/// abscissa once the bracket is narrower than tol.
double golden_section_min(const std::function<double(double)>& f, double a, double b,
                          double tol);

/// Cyclic coordinate descent: per coordinate, a golden-section line search on
/// a bracket of half-width `radius` that shrinks each round. Returns the best
/// point found after `rounds` full cycles.
std::vector<double> coordinate_descent(const ObjectiveFn& f, std::vector<double> x,
                                       double radius, int rounds, double line_tol);

/// Solves A x = b by Gaussian elimination with partial pivoting; throws
/// EvalDomainError when A is numerically singular.
std::vector<double> solve_linear(SquareMatrix A, std::vector<double> b);

}  // namespace scv
