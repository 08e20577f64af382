#pragma once

#include <cmath>
#include <functional>
#include <limits>

#include "nipoly/errors.hpp"

namespace nipoly {

// Adaptive Gauss-Kronrod (7/15) on [a,b]; infinite endpoints are mapped by
// x = t/(1-t^2).
double integrate(const std::function<double(double)>& f, double a, double b, double abs_tol = 1e-12,
                 double rel_tol = 1e-12, int max_depth = 50);

// Minimizer of a unimodal function on [a,b] by golden-section search.
double golden_min(const std::function<double(double)>& f, double a, double b, double tol = 1e-12);

// Root of f on [a,b] by bisection; f(a) and f(b) must differ in sign.
double bisect(const std::function<double(double)>& f, double a, double b, double tol = 1e-14,
              int max_iter = 300);

}  // namespace nipoly
