// SPDX-License-Identifier: Apache-2.0
//
// Globally adaptive Gauss-Kronrod (7/15) integration on finite and
// semi-infinite ranges.
#pragma once

#include <functional>

namespace fso::quad {

using Integrand = std::function<double(double)>;

struct Options {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_intervals = 4000;
};

struct Result {
    double value = 0.0;
    double error = 0.0;
    int evaluations = 0;
    bool converged = false;
};

/// Integral of f over [a, b].
Result integrate(const Integrand& f, double a, double b, const Options& opts = {});

/// Integral of f over (0, inf). `scale` is where the bulk of the mass is
/// expected; the range is split there and both halves are mapped onto [0, 1)
/// (exponentially toward 0, algebraically toward infinity), so integrable
/// power-law singularities at the origin are handled.
Result integrate_half_line(const Integrand& f, double scale, const Options& opts = {});

/// Integral of f over [a, inf).
Result integrate_to_infinity(const Integrand& f, double a, double scale, const Options& opts = {});

/// Value of a result, throwing ConvergenceError (naming `what`) when the
/// tolerance was not met.
double value_or_throw(const Result& r, const char* what);

}  // namespace fso::quad
