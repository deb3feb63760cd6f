// SPDX-License-Identifier: Apache-2.0
//
// Real-valued special functions used by the closed-form link statistics.
#pragma once

#include <vector>

namespace fso {

/// Iteration budget for series, continued fractions and root finders.
///
/// Every routine iterates toward full double precision; `rel_tol` is the
/// accuracy that must have been reached when `max_terms` runs out, otherwise
/// a ConvergenceError is raised.
struct Accuracy {
    double rel_tol = 1e-10;
    int max_terms = 500;

    void validate() const;
};

namespace specfun {

/// Gamma function. Throws DomainError at the poles 0, -1, -2, ...
double gamma(double x);

/// ln|Gamma(x)|; thread-safe.
double log_gamma(double x);

/// 1/Gamma(x), zero at the poles.
double reciprocal_gamma(double x);

/// Digamma psi(x) = Gamma'(x)/Gamma(x).
double digamma(double x);

/// Upper incomplete gamma Gamma(a, x) for any real a and x > 0.
double upper_inc_gamma(double a, double x, const Accuracy& acc = {});

/// exp(x) * Gamma(a, x); finite where Gamma(a, x) itself underflows.
double upper_inc_gamma_scaled(double a, double x, const Accuracy& acc = {});

/// Lower incomplete gamma gamma(a, x) for a > 0, x >= 0.
double lower_inc_gamma(double a, double x, const Accuracy& acc = {});

/// Modified Bessel function of the second kind K_nu(x), x > 0.
/// Throws OverflowError when the value exceeds the double range.
double bessel_k(double nu, double x, const Accuracy& acc = {});

/// exp(x) * K_nu(x).
double bessel_k_scaled(double nu, double x, const Accuracy& acc = {});

/// ln K_nu(x), valid far outside the range where K_nu itself is finite.
double log_bessel_k(double nu, double x, const Accuracy& acc = {});

/// ln K_n(x) for n = 0..max_order from a single upward recurrence.
std::vector<double> log_bessel_k_orders(int max_order, double x, const Accuracy& acc = {});

/// Gauss hypergeometric 2F1(a, b; c; z) for 0 <= z < 1.
double gauss_2f1(double a, double b, double c, double z, const Accuracy& acc = {});

/// Tricomi confluent hypergeometric U(a, b, z), z > 0.
double hyper_u(double a, double b, double z, const Accuracy& acc = {});

/// Whittaker W_{kappa,mu}(z), z > 0.
double whittaker_w(double kappa, double mu, double z, const Accuracy& acc = {});

/// exp(z/2) * W_{kappa,mu}(z).
double whittaker_w_scaled(double kappa, double mu, double z, const Accuracy& acc = {});

double erf(double x);
double erfc(double x);

struct QuadratureNode {
    double node;
    double weight;
};

/// Gauss-Laguerre rule for the weight exp(-t) on (0, inf), 1 <= n <= 64.
std::vector<QuadratureNode> gauss_laguerre(int n, const Accuracy& acc = {});

}  // namespace specfun
}  // namespace fso
