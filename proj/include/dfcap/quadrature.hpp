#ifndef DFCAP_QUADRATURE_HPP
#define DFCAP_QUADRATURE_HPP

#include <functional>

namespace dfcap {

/// Tolerances and budget for adaptive integration.
struct QuadratureSpec {
    double relative_tolerance = 1e-10;
    double absolute_tolerance = 1e-14;
    int max_subdivisions = 2000;

    /// Throws std::invalid_argument if tolerances are not strictly positive
    /// or max_subdivisions < 1.
    void validate() const;
};

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int subdivisions = 0;
    bool converged = true;
};

/// Adaptive Gauss-Kronrod (G7/K15) integration of f over [a, b].
QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, const QuadratureSpec& spec = {});

/// Analytic envelope certifying the tail of a semi-infinite integrand:
/// |f(w)| <= exp(log_scale) * w^power * exp(-rate * w)  for all w >= valid_from.
struct DecayEnvelope {
    double log_scale = 0.0;
    int power = 0;        // small nonnegative integer
    double rate = 1.0;    // > 0
    double valid_from = 0.0;
};

/// Integrates f over [lower, +inf). The domain is truncated at a point W
/// where the envelope's closed-form tail integral drops below the requested
/// tolerance, so the truncation error is certified, then [lower, W] is
/// integrated adaptively.
QuadratureResult integrate_to_infinity(const std::function<double(double)>& f,
                                       double lower, const DecayEnvelope& tail,
                                       const QuadratureSpec& spec = {});

}  // namespace dfcap

#endif
