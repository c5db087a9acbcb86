#include "dfcap/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dfcap/quadrature.hpp"

namespace dfcap {

namespace detail {

double log_add_exp(double la, double lb) {
    if (la == -std::numeric_limits<double>::infinity()) return lb;
    if (lb == -std::numeric_limits<double>::infinity()) return la;
    const double m = std::max(la, lb);
    return m + std::log1p(std::exp(-std::fabs(la - lb)));
}

double digamma_integer(int n) {
    constexpr double kEulerGamma = 0.57721566490153286060651209;
    double h = 0.0;
    for (int i = 1; i < n; ++i) h += 1.0 / i;
    return -kEulerGamma + h;
}

namespace {

// Regularized lower incomplete gamma P(a, x) by power series; valid x < a + 1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 1000; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-17) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Regularized upper incomplete gamma Q(a, x) by modified Lentz continued
// fraction; valid x >= a + 1.
double gamma_q_cf(double a, double x) {
    constexpr double kTiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 1000; ++i) {
        const double an = -static_cast<double>(i) * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-17) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double regularized_gamma_q(double a, double x) {
    if (x == 0.0) return 1.0;
    return (x < a + 1.0) ? 1.0 - gamma_p_series(a, x) : gamma_q_cf(a, x);
}

std::vector<double> log_upper_gamma_table(int n_max, double x) {
    std::vector<double> table(static_cast<std::size_t>(n_max) + 1,
                              -std::numeric_limits<double>::infinity());
    if (n_max < 1) return table;
    if (x == 0.0) {
        for (int u = 1; u <= n_max; ++u) table[u] = std::lgamma(static_cast<double>(u));
        return table;
    }
    const double lx = std::log(x);
    table[1] = -x;  // Gamma(1, x) = e^{-x}
    for (int u = 1; u < n_max; ++u)
        table[u + 1] = log_add_exp(std::log(static_cast<double>(u)) + table[u],
                                   u * lx - x);
    return table;
}

double j_tolerance_for_alternating_sum(double beta) {
    return std::max(5e-15, 1e-10 * std::exp(-2.0 * beta));
}

double ln_j_kernel(int q, double mu, double rel_tol) {
    if (q < 0) throw std::domain_error("ln_j_kernel: q must be nonnegative");
    if (!(mu > 0.0)) throw std::domain_error("ln_j_kernel: mu must be positive");

    const double lmu = std::log(mu);
    if (q >= 2.0 * mu + 10.0 && q >= 1) {
        // Split int_1^inf w^q e^{-mu w} ln w dw = I_inf + |R| with
        //   I_inf = Gamma(q+1) (psi(q+1) - ln mu) / mu^{q+1}      (order derivative
        //           of the full gamma integral, positive since q >> mu)
        //   |R|   = -int_0^1 w^q e^{-mu w} ln w dw
        //         = int_0^inf t e^{-(q+1) t} e^{-mu e^{-t}} dt    (w = e^{-t}).
        // Both pieces are positive, so no cancellation.
        const double psi = digamma_integer(q + 1);
        const double ln_i_inf =
            std::lgamma(q + 1.0) + std::log(psi - lmu) - (q + 1) * lmu;
        QuadratureSpec tight{rel_tol, 1e-250, 4000};
        DecayEnvelope env{0.0, 1, static_cast<double>(q + 1), 0.0};
        const double r = integrate_to_infinity(
                             [q, mu](double t) {
                                 return t * std::exp(-(q + 1.0) * t -
                                                     mu * std::exp(-t));
                             },
                             0.0, env, tight)
                             .value;
        const double ln_r = r > 0.0 ? std::log(r)
                                    : -std::numeric_limits<double>::infinity();
        return mu + log_add_exp(ln_i_inf, ln_r);
    }

    // Direct shifted quadrature of (1+u)^q e^{-mu u} ln(1+u): factor out the
    // peak of phi(u) = q ln(1+u) - mu u so the integrand stays O(1).
    const double u_star = std::max(0.0, q / mu - 1.0);
    const double phi_star = q * std::log1p(u_star) - mu * u_star;
    const auto phi = [q, mu](double u) { return q * std::log1p(u) - mu * u; };
    const double u0 = std::max(2.0 * (1.0 + u_star) - 1.0, 1.0);
    // For u >= u0, phi'(u) <= -mu/2, and ln(1+u) <= u.
    DecayEnvelope env{phi(u0) - phi_star + 0.5 * mu * u0, 1, 0.5 * mu, u0};
    QuadratureSpec tight{rel_tol, 1e-250, 4000};
    const double shifted =
        integrate_to_infinity(
            [&phi, phi_star](double u) {
                return std::exp(phi(u) - phi_star) * std::log1p(u);
            },
            0.0, env, tight)
            .value;
    return phi_star + std::log(shifted);
}

namespace {

double ln_binomial(int n, int k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

// log of int_0^inf w^alpha e^{-beta w} ln(1+w) dw by shifted quadrature.
double ln_weighted_integral_by_quadrature(int alpha, double beta) {
    if (alpha == 0) return ln_j_kernel(0, beta);  // identical integrals
    const double w_star = alpha / beta;
    const double phi_star = alpha * std::log(w_star) - alpha;
    const auto phi = [alpha, beta](double w) {
        return alpha * std::log(w) - beta * w;
    };
    const double w0 = std::max(2.0 * w_star, 1.0);
    DecayEnvelope env{phi(w0) - phi_star + 0.5 * beta * w0, 1, 0.5 * beta, w0};
    QuadratureSpec spec{1e-12, 1e-250, 4000};  // no cancellation downstream
    const double shifted =
        integrate_to_infinity(
            [&phi, phi_star](double w) {
                return w > 0.0 ? std::exp(phi(w) - phi_star) * std::log1p(w) : 0.0;
            },
            0.0, env, spec)
            .value;
    return phi_star + std::log(shifted);
}

// Above this ratio of sum|terms| to |sum|, double-precision kernel noise
// amplified through the cancellation exceeds the accuracy the quadrature
// route delivers directly, so the closed form is abandoned.
constexpr double kConditionLimit = 1e6;

}  // namespace

double LnJCache::operator()(int q) {
    while (static_cast<int>(values_.size()) <= q)
        values_.push_back(
            ln_j_kernel(static_cast<int>(values_.size()), mu_, rel_tol_));
    return values_[q];
}

double ln_weighted_gamma_integral_cached(int alpha, double beta, LnJCache& cache,
                                         ClosedFormDiagnostics* diag) {
    if (alpha < 0) throw std::domain_error("log_weighted_gamma_integral: alpha must be a nonnegative integer");
    if (!(beta > 0.0)) throw std::domain_error("log_weighted_gamma_integral: beta must be positive");

    // sum_{q=0}^{alpha} C(alpha, q) (-1)^{alpha-q} e^beta beta^{-q} G(beta; q)
    // assembled from log magnitudes; e^beta beta^{-q} G(beta; q) = J(q, beta).
    std::vector<double> lt(static_cast<std::size_t>(alpha) + 1);
    for (int q = 0; q <= alpha; ++q)
        lt[q] = ln_binomial(alpha, q) + cache(q);
    const double m = *std::max_element(lt.begin(), lt.end());
    long double signed_sum = 0.0L;
    long double abs_sum = 0.0L;
    for (int q = 0; q <= alpha; ++q) {
        const long double t = expl(static_cast<long double>(lt[q] - m));
        signed_sum += ((alpha - q) % 2 == 0) ? t : -t;
        abs_sum += t;
    }

    const double condition =
        signed_sum > 0.0L ? static_cast<double>(abs_sum / signed_sum)
                          : std::numeric_limits<double>::infinity();
    if (signed_sum <= 0.0L || condition > kConditionLimit) {
        if (diag) *diag = {condition, true};
        return ln_weighted_integral_by_quadrature(alpha, beta);
    }
    if (diag) *diag = {condition, false};
    return m + static_cast<double>(logl(signed_sum));
}

double ln_weighted_gamma_integral(int alpha, double beta, ClosedFormDiagnostics* diag) {
    LnJCache cache(beta, j_tolerance_for_alternating_sum(beta));
    return ln_weighted_gamma_integral_cached(alpha, beta, cache, diag);
}

double ln_ratio_gamma_integral(int alpha, double beta, double eta) {
    if (alpha < 0) throw std::domain_error("log_ratio_gamma_integral: alpha must be a nonnegative integer");
    if (!(beta > 0.0)) throw std::domain_error("log_ratio_gamma_integral: beta must be positive");
    if (!(eta > 0.0)) throw std::domain_error("log_ratio_gamma_integral: eta must be positive");
    // (eta / beta^alpha) G(beta eta; alpha) = eta^{alpha+1} e^{-beta eta} J(alpha, beta eta);
    // a single kernel, nothing cancels, so the kernel can run loose.
    return (alpha + 1) * std::log(eta) - beta * eta +
           ln_j_kernel(alpha, beta * eta, 5e-13);
}

}  // namespace detail

double upper_incomplete_gamma(double a, double x) {
    if (!(a > 0.0)) throw std::domain_error("upper_incomplete_gamma: a must be positive");
    if (x < 0.0) throw std::domain_error("upper_incomplete_gamma: x must be nonnegative");
    return detail::regularized_gamma_q(a, x) * std::tgamma(a);
}

double regularized_upper_gamma(int n_plus_1, double x) {
    if (n_plus_1 < 1)
        throw std::domain_error("regularized_upper_gamma: order must be a positive integer");
    if (x < 0.0) throw std::domain_error("regularized_upper_gamma: x must be nonnegative");
    if (x == 0.0) return 1.0;
    const int n = n_plus_1 - 1;
    const double lx = std::log(x);
    double m = -std::numeric_limits<double>::infinity();
    std::vector<double> lterm(static_cast<std::size_t>(n) + 1);
    for (int k = 0; k <= n; ++k) {
        lterm[k] = k * lx - std::lgamma(k + 1.0);
        m = std::max(m, lterm[k]);
    }
    double sum = 0.0;
    for (int k = 0; k <= n; ++k) sum += std::exp(lterm[k] - m);
    return std::exp(-x + m + std::log(sum));
}

double exponential_integral_e1(double x) {
    if (!(x > 0.0)) throw std::domain_error("exponential_integral_e1: x must be positive");
    return -std::expint(-x);
}

double meijer_g_2_3_kernel(double mu, int q) {
    if (!(mu > 0.0)) throw std::domain_error("meijer_g_2_3_kernel: mu must be positive");
    if (q < 0) throw std::domain_error("meijer_g_2_3_kernel: q must be nonnegative");
    return std::exp(q * std::log(mu) - mu + detail::ln_j_kernel(q, mu));
}

double log_weighted_gamma_integral(int alpha, double beta, ClosedFormDiagnostics* diag) {
    return std::exp(detail::ln_weighted_gamma_integral(alpha, beta, diag));
}

double log_ratio_gamma_integral(int alpha, double beta, double eta) {
    return std::exp(detail::ln_ratio_gamma_integral(alpha, beta, eta));
}

}  // namespace dfcap
