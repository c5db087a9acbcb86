#include "dfcap/distribution.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "dfcap/special_functions.hpp"
#include "poisson_series.hpp"

namespace dfcap {

double RicianHop::density_at_zero() const {
    return rate() * std::exp(-k_factor);
}

namespace {

void check_gamma(double gamma, const char* who) {
    if (gamma < 0.0)
        throw std::domain_error(std::string(who) + ": gamma must be nonnegative");
}

void store(SeriesDiagnostics* diag, int terms, double bound, bool converged) {
    if (diag) *diag = {terms, bound, converged};
}

// Upper bound on the Poisson(K) tail mass P[N > n] given pois = pmf(n),
// by geometric domination of the pmf ratios.
double poisson_tail_bound(double k_factor, double pois, int n) {
    const double next = pois * k_factor / (n + 1);
    return (k_factor < n + 2) ? next / (1.0 - k_factor / (n + 2)) : 1.0;
}

}  // namespace

// f(g) = sum_n pois(n; K) * GammaPdf(g; shape n+1, rate a). The n-th term is
// exactly A B(n) g^n e^{-a g} of the Bessel power series, regrouped so every
// factor stays within [0, a]; the tail is bounded by a * P[N > n].
double single_hop_pdf(const RicianHop& hop, double gamma,
                      const SeriesControl& control, SeriesDiagnostics* diag) {
    check_gamma(gamma, "single_hop_pdf");
    control.validate();
    const double a = hop.rate();
    const double k = hop.k_factor;
    const double ag = a * gamma;

    double pois = std::exp(-k);        // pois(n; K)
    double gpdf = a * std::exp(-ag);   // a (a g)^n e^{-a g} / n!
    double sum = 0.0;
    double bound = a;
    for (int n = 0; n < control.max_terms; ++n) {
        sum += pois * gpdf;
        bound = a * poisson_tail_bound(k, pois, n);
        if (bound <= control.tolerance) {
            store(diag, n + 1, bound, true);
            return sum;
        }
        pois *= k / (n + 1);
        gpdf *= ag / (n + 1);
    }
    store(diag, control.max_terms, bound, false);
    return sum;
}

// S(g) = sum_n pois(n; K) * Q(n+1, a g); each Q is in [0,1] so the truncation
// error is at most the Poisson tail mass.
double single_hop_survival(const RicianHop& hop, double gamma,
                           const SeriesControl& control,
                           SeriesDiagnostics* diag) {
    check_gamma(gamma, "single_hop_survival");
    control.validate();
    if (gamma == 0.0) {  // every Q factor is 1; the series sums to exactly 1
        store(diag, 1, 0.0, true);
        return 1.0;
    }
    const double a = hop.rate();
    const double k = hop.k_factor;
    const double ag = a * gamma;

    double pois = std::exp(-k);
    double qterm = std::exp(-ag);  // e^{-ag} (ag)^m / m!
    double q = qterm;              // Q(n+1, ag)
    double sum = 0.0;
    double bound = 1.0;
    for (int n = 0; n < control.max_terms; ++n) {
        sum += pois * q;
        bound = poisson_tail_bound(k, pois, n);
        if (bound <= control.tolerance) {
            store(diag, n + 1, bound, true);
            return sum;
        }
        pois *= k / (n + 1);
        qterm *= ag / (n + 1);
        q += qterm;
    }
    store(diag, control.max_terms, bound, false);
    return sum;
}

double MinSnrDistribution::survival(double gamma, SeriesDiagnostics* diag) const {
    check_gamma(gamma, "MinSnrDistribution::survival");
    SeriesDiagnostics dx, dy;
    const double sx = single_hop_survival(hop_x_, gamma, control_, &dx);
    const double sy = single_hop_survival(hop_y_, gamma, control_, &dy);
    store(diag, std::max(dx.terms_used, dy.terms_used),
          dx.truncation_bound + dy.truncation_bound, dx.converged && dy.converged);
    return sx * sy;
}

double MinSnrDistribution::cdf(double gamma, SeriesDiagnostics* diag) const {
    return 1.0 - survival(gamma, diag);
}

double MinSnrDistribution::pdf(double gamma, SeriesDiagnostics* diag) const {
    check_gamma(gamma, "MinSnrDistribution::pdf");
    SeriesDiagnostics dfx, dfy, dsx, dsy;
    const double fx = single_hop_pdf(hop_x_, gamma, control_, &dfx);
    const double fy = single_hop_pdf(hop_y_, gamma, control_, &dfy);
    const double sx = single_hop_survival(hop_x_, gamma, control_, &dsx);
    const double sy = single_hop_survival(hop_y_, gamma, control_, &dsy);
    if (diag) {
        const int terms = std::max({dfx.terms_used, dfy.terms_used,
                                    dsx.terms_used, dsy.terms_used});
        const double bound = dfx.truncation_bound + dfy.truncation_bound +
                             fx * dsy.truncation_bound + fy * dsx.truncation_bound;
        *diag = {terms, bound,
                 dfx.converged && dfy.converged && dsx.converged && dsy.converged};
    }
    return fx * sy + fy * sx;
}

double MinSnrDistribution::expected_inverse_tail(double gamma0,
                                                 SeriesDiagnostics* diag) const {
    if (!(gamma0 > 0.0))
        throw std::domain_error(
            "MinSnrDistribution::expected_inverse_tail: gamma0 must be positive "
            "(the integral diverges at 0)");
    const double v = hop_x_.rate() + hop_y_.rate();
    const double z = v * gamma0;
    const double lv = std::log(v);

    // Kernel G(alpha, v*gamma0): E1 branch at alpha = 0, otherwise
    // Gamma(alpha, z) / v^alpha; the integer log-gamma table grows on demand.
    std::vector<double> lgt{0.0};  // log Gamma(u, z), index u; [0] unused
    const double lz = std::log(z);
    auto kernel = [&, z, lv, lz](int alpha) {
        if (alpha == 0) return std::log(exponential_integral_e1(z));
        while (static_cast<int>(lgt.size()) <= alpha) {
            const int u = static_cast<int>(lgt.size());
            if (u == 1)
                lgt.push_back(-z);
            else
                lgt.push_back(detail::log_add_exp(
                    std::log(static_cast<double>(u - 1)) + lgt[u - 1],
                    (u - 1) * lz - z));
        }
        return lgt[alpha] - alpha * lv;
    };

    const double tail_scale = 2.0 / gamma0;
    auto out = detail::poisson_double_series(hop_x_, hop_y_, kernel, tail_scale,
                                             control_);
    if (diag) *diag = out.diag;
    if (!out.diag.converged)
        throw series_error(
            "expected_inverse_tail: series reached max_terms before the "
            "truncation bound met tolerance");
    return out.value;
}

}  // namespace dfcap
