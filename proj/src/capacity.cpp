#include "dfcap/capacity.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "dfcap/special_functions.hpp"
#include "poisson_series.hpp"

namespace dfcap {

namespace {

constexpr double kLog2E = 1.4426950408889634;  // log2(e)
constexpr double kHalfDuplex = 0.5;            // two orthogonal channel uses

// Envelope of the min-SNR density: f(g) <= 2 e^{Kx+Ky} v e^{-v g / 2} with
// v = a_x + a_y (Chernoff bound on each hop's density and survival).
double log_pdf_envelope_scale(const MinSnrDistribution& dist) {
    const double v = dist.hop_x().rate() + dist.hop_y().rate();
    return std::log(2.0) + dist.hop_x().k_factor + dist.hop_y().k_factor +
           std::log(v);
}

double relative_gap(double a, double b) {
    const double scale = std::max({std::fabs(a), std::fabs(b), 1e-12});
    return std::fabs(a - b) / scale;
}

// Chooses between the series closed form and its quadrature cross-check.
// The series is primary; quadrature takes over when the series failed to
// converge, produced a non-finite value, or disagrees wildly.
CapacityResult assemble(AdaptiveScheme scheme, double series_value,
                        bool series_ok, double quad_value) {
    CapacityResult r;
    r.scheme = scheme;
    r.error_estimate = relative_gap(series_value, quad_value);
    const bool series_trusted =
        series_ok && std::isfinite(series_value) && r.error_estimate <= 1e-3;
    r.backend = series_trusted ? CapacityBackend::series
                               : CapacityBackend::quadrature;
    r.capacity = series_trusted ? series_value : quad_value;
    return r;
}

}  // namespace

CapacityResult capacity_ora(const MinSnrDistribution& dist,
                            const CapacityOptions& options) {
    const double v = dist.hop_x().rate() + dist.hop_y().rate();

    // Series closed form: kernel(alpha) = int_0^inf w^alpha e^{-v w} ln(1+w) dw.
    detail::LnJCache jcache(v, detail::j_tolerance_for_alternating_sum(v));
    auto kernel = [&jcache, v](int alpha) {
        return detail::ln_weighted_gamma_integral_cached(alpha, v, jcache, nullptr);
    };
    const double tail_scale =
        1.0 / dist.hop_x().rate() + 1.0 / dist.hop_y().rate();
    auto series = detail::poisson_double_series(dist.hop_x(), dist.hop_y(),
                                                kernel, tail_scale,
                                                dist.control());
    const double series_value = kHalfDuplex * kLog2E * series.value;

    // Quadrature backend: direct integral of log2(1+g) against the pdf.
    DecayEnvelope env{log_pdf_envelope_scale(dist) - std::log(std::log(2.0)), 1,
                      0.5 * v, 0.0};
    const double quad_value =
        kHalfDuplex *
        integrate_to_infinity(
            [&dist](double g) { return std::log2(1.0 + g) * dist.pdf(g); }, 0.0,
            env, options.quadrature)
            .value;

    return assemble(AdaptiveScheme::ora, series_value, series.diag.converged,
                    quad_value);
}

double opra_cutoff(const MinSnrDistribution& dist, const CapacityOptions&) {
    const auto h = [&dist](double g0) {
        return dist.survival(g0) / g0 - dist.expected_inverse_tail(g0) - 1.0;
    };

    // The cutoff equation  (1-F(g0))/g0 - E[1/snr; snr >= g0] = 1  has a
    // strictly decreasing left side; sanity-scan before bisecting.
    constexpr double kLow = 1e-12;
    const std::array<double, 9> grid = {kLow, 0.125, 0.25, 0.375, 0.5,
                                        0.625, 0.75,  0.875, 1.0};
    double prev = std::numeric_limits<double>::infinity();
    for (double g0 : grid) {
        const double val = h(g0);
        if (val > prev + 1e-9 * std::max(1.0, std::fabs(prev)))
            throw solver_error(
                "opra_cutoff: cutoff equation is not monotone on the scan grid; "
                "series evaluation is unreliable at these parameters");
        prev = val;
    }

    double lo = kLow, hi = 1.0;
    double h_lo = h(lo), h_hi = h(hi);
    if (h_lo < 0.0 || h_hi > 0.0)
        throw solver_error("opra_cutoff: root of the cutoff equation is not "
                           "bracketed in (0, 1]");
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        const double hm = h(mid);
        if (std::fabs(hm) < 1e-10 || (hi - lo) < 1e-15) return mid;
        if (hm > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return mid;
}

CapacityResult capacity_opra(const MinSnrDistribution& dist,
                             const CapacityOptions& options) {
    const double g0 = opra_cutoff(dist, options);
    const double v = dist.hop_x().rate() + dist.hop_y().rate();

    // Series closed form: kernel(alpha) = int_{g0}^inf w^alpha e^{-v w} ln(w/g0) dw.
    auto kernel = [v, g0](int alpha) {
        return detail::ln_ratio_gamma_integral(alpha, v, g0);
    };
    const double tail_scale =
        (1.0 / dist.hop_x().rate() + 1.0 / dist.hop_y().rate()) / g0;
    auto series = detail::poisson_double_series(dist.hop_x(), dist.hop_y(),
                                                kernel, tail_scale,
                                                dist.control());
    const double series_value = kHalfDuplex * kLog2E * series.value;

    DecayEnvelope env{log_pdf_envelope_scale(dist) - std::log(g0) -
                          std::log(std::log(2.0)),
                      1, 0.5 * v, 0.0};
    const double quad_value =
        kHalfDuplex *
        integrate_to_infinity(
            [&dist, g0](double g) {
                return g > g0 ? std::log2(g / g0) * dist.pdf(g) : 0.0;
            },
            g0, env, options.quadrature)
            .value;

    CapacityResult r = assemble(AdaptiveScheme::opra, series_value,
                                series.diag.converged, quad_value);
    r.cutoff = g0;
    return r;
}

double outage_probability(const MinSnrDistribution& dist, double beta0) {
    if (beta0 < 0.0)
        throw std::domain_error("outage_probability: beta0 must be nonnegative");
    return dist.cdf(beta0);
}

namespace {

double tifr_value(double inverse_tail, double outage) {
    return kHalfDuplex * std::log2(1.0 + 1.0 / inverse_tail) * (1.0 - outage);
}

}  // namespace

CapacityResult capacity_tifr(const MinSnrDistribution& dist, double beta0,
                             const CapacityOptions& options) {
    if (!(beta0 > 0.0))
        throw std::domain_error(
            "capacity_tifr: beta0 must be positive (the inverse-SNR integral "
            "diverges at 0)");
    SeriesDiagnostics sd;
    const double tail_series = dist.expected_inverse_tail(beta0, &sd);
    const double outage_series = dist.cdf(beta0);
    const double series_value = tifr_value(tail_series, outage_series);

    const double v = dist.hop_x().rate() + dist.hop_y().rate();
    DecayEnvelope env{log_pdf_envelope_scale(dist) - std::log(beta0), 0,
                      0.5 * v, 0.0};
    const double tail_quad =
        integrate_to_infinity(
            [&dist](double g) { return dist.pdf(g) / g; }, beta0, env,
            options.quadrature)
            .value;
    const double outage_quad =
        integrate([&dist](double g) { return dist.pdf(g); }, 0.0, beta0,
                  options.quadrature)
            .value;
    const double quad_value = tifr_value(tail_quad, outage_quad);

    CapacityResult r = assemble(AdaptiveScheme::tifr, series_value,
                                sd.converged, quad_value);
    r.cutoff = beta0;
    r.outage_probability = r.backend == CapacityBackend::series ? outage_series
                                                                : outage_quad;
    return r;
}

CapacityResult optimize_tifr_cutoff(const MinSnrDistribution& dist,
                                    const CapacityOptions& options) {
    const auto objective = [&dist](double b0) {
        return tifr_value(dist.expected_inverse_tail(b0), dist.cdf(b0));
    };

    // Coarse scan brackets the maximum, golden-section refines it.
    constexpr double kLow = 1e-6;
    constexpr int kScan = 33;
    double best_b = kLow;
    double best_val = -std::numeric_limits<double>::infinity();
    int best_i = 0;
    for (int i = 0; i < kScan; ++i) {
        const double b = kLow + (1.0 - kLow) * i / (kScan - 1);
        const double val = objective(b);
        if (val > best_val) {
            best_val = val;
            best_b = b;
            best_i = i;
        }
    }
    double lo = kLow + (1.0 - kLow) * std::max(0, best_i - 1) / (kScan - 1);
    double hi = kLow + (1.0 - kLow) * std::min(kScan - 1, best_i + 1) / (kScan - 1);

    constexpr double kGolden = 0.6180339887498949;
    double x1 = hi - kGolden * (hi - lo);
    double x2 = lo + kGolden * (hi - lo);
    double f1 = objective(x1);
    double f2 = objective(x2);
    while (hi - lo > 1e-6) {
        if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + kGolden * (hi - lo);
            f2 = objective(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - kGolden * (hi - lo);
            f1 = objective(x1);
        }
    }
    const double b_star = 0.5 * (lo + hi);
    if (objective(b_star) < best_val && best_b != b_star) {
        // Golden section must not end below the scan optimum.
        return capacity_tifr(dist, best_b, options);
    }
    return capacity_tifr(dist, b_star, options);
}

}  // namespace dfcap
