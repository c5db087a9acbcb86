#ifndef DFCAP_SRC_POISSON_SERIES_HPP
#define DFCAP_SRC_POISSON_SERIES_HPP

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "dfcap/distribution.hpp"

namespace dfcap::detail {

// Shared evaluator for the double power series behind every min-SNR
// functional in this project:
//
//   sum_{n,j} p_x(n) p_y(j) [ (a_x^{n+1}/n!) sum_{m<=j} (a_y^m/m!) KER(n+m)
//                           + (a_y^{n+1}/n!) sum_{m<=j} (a_x^m/m!) KER(n+m) ]
//
// with p(n) the Poisson(K) weights of the Bessel series and KER supplied as
// log_kernel(alpha). Accumulation runs diagonal-by-diagonal in total order
// k = n + j + m-extension, so each diagonal only needs KER(k). The remainder
// after diagonal k is bounded by
//
//   tail_scale * ( Lambda * P[S >= k] + P[S >= k+1] ),   S ~ Poisson(Lambda),
//
// Lambda = K_x + K_y, which is the certified stopping rule.
struct PoissonSeriesOutcome {
    double value = 0.0;
    SeriesDiagnostics diag{};
};

inline PoissonSeriesOutcome poisson_double_series(
    const RicianHop& hop_x, const RicianHop& hop_y,
    const std::function<double(int)>& log_kernel, double tail_scale,
    const SeriesControl& control) {
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();
    const double kx = hop_x.k_factor;
    const double ky = hop_y.k_factor;
    const double ax = hop_x.rate();
    const double ay = hop_y.rate();
    const double lax = std::log(ax);
    const double lay = std::log(ay);
    const double lambda = kx + ky;

    const auto ln_poisson = [](double k_factor, int n) {
        if (n == 0) return -k_factor;
        if (k_factor == 0.0) return kNegInf;
        return -k_factor + n * std::log(k_factor) - std::lgamma(n + 1.0);
    };

    std::vector<double> lpx, lpy;   // log Poisson weights per hop
    std::vector<double> lnk;        // log kernel values, index = combined power
    std::vector<double> wx, wy;     // partial inner sums per pdf-side index n
    std::vector<double> lfac;       // lgamma(i + 1)

    double total = 0.0;
    double plam = std::exp(-lambda);  // Poisson(lambda) pmf at current k
    PoissonSeriesOutcome out;

    for (int k = 0; k < control.max_terms; ++k) {
        lpx.push_back(ln_poisson(kx, k));
        lpy.push_back(ln_poisson(ky, k));
        lnk.push_back(log_kernel(k));
        lfac.push_back(std::lgamma(k + 1.0));
        wx.push_back(0.0);
        wy.push_back(0.0);

        double diag_sum = 0.0;
        for (int n = 0; n <= k; ++n) {
            const int j = k - n;
            // Extend the inner m-sum of pair (n, j) by its newest term m = j;
            // the combined power n + m equals the diagonal index k.
            wx[n] += std::exp(lpx[n] + (n + 1) * lax - lfac[n] + j * lay -
                              lfac[j] + lnk[k]);
            wy[n] += std::exp(lpy[n] + (n + 1) * lay - lfac[n] + j * lax -
                              lfac[j] + lnk[k]);
            diag_sum += std::exp(lpy[j]) * wx[n] + std::exp(lpx[j]) * wy[n];
        }
        total += diag_sum;

        // P[S >= k+1] <= pois(k+1) / (1 - lambda/(k+2)) once the pmf ratio
        // drops below one; the pmf route has no floating-point floor, unlike
        // 1 - cumulative.
        const double p_next = plam * lambda / (k + 1);
        const double p_tail = (lambda < k + 2)
                                  ? p_next / (1.0 - lambda / (k + 2))
                                  : 1.0;
        const double bound = tail_scale * (lambda * (plam + p_tail) + p_tail);
        plam = p_next;

        out.diag.terms_used = k + 1;
        out.diag.truncation_bound = bound;
        if (bound <= control.tolerance) {
            out.diag.converged = true;
            out.value = total;
            return out;
        }
    }
    out.diag.converged = false;
    out.value = total;
    return out;
}

}  // namespace dfcap::detail

#endif
