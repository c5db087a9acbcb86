#include "dfcap/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace dfcap {

namespace detail {

namespace {

// splitmix64 finalizer; the word at counter c of stream `seed` is
// mix(seed + (c+1) * golden_gamma), a pure function of (seed, c).
inline std::uint64_t mix64(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline std::uint64_t counter_word(std::uint64_t seed, std::uint64_t counter) {
    return mix64(seed + (counter + 1) * 0x9E3779B97F4A7C15ull);
}

// (0, 1]: never zero, safe under log.
inline double to_unit_open0(std::uint64_t word) {
    return (static_cast<double>(word >> 11) + 1.0) * 0x1.0p-53;
}

// [0, 1)
inline double to_unit(std::uint64_t word) {
    return static_cast<double>(word >> 11) * 0x1.0p-53;
}

}  // namespace

std::uint64_t substream_seed(std::uint64_t master, std::uint64_t salt) {
    return mix64(master ^ (salt * 0xD1B54A32D192ED03ull + 0x8CB92BA72F3D8DD7ull));
}

double hop_snr_draw(const RicianHop& hop, std::uint64_t seed,
                    std::int64_t index, double los_phase) {
    const double sigma2 = hop.mean_snr / (1.0 + hop.k_factor);
    const double s = std::sqrt(hop.k_factor * sigma2);
    const double component_sd = std::sqrt(0.5 * sigma2);

    const std::uint64_t c = 2 * static_cast<std::uint64_t>(index);
    const double u1 = to_unit_open0(counter_word(seed, c));
    const double u2 = to_unit(counter_word(seed, c + 1));
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    const double g1 = s * std::cos(los_phase) + component_sd * r * std::cos(angle);
    const double g2 = s * std::sin(los_phase) + component_sd * r * std::sin(angle);
    return g1 * g1 + g2 * g2;
}

}  // namespace detail

std::vector<double> sample_hop_snr(const RicianHop& hop, std::uint64_t seed,
                                   std::int64_t n, double los_phase) {
    if (n < 1) throw std::invalid_argument("sample_hop_snr: n must be >= 1");
    std::vector<double> out(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = detail::hop_snr_draw(hop, seed, i, los_phase);
    return out;
}

std::vector<SimulationEstimate> estimate_min_cdf(const MinSnrDistribution& dist,
                                                 std::span<const double> gamma_grid,
                                                 std::uint64_t seed,
                                                 std::int64_t n) {
    if (n < 1000) throw std::invalid_argument("estimate_min_cdf: n must be >= 1000");
    for (std::size_t j = 1; j < gamma_grid.size(); ++j)
        if (gamma_grid[j] < gamma_grid[j - 1])
            throw std::invalid_argument("estimate_min_cdf: gamma_grid must be nondecreasing");
    const std::uint64_t seed_x = detail::substream_seed(seed, 1);
    const std::uint64_t seed_y = detail::substream_seed(seed, 2);

    // Count per grid cell, then prefix-sum: counts[j] after the prefix pass is
    // #{i : min_i <= grid[j]} provided the grid is nondecreasing.
    std::vector<std::int64_t> counts(gamma_grid.size() + 1, 0);
    for (std::int64_t i = 0; i < n; ++i) {
        const double gx = detail::hop_snr_draw(dist.hop_x(), seed_x, i);
        const double gy = detail::hop_snr_draw(dist.hop_y(), seed_y, i);
        const double m = std::min(gx, gy);
        const auto it = std::lower_bound(gamma_grid.begin(), gamma_grid.end(), m);
        ++counts[static_cast<std::size_t>(it - gamma_grid.begin())];
    }

    std::vector<SimulationEstimate> out;
    out.reserve(gamma_grid.size());
    std::int64_t below = 0;
    for (std::size_t j = 0; j < gamma_grid.size(); ++j) {
        below += counts[j];
        const double p = static_cast<double>(below) / static_cast<double>(n);
        out.push_back({p, std::sqrt(p * (1.0 - p) / static_cast<double>(n)), n, seed});
    }
    return out;
}

SimulationEstimate estimate_capacity(const MinSnrDistribution& dist,
                                     AdaptiveScheme scheme,
                                     std::optional<double> cutoff,
                                     std::uint64_t seed, std::int64_t n) {
    if (n < 1) throw std::invalid_argument("estimate_capacity: n must be >= 1");
    double threshold = 0.0;
    if (scheme == AdaptiveScheme::opra)
        threshold = cutoff ? *cutoff : opra_cutoff(dist);
    else if (scheme == AdaptiveScheme::tifr)
        threshold = cutoff ? *cutoff : *optimize_tifr_cutoff(dist).cutoff;

    const std::uint64_t seed_x = detail::substream_seed(seed, 1);
    const std::uint64_t seed_y = detail::substream_seed(seed, 2);

    double sum = 0.0, sum_sq = 0.0;      // ORA / OPRA sample means
    double inv_sum = 0.0, inv_sq = 0.0;  // TIFR: 1{m>=b}/m moments
    double ind_sum = 0.0;                // TIFR: indicator count
    for (std::int64_t i = 0; i < n; ++i) {
        const double gx = detail::hop_snr_draw(dist.hop_x(), seed_x, i);
        const double gy = detail::hop_snr_draw(dist.hop_y(), seed_y, i);
        const double m = std::min(gx, gy);
        switch (scheme) {
            case AdaptiveScheme::ora: {
                const double w = 0.5 * std::log2(1.0 + m);
                sum += w;
                sum_sq += w * w;
                break;
            }
            case AdaptiveScheme::opra: {
                const double w = m >= threshold ? 0.5 * std::log2(m / threshold) : 0.0;
                sum += w;
                sum_sq += w * w;
                break;
            }
            case AdaptiveScheme::tifr: {
                if (m >= threshold) {
                    const double u = 1.0 / m;
                    inv_sum += u;
                    inv_sq += u * u;
                    ind_sum += 1.0;
                }
                break;
            }
        }
    }

    const double dn = static_cast<double>(n);
    SimulationEstimate est;
    est.samples = n;
    est.seed = seed;
    if (scheme == AdaptiveScheme::tifr) {
        if (ind_sum == 0.0)
            throw sampling_error("estimate_capacity: no draw above the TIFR cutoff");
        const double mean_u = inv_sum / dn;   // E[1{m>=b}/m]
        const double mean_p = ind_sum / dn;   // P[m >= b]
        est.value = 0.5 * std::log2(1.0 + 1.0 / mean_u) * mean_p;
        // Delta method on (mean_u, mean_p).
        const double var_u = std::max(0.0, inv_sq / dn - mean_u * mean_u) / dn;
        const double var_p = std::max(0.0, mean_p - mean_p * mean_p) / dn;
        // E[(1{m>=b}/m) * 1{m>=b}] is inv_sum/n itself, the indicator being idempotent.
        const double cov_up = (mean_u - mean_u * mean_p) / dn;
        constexpr double kInvLn2 = 1.4426950408889634;
        const double d_du = -0.5 * mean_p * kInvLn2 / (mean_u * (mean_u + 1.0));
        const double d_dp = 0.5 * std::log2(1.0 + 1.0 / mean_u);
        const double var = std::max(0.0, d_du * d_du * var_u + d_dp * d_dp * var_p +
                                             2.0 * d_du * d_dp * cov_up);
        est.standard_error = std::sqrt(var);
    } else {
        if (scheme == AdaptiveScheme::opra && sum == 0.0)
            throw sampling_error("estimate_capacity: no draw above the OPRA cutoff");
        const double mean = sum / dn;
        const double var = std::max(0.0, sum_sq / dn - mean * mean);
        est.value = mean;
        est.standard_error = std::sqrt(var / dn);
    }
    return est;
}

}  // namespace dfcap
