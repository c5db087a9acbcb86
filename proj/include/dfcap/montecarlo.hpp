#ifndef DFCAP_MONTECARLO_HPP
#define DFCAP_MONTECARLO_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dfcap/capacity.hpp"
#include "dfcap/distribution.hpp"

namespace dfcap {

/// A Monte Carlo point estimate. Reproducible: identical (seed, samples,
/// parameters) always yield the identical estimate.
struct SimulationEstimate {
    double value = 0.0;
    double standard_error = 0.0;
    std::int64_t samples = 0;
    std::uint64_t seed = 0;
};

/// Raised when an estimator's sample set is degenerate (e.g. no draw above
/// the cutoff).
class sampling_error : public std::runtime_error {
  public:
    explicit sampling_error(const std::string& what) : std::runtime_error(what) {}
};

/// Draws n instantaneous SNR values gamma = G1^2 + G2^2 with
/// G1 ~ N(s cos(los_phase), sigma^2/2), G2 ~ N(s sin(los_phase), sigma^2/2),
/// s^2 = K mean_snr / (1+K), sigma^2 = mean_snr / (1+K). The phase split of
/// the line-of-sight mean does not affect the distribution.
///
/// Draw i is a pure function of (seed, i): generation is counter-based, so
/// chunks may be produced independently and merged.
std::vector<double> sample_hop_snr(const RicianHop& hop, std::uint64_t seed,
                                   std::int64_t n, double los_phase = 0.0);

namespace detail {
/// Single draw at a given counter index (the primitive behind sample_hop_snr).
double hop_snr_draw(const RicianHop& hop, std::uint64_t seed,
                    std::int64_t index, double los_phase = 0.0);
/// Per-hop substreams of a master seed.
std::uint64_t substream_seed(std::uint64_t master, std::uint64_t salt);
}  // namespace detail

/// Empirical CDF of min(snr_x, snr_y) from n paired draws, evaluated at each
/// grid point; standard errors by the binomial formula. Requires n >= 1000.
std::vector<SimulationEstimate> estimate_min_cdf(const MinSnrDistribution& dist,
                                                 std::span<const double> gamma_grid,
                                                 std::uint64_t seed,
                                                 std::int64_t n);

/// Sample-mean estimator of the scheme's defining expectation over the min
/// SNR. For OPRA/TIFR the cutoff is taken from `cutoff` when present and
/// from the analytic solver otherwise. TIFR standard errors use the delta
/// method on the (inverse-mean, outage-fraction) pair.
SimulationEstimate estimate_capacity(const MinSnrDistribution& dist,
                                     AdaptiveScheme scheme,
                                     std::optional<double> cutoff,
                                     std::uint64_t seed, std::int64_t n);

}  // namespace dfcap

#endif
