#ifndef DFCAP_CAPACITY_HPP
#define DFCAP_CAPACITY_HPP

#include <optional>
#include <stdexcept>
#include <string>

#include "dfcap/distribution.hpp"
#include "dfcap/quadrature.hpp"

namespace dfcap {

/// The three adaptive transmission policies.
enum class AdaptiveScheme { ora, opra, tifr };

enum class CapacityBackend { series, quadrature };

/// Per-unit-bandwidth ergodic capacity (C/B, bit/s/Hz). The half-duplex
/// factor 0.5 of the two-hop protocol is included in every value. Both the
/// series closed form and the quadrature backend are always evaluated;
/// `backend` records which one produced `capacity` and `error_estimate` is
/// their relative disagreement.
struct CapacityResult {
    AdaptiveScheme scheme;
    double capacity = 0.0;
    std::optional<double> cutoff;              // gamma0 (opra) or beta0 (tifr)
    std::optional<double> outage_probability;  // tifr only
    CapacityBackend backend = CapacityBackend::series;
    double error_estimate = 0.0;
};

struct CapacityOptions {
    QuadratureSpec quadrature{};
    /// Relative series/quadrature disagreement above which the result is
    /// considered suspect by `validate`-style consumers.
    double backend_agreement_tolerance = 1e-6;
};

/// Raised by the cutoff solver when the root is not bracketed or the
/// pre-solve monotonicity check fails (both signal a broken evaluation, not
/// a legitimate parameter point).
class solver_error : public std::runtime_error {
  public:
    explicit solver_error(const std::string& what) : std::runtime_error(what) {}
};

/// Optimal rate adaptation at constant power:
/// C/B = 0.5 E[log2(1 + snr_min)].
CapacityResult capacity_ora(const MinSnrDistribution& dist,
                            const CapacityOptions& options = {});

/// Optimal cutoff for simultaneous power-and-rate adaptation: the unique
/// root in (0, 1] of (1 - F(g0))/g0 - E[1/snr on {snr >= g0}] - 1 = 0,
/// found by bisection after a monotonicity sanity scan.
double opra_cutoff(const MinSnrDistribution& dist,
                   const CapacityOptions& options = {});

/// Optimal power and rate adaptation:
/// C/B = 0.5 E[log2(snr_min / g0) on {snr_min >= g0}].
CapacityResult capacity_opra(const MinSnrDistribution& dist,
                             const CapacityOptions& options = {});

/// P(snr_min < beta0) = F(beta0).
double outage_probability(const MinSnrDistribution& dist, double beta0);

/// Truncated channel inversion with fixed rate at cutoff beta0 > 0:
/// C/B = 0.5 log2(1 + 1 / E[1/snr on {snr >= beta0}]) (1 - P_out).
CapacityResult capacity_tifr(const MinSnrDistribution& dist, double beta0,
                             const CapacityOptions& options = {});

/// Maximizes the truncated-inversion capacity over beta0 in (0, 1]
/// (grid bracketing plus golden-section refinement to cutoff width 1e-6).
CapacityResult optimize_tifr_cutoff(const MinSnrDistribution& dist,
                                    const CapacityOptions& options = {});

}  // namespace dfcap

#endif
