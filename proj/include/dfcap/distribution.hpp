#ifndef DFCAP_DISTRIBUTION_HPP
#define DFCAP_DISTRIBUTION_HPP

#include <stdexcept>
#include <string>

namespace dfcap {

/// One Rician-faded hop. The instantaneous SNR is noncentral chi-square with
/// two degrees of freedom: density A e^{-a g} I0(2 sqrt(K a g)) with
/// a = (1+K)/mean_snr and A = a e^{-K}.
struct RicianHop {
    double k_factor;
    double mean_snr;

    RicianHop(double k, double snr) : k_factor(k), mean_snr(snr) {
        if (!(k_factor >= 0.0))
            throw std::invalid_argument("RicianHop: k_factor must be >= 0");
        if (!(mean_snr > 0.0))
            throw std::invalid_argument("RicianHop: mean_snr must be > 0");
    }

    /// Exponential rate a = (1+K)/mean_snr.
    double rate() const { return (1.0 + k_factor) / mean_snr; }
    /// Density at the origin, A = a e^{-K}.
    double density_at_zero() const;
};

/// Truncation policy for the power-series evaluations. Series stop once the
/// certified truncation bound drops below `tolerance`, or after `max_terms`
/// terms whichever comes first.
struct SeriesControl {
    double tolerance = 1e-12;
    int max_terms = 512;

    void validate() const {
        if (!(tolerance > 0.0))
            throw std::invalid_argument("SeriesControl: tolerance must be > 0");
        if (max_terms < 1)
            throw std::invalid_argument("SeriesControl: max_terms must be >= 1");
    }
};

/// Convergence record attached to a series evaluation.
struct SeriesDiagnostics {
    int terms_used = 0;
    double truncation_bound = 0.0;
    bool converged = true;
};

/// Raised when a series hits its term cap before reaching tolerance, for
/// operations whose contract requires a converged value.
class series_error : public std::runtime_error {
  public:
    explicit series_error(const std::string& what) : std::runtime_error(what) {}
};

/// Single-hop SNR density. Uses the power-series form of the Bessel factor;
/// the truncation bound is the Poisson(K) tail times the rate a.
double single_hop_pdf(const RicianHop& hop, double gamma,
                      const SeriesControl& control = {},
                      SeriesDiagnostics* diag = nullptr);

/// Single-hop survival P(SNR > gamma), the Poisson(K)-weighted sum of
/// regularized upper incomplete gammas Q(n+1, a gamma). The truncation bound
/// is exactly the Poisson tail mass.
double single_hop_survival(const RicianHop& hop, double gamma,
                           const SeriesControl& control = {},
                           SeriesDiagnostics* diag = nullptr);

/// Distribution of min{snr_x, snr_y} for two independent Rician hops.
/// Immutable after construction; all evaluations are pure.
class MinSnrDistribution {
  public:
    MinSnrDistribution(RicianHop hop_x, RicianHop hop_y,
                       SeriesControl control = {})
        : hop_x_(hop_x), hop_y_(hop_y), control_(control) {
        control_.validate();
    }

    const RicianHop& hop_x() const { return hop_x_; }
    const RicianHop& hop_y() const { return hop_y_; }
    const SeriesControl& control() const { return control_; }

    /// F(gamma) = 1 - S_x(gamma) S_y(gamma).
    double cdf(double gamma, SeriesDiagnostics* diag = nullptr) const;
    /// f(gamma) = f_x S_y + f_y S_x (product rule on the survival product).
    double pdf(double gamma, SeriesDiagnostics* diag = nullptr) const;
    /// S(gamma) = S_x(gamma) S_y(gamma).
    double survival(double gamma, SeriesDiagnostics* diag = nullptr) const;

    /// E[1/SNR on {SNR >= gamma0}] = int_{gamma0}^inf f(g)/g dg, gamma0 > 0,
    /// evaluated as the double power series with the incomplete-gamma /
    /// exponential-integral branch kernel. Throws series_error if the term
    /// cap is reached before the certified bound meets tolerance.
    double expected_inverse_tail(double gamma0,
                                 SeriesDiagnostics* diag = nullptr) const;

  private:
    RicianHop hop_x_;
    RicianHop hop_y_;
    SeriesControl control_;
};

}  // namespace dfcap

#endif
