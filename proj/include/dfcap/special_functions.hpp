#ifndef DFCAP_SPECIAL_FUNCTIONS_HPP
#define DFCAP_SPECIAL_FUNCTIONS_HPP

#include <vector>

namespace dfcap {

/// Diagnostics of a closed-form evaluation that may be replaced by its
/// quadrature backend when the alternating sum cancels too heavily.
struct ClosedFormDiagnostics {
    double condition = 1.0;  // sum|terms| / |sum terms|
    bool quadrature_fallback = false;
};

/// Upper incomplete gamma Gamma(a, x) = int_x^inf t^{a-1} e^{-t} dt, a > 0.
/// Gamma(a, 0) = Gamma(a).
double upper_incomplete_gamma(double a, double x);

/// Regularized upper incomplete gamma of integer order,
/// Q(n+1, x) = e^{-x} sum_{m=0}^{n} x^m / m!, evaluated in log domain.
double regularized_upper_gamma(int n_plus_1, double x);

/// Exponential integral E1(x) = int_1^inf t^{-1} e^{-x t} dt, x > 0.
double exponential_integral_e1(double x);

/// G^{3,0}_{2,3}(mu | 0,0; -1,-1,q) evaluated through its integral form
///   (1/mu) int_mu^inf t^q e^{-t} ln(t/mu) dt,  mu > 0, q >= 0.
double meijer_g_2_3_kernel(double mu, int q);

/// int_0^inf w^alpha e^{-beta w} ln(1+w) dw for integer alpha >= 0, beta > 0.
/// Primary route is the alternating binomial sum over the Meijer kernel; when
/// its conditioning exceeds 1e8 the defining integral is evaluated by
/// adaptive quadrature instead and the switch is recorded in `diag`.
double log_weighted_gamma_integral(int alpha, double beta,
                                   ClosedFormDiagnostics* diag = nullptr);

/// int_eta^inf w^alpha e^{-beta w} ln(w/eta) dw for integer alpha >= 0,
/// beta > 0, eta > 0, via (eta / beta^alpha) G^{3,0}_{2,3}(beta eta | ...).
double log_ratio_gamma_integral(int alpha, double beta, double eta);

namespace detail {

/// log of J(q, mu) = int_0^inf (1+u)^q e^{-mu u} ln(1+u) du.
/// Every Meijer-kernel evaluation in this project reduces to J:
///   G^{3,0}_{2,3}(mu | 0,0; -1,-1,q) = mu^q e^{-mu} J(q, mu).
/// `rel_tol` is the quadrature accuracy; callers that feed J into the
/// cancellation-prone alternating sum need it near machine precision, while
/// cancellation-free consumers can run much looser.
double ln_j_kernel(int q, double mu, double rel_tol = 1e-14);

/// Accuracy the alternating binomial sum needs from its J kernels at this
/// beta: the sum's condition grows like e^{2 beta}, so small beta tolerates
/// loose kernels and large beta needs machine-precision ones.
double j_tolerance_for_alternating_sum(double beta);

/// Memoizes ln J(q, mu) at fixed mu; the capacity series asks for the same
/// kernels at every binomial order.
class LnJCache {
  public:
    explicit LnJCache(double mu, double rel_tol = 1e-14)
        : mu_(mu), rel_tol_(rel_tol) {}
    double operator()(int q);

  private:
    double mu_;
    double rel_tol_;
    std::vector<double> values_;
};

/// Natural log of log_weighted_gamma_integral (overflow-safe form).
double ln_weighted_gamma_integral(int alpha, double beta,
                                  ClosedFormDiagnostics* diag = nullptr);

/// Same, reusing an existing kernel cache for beta.
double ln_weighted_gamma_integral_cached(int alpha, double beta, LnJCache& cache,
                                         ClosedFormDiagnostics* diag = nullptr);

/// Natural log of log_ratio_gamma_integral.
double ln_ratio_gamma_integral(int alpha, double beta, double eta);

/// log Gamma(u, x) for integer u = 1..n_max at fixed x >= 0, by the stable
/// forward recurrence Gamma(u+1, x) = u Gamma(u, x) + x^u e^{-x}.
/// Returned vector has size n_max + 1; index 0 is unused.
std::vector<double> log_upper_gamma_table(int n_max, double x);

/// Digamma at positive integer argument: psi(n) = -euler_gamma + H_{n-1}.
double digamma_integer(int n);

/// Regularized Q(a, x) for continuous a > 0 (series / continued fraction).
double regularized_gamma_q(double a, double x);

double log_add_exp(double la, double lb);

}  // namespace detail

}  // namespace dfcap

#endif
