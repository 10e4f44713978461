#pragma once

#include <cstdint>

namespace tordiff {

// ---------------------------------------------------------------------------
// Gaussian and wrapped normal
// ---------------------------------------------------------------------------

struct WrappedNormalParams {
    double mean;      // radians, reduced to [0, 2pi) on use
    double variance;  // radians^2, > 0
};

double gaussian_pdf(double x, double variance);
double gaussian_log_pdf(double x, double variance);

/// Wrapped normal density on [0, 2pi). Evaluates the wrapping sum
/// sum_k phi_var(theta - mean + 2k pi) for moderate variance and switches to
/// the Fourier series (1/2pi)[1 + 2 sum_k exp(-k^2 var/2) cos(k(theta-mean))]
/// when variance > (2pi)^2, where the wrapping sum converges slowly.
double wrapped_normal_pdf(double theta, const WrappedNormalParams& params);
double wrapped_normal_log_pdf(double theta, const WrappedNormalParams& params);

/// Weighted winding sums on the unit lattice for the transition likelihood:
///   s0 = sum_k phi_v(x + k),  r1 = sum_k (x+k) phi_v(x+k) / s0,
///   r2 = sum_k (x+k)^2 phi_v(x+k) / s0.
/// Uses the same truncation/switch rule as wrapped_normal_pdf rescaled to
/// period 1, so transition densities and scores share one numeric path.
struct WrappedGaussMoments {
    double log_s0;
    double r1;
    double r2;
};
WrappedGaussMoments wrapped_gauss_moments(double x, double variance);

// ---------------------------------------------------------------------------
// Bessel / bivariate von Mises constant
// ---------------------------------------------------------------------------

/// Modified Bessel function of the first kind, integer order >= 0.
/// Power series for small argument, asymptotic expansion for large.
double bessel_i(int order, double x);

/// I_order(x) / x^order, finite at x = 0 (equals 1 / (2^order order!)).
double bessel_i_scaled_by_power(int order, double x);

/// I_1(x) / I_0(x), the von Mises mean resultant length.
double bessel_i_ratio(double x);

struct BvMNormalizingInput {
    double kappa1;  // >= 0
    double kappa2;  // >= 0
    double lambda;
};

/// Normalizing constant C(kappa1, kappa2, lambda) of the sine bivariate von
/// Mises density, from the series
///   C^{-1} = 4 pi^2 sum_m binom(2m, m) (lambda^2/(4 k1 k2))^m I_m(k1) I_m(k2),
/// truncated when a term drops below 1e-14 of the running sum (cap 500 terms).
double bvm_normalizing_constant(const BvMNormalizingInput& input);

// ---------------------------------------------------------------------------
// Cauchy
// ---------------------------------------------------------------------------

/// Density scale/pi / ((x-location)^2 + scale^2); scale > 0.
double cauchy_pdf(double x, double location, double scale);
double cauchy_log_pdf(double x, double location, double scale);

/// sum_k cauchy_pdf(x + k; 0, scale) in closed form:
/// (1 - rho^2) / (1 + rho^2 - 2 rho cos(2 pi x)) with rho = exp(-2 pi scale).
double wrapped_cauchy_sum_unit(double x, double scale);

// ---------------------------------------------------------------------------
// Distribution utilities shared by inference and the experiment harness
// ---------------------------------------------------------------------------

double normal_cdf(double z);
double chisq_cdf(double x, double df);
double chisq_quantile(double p, double df);

/// Kolmogorov asymptotic tail Q(lambda) = 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2).
double kolmogorov_tail(double lambda);
/// One-sample KS p-value for statistic d at sample size n (with the usual
/// small-sample correction of the effective sqrt(n)).
double ks_pvalue(double d, std::size_t n);
/// Two-sample KS p-value for statistic d at sizes n1, n2.
double ks_pvalue_two_sample(double d, std::size_t n1, std::size_t n2);

}  // namespace tordiff
