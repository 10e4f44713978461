#include "tordiff/special.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "tordiff/angles.hpp"
#include "tordiff/errors.hpp"

namespace tordiff {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112;

void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) throw std::domain_error(std::string(what) + ": non-finite input");
}
}  // namespace

double gaussian_pdf(double x, double variance) {
    return std::exp(gaussian_log_pdf(x, variance));
}

double gaussian_log_pdf(double x, double variance) {
    return -0.5 * (kLog2Pi + std::log(variance)) - 0.5 * x * x / variance;
}

double wrapped_normal_pdf(double theta, const WrappedNormalParams& params) {
    return std::exp(wrapped_normal_log_pdf(theta, params));
}

double wrapped_normal_log_pdf(double theta, const WrappedNormalParams& params) {
    require_finite(theta, "wrapped_normal_pdf");
    require_finite(params.mean, "wrapped_normal_pdf");
    if (!(params.variance > 0.0) || !std::isfinite(params.variance))
        throw std::domain_error("wrapped_normal_pdf: variance must be positive and finite");
    const double v = params.variance;
    const double d = angle_diff(theta, wrap_angle(params.mean));
    if (v <= two_pi * two_pi) {
        // direct wrapping sum, K terms each side
        const int K = static_cast<int>(std::ceil(6.0 * std::sqrt(v) / two_pi)) + 1;
        double max_log = -std::numeric_limits<double>::infinity();
        std::vector<double> logs(2 * K + 1);
        for (int k = -K; k <= K; ++k) {
            double y = d + two_pi * k;
            double l = -0.5 * y * y / v;
            logs[k + K] = l;
            max_log = std::max(max_log, l);
        }
        double s = 0.0;
        for (double l : logs) s += std::exp(l - max_log);
        return max_log + std::log(s) - 0.5 * (kLog2Pi + std::log(v));
    }
    // Fourier series; terms until exp(-k^2 v / 2) < 1e-16
    double s = 1.0;
    for (int k = 1;; ++k) {
        double w = std::exp(-0.5 * k * k * v);
        if (w < 1e-16) break;
        s += 2.0 * w * std::cos(k * d);
    }
    return std::log(s) - std::log(two_pi);
}

WrappedGaussMoments wrapped_gauss_moments(double x, double variance) {
    require_finite(x, "wrapped_gauss_moments");
    if (!(variance > 0.0) || !std::isfinite(variance))
        throw std::domain_error("wrapped_gauss_moments: variance must be positive and finite");
    const double v = variance;
    WrappedGaussMoments out{};
    if (v <= 1.0) {
        const double xr = wrap_half_unit(x);
        const int K = static_cast<int>(std::ceil(6.0 * std::sqrt(v))) + 1;
        double max_log = -std::numeric_limits<double>::infinity();
        for (int k = -K; k <= K; ++k) {
            double y = xr + k;
            max_log = std::max(max_log, -0.5 * y * y / v);
        }
        double s0 = 0.0, s1 = 0.0, s2 = 0.0;
        for (int k = -K; k <= K; ++k) {
            double y = xr + k;
            double w = std::exp(-0.5 * y * y / v - max_log);
            s0 += w;
            s1 += y * w;
            s2 += y * y * w;
        }
        // the lattice {x + k} equals {xr + k}, so the sums are unchanged by
        // the reduction; it only keeps the exponent arguments small
        out.log_s0 = max_log + std::log(s0) - 0.5 * (kLog2Pi + std::log(v));
        out.r1 = s1 / s0;
        out.r2 = s2 / s0;
        return out;
    }
    // Fourier forms of s0, s1 = -v w'(x), s2 = v w(x) + 2 v^2 dw/dv
    double w = 1.0, wp = 0.0, wv = 0.0;
    for (int m = 1;; ++m) {
        double e = std::exp(-2.0 * pi * pi * m * m * v);
        if (e < 1e-16) break;
        double c = std::cos(two_pi * m * x), s = std::sin(two_pi * m * x);
        w += 2.0 * e * c;
        wp += -2.0 * e * s * (two_pi * m);
        wv += 2.0 * e * c * (-2.0 * pi * pi * m * m);
    }
    out.log_s0 = std::log(w);
    out.r1 = -v * wp / w;
    out.r2 = v + 2.0 * v * v * wv / w;
    return out;
}

double bessel_i(int order, double x) {
    if (order < 0) throw std::domain_error("bessel_i: order must be >= 0");
    if (!(x >= 0.0) || !std::isfinite(x)) throw std::domain_error("bessel_i: x must be >= 0");
    if (x <= 100.0) return bessel_i_scaled_by_power(order, x) * std::pow(x, order);
    // asymptotic expansion for large argument
    const double mu = 4.0 * order * order;
    double term = 1.0, sum = 1.0;
    double prev = std::numeric_limits<double>::infinity();
    for (int j = 1; j <= 40; ++j) {
        term *= -(mu - (2.0 * j - 1.0) * (2.0 * j - 1.0)) / (8.0 * j * x);
        if (std::abs(term) >= prev) break;  // asymptotic series: stop at smallest term
        sum += term;
        prev = std::abs(term);
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return std::exp(x) / std::sqrt(two_pi * x) * sum;
}

double bessel_i_scaled_by_power(int order, double x) {
    if (order < 0) throw std::domain_error("bessel_i: order must be >= 0");
    if (!(x >= 0.0) || !std::isfinite(x)) throw std::domain_error("bessel_i: x must be >= 0");
    if (x > 100.0) return bessel_i(order, x) / std::pow(x, order);
    // I_m(x)/x^m = sum_j x^{2j} / (2^{2j+m} j! (j+m)!)
    double term = 1.0;
    for (int i = 1; i <= order; ++i) term /= 2.0 * i;  // 1 / (2^m m!)
    double sum = term;
    const double x2 = x * x;
    for (int j = 1; j <= 400; ++j) {
        term *= x2 / (4.0 * j * (j + order));
        sum += term;
        if (term < 1e-17 * sum) return sum;
    }
    return sum;
}

double bessel_i_ratio(double x) {
    return bessel_i(1, x) / bessel_i(0, x);
}

double bvm_normalizing_constant(const BvMNormalizingInput& input) {
    if (!(input.kappa1 >= 0.0) || !(input.kappa2 >= 0.0) || !std::isfinite(input.lambda))
        throw std::domain_error("bvm_normalizing_constant: invalid parameters");
    // C^{-1} = 4 pi^2 sum_m binom(2m,m) (lambda^2/4)^m [I_m(k1)/k1^m][I_m(k2)/k2^m],
    // written with the scaled Bessel so kappa -> 0 stays finite
    const double lam2_4 = 0.25 * input.lambda * input.lambda;
    double binom = 1.0;  // binom(2m, m)
    double lam_pow = 1.0;
    double sum = 0.0;
    int bad_ratio_streak = 0;
    double prev_term = 0.0;
    for (int m = 0; m < 500; ++m) {
        double term = binom * lam_pow * bessel_i_scaled_by_power(m, input.kappa1) *
                      bessel_i_scaled_by_power(m, input.kappa2);
        sum += term;
        if (m > 0 && term < 1e-14 * sum) break;
        if (m > 0 && prev_term > 0.0 && term >= prev_term) {
            if (++bad_ratio_streak >= 25)
                throw ConvergenceError("bvm_normalizing_constant: series not decreasing");
        } else {
            bad_ratio_streak = 0;
        }
        prev_term = term;
        binom *= 2.0 * (2.0 * m + 1.0) / (m + 1.0);
        lam_pow *= lam2_4;
        if (m == 499)
            throw ConvergenceError("bvm_normalizing_constant: series cap of 500 terms reached");
    }
    return 1.0 / (4.0 * pi * pi * sum);
}

double cauchy_pdf(double x, double location, double scale) {
    if (!(scale > 0.0)) throw std::domain_error("cauchy_pdf: scale must be positive");
    const double d = x - location;
    return scale / (pi * (d * d + scale * scale));
}

double cauchy_log_pdf(double x, double location, double scale) {
    if (!(scale > 0.0)) throw std::domain_error("cauchy_pdf: scale must be positive");
    const double d = x - location;
    return std::log(scale) - std::log(pi) - std::log(d * d + scale * scale);
}

double wrapped_cauchy_sum_unit(double x, double scale) {
    if (!(scale > 0.0)) throw std::domain_error("wrapped_cauchy_sum_unit: scale must be positive");
    const double rho = std::exp(-two_pi * scale);
    const double denom = 1.0 + rho * rho - 2.0 * rho * std::cos(two_pi * x);
    return (1.0 - rho * rho) / denom;
}

double normal_cdf(double z) {
    return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

namespace {

// regularized lower incomplete gamma P(a, x), series + continued fraction
double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::domain_error("gamma_p: bad arguments");
    if (x == 0.0) return 0.0;
    const double gln = std::lgamma(a);
    if (x < a + 1.0) {
        double ap = a, del = 1.0 / a, sum = del;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-15)
                return sum * std::exp(-x + a * std::log(x) - gln);
        }
        throw ConvergenceError("gamma_p: series did not converge");
    }
    // Lentz continued fraction for Q(a, x)
    const double tiny = 1e-300;
    double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) {
            double q = std::exp(-x + a * std::log(x) - gln) * h;
            return 1.0 - q;
        }
    }
    throw ConvergenceError("gamma_p: continued fraction did not converge");
}

}  // namespace

double chisq_cdf(double x, double df) {
    if (x <= 0.0) return 0.0;
    return gamma_p(0.5 * df, 0.5 * x);
}

double chisq_quantile(double p, double df) {
    if (!(p >= 0.0 && p < 1.0)) throw std::domain_error("chisq_quantile: p must be in [0, 1)");
    if (p == 0.0) return 0.0;
    double lo = 0.0, hi = df + 10.0;
    while (chisq_cdf(hi, df) < p) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        if (chisq_cdf(mid, df) < p)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-12 * (1.0 + hi)) break;
    }
    return 0.5 * (lo + hi);
}

double kolmogorov_tail(double lambda) {
    if (lambda <= 0.0) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int j = 1; j <= 100; ++j) {
        double t = std::exp(-2.0 * j * j * lambda * lambda);
        sum += sign * t;
        sign = -sign;
        if (t < 1e-16) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_pvalue(double d, std::size_t n) {
    double sn = std::sqrt(static_cast<double>(n));
    return kolmogorov_tail((sn + 0.12 + 0.11 / sn) * d);
}

double ks_pvalue_two_sample(double d, std::size_t n1, std::size_t n2) {
    double ne = static_cast<double>(n1) * static_cast<double>(n2) / (n1 + n2);
    double sn = std::sqrt(ne);
    return kolmogorov_tail((sn + 0.12 + 0.11 / sn) * d);
}

}  // namespace tordiff
