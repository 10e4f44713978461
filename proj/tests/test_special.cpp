#include <doctest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "tordiff/angles.hpp"
#include "tordiff/quadrature.hpp"
#include "tordiff/special.hpp"

using namespace tordiff;

namespace {

// test-local oracles, independent of the library's switching logic

double wn_direct_sum(double theta, double mu, double var, int terms) {
    long double s = 0.0L;
    for (int k = -terms; k <= terms; ++k) {
        long double y = theta - mu + two_pi * k;
        s += std::exp(-0.5L * y * y / var) / std::sqrt(2.0L * pi * var);
    }
    return static_cast<double>(s);
}

double wn_fourier(double theta, double mu, double var, int terms) {
    long double s = 1.0L;
    for (int k = 1; k <= terms; ++k)
        s += 2.0L * std::exp(-0.5L * k * k * var) * std::cos(k * (theta - mu));
    return static_cast<double>(s / (2.0L * pi));
}

}  // namespace

TEST_CASE("wrapped normal: uniform limit at large variance") {
    WrappedNormalParams p{1.3, 1e6};
    CHECK_CLOSE_ABS(wrapped_normal_pdf(1.3, p), 1.0 / two_pi, 1e-10);
}

TEST_CASE("wrapped normal: direct sum and Fourier series as mutual oracles") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> ang(0.0, two_pi);
    std::uniform_real_distribution<double> logv(std::log(0.01), std::log(150.0));
    for (int i = 0; i < 100; ++i) {
        double theta = ang(gen), mu = ang(gen), var = std::exp(logv(gen));
        double ref_direct = wn_direct_sum(theta, mu, var, 400);
        double ref_fourier = wn_fourier(theta, mu, var, 400);
        double got = wrapped_normal_pdf(theta, {mu, var});
        CHECK(std::abs(ref_direct - ref_fourier) < 1e-10);
        CHECK(std::abs(got - ref_direct) < 1e-10);
    }
}

TEST_CASE("wrapped normal: integrates to one") {
    for (double var : {0.05, 0.7, 3.0, 60.0}) {
        double mass = integrate_adaptive(
            [var](double t) { return wrapped_normal_pdf(t, {1.0, var}); }, 0.0, two_pi, 1e-11);
        CHECK_CLOSE_ABS(mass, 1.0, 1e-9);
    }
}

TEST_CASE("wrapped normal: symmetry, periodicity, positivity") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> ang(0.0, two_pi);
    for (int i = 0; i < 50; ++i) {
        double theta = ang(gen), mu = ang(gen), var = 0.05 + 3.0 * ang(gen);
        double a = wrapped_normal_pdf(theta, {mu, var});
        double b = wrapped_normal_pdf(mu, {theta, var});
        CHECK(std::abs(a - b) <= 1e-13 * a);
        double c = wrapped_normal_pdf(theta + two_pi, {mu, var});
        CHECK(std::abs(a - c) <= 1e-14 * a);
        CHECK(a > 0.0);
    }
}

TEST_CASE("wrapped normal: domain errors") {
    CHECK_THROWS_AS(wrapped_normal_pdf(std::nan(""), {0.0, 1.0}), std::domain_error);
    CHECK_THROWS_AS(wrapped_normal_pdf(0.0, {0.0, -1.0}), std::domain_error);
    CHECK_THROWS_AS(wrapped_normal_pdf(0.0, {0.0, 0.0}), std::domain_error);
}

TEST_CASE("wrapped gaussian winding moments match a long reference sum") {
    std::mt19937_64 gen(13);
    std::uniform_real_distribution<double> xs(-3.0, 3.0);
    std::uniform_real_distribution<double> logv(std::log(1e-4), std::log(30.0));
    for (int i = 0; i < 200; ++i) {
        double x = xs(gen), v = std::exp(logv(gen));
        long double s0 = 0.0L, s1 = 0.0L, s2 = 0.0L;
        for (int k = -2000; k <= 2000; ++k) {
            long double y = x + k;
            long double w = std::exp(-0.5L * y * y / v);
            s0 += w;
            s1 += y * w;
            s2 += y * y * w;
        }
        long double norm = std::sqrt(2.0L * pi * v);
        auto m = wrapped_gauss_moments(x, v);
        CHECK(m.log_s0 == doctest::Approx(static_cast<double>(std::log(s0 / norm))).epsilon(1e-9));
        CHECK_CLOSE_ABS(m.r1, static_cast<double>(s1 / s0), 1e-9);
        CHECK(m.r2 == doctest::Approx(static_cast<double>(s2 / s0)).epsilon(1e-8).scale(1e-9));
    }
}

TEST_CASE("bessel_i: exact small-argument values") {
    CHECK(bessel_i(0, 0.0) == 1.0);
    CHECK(bessel_i(1, 0.0) == 0.0);
}

TEST_CASE("bessel_i: I0(2) against an extended-precision power series") {
    long double sum = 0.0L, term = 1.0L;
    for (int m = 1; m <= 40; ++m) {
        sum += term;
        term *= 1.0L / (static_cast<long double>(m) * m);  // (x/2)^{2m}/(m!)^2 at x = 2
    }
    CHECK(bessel_i(0, 2.0) == doctest::Approx(static_cast<double>(sum)).epsilon(1e-13));
}

TEST_CASE("bessel_i: three-term recurrence") {
    for (double x : {0.5, 1.0, 3.0, 8.0, 20.0, 50.0}) {
        for (int m = 1; m <= 6; ++m) {
            double lhs = bessel_i(m - 1, x) - bessel_i(m + 1, x);
            double rhs = 2.0 * m / x * bessel_i(m, x);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
        }
    }
}

TEST_CASE("bessel_i: asymptotic branch against an extended-precision series") {
    for (int order : {0, 1, 3}) {
        const long double x = 120.0L;
        long double term = 1.0L;
        for (int i = 1; i <= order; ++i) term *= x / (2.0L * i);
        long double sum = term;
        for (int j = 1; j <= 500; ++j) {
            term *= (x * x / 4.0L) / (static_cast<long double>(j) * (j + order));
            sum += term;
        }
        CHECK(bessel_i(order, 120.0) ==
              doctest::Approx(static_cast<double>(sum)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(bessel_i(0, -1.0), std::domain_error);
    CHECK_THROWS_AS(bessel_i(-1, 1.0), std::domain_error);
}

TEST_CASE("bvm normalizing constant: lambda = 0 collapses to the m = 0 term") {
    double c = bvm_normalizing_constant({1.2, 2.5, 0.0});
    double expect = 1.0 / (4.0 * pi * pi * bessel_i(0, 1.2) * bessel_i(0, 2.5));
    CHECK(c == doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("bvm normalizing constant: uniform torus") {
    double c = bvm_normalizing_constant({0.0, 0.0, 0.0});
    CHECK(c == doctest::Approx(1.0 / (4.0 * pi * pi)).epsilon(1e-14));
}

TEST_CASE("bvm normalizing constant: against 2-D quadrature") {
    const double k1 = 1.0, k2 = 1.5, lam = 1.0;
    auto inner = [&](double t1) {
        return integrate_adaptive(
            [&](double t2) {
                return std::exp(k1 * std::cos(t1) + k2 * std::cos(t2) +
                                lam * std::sin(t1) * std::sin(t2));
            },
            0.0, two_pi, 1e-11);
    };
    double mass = integrate_adaptive(inner, 0.0, two_pi, 1e-9);
    CHECK(bvm_normalizing_constant({k1, k2, lam}) == doctest::Approx(1.0 / mass).epsilon(1e-8));
}

TEST_CASE("cauchy pdf: exact points and tail mass") {
    const double s = 0.7, loc = 0.3;
    CHECK(cauchy_pdf(loc, loc, s) == doctest::Approx(1.0 / (pi * s)).epsilon(1e-14));
    CHECK(cauchy_pdf(loc + s, loc, s) == doctest::Approx(1.0 / (2.0 * pi * s)).epsilon(1e-14));
    CHECK_THROWS_AS(cauchy_pdf(0.0, 0.0, 0.0), std::domain_error);
    double mass = integrate_adaptive([&](double x) { return cauchy_pdf(x, loc, s); },
                                     loc - 50.0 * s, loc + 50.0 * s, 1e-10);
    // exact two-sided tail of the truncation: (2/pi) atan(1/50) ~ 2/(50 pi)
    CHECK_CLOSE_ABS(mass, 1.0 - 2.0 / pi * std::atan(1.0 / 50.0), 1e-6);
}

TEST_CASE("wrapped cauchy unit sum equals a long direct sum") {
    for (double s : {0.05, 0.3, 1.0}) {
        for (double x : {0.0, 0.21, -0.47}) {
            long double ref = 0.0L;
            for (int k = -200000; k <= 200000; ++k) ref += cauchy_pdf(x + k, 0.0, s);
            // quadratic tail: add the integral remainder beyond the sum
            ref += (1.0L - 2.0L / pi * std::atan((200000.5L) / s));
            CHECK(wrapped_cauchy_sum_unit(x, s) ==
                  doctest::Approx(static_cast<double>(ref)).epsilon(1e-9));
        }
    }
}

TEST_CASE("chi-square cdf and quantile") {
    CHECK(chisq_cdf(3.0, 2.0) == doctest::Approx(1.0 - std::exp(-1.5)).epsilon(1e-12));
    for (double df : {1.0, 2.0, 3.0, 6.0}) {
        for (double p : {0.01, 0.5, 0.95, 0.99}) {
            CHECK(chisq_cdf(chisq_quantile(p, df), df) == doctest::Approx(p).epsilon(1e-9));
        }
    }
}

TEST_CASE("normal cdf basics") {
    CHECK(normal_cdf(0.0) == doctest::Approx(0.5));
    CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-9));
}
