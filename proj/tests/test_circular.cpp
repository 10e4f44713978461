#include <doctest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "tordiff/angles.hpp"
#include "tordiff/circular.hpp"
#include "tordiff/quadrature.hpp"
#include "tordiff/special.hpp"

using namespace tordiff;

namespace {

std::vector<CircularDensity> all_families() {
    return {CircularDensity::uniform(), CircularDensity::von_mises(0.7, 2.0),
            CircularDensity::wrapped_cauchy(1.1, 0.5),
            CircularDensity::von_mises_mixture(
                {{0.4, 0.0, 8.0}, {0.3, -pi / 2, 3.0}, {0.3, pi / 2, 5.0}})};
}

}  // namespace

TEST_CASE("uniform pdf is 1/(2pi) everywhere") {
    auto d = CircularDensity::uniform();
    for (double t : {0.0, 1.0, 4.0, 6.2}) CHECK(d.pdf(t) == doctest::Approx(1.0 / two_pi));
}

TEST_CASE("von Mises derivative vanishes at the mode") {
    auto d = CircularDensity::von_mises(0.0, 3.0);
    CHECK(d.pdf_derivative(0.0) == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("wrapped Cauchy pdf matches the closed formula in extended precision") {
    auto d = CircularDensity::wrapped_cauchy(0.0, 0.5);
    for (double t : {0.0, 0.9, 2.7, 5.1}) {
        long double rho = 0.5L;
        long double ref = (1.0L - rho * rho) /
                          (2.0L * pi * (1.0L + rho * rho - 2.0L * rho * std::cos((long double)t)));
        CHECK(d.pdf(t) == doctest::Approx(static_cast<double>(ref)).epsilon(1e-14));
    }
}

TEST_CASE("pdf integrates to one for every family") {
    for (const auto& d : all_families()) {
        double mass =
            integrate_adaptive([&](double t) { return d.pdf(t); }, 0.0, two_pi, 1e-11);
        CHECK_CLOSE_ABS(mass, 1.0, 1e-9);
    }
}

TEST_CASE("pdf derivative matches central finite differences") {
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> ang(0.0, two_pi);
    for (const auto& d : all_families()) {
        for (int i = 0; i < 100; ++i) {
            double t = ang(gen);
            double fd = testsup::central_diff([&](double x) { return d.pdf(x); }, t, 1e-5);
            double an = d.pdf_derivative(t);
            CHECK(std::abs(fd - an) <= 1e-5 * (std::abs(an) + 1e-6));
        }
    }
}

TEST_CASE("cdf fixed points and symmetry") {
    CircularCdf u(CircularDensity::uniform());
    CHECK(u.cdf(pi) == doctest::Approx(0.5).epsilon(1e-14));
    for (double kappa : {0.5, 2.0, 8.0}) {
        CircularCdf vm(CircularDensity::von_mises(0.0, kappa));
        CHECK_CLOSE_ABS(vm.cdf(pi), 0.5, 1e-10);
    }
}

TEST_CASE("cdf periodic extension identity over all of R") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> xs(-20.0, 20.0);
    for (const auto& d : all_families()) {
        CircularCdf F(d);
        for (int i = 0; i < 50; ++i) {
            double x = xs(gen);
            CHECK_CLOSE_ABS(F.cdf(x + two_pi) - F.cdf(x), 1.0, 1e-12);
        }
    }
}

TEST_CASE("cdf is strictly monotone") {
    std::mt19937_64 gen(6);
    std::uniform_real_distribution<double> xs(-10.0, 10.0);
    for (const auto& d : all_families()) {
        CircularCdf F(d);
        for (int i = 0; i < 50; ++i) {
            double a = xs(gen), b = xs(gen);
            if (a > b) std::swap(a, b);
            if (b - a < 1e-6) continue;
            CHECK(F.cdf(a) < F.cdf(b));
        }
    }
}

TEST_CASE("inverse cdf closed-form points") {
    CircularCdf u(CircularDensity::uniform());
    CHECK(u.inverse(0.25) == doctest::Approx(pi / 2).epsilon(1e-12));
    CircularCdf vm(CircularDensity::von_mises(0.0, 2.0));
    CHECK_CLOSE_ABS(vm.inverse(0.5), pi, 1e-8);
}

TEST_CASE("inverse cdf round-trips across the real line") {
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> xs(-10.0 * pi, 10.0 * pi);
    for (const auto& d : all_families()) {
        CircularCdf F(d);
        for (int i = 0; i < 250; ++i) {
            double x = xs(gen);
            CHECK_CLOSE_ABS(F.inverse(F.cdf(x)), x, 1e-8);
        }
    }
}

TEST_CASE("inverse cdf honors the unit-interval reduction identity") {
    CircularCdf F(CircularDensity::von_mises(1.0, 2.0));
    std::mt19937_64 gen(10);
    std::uniform_real_distribution<double> ys(-4.0, 4.0);
    for (int i = 0; i < 50; ++i) {
        double y = ys(gen);
        double lhs = F.inverse(y);
        double rhs = F.inverse(y - std::floor(y)) + two_pi * std::floor(y);
        CHECK_CLOSE_ABS(lhs, rhs, 1e-10);
        CHECK_CLOSE_ABS(F.cdf(lhs), y, 1e-10);
    }
}

TEST_CASE("stationary sampling: uniform KS and von Mises circular mean") {
    RngStream rng(42);
    CircularCdf u(CircularDensity::uniform());
    auto su = u.sample_stationary(10000, rng);
    double ks = testsup::ks_statistic(su, [](double x) { return x / two_pi; });
    CHECK(ks < 0.02);

    RngStream rng2(43);
    CircularCdf vm(CircularDensity::von_mises(0.0, 2.0));
    auto sv = vm.sample_stationary(10000, rng2);
    CHECK(std::abs(testsup::circular_mean(sv)) < 0.05);

    RngStream rng3(44);
    CHECK(u.sample_stationary(0, rng3).empty());
}

TEST_CASE("a wrong normalizing constant is absorbed by renormalization") {
    auto d = CircularDensity::von_mises(0.4, 2.0);
    auto scaled = d.with_scale(3.7);
    CircularCdf F(d), Fs(scaled);
    std::mt19937_64 gen(12);
    std::uniform_real_distribution<double> xs(-5.0, 5.0);
    for (int i = 0; i < 40; ++i) {
        double x = xs(gen);
        CHECK(d.pdf(x) == doctest::Approx(scaled.pdf(x)).epsilon(1e-14));
        CHECK_CLOSE_ABS(F.cdf(x), Fs.cdf(x), 1e-12);
        double y = F.cdf(x);
        CHECK_CLOSE_ABS(F.inverse(y), Fs.inverse(y), 1e-10);
    }
}

TEST_CASE("construction rejects invalid parameters") {
    CHECK_THROWS_AS(CircularDensity::von_mises(0.0, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(CircularDensity::wrapped_cauchy(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(CircularDensity::von_mises_mixture({{0.5, 0.0, 1.0}, {0.6, 1.0, 1.0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(CircularDensity::von_mises_mixture({}), std::invalid_argument);
}

TEST_CASE("json round trip") {
    auto mix = CircularDensity::von_mises_mixture({{0.4, 0.0, 8.0}, {0.6, 2.0, 3.0}});
    auto back = CircularDensity::from_json(mix.to_json());
    for (double t : {0.1, 2.2, 5.0}) CHECK(back.pdf(t) == doctest::Approx(mix.pdf(t)));
    auto wc = CircularDensity::from_json(nlohmann::json::parse(
        R"({"family":"wrapped_cauchy","mu":0.5,"rho":0.3})"));
    CHECK(wc.family() == CircularFamily::wrapped_cauchy);
    CHECK_THROWS(CircularDensity::from_json(nlohmann::json::parse(R"({"family":"nope"})")));
}

TEST_CASE("beta round trip and grad_log_pdf finite differences") {
    std::mt19937_64 gen(21);
    std::uniform_real_distribution<double> ang(0.0, two_pi);
    for (const auto& d : all_families()) {
        auto b = d.beta();
        if (d.beta_dim() == 0) continue;
        auto d2 = CircularDensity::from_beta(d.family(), b,
                                             static_cast<int>(d.components().size()));
        CHECK(d2.pdf(1.0) == doctest::Approx(d.pdf(1.0)).epsilon(1e-13));
        for (int rep = 0; rep < 10; ++rep) {
            double t = ang(gen);
            std::vector<double> grad(d.beta_dim());
            d.grad_log_pdf(t, grad);
            for (int j = 0; j < d.beta_dim(); ++j) {
                auto bj = b;
                const double h = 1e-6;
                bj[j] = b[j] + h;
                double up = CircularDensity::from_beta(d.family(), bj,
                                                       (int)d.components().size())
                                .log_pdf(t);
                bj[j] = b[j] - h;
                double dn = CircularDensity::from_beta(d.family(), bj,
                                                       (int)d.components().size())
                                .log_pdf(t);
                CHECK(grad[j] == doctest::Approx((up - dn) / (2 * h)).epsilon(1e-5).scale(1e-7));
            }
        }
    }
}

TEST_CASE("low density warning triggers only for near-vanishing densities") {
    CHECK_FALSE(CircularDensity::von_mises(0.0, 2.0).low_density_warning());
    CHECK(CircularDensity::von_mises(0.0, 25.0).low_density_warning());
}
