#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "covertlim/numerics.hpp"

using namespace covertlim;

namespace {

// Stirling series with three correction terms; independent of the Lanczos
// path and accurate to well below 1e-12 relative for x >= 1e4.
double stirling_log_gamma(double x) {
    const double corr =
        1.0 / (12.0 * x) - 1.0 / (360.0 * x * x * x) +
        1.0 / (1260.0 * std::pow(x, 5));
    return (x - 0.5) * std::log(x) - x + 0.5 * std::log(2.0 * M_PI) + corr;
}

}  // namespace

TEST_CASE("log_gamma: small-argument anchors") {
    CHECK(std::abs(log_gamma(1.0)) < 1e-14);
    CHECK(std::abs(log_gamma(2.0)) < 1e-14);
    // Gamma(5) = 4! by direct product.
    const double ln24 = std::log(1.0 * 2.0 * 3.0 * 4.0);
    CHECK(log_gamma(5.0) == doctest::Approx(ln24).epsilon(1e-14));
}

TEST_CASE("log_gamma: Stirling oracle at large arguments") {
    for (double x : {1e4, 1e5, 1e6, 1e8, 1e9}) {
        const double ref = stirling_log_gamma(x);
        CHECK(std::abs(log_gamma(x) / ref - 1.0) < 1e-12);
    }
}

TEST_CASE("log_gamma: relative accuracy across the working range") {
    // std::lgamma is an independent implementation; agreement certifies the
    // Lanczos path at the level the library relies on.
    for (double lx = std::log(0.5); lx <= std::log(1e9); lx += 0.37) {
        const double x = std::exp(lx);
        const double ref = std::lgamma(x);
        const double scale = std::max(std::abs(ref), 1.0);
        CHECK(std::abs(log_gamma(x) - ref) <= 1e-13 * scale);
    }
    CHECK_THROWS_AS(log_gamma(0.0), std::domain_error);
    CHECK_THROWS_AS(log_gamma(-3.0), std::domain_error);
}

TEST_CASE("log_binomial: anchors and the ratio-product oracle") {
    CHECK(log_binomial(99, 0) == 0.0);
    CHECK(log_binomial(5, 2) == doctest::Approx(std::log(10.0)).epsilon(1e-14));
    // C(10^6 + 99, 100) as the sum of the logs of 100 ratio factors.
    const std::int64_t n = 1000000 + 99, k = 100;
    double ref = 0.0;
    for (std::int64_t i = 1; i <= k; ++i) {
        ref += std::log(static_cast<double>(n - k + i) /
                        static_cast<double>(i));
    }
    CHECK(std::abs(log_binomial(n, k) / ref - 1.0) < 1e-9);
    CHECK_THROWS_AS(log_binomial(3, 4), std::domain_error);
    CHECK_THROWS_AS(log_binomial(-1, 0), std::domain_error);
}

TEST_CASE("log_binomial: symmetry in k <-> n-k") {
    std::mt19937 rng(12345);
    std::uniform_int_distribution<std::int64_t> nd(0, 1000000000);
    for (int i = 0; i < 500; ++i) {
        const std::int64_t n = nd(rng);
        const std::int64_t k =
            std::uniform_int_distribution<std::int64_t>(0, n)(rng);
        CHECK(log_binomial(n, k) == log_binomial(n, n - k));
    }
}

TEST_CASE("log_sum_exp: anchors") {
    const double x = -3.7;
    const double one[] = {x};
    CHECK(log_sum_exp(one) == x);
    const double two[] = {x, x};
    CHECK(log_sum_exp(two) ==
          doctest::Approx(x + std::log(2.0)).epsilon(1e-15));
    // Geometric series ln(0.5^n), 1000 terms -> ln 2.
    std::vector<double> geo(1000);
    for (int n = 0; n < 1000; ++n) geo[n] = n * std::log(0.5);
    CHECK(std::abs(log_sum_exp(geo) - std::log(2.0)) < 1e-12);
    CHECK(log_sum_exp({}) == -std::numeric_limits<double>::infinity());
    const double withinf[] = {-std::numeric_limits<double>::infinity(), 0.0};
    CHECK(log_sum_exp(withinf) == doctest::Approx(0.0));
}

TEST_CASE("log_sum_exp: agrees with the direct sum when it cannot overflow") {
    std::mt19937 rng(777);
    std::uniform_real_distribution<double> ud(-30.0, 30.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> t(40);
        double direct = 0.0;
        for (auto& v : t) {
            v = ud(rng);
            direct += std::exp(v);
        }
        CHECK(std::abs(std::exp(log_sum_exp(t)) / direct - 1.0) < 1e-12);
    }
}

TEST_CASE("minimize_scalar: quadratic and boundary anchors") {
    SolverConfig cfg;
    auto r = minimize_scalar([](double s) { return (s - 0.3) * (s - 0.3); },
                             0.0, 1.0, cfg);
    CHECK(r.converged);
    CHECK(std::abs(r.x - 0.3) <= 1e-9);
    auto b = minimize_scalar([](double s) { return s; }, 0.0, 1.0, cfg);
    CHECK(b.x == 0.0);
}

TEST_CASE("minimize_scalar: dense grid-scan oracle on a thermal Q_s") {
    // Q_s for two fixed thermal states, closed form
    // 1/[(N0+1)^s (N1+1)^(1-s) - N0^s N1^(1-s)].
    const double n0 = 0.2, n1 = 0.5;
    auto qs = [&](double s) {
        return 1.0 / (std::pow(n0 + 1.0, s) * std::pow(n1 + 1.0, 1.0 - s) -
                      std::pow(n0, s) * std::pow(n1, 1.0 - s));
    };
    double best_x = 0.0, best_f = 1e300;
    const int grid = 100000;
    for (int i = 0; i <= grid; ++i) {
        const double s = 1e-6 + (1.0 - 2e-6) * i / grid;
        const double f = qs(s);
        if (f < best_f) {
            best_f = f;
            best_x = s;
        }
    }
    auto r = minimize_scalar(qs, 1e-6, 1.0 - 1e-6, {});
    CHECK(std::abs(r.x - best_x) < 1e-6 + 1.0 / grid);
    CHECK(r.fx <= best_f + 1e-15);
}

TEST_CASE("minimize_scalar: recovers the vertex of random convex quadratics") {
    std::mt19937 rng(4242);
    std::uniform_real_distribution<double> ud(0.05, 0.95);
    for (int i = 0; i < 100; ++i) {
        const double v = ud(rng);
        const double a = 0.1 + 10.0 * ud(rng);
        auto r = minimize_scalar(
            [&](double s) { return a * (s - v) * (s - v); }, 0.0, 1.0, {});
        CHECK(std::abs(r.x - v) <= 1e-9);
    }
}

TEST_CASE("solve_2d: linear and nonlinear anchors") {
    auto lin = solve_2d(
        [](double x, double y) {
            return std::array<double, 2>{x - 1.0, y + 2.0};
        },
        {0.0, 0.0}, {});
    CHECK(lin.converged);
    CHECK(lin.root[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(lin.root[1] == doctest::Approx(-2.0).epsilon(1e-10));

    auto nl = solve_2d(
        [](double x, double y) {
            return std::array<double, 2>{x * x - 4.0, x * y - 2.0};
        },
        {1.0, 1.0}, {});
    CHECK(nl.converged);
    CHECK(nl.root[0] == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(nl.root[1] == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(nl.trace.size() >= 2);
}

TEST_CASE("solve_2d: singular Jacobian is flagged, not thrown") {
    auto r = solve_2d(
        [](double x, double y) {
            return std::array<double, 2>{x + y - 1.0, 2.0 * (x + y) - 2.0};
        },
        {5.0, -1.0}, {});
    CHECK(!r.converged);
    CHECK(r.singular_jacobian);
}

TEST_CASE("integrate_radial: density normalization and closed forms") {
    auto one = integrate_radial([](double) { return 1.0; }, 0.7);
    CHECK(one.converged);
    CHECK(one.value == doctest::Approx(1.0).epsilon(1e-12));

    const double n = 0.42;
    auto meanr2 = integrate_radial([](double r) { return r * r; }, n);
    CHECK(meanr2.value == doctest::Approx(n).epsilon(1e-12));

    auto gauss =
        integrate_radial([](double r) { return std::exp(-r * r); }, 1.0);
    CHECK(gauss.value == doctest::Approx(0.5).epsilon(1e-12));

    auto degenerate = integrate_radial([](double r) { return 1.0 + r; }, 0.0);
    CHECK(degenerate.value == 1.0);
}

TEST_CASE("integrate_radial: factorial moments of r^2k") {
    // E[r^{2k}] = k! N^k for the circular-Gaussian radial density.
    const double n = 0.8;
    double factorial = 1.0;
    for (int k = 1; k <= 6; ++k) {
        factorial *= k;
        auto r = integrate_radial(
            [k](double x) { return std::pow(x, 2.0 * k); }, n);
        CHECK(r.converged);
        CHECK(std::abs(r.value / (factorial * std::pow(n, k)) - 1.0) < 1e-10);
    }
}

TEST_CASE("gauss_laguerre: rule integrates exp(-u) polynomials exactly") {
    const auto& rule = gauss_laguerre(64);
    REQUIRE(rule.nodes.size() == 64);
    double s0 = 0.0, s1 = 0.0, s3 = 0.0;
    for (int i = 0; i < 64; ++i) {
        s0 += rule.weights[i];
        s1 += rule.weights[i] * rule.nodes[i];
        s3 += rule.weights[i] * std::pow(rule.nodes[i], 3);
    }
    CHECK(s0 == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(s1 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s3 == doctest::Approx(6.0).epsilon(1e-12));
}
