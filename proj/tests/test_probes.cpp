#include <doctest.h>

#include <cmath>

#include "covertlim/covert_opt.hpp"
#include "covertlim/gaussian.hpp"
#include "covertlim/probes.hpp"

using namespace covertlim;

namespace {

ScenarioParams scenario(std::int64_t m, double eps = 1e-3, double nb = 0.2) {
    ScenarioParams p;
    p.eta = 0.01;
    p.n_b = nb;
    p.m_modes = m;
    p.epsilon = eps;
    return p;
}

double thermal_qs(double n0, double n1, double s) {
    return 1.0 / (std::pow(n0 + 1.0, s) * std::pow(n1 + 1.0, 1.0 - s) -
                  std::pow(n0, s) * std::pow(n1, 1.0 - s));
}

}  // namespace

TEST_CASE("willie_trace_norm: anchors") {
    CHECK(willie_trace_norm(0.2, 0.2, 100) == 0.0);
    const double near = willie_trace_norm(0.2, 0.201, 100);
    const double far = willie_trace_norm(0.2, 0.21, 100);
    CHECK(near > 0.0);
    CHECK(far > near);
    CHECK(far <= 2.0);
    // Symmetric roles of the two brightnesses.
    CHECK(willie_trace_norm(0.2, 0.25, 50) ==
          doctest::Approx(willie_trace_norm(0.25, 0.2, 50)).epsilon(1e-12));
}

TEST_CASE("covert_ns_budget: perfect covertness and monotonicity in eps") {
    CHECK(covert_ns_budget(scenario(1000, 0.0)) == 0.2);
    double prev = 0.2;
    for (double eps : {1e-4, 1e-3, 1e-2}) {
        const double b = covert_ns_budget(scenario(1000, eps));
        CHECK(b > prev);
        prev = b;
    }
    // The budget point itself is feasible: trace norm <= 4 eps.
    const auto p = scenario(1000);
    const double b = covert_ns_budget(p);
    const double n = (1.0 - p.eta) * b + p.eta * p.n_b;
    CHECK(willie_trace_norm(p.n_b, n, p.m_modes) <= 4.0 * p.epsilon + 1e-12);
}

TEST_CASE("covert_ns_budget: sits inside the all-probe KKT limit") {
    const auto p = scenario(10000);
    const double budget = covert_ns_budget(p);
    const auto el = energy_limits(p);
    REQUIRE(el.max_solution.converged);
    CHECK(budget > p.n_b);
    CHECK(budget < el.ns_max);
}

TEST_CASE("covert_ns_budget: square-root shrinkage with mode count") {
    std::vector<double> lm, lb;
    for (std::int64_t m : {100, 1000, 10000, 100000, 1000000}) {
        lm.push_back(std::log(static_cast<double>(m)));
        lb.push_back(std::log(covert_ns_budget(scenario(m)) - 0.2));
    }
    // Least-squares slope of log(budget - N_B) vs log M.
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lm.size(); ++i) {
        mx += lm[i];
        my += lb[i];
    }
    mx /= lm.size();
    my /= lb.size();
    double num = 0, den = 0;
    for (std::size_t i = 0; i < lm.size(); ++i) {
        num += (lm[i] - mx) * (lb[i] - my);
        den += (lm[i] - mx) * (lm[i] - mx);
    }
    const double slope = num / den;
    CHECK(slope > -0.6);
    CHECK(slope < -0.4);
}

TEST_CASE("exponent_tmsv: closed-form anchor and exact agreement") {
    const auto approx =
        exponent_tmsv(0.01, 0.2, 0.2, ExponentMethod::kClosedFormApprox);
    CHECK(approx.chi ==
          doctest::Approx(-std::log1p(-(0.01 / 4.0) * (1.0 - 1.0 / 1.96)))
              .epsilon(1e-14));
    const auto exact = exponent_tmsv(0.01, 0.2, 0.2);
    CHECK(std::abs(exact.chi / approx.chi - 1.0) < 0.03);
    CHECK(exponent_tmsv(0.0, 0.2, 0.2).chi == 0.0);
    // Bright-background limit of the approximate form: eta/4 to leading
    // order in eta.
    const auto bright =
        exponent_tmsv(0.01, 1e9, 1e9, ExponentMethod::kClosedFormApprox);
    CHECK(bright.chi == doctest::Approx(0.01 / 4.0).epsilon(2e-3));
}

TEST_CASE("exponent_gcs: zero-energy probe reduces to the passive signature") {
    const double eta = 0.01, nb = 0.2;
    const auto rep = exponent_gcs(eta, 0.0, nb, ExponentMethod::kBhattacharyya);
    const double want = -std::log(thermal_qs(nb, (1.0 - eta) * nb, 0.5));
    CHECK(rep.chi == doctest::Approx(want).epsilon(1e-10));
}

TEST_CASE("exponent_gcs: closed-form anchor and quadrature agreement") {
    const auto approx =
        exponent_gcs(0.01, 0.2, 0.2, ExponentMethod::kClosedFormApprox);
    const double bracket =
        2.0 * 0.01 * 0.2 * (0.2 - std::sqrt(0.2 * 1.2) + 0.5);
    CHECK(approx.chi == doctest::Approx(-std::log1p(-bracket)).epsilon(1e-14));
    const auto quad = exponent_gcs(0.01, 0.2, 0.2);
    REQUIRE(quad.converged);
    CHECK(std::abs(quad.chi / approx.chi - 1.0) < 0.03);
}

TEST_CASE("exponent_gcs: per-alpha optimization changes little at small eta") {
    const auto global = exponent_gcs(0.01, 0.2, 0.2);
    const auto per_alpha = exponent_gcs(0.01, 0.2, 0.2,
                                        ExponentMethod::kExactQcb, true);
    CHECK(std::abs(per_alpha.chi / global.chi - 1.0) < 1e-3);
    CHECK(per_alpha.chi >= global.chi - 1e-10);
}

TEST_CASE("gcs overlap: phase invariance through the Gaussian pipeline") {
    ScenarioParams p = scenario(1);
    const double r = 0.8;
    const double base = gcs_overlap_at_amplitude(p.eta, p.n_b, r, 0.5);
    for (double theta : {0.3, 1.2, 2.9}) {
        const CoherentProbe rotated{{r * std::cos(theta), r * std::sin(theta)}};
        const double q = q_s_gaussian(alice_received(rotated, 0, p),
                                      alice_received(rotated, 1, p), 0.5);
        CHECK(std::abs(q - base) < 1e-12);
    }
}

TEST_CASE("exponents: QCB at least matches any fixed-s value, QB within 2%") {
    for (double nb : {0.05, 0.2, 1.0}) {
        const auto qc = exponent_tmsv(0.01, nb, nb);
        const auto qb = exponent_tmsv(0.01, nb, nb,
                                      ExponentMethod::kBhattacharyya);
        CHECK(qc.chi >= qb.chi - 1e-12);
        CHECK(std::abs(qc.chi / qb.chi - 1.0) < 0.02);
    }
}

TEST_CASE("perfect_covert_sweep: quantum advantage peaks near N_B = 0.2") {
    std::vector<double> grid;
    for (int i = 0; i < 16; ++i) {
        grid.push_back(
            std::exp(std::log(0.01) +
                     i * (std::log(20.0) - std::log(0.01)) / 15.0));
    }
    const auto rows = perfect_covert_sweep(0.01, grid, 1);
    double best = 0.0, best_nb = 0.0;
    for (const auto& r : rows) {
        CHECK(!r.flagged);
        CHECK(r.chi_tmsv_qc >= r.chi_gcs_qc);
        if (r.ratio > best) {
            best = r.ratio;
            best_nb = r.n_b;
        }
    }
    CHECK(best == doctest::Approx(1.45).epsilon(0.04));
    CHECK(best_nb > 0.1);
    CHECK(best_nb < 0.3);
}

TEST_CASE("covert_curves: lower bound dominates both probes at every M") {
    const std::int64_t ms[] = {100, 1000, 10000, 100000};
    const auto rows = covert_curves(scenario(1), ms, 1);
    for (const auto& r : rows) {
        CHECK(!r.flagged);
        CHECK(r.log10_pe_bound <= r.log10_pe_tmsv + 1e-12);
        CHECK(r.log10_pe_tmsv <= r.log10_pe_gcs + 1e-12);
        CHECK(r.n_s > 0.2);
    }
}

TEST_CASE("covert_curves: QCB multiplicativity links per-mode and M-mode") {
    const std::int64_t ms[] = {1000};
    const auto rows = covert_curves(scenario(1), ms, 1);
    const auto& r = rows[0];
    // The M-mode TMSV error bound is (per-mode Q_s*)^M / 2.
    const auto rep = exponent_tmsv(0.01, r.n_s, 0.2);
    const double want = (-1000.0 * rep.chi - std::log(2.0)) / std::log(10.0);
    CHECK(r.log10_pe_tmsv == doctest::Approx(want).epsilon(1e-10));
}
