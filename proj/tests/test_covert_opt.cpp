#include <doctest.h>

#include <cmath>

#include "covertlim/bounds.hpp"
#include "covertlim/covert_opt.hpp"
#include "covertlim/photon_stats.hpp"

using namespace covertlim;

namespace {

ScenarioParams fig2_point(std::int64_t m, double eps = 1e-3) {
    ScenarioParams p;
    p.eta = 0.01;
    p.n_b = 0.2;
    p.m_modes = m;
    p.epsilon = eps;
    return p;
}

void check_kkt(const KktSolution& s, const ScenarioParams& p) {
    REQUIRE(s.converged);
    CHECK(s.mult1 > 0.0);  // dual feasibility
    CHECK(std::abs(std::expm1(s.q_star.log_norm())) < 1e-10);  // primal
    const double t = covert_threshold(p);
    CHECK(std::abs(covertness_lhs(s.q_star, p.n_b, p.m_modes) - t) < 1e-8);
    CHECK(s.residual < 1e-8);
}

}  // namespace

TEST_CASE("energy_limits: perfect covertness pins the matched probe") {
    const auto el = energy_limits(fig2_point(1000, 0.0));
    CHECK(el.ns_min == 0.2);
    CHECK(el.ns_max == 0.2);
    CHECK(el.min_solution.analytic_limit);
}

TEST_CASE("energy_limits: interval collapses onto N_B as eps -> 0") {
    const auto el = energy_limits(fig2_point(1000, 1e-9));
    REQUIRE(el.max_solution.converged);
    REQUIRE(el.min_solution.converged);
    CHECK(std::abs(el.ns_max - 0.2) < 1e-4);
    CHECK(std::abs(el.ns_min - 0.2) < 1e-4);
    CHECK(el.ns_min <= 0.2);
    CHECK(el.ns_max >= 0.2);
}

TEST_CASE("energy_limits: KKT residuals and ordering on the working grid") {
    for (std::int64_t m : {100, 10000, 1000000}) {
        const auto p = fig2_point(m);
        const auto el = energy_limits(p);
        check_kkt(el.min_solution, p);
        check_kkt(el.max_solution, p);
        CHECK(el.ns_min < p.n_b);
        CHECK(el.ns_max > p.n_b);
        // The stationarity pole sits outside the stored support.
        CHECK(el.max_solution.mult2 >
              static_cast<double>(el.max_solution.q_star.n_hi()));
        CHECK(el.min_solution.mult2 <
              static_cast<double>(el.min_solution.q_star.n_lo));
    }
}

TEST_CASE("energy_limits: tighter covertness nests the interval strictly") {
    for (std::int64_t m : {100, 10000, 1000000}) {
        const auto loose = energy_limits(fig2_point(m, 1e-3));
        const auto tight = energy_limits(fig2_point(m, 1e-4));
        REQUIRE(loose.max_solution.converged);
        REQUIRE(tight.max_solution.converged);
        CHECK(loose.ns_min < tight.ns_min);
        CHECK(tight.ns_min < tight.ns_max);
        CHECK(tight.ns_max < loose.ns_max);
    }
}

TEST_CASE("continuation_initializer: deterministic and near the solution") {
    const auto p = fig2_point(100);
    const auto a = continuation_initializer(p, Branch::kMax);
    const auto b = continuation_initializer(p, Branch::kMax);
    CHECK(a[0] == b[0]);
    CHECK(a[1] == b[1]);
    const auto el = energy_limits(p);
    // The seed lands on the same residual basin as the solved multipliers.
    CHECK(std::abs(a[1] - el.max_solution.mult2) /
              std::abs(el.max_solution.mult2) <
          0.05);
    const auto c = continuation_initializer(p, Branch::kMin);
    CHECK(c[1] < 0.0);
}

TEST_CASE("min_fidelity_numeric: eps = 0 equals the thermal pgf closed form") {
    ScenarioParams p = fig2_point(50, 0.0);
    const auto sol = min_fidelity_numeric(p);
    REQUIRE(sol.analytic_limit);
    const auto g = covert_geometry(p.eta, p.n_b);
    // Independent route: evaluate the matched thermal pgf at x through the
    // photon statistics module.
    const double want =
        std::pow(g.nu * g.mu, static_cast<double>(p.m_modes)) *
        thermal_pgf(p.n_b, p.m_modes)(g.x);
    CHECK(sol.objective == doctest::Approx(want).epsilon(1e-10));
}

TEST_CASE("min_fidelity_numeric: continuous at small eps") {
    ScenarioParams p = fig2_point(50, 1e-9);
    const auto sol = min_fidelity_numeric(p);
    REQUIRE(sol.converged);
    const auto closed = min_fidelity_numeric(fig2_point(50, 0.0));
    CHECK(std::abs(sol.objective / closed.objective - 1.0) < 1e-4);
}

TEST_CASE("min_fidelity_numeric: dominates the analytic bound on a subgrid") {
    for (double nb : {0.002, 0.2, 20.0}) {
        for (std::int64_t m : {10, 1000}) {
            for (double eps : {1e-4, 1e-2}) {
                ScenarioParams p;
                p.eta = 0.01;
                p.n_b = nb;
                p.m_modes = m;
                p.epsilon = eps;
                const auto sol = min_fidelity_numeric(p);
                REQUIRE(sol.converged);
                const auto g = covert_geometry(p.eta, p.n_b);
                const double log_bound =
                    2.0 * std::log(covert_threshold(p)) +
                    static_cast<double>(m) * g.log_f;
                const double ratio = std::exp(sol.log_objective - log_bound);
                CHECK(ratio > 1.0 - 1e-9);
                CHECK(ratio < 1.05);
            }
        }
    }
}

TEST_CASE("min_fidelity_numeric: KKT residuals on converged solutions") {
    for (double eps : {1e-4, 1e-3, 1e-2}) {
        ScenarioParams p = fig2_point(200, eps);
        const auto sol = min_fidelity_numeric(p);
        check_kkt(sol, p);
        // Stationarity holds pointwise on the stored support.
        CHECK(sol.residual < 1e-8);
    }
}

TEST_CASE("min_fidelity_numeric: vacuous constraint is flagged") {
    ScenarioParams p = fig2_point(100, 0.5);
    const auto sol = min_fidelity_numeric(p);
    CHECK(sol.constraint_vacuous);
    CHECK(!sol.converged);
    CHECK(sol.objective >= 0.0);
}
