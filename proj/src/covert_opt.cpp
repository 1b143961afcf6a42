#include "covertlim/covert_opt.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "covertlim/bounds.hpp"
#include "covertlim/numerics.hpp"

namespace covertlim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Thermal total-photon log-pmf on a bulk window [lo, hi]; exact log weights,
// not renormalized to the window.
struct Window {
    std::int64_t lo = 0;
    std::vector<double> lp;  // log weights, index n - lo
    std::int64_t hi() const {
        return lo + static_cast<std::int64_t>(lp.size()) - 1;
    }
};

Window thermal_window(double n_b, std::int64_t m, double w_sigma,
                      std::int64_t hi_override = -1) {
    const double mean = static_cast<double>(m) * n_b;
    const double sigma =
        std::sqrt(static_cast<double>(m) * n_b * (n_b + 1.0));
    Window win;
    win.lo = std::max<std::int64_t>(
        0, static_cast<std::int64_t>(mean - w_sigma * sigma));
    std::int64_t hi =
        static_cast<std::int64_t>(std::ceil(mean + w_sigma * sigma)) + 8;
    if (hi_override > hi) hi = hi_override;
    win.lp.resize(hi - win.lo + 1);
    win.lp[0] = log_binomial(win.lo + m - 1, win.lo) +
                win.lo * std::log(n_b) - (win.lo + m) * std::log(n_b + 1.0);
    const double lr = std::log(n_b / (n_b + 1.0));
    for (std::int64_t n = win.lo + 1; n <= hi; ++n) {
        win.lp[n - win.lo] =
            win.lp[n - win.lo - 1] +
            std::log((static_cast<double>(n) + m - 1.0) /
                     static_cast<double>(n)) +
            lr;
    }
    return win;
}

// ---------- Appendix-style energy extremization ----------
//
// Stationary pmf q_n = (mult1^2/4) p_n / (n - mult2)^2. With the scale fixed
// by normalization, the covertness boundary becomes a scalar equation in
// mult2:
//   C(mult2) = sum_n p_n/|n - mult2| / sqrt(sum_n p_n/(n - mult2)^2) = t.

struct EnergyProblem {
    const Window& win;
    std::vector<double> buf_a;  // scratch
    std::vector<double> buf_b;

    explicit EnergyProblem(const Window& w)
        : win(w), buf_a(w.lp.size()), buf_b(w.lp.size()) {}

    // Returns (log sum p/|n-l2|, log sum p/(n-l2)^2).
    std::array<double, 2> log_sums(double l2) {
        const std::int64_t lo = win.lo;
        for (std::size_t i = 0; i < win.lp.size(); ++i) {
            const double dn =
                std::abs(static_cast<double>(lo + static_cast<std::int64_t>(i)) - l2);
            const double ld = std::log(dn);
            buf_a[i] = win.lp[i] - ld;
            buf_b[i] = win.lp[i] - 2.0 * ld;
        }
        return {log_sum_exp(buf_a), log_sum_exp(buf_b)};
    }

    double covert_value(double l2) {
        const auto s = log_sums(l2);
        return std::exp(s[0] - 0.5 * s[1]);
    }
};

double bisect(const std::function<double(double)>& f, double a, double b,
              double fa, int iters, double xtol) {
    double fb = f(b);
    (void)fb;
    for (int i = 0; i < iters; ++i) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fa * fm <= 0.0) {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
        if (std::abs(b - a) <= xtol * std::max(1.0, std::abs(m))) break;
    }
    return 0.5 * (a + b);
}

struct BranchBracket {
    double a = 0.0, b = 0.0;
    bool ok = false;
};

BranchBracket branch_bracket(EnergyProblem& prob, Branch branch, double t,
                             double sigma) {
    BranchBracket br;
    const double wide = std::max(1e8, 1e6 * sigma);
    if (branch == Branch::kMax) {
        br.a = static_cast<double>(prob.win.hi()) + 0.25;
        br.b = static_cast<double>(prob.win.hi()) + wide;
    } else {
        br.a = static_cast<double>(prob.win.lo) - 0.25;
        br.b = static_cast<double>(prob.win.lo) - wide;
    }
    // C is below t at the support edge and tends to 1 far away.
    const double fa = prob.covert_value(br.a) - t;
    const double fb = prob.covert_value(br.b) - t;
    br.ok = fa < 0.0 && fb > 0.0;
    return br;
}

KktSolution solve_energy_branch(const ScenarioParams& p, Branch branch,
                                double t, std::array<double, 2> init) {
    const Window win = thermal_window(p.n_b, p.m_modes, 10.0);
    EnergyProblem prob(win);
    const double sigma =
        std::sqrt(static_cast<double>(p.m_modes) * p.n_b * (p.n_b + 1.0));

    KktSolution sol;

    // Polish / solve the paper's two simultaneous equations in
    // (mult1, mult2) with damped Newton from the continuation seed.
    auto system = [&](double l1, double l2) -> std::array<double, 2> {
        if (l1 <= 0.0) return {1e6, 1e6};
        const auto s = prob.log_sums(l2);
        const double f1 =
            std::exp(2.0 * std::log(l1 / 2.0) + s[1]) - 1.0;  // normalization
        const double f2 = std::exp(std::log(l1 / 2.0) + s[0]) - t;  // boundary
        return {f1, f2};
    };
    SolverConfig cfg;
    cfg.abs_tol = 1e-11;
    cfg.max_iter = 80;
    auto newton = solve_2d(system, init, cfg);

    double l2 = newton.root[1];
    bool valid_pole = (branch == Branch::kMax)
                          ? l2 > static_cast<double>(win.hi())
                          : l2 < static_cast<double>(win.lo);
    if (!newton.converged || !valid_pole) {
        // Fallback: direct bracketed bisection on the scalar reduction.
        auto br = branch_bracket(prob, branch, t, sigma);
        if (br.ok) {
            const double fa = prob.covert_value(br.a) - t;
            l2 = bisect([&](double v) { return prob.covert_value(v) - t; },
                        br.a, br.b, fa, 200, 1e-13);
            valid_pole = true;
            sol.iterations = newton.iterations + 200;
        } else {
            sol.converged = false;
            sol.mult2 = l2;
            return sol;
        }
    } else {
        sol.iterations = newton.iterations;
    }

    // Assemble the solution at l2 with mult1 fixed by normalization.
    const auto s = prob.log_sums(l2);
    const double l1 = 2.0 * std::exp(-0.5 * s[1]);
    sol.mult1 = l1;
    sol.mult2 = l2;
    sol.q_star.n_lo = win.lo;
    sol.q_star.log_weights.resize(win.lp.size());
    for (std::size_t i = 0; i < win.lp.size(); ++i) {
        const double dn = std::abs(
            static_cast<double>(win.lo + static_cast<std::int64_t>(i)) - l2);
        sol.q_star.log_weights[i] =
            win.lp[i] - 2.0 * std::log(dn) - s[1];
    }
    sol.q_star.truncation_tail = 0.0;
    sol.renorm = std::exp(-s[1] - 2.0 * std::log(l1 / 2.0));
    sol.objective = sol.q_star.mean();  // Willie's extremal total energy
    sol.log_objective = std::log(sol.objective);

    // KKT residuals.
    const double primal = std::abs(std::expm1(sol.q_star.log_norm()));
    const double compl_slack =
        std::abs(covertness_lhs(sol.q_star, p.n_b, p.m_modes) - t);
    double stat = 0.0;
    for (std::size_t i = 0; i < win.lp.size(); ++i) {
        const double dn = std::abs(
            static_cast<double>(win.lo + static_cast<std::int64_t>(i)) - l2);
        const double formula = sol.renorm *
                               std::exp(2.0 * std::log(l1 / 2.0) +
                                        win.lp[i] - 2.0 * std::log(dn));
        stat = std::max(stat,
                        std::abs(std::exp(sol.q_star.log_weights[i]) - formula));
    }
    sol.residual = std::max({primal, compl_slack, stat});

    // d-insensitivity guard: truncated window edges must not carry material
    // mass (n = 0 is a true support boundary, not a truncation).
    const std::size_t last = win.lp.size() - 1;
    double edge_mass = std::exp(sol.q_star.log_weights[last]);
    if (win.lo > 0) {
        edge_mass = std::max(edge_mass, std::exp(sol.q_star.log_weights[0]));
    }
    sol.converged = sol.residual < 1e-8 && edge_mass < 1e-10;
    return sol;
}

double ns_from_willie_energy(double e_w, const ScenarioParams& p) {
    // Per-mode probe energy from Willie's intercepted total energy; the
    // background contributes eta N_B per mode.
    const double m = static_cast<double>(p.m_modes);
    return (e_w - m * p.eta * p.n_b) / ((1.0 - p.eta) * m);
}

}  // namespace

std::array<double, 2> continuation_initializer(const ScenarioParams& p,
                                               Branch branch) {
    p.validate();
    if (p.n_b <= 0.0) {
        throw std::domain_error("continuation_initializer: requires n_b > 0");
    }
    const Window win = thermal_window(p.n_b, p.m_modes, 10.0);
    EnergyProblem prob(win);
    const double sigma =
        std::sqrt(static_cast<double>(p.m_modes) * p.n_b * (p.n_b + 1.0));

    // Geometric ladder from a loose covertness level down to the target.
    const double eps_target = std::max(p.epsilon, 1e-15);
    std::vector<double> ladder;
    for (double e = 0.4; e > eps_target * 1.5; e *= 0.35) ladder.push_back(e);
    ladder.push_back(eps_target);

    // Heuristic default if every ladder step is infeasible.
    double l2 = (branch == Branch::kMax)
                    ? static_cast<double>(win.hi()) + sigma + 1.0
                    : static_cast<double>(win.lo) - sigma - 1.0;
    for (double e : ladder) {
        ScenarioParams q = p;
        q.epsilon = e;
        const double t = covert_threshold(q);
        if (t <= 0.0) continue;
        auto br = branch_bracket(prob, branch, t, sigma);
        if (!br.ok) continue;
        const double fa = prob.covert_value(br.a) - t;
        l2 = bisect([&](double v) { return prob.covert_value(v) - t; }, br.a,
                    br.b, fa, 80, 1e-9);
    }
    const auto s = prob.log_sums(l2);
    const double l1 = 2.0 * std::exp(-0.5 * s[1]);
    return {l1, l2};
}

EnergyLimits energy_limits(const ScenarioParams& p) {
    p.validate();
    if (p.n_b <= 0.0) {
        throw std::domain_error("energy_limits: requires n_b > 0");
    }
    EnergyLimits out;
    if (p.epsilon == 0.0) {
        // Perfect covertness forces the matched thermal probe.
        out.ns_min = out.ns_max = p.n_b;
        PhotonPmf q = thermal_total_pmf(p.n_b, p.m_modes);
        for (KktSolution* s : {&out.min_solution, &out.max_solution}) {
            s->q_star = q;
            s->objective = static_cast<double>(p.m_modes) * p.n_b;
            s->converged = true;
            s->analytic_limit = true;
        }
        return out;
    }
    const double t = covert_threshold(p);
    if (t <= 0.0) {
        out.min_solution.constraint_vacuous = true;
        out.max_solution.constraint_vacuous = true;
        out.ns_min = 0.0;
        out.ns_max = kInf;
        return out;
    }
    out.min_solution = solve_energy_branch(
        p, Branch::kMin, t, continuation_initializer(p, Branch::kMin));
    out.max_solution = solve_energy_branch(
        p, Branch::kMax, t, continuation_initializer(p, Branch::kMax));
    out.ns_min = out.min_solution.converged
                     ? ns_from_willie_energy(out.min_solution.objective, p)
                     : std::numeric_limits<double>::quiet_NaN();
    out.ns_max = out.max_solution.converged
                     ? ns_from_willie_energy(out.max_solution.objective, p)
                     : std::numeric_limits<double>::quiet_NaN();
    return out;
}

KktSolution min_fidelity_numeric(const ScenarioParams& p) {
    p.validate();
    if (p.eta > 0.4) {
        throw std::domain_error(
            "min_fidelity_numeric: requires eta <= 0.4 (bound convergence)");
    }
    if (p.n_b <= 0.0) {
        throw std::domain_error("min_fidelity_numeric: requires n_b > 0");
    }
    const CovertGeometry geo = covert_geometry(p.eta, p.n_b);
    const double lnx = std::log(geo.x);
    const double lc = static_cast<double>(p.m_modes) *
                      (std::log(geo.nu) + std::log(geo.mu));
    const double t = covert_threshold(p);

    KktSolution sol;
    if (t <= 0.0) {
        // Vacuous constraint: the truncated-support infimum dumps all mass
        // at the top index.
        sol.constraint_vacuous = true;
        const Window win = thermal_window(
            p.n_b, p.m_modes, 12.0,
            static_cast<std::int64_t>(std::ceil(45.0 / std::abs(lnx))));
        sol.log_objective = lc + static_cast<double>(win.hi()) * lnx;
        sol.objective = std::exp(sol.log_objective);
        return sol;
    }
    if (p.epsilon == 0.0 || t >= 1.0 - 1e-12) {
        // Cauchy-Schwarz forces the matched thermal pmf.
        sol.analytic_limit = true;
        sol.converged = true;
        sol.q_star = thermal_total_pmf(p.n_b, p.m_modes);
        sol.log_objective =
            lc - static_cast<double>(p.m_modes) *
                     std::log1p(p.n_b * (1.0 - geo.x));
        sol.objective = std::exp(sol.log_objective);
        sol.residual =
            std::abs(covertness_lhs(sol.q_star, p.n_b, p.m_modes) - 1.0);
        return sol;
    }

    // Support: the thermal bulk extended until x^n is negligible, so the
    // truncation index no longer moves the objective.
    const std::int64_t x_reach =
        static_cast<std::int64_t>(std::ceil(45.0 / std::abs(lnx)));
    const Window win = thermal_window(p.n_b, p.m_modes, 12.0, x_reach);
    const std::int64_t lo = win.lo;
    const std::size_t size = win.lp.size();
    const double d_idx = static_cast<double>(win.hi());

    // Stationary pmf q_n = (mult1^2/4) p_n / (c x^n + mult2)^2 with
    // mult2 = zeta - c x^d held in the split representation: the
    // denominator is c (x^n - x^d) + zeta, all in log domain.
    std::vector<double> lbase(size);
    for (std::size_t i = 0; i < size; ++i) {
        const double n = static_cast<double>(lo + static_cast<std::int64_t>(i));
        lbase[i] = (i + 1 == size)
                       ? -kInf
                       : lc + n * lnx + std::log1p(-std::exp((d_idx - n) * lnx));
    }
    std::vector<double> lden(size), ta(size), tb(size);
    auto covert_of = [&](double lz) {
        for (std::size_t i = 0; i < size; ++i) {
            lden[i] = log_add_exp(lbase[i], lz);
            ta[i] = win.lp[i] - lden[i];
            tb[i] = win.lp[i] - 2.0 * lden[i];
        }
        return std::exp(log_sum_exp(ta) - 0.5 * log_sum_exp(tb));
    };

    // Bracket in log zeta: large zeta is the thermal limit (value 1), small
    // zeta dumps mass on the top index (value near 0).
    double lz_hi = lc + 40.0;
    double lz_lo = lc + d_idx * lnx +
                   0.5 * (win.lp.back() -
                          *std::max_element(win.lp.begin(), win.lp.end()));
    int guard = 0;
    while (covert_of(lz_lo) > t && guard < 300) {
        lz_lo -= 40.0;
        ++guard;
    }
    if (covert_of(lz_lo) > t || covert_of(lz_hi) < t) {
        sol.converged = false;
        return sol;
    }
    double a = lz_lo, b = lz_hi;
    double fa = covert_of(a) - t;
    int iters = 0;
    for (; iters < 400; ++iters) {
        const double m = 0.5 * (a + b);
        const double fm = covert_of(m) - t;
        if (fa * fm <= 0.0) {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
        if (b - a <= 1e-13 * std::max(1.0, std::abs(m))) break;
    }
    const double lz = 0.5 * (a + b);

    // Assemble the solution.
    const double ls2 = [&] {
        for (std::size_t i = 0; i < size; ++i) {
            lden[i] = log_add_exp(lbase[i], lz);
            tb[i] = win.lp[i] - 2.0 * lden[i];
        }
        return log_sum_exp(tb);
    }();
    sol.mult1 = 2.0 * std::exp(-0.5 * ls2);
    sol.mult2 = std::exp(lz) - std::exp(lc + d_idx * lnx);
    sol.iterations = iters;
    sol.q_star.n_lo = lo;
    sol.q_star.log_weights.resize(size);
    std::vector<double> tobj(size);
    for (std::size_t i = 0; i < size; ++i) {
        sol.q_star.log_weights[i] = win.lp[i] - 2.0 * lden[i] - ls2;
        tobj[i] = sol.q_star.log_weights[i] +
                  static_cast<double>(lo + static_cast<std::int64_t>(i)) * lnx;
    }
    sol.log_objective = lc + log_sum_exp(tobj);
    sol.objective = std::exp(sol.log_objective);
    sol.renorm = 1.0;

    const double primal = std::abs(std::expm1(sol.q_star.log_norm()));
    const double compl_slack =
        std::abs(covertness_lhs(sol.q_star, p.n_b, p.m_modes) - t);
    double stat = 0.0;
    const double l_l1sq4 = 2.0 * std::log(sol.mult1 / 2.0);
    for (std::size_t i = 0; i < size; ++i) {
        const double formula = std::exp(l_l1sq4 + win.lp[i] - 2.0 * lden[i]);
        stat = std::max(stat,
                        std::abs(std::exp(sol.q_star.log_weights[i]) - formula));
    }
    sol.residual = std::max({primal, compl_slack, stat});
    sol.converged = sol.residual < 1e-8;
    return sol;
}

}  // namespace covertlim
