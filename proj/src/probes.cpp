#include "covertlim/probes.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "covertlim/bounds.hpp"
#include "covertlim/gaussian.hpp"
#include "covertlim/numerics.hpp"
#include "covertlim/sweep.hpp"

namespace covertlim {

namespace {

// log CDF (up to n_t inclusive) of the negative-binomial total-photon pmf.
double log_nb_cdf(double n_mean, std::int64_t m, std::int64_t n_t) {
    if (n_t < 0) return -std::numeric_limits<double>::infinity();
    std::vector<double> terms;
    terms.reserve(n_t + 1);
    double lterm = -static_cast<double>(m) * std::log(n_mean + 1.0);
    const double lr = std::log(n_mean / (n_mean + 1.0));
    for (std::int64_t n = 0; n <= n_t; ++n) {
        terms.push_back(lterm);
        lterm += std::log((static_cast<double>(n) + m) /
                          (static_cast<double>(n) + 1.0)) +
                 lr;
    }
    return log_sum_exp(terms);
}

}  // namespace

double willie_trace_norm(double n_b, double n, std::int64_t m_modes) {
    if (n_b < 0.0 || n < 0.0 || m_modes < 1) {
        throw std::domain_error("willie_trace_norm: invalid arguments");
    }
    if (n == n_b) return 0.0;
    const double lo_n = std::min(n_b, n);
    const double hi_n = std::max(n_b, n);
    if (lo_n == 0.0) {
        // Degenerate: the lower state is the vacuum.
        const double cdf_hi = std::exp(log_nb_cdf(hi_n, m_modes, 0));
        return 2.0 * (1.0 - cdf_hi);
    }
    // Crossing index of the two pmfs; below it the dimmer state dominates.
    const double num = std::log((hi_n + 1.0) / (lo_n + 1.0));
    const double den = std::log(hi_n * (lo_n + 1.0) / ((hi_n + 1.0) * lo_n));
    const auto n_t = static_cast<std::int64_t>(
        std::floor(static_cast<double>(m_modes) * num / den));
    const double cdf_lo = std::exp(log_nb_cdf(lo_n, m_modes, n_t));
    const double cdf_hi = std::exp(log_nb_cdf(hi_n, m_modes, n_t));
    return 2.0 * (cdf_lo - cdf_hi);
}

double covert_ns_budget(const ScenarioParams& p) {
    p.validate();
    if (p.epsilon == 0.0) return p.n_b;
    const double target = 4.0 * p.epsilon;
    auto tn = [&](double n_s) {
        const double n = (1.0 - p.eta) * n_s + p.eta * p.n_b;
        return willie_trace_norm(p.n_b, n, p.m_modes);
    };
    double lo = p.n_b;
    double hi = p.n_b + std::max(1.0, p.n_b);
    int guard = 0;
    while (tn(hi) < target) {
        hi = p.n_b + 2.0 * (hi - p.n_b);
        if (++guard > 200) {
            throw std::runtime_error("covert_ns_budget: bracket failure");
        }
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (tn(mid) <= target) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo <= 1e-13 * std::max(1.0, lo)) break;
    }
    return 0.5 * (lo + hi);
}

ExponentReport exponent_tmsv(double eta, double n_s, double n_b,
                             ExponentMethod method) {
    if (!(eta >= 0.0 && eta < 1.0) || n_s < 0.0 || n_b < 0.0) {
        throw std::domain_error("exponent_tmsv: invalid arguments");
    }
    ExponentReport rep;
    rep.method = method;
    if (method == ExponentMethod::kClosedFormApprox) {
        const double bracket =
            (eta / 4.0) * (1.0 - 1.0 / ((2.0 * n_b + 1.0) * (2.0 * n_b + 1.0)));
        rep.chi = -std::log1p(-bracket);
        return rep;
    }
    if (eta == 0.0) {
        rep.chi = 0.0;
        return rep;
    }
    ScenarioParams p;
    p.eta = eta;
    p.n_b = n_b;
    const TmsvProbe probe{n_s};
    const GaussianState rho0 = alice_received(probe, 0, p);
    const GaussianState rho1 = alice_received(probe, 1, p);
    if (method == ExponentMethod::kBhattacharyya) {
        rep.chi = -std::log(q_s_gaussian(rho0, rho1, 0.5));
        return rep;
    }
    const ChernoffResult res = chernoff_exponent_per_mode(rho0, rho1);
    rep.chi = res.chi;
    rep.s_star = res.s_star;
    rep.converged = res.converged;
    return rep;
}

double gcs_overlap_at_amplitude(double eta, double n_b, double r, double s) {
    ScenarioParams p;
    p.eta = eta;
    p.n_b = n_b;
    const CoherentProbe probe{{r, 0.0}};
    return q_s_gaussian(alice_received(probe, 0, p),
                        alice_received(probe, 1, p), s);
}

ExponentReport exponent_gcs(double eta, double n_s, double n_b,
                            ExponentMethod method, bool optimize_s_per_alpha) {
    if (!(eta >= 0.0 && eta < 1.0) || n_s < 0.0 || n_b < 0.0) {
        throw std::domain_error("exponent_gcs: invalid arguments");
    }
    ExponentReport rep;
    rep.method = method;
    if (method == ExponentMethod::kClosedFormApprox) {
        const double bracket =
            2.0 * eta * n_b *
            (n_b - std::sqrt(n_b * (n_b + 1.0)) + 0.5);
        rep.chi = -std::log1p(-bracket);
        return rep;
    }
    if (eta == 0.0) {
        rep.chi = 0.0;
        return rep;
    }
    auto integral_at = [&](double s) {
        const auto quad = integrate_radial(
            [&](double r) {
                if (optimize_s_per_alpha) {
                    SolverConfig cfg;
                    cfg.abs_tol = 1e-8;
                    return minimize_scalar(
                               [&](double sv) {
                                   return gcs_overlap_at_amplitude(eta, n_b, r,
                                                                   sv);
                               },
                               1e-6, 1.0 - 1e-6, cfg)
                        .fx;
                }
                return gcs_overlap_at_amplitude(eta, n_b, r, s);
            },
            n_s);
        if (!quad.converged) rep.converged = false;
        return quad.value;
    };
    if (method == ExponentMethod::kBhattacharyya || optimize_s_per_alpha) {
        rep.s_star = 0.5;
        rep.chi = -std::log(integral_at(0.5));
        return rep;
    }
    // Exact QCB: minimize the integral over a single global s.
    SolverConfig cfg;
    cfg.abs_tol = 1e-7;
    const auto res = minimize_scalar(integral_at, 1e-6, 1.0 - 1e-6, cfg);
    rep.s_star = res.x;
    rep.chi = -std::log(res.fx);
    if (!res.converged) rep.converged = false;
    return rep;
}

std::vector<PerfectCovertRow> perfect_covert_sweep(
    double eta, std::span<const double> nb_grid, int threads) {
    std::vector<PerfectCovertRow> rows(nb_grid.size());
    parallel_for_index(
        static_cast<std::int64_t>(nb_grid.size()),
        [&](std::int64_t i) {
            const double n_b = nb_grid[i];
            PerfectCovertRow& row = rows[i];
            row.n_b = n_b;
            const auto t_qc =
                exponent_tmsv(eta, n_b, n_b, ExponentMethod::kExactQcb);
            const auto t_qb =
                exponent_tmsv(eta, n_b, n_b, ExponentMethod::kBhattacharyya);
            const auto g_qc =
                exponent_gcs(eta, n_b, n_b, ExponentMethod::kExactQcb);
            const auto g_qb =
                exponent_gcs(eta, n_b, n_b, ExponentMethod::kBhattacharyya);
            row.chi_tmsv_qc = t_qc.chi;
            row.chi_tmsv_qb = t_qb.chi;
            row.chi_gcs_qc = g_qc.chi;
            row.chi_gcs_qb = g_qb.chi;
            row.ratio = g_qc.chi > 0.0 ? t_qc.chi / g_qc.chi : 0.0;
            row.flagged = !(t_qc.converged && g_qc.converged);
        },
        threads);
    return rows;
}

std::vector<CovertCurveRow> covert_curves(const ScenarioParams& p,
                                          std::span<const std::int64_t> m_grid,
                                          int threads) {
    p.validate();
    std::vector<CovertCurveRow> rows(m_grid.size());
    constexpr double kLn10 = 2.302585092994045684;
    parallel_for_index(
        static_cast<std::int64_t>(m_grid.size()),
        [&](std::int64_t i) {
            ScenarioParams q = p;
            q.m_modes = m_grid[i];
            CovertCurveRow& row = rows[i];
            row.m = q.m_modes;
            row.n_s = covert_ns_budget(q);
            const BoundReport bound = covert_pe_lb(q);
            row.exponent_bound = bound.exponent;
            row.log10_pe_bound = bound.log_pe_lb / kLn10;
            const auto chi_t =
                exponent_tmsv(q.eta, row.n_s, q.n_b, ExponentMethod::kExactQcb);
            const auto chi_g =
                exponent_gcs(q.eta, row.n_s, q.n_b, ExponentMethod::kExactQcb);
            row.exponent_tmsv = chi_t.chi;
            row.exponent_gcs = chi_g.chi;
            const double m = static_cast<double>(q.m_modes);
            row.log10_pe_tmsv = (-m * chi_t.chi - std::log(2.0)) / kLn10;
            row.log10_pe_gcs = (-m * chi_g.chi - std::log(2.0)) / kLn10;
            row.flagged = !(chi_t.converged && chi_g.converged);
        },
        threads);
    return rows;
}

}  // namespace covertlim
