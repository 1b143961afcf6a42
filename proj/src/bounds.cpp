#include "covertlim/bounds.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "covertlim/numerics.hpp"

namespace covertlim {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

struct PairGeometry {
    double nu;
    double log_beta;  // ln [nu sqrt(kt0 kt1) + sqrt((1-kt0)(1-kt1))]
};

PairGeometry pair_geometry(const ChannelPair& pair) {
    if (!(pair.kappa0 >= 0.0 && pair.kappa0 <= 1.0 && pair.kappa1 >= 0.0 &&
          pair.kappa1 <= 1.0 && pair.n0 >= 0.0 && pair.n1 >= 0.0 &&
          pair.m_modes >= 1)) {
        throw std::domain_error("ChannelPair: invalid parameters");
    }
    const double g0 = (1.0 - pair.kappa0) * pair.n0 + 1.0;
    const double g1 = (1.0 - pair.kappa1) * pair.n1 + 1.0;
    const double kt0 = pair.kappa0 / g0;
    const double kt1 = pair.kappa1 / g1;
    const double v = nu(g0, g1);
    const double beta =
        v * std::sqrt(kt0 * kt1) + std::sqrt((1.0 - kt0) * (1.0 - kt1));
    return {v, std::log(beta)};
}
}  // namespace

double nu(double g0, double g1) {
    if (!(g0 >= 1.0 && g1 >= 1.0)) {
        throw std::domain_error("nu: requires g0, g1 >= 1");
    }
    return 1.0 / (std::sqrt(g0 * g1) - std::sqrt((g0 - 1.0) * (g1 - 1.0)));
}

double log_fidelity_lb_channels(const PhotonPmf& pmf,
                                const ChannelPair& pair) {
    const auto geo = pair_geometry(pair);
    std::vector<double> terms(pmf.log_weights.size());
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const std::int64_t n = pmf.n_lo + static_cast<std::int64_t>(i);
        terms[i] = pmf.log_weights[i] + static_cast<double>(n) * geo.log_beta;
    }
    return static_cast<double>(pair.m_modes) * std::log(geo.nu) +
           log_sum_exp(terms);
}

double fidelity_lb_channels(const PhotonPmf& pmf, const ChannelPair& pair) {
    return std::exp(log_fidelity_lb_channels(pmf, pair));
}

double log_fidelity_lb_energy_only(double total_energy,
                                   const ChannelPair& pair) {
    if (total_energy < 0.0) {
        throw std::domain_error("fidelity_lb_energy_only: energy < 0");
    }
    const auto geo = pair_geometry(pair);
    return static_cast<double>(pair.m_modes) * std::log(geo.nu) +
           total_energy * geo.log_beta;
}

double fidelity_lb_energy_only(double total_energy, const ChannelPair& pair) {
    return std::exp(log_fidelity_lb_energy_only(total_energy, pair));
}

double pe_lb_from_fidelity(double f, double prior0, double prior1) {
    if (!(f >= 0.0 && f <= 1.0)) {
        throw std::domain_error("pe_lb_from_fidelity: f outside [0,1]");
    }
    if (!(prior0 > 0.0 && prior1 > 0.0 &&
          std::abs(prior0 + prior1 - 1.0) <= 1e-12)) {
        throw std::domain_error("pe_lb_from_fidelity: invalid priors");
    }
    const double z = 4.0 * prior0 * prior1 * f * f;
    // (1 - sqrt(1-z))/2 evaluated stably for tiny z.
    return 0.5 * z / (1.0 + std::sqrt(std::max(0.0, 1.0 - z)));
}

double covertness_lhs(const PhotonPmf& q, double n_b, std::int64_t m_modes) {
    if (n_b < 0.0) throw std::domain_error("covertness_lhs: n_b < 0");
    std::vector<double> terms(q.log_weights.size());
    for (std::size_t i = 0; i < terms.size(); ++i) {
        const std::int64_t n = q.n_lo + static_cast<std::int64_t>(i);
        const double lp = (n_b > 0.0)
                              ? log_binomial(n + m_modes - 1, n) +
                                    n * std::log(n_b) -
                                    (n + m_modes) * std::log(n_b + 1.0)
                              : (n == 0 ? 0.0 : -kInf);
        terms[i] = 0.5 * (q.log_weights[i] + lp);
    }
    return std::exp(log_sum_exp(terms));
}

double covert_threshold(const ScenarioParams& p) {
    p.validate();
    return (std::min(p.prior0, p.prior1) - p.epsilon) /
           std::sqrt(p.prior0 * p.prior1);
}

CovertGeometry covert_geometry(double eta, double n_b) {
    if (!(eta > 0.0 && eta < 1.0) || n_b < 0.0) {
        throw std::domain_error("covert_geometry: invalid eta or n_b");
    }
    CovertGeometry g;
    const double gamma = eta / ((1.0 - eta) * n_b + 1.0);
    g.theta = std::sqrt(1.0 - gamma);
    // x solves 1 + (x-1)(1-eta)/(eta N_B (1-x) + 1) = theta, placing the
    // covertness pgf argument at the fidelity-bound evaluation point.
    const double one_minus_theta = 1.0 - g.theta;
    g.x = 1.0 - one_minus_theta /
                    ((1.0 - eta) - eta * n_b * one_minus_theta);
    g.mu = 1.0 + eta * n_b * (1.0 - g.x);
    const double g0 = n_b + 1.0;
    const double g1 = (1.0 - eta) * n_b + 1.0;
    g.nu = nu(g0, g1);
    if (n_b / std::abs(g.x) > n_b + 1.0) {
        throw std::domain_error(
            "covert_geometry: series convergence guard N_B/|x| <= N_B+1 "
            "violated");
    }
    g.log_f = std::log(g.nu) + std::log(n_b + 1.0 - n_b / g.x) +
              std::log(g.mu);
    return g;
}

BoundReport covert_pe_lb(const ScenarioParams& p) {
    p.validate();
    if (p.eta > 0.4) {
        throw std::domain_error(
            "covert_pe_lb: requires eta <= 0.4 (bound convergence)");
    }
    const CovertGeometry g = covert_geometry(p.eta, p.n_b);
    const double t = std::max(0.0, covert_threshold(p));
    BoundReport rep;
    rep.meta = p;
    rep.exponent = -2.0 * g.log_f;
    const double m = static_cast<double>(p.m_modes);
    if (t <= 0.0) {
        rep.fidelity_lb = 0.0;
        rep.pe_lb = 0.0;
        rep.log_fidelity_lb = -kInf;
        rep.log_pe_lb = -kInf;
        return rep;
    }
    rep.log_fidelity_lb = 2.0 * std::log(t) + m * g.log_f;
    rep.fidelity_lb = std::exp(rep.log_fidelity_lb);
    const double log_z = 2.0 * rep.log_fidelity_lb;  // z = t^4 f^{2M}
    rep.log_pe_lb = log_z - std::log(4.0);  // small-z form pe ~ z/4
    const double z = std::exp(log_z);
    rep.pe_lb = 0.5 * z / (1.0 + std::sqrt(std::max(0.0, 1.0 - z)));
    if (z > 1e-8) {
        rep.log_pe_lb = std::log(rep.pe_lb);
    }
    return rep;
}

}  // namespace covertlim
