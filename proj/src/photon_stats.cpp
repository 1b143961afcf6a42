#include "covertlim/photon_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include "covertlim/numerics.hpp"

namespace covertlim {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double nb_log_weight(double n_mean, std::int64_t m, std::int64_t n) {
    if (n_mean <= 0.0) return n == 0 ? 0.0 : -kInf;
    return log_binomial(n + m - 1, n) + n * std::log(n_mean) -
           (n + m) * std::log(n_mean + 1.0);
}
}  // namespace

double PhotonPmf::mean() const {
    // sum n p_n over the window, in log domain for the positive-n part.
    std::vector<double> terms;
    terms.reserve(log_weights.size());
    for (std::size_t i = 0; i < log_weights.size(); ++i) {
        const std::int64_t n = n_lo + static_cast<std::int64_t>(i);
        if (n > 0 && log_weights[i] != -kInf) {
            terms.push_back(log_weights[i] + std::log(static_cast<double>(n)));
        }
    }
    if (terms.empty()) return 0.0;
    return std::exp(log_sum_exp(terms));
}

double PhotonPmf::log_norm() const { return log_sum_exp(log_weights); }

PhotonPmf thermal_total_pmf(double n_mean, std::int64_t m_modes,
                            std::int64_t d) {
    if (n_mean < 0.0) throw std::domain_error("thermal_total_pmf: n_mean < 0");
    if (m_modes < 1) throw std::domain_error("thermal_total_pmf: m_modes < 1");
    PhotonPmf pmf;
    if (n_mean == 0.0) {
        pmf.log_weights = {0.0};
        return pmf;
    }
    const double mean = static_cast<double>(m_modes) * n_mean;
    const double sigma = std::sqrt(static_cast<double>(m_modes) * n_mean *
                                   (n_mean + 1.0));
    if (d >= 0) {
        pmf.log_weights.resize(d + 1);
        for (std::int64_t n = 0; n <= d; ++n) {
            pmf.log_weights[n] = nb_log_weight(n_mean, m_modes, n);
        }
    } else if (mean <= 5.0e4) {
        // Dense from zero; adaptive upper limit by the tail-ratio rule: stop
        // once the geometric tail bound drops below 1e-15 of the accumulated
        // sum.
        const double ratio_inf = n_mean / (n_mean + 1.0);
        std::vector<double> lw;
        lw.reserve(static_cast<std::size_t>(mean + 12.0 * sigma) + 64);
        double lterm = -static_cast<double>(m_modes) * std::log(n_mean + 1.0);
        double lacc = -kInf;
        for (std::int64_t n = 0;; ++n) {
            lw.push_back(lterm);
            lacc = log_add_exp(lacc, lterm);
            const double ratio = ratio_inf *
                                 (static_cast<double>(n) + m_modes) /
                                 (static_cast<double>(n) + 1.0);
            const double lnext = lterm + std::log(ratio);
            if (ratio < 1.0) {
                const double ltail = lnext - std::log1p(-ratio);
                if (ltail < lacc + std::log(1e-15)) break;
            }
            lterm = lnext;
            if (n > (1 << 26)) {
                throw std::runtime_error("thermal_total_pmf: truncation runaway");
            }
        }
        pmf.log_weights = std::move(lw);
    } else {
        // Windowed around the bulk; 13 sigma keeps the neglected mass far
        // below every tolerance used downstream.
        const double w = 13.0;
        pmf.n_lo = std::max<std::int64_t>(
            0, static_cast<std::int64_t>(mean - w * sigma));
        const std::int64_t hi =
            static_cast<std::int64_t>(std::ceil(mean + w * sigma)) + 8;
        pmf.log_weights.resize(hi - pmf.n_lo + 1);
        const double base = nb_log_weight(n_mean, m_modes, pmf.n_lo);
        pmf.log_weights[0] = base;
        const double lr_inf = std::log(n_mean / (n_mean + 1.0));
        for (std::int64_t n = pmf.n_lo + 1; n <= hi; ++n) {
            pmf.log_weights[n - pmf.n_lo] =
                pmf.log_weights[n - pmf.n_lo - 1] +
                std::log((static_cast<double>(n) + m_modes - 1.0) /
                         static_cast<double>(n)) +
                lr_inf;
        }
        // The anchor weight carries the cancellation error of huge
        // log-gamma values (~1e-9 absolute); renormalizing removes this
        // common offset while the recurrence keeps the shape accurate.
        const double lse = log_sum_exp(pmf.log_weights);
        for (double& w : pmf.log_weights) w -= lse;
    }
    const double ln = pmf.log_norm();
    pmf.truncation_tail = std::max(0.0, -std::expm1(ln));
    return pmf;
}

double Pgf::operator()(double xi) const {
    if (std::abs(xi) > domain_radius_ * (1.0 + 1e-12)) {
        throw std::domain_error("Pgf: argument outside convergence domain");
    }
    return eval_(xi);
}

Pgf pgf_of_pmf(const PhotonPmf& pmf) {
    auto data = std::make_shared<PhotonPmf>(pmf);
    // Tail ratio estimate: limsup of p_{n+1}/p_n over the stored tail,
    // taken past the mode so the rising flank does not enter. A valid pmf
    // always converges on |xi| <= 1, so that is the floor.
    const auto& lw = data->log_weights;
    const std::size_t peak =
        std::max_element(lw.begin(), lw.end()) - lw.begin();
    double max_ratio = 0.0;
    const std::size_t start =
        std::max(peak + 1, lw.size() - std::min<std::size_t>(lw.size(), 9));
    for (std::size_t i = start; i < lw.size(); ++i) {
        if (lw[i] == -kInf || lw[i - 1] == -kInf) continue;
        max_ratio = std::max(max_ratio, std::exp(lw[i] - lw[i - 1]));
    }
    const double radius =
        max_ratio > 0.0 ? std::max(1.0, 1.0 / max_ratio) : kInf;
    auto eval = [data](double xi) {
        const auto& w = data->log_weights;
        const std::int64_t lo = data->n_lo;
        if (xi == 0.0) {
            return lo == 0 ? std::exp(w[0]) : 0.0;
        }
        if (xi > 0.0) {
            const double lxi = std::log(xi);
            std::vector<double> terms(w.size());
            for (std::size_t i = 0; i < w.size(); ++i) {
                terms[i] = w[i] + (lo + static_cast<std::int64_t>(i)) * lxi;
            }
            return std::exp(log_sum_exp(terms));
        }
        // xi < 0: signed alternating series, Kahan-compensated.
        const double lxi = std::log(-xi);
        double sum = 0.0, comp = 0.0;
        for (std::size_t i = 0; i < w.size(); ++i) {
            const std::int64_t n = lo + static_cast<std::int64_t>(i);
            if (w[i] == -kInf) continue;
            const double mag = std::exp(w[i] + n * lxi);
            const double term = (n % 2 == 0) ? mag : -mag;
            const double y = term - comp;
            const double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
        }
        return sum;
    };
    return Pgf(eval, radius);
}

Pgf thermal_pgf(double n_mean, std::int64_t m_modes) {
    if (n_mean < 0.0) throw std::domain_error("thermal_pgf: n_mean < 0");
    const double m = static_cast<double>(m_modes);
    auto eval = [n_mean, m](double xi) {
        return std::exp(-m * std::log1p(n_mean * (1.0 - xi)));
    };
    const double radius =
        n_mean > 0.0 ? (n_mean + 1.0) / n_mean - 1e-12 : kInf;
    return Pgf(eval, radius);
}

Pgf pgf_through_thermal_loss(const Pgf& pgf_in, double kappa, double n_env,
                             std::int64_t m_modes) {
    if (!(kappa >= 0.0 && kappa <= 1.0)) {
        throw std::domain_error("pgf_through_thermal_loss: kappa outside [0,1]");
    }
    if (n_env < 0.0) {
        throw std::domain_error("pgf_through_thermal_loss: n_env < 0");
    }
    const double gain = (1.0 - kappa) * n_env + 1.0;
    const double kt = kappa / gain;
    const double m = static_cast<double>(m_modes);
    auto inner = std::make_shared<Pgf>(pgf_in);
    auto arg = [gain, kt](double xi) {
        const double den = gain - xi * (gain - 1.0);
        return 1.0 - kt + kt * xi / den;
    };
    // Domain: the composed argument must stay inside the inner radius and the
    // prefactor pole at xi = G/(G-1) must not be reached.
    const double r_in = inner->domain_radius();
    double radius = gain > 1.0 ? gain / (gain - 1.0) * (1.0 - 1e-12) : kInf;
    if (std::isfinite(r_in)) {
        // arg is increasing in xi below the pole; solve arg(xi) = +-r_in.
        auto inv = [gain, kt](double w) {
            const double t = w - 1.0 + kt;
            return t * gain / (kt + t * (gain - 1.0));
        };
        const double hi = inv(r_in);
        if (hi > 0.0) radius = std::min(radius, hi);
        const double lo = inv(-r_in);
        if (lo < 0.0) radius = std::min(radius, -lo);
    }
    auto eval = [inner, gain, kt, m, arg](double xi) {
        const double den = gain - xi * (gain - 1.0);
        if (den <= 0.0) {
            throw std::domain_error("pgf_through_thermal_loss: prefactor pole");
        }
        return std::exp(-m * std::log(den)) * (*inner)(arg(xi));
    };
    return Pgf(eval, radius);
}

FactorialMgfs factorial_mgf_relations(const Pgf& pgf, std::int64_t m_modes) {
    auto inner = std::make_shared<Pgf>(pgf);
    const double m = static_cast<double>(m_modes);
    FactorialMgfs out;
    out.falling = [inner](double xi) { return (*inner)(1.0 + xi); };
    out.rising = [inner, m](double xi) {
        if (xi >= 1.0) {
            throw std::domain_error("rising mgf: xi must be below 1");
        }
        return std::exp(-m * std::log1p(-xi)) * (*inner)(1.0 / (1.0 - xi));
    };
    return out;
}

Pgf willie_pgf(const Pgf& probe_pgf, const ScenarioParams& p) {
    p.validate();
    return pgf_through_thermal_loss(probe_pgf, 1.0 - p.eta, p.n_b, p.m_modes);
}

double willie_pgf_from_probe(const Pgf& probe_pgf, const ScenarioParams& p,
                             double xi) {
    return willie_pgf(probe_pgf, p)(xi);
}

Pgf probe_pgf_from_willie(const Pgf& willie, const ScenarioParams& p) {
    p.validate();
    const double gain = p.eta * p.n_b + 1.0;  // (1-(1-eta)) n_b + 1
    const double kt = (1.0 - p.eta) / gain;
    const double m = static_cast<double>(p.m_modes);
    auto inner = std::make_shared<Pgf>(willie);
    // Inverse of zeta = 1 - kt + kt xi / (G - xi (G-1)).
    auto inv_arg = [gain, kt](double zeta) {
        const double t = zeta - 1.0 + kt;
        return t * gain / (kt + t * (gain - 1.0));
    };
    const double r_w = inner->domain_radius();
    double radius = kInf;
    if (std::isfinite(r_w)) {
        // Find the largest |zeta| with |inv_arg(zeta)| <= r_w by expanding
        // from 1 (where inv_arg(1) = 1 <= r_w is guaranteed for a pgf).
        double hi = 1.0;
        while (std::abs(inv_arg(hi * 1.05)) <= r_w && hi < 1e6) hi *= 1.05;
        double lo = -1.0;
        while (std::abs(inv_arg(lo * 1.05)) <= r_w && -lo < 1e6) lo *= 1.05;
        radius = std::min(hi, -lo);
    }
    auto eval = [inner, inv_arg, gain, m](double zeta) {
        const double xi = inv_arg(zeta);
        const double den = gain - xi * (gain - 1.0);
        return std::exp(m * std::log(den)) * (*inner)(xi);
    };
    return Pgf(eval, radius);
}

}  // namespace covertlim
