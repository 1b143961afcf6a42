#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "covertlim/scenario.hpp"

// Total-photon-number distributions in a log-stable representation and their
// probability generating functions, including the exact transform under
// M-mode thermal loss channels.

namespace covertlim {

/// Log-domain pmf of the total photon number over a contiguous support
/// window [n_lo, n_lo + size - 1]. For small-mean distributions n_lo is 0;
/// large-M thermal totals are windowed around the bulk, with the neglected
/// mass recorded in truncation_tail.
struct PhotonPmf {
    std::int64_t n_lo = 0;
    std::vector<double> log_weights;
    double truncation_tail = 0.0;

    std::int64_t n_hi() const {
        return n_lo + static_cast<std::int64_t>(log_weights.size()) - 1;
    }
    double mean() const;
    /// ln sum exp(log_weights) (should be ~0 for a normalized pmf).
    double log_norm() const;
};

/// Negative-binomial pmf of the total photon number over m_modes iid thermal
/// modes of per-mode mean n_mean. d < 0 requests adaptive truncation.
PhotonPmf thermal_total_pmf(double n_mean, std::int64_t m_modes,
                            std::int64_t d = -1);

/// Probability generating function P(xi) = sum_n p_n xi^n with its largest
/// reliably convergent argument magnitude.
class Pgf {
  public:
    Pgf(std::function<double(double)> eval, double domain_radius)
        : eval_(std::move(eval)), domain_radius_(domain_radius) {}

    double operator()(double xi) const;
    double domain_radius() const { return domain_radius_; }

  private:
    std::function<double(double)> eval_;
    double domain_radius_;
};

/// Pgf of a stored pmf; log-domain accumulation for xi >= 0 and
/// Kahan-compensated signed accumulation for xi < 0. The domain radius is
/// the reciprocal of the tail ratio limsup |p_{n+1}/p_n|.
Pgf pgf_of_pmf(const PhotonPmf& pmf);

/// Closed-form pgf of the M-mode thermal total: [1 + N(1-xi)]^{-M}.
Pgf thermal_pgf(double n_mean, std::int64_t m_modes);

/// Exact total-photon pgf after the M-mode thermal loss channel
/// L_{kappa,n_env} applied to each mode:
///   P_out(xi) = [G - xi (G-1)]^{-M} P_in(1 - kt + kt xi / (G - xi (G-1))),
/// with G = (1-kappa) n_env + 1 and kt = kappa/G.
Pgf pgf_through_thermal_loss(const Pgf& pgf_in, double kappa, double n_env,
                             std::int64_t m_modes);

struct FactorialMgfs {
    /// Falling-factorial mgf: F(xi) = P(1 + xi).
    std::function<double(double)> falling;
    /// Rising-factorial mgf: R(xi) = (1-xi)^{-M} P(1/(1-xi)).
    std::function<double(double)> rising;
};
FactorialMgfs factorial_mgf_relations(const Pgf& pgf, std::int64_t m_modes);

/// Willie's total-photon pgf under H1' given Alice's probe pgf: the
/// L_{1-eta,N_B} instance of the thermal-loss transform.
Pgf willie_pgf(const Pgf& probe_pgf, const ScenarioParams& p);
double willie_pgf_from_probe(const Pgf& probe_pgf, const ScenarioParams& p,
                             double xi);

/// Inverse map: Alice's probe pgf expressed through Willie's pgf;
/// round-trips with willie_pgf.
Pgf probe_pgf_from_willie(const Pgf& willie, const ScenarioParams& p);

}  // namespace covertlim
