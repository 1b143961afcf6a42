#pragma once

#include <cstdint>

#include "covertlim/photon_stats.hpp"
#include "covertlim/scenario.hpp"

// Analytical performance bounds: the output-fidelity lower bound for
// thermal-loss channel pairs, the error-probability lower bound it implies,
// the covertness necessary condition, and the universal probe-independent
// covert detection bound.

namespace covertlim {

/// Two cascaded amplifier/loss channels acting mode-wise on an M-mode probe.
struct ChannelPair {
    double kappa0 = 0.0;
    double kappa1 = 0.0;
    double n0 = 0.0;
    double n1 = 0.0;
    std::int64_t m_modes = 1;
};

/// nu = 1 / (sqrt(g0 g1) - sqrt((g0-1)(g1-1))) in (0, 1].
double nu(double g0, double g1);

/// ln of the output-fidelity lower bound
///   F >= nu^M sum_n p_n [nu sqrt(kt0 kt1) + sqrt((1-kt0)(1-kt1))]^n,
/// with G_b = (1-kappa_b) N_b + 1 and kt_b = kappa_b / G_b.
double log_fidelity_lb_channels(const PhotonPmf& pmf, const ChannelPair& pair);
double fidelity_lb_channels(const PhotonPmf& pmf, const ChannelPair& pair);

/// Jensen relaxation of the above using only the total signal energy:
/// ln [nu^M beta^{E}] with beta the same per-photon bracket.
double log_fidelity_lb_energy_only(double total_energy,
                                   const ChannelPair& pair);
double fidelity_lb_energy_only(double total_energy, const ChannelPair& pair);

/// Error-probability lower bound from a fidelity value. Equal priors give
/// (1 - sqrt(1 - f^2))/2; general priors use the unequal-prior
/// Fuchs-van de Graaf form (1 - sqrt(1 - 4 l0 l1 f^2))/2.
double pe_lb_from_fidelity(double f, double prior0 = 0.5, double prior1 = 0.5);

/// Left-hand side of the covertness necessary condition:
/// sum_n sqrt(q_n) sqrt(C(n+M-1,n) N_B^n / (N_B+1)^(n+M)).
double covertness_lhs(const PhotonPmf& q, double n_b, std::int64_t m_modes);

/// Right-hand side threshold (min(l0,l1) - eps)/sqrt(l0 l1); equal priors
/// reduce to 1 - 2 eps.
double covert_threshold(const ScenarioParams& p);

/// Shared geometry of the universal covert bound: the pgf matching point x,
/// the transform prefactor mu = 1 + eta N_B (1-x), nu for the target
/// detection channel pair, and the per-mode factor
/// f = nu (N_B + 1 - N_B/x) mu.
struct CovertGeometry {
    double theta = 0.0;
    double x = 0.0;
    double mu = 0.0;
    double nu = 0.0;
    double log_f = 0.0;
};
CovertGeometry covert_geometry(double eta, double n_b);

struct BoundReport {
    double fidelity_lb = 0.0;      // may underflow to 0 for large M
    double pe_lb = 0.0;            // in [0, 1/2]
    double exponent = 0.0;         // -2 ln f, the large-M rate of the bound
    double log_fidelity_lb = 0.0;  // natural log, exact at any M
    double log_pe_lb = 0.0;        // natural log of the small-bound form
    ScenarioParams meta;
};

/// Universal, probe-independent lower bound on the covert detection error
/// probability: pe >= (1 - sqrt(1 - t^4 f^{2M}))/2 with t the covertness
/// threshold. Requires eta <= 0.4 (convergence of the underlying series);
/// the guard N_B/|x| <= N_B + 1 is checked explicitly and a violation
/// throws std::domain_error rather than clamping.
BoundReport covert_pe_lb(const ScenarioParams& p);

}  // namespace covertlim
