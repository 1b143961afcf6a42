#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "covertlim/gaussian.hpp"
#include "covertlim/scenario.hpp"

// Truncated-Fock-space densities and the independent Q_s oracle used to
// certify the Gaussian-state computation. The channel action is realized by
// the decomposition of a thermal loss channel into pure loss followed by a
// quantum-limited amplifier, with binomial amplitude-damping Kraus operators
// for the loss stage and photon-adding Kraus operators for the amplifier.

namespace covertlim {

struct FockDensity {
    int n_modes = 1;
    int cutoff = 0;  // per-mode Fock cutoff; matrix dimension = cutoff^n_modes
    Eigen::MatrixXcd matrix;
    double tail_mass = 0.0;  // 1 - trace

    // Row/column index for a two-mode state: n_return * cutoff + n_idler.
};

/// Exact truncated density of Alice's return(+idler) state under hypothesis
/// h. The cutoff grows automatically until tail_mass < tail_bound.
/// Throws std::runtime_error if the required cutoff exceeds max_cutoff.
FockDensity fock_from_channel(const TmsvProbe& probe, int h,
                              const ScenarioParams& p, int cutoff = 0,
                              double tail_bound = 1e-12,
                              int max_cutoff = 4096);
FockDensity fock_from_channel(const CoherentProbe& probe, int h,
                              const ScenarioParams& p, int cutoff = 0,
                              double tail_bound = 1e-12,
                              int max_cutoff = 4096);

/// Tr rho0^s rho1^(1-s) on the truncated space via Hermitian
/// eigendecomposition, clamping eigenvalues below 1e-14 to zero.
/// Requires tail_mass < 1e-10 on both inputs.
double q_s_fock_oracle(const FockDensity& rho0, const FockDensity& rho1,
                       double s);

/// Same as q_s_fock_oracle for several s values, sharing one
/// eigendecomposition per state.
std::vector<double> q_s_fock_many(const FockDensity& rho0,
                                  const FockDensity& rho1,
                                  std::span<const double> s_values);

struct FockMoments {
    Eigen::VectorXd mean;  // quadrature means, (q_1..q_n, p_1..p_n)
    Eigen::MatrixXd cov;   // Wigner covariance, vacuum variance 1/2
};

/// First and second quadrature moments of a truncated Fock density, for
/// cross-checking against the Gaussian channel action.
FockMoments fock_moments(const FockDensity& rho);

}  // namespace covertlim
