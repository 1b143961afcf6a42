#pragma once

#include <Eigen/Dense>
#include <complex>

#include "covertlim/scenario.hpp"

// Gaussian states in the Wigner convention with vacuum variance 1/2,
// quadratures ordered (q_1..q_n, p_1..p_n), and the overlap quantities
// Q_s = Tr rho0^s rho1^(1-s) needed for Chernoff-type error exponents.

namespace covertlim {

class GaussianState {
  public:
    GaussianState(Eigen::VectorXd mean, Eigen::MatrixXd cov);

    int n_modes() const { return n_modes_; }
    const Eigen::VectorXd& mean() const { return mean_; }
    const Eigen::MatrixXd& cov() const { return cov_; }

    /// Symplectic eigenvalues (one per mode, ascending). Physical states
    /// have all of them >= 1/2.
    Eigen::VectorXd symplectic_eigenvalues() const;

  private:
    int n_modes_;
    Eigen::VectorXd mean_;
    Eigen::MatrixXd cov_;
};

/// n-mode thermal state of per-mode mean photon number n_mean:
/// zero mean, covariance (n_mean + 1/2) I.
GaussianState thermal_state(double n_mean, int n_modes);

/// Two-mode squeezed vacuum with per-mode signal energy n_s, modes ordered
/// (signal, idler). Pure: both symplectic eigenvalues equal 1/2.
GaussianState tmsv_state(double n_s);

struct TmsvProbe {
    double n_s = 0.0;
};
struct CoherentProbe {
    std::complex<double> alpha{0.0, 0.0};
};

/// State of Alice's return+idler pair under hypothesis h for a TMSV probe.
/// Mode order (return, idler).
GaussianState alice_received(const TmsvProbe& probe, int h,
                             const ScenarioParams& p);

/// Alice's single return mode under hypothesis h for a coherent probe of
/// known amplitude alpha.
GaussianState alice_received(const CoherentProbe& probe, int h,
                             const ScenarioParams& p);

/// Q_s = Tr rho0^s rho1^(1-s) for Gaussian states, s in (0,1), via the
/// symplectic decomposition of each covariance. The boundary values s = 0, 1
/// are handled by the caller through evaluation at s = 1e-6 and 1 - 1e-6.
/// Throws std::domain_error for invalid states (symplectic eigenvalue below
/// 1/2 beyond tolerance) or mismatched mode counts.
double q_s_gaussian(const GaussianState& rho0, const GaussianState& rho1,
                    double s);

struct ChernoffResult {
    double chi = 0.0;     // -ln inf_s Q_s, >= 0
    double s_star = 0.5;  // minimizer
    bool converged = true;
};

/// Per-mode Chernoff exponent: minimizes Q_s over s in [0,1] (boundaries via
/// continuous extension at s = 1e-6, 1 - 1e-6).
ChernoffResult chernoff_exponent_per_mode(const GaussianState& rho0,
                                          const GaussianState& rho1);

}  // namespace covertlim
