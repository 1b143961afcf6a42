#include "covertlim/gaussian.hpp"

#include <cmath>
#include <stdexcept>

#include "covertlim/numerics.hpp"

namespace covertlim {

namespace {

Eigen::MatrixXd symplectic_form(int n) {
    Eigen::MatrixXd om = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    om.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
    om.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
    return om;
}

// Symplectic eigenvalues of a covariance matrix: positive square roots of the
// eigenvalues of -(V Omega)^2, each of which appears twice.
Eigen::VectorXd symplectic_spectrum(const Eigen::MatrixXd& cov) {
    const int n = static_cast<int>(cov.rows()) / 2;
    const Eigen::MatrixXd a = cov * symplectic_form(n);
    const Eigen::MatrixXd t = -(a * a);
    Eigen::EigenSolver<Eigen::MatrixXd> es(t, /*computeEigenvectors=*/false);
    Eigen::VectorXd all(2 * n);
    for (int i = 0; i < 2 * n; ++i) {
        all[i] = std::sqrt(std::max(es.eigenvalues()[i].real(), 0.0));
    }
    std::sort(all.data(), all.data() + 2 * n);
    Eigen::VectorXd out(n);
    for (int i = 0; i < n; ++i) out[i] = all[2 * i];
    return out;
}

}  // namespace

GaussianState::GaussianState(Eigen::VectorXd mean, Eigen::MatrixXd cov)
    : mean_(std::move(mean)), cov_(std::move(cov)) {
    if (cov_.rows() != cov_.cols() || cov_.rows() % 2 != 0 ||
        cov_.rows() == 0 || mean_.size() != cov_.rows()) {
        throw std::domain_error("GaussianState: inconsistent dimensions");
    }
    n_modes_ = static_cast<int>(cov_.rows()) / 2;
    if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
        throw std::domain_error("GaussianState: covariance not symmetric");
    }
    cov_ = 0.5 * (cov_ + cov_.transpose().eval());
}

Eigen::VectorXd GaussianState::symplectic_eigenvalues() const {
    return symplectic_spectrum(cov_);
}

GaussianState thermal_state(double n_mean, int n_modes) {
    if (n_mean < 0.0) throw std::domain_error("thermal_state: n_mean < 0");
    if (n_modes < 1) throw std::domain_error("thermal_state: n_modes < 1");
    return GaussianState(
        Eigen::VectorXd::Zero(2 * n_modes),
        (n_mean + 0.5) * Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes));
}

GaussianState tmsv_state(double n_s) {
    if (n_s < 0.0) throw std::domain_error("tmsv_state: n_s < 0");
    const double s = n_s + 0.5;
    const double c = std::sqrt(n_s * (n_s + 1.0));
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(4, 4);
    // x-block then p-block, modes (signal, idler).
    cov(0, 0) = s;
    cov(1, 1) = s;
    cov(0, 1) = cov(1, 0) = c;
    cov(2, 2) = s;
    cov(3, 3) = s;
    cov(2, 3) = cov(3, 2) = -c;
    return GaussianState(Eigen::VectorXd::Zero(4), cov);
}

GaussianState alice_received(const TmsvProbe& probe, int h,
                             const ScenarioParams& p) {
    p.validate();
    if (probe.n_s < 0.0) throw std::domain_error("alice_received: n_s < 0");
    const double ns = probe.n_s;
    const double s = ns + 0.5;
    const double b = p.n_b + 0.5;
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(4, 4);
    if (h == 0) {
        cov(0, 0) = b;
        cov(1, 1) = s;
        cov(2, 2) = b;
        cov(3, 3) = s;
    } else if (h == 1) {
        const double a = p.eta * ns + (1.0 - p.eta) * p.n_b + 0.5;
        const double c = std::sqrt(p.eta) * std::sqrt(ns * (ns + 1.0));
        cov(0, 0) = a;
        cov(1, 1) = s;
        cov(0, 1) = cov(1, 0) = c;
        cov(2, 2) = a;
        cov(3, 3) = s;
        cov(2, 3) = cov(3, 2) = -c;
    } else {
        throw std::domain_error("alice_received: h must be 0 or 1");
    }
    return GaussianState(Eigen::VectorXd::Zero(4), cov);
}

GaussianState alice_received(const CoherentProbe& probe, int h,
                             const ScenarioParams& p) {
    p.validate();
    if (h == 0) {
        return thermal_state(p.n_b, 1);
    }
    if (h != 1) throw std::domain_error("alice_received: h must be 0 or 1");
    Eigen::VectorXd mean(2);
    mean << std::sqrt(2.0 * p.eta) * probe.alpha.real(),
        std::sqrt(2.0 * p.eta) * probe.alpha.imag();
    const double v = (1.0 - p.eta) * p.n_b + 0.5;
    return GaussianState(mean, v * Eigen::MatrixXd::Identity(2, 2));
}

namespace {

// G_t(nu) = 2^t / ((nu+1)^t - (nu-1)^t), the trace of the t-th power of a
// thermal mode with symplectic eigenvalue nu (vacuum-variance-1 convention).
double g_factor(double t, double nu) {
    const double up = std::pow(nu + 1.0, t);
    const double dn = std::pow(std::max(nu - 1.0, 0.0), t);
    return std::pow(2.0, t) / (up - dn);
}

// Lambda_t(nu) = ((nu+1)^t + (nu-1)^t) / ((nu+1)^t - (nu-1)^t): symplectic
// eigenvalue of the (normalized) t-th power.
double lambda_factor(double t, double nu) {
    const double up = std::pow(nu + 1.0, t);
    const double dn = std::pow(std::max(nu - 1.0, 0.0), t);
    return (up + dn) / (up - dn);
}

struct PowerDecomposition {
    Eigen::MatrixXd cov_t;   // covariance of the normalized power
    double log_trace = 0.0;  // ln prod_k G_t(nu_k)
};

// For V in the vacuum-variance-1 convention, computes the covariance of the
// normalized t-th power, S diag(Lambda_t(nu_k)) S^T, as h(T) V with
// T = -(V Omega)^2 = S diag(nu^2) S^{-1} and h(y) = Lambda_t(sqrt(y))/sqrt(y).
PowerDecomposition gaussian_power(const Eigen::MatrixXd& v, double t) {
    const int n = static_cast<int>(v.rows()) / 2;
    const Eigen::MatrixXd a = v * symplectic_form(n);
    const Eigen::MatrixXd big = -(a * a);
    Eigen::EigenSolver<Eigen::MatrixXd> es(big);
    Eigen::VectorXcd w = es.eigenvalues();
    Eigen::MatrixXcd p = es.eigenvectors();
    Eigen::VectorXcd h(2 * n);
    std::vector<double> nus(2 * n);
    for (int i = 0; i < 2 * n; ++i) {
        double nu = std::sqrt(std::max(w[i].real(), 0.0));
        if (nu < 1.0 - 2e-10) {
            throw std::domain_error(
                "q_s_gaussian: symplectic eigenvalue below vacuum");
        }
        nu = std::max(nu, 1.0);
        nus[i] = nu;
        h[i] = lambda_factor(t, nu) / nu;
    }
    const Eigen::MatrixXcd ht = p * h.asDiagonal() * p.inverse();
    PowerDecomposition out;
    out.cov_t = (ht.real() * v);
    out.cov_t = 0.5 * (out.cov_t + out.cov_t.transpose().eval());
    std::sort(nus.begin(), nus.end());
    double lt = 0.0;
    for (int k = 0; k < n; ++k) lt += std::log(g_factor(t, nus[2 * k]));
    out.log_trace = lt;
    return out;
}

}  // namespace

double q_s_gaussian(const GaussianState& rho0, const GaussianState& rho1,
                    double s) {
    if (rho0.n_modes() != rho1.n_modes()) {
        throw std::domain_error("q_s_gaussian: mode count mismatch");
    }
    if (!(s > 0.0 && s < 1.0)) {
        throw std::domain_error("q_s_gaussian: s must be in (0,1)");
    }
    const int n = rho0.n_modes();
    // Convert to the vacuum-variance-1 convention: factor 2 on covariances,
    // sqrt(2) on means.
    const Eigen::MatrixXd v0 = 2.0 * rho0.cov();
    const Eigen::MatrixXd v1 = 2.0 * rho1.cov();
    const Eigen::VectorXd delta =
        std::sqrt(2.0) * (rho1.mean() - rho0.mean());

    const PowerDecomposition p0 = gaussian_power(v0, s);
    const PowerDecomposition p1 = gaussian_power(v1, 1.0 - s);
    const Eigen::MatrixXd sigma = p0.cov_t + p1.cov_t;
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success) {
        throw std::runtime_error("q_s_gaussian: composite covariance not SPD");
    }
    double log_det = 0.0;
    for (int i = 0; i < 2 * n; ++i) {
        log_det += 2.0 * std::log(llt.matrixL()(i, i));
    }
    const double quad = delta.dot(llt.solve(delta));
    const double log_q = p0.log_trace + p1.log_trace +
                         n * std::log(2.0) - 0.5 * log_det - 0.5 * quad;
    return std::exp(log_q);
}

ChernoffResult chernoff_exponent_per_mode(const GaussianState& rho0,
                                          const GaussianState& rho1) {
    SolverConfig cfg;
    cfg.abs_tol = 1e-9;
    cfg.max_iter = 200;
    const auto res = minimize_scalar(
        [&](double s) { return q_s_gaussian(rho0, rho1, s); }, 1e-6,
        1.0 - 1e-6, cfg);
    ChernoffResult out;
    out.s_star = res.x;
    out.chi = std::max(0.0, -std::log(std::min(res.fx, 1.0)));
    out.converged = res.converged;
    return out;
}

}  // namespace covertlim
