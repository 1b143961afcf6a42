#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

// Numerically stable special functions, summation, quadrature and
// root-finding used throughout the library. All functions are pure and
// reentrant.

namespace covertlim {

struct SolverConfig {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_iter = 200;
    double damping = 1.0;  // in (0,1]; initial Newton step scale
};

/// ln Gamma(x) for x > 0 via the Lanczos approximation (g = 7, 9
/// coefficients). Relative error below 1e-13 on [0.5, 1e9].
/// Throws std::domain_error for x <= 0.
double log_gamma(double x);

/// ln C(n, k). Never overflows for n up to ~1e9.
/// Throws std::domain_error if k > n or either argument is negative.
double log_binomial(std::int64_t n, std::int64_t k);

/// ln sum_i exp(t_i), stable under max-shift. -inf terms contribute zero;
/// an empty sequence returns -inf by convention.
double log_sum_exp(std::span<const double> terms);

/// Two-term variant: ln(exp(a) + exp(b)).
double log_add_exp(double a, double b);

struct MinimizeResult {
    double x = 0.0;
    double fx = 0.0;
    bool converged = false;
    int iterations = 0;
};

/// Golden-section minimization of a unimodal f on [lo, hi]. Converges to
/// |x - argmin| <= abs_tol; returns an endpoint if the minimum sits on the
/// boundary. Non-convergence after max_iter returns the best iterate with
/// converged = false.
MinimizeResult minimize_scalar(const std::function<double(double)>& f,
                               double lo, double hi,
                               const SolverConfig& cfg = {});

struct Solve2dResult {
    std::array<double, 2> root{0.0, 0.0};
    std::array<double, 2> residual{0.0, 0.0};
    bool converged = false;
    bool singular_jacobian = false;
    int iterations = 0;
    std::vector<std::array<double, 2>> trace;  // iterate history
};

/// Damped Newton iteration for F(x, y) = 0 with a central finite-difference
/// Jacobian (step max(1e-7, 1e-7 |x|)). Success means ||F(root)||_inf <=
/// abs_tol. Non-convergence and singular-Jacobian conditions are flagged,
/// never thrown.
Solve2dResult solve_2d(
    const std::function<std::array<double, 2>(double, double)>& F,
    std::array<double, 2> x0, const SolverConfig& cfg = {});

struct QuadratureResult {
    double value = 0.0;
    bool converged = false;
    int nodes = 0;
};

/// Integral of g against the radial density of a circular Gaussian with
/// per-mode energy `scale`:
///     I = int_0^inf g(r) (2r/scale) exp(-r^2/scale) dr.
/// Evaluated by Gauss-Laguerre quadrature in u = r^2/scale, starting at 64
/// nodes and doubling until two successive estimates agree to rel_tol
/// (non-convergence flagged past 4096 nodes). scale = 0 degenerates to g(0).
QuadratureResult integrate_radial(const std::function<double(double)>& g,
                                  double scale, double rel_tol = 1e-10);

/// Gauss-Laguerre nodes and weights for weight exp(-u) on [0, inf), computed
/// by the Golub-Welsch method. Cached per order; thread-safe.
struct GaussLaguerreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussLaguerreRule& gauss_laguerre(int n);

}  // namespace covertlim
