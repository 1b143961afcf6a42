#include "covertlim/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>

namespace covertlim {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogSqrt2Pi = 0.91893853320467274178032973640562;
}  // namespace

double log_gamma(double x) {
    if (!(x > 0.0)) {
        throw std::domain_error("log_gamma: requires x > 0");
    }
    // Lanczos, g = 7, 9 coefficients.
    static constexpr std::array<double, 9> coeff = {
        0.99999999999980993227684700473478,
        676.520368121885098567009190444019,
        -1259.13921672240287047156078755283,
        771.3234287776530788486528258894,
        -176.61502916214059906584551354,
        12.507343278686904814458936853,
        -0.13857109526572011689554707,
        9.984369578019570859563e-6,
        1.50563273514931155834e-7};
    if (x < 0.5) {
        // Reflection keeps the approximation on its accurate branch.
        return std::log(M_PI / std::sin(M_PI * x)) - log_gamma(1.0 - x);
    }
    const double z = x - 1.0;
    double sum = coeff[0];
    for (int i = 1; i < 9; ++i) {
        sum += coeff[i] / (z + static_cast<double>(i));
    }
    const double t = z + 7.5;  // z + g + 1/2
    return kLogSqrt2Pi + (z + 0.5) * std::log(t) - t + std::log(sum);
}

double log_binomial(std::int64_t n, std::int64_t k) {
    if (n < 0 || k < 0 || k > n) {
        throw std::domain_error("log_binomial: requires 0 <= k <= n");
    }
    if (k == 0 || k == n) return 0.0;
    // Canonicalize so that k and n-k enter in a fixed order; this makes the
    // k <-> n-k symmetry bit-exact.
    const std::int64_t kk = std::min(k, n - k);
    return log_gamma(static_cast<double>(n) + 1.0) -
           log_gamma(static_cast<double>(kk) + 1.0) -
           log_gamma(static_cast<double>(n - kk) + 1.0);
}

double log_sum_exp(std::span<const double> terms) {
    if (terms.empty()) return -kInf;
    double m = -kInf;
    for (double t : terms) m = std::max(m, t);
    if (m == -kInf) return -kInf;
    if (std::isinf(m)) return m;
    double acc = 0.0;
    for (double t : terms) {
        if (t != -kInf) acc += std::exp(t - m);
    }
    return m + std::log(acc);
}

double log_add_exp(double a, double b) {
    if (a == -kInf) return b;
    if (b == -kInf) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(std::min(a, b) - m));
}

MinimizeResult minimize_scalar(const std::function<double(double)>& f,
                               double lo, double hi, const SolverConfig& cfg) {
    if (!(lo < hi)) throw std::domain_error("minimize_scalar: requires lo < hi");
    constexpr double invphi = 0.6180339887498948482;
    double a = lo, b = hi;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    MinimizeResult res;
    int it = 0;
    for (; it < cfg.max_iter; ++it) {
        if (b - a <= cfg.abs_tol + cfg.rel_tol * (std::abs(a) + std::abs(b))) {
            res.converged = true;
            break;
        }
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = f(x2);
        }
    }
    res.iterations = it;
    res.x = (f1 <= f2) ? x1 : x2;
    res.fx = std::min(f1, f2);
    // Snap to an endpoint when the minimum sits on the boundary.
    const double fl = f(lo), fh = f(hi);
    if (fl <= res.fx) {
        res.x = lo;
        res.fx = fl;
    }
    if (fh < res.fx) {
        res.x = hi;
        res.fx = fh;
    }
    return res;
}

Solve2dResult solve_2d(
    const std::function<std::array<double, 2>(double, double)>& F,
    std::array<double, 2> x0, const SolverConfig& cfg) {
    Solve2dResult res;
    std::array<double, 2> x = x0;
    auto norm_inf = [](const std::array<double, 2>& v) {
        return std::max(std::abs(v[0]), std::abs(v[1]));
    };
    std::array<double, 2> fx = F(x[0], x[1]);
    res.trace.push_back(x);
    int it = 0;
    for (; it < cfg.max_iter; ++it) {
        if (norm_inf(fx) <= cfg.abs_tol) {
            res.converged = true;
            break;
        }
        // Central finite-difference Jacobian.
        double J[2][2];
        for (int j = 0; j < 2; ++j) {
            const double h = std::max(1e-7, 1e-7 * std::abs(x[j]));
            std::array<double, 2> xp = x, xm = x;
            xp[j] += h;
            xm[j] -= h;
            const auto fp = F(xp[0], xp[1]);
            const auto fm = F(xm[0], xm[1]);
            J[0][j] = (fp[0] - fm[0]) / (2.0 * h);
            J[1][j] = (fp[1] - fm[1]) / (2.0 * h);
        }
        const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
        const double scale = std::max({std::abs(J[0][0]) * std::abs(J[1][1]),
                                       std::abs(J[0][1]) * std::abs(J[1][0]),
                                       1e-300});
        if (std::abs(det) < 1e-14 * scale) {
            res.singular_jacobian = true;
            break;
        }
        const std::array<double, 2> step = {
            (J[1][1] * fx[0] - J[0][1] * fx[1]) / det,
            (J[0][0] * fx[1] - J[1][0] * fx[0]) / det};
        double lambda = cfg.damping;
        const double f0 = norm_inf(fx);
        std::array<double, 2> xn = x;
        std::array<double, 2> fn = fx;
        bool improved = false;
        for (int bt = 0; bt < 40; ++bt) {
            xn = {x[0] - lambda * step[0], x[1] - lambda * step[1]};
            fn = F(xn[0], xn[1]);
            if (std::isfinite(fn[0]) && std::isfinite(fn[1]) &&
                norm_inf(fn) < f0) {
                improved = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!improved) break;  // stalled; report best iterate
        x = xn;
        fx = fn;
        res.trace.push_back(x);
    }
    res.iterations = it;
    res.root = x;
    res.residual = fx;
    if (!res.converged && norm_inf(fx) <= cfg.abs_tol) res.converged = true;
    return res;
}

namespace {

// Implicit QL diagonalization of a symmetric tridiagonal matrix that also
// accumulates the first components of the eigenvectors (Elhay & Kautsky,
// Algorithm 655; Martin & Wilkinson). d: diagonal, e: subdiagonal in
// e[0..n-2], z: on input e_1, on output first eigenvector components.
void imtqlx(int n, std::vector<double>& d, std::vector<double>& e,
            std::vector<double>& z) {
    if (n == 1) return;
    const double prec = std::numeric_limits<double>::epsilon();
    const int itn = 50;
    e[n - 1] = 0.0;
    for (int l = 1; l <= n; ++l) {
        int j = 0;
        for (;;) {
            int m = l;
            for (; m <= n; ++m) {
                if (m == n) break;
                if (std::abs(e[m - 1]) <=
                    prec * (std::abs(d[m - 1]) + std::abs(d[m]))) {
                    break;
                }
            }
            double p = d[l - 1];
            if (m == l) break;
            if (j >= itn) {
                throw std::runtime_error("gauss_laguerre: QL iteration limit");
            }
            ++j;
            double g = (d[l] - p) / (2.0 * e[l - 1]);
            double r = std::sqrt(g * g + 1.0);
            g = d[m - 1] - p + e[l - 1] / (g + std::copysign(r, g));
            double s = 1.0;
            double c = 1.0;
            p = 0.0;
            for (int ii = 1; ii <= m - l; ++ii) {
                const int i = m - ii;
                double f = s * e[i - 1];
                const double b = c * e[i - 1];
                if (std::abs(g) <= std::abs(f)) {
                    c = g / f;
                    r = std::sqrt(c * c + 1.0);
                    e[i] = f * r;
                    s = 1.0 / r;
                    c *= s;
                } else {
                    s = f / g;
                    r = std::sqrt(s * s + 1.0);
                    e[i] = g * r;
                    c = 1.0 / r;
                    s *= c;
                }
                g = d[i] - p;
                r = (d[i - 1] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i] = g + p;
                g = c * r - b;
                f = z[i];
                z[i] = s * z[i - 1] + c * f;
                z[i - 1] = c * z[i - 1] - s * f;
            }
            d[l - 1] -= p;
            e[l - 1] = g;
            e[m - 1] = 0.0;
        }
    }
    // Sort ascending, carrying z along.
    for (int i = 0; i < n - 1; ++i) {
        int k = i;
        for (int j = i + 1; j < n; ++j) {
            if (d[j] < d[k]) k = j;
        }
        if (k != i) {
            std::swap(d[i], d[k]);
            std::swap(z[i], z[k]);
        }
    }
}

GaussLaguerreRule make_laguerre(int n) {
    // Jacobi matrix for Laguerre polynomials: diag 2i+1, subdiag i.
    std::vector<double> d(n), e(n), z(n, 0.0);
    for (int i = 0; i < n; ++i) {
        d[i] = 2.0 * i + 1.0;
        e[i] = static_cast<double>(i + 1);
    }
    // imtqlx expects subdiagonal in e[0..n-2].
    for (int i = n - 1; i >= 1; --i) e[i - 1] = static_cast<double>(i);
    z[0] = 1.0;  // mu0 = int_0^inf exp(-u) du = 1
    imtqlx(n, d, e, z);
    GaussLaguerreRule rule;
    rule.nodes = d;
    rule.weights.resize(n);
    for (int i = 0; i < n; ++i) rule.weights[i] = z[i] * z[i];
    return rule;
}

}  // namespace

const GaussLaguerreRule& gauss_laguerre(int n) {
    static std::map<int, GaussLaguerreRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) {
        it = cache.emplace(n, make_laguerre(n)).first;
    }
    return it->second;
}

QuadratureResult integrate_radial(const std::function<double(double)>& g,
                                  double scale, double rel_tol) {
    QuadratureResult res;
    if (scale < 0.0) throw std::domain_error("integrate_radial: scale < 0");
    if (scale == 0.0) {
        res.value = g(0.0);
        res.converged = true;
        return res;
    }
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (int n = 64; n <= 4096; n *= 2) {
        const auto& rule = gauss_laguerre(n);
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            if (rule.weights[i] == 0.0) continue;
            acc += rule.weights[i] * g(std::sqrt(scale * rule.nodes[i]));
        }
        res.nodes = n;
        res.value = acc;
        if (!std::isnan(prev) &&
            std::abs(acc - prev) <= rel_tol * std::max(std::abs(acc), 1e-300)) {
            res.converged = true;
            return res;
        }
        prev = acc;
    }
    return res;  // converged = false past 4096 nodes
}

}  // namespace covertlim
