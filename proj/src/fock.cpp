#include "covertlim/fock.hpp"

#include <cmath>
#include <stdexcept>

#include "covertlim/numerics.hpp"

namespace covertlim {

namespace {

// Thermal occupation amplitudes: sqrt(N^n / (N+1)^(n+1)).
std::vector<double> thermal_log_weights(double n_mean, int cutoff) {
    std::vector<double> lw(cutoff);
    for (int n = 0; n < cutoff; ++n) {
        lw[n] = (n_mean > 0.0)
                    ? n * std::log(n_mean) - (n + 1) * std::log(n_mean + 1.0)
                    : (n == 0 ? 0.0 : -std::numeric_limits<double>::infinity());
    }
    return lw;
}

// Pure-loss Kraus amplitude <n-l| A_l |n> = sqrt(C(n,l) tau^(n-l) (1-tau)^l).
double loss_amp(int n, int l, double tau) {
    if (l > n) return 0.0;
    if (tau == 0.0) return (n == l) ? 1.0 : 0.0;
    if (tau == 1.0) return (l == 0) ? 1.0 : 0.0;
    const double lg = 0.5 * (log_binomial(n, l) + (n - l) * std::log(tau) +
                             l * std::log1p(-tau));
    return std::exp(lg);
}

// Quantum-limited amplifier Kraus amplitude
// <n+j| B_j |n> = sqrt(C(n+j,j) (1/G)^(n+1) (1-1/G)^j).
double amp_amp(int n, int j, double gain) {
    if (gain == 1.0) return (j == 0) ? 1.0 : 0.0;
    const double q = 1.0 - 1.0 / gain;
    const double lg = 0.5 * (log_binomial(n + j, j) -
                             (n + 1) * std::log(gain) + j * std::log(q));
    return std::exp(lg);
}

// Smallest J with amplifier completeness defect below 1e-13 for all input
// levels up to n_max.
int amp_kraus_count(double gain, int n_max) {
    if (gain == 1.0) return 0;
    const double q = 1.0 - 1.0 / gain;
    int jmax = 4;
    for (;;) {
        double defect = 0.0;
        for (int n : {0, n_max}) {
            double term = std::exp(-(n + 1) * std::log(gain));
            double sum = term;
            for (int j = 0; j < jmax; ++j) {
                term *= q * static_cast<double>(n + j + 1) /
                        static_cast<double>(j + 1);
                sum += term;
            }
            defect = std::max(defect, 1.0 - sum);
        }
        if (defect < 1e-13) return jmax;
        if (jmax > 100000) {
            throw std::runtime_error("fock_from_channel: amplifier Kraus "
                                     "count exceeds budget");
        }
        jmax *= 2;
    }
}

// Thermal-loss decomposition L_{kappa,N} = A_G o L_{kappa/G},
// G = (1-kappa) N + 1.
struct ChannelDecomposition {
    double gain;
    double tau;
};
ChannelDecomposition decompose(double kappa, double n_env) {
    const double gain = (1.0 - kappa) * n_env + 1.0;
    return {gain, kappa / gain};
}

// Apply L_{kappa,n_env} to a single-mode density (dense Kraus application).
Eigen::MatrixXcd apply_thermal_loss_1mode(const Eigen::MatrixXcd& rho,
                                          double kappa, double n_env,
                                          int out_dim) {
    const int in_dim = static_cast<int>(rho.rows());
    const auto [gain, tau] = decompose(kappa, n_env);
    const int jmax = amp_kraus_count(gain, in_dim - 1);

    // Loss stage.
    Eigen::MatrixXcd mid = Eigen::MatrixXcd::Zero(in_dim, in_dim);
    for (int l = 0; l < in_dim; ++l) {
        Eigen::MatrixXcd k = Eigen::MatrixXcd::Zero(in_dim, in_dim);
        bool any = false;
        for (int n = l; n < in_dim; ++n) {
            const double a = loss_amp(n, l, tau);
            if (a != 0.0) {
                k(n - l, n) = a;
                any = true;
            }
        }
        if (!any) break;
        mid += k * rho * k.adjoint();
    }
    // Amplifier stage.
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(out_dim, out_dim);
    for (int j = 0; j <= jmax; ++j) {
        Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(out_dim, in_dim);
        for (int n = 0; n < in_dim; ++n) {
            if (n + j < out_dim) b(n + j, n) = amp_amp(n, j, gain);
        }
        out += b * mid * b.adjoint();
    }
    return out;
}

int thermal_cutoff(double n_mean, double tail_bound) {
    if (n_mean <= 0.0) return 1;
    const double r = n_mean / (n_mean + 1.0);
    // (r)^c < tail_bound/8
    const int c =
        static_cast<int>(std::ceil(std::log(tail_bound / 8.0) / std::log(r)));
    return std::max(c, 4);
}

int coherent_cutoff(double nbar, double tail_bound) {
    // Poisson tail; generous margin.
    (void)tail_bound;
    return static_cast<int>(std::ceil(nbar + 14.0 * std::sqrt(nbar + 1.0))) +
           24;
}

}  // namespace

FockDensity fock_from_channel(const TmsvProbe& probe, int h,
                              const ScenarioParams& p, int cutoff,
                              double tail_bound, int max_cutoff) {
    p.validate();
    if (h != 0 && h != 1)
        throw std::domain_error("fock_from_channel: h must be 0 or 1");
    int c = cutoff > 0
                ? cutoff
                : std::max(thermal_cutoff(probe.n_s, tail_bound),
                           thermal_cutoff(p.n_b, tail_bound)) +
                      8;
    for (;; c += c / 2 + 4) {
        if (c > max_cutoff) {
            throw std::runtime_error("fock_from_channel: cutoff budget exceeded");
        }
        FockDensity out;
        out.n_modes = 2;
        out.cutoff = c;
        const int dim = c * c;
        if (h == 0) {
            // Idler reduced state (thermal n_s) x thermal(n_b) return.
            Eigen::VectorXd diag(dim);
            const auto lr = thermal_log_weights(p.n_b, c);
            const auto li = thermal_log_weights(probe.n_s, c);
            for (int nr = 0; nr < c; ++nr) {
                for (int ni = 0; ni < c; ++ni) {
                    diag[nr * c + ni] = std::exp(lr[nr] + li[ni]);
                }
            }
            out.matrix = diag.cast<std::complex<double>>().asDiagonal();
        } else {
            // (id_I x L_{eta,n_b}) applied to TMSV; the joint state is a sum
            // of outer products of sparse kets (one Fock level per idler
            // index), so accumulate those directly.
            const auto [gain, tau] = decompose(p.eta, p.n_b);
            const int jmax = amp_kraus_count(gain, c - 1);
            std::vector<double> schmidt(c);
            const auto ls = thermal_log_weights(probe.n_s, c);
            for (int n = 0; n < c; ++n) schmidt[n] = std::exp(0.5 * ls[n]);
            Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(dim, dim);
            std::vector<int> idx(c);
            std::vector<double> val(c);
            for (int l = 0; l < c; ++l) {
                for (int j = 0; j <= jmax; ++j) {
                    int sz = 0;
                    for (int n = l; n < c; ++n) {
                        const int nr = n - l + j;
                        if (nr >= c) break;
                        const double v =
                            schmidt[n] * loss_amp(n, l, tau) * amp_amp(n - l, j, gain);
                        if (v != 0.0) {
                            idx[sz] = nr * c + n;
                            val[sz] = v;
                            ++sz;
                        }
                    }
                    for (int a = 0; a < sz; ++a) {
                        for (int b = 0; b < sz; ++b) {
                            acc(idx[a], idx[b]) += val[a] * val[b];
                        }
                    }
                }
            }
            out.matrix = acc.cast<std::complex<double>>();
        }
        out.tail_mass = 1.0 - out.matrix.real().trace();
        if (out.tail_mass < tail_bound) return out;
    }
}

FockDensity fock_from_channel(const CoherentProbe& probe, int h,
                              const ScenarioParams& p, int cutoff,
                              double tail_bound, int max_cutoff) {
    p.validate();
    if (h != 0 && h != 1)
        throw std::domain_error("fock_from_channel: h must be 0 or 1");
    const double nbar = std::norm(probe.alpha);
    int c = cutoff > 0 ? cutoff
                       : std::max(coherent_cutoff(nbar, tail_bound),
                                  thermal_cutoff(p.n_b, tail_bound) + 8);
    for (;; c += c / 2 + 4) {
        if (c > max_cutoff) {
            throw std::runtime_error("fock_from_channel: cutoff budget exceeded");
        }
        FockDensity out;
        out.n_modes = 1;
        out.cutoff = c;
        if (h == 0) {
            Eigen::VectorXd diag(c);
            const auto lw = thermal_log_weights(p.n_b, c);
            for (int n = 0; n < c; ++n) diag[n] = std::exp(lw[n]);
            out.matrix = diag.cast<std::complex<double>>().asDiagonal();
        } else {
            // Coherent ket in Fock basis, then the channel.
            Eigen::VectorXcd ket(c);
            const double la = std::abs(probe.alpha);
            const double ph = std::arg(probe.alpha);
            for (int n = 0; n < c; ++n) {
                const double lmag =
                    (la > 0.0 ? n * std::log(la) : (n == 0 ? 0.0 : -1e308)) -
                    0.5 * log_gamma(n + 1.0) - 0.5 * nbar;
                ket[n] = std::polar(std::exp(lmag), ph * n);
            }
            const Eigen::MatrixXcd rho_in = ket * ket.adjoint();
            out.matrix = apply_thermal_loss_1mode(rho_in, p.eta, p.n_b, c);
        }
        out.tail_mass = 1.0 - out.matrix.real().trace();
        if (out.tail_mass < tail_bound) return out;
    }
}

namespace {

struct EigParts {
    Eigen::VectorXd vals;   // clamped, descending is not required
    Eigen::MatrixXcd vecs;  // columns matching vals (only kept > 0)
};

EigParts decompose_density(const FockDensity& rho) {
    const double herm_defect =
        (rho.matrix - rho.matrix.adjoint()).cwiseAbs().maxCoeff();
    if (herm_defect > 1e-10) {
        throw std::runtime_error("q_s_fock_oracle: density not Hermitian");
    }
    const bool real_case = rho.matrix.imag().cwiseAbs().maxCoeff() == 0.0;
    Eigen::VectorXd vals;
    Eigen::MatrixXcd vecs;
    if (real_case) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(rho.matrix.real());
        vals = es.eigenvalues();
        vecs = es.eigenvectors().cast<std::complex<double>>();
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho.matrix);
        vals = es.eigenvalues();
        vecs = es.eigenvectors();
    }
    if (vals.minCoeff() < -1e-10) {
        throw std::runtime_error("q_s_fock_oracle: density has a significant "
                                 "negative eigenvalue");
    }
    // Clamp round-off eigenvalues below 1e-14 to zero and drop them.
    int keep = 0;
    for (int i = 0; i < vals.size(); ++i) {
        if (vals[i] > 1e-14) ++keep;
    }
    EigParts out;
    out.vals.resize(keep);
    out.vecs.resize(vecs.rows(), keep);
    int k = 0;
    for (int i = 0; i < vals.size(); ++i) {
        if (vals[i] > 1e-14) {
            out.vals[k] = vals[i];
            out.vecs.col(k) = vecs.col(i);
            ++k;
        }
    }
    return out;
}

FockDensity embed_to_cutoff(const FockDensity& rho, int cutoff) {
    if (rho.cutoff == cutoff) return rho;
    FockDensity out;
    out.n_modes = rho.n_modes;
    out.cutoff = cutoff;
    out.tail_mass = rho.tail_mass;
    const int dim = rho.n_modes == 1 ? cutoff : cutoff * cutoff;
    out.matrix = Eigen::MatrixXcd::Zero(dim, dim);
    if (rho.n_modes == 1) {
        out.matrix.topLeftCorner(rho.cutoff, rho.cutoff) = rho.matrix;
    } else {
        const int c = rho.cutoff;
        for (int r1 = 0; r1 < c; ++r1)
            for (int i1 = 0; i1 < c; ++i1)
                for (int r2 = 0; r2 < c; ++r2)
                    for (int i2 = 0; i2 < c; ++i2)
                        out.matrix(r1 * cutoff + i1, r2 * cutoff + i2) =
                            rho.matrix(r1 * c + i1, r2 * c + i2);
    }
    return out;
}

}  // namespace

std::vector<double> q_s_fock_many(const FockDensity& rho0,
                                  const FockDensity& rho1,
                                  std::span<const double> s_values) {
    if (rho0.n_modes != rho1.n_modes) {
        throw std::domain_error("q_s_fock_oracle: mode count mismatch");
    }
    if (rho0.tail_mass >= 1e-10 || rho1.tail_mass >= 1e-10) {
        throw std::domain_error("q_s_fock_oracle: tail mass too large");
    }
    const int c = std::max(rho0.cutoff, rho1.cutoff);
    const EigParts e0 = decompose_density(embed_to_cutoff(rho0, c));
    const EigParts e1 = decompose_density(embed_to_cutoff(rho1, c));
    const Eigen::MatrixXd overlap2 =
        (e0.vecs.adjoint() * e1.vecs).cwiseAbs2();
    std::vector<double> out;
    out.reserve(s_values.size());
    for (double s : s_values) {
        Eigen::VectorXd a(e0.vals.size()), b(e1.vals.size());
        for (int i = 0; i < a.size(); ++i) a[i] = std::pow(e0.vals[i], s);
        for (int i = 0; i < b.size(); ++i) b[i] = std::pow(e1.vals[i], 1.0 - s);
        out.push_back(a.dot(overlap2 * b));
    }
    return out;
}

double q_s_fock_oracle(const FockDensity& rho0, const FockDensity& rho1,
                       double s) {
    const double sv[1] = {s};
    return q_s_fock_many(rho0, rho1, std::span<const double>(sv, 1))[0];
}

FockMoments fock_moments(const FockDensity& rho) {
    const int nm = rho.n_modes;
    const int c = rho.cutoff;
    const int dim = static_cast<int>(rho.matrix.rows());
    const int stride[2] = {nm == 2 ? c : 1, 1};

    auto level = [&](int idx, int mode) {
        return (mode == 0 && nm == 2) ? idx / c : idx % c;
    };
    // tr(rho a_m): sum_m sqrt(idx_m) rho[idx, idx - stride_m]
    auto mean_a = [&](int m) {
        std::complex<double> acc = 0.0;
        for (int i = 0; i < dim; ++i) {
            const int lm = level(i, m);
            if (lm >= 1) acc += std::sqrt(double(lm)) * rho.matrix(i, i - stride[m]);
        }
        return acc;
    };
    // tr(rho a_i a_j)
    auto mean_aa = [&](int mi, int mj) {
        std::complex<double> acc = 0.0;
        for (int i = 0; i < dim; ++i) {
            const int lj = level(i, mj);
            if (lj < 1) continue;
            const int mid = i - stride[mj];
            const int li = level(mid, mi);
            if (li < 1) continue;
            acc += std::sqrt(double(lj) * double(li)) *
                   rho.matrix(i, mid - stride[mi]);
        }
        return acc;
    };
    // tr(rho a_i^dag a_j)
    auto mean_ada = [&](int mi, int mj) {
        std::complex<double> acc = 0.0;
        for (int i = 0; i < dim; ++i) {
            const int lj = level(i, mj);
            if (lj < 1) continue;
            const int mid = i - stride[mj];
            const int li = level(mid, mi);
            if (li + 1 >= c) continue;
            acc += std::sqrt(double(lj) * double(li + 1)) *
                   rho.matrix(i, mid + stride[mi]);
        }
        return acc;
    };

    FockMoments out;
    out.mean.resize(2 * nm);
    out.cov.resize(2 * nm, 2 * nm);
    std::vector<std::complex<double>> ma(nm);
    for (int m = 0; m < nm; ++m) {
        ma[m] = mean_a(m);
        out.mean[m] = std::sqrt(2.0) * ma[m].real();
        out.mean[nm + m] = std::sqrt(2.0) * ma[m].imag();
    }
    for (int i = 0; i < nm; ++i) {
        for (int j = 0; j < nm; ++j) {
            const std::complex<double> aa = mean_aa(i, j);
            const std::complex<double> ada = mean_ada(i, j);
            const double d = (i == j) ? 0.5 : 0.0;
            const double qq = aa.real() + ada.real() + d;
            const double pp = -aa.real() + ada.real() + d;
            const double qp = aa.imag() + ada.imag();
            const double pq = aa.imag() - ada.imag();
            out.cov(i, j) = qq - out.mean[i] * out.mean[j];
            out.cov(nm + i, nm + j) = pp - out.mean[nm + i] * out.mean[nm + j];
            out.cov(i, nm + j) = qp - out.mean[i] * out.mean[nm + j];
            out.cov(nm + i, j) = pq - out.mean[nm + i] * out.mean[j];
        }
    }
    out.cov = 0.5 * (out.cov + out.cov.transpose().eval());
    return out;
}

}  // namespace covertlim
