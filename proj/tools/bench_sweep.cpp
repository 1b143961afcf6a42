#include <chrono>
#include <cstdio>
#include <vector>

#include "covertlim/probes.hpp"
#include "covertlim/sweep.hpp"

// Compares the serial reference sweep against the OpenMP-parallel one on a
// representative perfect-covert grid and reports wall times per thread
// count. Results must be bit-identical regardless of parallelism.

namespace {

double wall_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch())
        .count();
}

std::vector<double> log_grid(double lo, double hi, int count) {
    std::vector<double> g(count);
    for (int i = 0; i < count; ++i) {
        const double f = static_cast<double>(i) / (count - 1);
        g[i] = std::exp(std::log(lo) + f * (std::log(hi) - std::log(lo)));
    }
    return g;
}

}  // namespace

int main() {
    const double eta = 0.01;
    const auto grid = log_grid(0.01, 20.0, 48);

    std::printf("perfect-covert sweep, %zu grid points\n", grid.size());
    const double t0 = wall_seconds();
    const auto serial = covertlim::perfect_covert_sweep(eta, grid, 1);
    const double serial_time = wall_seconds() - t0;
    std::printf("%-10s %8.3f s  (reference)\n", "serial", serial_time);

    for (int threads : {2, 4, covertlim::hardware_threads()}) {
        if (threads <= 1) continue;
        const double t1 = wall_seconds();
        const auto par = covertlim::perfect_covert_sweep(eta, grid, threads);
        const double dt = wall_seconds() - t1;
        bool identical = par.size() == serial.size();
        for (std::size_t i = 0; identical && i < par.size(); ++i) {
            identical = par[i].chi_tmsv_qc == serial[i].chi_tmsv_qc &&
                        par[i].chi_gcs_qc == serial[i].chi_gcs_qc &&
                        par[i].ratio == serial[i].ratio;
        }
        std::printf("%d threads  %8.3f s  speedup %.2fx  identical: %s\n",
                    threads, dt, serial_time / dt, identical ? "yes" : "NO");
        if (!identical) return 1;
    }
    return 0;
}
