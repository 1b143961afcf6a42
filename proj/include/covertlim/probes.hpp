#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "covertlim/scenario.hpp"

// Performance of concrete probes (TMSV and Gaussian-distributed coherent
// states) under perfect and epsilon-covertness: covert energy budgets,
// Chernoff/Bhattacharyya exponents, and the error-probability curves.

namespace covertlim {

enum class ProbeKind { kTmsv, kGcs };

struct ProbeSpec {
    ProbeKind kind = ProbeKind::kTmsv;
    double n_s = 0.0;
};

enum class ExponentMethod { kExactQcb, kBhattacharyya, kClosedFormApprox };

struct ExponentReport {
    double chi = 0.0;
    double s_star = 0.5;
    ExponentMethod method = ExponentMethod::kExactQcb;
    bool converged = true;
};

/// Maximum per-mode N_S such that the trace norm between Willie's two
/// product-thermal hypothesis states stays within 4 eps (both TMSV and GCS
/// probes present Willie with a product thermal of brightness N_S). Found by
/// bisection; eps = 0 returns n_b exactly.
double covert_ns_budget(const ScenarioParams& p);

/// Trace norm || sigma0 - sigma1 ||_1 between M-mode product thermals of
/// per-mode brightness n_b and n, via the log-domain four-sum split.
double willie_trace_norm(double n_b, double n, std::int64_t m_modes);

/// Per-mode error exponent of the TMSV probe for the covert target detection
/// hypothesis pair.
ExponentReport exponent_tmsv(double eta, double n_s, double n_b,
                             ExponentMethod method = ExponentMethod::kExactQcb);

/// Per-mode error exponent of the GCS probe: the per-amplitude overlap
/// C_s(|alpha|) integrated over the circular Gaussian amplitude
/// distribution. Exact-QCB minimizes the integral over a global s;
/// optimize_s_per_alpha instead minimizes inside the integral.
ExponentReport exponent_gcs(double eta, double n_s, double n_b,
                            ExponentMethod method = ExponentMethod::kExactQcb,
                            bool optimize_s_per_alpha = false);

/// Per-amplitude overlap Q_s between the thermal and displaced-thermal
/// return states for a coherent probe of amplitude magnitude r.
double gcs_overlap_at_amplitude(double eta, double n_b, double r, double s);

struct PerfectCovertRow {
    double n_b = 0.0;
    double chi_tmsv_qc = 0.0;
    double chi_tmsv_qb = 0.0;
    double chi_gcs_qc = 0.0;
    double chi_gcs_qb = 0.0;
    double ratio = 0.0;  // chi_tmsv_qc / chi_gcs_qc
    bool flagged = false;
};

/// Perfectly covert probes (N_S = N_B) swept over a background-brightness
/// grid.
std::vector<PerfectCovertRow> perfect_covert_sweep(
    double eta, std::span<const double> nb_grid, int threads = 0);

struct CovertCurveRow {
    std::int64_t m = 0;
    double n_s = 0.0;  // covert budget at this M
    double log10_pe_bound = 0.0;
    double log10_pe_tmsv = 0.0;
    double log10_pe_gcs = 0.0;
    double exponent_bound = 0.0;
    double exponent_tmsv = 0.0;
    double exponent_gcs = 0.0;
    bool flagged = false;
};

/// Error-probability curves under epsilon-covertness: for each M the probe
/// energy is set to the covert budget and the universal bound is compared to
/// the TMSV and GCS QCB performance.
std::vector<CovertCurveRow> covert_curves(const ScenarioParams& p,
                                          std::span<const std::int64_t> m_grid,
                                          int threads = 0);

}  // namespace covertlim
