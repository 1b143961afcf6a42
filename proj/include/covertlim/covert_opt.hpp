#pragma once

#include <array>
#include <cstdint>

#include "covertlim/photon_stats.hpp"
#include "covertlim/scenario.hpp"

// KKT-based constrained optimizations over the pmf of Willie's total photon
// number: extremal probe energies under the covertness necessary condition,
// and the numerically minimized received-state fidelity under the same
// constraint.

namespace covertlim {

struct KktSolution {
    double mult1 = 0.0;  // multiplier of the covertness constraint, >= 0
    double mult2 = 0.0;  // multiplier of the normalization constraint
    PhotonPmf q_star;    // extremal pmf on its truncated support
    double objective = 0.0;
    double log_objective = 0.0;  // for the fidelity problem (underflow-safe)
    double residual = 0.0;       // worst KKT residual (primal/compl/station.)
    double renorm = 1.0;         // finite-sum renormalization
    bool converged = false;
    bool constraint_vacuous = false;  // threshold <= 0: constraint inactive
    bool analytic_limit = false;      // eps = 0 closed form, no multipliers
    int iterations = 0;
};

enum class Branch { kMin, kMax };

struct EnergyLimits {
    double ns_min = 0.0;  // per-mode probe energies
    double ns_max = 0.0;
    KktSolution min_solution;
    KktSolution max_solution;
};

/// Starting multipliers for the energy-limit system, produced by homotopy
/// from a loose covertness level stepped geometrically down to the target.
/// Best effort: falls back to a bracket-center heuristic when the loose
/// problems are infeasible.
std::array<double, 2> continuation_initializer(const ScenarioParams& p,
                                               Branch branch);

/// Extremal per-mode probe energies compatible with the covertness necessary
/// condition. eps = 0 returns ns_min = ns_max = n_b (the matched thermal
/// probe). Solutions whose stationarity pole carries non-negligible mass are
/// reported with converged = false.
EnergyLimits energy_limits(const ScenarioParams& p);

/// Minimal received-state fidelity lower bound over covert pmfs:
/// minimizes nu^M mu^M sum_n q_n x^n on the adaptively truncated support.
/// eps = 0 returns the closed-form value on the matched thermal pmf;
/// a vacuous constraint (threshold <= 0) returns the truncated-support
/// infimum with constraint_vacuous set.
KktSolution min_fidelity_numeric(const ScenarioParams& p);

}  // namespace covertlim
