#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace covertlim {

/// Physical scenario shared by every bound: target reflectivity eta,
/// background brightness N_B, mode count M, covertness level epsilon and the
/// adversary's prior probabilities.
struct ScenarioParams {
    double eta = 0.01;
    double n_b = 0.2;
    std::int64_t m_modes = 1;
    double epsilon = 1e-3;
    double prior0 = 0.5;
    double prior1 = 0.5;

    void validate() const {
        if (!(eta > 0.0 && eta < 1.0))
            throw std::domain_error("ScenarioParams: eta must be in (0,1)");
        if (!(n_b >= 0.0))
            throw std::domain_error("ScenarioParams: n_b must be >= 0");
        if (m_modes < 1)
            throw std::domain_error("ScenarioParams: m_modes must be >= 1");
        if (!(epsilon >= 0.0 && epsilon <= 0.5))
            throw std::domain_error("ScenarioParams: epsilon must be in [0,1/2]");
        if (!(prior0 > 0.0 && prior0 < 1.0 && prior1 > 0.0 && prior1 < 1.0))
            throw std::domain_error("ScenarioParams: priors must be in (0,1)");
        if (std::abs(prior0 + prior1 - 1.0) > 1e-12)
            throw std::domain_error("ScenarioParams: priors must sum to 1");
    }
};

}  // namespace covertlim
