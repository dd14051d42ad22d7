#pragma once

#include "nsc/pressure.hpp"

namespace nsc {

/// Physical constants of the rescaled system (nu = 2 mu + mu' = 1).
struct FluidParams {
    double mu = 0.25;
    double mu_prime = 0.5;
    double Omega = 0.0;
    double eps = 1.0;
    PressureLaw pressure = PressureLaw::gamma_law(1.4);

    /// mu' fixed by the normalization 2 mu + mu' = 1.
    static FluidParams with_mu(double mu, double Omega, double eps,
                               PressureLaw pressure = PressureLaw::gamma_law(1.4)) {
        return {mu, 1.0 - 2.0 * mu, Omega, eps, std::move(pressure)};
    }

    double nu() const { return 2.0 * mu + mu_prime; }
    /// min(mu, 1)
    double mu_lower() const { return mu < 1.0 ? mu : 1.0; }
    void validate() const;
};

}  // namespace nsc
