#pragma once

#include "nsc/littlewood_paley.hpp"
#include "nsc/symbol.hpp"

namespace nsc::linear {

/// Space-time exponents (q, r): 1/q + 1/r <= 1/2 and (q, r) != (inf, 2).
void validate_strichartz_exponents(double q, double r);

struct StrichartzSetup {
    double q = 4.0;
    double r = 4.0;
    int band = 0;
    double horizon = 10.0;
    int time_samples = 1001;  ///< uniform samples on [0, horizon], endpoints included
    double beta0 = 1.0;       ///< band must satisfy |Omega| eps < 2^j <= beta0 / eps
    void validate(const FluidParams& params) const;
};

/// ||Delta_j (a,u)||_{L^r(0,T; L^q)} of the homogeneous linear flow from
/// `data` (4 components). Each mode of the band is advanced exactly by its
/// propagator; the spatial norm is taken on the collocation grid and the time
/// norm by the trapezoid rule (max for r = inf).
///
/// The torus only mimics R^3 while dispersed waves have not wrapped around the
/// box; keep the horizon within the viscous lifetime of the band.
double strichartz_measure(const FluidParams& params, const StrichartzSetup& setup, const SpectralField& data,
                          const lp::DyadicPartition& part);

/// Per-mode projection of a 4-component field onto the two eigen-directions
/// of A(xi) with the slowest oscillation (the rotation-driven inertial pair
/// when |Omega| eps is small against |xi|). The mean mode is dropped.
SpectralField slow_mode_projection(const SpectralField& data, const FluidParams& params);

}  // namespace nsc::linear
