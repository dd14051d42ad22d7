#pragma once

#include <random>

#include "nsc/field.hpp"

namespace nsc::testing {

/// Real random field with independent Gaussian coefficients on modes whose
/// lattice radius lies in [kmin, kmax]; zero mean.
inline SpectralField random_field(const TorusGrid& grid, int components, double kmin, double kmax, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    SpectralField f(grid, components);
    for (int c = 0; c < components; ++c) {
        for (std::size_t m = 1; m < grid.size(); ++m) {
            const auto k = grid.wavevector(m);
            const double r = std::sqrt(double(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]));
            if (r < kmin || r > kmax || grid.is_nyquist(m)) continue;
            f.at(c, m) = cplx(gauss(rng), gauss(rng));
        }
    }
    f.symmetrize();
    return f;
}

}  // namespace nsc::testing

#include "nsc/params.hpp"

namespace nsc::testing {

/// Random physical constants on the normalization 2 mu + mu' = 1.
inline FluidParams random_params(std::mt19937_64& rng, double mu_lo = 0.05, double mu_hi = 0.5) {
    std::uniform_real_distribution<double> mu(mu_lo, mu_hi), omega(-20.0, 20.0), logeps(std::log(0.02), 0.0);
    return FluidParams::with_mu(mu(rng), omega(rng), std::exp(logeps(rng)));
}

/// Uniformly random direction scaled to a length in [lo, hi].
inline Vec3 random_xi(std::mt19937_64& rng, double lo, double hi) {
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> r(lo, hi);
    Vec3 v{g(rng), g(rng), g(rng)};
    const double s = r(rng) / norm(v);
    return {v[0] * s, v[1] * s, v[2] * s};
}

}  // namespace nsc::testing
