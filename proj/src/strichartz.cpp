#include "nsc/strichartz.hpp"

#include <cmath>
#include <string>

#include "nsc/errors.hpp"
#include "nsc/fft.hpp"

namespace nsc::linear {

void validate_strichartz_exponents(double q, double r) {
    require(q >= 2.0 && r >= 2.0, "strichartz: q, r >= 2 required");
    require(1.0 / q + 1.0 / r <= 0.5 + 1e-15, "strichartz: 1/q + 1/r <= 1/2 required");
    require(!(std::isinf(q) && r == 2.0), "strichartz: (q, r) = (inf, 2) excluded");
}

void StrichartzSetup::validate(const FluidParams& params) const {
    params.validate();
    validate_strichartz_exponents(q, r);
    const double x = std::ldexp(1.0, band);
    require(std::abs(params.Omega) * params.eps < x, "strichartz: band needs |Omega| eps < 2^j");
    require(x <= beta0 / params.eps, "strichartz: band needs 2^j <= beta0 / eps");
    require(horizon > 0.0, "strichartz: horizon must be positive");
    require(time_samples >= 2, "strichartz: at least two time samples required");
}

double strichartz_measure(const FluidParams& params, const StrichartzSetup& setup, const SpectralField& data,
                          const lp::DyadicPartition& part) {
    setup.validate(params);
    require(data.components() == 4, "strichartz: data must carry (a, u1, u2, u3)");
    require(data.grid() == part.grid(), "strichartz: grid mismatch");
    const auto& grid = data.grid();
    const auto& entries = part.band(setup.band);

    struct Mode {
        std::size_t idx;
        ModePropagator prop;
        Vec4 u0;
    };
    std::vector<Mode> modes;
    modes.reserve(entries.size());
    for (const auto& e : entries) {
        Vec4 u0;
        bool any = false;
        for (int c = 0; c < 4; ++c) {
            u0(c) = e.weight * data.at(c, e.mode);
            any = any || u0(c) != cplx(0.0);
        }
        if (any) modes.push_back({e.mode, ModePropagator(grid.frequency(e.mode), params), u0});
    }
    if (modes.empty()) return 0.0;

    auto& fft = fft_engine(grid.n());
    const std::size_t N = grid.size();
    SpectralField snap(grid, 4);
    std::vector<double> values(4 * N);
    std::vector<double> norms(static_cast<std::size_t>(setup.time_samples));
    std::vector<double> times(norms.size());
    for (std::size_t s = 0; s < norms.size(); ++s) {
        const double t = setup.horizon * static_cast<double>(s) / static_cast<double>(norms.size() - 1);
        times[s] = t;
        for (const auto& m : modes) {
            const Vec4 v = m.prop.apply(t, m.u0);
            for (int c = 0; c < 4; ++c) snap.at(c, m.idx) = v(c);
        }
        std::span<double> out(values);
        fft.to_physical(snap.component(0), snap.component(1), out.subspan(0, N), out.subspan(N, N));
        fft.to_physical(snap.component(2), snap.component(3), out.subspan(2 * N, N), out.subspan(3 * N, N));
        norms[s] = lp::lp_norm_physical(values, N, 4, setup.q);
    }
    return lp::time_norm(times, norms, setup.r);
}

SpectralField slow_mode_projection(const SpectralField& data, const FluidParams& params) {
    require(data.components() == 4, "slow_mode_projection: data must carry (a, u1, u2, u3)");
    const auto& grid = data.grid();
    SpectralField out(grid, 4);
    for (std::size_t m = 1; m < grid.size(); ++m) {
        Vec4 u;
        bool any = false;
        for (int c = 0; c < 4; ++c) {
            u(c) = data.at(c, m);
            any = any || u(c) != cplx(0.0);
        }
        if (!any) continue;
        const ModePropagator prop(grid.frequency(m), params);
        const Vec4 v = prop.slow_projector(2) * u;
        for (int c = 0; c < 4; ++c) out.at(c, m) = v(c);
    }
    out.symmetrize();
    return out;
}

}  // namespace nsc::linear
