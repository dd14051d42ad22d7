#include "nsc/spectral_ops.hpp"

#include <cstdlib>
#include <map>
#include <memory>

#include "nsc/errors.hpp"
#include "nsc/fft.hpp"

namespace nsc {

const ModeTables& mode_tables(const TorusGrid& grid) {
    thread_local std::map<std::pair<int, double>, std::unique_ptr<ModeTables>> cache;
    auto& slot = cache[{grid.n(), grid.length()}];
    if (!slot) {
        slot = std::make_unique<ModeTables>();
        const std::size_t N = grid.size();
        for (int ax = 0; ax < 3; ++ax) {
            slot->xi[ax].resize(N);
            slot->deriv[ax].resize(N);
        }
        slot->xi2.resize(N);
        slot->retained.resize(N);
        for (std::size_t m = 0; m < N; ++m) {
            const auto xi = grid.frequency(m);
            const auto s = grid.unflat(m);
            for (int ax = 0; ax < 3; ++ax) {
                slot->xi[ax][m] = xi[ax];
                slot->deriv[ax][m] = s[ax] == grid.n() / 2 ? 0.0 : xi[ax];
            }
            slot->xi2[m] = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
            slot->retained[m] = retained_by_two_thirds(grid, m) ? 1 : 0;
        }
    }
    return *slot;
}

bool retained_by_two_thirds(const TorusGrid& grid, std::size_t idx) {
    const auto k = grid.wavevector(idx);
    const int n = grid.n();
    // |k_i| <= n/3  <=>  3|k_i| <= n
    return 3 * std::abs(k[0]) <= n && 3 * std::abs(k[1]) <= n && 3 * std::abs(k[2]) <= n;
}

void dealias_in_place(SpectralField& f) {
    const auto& keep = mode_tables(f.grid()).retained;
    for (int c = 0; c < f.components(); ++c) {
        auto comp = f.component(c);
        for (std::size_t m = 0; m < f.modes(); ++m)
            if (!keep[m]) comp[m] = 0.0;
    }
}

SpectralField dealias(const SpectralField& f) {
    SpectralField out = f;
    dealias_in_place(out);
    return out;
}

double alias_content(const SpectralField& f) {
    double worst = 0.0;
    for (std::size_t m = 0; m < f.modes(); ++m) {
        if (retained_by_two_thirds(f.grid(), m)) continue;
        for (int c = 0; c < f.components(); ++c) worst = std::max(worst, std::abs(f.at(c, m)));
    }
    return worst;
}

SpectralField dealiased_product(const SpectralField& f, const SpectralField& g) {
    require(f.grid() == g.grid(), "product: grids mismatch");
    require(f.components() == 1 && g.components() == 1, "product: scalar fields expected");
    auto& fft = fft_engine(f.grid().n());
    const std::size_t N = f.modes();
    std::vector<double> pf(N), pg(N);
    fft.to_physical(f.component(0), g.component(0), pf, pg);
    for (std::size_t m = 0; m < N; ++m) pf[m] *= pg[m];
    SpectralField out(f.grid(), 1);
    fft.to_spectral(pf, {}, out.component(0), {});
    dealias_in_place(out);
    return out;
}

cplx derivative_symbol(const TorusGrid& grid, std::size_t idx, int axis) {
    const auto s = grid.unflat(idx);
    if (s[axis] == grid.n() / 2) return 0.0;
    return cplx(0.0, grid.fundamental() * grid.wavenumber(s[axis]));
}

SpectralField gradient(const SpectralField& scalar) {
    require(scalar.components() == 1, "gradient: scalar field expected");
    const auto& t = mode_tables(scalar.grid());
    SpectralField out(scalar.grid(), 3);
    const auto f = scalar.component(0);
    for (int ax = 0; ax < 3; ++ax) {
        auto g = out.component(ax);
        const auto& d = t.deriv[ax];
        for (std::size_t m = 0; m < scalar.modes(); ++m) g[m] = cplx(-d[m] * f[m].imag(), d[m] * f[m].real());
    }
    return out;
}

SpectralField divergence(const SpectralField& vector) {
    require(vector.components() == 3, "divergence: vector field expected");
    const auto& t = mode_tables(vector.grid());
    SpectralField out(vector.grid(), 1);
    auto g = out.component(0);
    for (int ax = 0; ax < 3; ++ax) {
        const auto f = vector.component(ax);
        const auto& d = t.deriv[ax];
        for (std::size_t m = 0; m < vector.modes(); ++m) g[m] += cplx(-d[m] * f[m].imag(), d[m] * f[m].real());
    }
    return out;
}

}  // namespace nsc
