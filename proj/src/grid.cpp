#include "nsc/grid.hpp"

#include <string>

#include "nsc/errors.hpp"

namespace nsc {

TorusGrid::TorusGrid(int n_per_axis, double domain_length) : n_(n_per_axis), length_(domain_length) {
    require(n_per_axis >= 8 && n_per_axis % 2 == 0,
            "grid: n_per_axis must be an even integer >= 8, got " + std::to_string(n_per_axis));
    require(std::isfinite(domain_length) && domain_length > 0.0, "grid: domain_length must be positive");
}

BandRange TorusGrid::resolvable_bands() const {
    // 2^{j-1} >= 2 pi / L  and  2^{j+1} <= pi n / L
    const double tol = 1e-12;
    const int lo = static_cast<int>(std::ceil(std::log2(fundamental()) + 1.0 - tol));
    const int hi = static_cast<int>(std::floor(std::log2(nyquist_radius()) - 1.0 + tol));
    return {lo, hi};
}

}  // namespace nsc
