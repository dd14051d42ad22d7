#pragma once

#include <array>
#include <vector>

#include "nsc/field.hpp"

namespace nsc {

/// Per-mode lookup tables of a grid, built once per (n, L) and thread.
struct ModeTables {
    std::array<std::vector<double>, 3> xi;     ///< physical frequency components
    std::array<std::vector<double>, 3> deriv;  ///< Im of the derivative symbol (Nyquist zeroed)
    std::vector<double> xi2;                   ///< |xi|^2
    std::vector<unsigned char> retained;       ///< 2/3 rule mask
};
const ModeTables& mode_tables(const TorusGrid& grid);

/// True when mode `idx` survives the 2/3 rule (every |k_i| <= n/3).
bool retained_by_two_thirds(const TorusGrid& grid, std::size_t idx);

/// Zero every mode with some |k_i| > n/3.
SpectralField dealias(const SpectralField& f);
void dealias_in_place(SpectralField& f);
/// Largest coefficient magnitude outside the 2/3 mask.
double alias_content(const SpectralField& f);

/// Componentwise product of two scalar fields formed in physical space and
/// truncated by the 2/3 rule. Exact on retained modes when both factors are
/// already dealiased.
SpectralField dealiased_product(const SpectralField& f, const SpectralField& g);

/// i xi_axis, with the Nyquist index mapped to zero.
cplx derivative_symbol(const TorusGrid& grid, std::size_t idx, int axis);

SpectralField gradient(const SpectralField& scalar);
SpectralField divergence(const SpectralField& vector);

}  // namespace nsc
