#pragma once

#include <complex>
#include <span>
#include <vector>

#include "nsc/grid.hpp"

namespace nsc {

using cplx = std::complex<double>;

/// Fourier coefficients of a scalar or vector field on a torus grid.
///
/// Convention: f(x) = sum_k c_k exp(i xi_k . x). The k = 0 entry is the mean.
/// Components are stored contiguously, one block of n^3 coefficients each.
class SpectralField {
public:
    SpectralField(TorusGrid grid, int components);

    const TorusGrid& grid() const { return grid_; }
    int components() const { return components_; }
    std::size_t modes() const { return grid_.size(); }

    std::span<cplx> component(int c) { return {coeffs_.data() + offset(c), modes()}; }
    std::span<const cplx> component(int c) const { return {coeffs_.data() + offset(c), modes()}; }

    cplx& at(int c, std::size_t mode) { return coeffs_[offset(c) + mode]; }
    const cplx& at(int c, std::size_t mode) const { return coeffs_[offset(c) + mode]; }

    std::span<cplx> data() { return coeffs_; }
    std::span<const cplx> data() const { return coeffs_; }

    /// Copy of components [first, first + count).
    SpectralField slice(int first, int count) const;
    /// Overwrite components starting at `first` with the components of `src`.
    void assign(int first, const SpectralField& src);

    SpectralField& operator+=(const SpectralField& other);
    SpectralField& operator-=(const SpectralField& other);
    SpectralField& operator*=(double factor);

    /// Largest |c_k - conj(c_{-k})| over all components and modes.
    double hermitian_defect() const;
    /// Replace every coefficient pair with its Hermitian average.
    void symmetrize();
    bool all_finite() const;
    /// Largest coefficient magnitude.
    double max_abs() const;

private:
    std::size_t offset(int c) const { return static_cast<std::size_t>(c) * modes(); }

    TorusGrid grid_;
    int components_;
    std::vector<cplx> coeffs_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

/// sqrt(sum |c_k|^2) over all components; equals the normalized L2 norm.
double l2_norm(const SpectralField& f);

}  // namespace nsc
