#pragma once

#include <memory>
#include <span>
#include <vector>

#include "nsc/field.hpp"

namespace nsc {

/// In-place 3D complex FFT of one grid size (FFTW backed).
///
/// Real fields are transformed two at a time by packing them into the real
/// and imaginary parts of one complex array; unpacking in the forward
/// direction produces exactly Hermitian spectra.
class Fft3d {
public:
    explicit Fft3d(int n);
    ~Fft3d();
    Fft3d(const Fft3d&) = delete;
    Fft3d& operator=(const Fft3d&) = delete;

    int n() const { return n_; }
    std::size_t size() const { return size_; }

    /// Physical values of one or two real fields. `second`/`out_second` may be empty.
    void to_physical(std::span<const cplx> first, std::span<const cplx> second, std::span<double> out_first,
                     std::span<double> out_second);
    /// Spectrum (normalized, mean in entry 0) of one or two real fields.
    void to_spectral(std::span<const double> first, std::span<const double> second, std::span<cplx> out_first,
                     std::span<cplx> out_second);
    /// General complex inverse transform (no symmetry assumed).
    void to_physical_complex(std::span<const cplx> spec, std::span<cplx> out);

private:
    struct Plans;
    int n_;
    std::size_t size_;
    std::unique_ptr<Plans> plans_;
};

/// Cached engine for grid size n, one per thread.
Fft3d& fft_engine(int n);

/// Physical values of every component of a real field, component-major.
std::vector<double> to_physical(const SpectralField& f);
/// Spectral field from component-major physical samples.
SpectralField to_spectral(const TorusGrid& grid, std::span<const double> values, int components);

}  // namespace nsc
