#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>

namespace nsc {

using Vec3 = std::array<double, 3>;

inline double norm(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

/// Inclusive range of dyadic band indices.
struct BandRange {
    int lo = 0;
    int hi = -1;
    bool empty() const { return hi < lo; }
    int size() const { return empty() ? 0 : hi - lo + 1; }
    bool contains(int j) const { return j >= lo && j <= hi; }
};

/// Periodic box [0, L)^3 sampled with n points per axis. Stands in for R^3.
///
/// Modes are stored in FFT order: storage index i along an axis maps to the
/// integer wavenumber i for i < n/2 and i - n otherwise, so the Nyquist index
/// n/2 carries wavenumber -n/2. The physical frequency is 2*pi*k/L.
class TorusGrid {
public:
    TorusGrid(int n_per_axis, double domain_length);

    int n() const { return n_; }
    double length() const { return length_; }
    std::size_t size() const { return static_cast<std::size_t>(n_) * n_ * n_; }

    /// Spacing of the frequency lattice, 2*pi/L.
    double fundamental() const { return 2.0 * std::numbers::pi / length_; }
    /// Largest frequency magnitude of the inscribed ball, pi*n/L.
    double nyquist_radius() const { return std::numbers::pi * n_ / length_; }
    /// Largest |xi| over all stored modes (a cube corner).
    double max_frequency() const { return std::sqrt(3.0) * nyquist_radius(); }

    int wavenumber(int storage_index) const { return storage_index < n_ / 2 ? storage_index : storage_index - n_; }
    int storage_index(int wavenumber) const { return ((wavenumber % n_) + n_) % n_; }

    std::size_t flat(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * n_ + j) * n_ + k;
    }
    std::array<int, 3> unflat(std::size_t idx) const {
        const int k = static_cast<int>(idx % n_);
        const int j = static_cast<int>((idx / n_) % n_);
        const int i = static_cast<int>(idx / (static_cast<std::size_t>(n_) * n_));
        return {i, j, k};
    }
    std::array<int, 3> wavevector(std::size_t idx) const {
        const auto s = unflat(idx);
        return {wavenumber(s[0]), wavenumber(s[1]), wavenumber(s[2])};
    }
    Vec3 frequency(std::size_t idx) const {
        const auto k = wavevector(idx);
        const double f = fundamental();
        return {f * k[0], f * k[1], f * k[2]};
    }
    /// Storage index of the mode -k (the Hermitian partner).
    std::size_t partner(std::size_t idx) const {
        const auto s = unflat(idx);
        return flat((n_ - s[0]) % n_, (n_ - s[1]) % n_, (n_ - s[2]) % n_);
    }
    /// True when any axis sits on the Nyquist index n/2.
    bool is_nyquist(std::size_t idx) const {
        const auto s = unflat(idx);
        return s[0] == n_ / 2 || s[1] == n_ / 2 || s[2] == n_ / 2;
    }

    /// Dyadic bands whose whole annulus [2^{j-1}, 2^{j+1}] lies between the
    /// lattice spacing and the inscribed Nyquist ball.
    BandRange resolvable_bands() const;

    /// Physical coordinate of collocation point index along one axis.
    double coordinate(int index) const { return length_ * index / n_; }

    bool operator==(const TorusGrid& other) const { return n_ == other.n_ && length_ == other.length_; }

private:
    int n_;
    double length_;
};

}  // namespace nsc
