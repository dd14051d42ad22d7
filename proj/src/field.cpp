#include "nsc/field.hpp"

#include <algorithm>
#include <cmath>

#include "nsc/errors.hpp"

namespace nsc {

SpectralField::SpectralField(TorusGrid grid, int components)
    : grid_(grid), components_(components), coeffs_(static_cast<std::size_t>(components) * grid.size()) {
    require(components >= 1, "field: at least one component required");
}

SpectralField SpectralField::slice(int first, int count) const {
    require(first >= 0 && count >= 1 && first + count <= components_, "field: component slice out of range");
    SpectralField out(grid_, count);
    std::copy_n(coeffs_.begin() + static_cast<std::ptrdiff_t>(offset(first)), out.coeffs_.size(), out.coeffs_.begin());
    return out;
}

void SpectralField::assign(int first, const SpectralField& src) {
    require(src.grid_ == grid_, "field: grid mismatch");
    require(first >= 0 && first + src.components_ <= components_, "field: component assignment out of range");
    std::copy(src.coeffs_.begin(), src.coeffs_.end(), coeffs_.begin() + static_cast<std::ptrdiff_t>(offset(first)));
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
    require(other.grid_ == grid_ && other.components_ == components_, "field: shape mismatch in +=");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
    require(other.grid_ == grid_ && other.components_ == components_, "field: shape mismatch in -=");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
    return *this;
}

SpectralField& SpectralField::operator*=(double factor) {
    for (auto& c : coeffs_) c *= factor;
    return *this;
}

double SpectralField::hermitian_defect() const {
    double worst = 0.0;
    for (int c = 0; c < components_; ++c) {
        const auto comp = component(c);
        for (std::size_t m = 0; m < modes(); ++m) {
            worst = std::max(worst, std::abs(comp[m] - std::conj(comp[grid_.partner(m)])));
        }
    }
    return worst;
}

void SpectralField::symmetrize() {
    for (int c = 0; c < components_; ++c) {
        auto comp = component(c);
        for (std::size_t m = 0; m < modes(); ++m) {
            const std::size_t p = grid_.partner(m);
            if (p < m) continue;
            const cplx avg = 0.5 * (comp[m] + std::conj(comp[p]));
            comp[m] = avg;
            comp[p] = std::conj(avg);
        }
    }
}

bool SpectralField::all_finite() const {
    return std::all_of(coeffs_.begin(), coeffs_.end(),
                       [](const cplx& c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); });
}

double SpectralField::max_abs() const {
    double m = 0.0;
    for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
    return m;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

double l2_norm(const SpectralField& f) {
    double s = 0.0;
    for (const auto& c : f.data()) s += std::norm(c);
    return std::sqrt(s);
}

}  // namespace nsc
