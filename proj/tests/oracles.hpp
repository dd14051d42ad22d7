#pragma once

// Independent reference computations used only by the test suites.

#include <array>
#include <complex>
#include <algorithm>
#include <functional>

#include <Eigen/Dense>

#include "nsc/field.hpp"
#include "nsc/symbol.hpp"

namespace nsc::oracle {

using lcplx = std::complex<long double>;
using LMat4 = Eigen::Matrix<lcplx, 4, 4>;

/// The linearized symbol assembled entry by entry in long double, written
/// out from the mode equations d/dt a = -(i/eps) xi.u and
/// d/dt u = -mu|xi|^2 u - (mu+mu')xi(xi.u) - Omega e3 x u - (i/eps) xi a.
inline LMat4 symbol_long(const Vec3& xi, const FluidParams& p) {
    const long double x[3] = {xi[0], xi[1], xi[2]};
    const long double mu = p.mu, mp = p.mu_prime, W = p.Omega, e = p.eps;
    const long double x2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    LMat4 A = LMat4::Zero();
    for (int j = 0; j < 3; ++j) {
        A(0, 1 + j) = lcplx(0.0L, x[j] / e);
        A(1 + j, 0) = lcplx(0.0L, x[j] / e);
        for (int k = 0; k < 3; ++k) A(1 + j, 1 + k) = (mu + mp) * x[j] * x[k] + (j == k ? mu * x2 : 0.0L);
    }
    A(1, 2) -= W;
    A(2, 1) += W;
    return A;
}

/// Characteristic polynomial det(lambda I - A) by the Leibniz expansion with
/// polynomial entries, in long double. Coefficients in increasing degree.
inline std::array<lcplx, 5> charpoly(const LMat4& A) {
    std::array<lcplx, 5> c{};
    std::array<int, 4> perm = {0, 1, 2, 3};
    do {
        int inversions = 0;
        for (int i = 0; i < 4; ++i)
            for (int k = i + 1; k < 4; ++k) inversions += perm[i] > perm[k];
        // Product of entries (lambda delta_ij - A_ij), tracked as a polynomial in lambda.
        std::array<lcplx, 5> prod{};
        prod[0] = 1.0L;
        for (int i = 0; i < 4; ++i) {
            const lcplx a0 = -A(i, perm[i]);
            const lcplx a1 = i == perm[i] ? 1.0L : 0.0L;
            std::array<lcplx, 5> next{};
            for (int d = 0; d < 5; ++d) {
                next[d] += prod[d] * a0;
                if (d + 1 < 5) next[d + 1] += prod[d] * a1;
            }
            prod = next;
        }
        const long double sign = inversions % 2 == 0 ? 1.0L : -1.0L;
        for (int d = 0; d < 5; ++d) c[d] += sign * prod[d];
    } while (std::next_permutation(perm.begin(), perm.end()));
    return c;
}

/// Product of two scalar fields by direct convolution of their spectra,
/// restricted to the 2/3 retained set. O(N^2); use on tiny grids only.
inline SpectralField convolution_product(const SpectralField& f, const SpectralField& g) {
    const auto& grid = f.grid();
    const int n = grid.n();
    auto kept = [n](int k) { return 3 * std::abs(k) <= n; };
    SpectralField out(grid, 1);
    for (std::size_t p = 0; p < grid.size(); ++p) {
        const cplx fp = f.at(0, p);
        if (fp == cplx(0.0)) continue;
        const auto kp = grid.wavevector(p);
        for (std::size_t q = 0; q < grid.size(); ++q) {
            const cplx gq = g.at(0, q);
            if (gq == cplx(0.0)) continue;
            const auto kq = grid.wavevector(q);
            const int s0 = kp[0] + kq[0], s1 = kp[1] + kq[1], s2 = kp[2] + kq[2];
            if (!kept(s0) || !kept(s1) || !kept(s2)) continue;
            out.at(0, grid.flat(grid.storage_index(s0), grid.storage_index(s1), grid.storage_index(s2))) += fp * gq;
        }
    }
    return out;
}

/// Adaptive Simpson quadrature on [a, b].
inline double simpson(const std::function<double(double)>& f, double a, double b, double tol = 1e-14,
                      int depth = 40) {
    std::function<double(double, double, double, double, double, double, int)> rec =
        [&](double lo, double hi, double flo, double fmid, double fhi, double whole, int d) {
            const double mid = 0.5 * (lo + hi);
            const double lm = 0.5 * (lo + mid), rm = 0.5 * (mid + hi);
            const double flm = f(lm), frm = f(rm);
            const double left = (mid - lo) / 6.0 * (flo + 4.0 * flm + fmid);
            const double right = (hi - mid) / 6.0 * (fmid + 4.0 * frm + fhi);
            if (d <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
                return left + right + (left + right - whole) / 15.0;
            return rec(lo, mid, flo, flm, fmid, left, d - 1) + rec(mid, hi, fmid, frm, fhi, right, d - 1);
        };
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    return rec(a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), depth);
}

/// Stiff reference for d/dt U = -A U + F(t): two-stage Gauss collocation
/// (order 4, A-stable) with fixed steps.
inline linear::Vec4 gauss_collocation(const linear::Mat4& A, const linear::Vec4& U0,
                                      const std::function<linear::Vec4(double)>& F, double T, int steps) {
    using linear::Mat4;
    using linear::Vec4;
    const double h = T / steps;
    const double r3 = std::sqrt(3.0);
    const double c1 = 0.5 - r3 / 6.0, c2 = 0.5 + r3 / 6.0;
    const double a11 = 0.25, a12 = 0.25 - r3 / 6.0, a21 = 0.25 + r3 / 6.0, a22 = 0.25;
    // Stage system K = -A (U + h a K) + F: an 8x8 linear solve per step.
    Eigen::Matrix<cplx, 8, 8> S = Eigen::Matrix<cplx, 8, 8>::Identity();
    S.block<4, 4>(0, 0) += h * a11 * A;
    S.block<4, 4>(0, 4) += h * a12 * A;
    S.block<4, 4>(4, 0) += h * a21 * A;
    S.block<4, 4>(4, 4) += h * a22 * A;
    const auto lu = S.partialPivLu();
    Vec4 U = U0;
    for (int n = 0; n < steps; ++n) {
        const double t = n * h;
        Eigen::Matrix<cplx, 8, 1> rhs;
        rhs.head<4>() = -A * U + F(t + c1 * h);
        rhs.tail<4>() = -A * U + F(t + c2 * h);
        const Eigen::Matrix<cplx, 8, 1> K = lu.solve(rhs);
        U += 0.5 * h * (K.head<4>() + K.tail<4>());
    }
    return U;
}

}  // namespace nsc::oracle
