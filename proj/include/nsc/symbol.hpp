#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "nsc/field.hpp"
#include "nsc/params.hpp"

namespace nsc::linear {

using Mat4 = Eigen::Matrix<cplx, 4, 4>;
using Vec4 = Eigen::Matrix<cplx, 4, 1>;

/// Linearized symbol at one frequency: d/dt U = -A(xi) U with U = (a, u1, u2, u3).
struct ModeSymbol {
    Vec3 xi{};
    Mat4 matrix;
};

ModeSymbol symbol_matrix(const Vec3& xi, const FluidParams& params);

/// Coefficients c[0..4] of the monic quartic sum_k c[k] lambda^k, in closed form.
std::array<double, 5> characteristic_quartic(const Vec3& xi, const FluidParams& params);

/// Roots of a real polynomial (coefficients in increasing degree, leading
/// coefficient nonzero): companion eigensolve, Newton polishing in long
/// double, and clustered roots re-solved on the derivative.
std::vector<cplx> polynomial_roots(const std::vector<double>& coeffs);

/// Sort by real part, then imaginary part.
void sort_spectrum(std::array<cplx, 4>& values);

struct EigenReport {
    std::array<cplx, 4> values;        ///< eigensolve of A(xi), sorted
    std::array<cplx, 4> quartic_roots; ///< roots of the closed-form quartic, sorted
    double mismatch = 0.0;             ///< best-matching max |difference|
    bool agree = false;                ///< within 1e-8 absolute or 1e-6 relative
};

EigenReport eigen_report(const Vec3& xi, const FluidParams& params);
/// Eigenvalues of A(xi); throws NumericalError when the two routes disagree.
std::array<cplx, 4> eigenvalues(const Vec3& xi, const FluidParams& params);

/// Largest matching distance between two 4-point spectra over all pairings.
double spectrum_distance(const std::array<cplx, 4>& x, const std::array<cplx, 4>& y, bool relative);

/// exp(-t A(xi)) for any t >= 0.
///
/// The eigendecomposition is computed once; when the eigenvector matrix has
/// condition number above `kConditionLimit` every evaluation goes through a
/// scaling-and-squaring Pade exponential instead. xi = 0 is the exact
/// rotation about e3.
class ModePropagator {
public:
    static constexpr double kConditionLimit = 1e8;

    ModePropagator(const Vec3& xi, const FluidParams& params);

    Mat4 operator()(double t) const;
    /// exp(-tA) U without forming the matrix.
    Vec4 apply(double t, const Vec4& U) const;
    /// Spectral projector onto the eigenvectors whose eigenvalues have the
    /// `count` smallest |Im lambda| (the slowly oscillating modes).
    Mat4 slow_projector(int count) const;
    const Mat4& symbol() const { return a_; }
    bool uses_fallback() const { return fallback_; }
    double condition() const { return condition_; }
    /// Eigenvalues of A (unsorted, from the decomposition).
    const Eigen::Matrix<cplx, 4, 1>& eigenvalues() const { return lambda_; }
    /// min Re lambda.
    double min_real_part() const;
    /// log ||exp(-tA)||_2, accurate even when the norm underflows.
    double log_norm(double t) const;

private:
    Mat4 shifted(double t, double shift) const;

    Mat4 a_;
    bool zero_mode_ = false;
    double omega_ = 0.0;
    bool fallback_ = false;
    double condition_ = 1.0;
    Eigen::Matrix<cplx, 4, 1> lambda_;
    Mat4 v_, v_inv_;
};

Mat4 propagator(double t, const Vec3& xi, const FluidParams& params);

/// kappa = |xi|^4 / (Omega^2 eps^2 + |xi|^2).
double decay_rate_kappa(double xi_norm, double omega_eps);

/// Modified mode energy with delta = min(mu,1) / (16 beta^2).
double energy_V_squared(const Vec4& U, const Vec3& xi, const FluidParams& params, double beta);
double energy_V(const Vec4& U, const Vec3& xi, const FluidParams& params, double beta);

struct DecayReport {
    Vec3 xi{};
    double kappa = 0.0;
    double bound = 0.0;        ///< kappa / (48 beta^2)
    double weighted_bound = 0.0;  ///< min(mu,1) kappa / (48 beta^2)
    double abscissa = 0.0;     ///< max Re(-lambda)
    double fitted_rate = 0.0;  ///< least-squares decay exponent of ||Phi(t)|| on [T/2, T]
    double prefactor = 0.0;    ///< max_t ||Phi(t)|| exp(bound t)
    double horizon = 0.0;
    bool abscissa_ok = false;
    bool weighted_ok = false;  ///< abscissa <= -weighted_bound + 1e-12
    bool rate_ok = false;
};

/// Per-mode decay check. `horizon` <= 0 selects T = 10 / bound capped at 1e4.
/// Throws PreconditionError outside |xi| <= 2 beta / eps, |Omega| eps <= beta / eps,
/// and LemmaViolation when a nonzero mode fails to decay.
std::vector<DecayReport> verify_decay_bound(const FluidParams& params, double beta, const std::vector<Vec3>& modes,
                                            double horizon = 0.0);
DecayReport decay_report(const FluidParams& params, double beta, const Vec3& xi, double horizon = 0.0);

/// Write per-mode reports as CSV (xi1, xi2, xi3, kappa, abscissa, fitted_rate, prefactor).
void write_decay_csv(std::ostream& out, const std::vector<DecayReport>& reports);

/// Solution at time t of d/dt U = -A U + F(tau), U(0) = U0, by Gauss-Legendre
/// quadrature of the Duhamel integral on `panels` equal panels.
Vec4 duhamel_solution(double t, const Vec3& xi, const FluidParams& params, const Vec4& U0,
                      const std::function<Vec4(double)>& forcing, int panels = 64);

}  // namespace nsc::linear
