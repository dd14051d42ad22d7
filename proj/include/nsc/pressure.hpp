#pragma once

#include <functional>

namespace nsc {

/// Barotropic pressure law P(rho) normalized so that P'(1) = 1.
///
/// Besides P itself this provides the nonlinear coefficient functions of the
/// perturbation system (a is the density perturbation rho - 1):
///   J(a) = a / (1 + a)
///   K(a) = P'(1 + a) / (1 + a) - 1
///   Q(a) = (P(1 + a) - P(1) - a) / a^2,        Q(0) = P''(1) / 2
///   G(a) = int_0^a K(s) ds
///   H(a) = G(a) / a^2 - G''(0) / 2
class PressureLaw {
public:
    using Fn = std::function<double(double)>;

    /// P(rho) = rho^gamma / gamma, gamma > 1.
    static PressureLaw gamma_law(double gamma);
    /// User supplied P, P', P''. Requires P'(1) = 1 to 1e-12.
    static PressureLaw custom(Fn p, Fn dp, Fn d2p);

    bool is_gamma_law() const { return gamma_ > 0.0; }
    /// Adiabatic exponent, or 0 for a custom law.
    double gamma() const { return gamma_; }

    double P(double rho) const;
    double dP(double rho) const;
    double d2P(double rho) const;

    double J(double a) const { return a / (1.0 + a); }
    double K(double a) const;
    double Q(double a) const;
    double G(double a) const;
    double H(double a) const;

    /// |a| below which Q switches to its Taylor series.
    static constexpr double kQSeriesRadius = 1e-4;

private:
    PressureLaw() = default;
    double dK(double a) const;

    double gamma_ = 0.0;
    Fn p_, dp_, d2p_;
};

}  // namespace nsc
