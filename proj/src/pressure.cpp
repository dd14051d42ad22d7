#include "nsc/pressure.hpp"

#include <array>
#include <cmath>

#include "nsc/errors.hpp"

namespace nsc {

namespace {

// 16-point Gauss-Legendre rule on [0, 1].
template <class F>
double gauss_legendre_unit(F&& f) {
    static constexpr std::array<double, 8> x = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                                                0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                                                0.9445750230732326, 0.9894009349916499};
    static constexpr std::array<double, 8> w = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                                                0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                                                0.0622535239386479, 0.0271524594117541};
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += w[i] * (f(0.5 - 0.5 * x[i]) + f(0.5 + 0.5 * x[i]));
    return 0.5 * acc;
}

// (1 + a)^e - 1 without cancellation.
double pow1pm1(double a, double e) { return std::expm1(e * std::log1p(a)); }

}  // namespace

PressureLaw PressureLaw::gamma_law(double gamma) {
    require(std::isfinite(gamma) && gamma > 1.0, "pressure: gamma must exceed 1");
    PressureLaw law;
    law.gamma_ = gamma;
    return law;
}

PressureLaw PressureLaw::custom(Fn p, Fn dp, Fn d2p) {
    require(p && dp && d2p, "pressure: P, P', P'' must all be provided");
    require(std::abs(dp(1.0) - 1.0) <= 1e-12, "pressure: P'(1) = 1 required");
    PressureLaw law;
    law.p_ = std::move(p);
    law.dp_ = std::move(dp);
    law.d2p_ = std::move(d2p);
    return law;
}

double PressureLaw::P(double rho) const { return is_gamma_law() ? std::pow(rho, gamma_) / gamma_ : p_(rho); }
double PressureLaw::dP(double rho) const { return is_gamma_law() ? std::pow(rho, gamma_ - 1.0) : dp_(rho); }
double PressureLaw::d2P(double rho) const {
    return is_gamma_law() ? (gamma_ - 1.0) * std::pow(rho, gamma_ - 2.0) : d2p_(rho);
}

double PressureLaw::K(double a) const {
    if (is_gamma_law()) return pow1pm1(a, gamma_ - 2.0);
    return dp_(1.0 + a) / (1.0 + a) - 1.0;
}

double PressureLaw::dK(double a) const {
    const double rho = 1.0 + a;
    return d2P(rho) / rho - dP(rho) / (rho * rho);
}

double PressureLaw::Q(double a) const {
    if (is_gamma_law()) {
        if (std::abs(a) < kQSeriesRadius) {
            // sum_{n=2}^{5} P^{(n)}(1) a^{n-2} / n!,  P^{(n)}(1) = prod_{m=1}^{n-1} (gamma - m)
            double deriv = 1.0, fact = 1.0, pw = 1.0, acc = 0.0;
            for (int n = 2; n <= 5; ++n) {
                deriv *= gamma_ - (n - 1);
                fact *= n;
                acc += deriv * pw / fact;
                pw *= a;
            }
            return acc;
        }
        return (pow1pm1(a, gamma_) / gamma_ - a) / (a * a);
    }
    const double p2 = d2p_(1.0);
    if (std::abs(a) < kQSeriesRadius) return 0.5 * p2 + (d2p_(1.0 + a) - p2) / 6.0;
    return (p_(1.0 + a) - p_(1.0) - a) / (a * a);
}

double PressureLaw::G(double a) const {
    if (is_gamma_law()) return pow1pm1(a, gamma_ - 1.0) / (gamma_ - 1.0) - a;
    // G(a) = a^2 int_0^1 (1 - t) K'(ta) dt since G(0) = G'(0) = 0.
    return a * a * gauss_legendre_unit([&](double t) { return (1.0 - t) * dK(t * a); });
}

double PressureLaw::H(double a) const {
    if (is_gamma_law()) {
        const double g2 = gamma_ - 2.0;  // G''(0) = K'(0)
        if (std::abs(a) < 1e-2) {
            // sum_{n>=3} K^{(n-1)}(0) a^{n-2} / n!,  K^{(m)}(0) = prod_{i<m} (gamma - 2 - i)
            double deriv = g2, fact = 2.0, pw = a, acc = 0.0;
            for (int n = 3; n <= 12; ++n) {
                deriv *= g2 - (n - 2);
                fact *= n;
                acc += deriv * pw / fact;
                pw *= a;
            }
            return acc;
        }
        return G(a) / (a * a) - 0.5 * g2;
    }
    const double k0 = dK(0.0);
    return gauss_legendre_unit([&](double t) { return (1.0 - t) * (dK(t * a) - k0); });
}

}  // namespace nsc
