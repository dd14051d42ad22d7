#include <doctest.h>

#include <cmath>

#include "nsc/errors.hpp"
#include "nsc/pressure.hpp"
#include "oracles.hpp"

using namespace nsc;

namespace {

PressureLaw gamma_as_custom(double g) {
    return PressureLaw::custom([g](double r) { return std::pow(r, g) / g; },
                               [g](double r) { return std::pow(r, g - 1.0); },
                               [g](double r) { return (g - 1.0) * std::pow(r, g - 2.0); });
}

}  // namespace

TEST_CASE("gamma law coefficient functions against direct formulas") {
    for (double g : {1.4, 2.0, 3.0}) {
        const auto law = PressureLaw::gamma_law(g);
        CHECK(law.dP(1.0) == doctest::Approx(1.0));
        for (double a : {-0.5, -0.1, 0.05, 0.3, 1.2}) {
            CHECK(law.K(a) == doctest::Approx(std::pow(1.0 + a, g - 2.0) - 1.0).epsilon(1e-13));
            const double q = (std::pow(1.0 + a, g) / g - 1.0 / g - a) / (a * a);
            CHECK(law.Q(a) == doctest::Approx(q).epsilon(1e-11));
            const double G = oracle::simpson([&](double s) { return law.K(s); }, 0.0, a);
            CHECK(law.G(a) == doctest::Approx(G).epsilon(1e-11));
            CHECK(law.H(a) == doctest::Approx(G / (a * a) - 0.5 * (g - 2.0)).epsilon(1e-9));
        }
    }
}

TEST_CASE("series branches join the closed forms continuously") {
    const auto law = PressureLaw::gamma_law(1.4);
    const double r = PressureLaw::kQSeriesRadius;
    CHECK(law.Q(r * (1 - 1e-9)) == doctest::Approx(law.Q(r * (1 + 1e-9))).epsilon(1e-12));
    CHECK(law.Q(0.0) == doctest::Approx(0.5 * law.d2P(1.0)).epsilon(1e-15));
    CHECK(law.H(1e-2 * (1 - 1e-9)) == doctest::Approx(law.H(1e-2 * (1 + 1e-9))).epsilon(1e-10));
    CHECK(law.G(0.0) == 0.0);
    CHECK(std::abs(law.H(0.0)) < 1e-15);
}

TEST_CASE("custom law reproduces the gamma law") {
    const auto ref = PressureLaw::gamma_law(1.7);
    const auto law = gamma_as_custom(1.7);
    CHECK_FALSE(law.is_gamma_law());
    for (double a : {-0.4, -1e-3, 1e-5, 0.02, 0.6}) {
        CHECK(law.K(a) == doctest::Approx(ref.K(a)).epsilon(1e-13));
        CHECK(law.Q(a) == doctest::Approx(ref.Q(a)).epsilon(1e-8));
        CHECK(law.G(a) == doctest::Approx(ref.G(a)).epsilon(1e-12));
        CHECK(law.H(a) == doctest::Approx(ref.H(a)).epsilon(1e-8));
    }
}

TEST_CASE("pressure laws reject bad normalizations") {
    CHECK_THROWS_AS(PressureLaw::gamma_law(1.0), PreconditionError);
    CHECK_THROWS_AS(PressureLaw::custom([](double r) { return r * r; }, [](double r) { return 2 * r; },
                                        [](double) { return 2.0; }),
                    PreconditionError);
}
