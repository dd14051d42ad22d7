#include <doctest.h>

#include <cmath>
#include <random>

#include "helpers.hpp"
#include "nsc/errors.hpp"
#include "nsc/symbol.hpp"
#include "oracles.hpp"

using namespace nsc;
using namespace nsc::linear;

namespace {

double rel(double x, double ref) { return std::abs(x - ref) / std::max(std::abs(ref), 1e-300); }

Vec4 random_state(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Vec4 U;
    for (int i = 0; i < 4; ++i) U(i) = cplx(g(rng), g(rng));
    return U;
}

}  // namespace

TEST_CASE("closed form quartic matches the characteristic polynomial") {
    std::mt19937_64 rng(11);
    double worst = 0.0;
    for (int trial = 0; trial < 300; ++trial) {
        const auto p = testing::random_params(rng);
        const auto xi = testing::random_xi(rng, 1e-2, 10.0);
        const auto c = characteristic_quartic(xi, p);
        const auto o = oracle::charpoly(oracle::symbol_long(xi, p));
        for (int k = 0; k < 5; ++k) {
            CHECK(std::abs(static_cast<double>(o[k].imag())) <= 1e-12 * std::abs(static_cast<double>(o[k].real())) + 1e-300);
            worst = std::max(worst, rel(c[k], static_cast<double>(o[k].real())));
        }
    }
    CHECK(worst < 1e-10);
}

TEST_CASE("without rotation the quartic factors") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 100; ++trial) {
        auto p = testing::random_params(rng);
        p.Omega = 0.0;
        const auto xi = testing::random_xi(rng, 1e-2, 10.0);
        const double x2 = norm(xi) * norm(xi), m = p.mu * x2, e2 = p.eps * p.eps;
        // (l - m)^2 (l^2 - x2 l + x2 / e2)
        const std::array<double, 5> want = {m * m * x2 / e2, -(2 * m * x2 / e2 + m * m * x2),
                                            m * m + 2 * m * x2 + x2 / e2, -(2 * m + x2), 1.0};
        const auto c = characteristic_quartic(xi, p);
        for (int k = 0; k < 5; ++k) CHECK(rel(c[k], want[k]) < 1e-12);
    }
}

TEST_CASE("polynomial roots are polished, including double roots") {
    // (x - 1)^2 (x - 2)(x + 3) = x^4 - x^3 - 7x^2 + 13x - 6
    const auto r = polynomial_roots({-6.0, 13.0, -7.0, -1.0, 1.0});
    REQUIRE(r.size() == 4);
    std::array<cplx, 4> got = {r[0], r[1], r[2], r[3]};
    const std::array<cplx, 4> want = {-3.0, 1.0, 1.0, 2.0};
    CHECK(spectrum_distance(got, want, false) < 1e-12);
}

TEST_CASE("eigensolve and quartic roots agree") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 200; ++trial) {
        const auto p = testing::random_params(rng);
        const auto xi = testing::random_xi(rng, 1e-2, 10.0);
        const auto rep = eigen_report(xi, p);
        CHECK(rep.agree);
        CHECK(rep.mismatch < 1e-8 * std::max(1.0, std::abs(rep.values[3])));
    }
}

TEST_CASE("propagator at xi = 0 is the rotation about e3") {
    const auto p = FluidParams::with_mu(0.25, 3.0, 0.1);
    const ModePropagator prop({0.0, 0.0, 0.0}, p);
    const double t = 0.7;
    const Mat4 P = prop(t);
    CHECK(std::abs(P(0, 0) - 1.0) < 1e-15);
    CHECK(std::abs(P(3, 3) - 1.0) < 1e-15);
    CHECK(std::abs(P(1, 1) - std::cos(3.0 * t)) < 1e-14);
    CHECK(std::abs(P(1, 2) - std::sin(3.0 * t)) < 1e-14);
    CHECK(std::abs(P(2, 1) + std::sin(3.0 * t)) < 1e-14);
}

TEST_CASE("propagator is a contraction semigroup solving the linear system") {
    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 100; ++trial) {
        const auto p = testing::random_params(rng);
        const auto xi = testing::random_xi(rng, 1e-2, 5.0);
        const ModePropagator prop(xi, p);
        const Mat4 s = prop(0.3), t = prop(0.5), st = prop(0.8);
        CHECK((s * t - st).norm() < 1e-10);
        for (double time : {0.1, 1.0, 10.0}) {
            Eigen::JacobiSVD<Mat4> svd(prop(time));
            CHECK(svd.singularValues()(0) <= 1.0 + 1e-10);
        }
        // d/dt Phi = -A Phi by central difference
        const double h = 1e-5;
        const Mat4 deriv = (prop(0.5 + h) - prop(0.5 - h)) / (2 * h);
        CHECK((deriv + prop.symbol() * t).norm() < 1e-5 * std::max(1.0, prop.symbol().norm()));
    }
}

TEST_CASE("Duhamel quadrature agrees with a stiff collocation solve") {
    const auto p = FluidParams::with_mu(0.2, 4.0, 0.3);
    const Vec3 xi{0.8, -0.4, 1.1};
    Vec4 U0;
    U0 << cplx(1.0, 0.2), cplx(0.0, -0.5), 0.3, cplx(0.1, 0.1);
    auto F = [](double s) {
        Vec4 f;
        f << std::sin(s), cplx(0.0, std::cos(2 * s)), 0.5, cplx(s, -s);
        return f;
    };
    const double T = 2.0;
    const Vec4 ours = duhamel_solution(T, xi, p, U0, F, 64);
    const Vec4 ref = oracle::gauss_collocation(symbol_matrix(xi, p).matrix, U0, F, T, 4000);
    CHECK((ours - ref).norm() < 1e-9 * ref.norm());
}

TEST_CASE("modified energy is comparable to the plain energy") {
    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 2000; ++trial) {
        auto p = testing::random_params(rng);
        const double beta = 1.0 + 3.0 * unit(rng);
        p.Omega = (2.0 * unit(rng) - 1.0) * beta / (p.eps * p.eps);
        const auto xi = testing::random_xi(rng, 0.0, 2.0 * beta / p.eps);
        const Vec4 U = random_state(rng);
        const double w = p.Omega * p.Omega * p.eps * p.eps + norm(xi) * norm(xi);
        const double v2 = energy_V_squared(U, xi, p, beta);
        CHECK(v2 >= 0.5 * w * U.squaredNorm() * (1 - 1e-14));
        CHECK(v2 <= 1.5 * w * U.squaredNorm() * (1 + 1e-14));
    }
    const auto p = FluidParams::with_mu(0.3, 2.0, 0.5);
    const Vec3 xi{0.5, 1.0, 0.0};
    Vec4 U = Vec4::Zero();
    CHECK(energy_V(U, xi, p, 1.0) == 0.0);
    U(0) = cplx(2.0, 1.0);
    CHECK(energy_V_squared(U, xi, p, 1.0) == doctest::Approx((1.0 + 1.25) * 5.0).epsilon(1e-15));
    CHECK_THROWS_AS(energy_V(U, {10.0, 0.0, 0.0}, p, 1.0), PreconditionError);
}

TEST_CASE("low frequency decay rate scales like |xi|^4 under rotation") {
    const auto p = FluidParams::with_mu(0.25, 2.0, 0.5);
    std::vector<double> lx, ly;
    for (double x : {0.01, 0.02, 0.05, 0.1}) {
        const auto rep = decay_report(p, 1.0, {x, 0.0, 0.0});
        CHECK(rep.abscissa_ok);
        CHECK(rep.rate_ok);
        lx.push_back(std::log(x));
        ly.push_back(std::log(rep.fitted_rate));
    }
    const double slope = (ly.back() - ly.front()) / (lx.back() - lx.front());
    CHECK(slope == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("decay check rejects modes outside its region") {
    const auto p = FluidParams::with_mu(0.25, 1.0, 0.5);
    CHECK_THROWS_AS(decay_report(p, 1.0, {0.0, 0.0, 0.0}), PreconditionError);
    CHECK_THROWS_AS(decay_report(p, 1.0, {5.0, 0.0, 0.0}), PreconditionError);
    CHECK_THROWS_AS(decay_report(p, 0.5, {1.0, 0.0, 0.0}), PreconditionError);
}
