#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "nsc/errors.hpp"
#include "nsc/fft.hpp"
#include "nsc/sim.hpp"
#include "oracles.hpp"

using namespace nsc;
using namespace nsc::sim;

namespace {

SpectralField component(const SpectralField& f, int c) { return f.slice(c, 1); }

SpectralField deriv(const SpectralField& f, int axis) {
    SpectralField out(f.grid(), 1);
    for (std::size_t m = 0; m < f.grid().size(); ++m) out.at(0, m) = cplx(0.0, f.grid().frequency(m)[axis]) * f.at(0, m);
    return out;
}

SpectralField conv(const SpectralField& f, const SpectralField& g) { return oracle::convolution_product(f, g); }

// mu Lap v + (mu + mu') grad div v, componentwise
std::array<SpectralField, 3> lame(const std::array<SpectralField, 3>& v, const FluidParams& p) {
    const auto& grid = v[0].grid();
    std::array<SpectralField, 3> out = {SpectralField(grid, 1), SpectralField(grid, 1), SpectralField(grid, 1)};
    for (std::size_t m = 0; m < grid.size(); ++m) {
        const auto xi = grid.frequency(m);
        const double x2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
        const cplx dot = xi[0] * v[0].at(0, m) + xi[1] * v[1].at(0, m) + xi[2] * v[2].at(0, m);
        for (int i = 0; i < 3; ++i) out[i].at(0, m) = -p.mu * x2 * v[i].at(0, m) - (p.mu + p.mu_prime) * xi[i] * dot;
    }
    return out;
}

double rel_diff(const SpectralField& x, const SpectralField& y) { return l2_norm(x - y) / l2_norm(y); }

State small_state(const TorusGrid& grid, double scale, unsigned seed) {
    const auto a = testing::random_field(grid, 1, 1.0, 2.0, seed);
    const auto u = testing::random_field(grid, 3, 1.0, 2.0, seed + 1);
    return State(scale * a, scale * u);
}

}  // namespace

TEST_CASE("pseudospectral product equals the truncated convolution") {
    const TorusGrid grid(8, 2 * std::numbers::pi);
    const auto f = dealias(testing::random_field(grid, 1, 0.0, 4.0, 21));
    const auto g = dealias(testing::random_field(grid, 1, 0.0, 4.0, 22));
    const auto ours = dealiased_product(f, g);
    const auto ref = conv(f, g);
    CHECK(l2_norm(ours - ref) <= 1e-12 * l2_norm(ref));
}

TEST_CASE("quadratic parts of both nonlinearities match a convolution oracle") {
    // gamma = 1.4: K(eps a) / eps ~ (gamma - 2) a and Q(0) = (gamma - 1) / 2
    const TorusGrid grid(8, 2 * std::numbers::pi);
    const auto p = FluidParams::with_mu(0.3, 2.0, 0.7);
    const double g = 1.4, d = 1e-5;
    const auto s = small_state(grid, 1.0, 5);
    const SpectralField a = s.a;
    const std::array<SpectralField, 3> u = {component(s.vel, 0), component(s.vel, 1), component(s.vel, 2)};

    SpectralField ra(grid, 1);
    std::array<SpectralField, 3> ru = {SpectralField(grid, 1), SpectralField(grid, 1), SpectralField(grid, 1)};
    std::array<SpectralField, 3> rm = ru;
    const auto lu = lame(u, p);
    std::array<SpectralField, 3> au = {conv(a, u[0]), conv(a, u[1]), conv(a, u[2])};
    const auto lau = lame(au, p);
    const auto a2 = conv(a, a);
    for (int j = 0; j < 3; ++j) ra -= deriv(au[j], j);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            ru[i] -= conv(u[j], deriv(u[i], j));
            rm[i] -= deriv(conv(u[i], u[j]), j);
        }
        ru[i] -= p.eps * conv(a, lu[i]) + (g - 2.0) * conv(a, deriv(a, i));
        rm[i] -= p.eps * lau[i] + 0.5 * (g - 1.0) * deriv(a2, i);
    }

    const State sv(d * s.a, d * s.vel);
    const auto nv = nonlinearity_velocity(sv, p);
    CHECK(rel_diff((1.0 / (d * d)) * nv.a, ra) < 1e-4);
    for (int i = 0; i < 3; ++i) CHECK(rel_diff((1.0 / (d * d)) * component(nv.vel, i), ru[i]) < 1e-4);

    const State sm(d * s.a, d * s.vel, Formulation::Momentum);
    const auto nm = nonlinearity_momentum(sm, p);
    CHECK(nm.a.max_abs() == 0.0);
    for (int i = 0; i < 3; ++i) CHECK(rel_diff((1.0 / (d * d)) * component(nm.vel, i), rm[i]) < 1e-4);
}

TEST_CASE("formulation conversion round trips") {
    const TorusGrid grid(16, 2 * std::numbers::pi);
    const auto p = FluidParams::with_mu(0.25, 1.0, 0.5);
    const auto s = small_state(grid, 0.05, 9);
    const auto m = convert(s, p, Formulation::Momentum);
    CHECK(m.formulation == Formulation::Momentum);
    const auto back = convert(m, p, Formulation::Velocity);
    CHECK(rel_diff(back.vel, s.vel) < 1e-3);
    CHECK(l2_norm(back.a - s.a) == 0.0);
}

TEST_CASE("linear-only stepping reproduces the exact flow") {
    const TorusGrid grid(16, 2 * std::numbers::pi);
    const auto p = FluidParams::with_mu(0.25, 2.0, 0.5);
    const auto s = small_state(grid, 0.1, 3);
    StepperConfig cfg;
    cfg.dt = 0.05;
    cfg.nonlinear = false;
    cfg.snapshot_every = 100;
    const auto run = simulate(s, p, cfg, 1.0);
    CHECK(run.report.stable);
    CHECK(run.report.steps == 20);
    const Stepper st(grid, p, cfg);
    CHECK(rel_diff(run.final_state.packed(), st.apply_linear(s.packed(), 1.0)) < 1e-12);
}

TEST_CASE("nonlinear runs keep the mean density and real symmetry") {
    const TorusGrid grid(16, 2 * std::numbers::pi);
    const auto p = FluidParams::with_mu(0.25, 1.0, 0.5);
    for (auto f : {Formulation::Velocity, Formulation::Momentum}) {
        auto s = convert(small_state(grid, 0.02, 4), p, f);
        StepperConfig cfg;
        cfg.dt = 0.02;
        cfg.snapshot_every = 10;
        const auto run = simulate(s, p, cfg, 0.4);
        INFO(run.report.failure);
        REQUIRE(run.report.stable);
        CHECK(run.report.max_mean_drift <= 1e-15);
        CHECK(run.report.max_hermitian_defect <= 1e-14);
        CHECK(run.series.times.size() == 3);
        CHECK(run.series.snapshots.front().components() == 4);
    }
}

TEST_CASE("loss of positivity is reported as an instability") {
    const TorusGrid grid(16, 2 * std::numbers::pi);
    const auto p = FluidParams::with_mu(0.25, 0.0, 1.0);
    InitialDataSpec spec;
    spec.recipe = Recipe::SingleMode;
    spec.amplitude = 0.9;
    auto data = make_initial_data(spec, grid, p);
    StepperConfig cfg;
    cfg.positivity_floor = 0.5;
    const auto run = simulate(data.state, p, cfg, 0.1);
    CHECK_FALSE(run.report.stable);
    CHECK(run.report.failure_time == 0.0);
    CHECK_THROWS_AS(make_initial_data(spec, grid, p, 0.5), PreconditionError);
}

TEST_CASE("initial data recipes are real, mean free and normalized") {
    const TorusGrid grid(16, 2 * std::numbers::pi);
    const auto p = FluidParams::with_mu(0.25, 1.0, 0.1);
    InitialDataSpec spec;
    spec.recipe = Recipe::LargeData;
    spec.amplitude = 5.0;
    spec.a_fraction = 0.2;
    spec.seed = 17;
    const auto data = make_initial_data(spec, grid, p);
    const auto& norms = data.norms;
    auto lookup = [&](const std::string& key) {
        for (const auto& [k, v] : norms)
            if (k == key) return v;
        FAIL("missing norm " << key);
        return 0.0;
    };
    CHECK(lookup("u0_B^{1/2}_{2,1}") == doctest::Approx(5.0).epsilon(1e-12));
    CHECK(lookup("a0_B^{1/2}_{2,1}") == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(data.state.a.at(0, 0) == cplx(0.0));
    CHECK(data.state.vel.hermitian_defect() == 0.0);
    CHECK(alias_content(data.state.vel) == 0.0);

    spec.recipe = Recipe::GaussianBump;
    spec.amplitude = 0.2;
    spec.solenoidal = true;
    spec.width = 0.6;
    const auto bump = make_initial_data(spec, grid, p);
    CHECK(lp::lp_norm(bump.state.vel, lp::kInf) == doctest::Approx(0.2).epsilon(1e-12));
    CHECK(divergence(bump.state.vel).max_abs() < 1e-14);
}

TEST_CASE("stepper configuration is validated") {
    StepperConfig cfg;
    cfg.order = 3;
    CHECK_THROWS_AS(cfg.validate(), PreconditionError);
    cfg.order = 2;
    cfg.dt = -1.0;
    CHECK_THROWS_AS(cfg.validate(), PreconditionError);
    CHECK(formulation_from_string(to_string(Formulation::Momentum)) == Formulation::Momentum);
    CHECK(recipe_from_string("large-data") == Recipe::LargeData);
    CHECK_THROWS_AS(recipe_from_string("bogus"), PreconditionError);
}
