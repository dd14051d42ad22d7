#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "nsc/errors.hpp"
#include "nsc/estimates.hpp"
#include "nsc/harness.hpp"

using namespace nsc;
using namespace nsc::est;

namespace {

const TorusGrid& grid16() {
    static const TorusGrid g(16, 2 * std::numbers::pi);
    return g;
}

// Constant-in-time series of a fixed 4-component field on [0, T].
lp::TimeSeries constant_series(const SpectralField& f, double T, int samples) {
    lp::TimeSeries s;
    for (int k = 0; k < samples; ++k) {
        s.times.push_back(T * k / (samples - 1));
        s.snapshots.push_back(f);
    }
    return s;
}

SpectralField random_state(unsigned seed, double scale = 0.1) {
    const auto a = testing::random_field(grid16(), 1, 1.0, 5.0, seed);
    const auto u = testing::random_field(grid16(), 3, 1.0, 5.0, seed + 7);
    SpectralField f(grid16(), 4);
    f.assign(0, a);
    f.assign(1, u);
    f *= scale;
    return f;
}

lp::TimeSeries linear_run(unsigned seed, const FluidParams& p, double T = 1.0) {
    sim::StepperConfig cfg;
    cfg.dt = 0.02;
    cfg.nonlinear = false;
    cfg.snapshot_every = 5;
    const auto f = random_state(seed);
    return sim::simulate(sim::State::unpack(f, sim::Formulation::Velocity, 0.0), p, cfg, T).series;
}

}  // namespace

TEST_CASE("norm suite validation names the violated constraint") {
    const auto p = FluidParams::with_mu(0.25, 5.0, 0.1);
    NormSuiteSpec spec;
    CHECK_NOTHROW(spec.validate(p));
    spec.q = 2.0;
    CHECK_THROWS_WITH_AS(spec.validate(p), doctest::Contains("2 < q"), PreconditionError);
    spec.q = 2.5;
    spec.r = 4.0;  // 1/q + 1/r = 0.65
    CHECK_THROWS_WITH_AS(spec.validate(p), doctest::Contains("1/q + 1/r"), PreconditionError);
    spec.r = 10.0;
    spec.alpha = 20.0;
    CHECK_THROWS_WITH_AS(spec.validate(p), doctest::Contains("alpha < beta0"), PreconditionError);
    spec.alpha = 0.2;
    CHECK_THROWS_WITH_AS(spec.validate(p), doctest::Contains("alpha > |Omega| eps"), PreconditionError);
}

TEST_CASE("energy and auxiliary norms vanish on zero data and are homogeneous") {
    const auto p = FluidParams::with_mu(0.25, 5.0, 0.1);
    const auto part = lp::make_partition(grid16());
    NormSuiteSpec spec;
    spec.alpha = 2.0;
    const auto zero = constant_series(SpectralField(grid16(), 4), 1.0, 4);
    CHECK(compute_E(zero, p, spec, part).total == 0.0);
    CHECK(compute_A(zero, p, spec, part).total == 0.0);

    const auto run = linear_run(3, p);
    auto scaled = run;
    for (auto& s : scaled.snapshots) s *= 2.5;
    const auto E1 = compute_E(run, p, spec, part), E2 = compute_E(scaled, p, spec, part);
    const auto A1 = compute_A(run, p, spec, part), A2 = compute_A(scaled, p, spec, part);
    CHECK(E1.total > 0.0);
    CHECK(A1.total > 0.0);
    CHECK(std::abs(E2.total - 2.5 * E1.total) <= 1e-10 * E2.total);
    CHECK(std::abs(A2.total - 2.5 * A1.total) <= 1e-10 * A2.total);
    CHECK(E1.summands.size() == 11);
    CHECK(A1.summands.size() == 9);
}

TEST_CASE("constant series reduce to static norms times t^{1/r}") {
    const auto p = FluidParams::with_mu(0.25, 5.0, 0.1);
    const auto part = lp::make_partition(grid16());
    NormSuiteSpec spec;
    spec.alpha = 2.0;
    const double T = 3.0;
    const auto f = random_state(11);
    const auto rep = compute_E(constant_series(f, T, 9), p, spec, part);
    const lp::Components pair{0, 4}, a{0, 1}, u{1, 3};
    const double lo = 0.5, hi = 10.0;
    auto B = [&](double s, double sigma, lp::Truncation tr, lp::Components c) {
        return lp::besov_norm(f, {2.0, sigma, s, tr}, part, c);
    };
    const auto mid = lp::Truncation::mid(lo, hi), high = lp::Truncation::high(hi);
    CHECK(rep.get("(a,u) L~inf B^-1/2_2,1 l;b0/eps") == doctest::Approx(B(-0.5, 1, lp::Truncation::low(hi), pair)).epsilon(1e-3));
    CHECK(rep.get("u L~2 B^1/2_2,1 l;b0/eps") == doctest::Approx(std::sqrt(T) * B(0.5, 1, lp::Truncation::low(hi), u)).epsilon(1e-3));
    CHECK(rep.get("(a,u) L1 B^5/2_2,1 m;|W|eps,b0/eps") == doctest::Approx(T * B(2.5, 1, mid, pair)).epsilon(1e-3));
    CHECK(rep.get("a L~2 B^1/2_2,1 m;|W|eps,b0/eps") == doctest::Approx(std::sqrt(T) * B(0.5, 1, mid, a)).epsilon(1e-3));
    CHECK(rep.get("u L~inf B^1/2_2,1 h;b0/eps") == doctest::Approx(B(0.5, 1, high, u)).epsilon(1e-3));

    // The band below |Omega| eps is empty on this box.
    for (const auto& s : rep.summands)
        if (s.name.find("l;|W|eps") != std::string::npos) CHECK(s.empty);
}

TEST_CASE("data functionals are ordered and reduce as eps vanishes") {
    const auto part = lp::make_partition(grid16());
    for (unsigned seed = 1; seed <= 10; ++seed) {
        const auto f = random_state(seed, 0.05 * seed);
        const auto s = sim::State::unpack(f, sim::Formulation::Velocity, 0.0);
        const auto p = FluidParams::with_mu(0.25, 1.0, 0.3);
        const auto d = compute_data_functionals(s, p, part);
        CHECK(d.d_star <= d.d_eps);
        CHECK(d.b_half <= d.d_eps);
        const auto tiny = compute_data_functionals(s, FluidParams::with_mu(0.25, 1.0, 1e-12), part);
        CHECK(tiny.d_star == doctest::Approx(lp::besov_norm(f, {2.0, lp::kInf, -1.5, {}}, part)).epsilon(1e-10));
    }
    const auto zero = compute_data_functionals(sim::State(grid16()), FluidParams{}, part);
    CHECK(zero.d == 0.0);
    CHECK(zero.d_eps == 0.0);
}

TEST_CASE("alpha_delta is the first threshold meeting the tail bound") {
    const auto part = lp::make_partition(grid16());
    const auto s = sim::State::unpack(random_state(5), sim::Formulation::Velocity, 0.0);
    for (double delta : {1e-3, 1e-2, 1e-1}) {
        const double a = alpha_delta(s, part, delta);
        CHECK(a >= 1.0);
        CHECK(data_tail(s, part, a) <= delta);
        if (a > 1.0) CHECK(data_tail(s, part, a / 2) > delta);
    }
}

TEST_CASE("time ladder is geometric and ends at the last snapshot") {
    std::vector<double> times;
    for (int k = 0; k <= 1000; ++k) times.push_back(0.01 * k);
    const auto idx = time_ladder(times);
    CHECK(idx.back() == 1000);
    CHECK(idx.front() >= 1);
    // Three decades at 8 per decade, less the rungs that collapse onto the same early snapshot.
    CHECK(idx.size() >= 20);
    CHECK(idx.size() <= 25);
    for (std::size_t k = 1; k < idx.size(); ++k) CHECK(idx[k] > idx[k - 1]);
}

TEST_CASE("AE ratios are finite, amplitude invariant and skip zero runs") {
    const auto p = FluidParams::with_mu(0.25, 5.0, 0.1);
    const auto part = lp::make_partition(grid16());
    NormSuiteSpec spec;
    spec.alpha = 2.0;
    std::vector<lp::TimeSeries> runs = {linear_run(1, p), linear_run(2, p),
                                        constant_series(SpectralField(grid16(), 4), 1.0, 3)};
    const auto stats = lemma_AE_check(runs, p, spec, part);
    REQUIRE(stats.size() == 4);
    for (const auto& s : stats) {
        CHECK(std::isfinite(s.max_ratio));
        CHECK(s.max_ratio > 0.0);
        CHECK(s.skipped > 0);
        CHECK(s.scaling_deviation < 1e-10);
    }
}

TEST_CASE("a priori diagnostic on a zero run is trivially satisfied") {
    const auto p = FluidParams::with_mu(0.25, 5.0, 0.1);
    const auto part = lp::make_partition(grid16());
    NormSuiteSpec spec;
    spec.alpha = 2.0;
    sim::StepperConfig cfg;
    cfg.dt = 0.05;
    const sim::State zero(grid16());
    const auto run = sim::simulate(zero, p, cfg, 1.0);
    const auto rep = apriori_diagnostic(run, zero, p, spec, part);
    REQUIRE(rep.inequalities.size() == 6);
    for (const auto& ineq : rep.inequalities) {
        CHECK(ineq.all_hold);
        for (const auto& row : ineq.rows) CHECK(row.lhs == 0.0);
    }
}

TEST_CASE("product and composition harnesses") {
    lp::SampleSpec ss;
    ss.samples = 8;
    const auto a1 = lp::product_estimate_A1(grid16(), {}, ss);
    CHECK(a1.samples == 8);
    CHECK(std::isfinite(a1.max_ratio));
    CHECK(a1.scaling_deviation < 1e-10);

    lp::CompositionSpec id;
    id.F = [](double x) { return x; };
    const auto c = lp::composition_estimate(grid16(), id, ss);
    CHECK(c.max_ratio == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(c.mean_ratio == doctest::Approx(1.0).epsilon(1e-12));

    lp::SampleSpec empty = ss;
    empty.kmin = 100.0;
    empty.kmax = 100.0;
    CHECK(lp::product_estimate_A1(grid16(), {}, empty).skipped == 8);

    lp::ProductSpecA1 bad;
    bad.s1 = 2.0;
    CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("s1 <= 3/p1"), PreconditionError);
    lp::ProductSpecA2 bad2;
    bad2.q = 5.0;
    CHECK_THROWS_WITH_AS(bad2.validate(), doctest::Contains("2 <= q <= 4"), PreconditionError);
    lp::CompositionSpec shifted;
    shifted.F = [](double x) { return x + 1.0; };
    CHECK_THROWS_AS(shifted.validate(), PreconditionError);
}

TEST_CASE("continuation probe keeps tiny data stable everywhere") {
    const auto part = lp::make_partition(grid16());
    const auto s = sim::State::unpack(random_state(9, 1e-3), sim::Formulation::Velocity, 0.0);
    NormSuiteSpec spec;
    spec.theorem_regime = true;
    ProbeConfig cfg;
    cfg.horizon = 0.5;
    cfg.stepper.dt = 0.05;
    cfg.stepper.snapshot_every = 2;
    const auto cells = continuation_probe(s, FluidParams{}, {{0.0, 0.5}, {2.0, 0.5}, {5.0, 0.1}}, spec, cfg, part);
    REQUIRE(cells.size() == 3);
    for (const auto& c : cells) {
        CHECK(c.stable);
        CHECK(c.bounded);
        CHECK(c.regime);
        CHECK(c.E_peak > 0.0);
    }
}
