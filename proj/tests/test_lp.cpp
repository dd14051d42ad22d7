#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "nsc/errors.hpp"
#include "nsc/fft.hpp"
#include "nsc/littlewood_paley.hpp"
#include "nsc/spectral_ops.hpp"

using namespace nsc;
using namespace nsc::lp;

namespace {

SpectralField cosine_mode(const TorusGrid& grid, int k1) {
    SpectralField f(grid, 1);
    f.at(0, grid.flat(grid.storage_index(k1), 0, 0)) = 0.5;
    f.at(0, grid.flat(grid.storage_index(-k1), 0, 0)) = 0.5;
    return f;
}

double max_diff(const SpectralField& a, const SpectralField& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
    return worst;
}

}  // namespace

TEST_CASE("partition sums to one on every nonzero mode") {
    const TorusGrid grid(32, 2 * std::numbers::pi);
    const auto part = make_partition(grid);
    std::vector<double> sum(grid.size(), 0.0);
    for (int j = part.bands().lo; j <= part.bands().hi; ++j)
        for (const auto& e : part.band(j)) sum[e.mode] += e.weight;
    CHECK(sum[0] == 0.0);
    double worst = 0.0;
    for (std::size_t m = 1; m < grid.size(); ++m) worst = std::max(worst, std::abs(sum[m] - 1.0));
    CHECK(worst < 1e-12);
}

TEST_CASE("dyadic radius belongs to a single band") {
    const TorusGrid grid(32, 2 * std::numbers::pi);
    const auto part = make_partition(grid);
    CHECK(part.weight(2, 4.0) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(part.weight(1, 4.0) == 0.0);
    CHECK(part.weight(3, 4.0) == 0.0);
    CHECK(part.profile(0.0) == 0.0);
}

TEST_CASE("single cosine mode has the closed form Besov norm") {
    const TorusGrid grid(32, 2 * std::numbers::pi);
    const auto part = make_partition(grid);
    const auto f = cosine_mode(grid, 8);
    CHECK(besov_norm(f, {2.0, 1.0, 0.5, {}}, part) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(besov_norm(f, {2.0, 1.0, 0.5, Truncation::low(4.0)}, part) == 0.0);
    CHECK(lp_norm(f, kInf) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(lp_norm(f, kInf, {}, true) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("blocks are almost orthogonal and reconstruct the field") {
    const TorusGrid grid(32, 2 * std::numbers::pi);
    const auto part = make_partition(grid);
    const auto f = testing::random_field(grid, 1, 1.0, 15.0, 7);
    SpectralField sum(grid, 1);
    for (int j = part.bands().lo; j <= part.bands().hi; ++j) {
        const auto dj = project_band(f, j, part);
        sum += dj;
        for (int k = part.bands().lo; k <= part.bands().hi; ++k) {
            if (std::abs(j - k) < 2) continue;
            CHECK(project_band(dj, k, part).max_abs() == 0.0);
        }
    }
    CHECK(max_diff(sum, f) < 1e-12 * f.max_abs());
}

TEST_CASE("truncations split a sigma = 1 norm exactly") {
    const TorusGrid grid(32, 2 * std::numbers::pi);
    const auto part = make_partition(grid);
    const auto f = testing::random_field(grid, 3, 1.0, 15.0, 11);
    const double full = besov_norm(f, {4.0, 1.0, 0.5, {}}, part);
    const double pieces = besov_norm(f, {4.0, 1.0, 0.5, Truncation::low(2.0)}, part) +
                          besov_norm(f, {4.0, 1.0, 0.5, Truncation::mid(2.0, 8.0)}, part) +
                          besov_norm(f, {4.0, 1.0, 0.5, Truncation::high(8.0)}, part);
    CHECK(pieces == doctest::Approx(full).epsilon(1e-14));
    CHECK(besov_norm(f, {4.0, kInf, 0.5, {}}, part) <= full);
}

TEST_CASE("Bernstein bound on each block") {
    const TorusGrid grid(16, 2 * std::numbers::pi);
    const auto part = make_partition(grid);
    const auto f = testing::random_field(grid, 1, 1.0, 7.0, 3);
    for (double p : {2.0, 4.0, kInf}) {
        for (int j = part.bands().lo; j <= part.bands().hi; ++j) {
            const auto dj = project_band(f, j, part);
            const double base = lp_norm(dj, p);
            if (base == 0.0) continue;
            CHECK(lp_norm(gradient(dj), p) <= std::ldexp(2.0, j) * base);
        }
    }
}

TEST_CASE("Chemin-Lerner norms of a constant series") {
    const TorusGrid grid(16, 2 * std::numbers::pi);
    const auto part = make_partition(grid);
    const auto f = testing::random_field(grid, 1, 1.0, 7.0, 5);
    TimeSeries series;
    for (int i = 0; i <= 10; ++i) {
        series.times.push_back(0.3 * i);
        series.snapshots.push_back(f);
    }
    const BesovSpec spec{2.0, 1.0, 0.5, {}};
    const double static_norm = besov_norm(f, spec, part);
    CHECK(chemin_lerner_norm(series, kInf, spec, part) == doctest::Approx(static_norm).epsilon(1e-14));
    CHECK(chemin_lerner_norm(series, 1.0, spec, part) == doctest::Approx(3.0 * static_norm).epsilon(1e-13));
    TimeSeries single;
    single.times = {0.0};
    single.snapshots = {f};
    CHECK_THROWS_AS(chemin_lerner_norm(single, 2.0, spec, part), PreconditionError);
}

TEST_CASE("Bony decomposition reconstructs the dealiased product") {
    const TorusGrid grid(32, 2 * std::numbers::pi);
    const auto part = make_partition(grid);
    const auto f = testing::random_field(grid, 1, 1.0, 10.0, 21);
    const auto g = testing::random_field(grid, 1, 1.0, 10.0, 22);
    const auto parts = bony_decompose(f, g, part);
    auto sum = parts.paraproduct_fg;
    sum += parts.remainder;
    sum += parts.paraproduct_gf;
    const auto direct = dealiased_product(f, g);
    CHECK(max_diff(sum, direct) <= 1e-11 * direct.max_abs());

    const auto zero = bony_decompose(SpectralField(grid, 1), g, part);
    CHECK(zero.paraproduct_fg.max_abs() == 0.0);
    CHECK(zero.remainder.max_abs() == 0.0);
    CHECK(zero.paraproduct_gf.max_abs() == 0.0);
}
