#include "nsc/harness.hpp"

#include <cmath>
#include <random>

#include "nsc/errors.hpp"
#include "nsc/fft.hpp"
#include "nsc/spectral_ops.hpp"

namespace nsc::lp {

namespace {

bool in_range(double x, double lo, double hi) { return x >= lo && x <= hi; }

double inv(double r) { return std::isinf(r) ? 0.0 : 1.0 / r; }

}  // namespace

void ProductSpecA1::validate() const {
    require(in_range(p1, 1, kInf) && in_range(p2, 1, kInf), "A.1: 1 <= p1, p2 <= inf required");
    require(in_range(r1, 1, kInf) && in_range(r2, 1, kInf) && inv(r1) + inv(r2) <= 1.0,
            "A.1: 1/r = 1/r1 + 1/r2 must define r >= 1");
    require(s1 + s2 >= std::max(0.0, 3.0 * (inv(p1) + inv(p2) - 1.0)), "A.1: s1 + s2 >= max{0, 3(1/p1 + 1/p2 - 1)} required");
    require(s1 <= 3.0 * inv(p1), "A.1: s1 <= 3/p1 required");
    require(s2 < 3.0 * std::min(inv(p1), inv(p2)), "A.1: s2 < min{3/p1, 3/p2} required");
}

void ProductSpecA2::validate() const {
    require(q >= 2.0 && q <= 4.0, "A.2: 2 <= q <= 4 required");
    require(in_range(sigma, 1, kInf), "A.2: 1 <= sigma <= inf required");
    for (double x : {r1, r2, r3, r4}) require(in_range(x, 1, kInf), "A.2: time exponents in [1, inf] required");
    require(std::abs(inv(r1) + inv(r2) - (inv(r3) + inv(r4))) < 1e-12 && inv(r1) + inv(r2) <= 1.0,
            "A.2: 1/r = 1/r1 + 1/r2 = 1/r3 + 1/r4 required");
    const double cap = 3.0 * (2.0 / q - 0.5);
    require(s1 <= cap && s4 <= cap, "A.2: s1, s4 <= 3(2/q - 1/2) required");
    require(std::abs(s1 + s2 - (s3 + s4)) < 1e-12, "A.2: s1 + s2 = s3 + s4 required");
    require(s1 + s2 > 0.0, "A.2: s > 0 required");
    require(beta > 0.0, "A.2: beta > 0 required");
}

void CompositionSpec::validate() const {
    require(static_cast<bool>(F), "A.3: F must be set");
    require(R > 0.0, "A.3: R > 0 required");
    require(std::abs(F(0.0)) <= 1e-14, "A.3: F(0) = 0 required");
    require(s > 0.0, "A.3: s > 0 required");
    require(in_range(p, 1, kInf) && in_range(sigma, 1, kInf) && in_range(r, 1, kInf), "A.3: exponents in [1, inf] required");
}

namespace {

struct Sampler {
    const TorusGrid& grid;
    SampleSpec spec;
    std::mt19937_64 rng;
    std::vector<double> times;

    Sampler(const TorusGrid& g, const SampleSpec& s) : grid(g), spec(s), rng(s.seed) {
        require(s.samples >= 1, "harness: samples >= 1 required");
        require(s.snapshots >= 2 && s.duration > 0.0, "harness: at least two snapshots over a positive duration");
        if (spec.kmax <= 0.0) spec.kmax = grid.n() / 6.0;
        require(spec.kmin >= 0.0 && spec.kmin <= spec.kmax, "harness: 0 <= kmin <= kmax required");
        for (int k = 0; k < s.snapshots; ++k) times.push_back(s.duration * k / (s.snapshots - 1));
    }

    SpectralField field() {
        std::normal_distribution<double> gauss;
        SpectralField f(grid, 1);
        for (std::size_t m = 1; m < grid.size(); ++m) {
            const auto k = grid.wavevector(m);
            const double r = std::sqrt(double(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]));
            if (r < spec.kmin || r > spec.kmax || !retained_by_two_thirds(grid, m)) continue;
            f.at(0, m) = cplx(gauss(rng), gauss(rng));
        }
        f.symmetrize();
        return f;
    }

    TimeSeries series() {
        const auto f0 = field(), f1 = field();
        TimeSeries s;
        s.times = times;
        for (double t : times) s.snapshots.push_back(f0 + (t / spec.duration) * f1);
        return s;
    }
};

TimeSeries scaled(const TimeSeries& s, double c) {
    TimeSeries out = s;
    for (auto& f : out.snapshots) f *= c;
    return out;
}

TimeSeries product(const TimeSeries& f, const TimeSeries& g) {
    TimeSeries out;
    out.times = f.times;
    for (std::size_t k = 0; k < f.size(); ++k) out.snapshots.push_back(dealiased_product(f.snapshots[k], g.snapshots[k]));
    return out;
}

double cl(const TimeSeries& s, double r, double p, double sigma, double reg, const DyadicPartition& part,
          Truncation tr = {}) {
    return chemin_lerner_norm(s, r, {p, sigma, reg, tr}, part);
}

void record(HarnessReport& rep, double lhs, double rhs, double lhs_c, double rhs_c) {
    if (!(rhs > 0.0)) {
        ++rep.skipped;
        return;
    }
    const double ratio = lhs / rhs;
    ++rep.samples;
    rep.max_ratio = std::max(rep.max_ratio, ratio);
    rep.mean_ratio += (ratio - rep.mean_ratio) / static_cast<double>(rep.samples);
    if (ratio > 0.0 && rhs_c > 0.0) rep.scaling_deviation = std::max(rep.scaling_deviation, std::abs(lhs_c / rhs_c - ratio) / ratio);
}

constexpr double kScale = 3.0;

}  // namespace

HarnessReport product_estimate_A1(const TorusGrid& grid, const ProductSpecA1& spec, const SampleSpec& samples) {
    spec.validate();
    const auto part = make_partition(grid);
    Sampler gen(grid, samples);
    HarnessReport rep;
    rep.name = "A.1";
    const double s_out = spec.s1 + spec.s2 - 3.0 * inv(spec.p1);
    for (int i = 0; i < samples.samples; ++i) {
        const auto f = gen.series(), g = gen.series();
        const double rg = cl(g, spec.r2, spec.p2, kInf, spec.s2, part);
        auto side = [&](const TimeSeries& ff, double& lhs, double& rhs) {
            lhs = cl(product(ff, g), spec.r(), spec.p2, kInf, s_out, part);
            rhs = cl(ff, spec.r1, spec.p1, 1.0, spec.s1, part) * rg;
        };
        double l = 0, r = 0, lc = 0, rc = 0;
        side(f, l, r);
        side(scaled(f, kScale), lc, rc);
        record(rep, l, r, lc, rc);
    }
    return rep;
}

HarnessReport product_estimate_A2(const TorusGrid& grid, const ProductSpecA2& spec, const SampleSpec& samples) {
    spec.validate();
    const auto part = make_partition(grid);
    Sampler gen(grid, samples);
    HarnessReport rep;
    rep.name = "A.2";
    const double s_out = spec.s() - 3.0 * (2.0 / spec.q - 0.5);
    const auto low = Truncation::low(spec.beta), low4 = Truncation::low(4.0 * spec.beta);
    for (int i = 0; i < samples.samples; ++i) {
        const auto f = gen.series(), g = gen.series();
        const double g2 = cl(g, spec.r2, spec.q, spec.sigma, spec.s2, part, low4);
        const double g4 = cl(g, spec.r4, spec.q, 1.0, spec.s4, part);
        auto side = [&](const TimeSeries& ff, double& lhs, double& rhs) {
            lhs = cl(product(ff, g), spec.r(), 2.0, spec.sigma, s_out, part, low);
            rhs = cl(ff, spec.r1, spec.q, 1.0, spec.s1, part, low) * g2 + cl(ff, spec.r3, spec.q, spec.sigma, spec.s3, part) * g4;
        };
        double l = 0, r = 0, lc = 0, rc = 0;
        side(f, l, r);
        side(scaled(f, kScale), lc, rc);
        record(rep, l, r, lc, rc);
    }
    return rep;
}

HarnessReport composition_estimate(const TorusGrid& grid, const CompositionSpec& spec, const SampleSpec& samples) {
    spec.validate();
    require(samples.fill > 0.0 && samples.fill <= 1.0, "A.3: fill must lie in (0, 1]");
    const auto part = make_partition(grid);
    Sampler gen(grid, samples);
    HarnessReport rep;
    rep.name = "A.3";
    for (int i = 0; i < samples.samples; ++i) {
        auto a = gen.series();
        double sup = 0.0;
        for (const auto& snap : a.snapshots) sup = std::max(sup, lp_norm(snap, kInf));
        if (sup == 0.0) {
            ++rep.skipped;
            continue;
        }
        a = scaled(a, samples.fill * spec.R / sup);
        TimeSeries Fa;
        Fa.times = a.times;
        for (const auto& snap : a.snapshots) {
            auto values = to_physical(snap);
            for (double& v : values) {
                require(std::abs(v) <= spec.R * (1 + 1e-12), "A.3: sample violates the L^inf bound R");
                v = spec.F(v);
            }
            Fa.snapshots.push_back(to_spectral(grid, values, 1));
        }
        const double lhs = cl(Fa, spec.r, spec.p, spec.sigma, spec.s, part);
        const double rhs = cl(a, spec.r, spec.p, spec.sigma, spec.s, part);
        record(rep, lhs, rhs, lhs, rhs);
    }
    return rep;
}

}  // namespace nsc::lp
