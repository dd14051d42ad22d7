#include "nsc/littlewood_paley.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nsc/errors.hpp"
#include "nsc/fft.hpp"
#include "nsc/spectral_ops.hpp"

namespace nsc::lp {

namespace {

bool valid_exponent(double x) { return x >= 1.0 && !std::isnan(x); }

// Embed an n-grid spectrum into the 2n grid. Nyquist coefficients are split
// evenly between -n/2 and +n/2 so the padded field stays real and agrees with
// the original on the coarse collocation points.
std::vector<cplx> zero_pad(const TorusGrid& grid, std::span<const cplx> spec) {
    const int n = grid.n();
    const int m = 2 * n;
    const TorusGrid fine(m, grid.length());
    std::vector<cplx> out(fine.size());
    for (std::size_t idx = 0; idx < grid.size(); ++idx) {
        if (spec[idx] == cplx(0.0)) continue;
        const auto k = grid.wavevector(idx);
        std::array<std::array<int, 2>, 3> choices{};
        std::array<int, 3> counts{};
        for (int ax = 0; ax < 3; ++ax) {
            choices[ax][0] = k[ax];
            counts[ax] = 1;
            if (k[ax] == -n / 2) {
                choices[ax][1] = n / 2;
                counts[ax] = 2;
            }
        }
        const double share = 1.0 / (counts[0] * counts[1] * counts[2]);
        for (int a = 0; a < counts[0]; ++a)
            for (int b = 0; b < counts[1]; ++b)
                for (int c = 0; c < counts[2]; ++c) {
                    const auto dst = fine.flat(fine.storage_index(choices[0][a]), fine.storage_index(choices[1][b]),
                                               fine.storage_index(choices[2][c]));
                    out[dst] += share * spec[idx];
                }
    }
    return out;
}

}  // namespace

bool Truncation::selects(int j) const {
    const double x = std::ldexp(1.0, j);
    switch (kind) {
        case Kind::Full: return true;
        case Kind::Low: return x <= alpha;
        case Kind::Mid: return alpha < x && x <= beta;
        case Kind::High: return beta < x;
    }
    return false;
}

void Truncation::validate() const {
    switch (kind) {
        case Kind::Full: return;
        case Kind::Low: require(alpha >= 0.0 && !std::isnan(alpha), "truncation: alpha must be >= 0"); return;
        case Kind::High: require(beta >= 0.0 && !std::isnan(beta), "truncation: beta must be >= 0"); return;
        case Kind::Mid:
            require(alpha >= 0.0 && !std::isnan(alpha), "truncation: alpha must be >= 0");
            require(alpha < beta, "truncation: alpha < beta required");
            return;
    }
}

void BesovSpec::validate() const {
    require(valid_exponent(p), "besov: p must lie in [1, inf]");
    require(valid_exponent(sigma), "besov: sigma must lie in [1, inf]");
    require(std::isfinite(s), "besov: regularity must be finite");
    truncation.validate();
}

double log_bump(double radius) {
    if (!(radius > 0.0)) return 0.0;
    const double t = std::log2(radius);
    if (std::abs(t) >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - t * t));
}

DyadicPartition::DyadicPartition(const TorusGrid& grid, Bump bump)
    : grid_(grid), bump_(std::move(bump)), resolvable_(grid.resolvable_bands()) {
    // Every band whose open annulus (2^{j-1}, 2^{j+1}) meets [2 pi/L, max |xi|].
    const double lo_f = grid.fundamental();
    const double hi_f = grid.max_frequency();
    bands_.lo = static_cast<int>(std::floor(std::log2(lo_f))) - 1;
    while (std::ldexp(1.0, bands_.lo + 1) <= lo_f) ++bands_.lo;
    bands_.hi = static_cast<int>(std::ceil(std::log2(hi_f))) + 1;
    while (std::ldexp(1.0, bands_.hi - 1) >= hi_f) --bands_.hi;

    entries_.assign(static_cast<std::size_t>(bands_.size()), {});
    for (std::size_t m = 1; m < grid.size(); ++m) {
        const double r = norm(grid.frequency(m));
        const int centre = static_cast<int>(std::floor(std::log2(r)));
        for (int j = centre - 1; j <= centre + 2; ++j) {
            if (!bands_.contains(j)) continue;
            const double w = weight(j, r);
            if (w > 0.0) entries_[static_cast<std::size_t>(j - bands_.lo)].push_back({m, w});
        }
    }
}

double DyadicPartition::profile(double radius) const {
    const double num = bump_(radius);
    if (num == 0.0) return 0.0;
    const int centre = static_cast<int>(std::floor(std::log2(radius)));
    double den = 0.0;
    for (int k = centre - 2; k <= centre + 3; ++k) den += bump_(std::ldexp(radius, -k));
    return num / den;
}

const std::vector<DyadicPartition::Entry>& DyadicPartition::band(int j) const {
    require(bands_.contains(j), "partition: band " + std::to_string(j) + " outside [" + std::to_string(bands_.lo) +
                                    ", " + std::to_string(bands_.hi) + "]");
    return entries_[static_cast<std::size_t>(j - bands_.lo)];
}

DyadicPartition make_partition(const TorusGrid& grid) { return make_partition(grid, log_bump); }

DyadicPartition make_partition(const TorusGrid& grid, DyadicPartition::Bump bump) {
    const int first = static_cast<int>(std::ceil(std::log2(grid.fundamental()) - 1e-12));
    const int last = static_cast<int>(std::floor(std::log2(grid.nyquist_radius()) + 1e-12));
    require(last - first + 1 >= 3, "partition: grid too coarse to host three dyadic bands");
    return DyadicPartition(grid, std::move(bump));
}

SpectralField project_band(const SpectralField& f, int j, const DyadicPartition& part) {
    require(f.grid() == part.grid(), "project_band: grid mismatch");
    SpectralField out(f.grid(), f.components());
    for (const auto& e : part.band(j)) {
        for (int c = 0; c < f.components(); ++c) out.at(c, e.mode) = e.weight * f.at(c, e.mode);
    }
    return out;
}

double lp_norm_physical(std::span<const double> values, std::size_t points, int components, double p) {
    require(values.size() == points * static_cast<std::size_t>(components), "lp_norm: sample size mismatch");
    require(valid_exponent(p), "lp_norm: p must lie in [1, inf]");
    double acc = 0.0;
    for (std::size_t x = 0; x < points; ++x) {
        double sq = 0.0;
        for (int c = 0; c < components; ++c) {
            const double v = values[static_cast<std::size_t>(c) * points + x];
            sq += v * v;
        }
        if (std::isinf(p)) {
            acc = std::max(acc, std::sqrt(sq));
        } else if (p == 2.0) {
            acc += sq;
        } else {
            acc += std::pow(sq, 0.5 * p);
        }
    }
    if (std::isinf(p)) return acc;
    return std::pow(acc / static_cast<double>(points), 1.0 / p);
}

double lp_norm(const SpectralField& f, double p, Components comps, bool oversample) {
    require(valid_exponent(p), "lp_norm: p must lie in [1, inf]");
    const int count = comps.resolve_count(f.components());
    require(comps.first >= 0 && count >= 1 && comps.first + count <= f.components(), "lp_norm: bad component range");
    if (p == 2.0) {
        double acc = 0.0;
        for (int c = comps.first; c < comps.first + count; ++c)
            for (const auto& v : f.component(c)) acc += std::norm(v);
        return std::sqrt(acc);
    }
    if (!oversample) {
        const auto values = to_physical(f.slice(comps.first, count));
        return lp_norm_physical(values, f.modes(), count, p);
    }
    const int m = 2 * f.grid().n();
    auto& fft = fft_engine(m);
    const std::size_t points = fft.size();
    std::vector<double> values(points * static_cast<std::size_t>(count));
    for (int c = 0; c < count; c += 2) {
        const auto first = zero_pad(f.grid(), f.component(comps.first + c));
        std::span<double> out_first(values.data() + static_cast<std::size_t>(c) * points, points);
        if (c + 1 < count) {
            const auto second = zero_pad(f.grid(), f.component(comps.first + c + 1));
            std::span<double> out_second(values.data() + static_cast<std::size_t>(c + 1) * points, points);
            fft.to_physical(first, second, out_first, out_second);
        } else {
            fft.to_physical(first, {}, out_first, {});
        }
    }
    return lp_norm_physical(values, points, count, p);
}

std::vector<double> band_norms(const SpectralField& f, const DyadicPartition& part, double p, Components comps,
                               bool oversample) {
    require(f.grid() == part.grid(), "band_norms: grid mismatch");
    const int count = comps.resolve_count(f.components());
    require(comps.first >= 0 && count >= 1 && comps.first + count <= f.components(),
            "band_norms: bad component range");
    const auto bands = part.bands();
    std::vector<double> out(static_cast<std::size_t>(bands.size()), 0.0);
    for (int j = bands.lo; j <= bands.hi; ++j) {
        const auto& entries = part.band(j);
        double& slot = out[static_cast<std::size_t>(j - bands.lo)];
        if (p == 2.0) {
            double acc = 0.0;
            for (const auto& e : entries)
                for (int c = comps.first; c < comps.first + count; ++c)
                    acc += e.weight * e.weight * std::norm(f.at(c, e.mode));
            slot = std::sqrt(acc);
            continue;
        }
        bool any = false;
        SpectralField piece(f.grid(), count);
        for (const auto& e : entries) {
            for (int c = 0; c < count; ++c) {
                const cplx v = f.at(comps.first + c, e.mode);
                piece.at(c, e.mode) = e.weight * v;
                any = any || v != cplx(0.0);
            }
        }
        slot = any ? lp_norm(piece, p, {}, oversample) : 0.0;
    }
    return out;
}

double aggregate(const std::vector<double>& per_band, BandRange bands, double s, double sigma,
                 const Truncation& trunc) {
    require(per_band.size() == static_cast<std::size_t>(bands.size()), "aggregate: band count mismatch");
    require(valid_exponent(sigma), "aggregate: sigma must lie in [1, inf]");
    double acc = 0.0;
    for (int j = bands.lo; j <= bands.hi; ++j) {
        if (!trunc.selects(j)) continue;
        const double term = std::pow(2.0, s * j) * per_band[static_cast<std::size_t>(j - bands.lo)];
        if (std::isinf(sigma)) {
            acc = std::max(acc, term);
        } else if (sigma == 1.0) {
            acc += term;
        } else {
            acc += std::pow(term, sigma);
        }
    }
    if (std::isinf(sigma) || sigma == 1.0) return acc;
    return std::pow(acc, 1.0 / sigma);
}

double besov_norm(const SpectralField& f, const BesovSpec& spec, const DyadicPartition& part, Components comps) {
    spec.validate();
    require(f.all_finite(), "besov_norm: nonfinite coefficients");
    return aggregate(band_norms(f, part, spec.p, comps), part.bands(), spec.s, spec.sigma, spec.truncation);
}

void TimeSeries::validate() const {
    require(!times.empty(), "time series: no snapshots");
    require(times.size() == snapshots.size(), "time series: times and snapshots differ in length");
    require(times.front() == 0.0, "time series: first time must be 0");
    for (std::size_t i = 1; i < times.size(); ++i) {
        require(times[i] > times[i - 1], "time series: times must be strictly increasing");
        require(snapshots[i].grid() == snapshots[0].grid() &&
                    snapshots[i].components() == snapshots[0].components(),
                "time series: snapshots must share one grid and shape");
    }
}

BandTable BandTable::build(const TimeSeries& series, const DyadicPartition& part, double p, Components comps) {
    series.validate();
    BandTable table;
    table.times = series.times;
    table.bands = part.bands();
    table.values.reserve(series.size());
    for (const auto& snap : series.snapshots) {
        require(snap.all_finite(), "band table: nonfinite coefficients");
        table.values.push_back(band_norms(snap, part, p, comps));
    }
    return table;
}

BandTable BandTable::prefix(std::size_t last) const {
    require(last < times.size(), "band table: prefix index out of range");
    BandTable out;
    out.bands = bands;
    out.times.assign(times.begin(), times.begin() + static_cast<std::ptrdiff_t>(last + 1));
    out.values.assign(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(last + 1));
    return out;
}

BandTable BandTable::scaled(double factor) const {
    BandTable out = *this;
    for (auto& row : out.values)
        for (auto& v : row) v *= std::abs(factor);
    return out;
}

double time_norm(const std::vector<double>& times, const std::vector<double>& values, double r) {
    require(times.size() == values.size() && !times.empty(), "time_norm: size mismatch");
    require(valid_exponent(r), "time_norm: r must lie in [1, inf]");
    if (std::isinf(r)) return *std::max_element(values.begin(), values.end());
    require(times.size() >= 2, "time_norm: finite r needs at least two snapshots");
    auto pw = [r](double v) { return r == 1.0 ? v : std::pow(v, r); };
    double acc = 0.0;
    for (std::size_t i = 1; i < times.size(); ++i) acc += 0.5 * (times[i] - times[i - 1]) * (pw(values[i]) + pw(values[i - 1]));
    return r == 1.0 ? acc : std::pow(acc, 1.0 / r);
}

double chemin_lerner(const BandTable& table, double s, double sigma, double r, const Truncation& trunc) {
    trunc.validate();
    std::vector<double> per_band(static_cast<std::size_t>(table.bands.size()), 0.0);
    std::vector<double> column(table.times.size());
    for (int j = table.bands.lo; j <= table.bands.hi; ++j) {
        if (!trunc.selects(j)) continue;
        const auto b = static_cast<std::size_t>(j - table.bands.lo);
        for (std::size_t t = 0; t < table.times.size(); ++t) column[t] = table.values[t][b];
        per_band[b] = time_norm(table.times, column, r);
    }
    return aggregate(per_band, table.bands, s, sigma, trunc);
}

double lr_besov(const BandTable& table, double s, double sigma, double r, const Truncation& trunc) {
    trunc.validate();
    std::vector<double> per_time(table.times.size());
    for (std::size_t t = 0; t < table.times.size(); ++t)
        per_time[t] = aggregate(table.values[t], table.bands, s, sigma, trunc);
    return time_norm(table.times, per_time, r);
}

double chemin_lerner_norm(const TimeSeries& series, double r, const BesovSpec& spec, const DyadicPartition& part,
                          Components comps) {
    spec.validate();
    require(valid_exponent(r), "chemin_lerner: r must lie in [1, inf]");
    require(std::isinf(r) || series.size() >= 2, "chemin_lerner: finite r needs at least two snapshots");
    const auto table = BandTable::build(series, part, spec.p, comps);
    return chemin_lerner(table, spec.s, spec.sigma, r, spec.truncation);
}

BonyParts bony_decompose(const SpectralField& f, const SpectralField& g, const DyadicPartition& part) {
    require(f.grid() == g.grid() && f.grid() == part.grid(), "bony: grids mismatch");
    require(f.components() == 1 && g.components() == 1, "bony: scalar fields expected");
    const auto bands = part.bands();
    const auto nb = static_cast<std::size_t>(bands.size());
    const std::size_t N = f.modes();
    auto& fft = fft_engine(f.grid().n());

    // Physical values of every block of f and g (the mean is never in a band).
    std::vector<std::vector<double>> df(nb, std::vector<double>(N)), dg(nb, std::vector<double>(N));
    for (int j = bands.lo; j <= bands.hi; ++j) {
        const auto b = static_cast<std::size_t>(j - bands.lo);
        const auto pf = project_band(f, j, part);
        const auto pg = project_band(g, j, part);
        fft.to_physical(pf.component(0), pg.component(0), df[b], dg[b]);
    }

    std::vector<double> t_fg(N, 0.0), rem(N, 0.0), t_gf(N, 0.0);
    std::vector<double> low_f(N, 0.0), low_g(N, 0.0);  // S_{j-3} partial sums
    for (int j = bands.lo; j <= bands.hi; ++j) {
        const auto b = static_cast<std::size_t>(j - bands.lo);
        if (j - 3 >= bands.lo) {
            const auto add = static_cast<std::size_t>(j - 3 - bands.lo);
            for (std::size_t x = 0; x < N; ++x) {
                low_f[x] += df[add][x];
                low_g[x] += dg[add][x];
            }
        }
        for (std::size_t x = 0; x < N; ++x) {
            t_fg[x] += low_f[x] * dg[b][x];
            t_gf[x] += low_g[x] * df[b][x];
        }
        for (int k = std::max(bands.lo, j - 2); k <= std::min(bands.hi, j + 2); ++k) {
            const auto kb = static_cast<std::size_t>(k - bands.lo);
            for (std::size_t x = 0; x < N; ++x) rem[x] += df[b][x] * dg[kb][x];
        }
    }

    BonyParts parts{SpectralField(f.grid(), 1), SpectralField(f.grid(), 1), SpectralField(f.grid(), 1)};
    fft.to_spectral(t_fg, t_gf, parts.paraproduct_fg.component(0), parts.paraproduct_gf.component(0));
    fft.to_spectral(rem, {}, parts.remainder.component(0), {});
    dealias_in_place(parts.paraproduct_fg);
    dealias_in_place(parts.remainder);
    dealias_in_place(parts.paraproduct_gf);
    return parts;
}

}  // namespace nsc::lp
