#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "nsc/field.hpp"

namespace nsc::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Frequency truncation of a Besov sum: Low keeps 2^j <= alpha, Mid keeps
/// alpha < 2^j <= beta, High keeps beta < 2^j.
struct Truncation {
    enum class Kind { Full, Low, Mid, High };
    Kind kind = Kind::Full;
    double alpha = 0.0;
    double beta = kInf;

    static Truncation full() { return {}; }
    static Truncation low(double alpha) { return {Kind::Low, alpha, kInf}; }
    static Truncation mid(double alpha, double beta) { return {Kind::Mid, alpha, beta}; }
    static Truncation high(double beta) { return {Kind::High, 0.0, beta}; }

    bool selects(int j) const;
    void validate() const;
};

struct BesovSpec {
    double p = 2.0;      ///< integrability exponent, [1, inf]
    double sigma = 1.0;  ///< summation exponent, [1, inf]
    double s = 0.0;      ///< regularity
    Truncation truncation{};
    void validate() const;
};

/// Inclusive component range used when a norm is taken of part of a field.
/// Vector-valued samples use the pointwise Euclidean norm.
struct Components {
    int first = 0;
    int count = -1;  ///< -1 selects every component from `first` on
    int resolve_count(int total) const { return count < 0 ? total - first : count; }
};

/// Radial Littlewood-Paley profile on a torus grid.
///
/// phi_0(xi) = chi(|xi|) / sum_k chi(2^{-k}|xi|) for a smooth bump chi with
/// support in [1/2, 2]. The band range covers every band that touches a
/// nonzero grid mode, so sum_j phi_j = 1 on every mode except the mean.
class DyadicPartition {
public:
    using Bump = std::function<double(double)>;

    DyadicPartition(const TorusGrid& grid, Bump bump);

    const TorusGrid& grid() const { return grid_; }
    /// Every band whose annulus meets a nonzero grid mode.
    BandRange bands() const { return bands_; }
    /// Bands fully contained in the resolvable frequency window.
    BandRange resolvable() const { return resolvable_; }

    double profile(double radius) const;  ///< phi_0 as a function of |xi|
    double weight(int j, double radius) const { return profile(std::ldexp(radius, -j)); }

    struct Entry {
        std::size_t mode;
        double weight;
    };
    /// Nonzero weights of band j, in storage order.
    const std::vector<Entry>& band(int j) const;

private:
    TorusGrid grid_;
    Bump bump_;
    BandRange bands_;
    BandRange resolvable_;
    std::vector<std::vector<Entry>> entries_;
};

/// Default bump: exp(-1/(1 - t^2)) in t = log2 r, support [1/2, 2].
double log_bump(double radius);

/// Build the partition with the default bump. Throws when fewer than three
/// band centers 2^j lie between the lattice spacing and the Nyquist radius.
DyadicPartition make_partition(const TorusGrid& grid);
DyadicPartition make_partition(const TorusGrid& grid, DyadicPartition::Bump bump);

/// Delta_j f.
SpectralField project_band(const SpectralField& f, int j, const DyadicPartition& part);

/// Normalized L^p norm ((1/L^3) int |f|^p)^{1/p} of a field given by its
/// spectrum, evaluated on the collocation grid (or a 2x zero-padded grid).
double lp_norm(const SpectralField& f, double p, Components comps = {}, bool oversample = false);
double lp_norm_physical(std::span<const double> values, std::size_t points, int components, double p);

/// ||Delta_j f||_{L^p} for every band of the partition, indexed j - bands().lo.
std::vector<double> band_norms(const SpectralField& f, const DyadicPartition& part, double p, Components comps = {},
                               bool oversample = false);

/// l^sigma aggregation of 2^{sj} values_j over the bands selected by `trunc`.
double aggregate(const std::vector<double>& per_band, BandRange bands, double s, double sigma,
                 const Truncation& trunc);

double besov_norm(const SpectralField& f, const BesovSpec& spec, const DyadicPartition& part, Components comps = {});

/// Snapshots of a field on a strictly increasing time grid starting at 0.
struct TimeSeries {
    std::vector<double> times;
    std::vector<SpectralField> snapshots;
    void validate() const;
    std::size_t size() const { return times.size(); }
};

/// Per-snapshot per-band L^p norms. Chemin-Lerner and L^r(Besov) norms of
/// every exponent are cheap reductions of this table.
struct BandTable {
    std::vector<double> times;
    BandRange bands;
    std::vector<std::vector<double>> values;  ///< [snapshot][j - bands.lo]

    static BandTable build(const TimeSeries& series, const DyadicPartition& part, double p, Components comps = {});
    /// Leading snapshots up to and including index `last`.
    BandTable prefix(std::size_t last) const;
    BandTable scaled(double factor) const;
};

/// L^r norm in time of a sampled function; trapezoid for finite r, max for r = inf.
double time_norm(const std::vector<double>& times, const std::vector<double>& values, double r);

/// ||{2^{sj} ||Delta_j F||_{L^r(I;L^p)}}||_{l^sigma} over the selected bands.
double chemin_lerner(const BandTable& table, double s, double sigma, double r, const Truncation& trunc);
/// ||  ||F(t)||_{B^s_{p,sigma}}  ||_{L^r(I)} (time norm taken last).
double lr_besov(const BandTable& table, double s, double sigma, double r, const Truncation& trunc);

double chemin_lerner_norm(const TimeSeries& series, double r, const BesovSpec& spec, const DyadicPartition& part,
                          Components comps = {});

/// fg = T_f g + R(f,g) + T_g f for the mean-free parts of scalar f and g,
/// with every product formed on the 2/3-dealiased grid.
struct BonyParts {
    SpectralField paraproduct_fg;  ///< T_f g = sum_j S_{j-3} f Delta_j g
    SpectralField remainder;       ///< R(f,g) = sum_j sum_{|k-j|<=2} Delta_j f Delta_k g
    SpectralField paraproduct_gf;  ///< T_g f
};
BonyParts bony_decompose(const SpectralField& f, const SpectralField& g, const DyadicPartition& part);

}  // namespace nsc::lp
