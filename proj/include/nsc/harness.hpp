#pragma once

#include <functional>
#include <string>

#include "nsc/littlewood_paley.hpp"

namespace nsc::lp {

/// ||fg||_{L~r B^{s1+s2-3/p1}_{p2,inf}} <= C ||f||_{L~r1 B^{s1}_{p1,1}} ||g||_{L~r2 B^{s2}_{p2,inf}},
/// 1/r = 1/r1 + 1/r2.
struct ProductSpecA1 {
    double p1 = 2.0, p2 = 2.0;
    double s1 = 0.5, s2 = 0.5;
    double r1 = 4.0, r2 = 4.0;
    double r() const { return 1.0 / (1.0 / r1 + 1.0 / r2); }
    void validate() const;
};

/// ||fg||^{l,beta}_{L~r B^{s - 3(2/q - 1/2)}_{2,sigma}}
///   <= C (||f||^{l,beta}_{L~r1 B^{s1}_{q,1}} ||g||^{l,4beta}_{L~r2 B^{s2}_{q,sigma}}
///         + ||f||_{L~r3 B^{s3}_{q,sigma}} ||g||_{L~r4 B^{s4}_{q,1}}),
/// s = s1 + s2 = s3 + s4.
struct ProductSpecA2 {
    double q = 2.5, sigma = 1.0;
    double r1 = 4.0, r2 = 4.0, r3 = 4.0, r4 = 4.0;
    double s1 = 0.5, s2 = 0.5, s3 = 0.5, s4 = 0.5;
    double beta = 4.0;
    double r() const { return 1.0 / (1.0 / r1 + 1.0 / r2); }
    double s() const { return s1 + s2; }
    void validate() const;
};

/// ||F(a)||_{L~r B^s_{p,sigma}} <= C ||a||_{L~r B^s_{p,sigma}} for ||a||_inf <= R.
struct CompositionSpec {
    std::function<double(double)> F;
    double R = 0.5;
    double p = 2.0, sigma = 1.0, s = 0.5, r = 2.0;
    void validate() const;
};

/// Random band-limited time series used as harness inputs:
/// f(t) = F0 + (t / duration) F1 with independent Gaussian spectra on the
/// lattice radii [kmin, kmax].
struct SampleSpec {
    int samples = 64;
    unsigned long long seed = 1;
    double kmin = 1.0;
    double kmax = 0.0;  ///< <= 0 selects n/6, which keeps products free of truncation
    int snapshots = 5;
    double duration = 1.0;
    double fill = 0.9;  ///< composition inputs are scaled to ||a||_inf = fill * R
};

struct HarnessReport {
    std::string name;
    double max_ratio = 0.0;
    double mean_ratio = 0.0;
    std::size_t samples = 0;
    std::size_t skipped = 0;  ///< 0/0 samples
    double scaling_deviation = 0.0;  ///< largest relative ratio change when f is scaled
};

HarnessReport product_estimate_A1(const TorusGrid& grid, const ProductSpecA1& spec, const SampleSpec& samples);
HarnessReport product_estimate_A2(const TorusGrid& grid, const ProductSpecA2& spec, const SampleSpec& samples);
HarnessReport composition_estimate(const TorusGrid& grid, const CompositionSpec& spec, const SampleSpec& samples);

}  // namespace nsc::lp
