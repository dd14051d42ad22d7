#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nsc/littlewood_paley.hpp"
#include "nsc/params.hpp"
#include "nsc/sim.hpp"

namespace nsc::est {

/// Exponents and frequency splits of the energy and auxiliary norms.
///
/// Low frequencies are 2^j <= |Omega| eps, high frequencies 2^j > beta0 / eps;
/// alpha further splits the middle range of the auxiliary norm.
struct NormSuiteSpec {
    double q = 2.5;
    double r = 10.0;
    std::optional<double> alpha;  ///< defaults to |Omega| eps
    double beta0 = 1.0;
    /// Enforce the exponent range under which the global result is proved
    /// (2 < q < 3 and the conditions tied to it). When false only the
    /// definitional requirements (q >= 2, 2 < r < inf) are checked.
    bool theorem_regime = true;

    double r_prime() const { return r / (r - 1.0); }
    double r_star() const { return 2.0 * r / (r - 2.0); }  ///< 1/r* = 1/2 - 1/r
    double low_cut(const FluidParams& p) const;
    double high_cut(const FluidParams& p) const { return beta0 / p.eps; }
    double alpha_value(const FluidParams& p) const;

    /// Throws PreconditionError naming the first violated constraint.
    void validate(const FluidParams& p) const;
};

struct Summand {
    std::string name;
    double value = 0.0;
    bool empty = false;  ///< no band of the grid falls in the truncation
};

struct NormReport {
    double t = 0.0;
    std::vector<Summand> summands;
    double total = 0.0;
    double get(const std::string& name) const;
};

/// Per-band norm tables for the three component groups (a,u), a and u, in
/// L^2 and in L^q. Every norm of the suite is a reduction of these.
struct NormTables {
    lp::BandTable pair2, a2, u2;
    lp::BandTable pairq, aq, uq;

    /// `series` holds velocity-variable snapshots (a, u1, u2, u3).
    static NormTables build(const lp::TimeSeries& series, const lp::DyadicPartition& part, double q);
    NormTables prefix(std::size_t last) const;
    NormTables scaled(double factor) const;
    std::size_t size() const { return pair2.times.size(); }
};

/// Energy norm on [0, t_last] (intersection norms are listed as two summands).
NormReport compute_E(const NormTables& tables, const FluidParams& params, const NormSuiteSpec& spec);
NormReport compute_E(const lp::TimeSeries& series, const FluidParams& params, const NormSuiteSpec& spec,
                     const lp::DyadicPartition& part);
/// Auxiliary norm on [0, t_last].
NormReport compute_A(const NormTables& tables, const FluidParams& params, const NormSuiteSpec& spec);
NormReport compute_A(const lp::TimeSeries& series, const FluidParams& params, const NormSuiteSpec& spec,
                     const lp::DyadicPartition& part);

struct DataFunctionals {
    double d_star = 0.0;
    double d_eps = 0.0;
    /// eps-free upper functional exactly as displayed, whose quadratic term is |a0| |a0|.
    double d = 0.0;
    /// The same functional with the quadratic term |a0|_{B^{3/2}_{2,1}} |u0|_{B^{-3/2}_{2,inf}}.
    double d_mixed = 0.0;
    double b_half = 0.0;  ///< |(a0,u0)|_{B^{1/2}_{2,1}}
};

DataFunctionals compute_data_functionals(const sim::State& initial, const FluidParams& params,
                                         const lp::DyadicPartition& part);

/// Tail of the data above alpha: |(a0,u0)|^{h;alpha}_{B^{1/2}_{2,1}} + |a0|^{h;alpha}_{B^{3/2}_{2,1}}.
double data_tail(const sim::State& initial, const lp::DyadicPartition& part, double alpha);
/// Smallest threshold alpha = 2^j >= 1 over the partition bands with data_tail <= delta.
double alpha_delta(const sim::State& initial, const lp::DyadicPartition& part, double delta);

/// Geometric ladder of snapshot indices, 8 per decade in time, always
/// including the last snapshot. Index 0 (t = 0) is never included.
std::vector<std::size_t> time_ladder(const std::vector<double>& times, int per_decade = 8);

struct RatioStats {
    std::string name;
    double max_ratio = 0.0;
    std::size_t samples = 0;
    std::size_t skipped = 0;  ///< zero right-hand sides
    double scaling_deviation = 0.0;  ///< max relative change of the ratio under amplitude scaling
};

/// AE-1..AE-4 ratios LHS / RHS over every run and ladder time.
std::vector<RatioStats> lemma_AE_check(const std::vector<lp::TimeSeries>& runs, const FluidParams& params,
                                       const NormSuiteSpec& spec, const lp::DyadicPartition& part,
                                       double scale_probe = 3.0);

struct InequalityRow {
    double t = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;  ///< with every constant set to 1
    double ratio = 0.0;
    bool holds = false;  ///< lhs <= fitted * rhs
    double tightness = 0.0;  ///< lhs / (fitted * rhs)
};

struct InequalityReport {
    std::string name;
    double fitted = 0.0;  ///< max ratio on the first quarter of the ladder
    std::vector<InequalityRow> rows;
    bool all_hold = true;
};

struct AprioriReport {
    std::vector<double> times;
    std::vector<double> E, A;
    DataFunctionals data;
    double alpha = 0.0;
    double delta = 0.0;  ///< data tail above alpha
    std::vector<InequalityReport> inequalities;  ///< (E), (A), then the four low-frequency pieces
    /// Smallness quantities that the continuation argument asks to be small.
    std::vector<std::pair<std::string, double>> choice;
    bool growth_before_failure = false;  ///< E grew monotonically over the last ladder steps of a failed run
};

AprioriReport apriori_diagnostic(const sim::RunResult& run, const sim::State& initial, const FluidParams& params,
                                 const NormSuiteSpec& spec, const lp::DyadicPartition& part);

struct ProbeCell {
    double Omega = 0.0;
    double eps = 0.0;
    bool stable = false;
    double failure_time = -1.0;
    double E_early = 0.0;
    double E_peak = 0.0;
    double A_final = 0.0;
    bool bounded = false;  ///< E(t) <= multiplier * E_early throughout
    bool regime = false;   ///< stable and bounded
    std::vector<double> times, E;
    std::string failure;
};

struct ProbeConfig {
    double horizon = 20.0;
    double multiplier = 4.0;
    double early_fraction = 0.05;  ///< E_early is E at the first snapshot with t >= early_fraction * horizon
    sim::StepperConfig stepper{};
};

/// Runs the fixed initial data for every (Omega, eps) pair.
std::vector<ProbeCell> continuation_probe(const sim::State& initial, const FluidParams& base,
                                          const std::vector<std::pair<double, double>>& omega_eps,
                                          const NormSuiteSpec& spec, const ProbeConfig& cfg,
                                          const lp::DyadicPartition& part);

}  // namespace nsc::est
