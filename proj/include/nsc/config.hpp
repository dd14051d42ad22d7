#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nsc/estimates.hpp"
#include "nsc/params.hpp"
#include "nsc/sim.hpp"

namespace nsc::cli {

enum class ExperimentKind { Symbol, LinearDecay, Strichartz, Simulate, Norms, Apriori, Sweep, VerifyAll };

std::string to_string(ExperimentKind k);
ExperimentKind kind_from_string(const std::string& name);

/// Every setting of one experiment. Text form is one `key = value` per line;
/// see SCHEMA.md for the key list and defaults.
struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Simulate;
    std::string run_id;  ///< empty: <kind>-<hash prefix>

    int n = 16;
    double L = 6.283185307179586;

    double mu = 0.25;
    std::optional<double> mu_prime;  ///< defaults to 1 - 2 mu
    double Omega = 0.0;
    double eps = 1.0;
    double gamma = 1.4;

    est::NormSuiteSpec norms{};

    sim::InitialDataSpec data{};
    sim::StepperConfig stepper{};
    sim::Formulation formulation = sim::Formulation::Velocity;
    double horizon = 1.0;

    int samples = 200;  ///< random draws for symbol and linear-decay
    double decay_beta = 1.0;

    int band = 0;
    double strichartz_q = 4.0;
    double strichartz_r = 4.0;
    int time_samples = 401;

    std::vector<double> omegas;  ///< sweep and strichartz grid; empty means {Omega}
    std::vector<double> epss;    ///< sweep grid; empty means {eps}
    int seeds = 1;               ///< sweep repetitions with seed, seed+1, ...
    double multiplier = 4.0;

    std::string output_dir;  ///< empty: $NSC_OUTPUT_ROOT or ./nsc_output

    FluidParams params() const;
    TorusGrid grid() const;

    /// Fail-fast check of every precondition the selected experiment will
    /// meet. Throws PreconditionError naming the violated constraint.
    void validate() const;

    /// Canonical `key = value` text with every key, sorted, floats at 17 digits.
    std::string canonical() const;
    /// 16 hex digits of FNV-1a over the versioned canonical text, output_dir excluded.
    std::string hash() const;
    std::string resolved_run_id() const;
    std::string resolved_output_dir() const;

    /// Apply one `key = value` override; unknown keys and malformed values throw.
    void set(const std::string& key, const std::string& value);
    static ExperimentConfig parse(const std::string& text);
    static ExperimentConfig load(const std::string& path);
    static std::vector<std::string> keys();
};

}  // namespace nsc::cli
