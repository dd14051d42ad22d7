#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nsc/littlewood_paley.hpp"
#include "nsc/params.hpp"
#include "nsc/spectral_ops.hpp"
#include "nsc/symbol.hpp"

namespace nsc::sim {

enum class Formulation { Velocity, Momentum };

std::string to_string(Formulation f);
Formulation formulation_from_string(const std::string& name);

/// Density perturbation a and either the velocity u or the momentum
/// m = (1 + eps a) u, depending on `formulation`.
struct State {
    SpectralField a;
    SpectralField vel;
    Formulation formulation = Formulation::Velocity;
    double time = 0.0;

    State(const TorusGrid& grid, Formulation f = Formulation::Velocity) : a(grid, 1), vel(grid, 3), formulation(f) {}
    State(SpectralField a_, SpectralField vel_, Formulation f = Formulation::Velocity, double t = 0.0);

    const TorusGrid& grid() const { return a.grid(); }
    /// (a, vel) as one 4-component field.
    SpectralField packed() const;
    static State unpack(const SpectralField& packed, Formulation f, double t);
};

struct StepperConfig {
    double dt = 1e-2;
    int order = 4;  ///< Lawson RK2 (Heun) or Lawson RK4
    bool dealias = true;
    int snapshot_every = 1;
    double positivity_floor = 0.05;
    bool nonlinear = true;  ///< false advances with the exact linear flow only
    void validate() const;
};

/// cfg.validate() plus the order-2 limit dt <= 0.5 eps / max|xi| over the retained modes.
void validate_stepper(const TorusGrid& grid, const FluidParams& params, const StepperConfig& cfg);

/// min over the collocation grid of 1 + eps a.
double positivity_margin(const SpectralField& a, double eps);

struct Rhs {
    SpectralField a;
    SpectralField vel;
};

/// (-div(a u), -[(u.grad)u + J(eps a) L u + (1/eps) K(eps a) grad a]).
/// Throws InstabilityError when 1 + eps a drops to the floor.
Rhs nonlinearity_velocity(const State& state, const FluidParams& params, double floor = 0.05, bool dealias = true);

/// (0, -[div(m (x) u) + eps L(a u) + grad(Q(eps a) a^2)]) with u = m / (1 + eps a).
Rhs nonlinearity_momentum(const State& state, const FluidParams& params, double floor = 0.05, bool dealias = true);

Rhs nonlinearity(const State& state, const FluidParams& params, double floor = 0.05, bool dealias = true);

/// Switch between velocity and momentum variables by pointwise
/// multiplication or division by 1 + eps a, followed by dealiasing.
State convert(const State& state, const FluidParams& params, Formulation target, double floor = 0.05,
              bool dealias = true);

/// Lawson exponential Runge-Kutta stepper with the exact per-mode propagator.
/// Propagator tables for dt and dt/2 are built once.
class Stepper {
public:
    Stepper(const TorusGrid& grid, const FluidParams& params, const StepperConfig& cfg);

    State step(const State& state) const;
    /// Exact linear flow over `t` (any t >= 0), no nonlinearity.
    SpectralField apply_linear(const SpectralField& packed, double t) const;

    const StepperConfig& config() const { return cfg_; }

private:
    void apply_table(const std::vector<linear::Mat4>& table, SpectralField& packed) const;
    void rhs(const SpectralField& packed, Formulation f, double t, SpectralField& out) const;

    TorusGrid grid_;
    FluidParams params_;
    StepperConfig cfg_;
    std::vector<std::size_t> modes_;     ///< canonical retained modes (one of each +-k pair)
    std::vector<std::size_t> partners_;  ///< their -k partners
    std::vector<std::size_t> dropped_;   ///< modes forced to zero
    std::vector<linear::Mat4> full_, half_;
};

/// One step of size cfg.dt.
State step(const State& state, const FluidParams& params, const StepperConfig& cfg);

struct RunReport {
    bool stable = true;
    double failure_time = -1.0;
    std::string failure;
    double dt_effective = 0.0;
    std::size_t steps = 0;
    std::vector<double> margin_times;
    std::vector<double> margins;
    double mean_a_initial = 0.0;
    double mean_a_final = 0.0;
    double max_mean_drift = 0.0;
    double max_hermitian_defect = 0.0;
};

struct RunResult {
    /// Snapshots of (a, u1, u2, u3) in velocity variables, whatever the
    /// formulation that was evolved.
    lp::TimeSeries series;
    RunReport report;
    State final_state;
};

/// Advance to horizon T with dt adjusted down to T / ceil(T / dt). On
/// instability the partial series is returned with the failure recorded.
RunResult simulate(const State& initial, const FluidParams& params, const StepperConfig& cfg, double T);

enum class Recipe { RandomBand, GaussianBump, SingleMode, LargeData };
std::string to_string(Recipe r);
Recipe recipe_from_string(const std::string& name);

struct InitialDataSpec {
    Recipe recipe = Recipe::RandomBand;
    unsigned long long seed = 1;
    double kmin = 1.0;        ///< lattice radius range of excited modes (random-band, large-data)
    double kmax = 4.0;
    double amplitude = 0.1;   ///< largest |coefficient| scale; for large-data the target ||u0||_{B^{1/2}_{2,1}}
    double a_fraction = 1.0;  ///< amplitude of a relative to u
    bool solenoidal = false;  ///< project u onto divergence-free fields
    double width = 0.5;       ///< gaussian-bump width in physical units
    std::array<int, 3> mode{1, 0, 0};  ///< single-mode lattice vector
    int mode_component = 0;            ///< 0 = a, 1..3 = u_i
};

struct InitialData {
    State state;
    std::vector<std::pair<std::string, double>> norms;
};

/// Real, mean-zero, dealiased initial data with its principal Besov norms.
InitialData make_initial_data(const InitialDataSpec& spec, const TorusGrid& grid, const FluidParams& params,
                              double positivity_floor = 0.05);

}  // namespace nsc::sim
