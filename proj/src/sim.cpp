#include "nsc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <random>

#include "nsc/errors.hpp"
#include "nsc/fft.hpp"

namespace nsc::sim {

namespace {

using linear::Mat4;
using linear::Vec4;

// Scratch buffers reused across nonlinearity evaluations on one thread.
struct Workspace {
    std::vector<std::vector<double>> phys;
    SpectralField derived;  // omega, L u, grad a
    SpectralField forward;  // transformed products
    explicit Workspace(const TorusGrid& grid)
        : phys(13, std::vector<double>(grid.size())), derived(grid, 9), forward(grid, 10) {}
};

Workspace& workspace(const TorusGrid& grid) {
    thread_local std::map<std::pair<int, double>, std::unique_ptr<Workspace>> cache;
    auto& slot = cache[{grid.n(), grid.length()}];
    if (!slot) slot = std::make_unique<Workspace>(grid);
    return *slot;
}

// Physical values of spectral components, transformed in pairs into phys[0..].
void to_phys(Fft3d& fft, const std::vector<std::span<const cplx>>& comps, std::vector<std::vector<double>>& phys) {
    for (std::size_t i = 0; i < comps.size(); i += 2) {
        if (i + 1 < comps.size()) {
            fft.to_physical(comps[i], comps[i + 1], phys[i], phys[i + 1]);
        } else {
            fft.to_physical(comps[i], {}, phys[i], {});
        }
    }
}

// Spectra of physical fields, transformed in pairs into consecutive components of `out`.
void to_spec(Fft3d& fft, const std::vector<const std::vector<double>*>& fields, SpectralField& out) {
    for (std::size_t i = 0; i < fields.size(); i += 2) {
        const int c = static_cast<int>(i);
        if (i + 1 < fields.size()) {
            fft.to_spectral(*fields[i], *fields[i + 1], out.component(c), out.component(c + 1));
        } else {
            fft.to_spectral(*fields[i], {}, out.component(c), {});
        }
    }
}

// i d * f
inline cplx ider(double d, cplx f) { return {-d * f.imag(), d * f.real()}; }

// L u = mu Lap u + (mu + mu') grad div u, in Fourier variables.
void apply_lame(const TorusGrid& grid, const FluidParams& p, std::span<const cplx> u0, std::span<const cplx> u1,
                std::span<const cplx> u2, std::span<cplx> o0, std::span<cplx> o1, std::span<cplx> o2) {
    const auto& t = mode_tables(grid);
    const double lam = p.mu + p.mu_prime;
    for (std::size_t m = 0; m < grid.size(); ++m) {
        const double x0 = t.xi[0][m], x1 = t.xi[1][m], x2 = t.xi[2][m], k2 = t.xi2[m];
        const cplx dot = x0 * u0[m] + x1 * u1[m] + x2 * u2[m];
        o0[m] = -p.mu * k2 * u0[m] - lam * x0 * dot;
        o1[m] = -p.mu * k2 * u1[m] - lam * x1 * dot;
        o2[m] = -p.mu * k2 * u2[m] - lam * x2 * dot;
    }
}

double check_margin(const std::vector<double>& a, double eps, double floor, double time) {
    double margin = std::numeric_limits<double>::infinity();
    for (double v : a) margin = std::min(margin, 1.0 + eps * v);
    if (!(margin > floor)) {
        throw InstabilityError("positivity margin " + std::to_string(margin) + " at or below floor " +
                                   std::to_string(floor),
                               time);
    }
    return margin;
}

void finish(SpectralField& f, bool dealias) {
    if (dealias) dealias_in_place(f);
}

}  // namespace

std::string to_string(Formulation f) { return f == Formulation::Velocity ? "velocity" : "momentum"; }

Formulation formulation_from_string(const std::string& name) {
    if (name == "velocity") return Formulation::Velocity;
    if (name == "momentum") return Formulation::Momentum;
    throw PreconditionError("unknown formulation '" + name + "' (velocity | momentum)");
}

State::State(SpectralField a_, SpectralField vel_, Formulation f, double t)
    : a(std::move(a_)), vel(std::move(vel_)), formulation(f), time(t) {
    require(a.components() == 1 && vel.components() == 3, "state: a must be scalar and vel a 3-vector");
    require(a.grid() == vel.grid(), "state: a and vel on different grids");
}

SpectralField State::packed() const {
    SpectralField out(grid(), 4);
    out.assign(0, a);
    out.assign(1, vel);
    return out;
}

State State::unpack(const SpectralField& packed, Formulation f, double t) {
    require(packed.components() == 4, "state: packed field must have 4 components");
    return State(packed.slice(0, 1), packed.slice(1, 3), f, t);
}

void StepperConfig::validate() const {
    require(std::isfinite(dt) && dt > 0.0, "stepper: dt must be positive");
    require(order == 2 || order == 4, "stepper: order must be 2 or 4");
    require(snapshot_every >= 1, "stepper: snapshot_every must be >= 1");
    require(positivity_floor > 0.0 && positivity_floor < 1.0, "stepper: positivity_floor must lie in (0, 1)");
}

double positivity_margin(const SpectralField& a, double eps) {
    require(a.components() == 1, "positivity_margin: scalar field expected");
    const auto values = to_physical(a);
    double margin = std::numeric_limits<double>::infinity();
    for (double v : values) margin = std::min(margin, 1.0 + eps * v);
    return margin;
}

namespace {

// Velocity form. `in` and `out` hold (a, u1, u2, u3).
void velocity_kernel(const SpectralField& in, const FluidParams& p, double floor, bool dealias, double time,
                     SpectralField& out) {
    const auto& grid = in.grid();
    const std::size_t N = grid.size();
    auto& fft = fft_engine(grid.n());
    auto& ws = workspace(grid);
    const auto& tab = mode_tables(grid);
    auto& der = ws.derived;
    const auto ah = in.component(0), v0 = in.component(1), v1 = in.component(2), v2 = in.component(3);
    {
        auto w0 = der.component(0), w1 = der.component(1), w2 = der.component(2);
        auto g0 = der.component(6), g1 = der.component(7), g2 = der.component(8);
        for (std::size_t m = 0; m < N; ++m) {
            const double d0 = tab.deriv[0][m], d1 = tab.deriv[1][m], d2 = tab.deriv[2][m];
            w0[m] = ider(d1, v2[m]) - ider(d2, v1[m]);
            w1[m] = ider(d2, v0[m]) - ider(d0, v2[m]);
            w2[m] = ider(d0, v1[m]) - ider(d1, v0[m]);
            g0[m] = ider(d0, ah[m]);
            g1[m] = ider(d1, ah[m]);
            g2[m] = ider(d2, ah[m]);
        }
        apply_lame(grid, p, v0, v1, v2, der.component(3), der.component(4), der.component(5));
    }
    auto& x = ws.phys;
    to_phys(fft,
            {ah, v0, v1, v2, der.component(0), der.component(1), der.component(2), der.component(3),
             der.component(4), der.component(5), der.component(6), der.component(7), der.component(8)},
            x);
    const auto& a = x[0];
    check_margin(a, p.eps, floor, time);

    // Products overwrite buffers that are no longer needed:
    //   x[4..6] <- (omega x u + J L u + K/eps grad a), x[7..9] <- a u, x[10] <- |u|^2 / 2
    for (std::size_t i = 0; i < N; ++i) {
        const double ea = p.eps * a[i];
        const double J = p.pressure.J(ea);
        const double K_eps = p.pressure.K(ea) / p.eps;
        const double u0 = x[1][i], u1 = x[2][i], u2 = x[3][i];
        const double w0 = x[4][i], w1 = x[5][i], w2 = x[6][i];
        // (u.grad)u = grad(|u|^2/2) + omega x u
        const double n0 = w1 * u2 - w2 * u1 + J * x[7][i] + K_eps * x[10][i];
        const double n1 = w2 * u0 - w0 * u2 + J * x[8][i] + K_eps * x[11][i];
        const double n2 = w0 * u1 - w1 * u0 + J * x[9][i] + K_eps * x[12][i];
        x[4][i] = n0;
        x[5][i] = n1;
        x[6][i] = n2;
        x[7][i] = a[i] * u0;
        x[8][i] = a[i] * u1;
        x[9][i] = a[i] * u2;
        x[10][i] = 0.5 * (u0 * u0 + u1 * u1 + u2 * u2);
    }
    auto& f = ws.forward;
    to_spec(fft, {&x[7], &x[8], &x[9], &x[10], &x[4], &x[5], &x[6]}, f);

    auto ra = out.component(0), r0 = out.component(1), r1 = out.component(2), r2 = out.component(3);
    const auto au0 = f.component(0), au1 = f.component(1), au2 = f.component(2), kin = f.component(3);
    const auto n0 = f.component(4), n1 = f.component(5), n2 = f.component(6);
    for (std::size_t m = 0; m < N; ++m) {
        if (dealias && !tab.retained[m]) {
            ra[m] = r0[m] = r1[m] = r2[m] = 0.0;
            continue;
        }
        const double d0 = tab.deriv[0][m], d1 = tab.deriv[1][m], d2 = tab.deriv[2][m];
        ra[m] = -(ider(d0, au0[m]) + ider(d1, au1[m]) + ider(d2, au2[m]));
        r0[m] = -(n0[m] + ider(d0, kin[m]));
        r1[m] = -(n1[m] + ider(d1, kin[m]));
        r2[m] = -(n2[m] + ider(d2, kin[m]));
    }
}

// Momentum form. `in` and `out` hold (a, m1, m2, m3).
void momentum_kernel(const SpectralField& in, const FluidParams& p, double floor, bool dealias, double time,
                     SpectralField& out) {
    const auto& grid = in.grid();
    const std::size_t N = grid.size();
    auto& fft = fft_engine(grid.n());
    auto& ws = workspace(grid);
    const auto& tab = mode_tables(grid);
    auto& x = ws.phys;
    to_phys(fft, {in.component(0), in.component(1), in.component(2), in.component(3)}, x);
    const auto& a = x[0];
    check_margin(a, p.eps, floor, time);

    // x[4..9] <- m_i u_j (symmetric since m = rho u), x[10..12] <- a u, x[3] <- Q(eps a) a^2
    static constexpr int pairs[6][2] = {{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}};
    for (std::size_t i = 0; i < N; ++i) {
        const double rho = 1.0 + p.eps * a[i];
        const double m[3] = {x[1][i], x[2][i], x[3][i]};
        const double u[3] = {m[0] / rho, m[1] / rho, m[2] / rho};
        for (int k = 0; k < 6; ++k) x[4 + k][i] = m[pairs[k][0]] * u[pairs[k][1]];
        for (int c = 0; c < 3; ++c) x[10 + c][i] = a[i] * u[c];
        x[3][i] = p.pressure.Q(p.eps * a[i]) * a[i] * a[i];
    }
    auto& f = ws.forward;
    to_spec(fft, {&x[4], &x[5], &x[6], &x[7], &x[8], &x[9], &x[10], &x[11], &x[12], &x[3]}, f);
    auto& der = ws.derived;
    apply_lame(grid, p, f.component(6), f.component(7), f.component(8), der.component(0), der.component(1),
               der.component(2));

    static constexpr int slot[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
    const auto q = f.component(9);
    for (std::size_t mode = 0; mode < N; ++mode) {
        out.at(0, mode) = 0.0;
        if (dealias && !tab.retained[mode]) {
            for (int i = 0; i < 3; ++i) out.at(1 + i, mode) = 0.0;
            continue;
        }
        for (int i = 0; i < 3; ++i) {
            cplx acc = p.eps * der.at(i, mode) + ider(tab.deriv[i][mode], q[mode]);
            for (int j = 0; j < 3; ++j) acc += ider(tab.deriv[j][mode], f.at(slot[i][j], mode));
            out.at(1 + i, mode) = -acc;
        }
    }
}

Rhs split(const SpectralField& packed) { return {packed.slice(0, 1), packed.slice(1, 3)}; }

}  // namespace

Rhs nonlinearity_velocity(const State& s, const FluidParams& p, double floor, bool dealias) {
    require(s.formulation == Formulation::Velocity, "nonlinearity_velocity: state holds momentum");
    SpectralField out(s.grid(), 4);
    velocity_kernel(s.packed(), p, floor, dealias, s.time, out);
    return split(out);
}

Rhs nonlinearity_momentum(const State& s, const FluidParams& p, double floor, bool dealias) {
    require(s.formulation == Formulation::Momentum, "nonlinearity_momentum: state holds velocity");
    SpectralField out(s.grid(), 4);
    momentum_kernel(s.packed(), p, floor, dealias, s.time, out);
    return split(out);
}

Rhs nonlinearity(const State& state, const FluidParams& params, double floor, bool dealias) {
    return state.formulation == Formulation::Velocity ? nonlinearity_velocity(state, params, floor, dealias)
                                                      : nonlinearity_momentum(state, params, floor, dealias);
}

State convert(const State& state, const FluidParams& params, Formulation target, double floor, bool dealias) {
    if (state.formulation == target) return state;
    const auto& grid = state.grid();
    auto& fft = fft_engine(grid.n());
    std::vector<std::vector<double>> x(4, std::vector<double>(grid.size()));
    to_phys(fft, {state.a.component(0), state.vel.component(0), state.vel.component(1), state.vel.component(2)}, x);
    check_margin(x[0], params.eps, floor, state.time);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double rho = 1.0 + params.eps * x[0][i];
        for (int c = 1; c < 4; ++c) x[c][i] = target == Formulation::Momentum ? x[c][i] * rho : x[c][i] / rho;
    }
    State out(state.a, SpectralField(grid, 3), target, state.time);
    to_spec(fft, {&x[1], &x[2], &x[3]}, out.vel);
    finish(out.vel, dealias);
    return out;
}

namespace {

void check_step_size(double max_xi, const FluidParams& params, const StepperConfig& cfg) {
    if (cfg.order == 2) {
        require(cfg.dt <= 0.5 * params.eps / max_xi * (1.0 + 1e-12),
                "stepper: order 2 needs dt <= 0.5 eps / max|xi| = " + std::to_string(0.5 * params.eps / max_xi));
    }
}

}  // namespace

void validate_stepper(const TorusGrid& grid, const FluidParams& params, const StepperConfig& cfg) {
    cfg.validate();
    params.validate();
    double max_xi = 0.0;
    for (std::size_t m = 0; m < grid.size(); ++m) {
        const bool kept = cfg.dealias ? retained_by_two_thirds(grid, m) : !grid.is_nyquist(m);
        if (kept) max_xi = std::max(max_xi, norm(grid.frequency(m)));
    }
    check_step_size(max_xi, params, cfg);
}

Stepper::Stepper(const TorusGrid& grid, const FluidParams& params, const StepperConfig& cfg)
    : grid_(grid), params_(params), cfg_(cfg) {
    params.validate();
    cfg.validate();
    double max_xi = 0.0;
    for (std::size_t m = 0; m < grid.size(); ++m) {
        const std::size_t partner = grid.partner(m);
        const bool kept = cfg.dealias ? retained_by_two_thirds(grid, m) : !grid.is_nyquist(m);
        if (!kept) {
            dropped_.push_back(m);
            continue;
        }
        max_xi = std::max(max_xi, norm(grid.frequency(m)));
        if (partner < m) continue;
        modes_.push_back(m);
        partners_.push_back(partner);
    }
    check_step_size(max_xi, params, cfg);
    full_.reserve(modes_.size());
    half_.reserve(modes_.size());
    for (std::size_t m : modes_) {
        const linear::ModePropagator prop(grid.frequency(m), params);
        full_.push_back(prop(cfg.dt));
        half_.push_back(prop(0.5 * cfg.dt));
    }
}

void Stepper::apply_table(const std::vector<Mat4>& table, SpectralField& packed) const {
    std::array<std::span<cplx>, 4> c = {packed.component(0), packed.component(1), packed.component(2),
                                        packed.component(3)};
    for (std::size_t i = 0; i < modes_.size(); ++i) {
        const std::size_t m = modes_[i], q = partners_[i];
        const Mat4& T = table[i];
        const cplx u[4] = {c[0][m], c[1][m], c[2][m], c[3][m]};
        for (int r = 0; r < 4; ++r) c[r][m] = T(r, 0) * u[0] + T(r, 1) * u[1] + T(r, 2) * u[2] + T(r, 3) * u[3];
        if (q != m) {
            const cplx w[4] = {c[0][q], c[1][q], c[2][q], c[3][q]};
            for (int r = 0; r < 4; ++r) {
                c[r][q] = std::conj(T(r, 0)) * w[0] + std::conj(T(r, 1)) * w[1] + std::conj(T(r, 2)) * w[2] +
                          std::conj(T(r, 3)) * w[3];
            }
        }
    }
    for (std::size_t m : dropped_)
        for (int r = 0; r < 4; ++r) c[r][m] = 0.0;
}

SpectralField Stepper::apply_linear(const SpectralField& packed, double t) const {
    require(packed.components() == 4 && packed.grid() == grid_, "stepper: packed 4-component field expected");
    SpectralField out(grid_, 4);
    for (std::size_t i = 0; i < modes_.size(); ++i) {
        const std::size_t m = modes_[i], q = partners_[i];
        const Mat4 phi = linear::ModePropagator(grid_.frequency(m), params_)(t);
        Vec4 u;
        for (int c = 0; c < 4; ++c) u(c) = packed.at(c, m);
        const Vec4 v = phi * u;
        for (int c = 0; c < 4; ++c) out.at(c, m) = v(c);
        if (q != m) {
            for (int c = 0; c < 4; ++c) u(c) = packed.at(c, q);
            const Vec4 w = phi.conjugate() * u;
            for (int c = 0; c < 4; ++c) out.at(c, q) = w(c);
        }
    }
    return out;
}

void Stepper::rhs(const SpectralField& packed, Formulation f, double t, SpectralField& out) const {
    if (!cfg_.nonlinear) {
        for (auto& v : out.data()) v = 0.0;
        return;
    }
    if (f == Formulation::Velocity) {
        velocity_kernel(packed, params_, cfg_.positivity_floor, cfg_.dealias, t, out);
    } else {
        momentum_kernel(packed, params_, cfg_.positivity_floor, cfg_.dealias, t, out);
    }
}

namespace {
// y += s x
void axpy(SpectralField& y, double s, const SpectralField& x) {
    auto yd = y.data();
    const auto xd = x.data();
    for (std::size_t i = 0; i < yd.size(); ++i) yd[i] += s * xd[i];
}
}  // namespace

State Stepper::step(const State& state) const {
    require(state.grid() == grid_, "stepper: grid mismatch");
    const double h = cfg_.dt, t = state.time;
    const Formulation f = state.formulation;
    const SpectralField un = state.packed();
    SpectralField k1(grid_, 4), k2(grid_, 4), tmp(grid_, 4), next(grid_, 4);

    if (cfg_.order == 2) {
        rhs(un, f, t, k1);
        tmp = un;
        axpy(tmp, h, k1);
        apply_table(full_, tmp);
        rhs(tmp, f, t + h, k2);
        next = un;
        axpy(next, 0.5 * h, k1);
        apply_table(full_, next);
        axpy(next, 0.5 * h, k2);
    } else {
        SpectralField k3(grid_, 4), k4(grid_, 4);
        rhs(un, f, t, k1);
        tmp = un;
        axpy(tmp, 0.5 * h, k1);
        apply_table(half_, tmp);  // U_a
        rhs(tmp, f, t + 0.5 * h, k2);
        tmp = un;
        apply_table(half_, tmp);
        axpy(tmp, 0.5 * h, k2);  // U_b
        rhs(tmp, f, t + 0.5 * h, k3);
        next = k3;
        apply_table(half_, next);
        tmp = un;
        apply_table(full_, tmp);
        axpy(tmp, h, next);  // U_c
        rhs(tmp, f, t + h, k4);
        // Phi_h (U_n + h/6 k1) + h/3 Phi_{h/2} (k2 + k3) + h/6 k4
        axpy(k2, 1.0, k3);
        apply_table(half_, k2);
        next = un;
        axpy(next, h / 6.0, k1);
        apply_table(full_, next);
        axpy(next, h / 3.0, k2);
        axpy(next, h / 6.0, k4);
    }
    if (!next.all_finite()) throw InstabilityError("non-finite coefficients after step", t + h);
    return State::unpack(next, f, t + h);
}

State step(const State& state, const FluidParams& params, const StepperConfig& cfg) {
    return Stepper(state.grid(), params, cfg).step(state);
}

RunResult simulate(const State& initial, const FluidParams& params, const StepperConfig& cfg, double T) {
    cfg.validate();
    require(std::isfinite(T) && T > 0.0, "simulate: horizon must be positive");
    const auto nsteps = static_cast<std::size_t>(std::ceil(T / cfg.dt - 1e-9));
    StepperConfig run_cfg = cfg;
    run_cfg.dt = T / static_cast<double>(nsteps);
    const Stepper stepper(initial.grid(), params, run_cfg);

    RunResult result{lp::TimeSeries{}, RunReport{}, initial};
    auto& rep = result.report;
    rep.dt_effective = run_cfg.dt;
    rep.mean_a_initial = initial.a.at(0, 0).real();

    State state = initial;
    state.time = 0.0;
    auto record = [&](const State& s) {
        const auto vel = convert(s, params, Formulation::Velocity, cfg.positivity_floor, cfg.dealias);
        result.series.times.push_back(s.time);
        result.series.snapshots.push_back(vel.packed());
        rep.margin_times.push_back(s.time);
        rep.margins.push_back(positivity_margin(s.a, params.eps));
        rep.max_hermitian_defect = std::max(rep.max_hermitian_defect, s.a.hermitian_defect());
        rep.max_hermitian_defect = std::max(rep.max_hermitian_defect, s.vel.hermitian_defect());
    };
    try {
        record(state);
        for (std::size_t n = 1; n <= nsteps; ++n) {
            state = stepper.step(state);
            if (n == nsteps) state.time = T;
            rep.steps = n;
            rep.max_mean_drift = std::max(rep.max_mean_drift, std::abs(state.a.at(0, 0).real() - rep.mean_a_initial));
            if (n % static_cast<std::size_t>(cfg.snapshot_every) == 0 || n == nsteps) record(state);
        }
    } catch (const InstabilityError& e) {
        rep.stable = false;
        rep.failure_time = e.time();
        rep.failure = e.what();
    }
    rep.mean_a_final = state.a.at(0, 0).real();
    result.final_state = state;
    return result;
}

std::string to_string(Recipe r) {
    switch (r) {
        case Recipe::RandomBand: return "random-band";
        case Recipe::GaussianBump: return "gaussian-bump";
        case Recipe::SingleMode: return "single-mode";
        case Recipe::LargeData: return "large-data";
    }
    return "?";
}

Recipe recipe_from_string(const std::string& name) {
    for (Recipe r : {Recipe::RandomBand, Recipe::GaussianBump, Recipe::SingleMode, Recipe::LargeData})
        if (to_string(r) == name) return r;
    throw PreconditionError("unknown data recipe '" + name +
                            "' (random-band | gaussian-bump | single-mode | large-data)");
}

InitialData make_initial_data(const InitialDataSpec& spec, const TorusGrid& grid, const FluidParams& params,
                              double positivity_floor) {
    params.validate();
    require(spec.amplitude >= 0.0 && std::isfinite(spec.amplitude), "initial data: amplitude must be >= 0");
    require(spec.a_fraction >= 0.0 && std::isfinite(spec.a_fraction), "initial data: a_fraction must be >= 0");
    SpectralField a(grid, 1), u(grid, 3);

    switch (spec.recipe) {
        case Recipe::RandomBand:
        case Recipe::LargeData: {
            require(spec.kmin >= 0.0 && spec.kmin <= spec.kmax, "initial data: need 0 <= kmin <= kmax");
            std::mt19937_64 rng(spec.seed);
            std::normal_distribution<double> gauss;
            for (int c = 0; c < 4; ++c) {
                auto& target = c == 0 ? a : u;
                const int comp = c == 0 ? 0 : c - 1;
                for (std::size_t m = 1; m < grid.size(); ++m) {
                    const auto k = grid.wavevector(m);
                    const double r = std::sqrt(double(k[0] * k[0] + k[1] * k[1] + k[2] * k[2]));
                    if (r < spec.kmin || r > spec.kmax || !retained_by_two_thirds(grid, m)) continue;
                    const double re = gauss(rng), im = gauss(rng);
                    target.at(comp, m) = cplx(re, im);
                }
            }
            break;
        }
        case Recipe::GaussianBump: {
            require(spec.width > 0.0, "initial data: bump width must be positive");
            const int n = grid.n();
            const double L = grid.length();
            std::vector<double> psi(grid.size());
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k) {
                        const double x = grid.coordinate(i) - 0.5 * L, y = grid.coordinate(j) - 0.5 * L,
                                     z = grid.coordinate(k) - 0.5 * L;
                        psi[grid.flat(i, j, k)] = std::exp(-(x * x + y * y + z * z) / (2.0 * spec.width * spec.width));
                    }
            const auto P = to_spectral(grid, psi, 1);
            for (std::size_t m = 0; m < grid.size(); ++m) {
                a.at(0, m) = P.at(0, m);
                // swirl (d2 psi, -d1 psi, 0)
                u.at(0, m) = derivative_symbol(grid, m, 1) * P.at(0, m);
                u.at(1, m) = -derivative_symbol(grid, m, 0) * P.at(0, m);
            }
            a.at(0, 0) = 0.0;
            break;
        }
        case Recipe::SingleMode: {
            require(spec.mode_component >= 0 && spec.mode_component <= 3, "initial data: mode_component in [0, 3]");
            const auto& k = spec.mode;
            require(k[0] != 0 || k[1] != 0 || k[2] != 0, "initial data: single mode must be nonzero");
            const int n = grid.n();
            for (int c = 0; c < 3; ++c)
                require(3 * std::abs(k[c]) <= n, "initial data: single mode outside the 2/3 retained set");
            const auto idx = grid.flat(grid.storage_index(k[0]), grid.storage_index(k[1]), grid.storage_index(k[2]));
            auto& target = spec.mode_component == 0 ? a : u;
            const int comp = spec.mode_component == 0 ? 0 : spec.mode_component - 1;
            target.at(comp, idx) = 0.5;
            target.at(comp, grid.partner(idx)) = 0.5;
            break;
        }
    }
    a.symmetrize();
    u.symmetrize();
    dealias_in_place(a);
    dealias_in_place(u);
    if (spec.solenoidal) {
        for (std::size_t m = 1; m < grid.size(); ++m) {
            const auto xi = grid.frequency(m);
            const double x2 = xi[0] * xi[0] + xi[1] * xi[1] + xi[2] * xi[2];
            const cplx dot = xi[0] * u.at(0, m) + xi[1] * u.at(1, m) + xi[2] * u.at(2, m);
            for (int c = 0; c < 3; ++c) u.at(c, m) -= xi[c] * dot / x2;
        }
    }

    const auto part = lp::make_partition(grid);
    const lp::BesovSpec half{2.0, 1.0, 0.5, {}};
    double su = 0.0, sa = 0.0;
    if (spec.recipe == Recipe::LargeData) {
        su = lp::besov_norm(u, half, part);
        sa = lp::besov_norm(a, half, part);
    } else {
        su = lp::lp_norm(u, lp::kInf);
        sa = lp::lp_norm(a, lp::kInf);
    }
    const double target_u = spec.recipe == Recipe::SingleMode && spec.mode_component == 0 ? 0.0 : spec.amplitude;
    const double target_a =
        spec.recipe == Recipe::SingleMode ? (spec.mode_component == 0 ? spec.amplitude : 0.0)
                                          : spec.a_fraction * spec.amplitude;
    require(target_u == 0.0 || su > 0.0, "initial data: velocity shape is zero, target norm unreachable");
    require(target_a == 0.0 || sa > 0.0, "initial data: density shape is zero, target norm unreachable");
    u *= su > 0.0 ? target_u / su : 0.0;
    a *= sa > 0.0 ? target_a / sa : 0.0;

    InitialData out{State(a, u, Formulation::Velocity, 0.0), {}};
    const double margin = positivity_margin(a, params.eps);
    require(margin > positivity_floor, "initial data: target amplitude leaves 1 + eps a0 below the positivity floor");
    const lp::BesovSpec low{2.0, lp::kInf, -1.5, {}}, high{2.0, 1.0, 1.5, {}};
    out.norms = {
        {"a0_B^{-3/2}_{2,inf}", lp::besov_norm(a, low, part)},
        {"a0_B^{1/2}_{2,1}", lp::besov_norm(a, half, part)},
        {"a0_B^{3/2}_{2,1}", lp::besov_norm(a, high, part)},
        {"u0_B^{-3/2}_{2,inf}", lp::besov_norm(u, low, part)},
        {"u0_B^{1/2}_{2,1}", lp::besov_norm(u, half, part)},
        {"a0_Linf", lp::lp_norm(a, lp::kInf)},
        {"u0_Linf", lp::lp_norm(u, lp::kInf)},
        {"positivity_margin", margin},
    };
    return out;
}

}  // namespace nsc::sim
