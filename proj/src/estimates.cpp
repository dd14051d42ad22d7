#include "nsc/estimates.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "nsc/errors.hpp"

namespace nsc::est {

using lp::BandTable;
using lp::kInf;
using lp::Truncation;

double NormSuiteSpec::low_cut(const FluidParams& p) const { return std::abs(p.Omega) * p.eps; }

double NormSuiteSpec::alpha_value(const FluidParams& p) const { return alpha ? *alpha : low_cut(p); }

void NormSuiteSpec::validate(const FluidParams& p) const {
    p.validate();
    const double tol = 1e-12;
    require(std::isfinite(r) && r > 2.0, "norm suite: 2 < r < inf required");
    if (theorem_regime) {
        require(q > 2.0 && q < 3.0, "norm suite: 2 < q < 3 required");
        require(1.0 / q + 1.0 / r <= 0.5 + tol, "norm suite: 1/q + 1/r <= 1/2 required");
        require(2.0 / r <= 3.0 / q - 0.5 + tol, "norm suite: 2/r <= 3/q - 1/2 required");
        require(-3.0 / q <= -1.5 + 4.0 / r + tol, "norm suite: -3/q <= -3/2 + 4/r required");
        require(-1.5 + 4.0 / r < 3.0 / q, "norm suite: -3/2 + 4/r < 3/q required");
    } else {
        require(q >= 2.0, "norm suite: q >= 2 required");
    }
    require(std::isfinite(beta0) && beta0 > 0.0, "norm suite: beta0 > 0 required");
    const double lo = low_cut(p), hi = high_cut(p);
    require(lo < hi, "norm suite: |Omega| eps < beta0 / eps required");
    if (alpha) {
        require(*alpha > lo, "norm suite: alpha > |Omega| eps required");
    }
    require(alpha_value(p) < hi, "norm suite: alpha < beta0 / eps required");
}

double NormReport::get(const std::string& name) const {
    for (const auto& s : summands)
        if (s.name == name) return s.value;
    throw PreconditionError("norm report: no summand named '" + name + "'");
}

NormTables NormTables::build(const lp::TimeSeries& series, const lp::DyadicPartition& part, double q) {
    series.validate();
    require(!series.snapshots.empty() && series.snapshots.front().components() == 4,
            "norm tables: snapshots must hold (a, u1, u2, u3)");
    NormTables t;
    const lp::Components pair{0, 4}, a{0, 1}, u{1, 3};
    t.pair2 = BandTable::build(series, part, 2.0, pair);
    t.a2 = BandTable::build(series, part, 2.0, a);
    t.u2 = BandTable::build(series, part, 2.0, u);
    if (q == 2.0) {
        t.pairq = t.pair2;
        t.aq = t.a2;
        t.uq = t.u2;
    } else {
        t.pairq = BandTable::build(series, part, q, pair);
        t.aq = BandTable::build(series, part, q, a);
        t.uq = BandTable::build(series, part, q, u);
    }
    return t;
}

NormTables NormTables::prefix(std::size_t last) const {
    return {pair2.prefix(last), a2.prefix(last), u2.prefix(last),
            pairq.prefix(last), aq.prefix(last), uq.prefix(last)};
}

NormTables NormTables::scaled(double factor) const {
    return {pair2.scaled(factor), a2.scaled(factor), u2.scaled(factor),
            pairq.scaled(factor), aq.scaled(factor), uq.scaled(factor)};
}

namespace {

bool selects_any(const BandTable& t, const Truncation& tr) {
    for (int j = t.bands.lo; j <= t.bands.hi; ++j)
        if (tr.selects(j)) return true;
    return false;
}

// Chemin-Lerner (time norm inside the band sum) or plain L^r(Besov) summand.
struct Term {
    NormReport& report;
    void cl(const std::string& name, const BandTable& t, double s, double sigma, double r, const Truncation& tr,
            double weight = 1.0) {
        add(name, t, tr, weight * lp::chemin_lerner(t, s, sigma, r, tr));
    }
    void lr(const std::string& name, const BandTable& t, double s, double sigma, double r, const Truncation& tr,
            double weight = 1.0) {
        add(name, t, tr, weight * lp::lr_besov(t, s, sigma, r, tr));
    }
    void add(const std::string& name, const BandTable& t, const Truncation& tr, double value) {
        report.summands.push_back({name, value, !selects_any(t, tr)});
        report.total += value;
    }
};

void require_interval(const NormTables& t) {
    require(t.size() >= 2, "norms: at least two snapshots are needed for time integrals");
}

}  // namespace

NormReport compute_E(const NormTables& t, const FluidParams& p, const NormSuiteSpec& spec) {
    p.validate();
    require(spec.beta0 > 0.0 && spec.low_cut(p) < spec.high_cut(p), "energy norm: |Omega| eps < beta0 / eps required");
    require_interval(t);
    const double lo = spec.low_cut(p), hi = spec.high_cut(p), e = p.eps;
    const auto low = Truncation::low(lo), low_hi = Truncation::low(hi), mid = Truncation::mid(lo, hi),
               high = Truncation::high(hi);
    NormReport rep;
    rep.t = t.pair2.times.back();
    Term add{rep};
    add.cl("(a,u) L~inf B^-1/2_2,1 l;b0/eps", t.pair2, -0.5, 1.0, kInf, low_hi);
    add.cl("u L~2 B^1/2_2,1 l;b0/eps", t.u2, 0.5, 1.0, 2.0, low_hi);
    add.lr("(a,u) Linf B^-3/2_2,inf l;|W|eps", t.pair2, -1.5, kInf, kInf, low);
    add.cl("(a,u) L~1 B^5/2_2,inf l;|W|eps", t.pair2, 2.5, kInf, 1.0, low);
    add.cl("(a,u) L~inf B^1/2_2,1 m;|W|eps,b0/eps", t.pair2, 0.5, 1.0, kInf, mid);
    add.lr("(a,u) L1 B^5/2_2,1 m;|W|eps,b0/eps", t.pair2, 2.5, 1.0, 1.0, mid);
    add.cl("a L~2 B^1/2_2,1 m;|W|eps,b0/eps", t.a2, 0.5, 1.0, 2.0, mid);
    add.cl("eps a L~inf B^3/2_2,1 h;b0/eps", t.a2, 1.5, 1.0, kInf, high, e);
    add.lr("a/eps L1 B^3/2_2,1 h;b0/eps", t.a2, 1.5, 1.0, 1.0, high, 1.0 / e);
    add.cl("u L~inf B^1/2_2,1 h;b0/eps", t.u2, 0.5, 1.0, kInf, high);
    add.lr("u L1 B^5/2_2,1 h;b0/eps", t.u2, 2.5, 1.0, 1.0, high);
    return rep;
}

NormReport compute_E(const lp::TimeSeries& series, const FluidParams& p, const NormSuiteSpec& spec,
                     const lp::DyadicPartition& part) {
    return compute_E(NormTables::build(series, part, 2.0), p, spec);
}

NormReport compute_A(const NormTables& t, const FluidParams& p, const NormSuiteSpec& spec) {
    spec.validate(p);
    require_interval(t);
    const double q = spec.q, r = spec.r, rp = spec.r_prime(), e = p.eps;
    const double lo = spec.low_cut(p), hi = spec.high_cut(p), al = spec.alpha_value(p);
    const auto low = Truncation::low(lo), low_hi = Truncation::low(hi), high = Truncation::high(hi);
    NormReport rep;
    rep.t = t.pairq.times.back();
    Term add{rep};
    add.cl("(a,u) L~r' B^{3/q-3+4/r'}_q,inf l;|W|eps", t.pairq, 3 / q - 3 + 4 / rp, kInf, rp, low);
    add.cl("(a,u) L~r B^{3/q-3+4/r}_q,inf l;b0/eps", t.pairq, 3 / q - 3 + 4 / r, kInf, r, low_hi);
    // An empty middle range (alpha = |Omega| eps) contributes nothing.
    if (lo < al) {
        add.cl("(a,u) L~r B^{3/q-1+2/r}_q,1 m;|W|eps,alpha", t.pairq, 3 / q - 1 + 2 / r, 1.0, r,
               Truncation::mid(lo, al));
    } else {
        rep.summands.push_back({"(a,u) L~r B^{3/q-1+2/r}_q,1 m;|W|eps,alpha", 0.0, true});
    }
    const auto upper = Truncation::mid(al, hi);
    add.cl("(a,u) L~inf B^{3/q-1}_q,1 m;alpha,b0/eps", t.pairq, 3 / q - 1, 1.0, kInf, upper);
    add.lr("(a,u) L1 B^{3/q+1}_q,1 m;alpha,b0/eps", t.pairq, 3 / q + 1, 1.0, 1.0, upper);
    add.cl("eps a L~inf B^{3/q}_q,1 h;b0/eps", t.aq, 3 / q, 1.0, kInf, high, e);
    add.lr("a/eps L1 B^{3/q}_q,1 h;b0/eps", t.aq, 3 / q, 1.0, 1.0, high, 1.0 / e);
    add.cl("u L~inf B^{3/q-1}_q,1 h;b0/eps", t.uq, 3 / q - 1, 1.0, kInf, high);
    add.lr("u L1 B^{3/q+1}_q,1 h;b0/eps", t.uq, 3 / q + 1, 1.0, 1.0, high);
    return rep;
}

NormReport compute_A(const lp::TimeSeries& series, const FluidParams& p, const NormSuiteSpec& spec,
                     const lp::DyadicPartition& part) {
    spec.validate(p);
    return compute_A(NormTables::build(series, part, spec.q), p, spec);
}

namespace {

double besov(const SpectralField& f, double s, double sigma, const lp::DyadicPartition& part, lp::Components c,
             Truncation tr = {}) {
    return lp::besov_norm(f, {2.0, sigma, s, tr}, part, c);
}

const lp::Components kPair{0, 4}, kA{0, 1}, kU{1, 3};

}  // namespace

DataFunctionals compute_data_functionals(const sim::State& initial, const FluidParams& p,
                                         const lp::DyadicPartition& part) {
    require(initial.formulation == sim::Formulation::Velocity, "data functionals: velocity variables expected");
    const auto f = initial.packed();
    const double pair_low = besov(f, -1.5, kInf, part, kPair);
    const double a_low = besov(f, -1.5, kInf, part, kA), u_low = besov(f, -1.5, kInf, part, kU);
    const double a_high = besov(f, 1.5, 1.0, part, kA);
    const double u_half = besov(f, 0.5, 1.0, part, kU);
    DataFunctionals d;
    d.b_half = besov(f, 0.5, 1.0, part, kPair);
    d.d_star = pair_low + p.eps * a_high * u_low;
    d.d_eps = d.d_star + d.b_half + p.eps * a_high;
    d.d = a_low + a_high + u_low + u_half + a_high * a_low;
    d.d_mixed = a_low + a_high + u_low + u_half + a_high * u_low;
    return d;
}

double data_tail(const sim::State& initial, const lp::DyadicPartition& part, double alpha) {
    const auto f = initial.packed();
    const auto h = Truncation::high(alpha);
    return besov(f, 0.5, 1.0, part, kPair, h) + besov(f, 1.5, 1.0, part, kA, h);
}

double alpha_delta(const sim::State& initial, const lp::DyadicPartition& part, double delta) {
    require(delta > 0.0, "alpha_delta: delta must be positive");
    const auto bands = part.bands();
    for (int j = std::max(0, bands.lo); j <= bands.hi; ++j) {
        const double a = std::ldexp(1.0, j);
        if (data_tail(initial, part, a) <= delta) return a;
    }
    return std::ldexp(1.0, std::max(0, bands.hi));
}

std::vector<std::size_t> time_ladder(const std::vector<double>& times, int per_decade) {
    require(times.size() >= 2, "time ladder: at least two snapshots needed");
    require(per_decade >= 1, "time ladder: per_decade must be >= 1");
    std::vector<std::size_t> idx;
    const double t_first = times[1], t_last = times.back();
    for (int k = 0;; ++k) {
        const double target = t_last * std::pow(10.0, -static_cast<double>(k) / per_decade);
        if (target < t_first * (1 - 1e-12)) break;
        // last snapshot with time <= target
        const auto it = std::upper_bound(times.begin(), times.end(), target * (1 + 1e-12));
        const auto i = static_cast<std::size_t>(std::distance(times.begin(), it)) - 1;
        if (i >= 1) idx.push_back(i);
    }
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    return idx;
}

namespace {

struct AeValues {
    double lhs[4];
    double rhs[4];
};

AeValues ae_values(const NormTables& t, const FluidParams& p, const NormSuiteSpec& spec) {
    const double q = spec.q, r = spec.r, rp = spec.r_prime();
    const double E = compute_E(t, p, spec).total, A = compute_A(t, p, spec).total;
    const double al = spec.alpha_value(p);
    const auto full = Truncation::full();
    AeValues v{};
    v.lhs[0] = p.eps * lp::chemin_lerner(t.aq, 3 / q, 1.0, kInf, full);
    v.rhs[0] = p.eps * al * E + A;
    v.lhs[1] = lp::chemin_lerner(t.pairq, 3 / q - 1 + 2 / r, 1.0, r, full);
    v.rhs[1] = A;
    v.lhs[2] = lp::chemin_lerner(t.pairq, 3 / q, 1.0, 2.0, full) + lp::chemin_lerner(t.pairq, 3 / q - 1, kInf, 2.0, full);
    v.rhs[2] = A + std::pow(A, r / (2 * (r - 1))) * std::pow(E, (r - 2) / (2 * (r - 1)));
    v.lhs[3] = lp::chemin_lerner(t.aq, 3 / q - 1 + 2 / rp, 1.0, rp, Truncation::low(4 * spec.beta0 / p.eps)) +
               lp::chemin_lerner(t.uq, 3 / q - 1 + 2 / rp, 1.0, rp, full);
    v.rhs[3] = A;
    return v;
}

}  // namespace

std::vector<RatioStats> lemma_AE_check(const std::vector<lp::TimeSeries>& runs, const FluidParams& p,
                                       const NormSuiteSpec& spec, const lp::DyadicPartition& part,
                                       double scale_probe) {
    spec.validate(p);
    require(scale_probe > 0.0 && scale_probe != 1.0, "AE check: scale_probe must be positive and != 1");
    std::vector<RatioStats> stats(4);
    for (std::size_t k = 0; k < 4; ++k) stats[k].name = "AE-" + std::to_string(k + 1);
    for (const auto& run : runs) {
        if (run.size() < 2) continue;
        const auto tables = NormTables::build(run, part, spec.q);
        for (std::size_t i : time_ladder(run.times)) {
            const auto t = tables.prefix(i);
            const auto v = ae_values(t, p, spec);
            const auto w = ae_values(t.scaled(scale_probe), p, spec);
            for (int k = 0; k < 4; ++k) {
                auto& s = stats[static_cast<std::size_t>(k)];
                if (!(v.rhs[k] > 0.0) || !(w.rhs[k] > 0.0)) {
                    ++s.skipped;
                    continue;
                }
                const double ratio = v.lhs[k] / v.rhs[k], scaled = w.lhs[k] / w.rhs[k];
                ++s.samples;
                s.max_ratio = std::max(s.max_ratio, ratio);
                if (ratio > 0.0) s.scaling_deviation = std::max(s.scaling_deviation, std::abs(scaled - ratio) / ratio);
            }
        }
    }
    return stats;
}

namespace {

void finish(InequalityReport& rep) {
    const std::size_t fit = std::max<std::size_t>(1, rep.rows.size() / 4);
    rep.fitted = 0.0;
    for (std::size_t i = 0; i < std::min(fit, rep.rows.size()); ++i) rep.fitted = std::max(rep.fitted, rep.rows[i].ratio);
    rep.all_hold = true;
    for (auto& row : rep.rows) {
        const double bound = rep.fitted * row.rhs;
        row.holds = row.lhs <= bound * (1 + 1e-12) || row.lhs == 0.0;
        row.tightness = bound > 0.0 ? row.lhs / bound : (row.lhs == 0.0 ? 0.0 : kInf);
        rep.all_hold = rep.all_hold && row.holds;
    }
}

void push(InequalityReport& rep, double t, double lhs, double rhs) {
    InequalityRow row;
    row.t = t;
    row.lhs = lhs;
    row.rhs = rhs;
    row.ratio = rhs > 0.0 ? lhs / rhs : (lhs == 0.0 ? 0.0 : kInf);
    rep.rows.push_back(row);
}

}  // namespace

AprioriReport apriori_diagnostic(const sim::RunResult& run, const sim::State& initial, const FluidParams& p,
                                 const NormSuiteSpec& spec, const lp::DyadicPartition& part) {
    spec.validate(p);
    require(run.series.size() >= 2, "apriori: the run needs at least two snapshots for time quadrature");
    AprioriReport rep;
    rep.data = compute_data_functionals(initial, p, part);
    rep.alpha = spec.alpha_value(p);
    rep.delta = data_tail(initial, part, rep.alpha);

    const double q = spec.q, r = spec.r, rp = spec.r_prime(), e = p.eps, al = rep.alpha;
    const double we = spec.low_cut(p);
    const double rot = p.Omega != 0.0 ? std::pow(std::abs(p.Omega), -1.0 / r) : kInf;
    const auto tables = NormTables::build(run.series, part, q);
    const auto low = Truncation::low(we), full = Truncation::full();

    std::vector<InequalityReport> ineq(6);
    for (std::size_t k = 0; k < ineq.size(); ++k)
        ineq[k].name = std::array{"E", "A", "low-1", "low-2", "low-3", "low-4"}[k];
    for (std::size_t i : time_ladder(run.series.times)) {
        const auto t = tables.prefix(i);
        const double time = t.pair2.times.back();
        const double E = compute_E(t, p, spec).total, A = compute_A(t, p, spec).total;
        rep.times.push_back(time);
        rep.E.push_back(E);
        rep.A.push_back(A);

        const double mixed = std::pow(A, r / (r - 1)) * std::pow(E, (r - 2) / (r - 1));
        const double quad = A * A + mixed;
        const double lin = e * al * E + A;
        const double rhs_E = rep.data.d_eps + (1 + lin) * quad + lin * lin + lin * E + e * E * E +
                             std::pow(A, r / (2 * (r - 1))) * std::pow(E, (r - 2) / (2 * (r - 1)) + 1);
        const double rhs_A = rep.delta + (1 + lin) * quad + rot * (1 + E) * E * E + rot * quad + lin * lin + mixed;
        push(ineq[0], time, E, rhs_E);
        push(ineq[1], time, A, rhs_A);

        // Low-frequency pieces; X = |(a,u)|_{L~2 B^{3/q-1}_{q,inf}}.
        const double X = lp::chemin_lerner(t.pairq, 3 / q - 1, kInf, 2.0, full);
        const double amp = 1 + e * lp::chemin_lerner(t.aq, 3 / q, 1.0, kInf, full);
        const double a_half = lp::chemin_lerner(t.a2, 0.5, 1.0, kInf, full);
        const double ds = rep.data.d_star;
        const double w2r = std::pow(we, 2 / r);

        push(ineq[2], time, lp::lr_besov(t.pair2, -1.5, kInf, kInf, low),
             ds + amp * X * X + e * a_half * lp::lr_besov(t.u2, -0.5, kInf, kInf, full));
        push(ineq[3], time, lp::chemin_lerner(t.pairq, 3 / q - 3 + 4 / r, kInf, r, low),
             w2r * ds + w2r * amp * X * X + e * a_half * lp::chemin_lerner(t.uq, 3 / q - 2 + 4 / r, kInf, r, full));
        const double u_r2 = lp::chemin_lerner(t.uq, 3 / q, 1.0, 2.0, full) +
                            lp::chemin_lerner(t.uq, 3 / q - 1 + 2 / r, 1.0, r, full);
        push(ineq[4], time, lp::chemin_lerner(t.pairq, 3 / q - 3 + 4 / rp, kInf, rp, low),
             w2r * ds + w2r * amp * X * X +
                 e * lp::chemin_lerner(t.aq, 3 / q - 2 / r, kInf, kInf, full) *
                     lp::chemin_lerner(t.uq, 3 / q - 1 + 2 / rp, kInf, rp, full) +
                 p.Omega * p.Omega * e * e * e * lp::chemin_lerner(t.aq, 3 / q, 1.0, 2.0, full) * u_r2);
        push(ineq[5], time, lp::chemin_lerner(t.pair2, 2.5, kInf, 1.0, low), we * we * ds + we * we * amp * X * X);
    }
    for (auto& r_ : ineq) finish(r_);
    rep.inequalities = std::move(ineq);

    const auto f = initial.packed();
    const double data_norm = besov(f, -1.5, kInf, part, kPair) + besov(f, 0.5, 1.0, part, kPair);
    const double a2r = std::pow(al, 2 / r) * rot;
    rep.choice = {
        {"alpha^{2/r} |Omega|^{-1/r}", a2r},
        {"(|Omega| eps)^{2/r} D*_eps", std::pow(we, 2 / r) * rep.data.d_star},
        {"alpha^{2/r} |Omega|^{-1/r} |(a0,u0)|_{B^-3/2_2,inf & B^1/2_2,1}", a2r * data_norm},
        {"eps alpha D_eps", e * al * rep.data.d_eps},
    };

    const auto n = rep.E.size();
    if (!run.report.stable && n >= 3) rep.growth_before_failure = rep.E[n - 1] > rep.E[n - 2] && rep.E[n - 2] > rep.E[n - 3];
    return rep;
}

std::vector<ProbeCell> continuation_probe(const sim::State& initial, const FluidParams& base,
                                          const std::vector<std::pair<double, double>>& omega_eps,
                                          const NormSuiteSpec& spec, const ProbeConfig& cfg,
                                          const lp::DyadicPartition& part) {
    require(!omega_eps.empty(), "continuation probe: empty parameter grid");
    require(cfg.horizon > 0.0 && cfg.multiplier >= 1.0, "continuation probe: horizon > 0 and multiplier >= 1 required");
    std::vector<ProbeCell> cells;
    for (const auto& [W, eps] : omega_eps) {
        FluidParams p = base;
        p.Omega = W;
        p.eps = eps;
        spec.validate(p);
        ProbeCell cell;
        cell.Omega = W;
        cell.eps = eps;
        sim::RunResult run{{}, {}, initial};
        try {
            run = sim::simulate(initial, p, cfg.stepper, cfg.horizon);
            cell.stable = run.report.stable;
            cell.failure_time = run.report.failure_time;
            cell.failure = run.report.failure;
        } catch (const std::exception& ex) {
            cell.stable = false;
            cell.failure_time = 0.0;
            cell.failure = ex.what();
        }
        if (run.series.size() >= 2) {
            const auto tables = NormTables::build(run.series, part, spec.q);
            const double t_early = cfg.early_fraction * cfg.horizon;
            bool have_early = false;
            for (std::size_t i = 1; i < run.series.size(); ++i) {
                const double E = compute_E(tables.prefix(i), p, spec).total;
                cell.times.push_back(run.series.times[i]);
                cell.E.push_back(E);
                if (!have_early && run.series.times[i] >= t_early * (1 - 1e-12)) {
                    cell.E_early = E;
                    have_early = true;
                }
            }
            if (!have_early) cell.E_early = cell.E.back();
            cell.E_peak = *std::max_element(cell.E.begin(), cell.E.end());
            cell.bounded = cell.E_peak <= cfg.multiplier * cell.E_early;
            cell.A_final = compute_A(tables, p, spec).total;
        }
        cell.regime = cell.stable && cell.bounded;
        cells.push_back(std::move(cell));
    }
    return cells;
}

}  // namespace nsc::est
