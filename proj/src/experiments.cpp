#include "nsc/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <random>
#include <sstream>

#include "nsc/errors.hpp"
#include "nsc/estimates.hpp"
#include "nsc/harness.hpp"
#include "nsc/io.hpp"
#include "nsc/spectral_ops.hpp"
#include "nsc/strichartz.hpp"
#include "nsc/symbol.hpp"

namespace nsc::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

// Output directory, config hash and the list of files written so far.
struct Sink {
    fs::path dir;
    std::string hash;
    std::string run_id;
    std::vector<std::string>& files;

    io::CsvWriter csv(const std::string& name, const std::vector<std::string>& columns) {
        files.push_back(name);
        return io::CsvWriter(dir / name, hash, columns);
    }
    void json(const std::string& name, ordered_json doc) {
        files.push_back(name);
        ordered_json out;
        out["config_hash"] = hash;
        out["run_id"] = run_id;
        for (auto& [k, v] : doc.items()) out[k] = v;
        io::write_json(dir / name, out);
    }
    void snapshot(const std::string& name, const SpectralField& f, double t) {
        files.push_back(name);
        io::write_snapshot(dir / name, f, t, hash);
    }
};

struct Result {
    std::vector<CheckLine> checks;
    bool unstable = false;
};

void add(Result& r, std::string name, bool ok, std::string detail, bool observational = false) {
    r.checks.push_back({std::move(name), ok, std::move(detail), observational});
}

double component_l2(const SpectralField& f, int first, int count) { return l2_norm(f.slice(first, count)); }

// Coefficients of prod (lambda - z_i) in increasing degree, and the same
// product taken over |z_i| as the cancellation-free magnitude scale.
std::pair<std::array<double, 5>, std::array<double, 5>> expand_roots(const std::array<cplx, 4>& z) {
    std::array<cplx, 5> c{1.0, 0.0, 0.0, 0.0, 0.0};
    std::array<double, 5> m{1.0, 0.0, 0.0, 0.0, 0.0};
    for (int i = 0; i < 4; ++i) {
        for (int k = i + 1; k >= 1; --k) {
            c[k] = c[k - 1] - z[i] * c[k];
            m[k] = m[k - 1] + std::abs(z[i]) * m[k];
        }
        c[0] = -z[i] * c[0];
        m[0] = std::abs(z[i]) * m[0];
    }
    std::array<double, 5> re{};
    for (int k = 0; k < 5; ++k) re[k] = c[k].real();
    return {re, m};
}

Vec3 random_direction(std::mt19937_64& rng, double length) {
    std::normal_distribution<double> g;
    Vec3 v{g(rng), g(rng), g(rng)};
    const double s = length / norm(v);
    return {v[0] * s, v[1] * s, v[2] * s};
}

double log_uniform(std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    return std::exp(u(rng));
}

// ---------------------------------------------------------------- symbol

Result run_symbol(const ExperimentConfig& c, Sink& sink) {
    const FluidParams p = c.params();
    std::mt19937_64 rng(c.data.seed);
    const double top = c.grid().nyquist_radius();
    auto csv = sink.csv("symbol.csv", {"xi1", "xi2", "xi3", "c0", "c1", "c2", "c3", "re_l0", "im_l0", "re_l1", "im_l1",
                                       "re_l2", "im_l2", "re_l3", "im_l3", "mismatch", "coeff_error"});
    double worst_mismatch = 0.0, worst_coeff = 0.0;
    int disagree = 0;
    for (int s = 0; s < c.samples; ++s) {
        const Vec3 xi = random_direction(rng, log_uniform(rng, 1e-2, top));
        const auto q = linear::characteristic_quartic(xi, p);
        const auto rep = linear::eigen_report(xi, p);
        const auto [coef, mag] = expand_roots(rep.values);
        double ce = 0.0;
        for (int k = 0; k < 4; ++k) ce = std::max(ce, std::abs(coef[k] - q[k]) / mag[k]);
        worst_mismatch = std::max(worst_mismatch, rep.mismatch);
        worst_coeff = std::max(worst_coeff, ce);
        disagree += !rep.agree;
        csv.cell(xi[0]).cell(xi[1]).cell(xi[2]);
        for (int k = 0; k < 4; ++k) csv.cell(q[k]);
        for (const auto& l : rep.values) csv.cell(l.real()).cell(l.imag());
        csv.cell(rep.mismatch).cell(ce);
        csv.end_row();
    }
    Result r;
    add(r, "eigensolve matches quartic roots", disagree == 0,
        std::to_string(disagree) + " disagreements, worst " + sci(worst_mismatch));
    add(r, "quartic matches eigenvalue expansion", worst_coeff <= 1e-10, "worst scaled error " + sci(worst_coeff));
    return r;
}

// ---------------------------------------------------------------- linear decay

Result run_linear_decay(const ExperimentConfig& c, Sink& sink) {
    const FluidParams p = c.params();
    const double beta = c.decay_beta;
    std::mt19937_64 rng(c.data.seed);
    std::vector<linear::DecayReport> reports;
    for (int s = 0; s < c.samples; ++s)
        reports.push_back(linear::decay_report(p, beta, random_direction(rng, log_uniform(rng, 1e-2, 2 * beta / p.eps))));

    sink.files.push_back("decay.csv");
    std::ofstream out(sink.dir / "decay.csv", std::ios::binary);
    if (!out) throw IoError("cannot open decay.csv");
    out << "# config_hash: " << sink.hash << '\n' << std::setprecision(17);
    linear::write_decay_csv(out, reports);
    if (!out) throw IoError("write failed on decay.csv");

    int abscissa = 0, weighted = 0, rate = 0;
    for (const auto& d : reports) {
        abscissa += d.abscissa_ok;
        weighted += d.weighted_ok;
        rate += d.rate_ok;
    }
    const auto n = std::to_string(reports.size());
    Result r;
    add(r, "spectral abscissa below -kappa/(48 beta^2)", abscissa == c.samples, std::to_string(abscissa) + "/" + n);
    add(r, "abscissa below -min(mu,1) kappa/(48 beta^2)", weighted == c.samples, std::to_string(weighted) + "/" + n);
    add(r, "fitted decay rate at least kappa/(48 beta^2)", rate == c.samples, std::to_string(rate) + "/" + n);
    return r;
}

// ---------------------------------------------------------------- strichartz

Result run_strichartz(const ExperimentConfig& c, Sink& sink) {
    const TorusGrid grid = c.grid();
    const auto part = lp::make_partition(grid);
    FluidParams p = c.params();
    const auto data = sim::make_initial_data(c.data, grid, p).state.packed();
    linear::StrichartzSetup setup;
    setup.q = c.strichartz_q;
    setup.r = c.strichartz_r;
    setup.band = c.band;
    setup.horizon = c.horizon;
    setup.time_samples = c.time_samples;
    setup.beta0 = c.norms.beta0;

    std::vector<double> omegas = c.omegas.empty() ? std::vector<double>{c.Omega} : c.omegas;
    std::vector<double> full, slow;
    for (double W : omegas) {
        p.Omega = W;
        full.push_back(linear::strichartz_measure(p, setup, data, part));
        slow.push_back(linear::strichartz_measure(p, setup, linear::slow_mode_projection(data, p), part));
    }
    auto csv = sink.csv("strichartz.csv", {"Omega", "measure", "measure_slow", "ratio", "ratio_slow", "predicted_ratio"});
    bool window = true, window_slow = true, mono = true, mono_slow = true;
    std::string detail, detail_slow;
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        csv.cell(omegas[i]).cell(full[i]).cell(slow[i]);
        if (i == 0) {
            csv.cell("").cell("").cell("");
        } else {
            const double pred = std::pow(std::abs(omegas[i] / omegas[i - 1]), -1.0 / setup.r);
            const double rf = full[i] / full[i - 1], rs = slow[i] / slow[i - 1];
            csv.cell(rf).cell(rs).cell(pred);
            window = window && rf >= 0.7 * pred && rf <= 1.3 * pred;
            window_slow = window_slow && rs >= 0.7 * pred && rs <= 1.3 * pred;
            mono = mono && full[i] < full[i - 1];
            mono_slow = mono_slow && slow[i] < slow[i - 1];
            detail += (i > 1 ? ", " : "") + sci(rf / pred);
            detail_slow += (i > 1 ? ", " : "") + sci(rs / pred);
        }
        csv.end_row();
    }
    Result r;
    if (omegas.size() >= 2) {
        add(r, "ratio within [0.7, 1.3] x predicted", window, "ratio/predicted: " + detail);
        add(r, "strictly decreasing in Omega", mono, "");
        add(r, "slow-mode ratio within [0.7, 1.3] x predicted", window_slow, "ratio/predicted: " + detail_slow, true);
        add(r, "slow-mode strictly decreasing in Omega", mono_slow, "", true);
    } else {
        add(r, "measure finite", std::isfinite(full[0]), sci(full[0]));
    }
    return r;
}

// ---------------------------------------------------------------- simulate

struct SimOut {
    sim::InitialData initial;
    sim::RunResult run;
};

SimOut simulate_and_write(const ExperimentConfig& c, Sink& sink, Result& r) {
    const TorusGrid grid = c.grid();
    const FluidParams p = c.params();
    auto initial = sim::make_initial_data(c.data, grid, p, c.stepper.positivity_floor);
    sim::State start = initial.state;
    if (c.formulation == sim::Formulation::Momentum)
        start = sim::convert(start, p, sim::Formulation::Momentum, c.stepper.positivity_floor, c.stepper.dealias);
    auto run = sim::simulate(start, p, c.stepper, c.horizon);

    auto ts = sink.csv("timeseries.csv", {"t", "l2_a", "l2_u", "mean_a"});
    for (std::size_t i = 0; i < run.series.size(); ++i) {
        const auto& f = run.series.snapshots[i];
        ts.cell(run.series.times[i]).cell(component_l2(f, 0, 1)).cell(component_l2(f, 1, 3)).cell(f.at(0, 0).real());
        ts.end_row();
    }
    auto mg = sink.csv("margins.csv", {"t", "positivity_margin"});
    for (std::size_t i = 0; i < run.report.margins.size(); ++i) {
        mg.cell(run.report.margin_times[i]).cell(run.report.margins[i]);
        mg.end_row();
    }
    sink.snapshot("initial.nscsnap", initial.state.packed(), 0.0);
    if (run.series.size() > 0) sink.snapshot("final.nscsnap", run.series.snapshots.back(), run.series.times.back());

    ordered_json doc;
    ordered_json norms;
    for (const auto& [k, v] : initial.norms) norms[k] = v;
    doc["initial_norms"] = norms;
    const auto& rep = run.report;
    doc["report"] = {{"stable", rep.stable},
                     {"failure_time", rep.failure_time},
                     {"failure", rep.failure},
                     {"dt_effective", rep.dt_effective},
                     {"steps", rep.steps},
                     {"mean_a_initial", rep.mean_a_initial},
                     {"mean_a_final", rep.mean_a_final},
                     {"max_mean_drift", rep.max_mean_drift},
                     {"max_hermitian_defect", rep.max_hermitian_defect}};
    sink.json("run.json", doc);

    add(r, "run stable to the horizon", rep.stable,
        rep.stable ? std::to_string(rep.steps) + " steps" : rep.failure + " at t = " + sci(rep.failure_time));
    add(r, "mean(a) drift <= 1e-13", rep.max_mean_drift <= 1e-13, sci(rep.max_mean_drift));
    add(r, "hermitian defect <= 1e-12", rep.max_hermitian_defect <= 1e-12, sci(rep.max_hermitian_defect));
    r.unstable = !rep.stable;
    return {std::move(initial), std::move(run)};
}

Result run_simulate(const ExperimentConfig& c, Sink& sink) {
    Result r;
    simulate_and_write(c, sink, r);
    return r;
}

// ---------------------------------------------------------------- norms

ordered_json summands_json(const est::NormReport& E, const est::NormReport& A) {
    ordered_json s = ordered_json::object();
    for (const auto& x : E.summands) s["E|" + x.name] = x.value;
    for (const auto& x : A.summands) s["A|" + x.name] = x.value;
    return s;
}

Result run_norms(const ExperimentConfig& c, Sink& sink) {
    Result r;
    const auto sim_out = simulate_and_write(c, sink, r);
    const FluidParams p = c.params();
    const auto part = lp::make_partition(c.grid());
    if (sim_out.run.series.size() < 2) {
        add(r, "enough snapshots for time quadrature", false, "run failed before the first snapshot");
        return r;
    }
    const auto tables = est::NormTables::build(sim_out.run.series, part, c.norms.q);
    auto csv = sink.csv("norms.csv", {"t", "family", "summand", "value", "empty"});
    ordered_json records = ordered_json::array();
    est::NormReport lastE, lastA;
    for (std::size_t i : est::time_ladder(sim_out.run.series.times)) {
        const auto t = tables.prefix(i);
        lastE = est::compute_E(t, p, c.norms);
        lastA = est::compute_A(t, p, c.norms);
        const double time = sim_out.run.series.times[i];
        for (const auto* rep : {&lastE, &lastA}) {
            const std::string fam = rep == &lastE ? "E" : "A";
            for (const auto& s : rep->summands) {
                csv.cell(time).cell(fam).cell(s.name).cell(s.value).cell(s.empty);
                csv.end_row();
            }
            csv.cell(time).cell(fam).cell("total").cell(rep->total).cell(false);
            csv.end_row();
        }
        records.push_back({{"run_id", sink.run_id},
                           {"t", time},
                           {"summands", summands_json(lastE, lastA)},
                           {"totals", {{"E", lastE.total}, {"A", lastA.total}}},
                           {"fitted_constants", ordered_json::object()},
                           {"regime_flag", nullptr}});
    }
    const auto d = est::compute_data_functionals(sim_out.initial.state, p, part);
    ordered_json empty = ordered_json::array();
    for (const auto* rep : {&lastE, &lastA})
        for (const auto& s : rep->summands)
            if (s.empty) empty.push_back(std::string(rep == &lastE ? "E|" : "A|") + s.name);
    sink.json("norms.json", {{"records", records},
                             {"data_functionals",
                              {{"D*_eps", d.d_star}, {"D_eps", d.d_eps}, {"D", d.d}, {"D_mixed", d.d_mixed},
                               {"B^1/2_2,1", d.b_half}}},
                             {"empty_summands", empty}});

    const double k = 2.0;
    const auto sc = tables.scaled(k);
    const double eE = std::abs(est::compute_E(sc, p, c.norms).total - k * lastE.total) / (k * lastE.total);
    const double eA = std::abs(est::compute_A(sc, p, c.norms).total - k * lastA.total) / (k * lastA.total);
    add(r, "E and A homogeneous of degree 1", !(eE > 1e-10) && !(eA > 1e-10), "rel. error " + sci(std::max(eE, eA)));
    add(r, "D*_eps <= D_eps", d.d_star <= d.d_eps, sci(d.d_star) + " <= " + sci(d.d_eps));
    add(r, "summands with no band on this box", empty.empty(), std::to_string(empty.size()) + " empty", true);
    return r;
}

// ---------------------------------------------------------------- apriori

Result run_apriori(const ExperimentConfig& c, Sink& sink) {
    Result r;
    const auto sim_out = simulate_and_write(c, sink, r);
    const FluidParams p = c.params();
    const auto part = lp::make_partition(c.grid());
    if (sim_out.run.series.size() < 2) {
        add(r, "enough snapshots for time quadrature", false, "run failed before the first snapshot");
        return r;
    }
    const auto rep = est::apriori_diagnostic(sim_out.run, sim_out.initial.state, p, c.norms, part);
    auto csv = sink.csv("apriori.csv", {"inequality", "t", "lhs", "rhs", "ratio", "fitted", "holds", "tightness"});
    ordered_json fitted = ordered_json::object();
    for (const auto& ineq : rep.inequalities) {
        fitted[ineq.name] = ineq.fitted;
        for (const auto& row : ineq.rows) {
            csv.cell(ineq.name).cell(row.t).cell(row.lhs).cell(row.rhs).cell(row.ratio).cell(ineq.fitted);
            csv.cell(row.holds).cell(row.tightness);
            csv.end_row();
        }
    }
    ordered_json records = ordered_json::array();
    for (std::size_t k = 0; k < rep.times.size(); ++k) {
        ordered_json s = ordered_json::object();
        bool flag = true;
        for (const auto& ineq : rep.inequalities) {
            s[ineq.name + "|lhs"] = ineq.rows[k].lhs;
            s[ineq.name + "|rhs"] = ineq.rows[k].rhs;
            if (ineq.name == "E" || ineq.name == "A") flag = flag && ineq.rows[k].holds;
        }
        records.push_back({{"run_id", sink.run_id},
                           {"t", rep.times[k]},
                           {"summands", s},
                           {"totals", {{"E", rep.E[k]}, {"A", rep.A[k]}}},
                           {"fitted_constants", fitted},
                           {"regime_flag", flag}});
    }
    ordered_json choice = ordered_json::object();
    for (const auto& [k, v] : rep.choice) choice[k] = v;
    sink.json("apriori.json", {{"records", records},
                               {"alpha", rep.alpha},
                               {"delta", rep.delta},
                               {"data_functionals",
                                {{"D*_eps", rep.data.d_star}, {"D_eps", rep.data.d_eps}, {"D", rep.data.d},
                                 {"D_mixed", rep.data.d_mixed}}},
                               {"smallness", choice},
                               {"growth_before_failure", rep.growth_before_failure}});

    for (const auto& ineq : rep.inequalities)
        add(r, "(" + ineq.name + ") holds with fitted C", ineq.all_hold, "C = " + sci(ineq.fitted), true);
    if (!sim_out.run.report.stable)
        add(r, "E grows before the failure", rep.growth_before_failure, "", true);
    add(r, "D*_eps <= D_eps", rep.data.d_star <= rep.data.d_eps, sci(rep.data.d_star) + " <= " + sci(rep.data.d_eps));
    return r;
}

// ---------------------------------------------------------------- sweep

Result run_sweep(const ExperimentConfig& c, Sink& sink) {
    const TorusGrid grid = c.grid();
    const auto part = lp::make_partition(grid);
    std::vector<double> omegas = c.omegas.empty() ? std::vector<double>{c.Omega} : c.omegas;
    std::vector<double> epss = c.epss.empty() ? std::vector<double>{c.eps} : c.epss;
    std::stable_sort(omegas.begin(), omegas.end(), [](double x, double y) { return std::abs(x) < std::abs(y); });

    est::ProbeConfig pc;
    pc.horizon = c.horizon;
    pc.multiplier = c.multiplier;
    pc.stepper = c.stepper;

    auto cells_csv = sink.csv("regime_map.csv", {"eps", "Omega", "seed", "stable", "bounded", "regime", "failure_time",
                                                 "E_early", "E_peak", "A_final", "failure"});
    auto traj_csv = sink.csv("trajectories.csv", {"eps", "Omega", "seed", "t", "E"});
    std::vector<std::vector<double>> frac(epss.size(), std::vector<double>(omegas.size(), 0.0));
    std::vector<std::vector<double>> regime(epss.size(), std::vector<double>(omegas.size(), 0.0));
    ordered_json records = ordered_json::array();
    for (std::size_t ie = 0; ie < epss.size(); ++ie) {
        FluidParams base = c.params();
        base.eps = epss[ie];
        std::vector<std::pair<double, double>> pairs;
        for (double W : omegas) pairs.emplace_back(W, epss[ie]);
        for (int s = 0; s < c.seeds; ++s) {
            auto spec = c.data;
            spec.seed = c.data.seed + static_cast<unsigned long long>(s);
            const auto initial = sim::make_initial_data(spec, grid, base, c.stepper.positivity_floor);
            const auto cells = est::continuation_probe(initial.state, base, pairs, c.norms, pc, part);
            for (std::size_t io = 0; io < cells.size(); ++io) {
                const auto& cell = cells[io];
                frac[ie][io] += cell.stable ? 1.0 / c.seeds : 0.0;
                regime[ie][io] += cell.regime ? 1.0 / c.seeds : 0.0;
                cells_csv.cell(cell.eps).cell(cell.Omega).cell(static_cast<long long>(spec.seed)).cell(cell.stable);
                cells_csv.cell(cell.bounded).cell(cell.regime).cell(cell.failure_time).cell(cell.E_early);
                cells_csv.cell(cell.E_peak).cell(cell.A_final).cell(cell.failure);
                cells_csv.end_row();
                for (std::size_t k = 0; k < cell.times.size(); ++k) {
                    traj_csv.cell(cell.eps).cell(cell.Omega).cell(static_cast<long long>(spec.seed));
                    traj_csv.cell(cell.times[k]).cell(cell.E[k]);
                    traj_csv.end_row();
                }
                std::ostringstream id;
                id << sink.run_id << "/eps=" << io::fmt17(cell.eps) << "/Omega=" << io::fmt17(cell.Omega)
                   << "/seed=" << spec.seed;
                records.push_back({{"run_id", id.str()},
                                   {"t", cell.stable ? c.horizon : cell.failure_time},
                                   {"summands", {{"E_early", cell.E_early}, {"E_peak", cell.E_peak}, {"A_final", cell.A_final}}},
                                   {"totals", {{"E", cell.E.empty() ? 0.0 : cell.E.back()}, {"A", cell.A_final}}},
                                   {"fitted_constants", ordered_json::object()},
                                   {"regime_flag", cell.regime}});
            }
        }
    }
    auto map_csv = sink.csv("stability_fraction.csv", {"eps", "Omega", "Omega_eps", "stable_fraction", "regime_fraction"});
    for (std::size_t ie = 0; ie < epss.size(); ++ie)
        for (std::size_t io = 0; io < omegas.size(); ++io) {
            map_csv.cell(epss[ie]).cell(omegas[io]).cell(std::abs(omegas[io]) * epss[ie]).cell(frac[ie][io]);
            map_csv.cell(regime[ie][io]);
            map_csv.end_row();
        }
    sink.json("sweep.json", {{"records", records}});

    Result r;
    const auto m = monotone_rows(frac);
    std::string rows;
    for (std::size_t ie = 0; ie < epss.size(); ++ie) {
        rows += (ie ? "; " : "") + std::string("eps=") + sci(epss[ie]) + ":";
        for (double f : frac[ie]) rows += " " + sci(f);
    }
    add(r, "stable fraction nondecreasing in |Omega| for >= 80% of rows", m.fraction() >= 0.8, rows, true);
    return r;
}

// ---------------------------------------------------------------- verify-all

// Runs one property check; an exception counts as a failure with its message as detail.
struct Checker {
    Result& r;
    template <class F>
    void operator()(const std::string& name, F&& f) {
        std::string detail;
        bool ok = false;
        try {
            ok = f(detail);
        } catch (const std::exception& ex) {
            detail = std::string("threw: ") + ex.what();
        }
        add(r, name, ok, detail);
    }
};

FluidParams random_params(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> mu(0.05, 0.5), omega(-20.0, 20.0);
    return FluidParams::with_mu(mu(rng), omega(rng), log_uniform(rng, 0.02, 1.0));
}

Result run_verify_all(const ExperimentConfig& c, Sink& sink) {
    Result r;
    Checker check{r};
    const TorusGrid grid = c.grid();
    const auto part = lp::make_partition(grid);
    const unsigned long long seed = c.data.seed;

    check("symbol: eigensolve and quartic agree", [&](std::string& d) {
        std::mt19937_64 rng(seed);
        double worst = 0.0;
        for (int s = 0; s < 200; ++s) {
            const auto p = random_params(rng);
            const Vec3 xi = random_direction(rng, log_uniform(rng, 1e-2, 10.0));
            const auto q = linear::characteristic_quartic(xi, p);
            const auto rep = linear::eigen_report(xi, p);
            if (!rep.agree) return d = "disagreement at |xi| = " + sci(norm(xi)), false;
            const auto [coef, mag] = expand_roots(rep.values);
            for (int k = 0; k < 4; ++k) worst = std::max(worst, std::abs(coef[k] - q[k]) / mag[k]);
        }
        d = "worst scaled coefficient error " + sci(worst);
        return worst <= 1e-10;
    });
    check("symbol: Omega = 0 factorization", [&](std::string& d) {
        std::mt19937_64 rng(seed + 1);
        double worst = 0.0;
        for (int s = 0; s < 100; ++s) {
            auto p = random_params(rng);
            p.Omega = 0.0;
            const Vec3 xi = random_direction(rng, log_uniform(rng, 1e-2, 10.0));
            const double x2 = norm(xi) * norm(xi), m = p.mu * x2, e2 = p.eps * p.eps;
            const std::array<double, 5> want = {m * m * x2 / e2, -(2 * m * x2 / e2 + m * m * x2),
                                                m * m + 2 * m * x2 + x2 / e2, -(2 * m + x2), 1.0};
            const auto q = linear::characteristic_quartic(xi, p);
            for (int k = 0; k < 5; ++k) worst = std::max(worst, std::abs(q[k] - want[k]) / std::abs(want[k]));
        }
        d = "worst relative error " + sci(worst);
        return worst <= 1e-12;
    });
    check("linear: decay bound on sampled modes", [&](std::string& d) {
        std::mt19937_64 rng(seed + 2);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        int bad = 0;
        for (int s = 0; s < 50; ++s) {
            auto p = random_params(rng);
            const double beta = 1.0 + 3.0 * unit(rng);
            p.Omega = (2 * unit(rng) - 1) * beta / (p.eps * p.eps);
            const auto rep = linear::decay_report(p, beta, random_direction(rng, (0.01 + 1.99 * unit(rng)) * beta / p.eps));
            bad += !(rep.abscissa_ok && rep.rate_ok);
        }
        d = std::to_string(bad) + " of 50 modes fail";
        return bad == 0;
    });
    check("linear: energy sandwich and contraction", [&](std::string& d) {
        std::mt19937_64 rng(seed + 3);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        std::normal_distribution<double> g;
        double worst_low = lp::kInf, worst_high = 0.0, worst_norm = 0.0;
        for (int s = 0; s < 2000; ++s) {
            auto p = random_params(rng);
            const double beta = 1.0 + 3.0 * unit(rng);
            p.Omega = (2 * unit(rng) - 1) * beta / (p.eps * p.eps);
            const Vec3 xi = random_direction(rng, 2.0 * beta / p.eps * unit(rng));
            linear::Vec4 U;
            for (int i = 0; i < 4; ++i) U(i) = cplx(g(rng), g(rng));
            const double w = p.Omega * p.Omega * p.eps * p.eps + norm(xi) * norm(xi);
            const double v2 = linear::energy_V_squared(U, xi, p, beta) / (w * U.squaredNorm());
            worst_low = std::min(worst_low, v2);
            worst_high = std::max(worst_high, v2);
            if (s % 20 == 0) {
                const linear::ModePropagator prop(xi, p);
                for (double t : {0.1, 1.0, 10.0}) worst_norm = std::max(worst_norm, prop.log_norm(t));
            }
        }
        d = "V^2/(w|U|^2) in [" + sci(worst_low) + ", " + sci(worst_high) + "], max log|Phi| " + sci(worst_norm);
        return worst_low >= 0.5 * (1 - 1e-14) && worst_high <= 1.5 * (1 + 1e-14) && worst_norm <= std::log1p(1e-10);
    });
    check("lp: partition of unity and reconstruction", [&](std::string& d) {
        std::vector<double> sum(grid.size(), 0.0);
        for (int j = part.bands().lo; j <= part.bands().hi; ++j)
            for (const auto& e : part.band(j)) sum[e.mode] += e.weight;
        double worst = 0.0;
        for (std::size_t m = 1; m < grid.size(); ++m) worst = std::max(worst, std::abs(sum[m] - 1.0));
        auto f = sim::make_initial_data({sim::Recipe::RandomBand, seed, 1.0, grid.n() / 2.0, 0.1}, grid, {}).state.packed();
        SpectralField rec(grid, 4);
        double leak = 0.0;
        for (int j = part.bands().lo; j <= part.bands().hi; ++j) {
            const auto dj = lp::project_band(f, j, part);
            rec += dj;
            for (int k = j + 2; k <= part.bands().hi; ++k) leak = std::max(leak, lp::project_band(dj, k, part).max_abs());
        }
        const double err = (rec - f).max_abs() / f.max_abs();
        d = "unity " + sci(worst) + ", reconstruction " + sci(err) + ", far-band leak " + sci(leak);
        return worst <= 1e-12 && err <= 1e-12 && leak == 0.0;
    });
    check("lp: Bernstein, single mode and Bony", [&](std::string& d) {
        const auto f = sim::make_initial_data({sim::Recipe::RandomBand, seed + 4, 1.0, grid.n() / 3.0, 0.1}, grid, {})
                           .state.packed();
        const auto a = f.slice(0, 1), b = f.slice(1, 1);
        bool bern = true;
        for (int j = part.bands().lo; j <= part.bands().hi; ++j) {
            const auto dj = lp::project_band(a, j, part);
            const double base = lp::lp_norm(dj, 4.0);
            if (base > 0.0) bern = bern && lp::lp_norm(gradient(dj), 4.0) <= std::ldexp(2.0, j) * base;
        }
        // A lattice mode whose frequency is a power of two sits in one band with weight 1.
        const int k = 1 << static_cast<int>(std::floor(std::log2(grid.n() / 4.0)));
        const double xi = k * grid.fundamental();
        const bool dyadic = std::abs(std::log2(xi) - std::round(std::log2(xi))) < 1e-12;
        SpectralField mode(grid, 1);
        mode.at(0, grid.flat(grid.storage_index(k), 0, 0)) = 0.5;
        mode.at(0, grid.flat(grid.storage_index(-k), 0, 0)) = 0.5;
        const double want = std::sqrt(xi) / std::numbers::sqrt2;
        const double got = lp::besov_norm(mode, {2.0, 1.0, 0.5, {}}, part);
        const double single = dyadic ? std::abs(got - want) / want : 0.0;
        const auto parts = lp::bony_decompose(a, b, part);
        const auto sum = parts.paraproduct_fg + parts.remainder + parts.paraproduct_gf;
        const auto prod = dealiased_product(a, b);
        const double bony = (sum - prod).max_abs() / prod.max_abs();
        d = (dyadic ? "single mode " + sci(single) : std::string("single mode n/a on this box")) + ", Bony " + sci(bony);
        return bern && single <= 1e-14 && bony <= 1e-11;
    });
    check("sim: mean drift, symmetry and round trip", [&](std::string& d) {
        const auto p = FluidParams::with_mu(0.25, 2.0, 0.5);
        const auto init = sim::make_initial_data({sim::Recipe::RandomBand, seed + 5, 1.0, 3.0, 0.05}, grid, p).state;
        sim::StepperConfig cfg;
        cfg.dt = 0.02;
        const auto run = sim::simulate(init, p, cfg, 1.0);
        const auto back = sim::convert(sim::convert(init, p, sim::Formulation::Momentum), p, sim::Formulation::Velocity);
        const double rt = (back.packed() - init.packed()).max_abs() / init.packed().max_abs();
        d = "drift " + sci(run.report.max_mean_drift) + ", hermitian " + sci(run.report.max_hermitian_defect) +
            ", round trip " + sci(rt);
        return run.report.stable && run.report.max_mean_drift <= 1e-13 && run.report.max_hermitian_defect <= 1e-12 &&
               rt <= 1e-3;
    });
    check("sim: nonlinear defect is quadratic in amplitude", [&](std::string& d) {
        const auto p = FluidParams::with_mu(0.25, 1.0, 1.0);
        sim::StepperConfig cfg;
        cfg.dt = 0.02;
        auto lin = cfg;
        lin.nonlinear = false;
        std::vector<double> defect;
        for (double amp : {1e-3, 5e-4}) {
            const auto init = sim::make_initial_data({sim::Recipe::RandomBand, seed + 6, 1.0, 3.0, amp}, grid, p).state;
            const auto nl = sim::simulate(init, p, cfg, 0.5).final_state.packed();
            const auto li = sim::simulate(init, p, lin, 0.5).final_state.packed();
            defect.push_back(l2_norm(nl - li));
        }
        const double slope = std::log2(defect[0] / defect[1]);
        d = "slope " + sci(slope);
        return std::abs(slope - 2.0) <= 0.1;
    });
    check("norms: homogeneity, time factors and data functionals", [&](std::string& d) {
        const auto p = FluidParams::with_mu(0.25, 5.0, 0.1);
        est::NormSuiteSpec spec;
        spec.alpha = 2.0;
        const auto init = sim::make_initial_data({sim::Recipe::RandomBand, seed + 7, 1.0, 4.0, 0.1}, grid, p).state;
        lp::TimeSeries constant;
        for (int k = 0; k < 9; ++k) {
            constant.times.push_back(0.25 * k);
            constant.snapshots.push_back(init.packed());
        }
        const auto t = est::NormTables::build(constant, part, spec.q);
        const auto E = est::compute_E(t, p, spec), E2 = est::compute_E(t.scaled(3.0), p, spec);
        const auto A = est::compute_A(t, p, spec), A2 = est::compute_A(t.scaled(3.0), p, spec);
        const double hom = std::max(std::abs(E2.total - 3 * E.total) / (3 * E.total),
                                    std::abs(A2.total - 3 * A.total) / (3 * A.total));
        const double want = 2.0 * lp::besov_norm(init.packed(), {2.0, 1.0, 2.5, lp::Truncation::mid(0.5, 10.0)}, part);
        const double tf = std::abs(E.get("(a,u) L1 B^5/2_2,1 m;|W|eps,b0/eps") - want) / want;
        const auto dat = est::compute_data_functionals(init, p, part);
        d = "homogeneity " + sci(hom) + ", time factor " + sci(tf);
        return hom <= 1e-10 && tf <= 1e-3 && dat.d_star <= dat.d_eps;
    });
    check("estimates: AE ratios finite and amplitude invariant", [&](std::string& d) {
        const auto p = FluidParams::with_mu(0.25, 5.0, 0.1);
        est::NormSuiteSpec spec;
        spec.alpha = 2.0;
        sim::StepperConfig cfg;
        cfg.dt = 0.02;
        cfg.nonlinear = false;
        cfg.snapshot_every = 5;
        std::vector<lp::TimeSeries> runs;
        for (unsigned long long s = 0; s < 3; ++s) {
            const auto init = sim::make_initial_data({sim::Recipe::RandomBand, seed + 8 + s, 1.0, 5.0, 0.1}, grid, p).state;
            runs.push_back(sim::simulate(init, p, cfg, 1.0).series);
        }
        double dev = 0.0;
        bool finite = true;
        for (const auto& s : est::lemma_AE_check(runs, p, spec, part)) {
            dev = std::max(dev, s.scaling_deviation);
            finite = finite && std::isfinite(s.max_ratio) && s.max_ratio > 0.0;
        }
        d = "scaling deviation " + sci(dev);
        return finite && dev <= 1e-10;
    });
    check("harnesses: product ratio finite, identity composition is 1", [&](std::string& d) {
        lp::SampleSpec ss;
        ss.samples = 8;
        ss.seed = seed;
        const auto a1 = lp::product_estimate_A1(grid, {}, ss);
        lp::CompositionSpec id;
        id.F = [](double x) { return x; };
        const auto comp = lp::composition_estimate(grid, id, ss);
        d = "A.1 max ratio " + sci(a1.max_ratio) + ", identity " + sci(comp.max_ratio);
        return std::isfinite(a1.max_ratio) && a1.scaling_deviation <= 1e-10 && std::abs(comp.max_ratio - 1.0) <= 1e-12;
    });

    auto csv = sink.csv("verify.csv", {"check", "passed", "detail"});
    for (const auto& line : r.checks) {
        csv.cell(line.name).cell(line.passed).cell(line.detail);
        csv.end_row();
    }
    return r;
}

}  // namespace

MonotoneSummary monotone_rows(const std::vector<std::vector<double>>& rows) {
    MonotoneSummary m;
    for (const auto& row : rows) {
        ++m.rows;
        bool ok = true;
        for (std::size_t i = 1; i < row.size(); ++i) ok = ok && row[i] >= row[i - 1];
        m.monotone_rows += ok;
    }
    return m;
}

void print_summary(std::ostream& out, const std::string& title, const std::vector<CheckLine>& checks) {
    std::size_t width = 0;
    for (const auto& c : checks) width = std::max(width, c.name.size());
    out << title << '\n';
    for (const auto& c : checks) {
        const char* tag = c.observational ? (c.passed ? "seen" : "note") : (c.passed ? "PASS" : "FAIL");
        out << "  [" << tag << "] " << std::left << std::setw(static_cast<int>(width)) << c.name;
        if (!c.detail.empty()) out << "  " << c.detail;
        out << '\n';
    }
}

Outcome run(const ExperimentConfig& config, std::ostream& out) {
    Outcome o;
    try {
        config.validate();
    } catch (const PreconditionError& ex) {
        o.exit_code = kInvalidConfig;
        o.error = ex.what();
        out << "invalid configuration: " << ex.what() << '\n';
        return o;
    } catch (const IoError& ex) {
        o.exit_code = kIoFailure;
        o.error = ex.what();
        out << "i/o failure: " << ex.what() << '\n';
        return o;
    }

    const std::string hash = config.hash();
    o.output_dir = config.resolved_output_dir();
    try {
        io::ensure_directory(o.output_dir);
        Sink sink{o.output_dir, hash, config.resolved_run_id(), o.files};
        {
            sink.files.push_back("config.txt");
            std::ofstream cfg(sink.dir / "config.txt", std::ios::binary);
            cfg << "# config_hash: " << hash << '\n' << config.canonical();
            if (!cfg) throw IoError("cannot write config.txt");
        }
        Result r;
        try {
            switch (config.kind) {
                case ExperimentKind::Symbol: r = run_symbol(config, sink); break;
                case ExperimentKind::LinearDecay: r = run_linear_decay(config, sink); break;
                case ExperimentKind::Strichartz: r = run_strichartz(config, sink); break;
                case ExperimentKind::Simulate: r = run_simulate(config, sink); break;
                case ExperimentKind::Norms: r = run_norms(config, sink); break;
                case ExperimentKind::Apriori: r = run_apriori(config, sink); break;
                case ExperimentKind::Sweep: r = run_sweep(config, sink); break;
                case ExperimentKind::VerifyAll: r = run_verify_all(config, sink); break;
            }
        } catch (const PreconditionError& ex) {
            o.exit_code = kInvalidConfig;
            o.error = ex.what();
        } catch (const IoError&) {
            throw;
        } catch (const std::exception& ex) {
            o.exit_code = kUnstable;
            o.error = ex.what();
        }
        o.checks = r.checks;
        if (o.exit_code == kOk) {
            if (r.unstable)
                o.exit_code = kUnstable;
            else
                for (const auto& c : r.checks)
                    if (!c.passed && !c.observational) o.exit_code = kChecksFailed;
        }

        ordered_json checks = ordered_json::array();
        for (const auto& c : o.checks)
            checks.push_back({{"name", c.name}, {"passed", c.passed}, {"observational", c.observational}, {"detail", c.detail}});
        sink.json("summary.json", {{"kind", to_string(config.kind)}, {"exit_code", o.exit_code}, {"error", o.error},
                                   {"checks", checks}});
        ordered_json cfg = ordered_json::object();
        std::istringstream lines(config.canonical());
        for (std::string line; std::getline(lines, line);) {
            const auto eq = line.find(" = ");
            cfg[line.substr(0, eq)] = line.substr(eq + 3);
        }
        sink.files.push_back("manifest.json");
        ordered_json manifest = {{"format", "nsc-manifest/1"},
                                 {"config_hash", hash},
                                 {"run_id", sink.run_id},
                                 {"kind", to_string(config.kind)},
                                 {"exit_code", o.exit_code},
                                 {"config", cfg},
                                 {"files", o.files}};
        io::write_json(sink.dir / "manifest.json", manifest);
    } catch (const IoError& ex) {
        o.exit_code = kIoFailure;
        o.error = ex.what();
    }

    print_summary(out, to_string(config.kind) + "  run " + config.resolved_run_id() + "  hash " + hash, o.checks);
    if (!o.error.empty()) out << "error: " << o.error << '\n';
    out << "artifacts: " << o.output_dir << "  exit " << o.exit_code << '\n';
    return o;
}

}  // namespace nsc::cli
