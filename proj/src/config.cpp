#include "nsc/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include "nsc/errors.hpp"
#include "nsc/strichartz.hpp"

namespace nsc::cli {

namespace {

const std::vector<std::pair<ExperimentKind, std::string>> kKindNames = {
    {ExperimentKind::Symbol, "symbol"},         {ExperimentKind::LinearDecay, "linear-decay"},
    {ExperimentKind::Strichartz, "strichartz"}, {ExperimentKind::Simulate, "simulate"},
    {ExperimentKind::Norms, "norms"},           {ExperimentKind::Apriori, "apriori"},
    {ExperimentKind::Sweep, "sweep"},           {ExperimentKind::VerifyAll, "verify-all"},
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// Accepts plain numbers and multiples of pi written as "pi", "2pi", "16*pi".
double parse_double(const std::string& key, const std::string& text) {
    std::string t = trim(text);
    double factor = 1.0;
    if (t.size() >= 2 && t.compare(t.size() - 2, 2, "pi") == 0) {
        factor = std::numbers::pi;
        t = t.substr(0, t.size() - 2);
        if (!t.empty() && t.back() == '*') t.pop_back();
        if (t.empty()) return factor;
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    require(ec == std::errc() && ptr == t.data() + t.size(), "config: " + key + " expects a number, got '" + text + "'");
    return v * factor;
}

int parse_int(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    require(ec == std::errc() && ptr == t.data() + t.size(), "config: " + key + " expects an integer, got '" + text + "'");
    return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    throw PreconditionError("config: " + key + " expects true or false, got '" + text + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (trim(item).empty()) continue;
        out.push_back(parse_double(key, item));
    }
    return out;
}

std::string join(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + fmt(xs[i]);
    return out;
}

struct Key {
    std::string name;
    std::function<void(ExperimentConfig&, const std::string&)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

#define NSC_DOUBLE(key, member)                                                                  \
    Key{key, [](ExperimentConfig& c, const std::string& v) { c.member = parse_double(key, v); }, \
        [](const ExperimentConfig& c) { return fmt(c.member); }}
#define NSC_INT(key, member)                                                                  \
    Key{key, [](ExperimentConfig& c, const std::string& v) { c.member = parse_int(key, v); }, \
        [](const ExperimentConfig& c) { return std::to_string(c.member); }}
#define NSC_BOOL(key, member)                                                                  \
    Key{key, [](ExperimentConfig& c, const std::string& v) { c.member = parse_bool(key, v); }, \
        [](const ExperimentConfig& c) { return std::string(c.member ? "true" : "false"); }}
#define NSC_OPTIONAL(key, member)                                                  \
    Key{key,                                                                       \
        [](ExperimentConfig& c, const std::string& v) {                           \
            if (trim(v).empty() || trim(v) == "default")                          \
                c.member.reset();                                                  \
            else                                                                   \
                c.member = parse_double(key, v);                                   \
        },                                                                         \
        [](const ExperimentConfig& c) { return c.member ? fmt(*c.member) : std::string("default"); }}
#define NSC_LIST(key, member)                                                                  \
    Key{key, [](ExperimentConfig& c, const std::string& v) { c.member = parse_list(key, v); }, \
        [](const ExperimentConfig& c) { return join(c.member); }}

const std::vector<Key>& key_table() {
    static const std::vector<Key> table = {
        Key{"kind", [](ExperimentConfig& c, const std::string& v) { c.kind = kind_from_string(trim(v)); },
            [](const ExperimentConfig& c) { return to_string(c.kind); }},
        Key{"run_id", [](ExperimentConfig& c, const std::string& v) { c.run_id = trim(v); },
            [](const ExperimentConfig& c) { return c.run_id; }},
        NSC_INT("n", n),
        NSC_DOUBLE("L", L),
        NSC_DOUBLE("mu", mu),
        NSC_OPTIONAL("mu_prime", mu_prime),
        NSC_DOUBLE("Omega", Omega),
        NSC_DOUBLE("eps", eps),
        NSC_DOUBLE("gamma", gamma),
        NSC_DOUBLE("q", norms.q),
        NSC_DOUBLE("r", norms.r),
        NSC_OPTIONAL("alpha", norms.alpha),
        NSC_DOUBLE("beta0", norms.beta0),
        NSC_BOOL("theorem_regime", norms.theorem_regime),
        Key{"recipe", [](ExperimentConfig& c, const std::string& v) { c.data.recipe = sim::recipe_from_string(trim(v)); },
            [](const ExperimentConfig& c) { return sim::to_string(c.data.recipe); }},
        Key{"seed",
            [](ExperimentConfig& c, const std::string& v) {
                const std::string t = trim(v);
                unsigned long long s = 0;
                const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), s);
                require(ec == std::errc() && ptr == t.data() + t.size(),
                        "config: seed expects a non-negative integer, got '" + v + "'");
                c.data.seed = s;
            },
            [](const ExperimentConfig& c) { return std::to_string(c.data.seed); }},
        NSC_DOUBLE("kmin", data.kmin),
        NSC_DOUBLE("kmax", data.kmax),
        NSC_DOUBLE("amplitude", data.amplitude),
        NSC_DOUBLE("a_fraction", data.a_fraction),
        NSC_BOOL("solenoidal", data.solenoidal),
        NSC_DOUBLE("width", data.width),
        Key{"mode",
            [](ExperimentConfig& c, const std::string& v) {
                const auto xs = parse_list("mode", v);
                require(xs.size() == 3, "config: mode expects three integers");
                for (int i = 0; i < 3; ++i) {
                    require(xs[i] == std::round(xs[i]), "config: mode expects three integers");
                    c.data.mode[i] = static_cast<int>(xs[i]);
                }
            },
            [](const ExperimentConfig& c) {
                return std::to_string(c.data.mode[0]) + "," + std::to_string(c.data.mode[1]) + "," +
                       std::to_string(c.data.mode[2]);
            }},
        NSC_INT("mode_component", data.mode_component),
        NSC_DOUBLE("horizon", horizon),
        NSC_DOUBLE("dt", stepper.dt),
        NSC_INT("order", stepper.order),
        NSC_BOOL("dealias", stepper.dealias),
        NSC_INT("snapshot_every", stepper.snapshot_every),
        NSC_DOUBLE("positivity_floor", stepper.positivity_floor),
        NSC_BOOL("nonlinear", stepper.nonlinear),
        Key{"formulation",
            [](ExperimentConfig& c, const std::string& v) { c.formulation = sim::formulation_from_string(trim(v)); },
            [](const ExperimentConfig& c) { return sim::to_string(c.formulation); }},
        NSC_INT("samples", samples),
        NSC_DOUBLE("decay_beta", decay_beta),
        NSC_INT("band", band),
        NSC_DOUBLE("strichartz_q", strichartz_q),
        NSC_DOUBLE("strichartz_r", strichartz_r),
        NSC_INT("time_samples", time_samples),
        NSC_LIST("omegas", omegas),
        NSC_LIST("epss", epss),
        NSC_INT("seeds", seeds),
        NSC_DOUBLE("multiplier", multiplier),
        Key{"output_dir", [](ExperimentConfig& c, const std::string& v) { c.output_dir = trim(v); },
            [](const ExperimentConfig& c) { return c.output_dir; }},
    };
    return table;
}

#undef NSC_DOUBLE
#undef NSC_INT
#undef NSC_BOOL
#undef NSC_OPTIONAL
#undef NSC_LIST

bool uses_simulation(ExperimentKind k) {
    return k == ExperimentKind::Simulate || k == ExperimentKind::Norms || k == ExperimentKind::Apriori ||
           k == ExperimentKind::Sweep;
}

bool uses_norms(ExperimentKind k) {
    return k == ExperimentKind::Norms || k == ExperimentKind::Apriori || k == ExperimentKind::Sweep;
}

}  // namespace

std::string to_string(ExperimentKind k) {
    for (const auto& [kind, name] : kKindNames)
        if (kind == k) return name;
    return "unknown";
}

ExperimentKind kind_from_string(const std::string& name) {
    for (const auto& [kind, n] : kKindNames)
        if (n == name) return kind;
    throw PreconditionError("config: unknown experiment kind '" + name + "'");
}

FluidParams ExperimentConfig::params() const {
    FluidParams p = FluidParams::with_mu(mu, Omega, eps, PressureLaw::gamma_law(gamma));
    if (mu_prime) p.mu_prime = *mu_prime;
    return p;
}

TorusGrid ExperimentConfig::grid() const { return TorusGrid(n, L); }

void ExperimentConfig::validate() const {
    const TorusGrid g = grid();
    require(gamma > 1.0 && std::isfinite(gamma), "config: gamma > 1 required");
    const FluidParams p = params();
    p.validate();
    // Throws when the box resolves fewer than three bands.
    const auto part = lp::make_partition(g);

    std::vector<double> om = omegas.empty() ? std::vector<double>{Omega} : omegas;
    std::vector<double> ep = epss.empty() ? std::vector<double>{eps} : epss;
    for (double e : ep) require(std::isfinite(e) && e > 0.0, "config: every eps must be positive");
    for (double o : om) require(std::isfinite(o), "config: every Omega must be finite");

    switch (kind) {
        case ExperimentKind::Symbol:
            require(samples >= 1, "config: samples >= 1 required");
            break;
        case ExperimentKind::LinearDecay:
            require(samples >= 1, "config: samples >= 1 required");
            require(decay_beta > 0.0, "config: decay_beta > 0 required");
            require(std::abs(Omega) * eps < decay_beta / eps, "linear-decay: |Omega| eps < beta / eps required");
            break;
        case ExperimentKind::Strichartz: {
            linear::validate_strichartz_exponents(strichartz_q, strichartz_r);
            linear::StrichartzSetup setup;
            setup.q = strichartz_q;
            setup.r = strichartz_r;
            setup.band = band;
            setup.horizon = horizon;
            setup.time_samples = time_samples;
            setup.beta0 = norms.beta0;
            for (double o : om) {
                FluidParams po = p;
                po.Omega = o;
                setup.validate(po);
            }
            require(band >= part.bands().lo && band <= part.bands().hi, "strichartz: band outside the partition range");
            break;
        }
        default:
            break;
    }

    if (uses_simulation(kind)) {
        require(std::isfinite(horizon) && horizon > 0.0, "config: horizon > 0 required");
        for (double e : ep)
            for (double o : om) {
                FluidParams po = p;
                po.Omega = o;
                po.eps = e;
                sim::validate_stepper(g, po, stepper);
                if (uses_norms(kind)) norms.validate(po);
            }
        require(seeds >= 1, "config: seeds >= 1 required");
        require(multiplier > 1.0, "config: multiplier > 1 required");
        // Cheap at any size the solver can run; surfaces recipe errors before stepping.
        for (double e : ep) {
            FluidParams pe = p;
            pe.eps = e;
            (void)sim::make_initial_data(data, g, pe, stepper.positivity_floor);
        }
    }
}

std::string ExperimentConfig::canonical() const {
    std::vector<std::pair<std::string, std::string>> kv;
    for (const auto& k : key_table()) kv.emplace_back(k.name, k.get(*this));
    std::sort(kv.begin(), kv.end());
    std::string out;
    for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
    return out;
}

std::string ExperimentConfig::hash() const {
    std::string text = "nsc-config/1\n";
    for (const auto& k : key_table())
        if (k.name != "output_dir" && k.name != "run_id") text += k.name + "=" + k.get(*this) + "\n";
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string ExperimentConfig::resolved_run_id() const {
    return run_id.empty() ? to_string(kind) + "-" + hash().substr(0, 8) : run_id;
}

std::string ExperimentConfig::resolved_output_dir() const {
    std::string root = output_dir;
    if (root.empty()) {
        const char* env = std::getenv("NSC_OUTPUT_ROOT");
        root = env && *env ? env : "nsc_output";
    }
    return root + "/" + resolved_run_id();
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
    for (const auto& k : key_table())
        if (k.name == key) {
            k.set(*this, value);
            return;
        }
    throw PreconditionError("config: unknown key '" + key + "'");
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hashpos = line.find('#');
        if (hashpos != std::string::npos) line.erase(hashpos);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        require(eq != std::string::npos, "config: line " + std::to_string(lineno) + " is not key = value");
        cfg.set(trim(line.substr(0, eq)), line.substr(eq + 1));
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

std::vector<std::string> ExperimentConfig::keys() {
    std::vector<std::string> out;
    for (const auto& k : key_table()) out.push_back(k.name);
    return out;
}

}  // namespace nsc::cli
