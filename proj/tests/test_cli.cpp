#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "helpers.hpp"
#include "nsc/config.hpp"
#include "nsc/errors.hpp"
#include "nsc/experiments.hpp"
#include "nsc/io.hpp"

using namespace nsc;
using namespace nsc::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("nsc_test_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

nlohmann::json load_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

Outcome quiet_run(const ExperimentConfig& cfg) {
    std::ostringstream sink;
    return run(cfg, sink);
}

}  // namespace

TEST_CASE("config text parses numbers, multiples of pi, lists and comments") {
    const auto cfg = ExperimentConfig::parse(
        "# a comment\n"
        "kind = sweep\n"
        "L = 16pi   # trailing comment\n"
        "n = 32\n"
        "omegas = 0, 5,10\n"
        "solenoidal = true\n"
        "alpha = 2.5\n"
        "recipe = large-data\n");
    CHECK(cfg.kind == ExperimentKind::Sweep);
    CHECK(cfg.L == doctest::Approx(16 * std::numbers::pi).epsilon(1e-15));
    CHECK(cfg.n == 32);
    CHECK(cfg.omegas == std::vector<double>{0.0, 5.0, 10.0});
    CHECK(cfg.data.solenoidal);
    CHECK(*cfg.norms.alpha == 2.5);
    CHECK(cfg.data.recipe == sim::Recipe::LargeData);

    CHECK_THROWS_WITH_AS(ExperimentConfig::parse("colour = red"), doctest::Contains("unknown key"), PreconditionError);
    CHECK_THROWS_WITH_AS(ExperimentConfig::parse("n = 3.5"), doctest::Contains("integer"), PreconditionError);
    CHECK_THROWS_WITH_AS(ExperimentConfig::parse("dealias = maybe"), doctest::Contains("true or false"),
                         PreconditionError);
    CHECK_THROWS_AS(ExperimentConfig::parse("just words"), PreconditionError);
    CHECK_THROWS_AS(ExperimentConfig::parse("kind = plot"), PreconditionError);
}

TEST_CASE("canonical text round-trips and the hash tracks numeric settings only") {
    ExperimentConfig cfg;
    cfg.set("eps", "0.1");
    cfg.set("omegas", "1,2,3");
    cfg.set("alpha", "2");
    const auto again = ExperimentConfig::parse(cfg.canonical());
    CHECK(again.canonical() == cfg.canonical());
    CHECK(again.hash() == cfg.hash());
    CHECK(cfg.hash().size() == 16);

    auto moved = cfg;
    moved.output_dir = "/elsewhere";
    moved.run_id = "named";
    CHECK(moved.hash() == cfg.hash());
    auto reseeded = cfg;
    reseeded.set("seed", "2");
    CHECK(reseeded.hash() != cfg.hash());
    CHECK(cfg.resolved_run_id() == "simulate-" + cfg.hash().substr(0, 8));
}

TEST_CASE("validation fails fast and names the constraint") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::Norms;
    cfg.norms.q = 2.0;
    CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("2 < q"), PreconditionError);
    cfg.output_dir = scratch("invalid").string();
    const auto o = quiet_run(cfg);
    CHECK(o.exit_code == kInvalidConfig);
    CHECK(o.error.find("2 < q") != std::string::npos);
    CHECK_FALSE(fs::exists(cfg.output_dir));

    ExperimentConfig rk2;
    rk2.stepper.order = 2;
    rk2.stepper.dt = 0.5;
    CHECK_THROWS_WITH_AS(rk2.validate(), doctest::Contains("order 2 needs dt"), PreconditionError);

    ExperimentConfig st;
    st.kind = ExperimentKind::Strichartz;
    st.Omega = 10.0;
    st.eps = 0.5;
    st.band = 1;
    CHECK_THROWS_WITH_AS(st.validate(), doctest::Contains("|Omega| eps < 2^j"), PreconditionError);
}

TEST_CASE("identical configs give byte-identical reports") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::Norms;
    cfg.Omega = 5.0;
    cfg.eps = 0.1;
    cfg.norms.alpha = 2.0;
    cfg.horizon = 0.5;
    cfg.stepper.dt = 0.02;
    cfg.data.amplitude = 0.05;
    cfg.output_dir = scratch("det_a").string();
    auto other = cfg;
    other.output_dir = scratch("det_b").string();
    const auto a = quiet_run(cfg), b = quiet_run(other);
    REQUIRE(a.exit_code == kOk);
    REQUIRE(b.exit_code == kOk);
    CHECK(a.files == b.files);
    // config.txt and manifest.json record output_dir, so only those may differ.
    for (const auto& f : a.files) {
        if (f == "config.txt" || f == "manifest.json") continue;
        CHECK_MESSAGE(slurp(fs::path(a.output_dir) / f) == slurp(fs::path(b.output_dir) / f), f);
    }

    const auto head = slurp(fs::path(a.output_dir) / "norms.csv").substr(0, 32);
    CHECK(head == "# config_hash: " + cfg.hash() + "\n");
    const auto manifest = load_json(fs::path(a.output_dir) / "manifest.json");
    CHECK(manifest["config_hash"] == cfg.hash());
    CHECK(manifest["files"].size() == a.files.size());
    const auto norms = load_json(fs::path(a.output_dir) / "norms.json");
    const auto& rec = norms["records"].back();
    for (const char* key : {"run_id", "t", "summands", "totals", "fitted_constants", "regime_flag"})
        CHECK(rec.contains(key));
}

TEST_CASE("snapshot files round-trip exactly") {
    const TorusGrid grid(8, 3.0);
    const auto f = testing::random_field(grid, 4, 1.0, 3.0, 5);
    const auto dir = scratch("snap");
    io::ensure_directory(dir);
    io::write_snapshot(dir / "x.nscsnap", f, 1.25, "0123456789abcdef");
    const auto s = io::read_snapshot(dir / "x.nscsnap");
    CHECK(s.time == 1.25);
    CHECK(s.config_hash == "0123456789abcdef");
    CHECK(s.field.grid() == grid);
    REQUIRE(s.field.components() == 4);
    CHECK((s.field - f).max_abs() == 0.0);

    std::ofstream(dir / "bad.nscsnap") << "not a snapshot";
    CHECK_THROWS_AS(io::read_snapshot(dir / "bad.nscsnap"), IoError);
}

TEST_CASE("instability and unwritable output map to their exit codes") {
    ExperimentConfig cfg;
    cfg.data.recipe = sim::Recipe::LargeData;
    cfg.data.amplitude = 40.0;
    cfg.data.a_fraction = 0.1;
    cfg.eps = 0.1;
    cfg.horizon = 1.0;
    cfg.stepper.dt = 0.005;
    cfg.output_dir = scratch("unstable").string();
    const auto o = quiet_run(cfg);
    CHECK(o.exit_code == kUnstable);
    CHECK(fs::exists(fs::path(o.output_dir) / "timeseries.csv"));
    CHECK(fs::exists(fs::path(o.output_dir) / "manifest.json"));

    const auto blocker = scratch("blocker");
    std::ofstream(blocker) << "file, not a directory";
    ExperimentConfig io_cfg;
    io_cfg.kind = ExperimentKind::Symbol;
    io_cfg.samples = 2;
    io_cfg.output_dir = (blocker / "sub").string();
    CHECK(quiet_run(io_cfg).exit_code == kIoFailure);
}

TEST_CASE("a one-cell sweep reproduces the norms run") {
    ExperimentConfig base;
    base.Omega = 5.0;
    base.eps = 0.1;
    base.norms.alpha = 2.0;
    base.horizon = 0.5;
    base.stepper.dt = 0.02;
    base.data.amplitude = 0.05;
    auto norms = base, sweep = base;
    norms.kind = ExperimentKind::Norms;
    norms.output_dir = scratch("one_norms").string();
    sweep.kind = ExperimentKind::Sweep;
    sweep.output_dir = scratch("one_sweep").string();
    const auto a = quiet_run(norms), b = quiet_run(sweep);
    REQUIRE(a.exit_code == kOk);
    REQUIRE(b.exit_code == kOk);
    const double E_norms = load_json(fs::path(a.output_dir) / "norms.json")["records"].back()["totals"]["E"];
    const auto rec = load_json(fs::path(b.output_dir) / "sweep.json")["records"];
    REQUIRE(rec.size() == 1);
    CHECK(rec[0]["totals"]["E"].get<double>() == E_norms);
}

TEST_CASE("tiny data is stable on a 4 x 4 sweep") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::Sweep;
    cfg.omegas = {0.0, 1.0, 2.0, 4.0};
    cfg.epss = {0.1, 0.2, 0.3, 0.5};
    cfg.horizon = 0.2;
    cfg.stepper.dt = 0.05;
    cfg.data.amplitude = 1e-3;
    cfg.norms.alpha.reset();
    cfg.norms.beta0 = 2.0;
    cfg.output_dir = scratch("tiny_sweep").string();
    const auto o = quiet_run(cfg);
    REQUIRE(o.exit_code == kOk);
    std::ifstream in(fs::path(o.output_dir) / "stability_fraction.csv");
    std::string line;
    std::getline(in, line);
    std::getline(in, line);
    int rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        CHECK(line.find(",1,1") != std::string::npos);
    }
    CHECK(rows == 16);
}

TEST_CASE("monotone row statistic") {
    const auto m = monotone_rows({{0.2, 0.4, 0.4, 1.0}, {1.0, 0.8}, {0.5}});
    CHECK(m.rows == 3);
    CHECK(m.monotone_rows == 2);
    CHECK(m.fraction() == doctest::Approx(2.0 / 3.0));
    CHECK(monotone_rows({}).fraction() == 0.0);
}

TEST_CASE("verify-all passes at n = 16") {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::VerifyAll;
    cfg.output_dir = scratch("verify").string();
    const auto o = quiet_run(cfg);
    for (const auto& c : o.checks) CHECK_MESSAGE(c.passed, c.name << ": " << c.detail);
    CHECK(o.exit_code == kOk);
}
