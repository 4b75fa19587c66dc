#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "omnoise/analytic.hpp"
#include "omnoise/config.hpp"
#include "omnoise/sweep.hpp"
#include "omnoise/units.hpp"

using namespace omnoise;

namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    REQUIRE(is);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

fs::path fresh_dir(const char* stem) {
    const auto dir = fs::temp_directory_path() / stem;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

// Hz-domain key map for the scaled device (kappa = 1 rad/s and friends),
// matching what a params file would contain.
std::map<std::string, double> scaled_values() {
    return {{"omega_m_hz", rad_to_hz(10.0)}, {"gamma_hz", rad_to_hz(0.01)},
            {"kappa_hz", rad_to_hz(1.0)},    {"g0_hz", rad_to_hz(0.05)},
            {"n_th", 10.0},                  {"n_max", 1e4}};
}

const char* kCsvHeader =
    "preset,engine,sideband,axis,axis_value,sigma_hz,delta_hz,nbar0,flux_F0,"
    "gamma_opt_over_gamma,n_m,n_m_stderr,unstable_fraction,status,seed";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("grid strings parse to inclusive grids") {
    auto g = parse_grid("1:10:4");
    CHECK(g.start == 1.0);
    CHECK(g.stop == 10.0);
    CHECK(g.steps == 4);
    CHECK_FALSE(g.log);
    const auto v = grid_values(g);
    REQUIRE(v.size() == 4);
    CHECK(v.front() == 1.0);
    CHECK(v.back() == 10.0);
    CHECK(v[1] == doctest::Approx(4.0).epsilon(1e-12));

    const auto lv = grid_values(parse_grid("1:1000:4:log"));
    REQUIRE(lv.size() == 4);
    CHECK(lv[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(lv[1] == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(lv[2] == doctest::Approx(100.0).epsilon(1e-12));
    CHECK(lv[3] == 1000.0);  // endpoint forced exactly

    CHECK(grid_values(parse_grid("5:5:1")) == std::vector<double>{5.0});
}

TEST_CASE("grid strings reject malformed input") {
    CHECK_THROWS_AS(parse_grid("1:10"), std::invalid_argument);
    CHECK_THROWS_AS(parse_grid("1:10:0"), std::invalid_argument);
    CHECK_THROWS_AS(parse_grid("a:b:c"), std::invalid_argument);
    CHECK_THROWS_AS(parse_grid("1:10:3:cubic"), std::invalid_argument);
    CHECK_THROWS_AS(grid_values(parse_grid("10:1:5")), std::invalid_argument);
    CHECK_THROWS_AS(grid_values(parse_grid("0:10:5:log")), std::invalid_argument);
    CHECK_NOTHROW(grid_values(parse_grid("-5:5:3")));  // linear grids may span zero
}

TEST_CASE("engine and preset names round-trip") {
    for (auto e : {Engine::Analytic, Engine::Quasistatic, Engine::Langevin})
        CHECK(engine_from_string(to_string(e)) == e);
    CHECK_THROWS_AS(engine_from_string("fem"), std::invalid_argument);

    const auto list = engines_from_list("analytic,langevin");
    REQUIRE(list.size() == 2);
    CHECK(list[0] == Engine::Analytic);
    CHECK(list[1] == Engine::Langevin);
    CHECK_THROWS_AS(engines_from_list(""), std::invalid_argument);
    CHECK_THROWS_AS(engines_from_list("analytic,,quasistatic"), std::invalid_argument);
    CHECK_THROWS_AS(engines_from_list("bogus"), std::invalid_argument);

    for (auto t : {PresetTag::PowerSweepBlueNoise, PresetTag::BandwidthSweepBlueNoise,
                   PresetTag::SpacingSweepBlueTwotone, PresetTag::SpacingSweepRedTwotone,
                   PresetTag::Custom})
        CHECK(preset_from_string(to_string(t)) == t);
    CHECK_THROWS_AS(preset_from_string("grand-tour"), std::invalid_argument);
}

TEST_CASE("power preset resolves its documented defaults") {
    const auto rep = params_from_values(scaled_values());
    REQUIRE(rep.ok());
    const auto plan = build_plan(PresetTag::PowerSweepBlueNoise, *rep.params, rep.values,
                                 std::nullopt, {}, std::nullopt, 0, 0.0, 0.0, 1, ".");

    CHECK(plan.sideband == Sideband::Blue);
    CHECK(plan.axis == "nbar0");
    CHECK(plan.seeds.size() == 20);
    CHECK(plan.sigma_hz_branches.size() == 3);
    CHECK(plan.engines.size() == 2);  // analytic + quasistatic unless overridden

    // Default grid brackets the threshold n0* = 1: 0.05 n0* .. 3 n0*, log.
    REQUIRE(plan.grid.size() == 13);
    CHECK(plan.grid.front() == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(plan.grid.back() == doctest::Approx(3.0).epsilon(1e-12));

    // Seeds are decorrelated repetitions of one base seed.
    CHECK(plan.seeds[0] != plan.seeds[1]);
    const auto again = build_plan(PresetTag::PowerSweepBlueNoise, *rep.params, rep.values,
                                  std::nullopt, {}, std::nullopt, 0, 0.0, 0.0, 1, ".");
    CHECK(again.seeds == plan.seeds);
}

TEST_CASE("bandwidth preset fixes the flux at half-critical damping") {
    const auto rep = params_from_values(scaled_values());
    REQUIRE(rep.ok());
    const auto plan = build_plan(PresetTag::BandwidthSweepBlueNoise, *rep.params, rep.values,
                                 std::nullopt, {}, std::nullopt, 0, 0.0, 0.0, 1, ".");
    CHECK(plan.axis == "sigma_hz");
    const double gopt = gamma_opt_bar(*rep.params, nbar0_from_flux(*rep.params, plan.flux_F0));
    CHECK(gopt == doctest::Approx(0.5 * rep.params->gamma()).epsilon(1e-9));
}

TEST_CASE("custom preset demands an explicit grid") {
    const auto rep = params_from_values(scaled_values());
    REQUIRE(rep.ok());
    CHECK_THROWS_AS(build_plan(PresetTag::Custom, *rep.params, rep.values, std::nullopt, {},
                               std::nullopt, 0, 0.0, 0.0, 1, "."),
                    std::invalid_argument);
}

TEST_CASE("custom analytic sweep reproduces the direct model call") {
    const auto rep = params_from_values(scaled_values());
    REQUIRE(rep.ok());
    const auto dir = fresh_dir("omnoise_sweep_direct");
    auto plan = build_plan(PresetTag::Custom, *rep.params, rep.values, parse_grid("0.5:0.5:1"),
                           {Engine::Analytic}, 7, 0, 0.0, 0.0, 1, dir.string());
    const auto outcome = run_sweep(plan);
    CHECK(outcome.exit_code() == 0);
    CHECK(outcome.n_ok == 1);
    CHECK(outcome.n_failed == 0);

    const auto lines = split(slurp(outcome.csv_path), '\n');
    REQUIRE(lines.size() >= 2);
    CHECK(lines[0] == kCsvHeader);
    const auto cols = split(lines[1], ',');
    REQUIRE(cols.size() == 15);
    CHECK(cols[0] == "custom");
    CHECK(cols[1] == "analytic");
    CHECK(cols[2] == "red");
    CHECK(cols[13] == "ok");

    // %.17g round-trips doubles exactly, so the row must equal the model.
    const double expected =
        occupancy_coherent(*rep.params,
                           backaction_damping_coherent(*rep.params, Sideband::Red, 0.5))
            .n_m;
    CHECK(std::stod(cols[10]) == expected);
    fs::remove_all(dir);
}

TEST_CASE("langevin engine integrates inside a sweep") {
    const auto rep = params_from_values(scaled_values());
    REQUIRE(rep.ok());
    const auto dir = fresh_dir("omnoise_sweep_lgv");
    auto plan = build_plan(PresetTag::Custom, *rep.params, rep.values, parse_grid("1:1:1"),
                           {Engine::Langevin}, 11, 0, 0.0, 0.0, 1, dir.string());
    const auto outcome = run_sweep(plan);
    CHECK(outcome.exit_code() == 0);

    const auto cols = split(split(slurp(outcome.csv_path), '\n')[1], ',');
    REQUIRE(cols.size() == 15);
    CHECK(cols[13] == "ok");
    // gamma_opt = gamma at n0 = 1: expect ~n_th/2 up to simulation noise.
    const double n_m = std::stod(cols[10]);
    CHECK(n_m > 3.5);
    CHECK(n_m < 6.5);
    CHECK(std::stod(cols[11]) > 0.0);  // real error bar
    fs::remove_all(dir);
}

TEST_CASE("failed points are flagged without sinking the sweep") {
    const auto rep = params_from_values(scaled_values());
    REQUIRE(rep.ok());
    const auto dir = fresh_dir("omnoise_sweep_fail");
    // n0 = -1 cannot be a photon number; the second point is fine.
    auto plan = build_plan(PresetTag::Custom, *rep.params, rep.values, parse_grid("-1:1:2"),
                           {Engine::Analytic}, 7, 0, 0.0, 0.0, 1, dir.string());
    const auto outcome = run_sweep(plan);
    CHECK(outcome.n_failed == 1);
    CHECK(outcome.n_ok == 1);
    CHECK(outcome.exit_code() == 3);

    const auto lines = split(slurp(outcome.csv_path), '\n');
    CHECK(lines[1].find("failed:") != std::string::npos);
    CHECK(lines[2].find(",ok,") != std::string::npos);

    // All points failing is the harder exit.
    auto dead = build_plan(PresetTag::Custom, *rep.params, rep.values, parse_grid("-5:-1:2"),
                           {Engine::Analytic}, 7, 0, 0.0, 0.0, 1, dir.string());
    CHECK(run_sweep(dead).exit_code() == 2);
    fs::remove_all(dir);
}

TEST_CASE("manifest replay reproduces the CSV byte for byte") {
    const auto rep = params_from_values(scaled_values());
    REQUIRE(rep.ok());
    const auto dir1 = fresh_dir("omnoise_sweep_rep1");
    const auto dir2 = fresh_dir("omnoise_sweep_rep2");

    auto plan = build_plan(PresetTag::Custom, *rep.params, rep.values, parse_grid("0.2:1.4:3"),
                           {Engine::Analytic, Engine::Quasistatic}, 99, 20000, 0.0, 0.0, 2,
                           dir1.string());
    const auto first = run_sweep(plan);
    CHECK(first.exit_code() == 0);

    auto replay = plan_from_manifest(first.manifest_path);
    replay.out_dir = dir2.string();
    const auto second = run_sweep(replay);
    CHECK(second.exit_code() == 0);

    CHECK(slurp(first.csv_path) == slurp(second.csv_path));
    fs::remove_all(dir1);
    fs::remove_all(dir2);
}

TEST_CASE("jobs do not change the output") {
    const auto rep = params_from_values(scaled_values());
    REQUIRE(rep.ok());
    const auto dir1 = fresh_dir("omnoise_sweep_j1");
    const auto dir4 = fresh_dir("omnoise_sweep_j4");

    auto serial = build_plan(PresetTag::Custom, *rep.params, rep.values, parse_grid("0.2:1.4:4"),
                             {Engine::Quasistatic}, 5, 20000, 0.0, 0.0, 1, dir1.string());
    auto parallel = serial;
    parallel.jobs = 4;
    parallel.out_dir = dir4.string();
    CHECK(slurp(run_sweep(serial).csv_path) == slurp(run_sweep(parallel).csv_path));
    fs::remove_all(dir1);
    fs::remove_all(dir4);
}

TEST_CASE("builtin parameter sets parse and echo the derived rates") {
    CHECK(is_builtin_params("paper_device"));
    CHECK(is_builtin_params("paper_device_probe"));
    CHECK_FALSE(is_builtin_params("lab_device"));
    const auto names = builtin_params_names();
    CHECK(names.size() == 2);

    const auto rep = parse_params_source("paper_device");
    REQUIRE(rep.ok());
    REQUIRE(rep.params.has_value());
    CHECK(rep.params->omega_m() == doctest::Approx(hz_to_rad(9.22e6)).epsilon(1e-12));

    // Echo includes the self-oscillation threshold for orientation.
    bool has_threshold = false;
    for (const auto& line : rep.echo) has_threshold |= line.find("20907") != std::string::npos;
    CHECK(has_threshold);
}

TEST_CASE("parameter files surface every problem at once") {
    const auto dir = fresh_dir("omnoise_cfg");
    const auto good = dir / "good.params";
    std::ofstream(good) << "# scaled device\nomega_m_hz = 1.5915e0\ngamma_hz = 1.5915e-3\n"
                           "kappa_hz = 0.15915\ng0_hz = 7.9577e-3\nn_th = 10\nn_max = 1e4\n";
    const auto rep = parse_params_source(good.string());
    REQUIRE(rep.ok());
    CHECK(rep.params->n_th() == 10.0);

    const auto broken = dir / "broken.params";
    std::ofstream(broken) << "omega_m_hz = 9.22e6\ngamma_hz = 0\nn_th = nan\nwhat = 3\n";
    const auto bad = parse_params_source(broken.string());
    CHECK_FALSE(bad.ok());
    CHECK(bad.errors.size() >= 3);  // missing kappa/g0/n_max, zero gamma, nan n_th
    bool unknown_flagged = false;
    for (const auto& w : bad.warnings) unknown_flagged |= w.find("what") != std::string::npos;
    CHECK(unknown_flagged);
    CHECK_THROWS_AS(load_params(broken.string()), std::runtime_error);

    // kappa >= omega_m still parses (the analytic layer refuses later), but
    // the report says so loudly.
    const auto unresolved = dir / "unresolved.params";
    std::ofstream(unresolved) << "omega_m_hz = 1e6\ngamma_hz = 100\nkappa_hz = 2e6\n"
                                 "g0_hz = 10\nn_th = 5\nn_max = 1e8\n";
    const auto ur = parse_params_source(unresolved.string());
    CHECK(ur.ok());
    bool resolution_flagged = false;
    for (const auto& w : ur.warnings)
        resolution_flagged |= w.find("sideband") != std::string::npos;
    CHECK(resolution_flagged);

    CHECK_FALSE(parse_params_source(  (dir / "missing.params").string()  ).ok());
    fs::remove_all(dir);
}

TEST_CASE("a direct values map behaves like a file") {
    auto v = scaled_values();
    const auto rep = params_from_values(v);
    REQUIRE(rep.ok());
    CHECK(rep.params->kappa() == doctest::Approx(1.0).epsilon(1e-10));

    v.erase("n_max");
    CHECK_FALSE(params_from_values(v).ok());

    auto w = scaled_values();
    w["n_ba"] = 0.01;
    const auto rep2 = params_from_values(w);
    REQUIRE(rep2.ok());
    CHECK(rep2.params->n_ba() == 0.01);
}

}  // TEST_SUITE("cli")
