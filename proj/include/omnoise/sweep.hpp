#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "omnoise/config.hpp"
#include "omnoise/params.hpp"

namespace omnoise {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr std::uint64_t kDefaultSeed = 20260819;

enum class Engine { Analytic, Quasistatic, Langevin };
std::string to_string(Engine e);
Engine engine_from_string(const std::string& s);
std::vector<Engine> engines_from_list(const std::string& comma_separated);

enum class PresetTag {
    PowerSweepBlueNoise,      // occupancy vs photon number, box noise on the blue side
    BandwidthSweepBlueNoise,  // occupancy vs noise bandwidth at fixed flux
    SpacingSweepBlueTwotone,  // occupancy vs tone spacing, blue side
    SpacingSweepRedTwotone,   // occupancy vs tone spacing, red side
    Custom                    // coherent drive, axis = photon number
};
std::string to_string(PresetTag t);
PresetTag preset_from_string(const std::string& s);

// "--grid start:stop:steps[:log]"
struct GridSpec {
    double start = 0.0;
    double stop = 0.0;
    std::size_t steps = 0;
    bool log = false;
};
GridSpec parse_grid(const std::string& text);
std::vector<double> grid_values(const GridSpec& g);  // strictly monotone

// Fully resolved execution plan; the manifest serializes exactly this, so a
// replay recomputes nothing from defaults.
struct SweepPlan {
    PresetTag preset = PresetTag::Custom;
    Sideband sideband = Sideband::Red;
    std::string axis;                      // "nbar0" | "sigma_hz" | "delta_hz"
    std::vector<double> grid;              // axis values
    std::vector<double> sigma_hz_branches; // power preset: fixed bandwidths; else empty
    double flux_F0 = 0.0;                  // fixed flux (bandwidth preset), photons/s
    double nbar0_fixed = 0.0;              // fixed photon number (two-tone presets)
    std::vector<Engine> engines;
    std::vector<std::uint64_t> seeds;      // one row set per seed
    std::size_t samples = 1000000;         // quasistatic MC draws
    double duration = 0.0;                 // 0 = per-engine auto rule
    double dt = 0.0;                       // 0 = per-engine auto rule
    std::size_t jobs = 1;
    std::map<std::string, double> param_values;  // device keys, Hz domain
    std::string out_dir = ".";
    std::string csv_name = "sweep.csv";
    std::string manifest_name = "manifest.json";
};

// Applies preset defaults (grid, engines, seed fan-out, drive constants).
// Optional arguments use 0 / empty to mean "preset default".
SweepPlan build_plan(PresetTag preset, const PhysParams& p,
                     const std::map<std::string, double>& param_values,
                     const std::optional<GridSpec>& grid, const std::vector<Engine>& engines,
                     std::optional<std::uint64_t> seed, std::size_t samples, double duration,
                     double dt, std::size_t jobs, const std::string& out_dir);

struct SweepOutcome {
    std::size_t n_ok = 0;
    std::size_t n_failed = 0;
    std::string csv_path;
    std::string manifest_path;
    double wall_s = 0.0;

    // 0 clean, 2 all points failed, 3 partial failures
    int exit_code() const { return n_failed == 0 ? 0 : (n_ok == 0 ? 2 : 3); }
};

// Executes the plan: one CSV row per (grid point, branch, engine, seed),
// written in deterministic order regardless of jobs; JSON manifest beside
// it. Identical plan => identical CSV bytes.
SweepOutcome run_sweep(const SweepPlan& plan);

std::string plan_to_json(const SweepPlan& plan, double wall_s);
SweepPlan plan_from_manifest(const std::string& path);

}  // namespace omnoise
