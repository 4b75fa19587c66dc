// omnoise: analytic, Monte-Carlo and time-domain engines for narrowband
// driven optomechanics, behind three subcommands:
//   validate  check and echo a device parameter set
//   sweep     run a preset parameter sweep, emit CSV + JSON manifest
//   envelope  synthesize a drive envelope, export binary (+ optional PSD)
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "omnoise/config.hpp"
#include "omnoise/envelope.hpp"
#include "omnoise/spectral.hpp"
#include "omnoise/sweep.hpp"
#include "omnoise/trace_io.hpp"

namespace {

int do_validate(const std::string& params) {
    const omnoise::ConfigReport rep = omnoise::parse_params_source(params);
    for (const auto& line : rep.echo) std::cout << line << "\n";
    for (const auto& w : rep.warnings) std::cout << "warning: " << w << "\n";
    for (const auto& e : rep.errors) std::cout << "error: " << e << "\n";
    if (!rep.ok()) return 1;
    std::cout << "ok\n";
    return 0;
}

struct SweepArgs {
    std::string params;
    std::string preset = "custom";
    std::string engines;
    std::string grid;
    std::string out = ".";
    std::string from_manifest;
    std::optional<std::uint64_t> seed;
    std::size_t samples = 0;
    double duration = 0.0;
    double dt = 0.0;
    std::size_t jobs = 1;
};

int do_sweep(const SweepArgs& a) {
    omnoise::SweepPlan plan;
    if (!a.from_manifest.empty()) {
        plan = omnoise::plan_from_manifest(a.from_manifest);
        plan.out_dir = a.out;
        if (a.jobs > 0) plan.jobs = a.jobs;
    } else {
        if (a.params.empty())
            throw std::invalid_argument("--params is required (or use --from-manifest)");
        const omnoise::ConfigReport rep = omnoise::parse_params_source(a.params);
        if (!rep.ok()) {
            for (const auto& e : rep.errors) std::cerr << "error: " << e << "\n";
            return 1;
        }
        for (const auto& w : rep.warnings) std::cerr << "warning: " << w << "\n";
        std::optional<omnoise::GridSpec> grid;
        if (!a.grid.empty()) grid = omnoise::parse_grid(a.grid);
        std::vector<omnoise::Engine> engines;
        if (!a.engines.empty()) engines = omnoise::engines_from_list(a.engines);
        plan = omnoise::build_plan(omnoise::preset_from_string(a.preset), *rep.params,
                                   rep.values, grid, engines, a.seed, a.samples, a.duration,
                                   a.dt, a.jobs, a.out);
    }

    const omnoise::SweepOutcome outcome = omnoise::run_sweep(plan);
    std::cout << "csv:      " << outcome.csv_path << "\n";
    std::cout << "manifest: " << outcome.manifest_path << "\n";
    std::printf("rows:     %zu ok, %zu failed   (%.2f s)\n", outcome.n_ok, outcome.n_failed,
                outcome.wall_s);
    return outcome.exit_code();
}

struct EnvelopeArgs {
    std::string params;
    std::string shape = "box";
    std::string sideband = "blue";
    double sigma_hz = 0.0;
    double flux = 0.0;
    double delta_hz = 0.0;
    double alpha_in = 0.0;
    double n0 = 0.0;
    double duration = 0.0;
    double dt = 0.0;
    std::uint64_t seed = omnoise::kDefaultSeed;
    std::string out = "envelope.bin";
    std::string psd_csv;
};

int do_envelope(const EnvelopeArgs& a) {
    const omnoise::PhysParams p = omnoise::load_params(a.params);
    const omnoise::Sideband sb = omnoise::sideband_from_string(a.sideband);

    omnoise::DriveSpec spec;
    double dt = a.dt;
    if (a.shape == "box") {
        const double sigma = omnoise::hz_to_rad(a.sigma_hz);
        spec = omnoise::DriveSpec::box_noise(sigma, a.flux, sb, p.omega_m());
        if (dt <= 0.0) dt = 0.1 / sigma;
    } else if (a.shape == "two_tone") {
        const double delta = omnoise::hz_to_rad(a.delta_hz);
        const double alpha = a.alpha_in > 0.0 ? a.alpha_in : std::sqrt(a.flux / 2.0);
        spec = omnoise::DriveSpec::two_tone(delta, alpha, sb);
        if (dt <= 0.0) dt = (delta > 0.0) ? 0.05 / delta : a.duration / 16.0;
    } else if (a.shape == "coherent") {
        spec = omnoise::DriveSpec::coherent(a.n0, sb);
        if (dt <= 0.0) dt = a.duration / 16.0;
    } else {
        throw std::invalid_argument("--shape must be box, two_tone or coherent");
    }
    if (!(a.duration > 0.0)) throw std::invalid_argument("--duration must be > 0");

    const omnoise::Envelope env = omnoise::synthesize_envelope(p, spec, a.duration, dt, a.seed);
    omnoise::write_envelope(a.out, env);
    std::printf("wrote %s: %zu samples, dt = %.6g s, mean |r|^2 = %.6g\n", a.out.c_str(),
                env.samples.size(), env.dt, env.mean_power());

    if (!a.psd_csv.empty()) {
        const std::size_t seg = std::min<std::size_t>(env.samples.size(), 4096);
        const omnoise::PSD psd = omnoise::welch_psd(env.samples, env.dt, seg, 0.5);
        std::ofstream os(a.psd_csv, std::ios::binary);
        if (!os) throw std::invalid_argument("cannot write " + a.psd_csv);
        omnoise::write_psd_csv(os, psd);
        std::printf("wrote %s: %zu bins, %zu segments\n", a.psd_csv.c_str(),
                    psd.values.size(), psd.segment_count);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"narrowband-driven optomechanics toolkit"};
    app.set_version_flag("--version", omnoise::kToolVersion);
    app.require_subcommand(1);

    std::string validate_params;
    CLI::App* validate = app.add_subcommand("validate", "check a device parameter set");
    validate->add_option("--params", validate_params, "parameter file or builtin name")
        ->required();

    SweepArgs sa;
    CLI::App* sweep = app.add_subcommand("sweep", "run a preset sweep");
    sweep->add_option("--params", sa.params, "parameter file or builtin name");
    sweep->add_option("--preset", sa.preset,
                      "power_sweep_blue_noise | bandwidth_sweep_blue_noise | "
                      "spacing_sweep_blue_twotone | spacing_sweep_red_twotone | custom");
    sweep->add_option("--engine", sa.engines, "comma list: analytic,quasistatic,langevin");
    sweep->add_option("--grid", sa.grid, "start:stop:steps[:log] over the preset axis");
    sweep->add_option("--seed", sa.seed, "base seed (default 20260819)");
    sweep->add_option("--out", sa.out, "output directory")->envname("OMNOISE_OUT");
    sweep->add_option("--samples", sa.samples, "Monte-Carlo draws per quasistatic row");
    sweep->add_option("--duration", sa.duration, "simulated seconds per langevin row");
    sweep->add_option("--dt", sa.dt, "integrator step, seconds");
    sweep->add_option("--jobs", sa.jobs, "concurrent sweep points (default 1)");
    sweep->add_option("--from-manifest", sa.from_manifest,
                      "replay a recorded manifest (byte-identical CSV)");

    EnvelopeArgs ea;
    CLI::App* envelope = app.add_subcommand("envelope", "synthesize and export a drive envelope");
    envelope->add_option("--params", ea.params, "parameter file or builtin name")->required();
    envelope->add_option("--shape", ea.shape, "box | two_tone | coherent");
    envelope->add_option("--sideband", ea.sideband, "red | blue");
    envelope->add_option("--sigma-hz", ea.sigma_hz, "box noise full bandwidth, Hz");
    envelope->add_option("--flux", ea.flux, "photon flux F0, photons/s");
    envelope->add_option("--delta-hz", ea.delta_hz, "two-tone spacing, Hz");
    envelope->add_option("--alpha-in", ea.alpha_in, "per-tone amplitude, sqrt(photons/s)");
    envelope->add_option("--n0", ea.n0, "coherent intracavity photon number");
    envelope->add_option("--duration", ea.duration, "seconds")->required();
    envelope->add_option("--dt", ea.dt, "sample spacing, seconds (default: resolved)");
    envelope->add_option("--seed", ea.seed, "synthesis seed");
    envelope->add_option("--out", ea.out, "output file")->envname("OMNOISE_OUT");
    envelope->add_option("--psd-csv", ea.psd_csv, "also write a Welch PSD CSV here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (validate->parsed()) return do_validate(validate_params);
        if (sweep->parsed()) return do_sweep(sa);
        if (envelope->parsed()) return do_envelope(ea);
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
