#include "omnoise/sweep.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "omnoise/analytic.hpp"
#include "omnoise/envelope.hpp"
#include "omnoise/langevin.hpp"
#include "omnoise/quasistatic.hpp"
#include "omnoise/rng.hpp"

namespace omnoise {

namespace {

using nlohmann::json;

// Analytic regime rule: a drive structure narrower than a few mechanical
// linewidths is treated adiabatically, anything wider with the QNA /
// coherent formulas. The factor 5 is a documented convention.
constexpr double kNarrowFactor = 5.0;

struct PointDrive {
    DriveSpec spec;
    double nbar0 = 0.0;
    double flux_F0 = 0.0;
    double sigma = 0.0;  // rad/s, box noise only
    double delta = 0.0;  // rad/s, two-tone only
};

PointDrive resolve_point(const PhysParams& p, const SweepPlan& plan, double axis_value,
                         double sigma_branch_hz) {
    PointDrive d;
    const double w2k = p.omega_m() * p.omega_m() / p.kappa();  // F0 per photon
    switch (plan.preset) {
        case PresetTag::PowerSweepBlueNoise:
            d.nbar0 = axis_value;
            d.flux_F0 = d.nbar0 * w2k;
            d.sigma = hz_to_rad(sigma_branch_hz);
            d.spec = DriveSpec::box_noise(d.sigma, d.flux_F0, Sideband::Blue, p.omega_m());
            break;
        case PresetTag::BandwidthSweepBlueNoise:
            d.flux_F0 = plan.flux_F0;
            d.nbar0 = nbar0_from_flux(p, d.flux_F0);
            d.sigma = hz_to_rad(axis_value);
            d.spec = DriveSpec::box_noise(d.sigma, d.flux_F0, Sideband::Blue, p.omega_m());
            break;
        case PresetTag::SpacingSweepBlueTwotone:
        case PresetTag::SpacingSweepRedTwotone: {
            d.nbar0 = plan.nbar0_fixed;
            d.flux_F0 = d.nbar0 * w2k;
            d.delta = hz_to_rad(axis_value);
            d.spec = DriveSpec::two_tone(d.delta, std::sqrt(d.flux_F0 / 2.0), plan.sideband);
            break;
        }
        case PresetTag::Custom:
            d.nbar0 = axis_value;
            d.flux_F0 = d.nbar0 * w2k;
            d.spec = DriveSpec::coherent(d.nbar0, plan.sideband);
            break;
    }
    return d;
}

struct TaskResult {
    double n_m = std::nan("");
    double std_error = std::nan("");
    double unstable = std::nan("");
    std::string status = "ok";
};

TaskResult analytic_task(const PhysParams& p, const SweepPlan& plan, const PointDrive& d) {
    TaskResult r;
    OccupancyPrediction pred;
    if (d.spec.is_coherent()) {
        pred = occupancy_coherent(p, backaction_damping_coherent(p, plan.sideband, d.nbar0));
        r.unstable = pred.stable ? 0.0 : 1.0;
    } else if (d.spec.is_box_noise()) {
        if (d.sigma < kNarrowFactor * p.gamma()) {
            if (plan.sideband == Sideband::Blue) {
                pred = occupancy_blue_noise_narrow(p, d.flux_F0);
                r.unstable = unstable_probability(p, d.flux_F0);
            } else {
                const double q = q_parameter(p, Sideband::Red);
                pred.model_tag = ModelTag::QuasistaticClosedForm;
                pred.gamma_eff = p.gamma();
                pred.n_m = (q * d.flux_F0 > 0.0)
                               ? quasistatic_occupancy_closed_form(p, q, d.flux_F0)
                               : p.n_th();
                r.unstable = 0.0;
            }
        } else {
            pred = occupancy_noise_qna(p, plan.sideband, d.flux_F0, d.sigma);
            r.unstable = pred.stable ? 0.0 : 1.0;
        }
    } else {
        if (d.delta < kNarrowFactor * p.gamma()) {
            pred = occupancy_two_tone_narrow(p, plan.sideband, d.nbar0);
        } else {
            pred = occupancy_coherent(p,
                                      backaction_damping_coherent(p, plan.sideband, d.nbar0));
        }
        r.unstable = pred.stable ? 0.0 : 1.0;
    }
    r.n_m = pred.n_m;
    r.std_error = 0.0;
    return r;
}

TaskResult quasistatic_task(const PhysParams& p, const SweepPlan& plan, const PointDrive& d,
                            std::uint64_t task_seed) {
    TaskResult r;
    const double q = q_parameter(p, plan.sideband);
    MCResult mc;
    if (d.spec.is_box_noise()) {
        if (d.flux_F0 == 0.0) {
            r.n_m = p.n_th();
            r.std_error = 0.0;
            r.unstable = 0.0;
            return r;
        }
        mc = quasistatic_mc(p, q, d.flux_F0, plan.samples, task_seed);
    } else if (d.spec.is_two_tone()) {
        const auto& tt = std::get<TwoTone>(d.spec.shape);
        double duration, dt;
        if (tt.delta > 0.0) {
            const double period = 2.0 * two_pi / tt.delta;  // of |r|^2
            duration = (plan.duration > 0.0) ? plan.duration : 64.0 * period;
            dt = (plan.dt > 0.0) ? plan.dt : period / 256.0;
        } else {
            duration = (plan.duration > 0.0) ? plan.duration : 1.0;
            dt = (plan.dt > 0.0) ? plan.dt : duration / 256.0;
        }
        mc = quasistatic_timeavg(p, q, two_tone_envelope(d.spec, duration, dt), 0.0);
    } else {
        mc = quasistatic_timeavg(p, q, coherent_envelope(d.spec, p, 1.0, 0.25), 0.0);
    }
    r.n_m = mc.mean_n_m;
    r.std_error = mc.std_error;
    r.unstable = mc.unstable_fraction;
    return r;
}

TaskResult langevin_task(const PhysParams& p, const SweepPlan& plan, const PointDrive& d,
                         std::uint64_t task_seed) {
    SimConfig cfg;
    cfg.dt = (plan.dt > 0.0) ? plan.dt : std::min(0.09 / p.kappa(), 0.18 / p.omega_m());
    double duration = 200.0 / p.gamma();
    if (d.spec.is_two_tone() && d.delta > 0.0)
        duration = std::max(duration, 64.0 * two_pi / d.delta);
    cfg.duration = (plan.duration > 0.0) ? plan.duration : duration;
    cfg.transient_skip = 0.1 * cfg.duration;
    cfg.saturation = SimConfig::Saturation::NonlinearDamping;
    cfg.seed = task_seed;

    const SimTrace trace = integrate(p, d.spec, cfg);
    const TraceStats stats = occupancy_from_trace(trace, cfg.transient_skip);
    TaskResult r;
    r.n_m = stats.mean;
    r.std_error = stats.std_error;
    return r;
}

struct Task {
    std::size_t point = 0;
    std::size_t branch = 0;
    Engine engine = Engine::Analytic;
    std::size_t seed_index = 0;
};

std::string sanitize(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    if (s.size() > 200) s.resize(200);  // keep rows well under the format buffer
    return s;
}

}  // namespace

std::string to_string(Engine e) {
    switch (e) {
        case Engine::Analytic: return "analytic";
        case Engine::Quasistatic: return "quasistatic";
        case Engine::Langevin: return "langevin";
    }
    return "?";
}

Engine engine_from_string(const std::string& s) {
    if (s == "analytic") return Engine::Analytic;
    if (s == "quasistatic") return Engine::Quasistatic;
    if (s == "langevin") return Engine::Langevin;
    throw std::invalid_argument("unknown engine '" + s +
                                "' (expected analytic, quasistatic, langevin)");
}

std::vector<Engine> engines_from_list(const std::string& comma_separated) {
    std::vector<Engine> out;
    std::stringstream ss(comma_separated);
    std::string item;
    while (std::getline(ss, item, ',')) {
        // An empty token is a typo, not a request for fewer engines.
        out.push_back(engine_from_string(item));
    }
    if (out.empty()) throw std::invalid_argument("empty engines list");
    return out;
}

std::string to_string(PresetTag t) {
    switch (t) {
        case PresetTag::PowerSweepBlueNoise: return "power_sweep_blue_noise";
        case PresetTag::BandwidthSweepBlueNoise: return "bandwidth_sweep_blue_noise";
        case PresetTag::SpacingSweepBlueTwotone: return "spacing_sweep_blue_twotone";
        case PresetTag::SpacingSweepRedTwotone: return "spacing_sweep_red_twotone";
        case PresetTag::Custom: return "custom";
    }
    return "?";
}

PresetTag preset_from_string(const std::string& s) {
    for (PresetTag t : {PresetTag::PowerSweepBlueNoise, PresetTag::BandwidthSweepBlueNoise,
                        PresetTag::SpacingSweepBlueTwotone, PresetTag::SpacingSweepRedTwotone,
                        PresetTag::Custom})
        if (to_string(t) == s) return t;
    throw std::invalid_argument("unknown preset '" + s + "'");
}

GridSpec parse_grid(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ':')) parts.push_back(item);
    if (parts.size() != 3 && parts.size() != 4)
        throw std::invalid_argument("grid must be start:stop:steps[:log]");
    GridSpec g;
    try {
        g.start = std::stod(parts[0]);
        g.stop = std::stod(parts[1]);
        const long long steps = std::stoll(parts[2]);
        if (steps < 1) throw std::invalid_argument("steps");
        g.steps = static_cast<std::size_t>(steps);
    } catch (const std::exception&) {
        throw std::invalid_argument("grid must be start:stop:steps[:log] with numeric fields");
    }
    if (parts.size() == 4) {
        if (parts[3] != "log") throw std::invalid_argument("grid modifier must be 'log'");
        g.log = true;
    }
    return g;
}

std::vector<double> grid_values(const GridSpec& g) {
    if (!std::isfinite(g.start) || !std::isfinite(g.stop))
        throw std::invalid_argument("grid endpoints must be finite");
    if (g.steps == 0) throw std::invalid_argument("grid needs at least one step");
    if (g.steps == 1) return {g.start};
    if (!(g.stop > g.start))
        throw std::invalid_argument("grid must be strictly increasing (start < stop)");
    if (g.log && !(g.start > 0.0))
        throw std::invalid_argument("log grid requires start > 0");
    std::vector<double> v(g.steps);
    const double n1 = static_cast<double>(g.steps - 1);
    for (std::size_t i = 0; i < g.steps; ++i) {
        const double f = static_cast<double>(i) / n1;
        v[i] = g.log ? g.start * std::exp(f * std::log(g.stop / g.start))
                     : g.start + f * (g.stop - g.start);
    }
    v.back() = g.stop;  // exact endpoint regardless of rounding
    return v;
}

SweepPlan build_plan(PresetTag preset, const PhysParams& p,
                     const std::map<std::string, double>& param_values,
                     const std::optional<GridSpec>& grid, const std::vector<Engine>& engines,
                     std::optional<std::uint64_t> seed, std::size_t samples, double duration,
                     double dt, std::size_t jobs, const std::string& out_dir) {
    SweepPlan plan;
    plan.preset = preset;
    plan.param_values = param_values;
    plan.out_dir = out_dir;
    plan.jobs = std::max<std::size_t>(1, jobs);
    if (samples > 0) plan.samples = samples;
    plan.duration = duration;
    plan.dt = dt;

    const double n0_star = self_oscillation_threshold_photons(p);
    const double gamma_hz = rad_to_hz(p.gamma());
    const double kappa_hz = rad_to_hz(p.kappa());
    if (!std::isfinite(n0_star) && preset != PresetTag::Custom)
        throw std::invalid_argument("preset " + to_string(preset) + " requires g0 > 0");

    switch (preset) {
        case PresetTag::PowerSweepBlueNoise:
            plan.sideband = Sideband::Blue;
            plan.axis = "nbar0";
            plan.sigma_hz_branches = {2.0, 400.0, 2.0e5};
            break;
        case PresetTag::BandwidthSweepBlueNoise:
            plan.sideband = Sideband::Blue;
            plan.axis = "sigma_hz";
            // Fixed flux placing the broadband backaction at half the
            // intrinsic damping: well below threshold yet clearly visible.
            plan.flux_F0 = 0.5 * n0_star * p.omega_m() * p.omega_m() / p.kappa();
            break;
        case PresetTag::SpacingSweepBlueTwotone:
            plan.sideband = Sideband::Blue;
            plan.axis = "delta_hz";
            // 8 g0^2 nbar0 = gamma kappa / 2, the half-way-to-instability point.
            plan.nbar0_fixed = 0.25 * n0_star;
            break;
        case PresetTag::SpacingSweepRedTwotone:
            plan.sideband = Sideband::Red;
            plan.axis = "delta_hz";
            // 8 g0^2 nbar0 = 99 gamma kappa: deep strong-damping regime.
            plan.nbar0_fixed = 49.5 * n0_star;
            break;
        case PresetTag::Custom:
            plan.sideband = Sideband::Red;
            plan.axis = "nbar0";
            break;
    }

    if (grid) {
        plan.grid = grid_values(*grid);
    } else {
        GridSpec g;
        switch (preset) {
            case PresetTag::PowerSweepBlueNoise:
                if (!std::isfinite(n0_star))
                    throw std::invalid_argument("power preset needs --grid when g0 = 0");
                g = {0.05 * n0_star, 3.0 * n0_star, 13, true};
                break;
            case PresetTag::BandwidthSweepBlueNoise:
                g = {gamma_hz / 5.0, kappa_hz / 2.0, 11, true};
                break;
            case PresetTag::SpacingSweepBlueTwotone:
            case PresetTag::SpacingSweepRedTwotone:
                g = {gamma_hz / 10.0, 1000.0 * gamma_hz, 13, true};
                break;
            case PresetTag::Custom:
                throw std::invalid_argument("custom preset requires --grid");
        }
        plan.grid = grid_values(g);
    }

    plan.engines = engines.empty()
                       ? (preset == PresetTag::Custom
                              ? std::vector<Engine>{Engine::Analytic}
                              : std::vector<Engine>{Engine::Analytic, Engine::Quasistatic})
                       : engines;

    const std::uint64_t base = seed.value_or(kDefaultSeed);
    if (preset == PresetTag::PowerSweepBlueNoise) {
        // 20 repetitions; threshold jitter between them is the point.
        for (std::uint64_t r = 0; r < 20; ++r)
            plan.seeds.push_back(derive_stream_seed(base, 90000 + r));
    } else {
        plan.seeds = {base};
    }
    return plan;
}

SweepOutcome run_sweep(const SweepPlan& plan) {
    const auto t0 = std::chrono::steady_clock::now();
    if (plan.engines.empty()) throw std::invalid_argument("empty engines list");
    if (plan.grid.empty()) throw std::invalid_argument("empty grid");
    for (std::size_t i = 1; i < plan.grid.size(); ++i)
        if (!(plan.grid[i] > plan.grid[i - 1]))
            throw std::invalid_argument("grid must be strictly monotone");
    if (plan.seeds.empty()) throw std::invalid_argument("no seeds");

    const ConfigReport rep = params_from_values(plan.param_values);
    if (!rep.ok()) {
        std::string msg = "invalid device parameters in plan:";
        for (const auto& e : rep.errors) msg += "\n  - " + e;
        throw std::invalid_argument(msg);
    }
    const PhysParams p = *rep.params;

    const std::size_t n_branches =
        plan.sigma_hz_branches.empty() ? 1 : plan.sigma_hz_branches.size();
    std::vector<Task> tasks;
    for (std::size_t i = 0; i < plan.grid.size(); ++i)
        for (std::size_t s = 0; s < n_branches; ++s)
            for (const Engine e : plan.engines)
                for (std::size_t r = 0; r < plan.seeds.size(); ++r)
                    tasks.push_back({i, s, e, r});

    std::vector<TaskResult> results(tasks.size());
    std::atomic<std::size_t> cursor{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t idx = cursor.fetch_add(1);
            if (idx >= tasks.size()) return;
            const Task& t = tasks[idx];
            const std::uint64_t engine_idx = static_cast<std::uint64_t>(t.engine);
            const std::uint64_t stream =
                (t.point * n_branches + t.branch) * 4 + engine_idx;
            const std::uint64_t task_seed = derive_stream_seed(plan.seeds[t.seed_index], stream);
            try {
                const double branch_hz =
                    plan.sigma_hz_branches.empty() ? 0.0 : plan.sigma_hz_branches[t.branch];
                const PointDrive d = resolve_point(p, plan, plan.grid[t.point], branch_hz);
                switch (t.engine) {
                    case Engine::Analytic: results[idx] = analytic_task(p, plan, d); break;
                    case Engine::Quasistatic:
                        results[idx] = quasistatic_task(p, plan, d, task_seed);
                        break;
                    case Engine::Langevin:
                        results[idx] = langevin_task(p, plan, d, task_seed);
                        break;
                }
            } catch (const std::exception& e) {
                results[idx].status = std::string("failed: ") + e.what();
            }
        }
    };
    {
        std::vector<std::thread> pool;
        const std::size_t n_threads = std::min(plan.jobs, tasks.size());
        pool.reserve(n_threads);
        for (std::size_t j = 0; j < n_threads; ++j) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    std::filesystem::create_directories(plan.out_dir);
    const std::string csv_path = (std::filesystem::path(plan.out_dir) / plan.csv_name).string();
    std::ofstream csv(csv_path, std::ios::binary);  // binary: byte-stable newlines
    if (!csv) throw std::invalid_argument("cannot write to output directory " + plan.out_dir);

    csv << "preset,engine,sideband,axis,axis_value,sigma_hz,delta_hz,nbar0,flux_F0,"
           "gamma_opt_over_gamma,n_m,n_m_stderr,unstable_fraction,status,seed\n";
    SweepOutcome outcome;
    char buf[512];
    for (std::size_t idx = 0; idx < tasks.size(); ++idx) {
        const Task& t = tasks[idx];
        const TaskResult& r = results[idx];
        const double branch_hz =
            plan.sigma_hz_branches.empty() ? 0.0 : plan.sigma_hz_branches[t.branch];
        double sigma_hz = std::nan(""), delta_hz = std::nan("");
        double nbar0 = std::nan(""), flux = std::nan(""), gog = std::nan("");
        try {
            const PointDrive d = resolve_point(p, plan, plan.grid[t.point], branch_hz);
            nbar0 = d.nbar0;
            flux = d.flux_F0;
            gog = gamma_opt_bar(p, d.nbar0) / p.gamma();
            if (d.spec.is_box_noise()) sigma_hz = rad_to_hz(d.sigma);
            if (d.spec.is_two_tone()) delta_hz = rad_to_hz(d.delta);
        } catch (const std::exception&) {
            // row keeps nan markers; status already carries the failure
        }
        std::snprintf(buf, sizeof buf,
                      "%s,%s,%s,%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%s,%llu\n",
                      to_string(plan.preset).c_str(), to_string(t.engine).c_str(),
                      to_string(plan.sideband).c_str(), plan.axis.c_str(), plan.grid[t.point],
                      sigma_hz, delta_hz, nbar0, flux, gog, r.n_m, r.std_error, r.unstable,
                      sanitize(r.status).c_str(), static_cast<unsigned long long>(
                          plan.seeds[t.seed_index]));
        csv << buf;
        if (r.status == "ok")
            ++outcome.n_ok;
        else
            ++outcome.n_failed;
    }
    csv.close();

    outcome.wall_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const std::string manifest_path =
        (std::filesystem::path(plan.out_dir) / plan.manifest_name).string();
    std::ofstream mf(manifest_path, std::ios::binary);
    if (!mf) throw std::invalid_argument("cannot write manifest in " + plan.out_dir);
    mf << plan_to_json(plan, outcome.wall_s) << "\n";
    outcome.csv_path = csv_path;
    outcome.manifest_path = manifest_path;
    return outcome;
}

std::string plan_to_json(const SweepPlan& plan, double wall_s) {
    json j;
    j["tool"] = "omnoise";
    j["version"] = kToolVersion;
    j["preset"] = to_string(plan.preset);
    j["sideband"] = to_string(plan.sideband);
    j["axis"] = plan.axis;
    j["grid"] = plan.grid;
    j["sigma_hz_branches"] = plan.sigma_hz_branches;
    j["flux_F0"] = plan.flux_F0;
    j["nbar0_fixed"] = plan.nbar0_fixed;
    std::vector<std::string> engines;
    for (const Engine e : plan.engines) engines.push_back(to_string(e));
    j["engines"] = engines;
    j["seeds"] = plan.seeds;
    j["samples"] = plan.samples;
    j["duration"] = plan.duration;
    j["dt"] = plan.dt;
    j["jobs"] = plan.jobs;
    j["params"] = plan.param_values;
    j["csv"] = plan.csv_name;
    j["wall_time_s"] = wall_s;
    return j.dump(2);
}

SweepPlan plan_from_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open manifest " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("manifest parse error: ") + e.what());
    }
    SweepPlan plan;
    try {
        plan.preset = preset_from_string(j.at("preset").get<std::string>());
        plan.sideband = sideband_from_string(j.at("sideband").get<std::string>());
        plan.axis = j.at("axis").get<std::string>();
        plan.grid = j.at("grid").get<std::vector<double>>();
        plan.sigma_hz_branches = j.at("sigma_hz_branches").get<std::vector<double>>();
        plan.flux_F0 = j.at("flux_F0").get<double>();
        plan.nbar0_fixed = j.at("nbar0_fixed").get<double>();
        for (const auto& name : j.at("engines").get<std::vector<std::string>>())
            plan.engines.push_back(engine_from_string(name));
        plan.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        plan.samples = j.at("samples").get<std::size_t>();
        plan.duration = j.at("duration").get<double>();
        plan.dt = j.at("dt").get<double>();
        plan.jobs = j.at("jobs").get<std::size_t>();
        plan.param_values = j.at("params").get<std::map<std::string, double>>();
        plan.csv_name = j.at("csv").get<std::string>();
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("manifest field error: ") + e.what());
    }
    return plan;
}

}  // namespace omnoise
