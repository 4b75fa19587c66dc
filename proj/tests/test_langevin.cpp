#include <cmath>
#include <complex>
#include <filesystem>
#include <stdexcept>

#include "doctest.h"
#include "omnoise/analytic.hpp"
#include "omnoise/envelope.hpp"
#include "omnoise/langevin.hpp"
#include "omnoise/spectral.hpp"
#include "omnoise/units.hpp"

using namespace omnoise;

namespace {

// Scaled device: kappa = 1 sets the clock, omega_m = 10 keeps the sideband
// resolved, gamma = 1e-2 makes mechanical relaxation cheap to average over.
// Threshold photon number n0* = gamma kappa / 4 g0^2 = 1.
PhysParams scaled_device(double n_th = 10.0, double gamma = 1e-2, double n_max = 1e4) {
    return PhysParams(10.0, gamma, 1.0, 0.05, n_th, std::nullopt, n_max);
}

SimConfig cfg_for(double duration, double skip, std::uint64_t seed) {
    SimConfig cfg;
    cfg.dt = 0.018;  // dt*kappa = 0.018, dt*omega_m = 0.18
    cfg.duration = duration;
    cfg.transient_skip = skip;
    cfg.seed = seed;
    return cfg;
}

// Welch + Lorentzian fit of the mechanical sideband linewidth, in rad/s.
double fitted_rate(const SimTrace& trace, double skip, std::size_t segment) {
    const auto first = static_cast<std::size_t>(skip / trace.dt);
    std::vector<std::complex<double>> tail(trace.b.begin() + first, trace.b.end());
    const auto psd = welch_psd(tail, trace.dt, segment, 0.5);
    const auto fit = lorentzian_fit(psd);
    REQUIRE(fit.converged);
    return hz_to_rad(fit.fwhm);
}

}  // namespace

TEST_SUITE("langevin") {

TEST_CASE("undriven mechanics thermalize to n_th") {
    const auto p = scaled_device();
    const auto spec = DriveSpec::coherent(0.0, Sideband::Red);
    const auto trace = integrate(p, spec, cfg_for(30000.0, 0.0, 101));
    const auto stats = occupancy_from_trace(trace, 3000.0);

    CHECK(std::abs(stats.mean - p.n_th()) < 3.0 * stats.std_error);
    // The autocorrelation-inflated block error bar is deliberately
    // conservative; ~300 correlation times still pins the mean to ~10%.
    CHECK(stats.std_error < 0.15 * p.n_th());
    CHECK(stats.n_eff > 100.0);
    CHECK(stats.warning.empty());
}

TEST_CASE("occupancy scales linearly with the bath temperature") {
    const auto cold = occupancy_from_trace(
        integrate(scaled_device(4.0), DriveSpec::coherent(0.0, Sideband::Red),
                  cfg_for(15000.0, 0.0, 55)),
        1500.0);
    const auto hot = occupancy_from_trace(
        integrate(scaled_device(16.0), DriveSpec::coherent(0.0, Sideband::Red),
                  cfg_for(15000.0, 0.0, 56)),
        1500.0);
    const double ratio_err =
        4.0 * std::hypot(cold.std_error / cold.mean, hot.std_error / hot.mean);
    CHECK(hot.mean / cold.mean == doctest::Approx(4.0).epsilon(ratio_err));
}

TEST_CASE("resonant red drive cools and broadens per dynamical backaction") {
    const auto p = scaled_device();
    // n0 = n0*: gamma_opt = gamma, so n_m -> n_th/2 and the line doubles.
    const auto spec = DriveSpec::coherent(1.0, Sideband::Red);
    const auto trace = integrate(p, spec, cfg_for(60000.0, 0.0, 202));

    const auto stats = occupancy_from_trace(trace, 6000.0);
    CHECK(stats.mean == doctest::Approx(0.5 * p.n_th()).epsilon(0.15));

    const double rate = fitted_rate(trace, 6000.0, 1 << 16);
    CHECK(rate == doctest::Approx(2.0 * p.gamma()).epsilon(0.15));
}

TEST_CASE("red and blue linewidth shifts are symmetric at matched photon number") {
    const auto p = scaled_device();
    const double n0 = 0.4;  // gamma_opt = 0.4 gamma either way
    const auto red = integrate(p, DriveSpec::coherent(n0, Sideband::Red),
                               cfg_for(60000.0, 0.0, 303));
    const auto blue = integrate(p, DriveSpec::coherent(n0, Sideband::Blue),
                                cfg_for(60000.0, 0.0, 304));

    const double rate_red = fitted_rate(red, 6000.0, 1 << 16);
    const double rate_blue = fitted_rate(blue, 6000.0, 1 << 17);
    const double widen = rate_red - p.gamma();
    const double narrow = p.gamma() - rate_blue;
    CHECK(widen > 0.0);
    CHECK(narrow > 0.0);
    CHECK(widen == doctest::Approx(narrow).epsilon(0.15));
}

TEST_CASE("blue drive above threshold saturates at the nonlinear-damping level") {
    const auto p = scaled_device();
    // gamma(1 + n/n_max) = gamma_opt fixes n = (1.2 - 1) n_max.
    auto cfg = cfg_for(20000.0, 10000.0, 404);
    cfg.saturation = SimConfig::Saturation::NonlinearDamping;
    const auto trace = integrate(p, DriveSpec::coherent(1.2, Sideband::Blue), cfg);
    const auto stats = occupancy_from_trace(trace, cfg.transient_skip);

    CHECK(stats.mean > 0.1 * p.n_max());
    CHECK(stats.mean < 0.4 * p.n_max());
}

TEST_CASE("above threshold without saturation the integrator reports divergence") {
    const auto p = scaled_device();
    const auto spec = DriveSpec::coherent(3.0, Sideband::Blue);
    auto cfg = cfg_for(20000.0, 0.0, 505);
    CHECK_THROWS_AS(integrate(p, spec, cfg), divergence_error);
    try {
        integrate(p, spec, cfg);
    } catch (const divergence_error& e) {
        CHECK(e.time() > 0.0);
        CHECK(e.time() < cfg.duration);
        CHECK(std::string(e.what()).find("diverged") != std::string::npos);
    }
}

TEST_CASE("stable runs stay finite over a thousand mechanical lifetimes") {
    const auto p = scaled_device();
    const auto trace = integrate(p, DriveSpec::coherent(1.0, Sideband::Red),
                                 cfg_for(1000.0 / p.gamma(), 0.0, 606));
    bool all_finite = true;
    for (const auto& b : trace.b) all_finite = all_finite && std::isfinite(std::norm(b));
    CHECK(all_finite);
    const auto stats = occupancy_from_trace(trace, 0.1 * trace.duration());
    CHECK(stats.mean < 100.0 * p.n_th());
}

TEST_CASE("halving the step leaves the occupancy within error bars") {
    const auto p = scaled_device();
    const auto spec = DriveSpec::coherent(1.0, Sideband::Red);
    auto coarse_cfg = cfg_for(30000.0, 3000.0, 707);
    auto fine_cfg = coarse_cfg;
    fine_cfg.dt = 0.009;

    const auto coarse = occupancy_from_trace(integrate(p, spec, coarse_cfg), 3000.0);
    const auto fine = occupancy_from_trace(integrate(p, spec, fine_cfg), 3000.0);
    CHECK(std::abs(coarse.mean - fine.mean) <
          3.0 * std::hypot(coarse.std_error, fine.std_error));
}

TEST_CASE("trace statistics degenerate correctly") {
    SimTrace trace;
    trace.dt = 0.5;
    trace.b.assign(100, {2.0, 0.0});
    trace.a.assign(100, {0.0, 0.0});
    trace.alpha.assign(100, {0.0, 0.0});

    const auto stats = occupancy_from_trace(trace, 0.0);
    CHECK(stats.mean == 4.0);
    CHECK(stats.std_error == 0.0);
    CHECK(stats.n_used == 100);
    CHECK(stats.warning.empty());

    CHECK_THROWS_AS(occupancy_from_trace(trace, 50.0), std::invalid_argument);
    CHECK_THROWS_AS(occupancy_from_trace(trace, -1.0), std::invalid_argument);
}

TEST_CASE("short averaging spans are flagged") {
    const auto p = scaled_device();
    const auto trace = integrate(p, DriveSpec::coherent(0.0, Sideband::Red),
                                 cfg_for(2000.0, 0.0, 808));
    const auto stats = occupancy_from_trace(trace, 0.0);
    // ~20 mechanical lifetimes: too short to trust the error bar.
    CHECK(stats.n_eff < 50.0);
    CHECK_FALSE(stats.warning.empty());
}

TEST_CASE("deterministic envelopes make the two integrate overloads identical") {
    const auto p = scaled_device();
    const auto spec = DriveSpec::coherent(0.5, Sideband::Red);
    const auto cfg = cfg_for(5000.0, 0.0, 909);

    const auto via_spec = integrate(p, spec, cfg);
    const auto env = coherent_envelope(spec, p, cfg.duration + 1.0, 1.0);
    const auto via_env = integrate(p, env, cfg);

    REQUIRE(via_spec.b.size() == via_env.b.size());
    CHECK(via_spec.b == via_env.b);
    CHECK(via_spec.alpha == via_env.alpha);
}

TEST_CASE("configuration limits are enforced") {
    const auto p = scaled_device();
    const auto spec = DriveSpec::coherent(0.0, Sideband::Red);

    auto cfg = cfg_for(100.0, 0.0, 1);
    cfg.dt = 0.12;  // dt*kappa > 0.1
    CHECK_THROWS_AS(integrate(p, spec, cfg), std::invalid_argument);

    cfg.dt = 0.021;  // dt*omega_m > 0.2 while dt*kappa is fine
    CHECK_THROWS_AS(integrate(p, spec, cfg), std::invalid_argument);

    cfg = cfg_for(100.0, 200.0, 1);  // skip beyond the run
    CHECK_THROWS_AS(integrate(p, spec, cfg), std::invalid_argument);

    cfg = cfg_for(0.018, 0.0, 1);  // fewer than two steps
    CHECK_THROWS_AS(integrate(p, spec, cfg), std::invalid_argument);

    // Envelope must cover the run and be no finer than the step.
    const auto env = coherent_envelope(spec, p, 10.0, 1.0);
    CHECK_THROWS_AS(integrate(p, env, cfg_for(50.0, 0.0, 1)), std::invalid_argument);
    const auto fine_env = coherent_envelope(spec, p, 100.0, 0.001);
    CHECK_THROWS_AS(integrate(p, fine_env, cfg_for(50.0, 0.0, 1)), std::invalid_argument);
}

TEST_CASE("bandwidth scan at zero flux is flat at n_th") {
    const auto p = scaled_device();
    auto cfg = cfg_for(20000.0, 2000.0, 111);
    const auto pts = bandwidth_crossover_scan(p, Sideband::Blue, 0.0, {0.002, 0.02, 0.2}, cfg);
    REQUIRE(pts.size() == 3);
    for (const auto& pt : pts) {
        INFO("sigma = ", pt.sigma);
        CHECK(std::abs(pt.mean_n_m - p.n_th()) < 4.0 * pt.std_error);
        CHECK(pt.std_error > 0.0);
        CHECK(pt.std_error < p.n_th());
    }
    CHECK(pts[0].seed != pts[1].seed);  // independent substreams per point
}

TEST_CASE("traces round-trip through the columnar container") {
    const auto p = scaled_device();
    const auto spec = DriveSpec::coherent(0.3, Sideband::Red);
    const auto trace = integrate(p, spec, cfg_for(500.0, 0.0, 1212));

    const auto path = std::filesystem::temp_directory_path() / "omnoise_test_trace.omnb";
    write_trace(path.string(), trace);
    const auto back = read_trace(path.string(), spec);

    CHECK(back.dt == trace.dt);
    CHECK(back.seed == trace.seed);
    CHECK(back.b == trace.b);
    CHECK(back.a == trace.a);
    CHECK(back.alpha == trace.alpha);

    CHECK_THROWS_AS(read_trace(path.string(), DriveSpec::coherent(0.4, Sideband::Red)),
                    std::runtime_error);

    write_trace(path.string(), trace, 2);
    const auto coarse = read_trace(path.string(), spec);
    CHECK(coarse.dt == doctest::Approx(2.0 * trace.dt).epsilon(1e-12));
    CHECK(coarse.b.size() == (trace.b.size() + 1) / 2);
    std::filesystem::remove(path);
}

}  // TEST_SUITE("langevin")
