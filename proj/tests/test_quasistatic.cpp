#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "omnoise/analytic.hpp"
#include "omnoise/envelope.hpp"
#include "omnoise/quasistatic.hpp"
#include "omnoise/units.hpp"
#include "oracles.hpp"

using namespace omnoise;

namespace {

PhysParams paper_device(double n_th = 12.1) {
    return PhysParams(hz_to_rad(9.22e6), hz_to_rad(120.0), hz_to_rad(1.06e6), hz_to_rad(39.0),
                      n_th, std::nullopt, 1e10);
}

}  // namespace

TEST_SUITE("quasistatic") {

TEST_CASE("Monte-Carlo mean tracks the closed form on the red side") {
    const auto p = paper_device();
    const double q = q_parameter(p, Sideband::Red);
    for (double c : {0.1, 1.0, 10.0, 100.0}) {
        const auto mc = quasistatic_mc(p, q, c / q, 100000, 4242);
        const double exact = quasistatic_occupancy_closed_form(p, q, c / q);
        INFO("q F0 = ", c);
        CHECK(std::abs(mc.mean_n_m - exact) < 3.0 * mc.std_error);
        CHECK(mc.std_error < 0.01 * p.n_th());  // 1e5 draws resolve the mean to ~1%
        CHECK(mc.unstable_fraction == 0.0);     // red side never destabilizes
    }
}

TEST_CASE("blue-side unstable fraction reproduces exp(-gamma/gamma_opt)") {
    const auto p = paper_device();
    const double q = q_parameter(p, Sideband::Blue);
    const double F0_star = -1.0 / q;  // |q| F0 = 1, i.e. gamma_opt = gamma

    const auto mc = quasistatic_mc(p, q, F0_star, 1000000, 777);
    CHECK(std::abs(mc.unstable_fraction - std::exp(-1.0)) < 0.002);
    CHECK(mc.unstable_fraction_stderr < 7e-4);  // sqrt(count)/n at P = 1/e, n = 1e6

    // And across a small ratio sweep, within 4 binomial standard deviations.
    for (double ratio : {0.5, 1.0, 2.0}) {
        const double F0 = ratio * F0_star;
        const auto r = quasistatic_mc(p, q, F0, 1000000, 1000 + static_cast<int>(10 * ratio));
        const double predicted = unstable_probability(p, F0);
        const double sd = std::sqrt(predicted * (1.0 - predicted) / 1e6);
        INFO("gamma_opt/gamma = ", ratio);
        CHECK(std::abs(r.unstable_fraction - predicted) < 4.0 * sd);
        // The capped mean is dominated by the unstable events.
        CHECK(r.mean_n_m == doctest::Approx(predicted * p.n_max()).epsilon(0.02));
    }
}

TEST_CASE("weak flux recovers the thermal state") {
    const auto p = paper_device();
    const double q = q_parameter(p, Sideband::Red);
    const auto mc = quasistatic_mc(p, q, 1e-9 / q, 10000, 3);
    CHECK(mc.mean_n_m == doctest::Approx(p.n_th()).epsilon(1e-6));
    CHECK(mc.unstable_fraction == 0.0);

    // Exactly zero flux has no Rayleigh ensemble to draw from.
    CHECK_THROWS_AS(quasistatic_mc(p, q, 0.0, 10000, 3), std::invalid_argument);
}

TEST_CASE("Monte-Carlo is capped, bounded, and reproducible") {
    const auto p = paper_device();
    const double q = q_parameter(p, Sideband::Blue);
    const auto a = quasistatic_mc(p, q, -5.0 / q, 20000, 11);
    const auto b = quasistatic_mc(p, q, -5.0 / q, 20000, 11);
    CHECK(a.mean_n_m == b.mean_n_m);  // bit-identical rerun
    CHECK(a.unstable_fraction == b.unstable_fraction);
    CHECK(a.mean_n_m <= p.n_th() + p.n_max());
    CHECK(a.unstable_fraction >= 0.0);
    CHECK(a.unstable_fraction <= 1.0);
    CHECK(a.seed == 11);
    CHECK(a.n_samples == 20000);

    CHECK(quasistatic_mc(p, q, -5.0 / q, 20000, 12).mean_n_m != a.mean_n_m);
    CHECK_THROWS_AS(quasistatic_mc(p, q, -5.0 / q, 100, 11), std::invalid_argument);
}

TEST_CASE("blue-side mean rises with flux") {
    const auto p = paper_device();
    const double q = q_parameter(p, Sideband::Blue);
    double prev = 0.0;
    for (double c : {0.2, 0.6, 1.8}) {
        double pooled = 0.0;
        for (std::uint64_t s = 0; s < 5; ++s)
            pooled += quasistatic_mc(p, q, -c / q, 100000, 900 + s).mean_n_m;
        CHECK(pooled > prev);
        prev = pooled;
    }
}

TEST_CASE("time average of a constant envelope is exact") {
    const auto p = paper_device();
    const double q = q_parameter(p, Sideband::Red);
    const auto spec = DriveSpec::coherent(1e4, Sideband::Red);
    const auto env = coherent_envelope(spec, p, 1.0, 1e-3);

    const auto res = quasistatic_timeavg(p, q, env, 0.0);
    const double r2 = env.mean_power();
    CHECK(res.mean_n_m == doctest::Approx(p.n_th() / (1.0 + q * r2)).epsilon(1e-12));
    CHECK(res.std_error == 0.0);
    CHECK(res.unstable_fraction == 0.0);
}

TEST_CASE("time average over a two-tone envelope hits the period formula") {
    const auto p = paper_device();
    const double q = q_parameter(p, Sideband::Red);
    // 4 q alpha^2 = 3 gives <n> = n_th / 2.
    const double alpha = std::sqrt(3.0 / (4.0 * q));
    const double delta = hz_to_rad(10.0);
    const auto spec = DriveSpec::two_tone(delta, alpha, Sideband::Red);
    const double period = two_pi / (0.5 * delta);
    const auto env = two_tone_envelope(spec, 64.0 * period, period / 256.0);

    const auto res = quasistatic_timeavg(p, q, env, 0.0);
    CHECK(res.mean_n_m == doctest::Approx(0.5 * p.n_th()).epsilon(1e-9));
}

TEST_CASE("time average over box noise agrees with the ensemble Monte-Carlo") {
    const auto p = paper_device();
    const double q = q_parameter(p, Sideband::Red);
    const double sigma = hz_to_rad(400.0);
    const double F0 = 1.0 / q;
    const auto spec = DriveSpec::box_noise(sigma, F0, Sideband::Red, p.omega_m());
    const auto env = box_noise_envelope(spec, 200.0, two_pi / (64.0 * sigma), 2024);

    const auto ta = quasistatic_timeavg(p, q, env, 0.0);
    const auto mc = quasistatic_mc(p, q, F0, 200000, 2025);
    const double combined = std::hypot(ta.std_error, mc.std_error);
    CHECK(std::abs(ta.mean_n_m - mc.mean_n_m) < 3.0 * combined);
    CHECK(ta.std_error > 0.0);

    // Skipping half the record halves the sample count.
    const auto half = quasistatic_timeavg(p, q, env, 100.0);
    CHECK(half.n_samples * 2 == ta.n_samples);
}

TEST_CASE("quantile helper interpolates order statistics") {
    std::vector<double> v{4.0, 1.0, 3.0, 2.0};
    CHECK(quantile(v, 0.0) == 1.0);
    CHECK(quantile(v, 1.0) == 4.0);
    CHECK(quantile(v, 0.5) == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(quantile({7.0}, 0.95) == 7.0);
    CHECK_THROWS_AS(quantile({}, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(quantile(v, 1.5), std::invalid_argument);
}

TEST_CASE("threshold scan quantifies finite-observation jitter") {
    const auto p = paper_device();
    const double q_blue = q_parameter(p, Sideband::Blue);
    const double F0_star = -1.0 / q_blue;
    const double sigma = hz_to_rad(400.0);

    // Far below threshold every realization sits near n_th.
    const auto low = finite_statistics_threshold_scan(p, Sideband::Blue, {0.04 * F0_star}, sigma,
                                                      1e4 / sigma * two_pi, 16, 51);
    REQUIRE(low.size() == 1);
    CHECK(low[0].q95 < 2.0 * p.n_th());
    CHECK(low[0].q05 > 0.0);
    CHECK(low[0].gamma_opt_over_gamma == doctest::Approx(0.04).epsilon(1e-9));

    // At threshold the observed mean is dominated by capped excursions:
    // roughly unstable_fraction * n_max, with visible spread.
    const auto at = finite_statistics_threshold_scan(p, Sideband::Blue, {F0_star}, sigma,
                                                     1e4 / sigma * two_pi, 16, 52);
    REQUIRE(at.size() == 1);
    CHECK(at[0].q50 > 0.25 * std::exp(-1.0) * p.n_max());
    CHECK(at[0].q50 < 4.0 * std::exp(-1.0) * p.n_max());
    CHECK(at[0].q95 > at[0].q05);
    CHECK(at[0].unstable_fraction > 0.2);
    CHECK(at[0].unstable_fraction < 0.55);

    // A single realization has no spread: all quantiles coincide.
    const auto one = finite_statistics_threshold_scan(p, Sideband::Blue, {0.5 * F0_star}, sigma,
                                                      1e3 / sigma * two_pi, 1, 53);
    CHECK(one[0].q05 == one[0].q50);
    CHECK(one[0].q50 == one[0].q95);
    CHECK(one[0].std_error == 0.0);
}

TEST_CASE("threshold-scan CSV preserves the column contract") {
    ThresholdScanPoint pt;
    pt.flux_F0 = 1.5e12;
    pt.nbar0 = 2500.0;
    pt.gamma_opt_over_gamma = 0.125;
    pt.mean_n_m = 42.0;
    pt.std_error = 1.25;
    pt.unstable_fraction = 0.0;
    pt.q05 = 40.0;
    pt.q50 = 42.0;
    pt.q95 = 44.0;
    pt.seed = 9;

    std::ostringstream os;
    write_quasistatic_csv(os, {pt});
    const std::string out = os.str();
    CHECK(out.find("F0,nbar0,gamma_opt_over_gamma,mean_n_m,stderr,unstable_fraction,"
                   "q05,q50,q95,seed\n") == 0);
    CHECK(out.find("1500000000000,2500,0.125,42,1.25,0,40,42,44,9\n") != std::string::npos);
}

}  // TEST_SUITE("quasistatic")
