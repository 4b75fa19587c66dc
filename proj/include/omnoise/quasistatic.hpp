#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "omnoise/envelope.hpp"
#include "omnoise/params.hpp"

namespace omnoise {

struct MCResult {
    double mean_n_m = 0.0;
    double std_error = 0.0;                 // standard error of the mean
    double unstable_fraction = 0.0;
    double unstable_fraction_stderr = 0.0;  // Poisson error on the count; the
                                            // blue-side mean is dominated by
                                            // these rare events
    std::size_t n_samples = 0;
    std::uint64_t seed = 0;
};

// Monte-Carlo evaluation of the adiabatic occupancy: draws Rayleigh
// amplitudes, averages n_th / (1 + q r^2), substituting n_max whenever
// 1 + q r^2 <= 0 (unstable event). Stable-side values are clipped at n_max
// as well, so the reported mean never exceeds n_th + n_max.
MCResult quasistatic_mc(const PhysParams& p, double q, double flux_F0, std::size_t n_samples,
                        std::uint64_t seed);

// Same capping rule applied as a time average over one concrete waveform;
// skip discards the first `skip` seconds. The error bar comes from block
// means, so envelope autocorrelation does not fake precision.
MCResult quasistatic_timeavg(const PhysParams& p, double q, const Envelope& env, double skip);

// Observed-occupancy distribution over finite observation windows: for each
// flux, n_realizations independent box-noise envelopes of length
// observation_time are averaged, quantifying the realization-to-realization
// jitter at the self-oscillation threshold.
struct ThresholdScanPoint {
    double flux_F0 = 0.0;
    double nbar0 = 0.0;
    double gamma_opt_over_gamma = 0.0;
    double mean_n_m = 0.0;   // pooled over realizations
    double std_error = 0.0;  // spread of realization means / sqrt(R)
    double unstable_fraction = 0.0;
    double q05 = 0.0, q50 = 0.0, q95 = 0.0;  // quantiles of realization means
    std::uint64_t seed = 0;
};

std::vector<ThresholdScanPoint> finite_statistics_threshold_scan(
    const PhysParams& p, Sideband sb, const std::vector<double>& flux_grid, double sigma,
    double observation_time, std::size_t n_realizations, std::uint64_t seed);

// Linear-interpolated order statistic of a copy of `values`.
double quantile(std::vector<double> values, double prob);

// CSV emission, fixed column order:
// F0,nbar0,gamma_opt_over_gamma,mean_n_m,stderr,unstable_fraction,q05,q50,q95,seed
void write_quasistatic_csv(std::ostream& os, const std::vector<ThresholdScanPoint>& rows);

ThresholdScanPoint scan_point_from_mc(const PhysParams& p, double flux_F0, const MCResult& mc);

}  // namespace omnoise
