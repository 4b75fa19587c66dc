#include "omnoise/quasistatic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "omnoise/rng.hpp"

namespace omnoise {

namespace {

// Occupancy of one envelope sample under the capping rule.
inline double capped_occupancy(double n_th, double n_max, double q, double r2, bool& unstable) {
    const double d = 1.0 + q * r2;
    if (d <= 0.0) {
        unstable = true;
        return n_max;
    }
    unstable = false;
    return std::min(n_th / d, n_max);
}

struct RunningStats {
    double mean = 0.0;
    double m2 = 0.0;
    std::size_t n = 0;

    void add(double x) {
        ++n;
        const double delta = x - mean;
        mean += delta / static_cast<double>(n);
        m2 += delta * (x - mean);
    }
    double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
    double stderr_mean() const {
        return n > 1 ? std::sqrt(variance() / static_cast<double>(n)) : 0.0;
    }
};

}  // namespace

MCResult quasistatic_mc(const PhysParams& p, double q, double flux_F0, std::size_t n_samples,
                        std::uint64_t seed) {
    if (n_samples < 1000) throw std::invalid_argument("quasistatic_mc requires n_samples >= 1000");
    if (!std::isfinite(flux_F0) || flux_F0 <= 0.0)
        throw std::invalid_argument("quasistatic_mc requires flux_F0 > 0");

    Xoshiro256pp rng(seed);
    RunningStats stats;
    std::size_t unstable_count = 0;
    for (std::size_t i = 0; i < n_samples; ++i) {
        const double r = sample_rayleigh_amplitude(flux_F0, rng.uniform());
        bool unstable = false;
        stats.add(capped_occupancy(p.n_th(), p.n_max(), q, r * r, unstable));
        if (unstable) ++unstable_count;
    }

    MCResult out;
    out.mean_n_m = stats.mean;
    out.std_error = stats.stderr_mean();
    out.n_samples = n_samples;
    out.seed = seed;
    out.unstable_fraction = static_cast<double>(unstable_count) / static_cast<double>(n_samples);
    out.unstable_fraction_stderr =
        std::sqrt(static_cast<double>(unstable_count)) / static_cast<double>(n_samples);
    return out;
}

MCResult quasistatic_timeavg(const PhysParams& p, double q, const Envelope& env, double skip) {
    if (env.samples.empty()) throw std::invalid_argument("quasistatic_timeavg: empty envelope");
    if (skip < 0.0) throw std::invalid_argument("skip must be >= 0");
    const auto first = static_cast<std::size_t>(std::ceil(skip / env.dt));
    if (first >= env.samples.size())
        throw std::invalid_argument("skip discards the entire envelope");

    const std::size_t n = env.samples.size() - first;
    std::vector<double> occ(n);
    std::size_t unstable_count = 0;
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        bool unstable = false;
        occ[j] = capped_occupancy(p.n_th(), p.n_max(), q, std::norm(env.samples[first + j]),
                                  unstable);
        sum += occ[j];
        if (unstable) ++unstable_count;
    }

    MCResult out;
    out.mean_n_m = sum / static_cast<double>(n);
    out.n_samples = n;
    out.seed = env.seed;
    out.unstable_fraction = static_cast<double>(unstable_count) / static_cast<double>(n);
    out.unstable_fraction_stderr =
        std::sqrt(static_cast<double>(unstable_count)) / static_cast<double>(n);

    // Block means absorb the envelope autocorrelation (block length well
    // above 1/sigma whenever duration*sigma >> K).
    const std::size_t n_blocks = std::min<std::size_t>(64, n);
    if (n_blocks >= 2) {
        const std::size_t block = n / n_blocks;
        RunningStats blocks;
        for (std::size_t b = 0; b < n_blocks; ++b) {
            double bsum = 0.0;
            for (std::size_t j = b * block; j < (b + 1) * block; ++j) bsum += occ[j];
            blocks.add(bsum / static_cast<double>(block));
        }
        out.std_error = blocks.stderr_mean();
    }
    return out;
}

std::vector<ThresholdScanPoint> finite_statistics_threshold_scan(
    const PhysParams& p, Sideband sb, const std::vector<double>& flux_grid, double sigma,
    double observation_time, std::size_t n_realizations, std::uint64_t seed) {
    if (flux_grid.empty()) throw std::invalid_argument("flux grid is empty");
    if (n_realizations == 0) throw std::invalid_argument("n_realizations must be >= 1");

    const double q = q_parameter(p, sb);
    const double dt = 0.1 / sigma;
    std::vector<ThresholdScanPoint> out;
    out.reserve(flux_grid.size());

    for (std::size_t i = 0; i < flux_grid.size(); ++i) {
        const double flux = flux_grid[i];
        std::vector<double> means;
        means.reserve(n_realizations);
        RunningStats pooled;
        double unstable_sum = 0.0;
        for (std::size_t jr = 0; jr < n_realizations; ++jr) {
            const std::uint64_t sub = derive_stream_seed(seed, i * n_realizations + jr);
            const auto env = box_noise_envelope(DriveSpec::box_noise(sigma, flux, sb, p.omega_m()),
                                                observation_time, dt, sub);
            const MCResult r = quasistatic_timeavg(p, q, env, 0.0);
            means.push_back(r.mean_n_m);
            pooled.add(r.mean_n_m);
            unstable_sum += r.unstable_fraction;
        }

        ThresholdScanPoint pt;
        pt.flux_F0 = flux;
        pt.nbar0 = nbar0_from_flux(p, flux);
        pt.gamma_opt_over_gamma = gamma_opt_bar(p, pt.nbar0) / p.gamma();
        pt.mean_n_m = pooled.mean;
        pt.std_error = pooled.stderr_mean();
        pt.unstable_fraction = unstable_sum / static_cast<double>(n_realizations);
        pt.q05 = quantile(means, 0.05);
        pt.q50 = quantile(means, 0.50);
        pt.q95 = quantile(means, 0.95);
        pt.seed = seed;
        out.push_back(pt);
    }
    return out;
}

double quantile(std::vector<double> values, double prob) {
    if (values.empty()) throw std::invalid_argument("quantile of empty set");
    if (!(prob >= 0.0 && prob <= 1.0)) throw std::invalid_argument("prob must be in [0,1]");
    std::sort(values.begin(), values.end());
    const double pos = prob * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= values.size()) return values.back();
    const double frac = pos - static_cast<double>(lo);
    return values[lo] * (1.0 - frac) + values[lo + 1] * frac;
}

ThresholdScanPoint scan_point_from_mc(const PhysParams& p, double flux_F0, const MCResult& mc) {
    ThresholdScanPoint pt;
    pt.flux_F0 = flux_F0;
    pt.nbar0 = nbar0_from_flux(p, flux_F0);
    pt.gamma_opt_over_gamma = gamma_opt_bar(p, pt.nbar0) / p.gamma();
    pt.mean_n_m = mc.mean_n_m;
    pt.std_error = mc.std_error;
    pt.unstable_fraction = mc.unstable_fraction;
    pt.q05 = pt.q50 = pt.q95 = mc.mean_n_m;
    pt.seed = mc.seed;
    return pt;
}

void write_quasistatic_csv(std::ostream& os, const std::vector<ThresholdScanPoint>& rows) {
    os << "F0,nbar0,gamma_opt_over_gamma,mean_n_m,stderr,unstable_fraction,q05,q50,q95,seed\n";
    char buf[360];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf,
                      "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%llu\n", r.flux_F0,
                      r.nbar0, r.gamma_opt_over_gamma, r.mean_n_m, r.std_error, r.unstable_fraction,
                      r.q05, r.q50, r.q95, static_cast<unsigned long long>(r.seed));
        os << buf;
    }
}

}  // namespace omnoise
