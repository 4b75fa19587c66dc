#include "omnoise/langevin.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <stdexcept>

#include "omnoise/rng.hpp"
#include "omnoise/trace_io.hpp"

namespace omnoise {

namespace {

using cplx = std::complex<double>;

// phi1(z) = (e^z - 1)/z, the exponential-integrator weight. Series below
// |z| ~ 1e-3 where the direct quotient loses digits.
cplx phi1(cplx z) {
    if (std::abs(z) < 1e-3) {
        return 1.0 + z * (0.5 + z * (1.0 / 6.0 + z * (1.0 / 24.0 + z / 120.0)));
    }
    return (std::exp(z) - 1.0) / z;
}

double phi1_real(double x) {
    if (std::abs(x) < 1e-3) {
        return 1.0 + x * (0.5 + x * (1.0 / 6.0 + x * (1.0 / 24.0 + x / 120.0)));
    }
    return std::expm1(x) / x;
}

// Linear interpolation on the envelope grid; the synthesis rules guarantee
// the envelope is strongly oversampled, so this stays well below the
// statistical error of any estimate built on the trace.
class EnvelopeSampler {
public:
    explicit EnvelopeSampler(const Envelope& env) : env_(env) {}

    cplx at(double t) const {
        const auto& s = env_.samples;
        if (s.size() == 1) return s[0];
        double x = t / env_.dt;
        if (x <= 0.0) return s[0];
        auto i = static_cast<std::size_t>(x);
        if (i >= s.size() - 1) return s.back();
        const double f = x - static_cast<double>(i);
        // a + f*(b - a) interpolates constant segments exactly, so a flat
        // envelope samples identically on any grid spacing.
        return s[i] + (s[i + 1] - s[i]) * f;
    }

private:
    const Envelope& env_;
};

void validate_config(const PhysParams& p, const SimConfig& cfg) {
    if (!(cfg.dt > 0.0)) throw std::invalid_argument("SimConfig: dt must be > 0");
    if (!(cfg.duration >= 2.0 * cfg.dt))
        throw std::invalid_argument("SimConfig: duration must cover at least two steps");
    if (cfg.dt * p.kappa() > 0.1)
        throw std::invalid_argument("SimConfig: dt * kappa must be <= 0.1 (cavity unresolved)");
    if (cfg.dt * p.omega_m() > 0.2)
        throw std::invalid_argument(
            "SimConfig: dt * omega_m must be <= 0.2 (retained detuning unresolved)");
    if (cfg.transient_skip < 0.0 || cfg.transient_skip >= cfg.duration)
        throw std::invalid_argument("SimConfig: transient_skip must lie in [0, duration)");
}

[[noreturn]] void throw_divergence(double t) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "trajectory diverged at t = %.9g s (amplitude overflow)", t);
    throw divergence_error(buf, t);
}

}  // namespace

std::vector<double> SimTrace::occupancy() const {
    std::vector<double> out(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) out[i] = std::norm(b[i]);
    return out;
}

SimTrace integrate(const PhysParams& p, const Envelope& env, const SimConfig& cfg) {
    validate_config(p, cfg);
    if (env.samples.empty()) throw std::invalid_argument("integrate: empty envelope");
    if (env.samples.size() > 1 && env.dt < cfg.dt * (1.0 - 1e-12))
        throw std::invalid_argument("integrate: cfg.dt exceeds the envelope sample spacing");
    if (env.duration() + 0.5 * env.dt < cfg.duration && env.samples.size() > 1)
        throw std::invalid_argument("integrate: envelope shorter than the requested duration");

    const double dt = cfg.dt;
    const double kappa = p.kappa();
    const double gamma = p.gamma();
    const double g0 = p.g0();
    const double n_th = p.n_th();
    const Sideband sb = env.spec.sideband;
    // Pump on the lower (red) sideband puts the cavity resonance at
    // Delta_c = -omega_m in the envelope's rotating frame.
    const double delta_c = (sb == Sideband::Red) ? -p.omega_m() : p.omega_m();

    const auto n_steps = static_cast<std::size_t>(std::llround(cfg.duration / dt));
    constexpr std::size_t kMaxStored = std::size_t{1} << 20;
    std::size_t stride = cfg.store_stride;
    if (stride == 0) stride = (n_steps + kMaxStored - 1) / kMaxStored;
    if (stride == 0) stride = 1;

    // Frozen per-step propagators. The classical envelope and the cavity
    // fluctuation have linear drift, so their exponentials are exact; the
    // coupling enters through the phi1 weight (first order in g0 per step).
    const cplx z_alpha = cplx(-0.5 * kappa, delta_c) * dt;
    const cplx e_alpha = std::exp(z_alpha);
    const cplx p_alpha = dt * phi1(z_alpha) * std::sqrt(kappa);
    const double e_a = std::exp(-0.5 * kappa * dt);
    const double p_a = dt * phi1_real(-0.5 * kappa * dt);
    const double var_a = 0.5 * (-std::expm1(-kappa * dt));
    const double e_b0 = std::exp(-0.5 * gamma * dt);
    const double p_b0 = dt * phi1_real(-0.5 * gamma * dt);
    const double var_b0 = n_th * (-std::expm1(-gamma * dt));
    const bool saturate = cfg.saturation == SimConfig::Saturation::NonlinearDamping;
    const double n_max = p.n_max();

    auto rng = Xoshiro256pp::for_stream(cfg.seed, 0);
    EnvelopeSampler drive(env);

    // Draw order is fixed: b0, a0, then per step (noise_a, noise_b).
    cplx b = rng.complex_normal(n_th);
    cplx a = rng.complex_normal(0.5);
    // Classical envelope starts at its steady state for the initial drive
    // value, which removes the O(1/kappa) turn-on transient.
    cplx alpha = std::sqrt(kappa) * drive.at(0.0) / cplx(0.5 * kappa, -delta_c);

    SimTrace trace;
    trace.dt = dt * static_cast<double>(stride);
    trace.stride = stride;
    trace.seed = cfg.seed;
    trace.spec = env.spec;
    const std::size_t n_stored = n_steps / stride + 1;
    trace.b.reserve(n_stored);
    trace.a.reserve(n_stored);
    trace.alpha.reserve(n_stored);

    for (std::size_t k = 0; k < n_steps; ++k) {
        if (k % stride == 0) {
            trace.b.push_back(b);
            trace.a.push_back(a);
            trace.alpha.push_back(alpha);
        }
        const double t = static_cast<double>(k) * dt;
        const double nb = std::norm(b);
        if (!std::isfinite(nb) || nb > 1e60 || !std::isfinite(std::norm(a))) throw_divergence(t);

        cplx f_a, f_b;
        if (sb == Sideband::Red) {
            f_a = cplx(0.0, -g0) * alpha * b;
            f_b = cplx(0.0, -g0) * std::conj(alpha) * a;
        } else {
            f_a = cplx(0.0, -g0) * alpha * std::conj(b);
            f_b = cplx(0.0, -g0) * alpha * std::conj(a);
        }

        double e_b = e_b0, p_b = p_b0, var_b = var_b0;
        if (saturate) {
            // Amplitude-dependent damping gamma (1 + |b|^2 / n_max); the
            // thermal drive strength follows it so the undriven stationary
            // occupancy stays n_th / (1 + |b|^2 / n_max) pointwise.
            const double g_n = gamma * (1.0 + nb / n_max);
            e_b = std::exp(-0.5 * g_n * dt);
            p_b = dt * phi1_real(-0.5 * g_n * dt);
            var_b = n_th * (gamma / g_n) * (-std::expm1(-g_n * dt));
        }

        const cplx eta_a = rng.complex_normal(var_a);
        const cplx eta_b = rng.complex_normal(var_b);
        const cplx alpha_next = e_alpha * alpha + p_alpha * drive.at(t);

        a = e_a * a + p_a * f_a + eta_a;
        b = e_b * b + p_b * f_b + eta_b;
        alpha = alpha_next;
    }
    if (!std::isfinite(std::norm(b)) || std::norm(b) > 1e60)
        throw_divergence(static_cast<double>(n_steps) * dt);

    return trace;
}

SimTrace integrate(const PhysParams& p, const DriveSpec& spec, const SimConfig& cfg) {
    // Envelope sample spacing: coarse enough to keep memory flat on long
    // runs, fine enough (>= 60 samples per shortest envelope period) that
    // linear interpolation is exact to ~1e-3.
    double env_dt = cfg.duration / 4.0;
    if (const auto* box = std::get_if<BoxNoise>(&spec.shape)) {
        if (box->sigma > 0.0) env_dt = std::min(env_dt, 0.1 / box->sigma);
    } else if (const auto* tt = std::get_if<TwoTone>(&spec.shape)) {
        if (tt->delta > 0.0) env_dt = std::min(env_dt, 0.1 / tt->delta);
    }
    env_dt = std::max(env_dt, cfg.dt);
    const auto env = synthesize_envelope(p, spec, cfg.duration + 2.0 * env_dt, env_dt,
                                         derive_stream_seed(cfg.seed, 1));
    return integrate(p, env, cfg);
}

TraceStats occupancy_from_trace(const SimTrace& trace, double skip) {
    if (trace.b.empty()) throw std::invalid_argument("occupancy_from_trace: empty trace");
    if (skip < 0.0) throw std::invalid_argument("skip must be >= 0");
    const auto first = static_cast<std::size_t>(std::ceil(skip / trace.dt));
    if (first + 2 > trace.b.size())
        throw std::invalid_argument("occupancy_from_trace: skip leaves fewer than two samples");

    const std::size_t n = trace.b.size() - first;
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double o = std::norm(trace.b[first + j]);
        sum += o;
        sum2 += o * o;
    }
    TraceStats out;
    out.n_used = n;
    out.mean = sum / static_cast<double>(n);
    const double var = std::max(0.0, sum2 / static_cast<double>(n) - out.mean * out.mean);

    // Block means: with blocks much longer than the mechanical correlation
    // time 1/gamma_eff the block-to-block scatter carries the full
    // autocorrelation, so the error bar reflects the effective sample count
    // span * gamma_eff rather than the raw sample count.
    const std::size_t n_blocks = std::min<std::size_t>(64, n);
    const std::size_t block = n / n_blocks;
    std::vector<double> means(n_blocks);
    for (std::size_t k = 0; k < n_blocks; ++k) {
        double acc = 0.0;
        for (std::size_t j = k * block; j < (k + 1) * block; ++j)
            acc += std::norm(trace.b[first + j]);
        means[k] = acc / static_cast<double>(block);
    }
    double bsum = 0.0;
    for (double m : means) bsum += m;
    const double bmean = bsum / static_cast<double>(n_blocks);
    double bvar = 0.0;
    for (double m : means) bvar += (m - bmean) * (m - bmean);
    bvar /= static_cast<double>(n_blocks);

    // When blocks are shorter than the mechanical correlation time their
    // means are themselves correlated and the naive K-block error bar is too
    // small. The lag-1 autocorrelation of the block means measures exactly
    // that, so fold it in AR(1)-style; rho ~ 0 for well-resolved runs.
    double rho1 = 0.0;
    if (n_blocks >= 3 && bvar > 0.0) {
        double num = 0.0;
        for (std::size_t k = 1; k < n_blocks; ++k)
            num += (means[k] - bmean) * (means[k - 1] - bmean);
        rho1 = std::clamp(num / (static_cast<double>(n_blocks) * bvar), 0.0, 0.95);
    }
    const double inflation = (1.0 + rho1) / (1.0 - rho1);
    if (n_blocks >= 2)
        out.std_error = std::sqrt(bvar / static_cast<double>(n_blocks - 1) * inflation);
    out.n_eff = (out.std_error > 0.0) ? var / (out.std_error * out.std_error)
                                      : static_cast<double>(n);
    // The spec's span >= 50/gamma_eff guidance, phrased in terms of what the
    // trace itself shows: fewer than ~50 decorrelated samples.
    if (var > 0.0 && out.n_eff < 50.0)
        out.warning = "averaging span is short (fewer than 50 effective samples)";
    return out;
}

void write_trace(const std::string& path, const SimTrace& trace, std::size_t downsample) {
    ColumnarFile file;
    file.dt = trace.dt;
    file.seed = trace.seed;
    file.spec_digest = trace.spec.digest();
    file.channels = {{"b", trace.b}, {"a", trace.a}, {"alpha", trace.alpha}};
    write_columnar(path, file, downsample);
}

SimTrace read_trace(const std::string& path, const DriveSpec& spec) {
    const ColumnarFile file = read_columnar(path);
    if (file.spec_digest != spec.digest())
        throw std::runtime_error("trace file was generated under a different drive spec");
    if (file.channels.size() != 3 || file.channels[0].name != "b" ||
        file.channels[1].name != "a" || file.channels[2].name != "alpha")
        throw std::runtime_error("trace file does not hold channels b, a, alpha");
    SimTrace trace;
    trace.dt = file.dt;
    trace.seed = file.seed;
    trace.spec = spec;
    trace.b = file.channels[0].samples;
    trace.a = file.channels[1].samples;
    trace.alpha = file.channels[2].samples;
    return trace;
}

std::vector<CrossoverPoint> bandwidth_crossover_scan(const PhysParams& p, Sideband sb,
                                                     double flux_F0,
                                                     const std::vector<double>& sigma_grid,
                                                     const SimConfig& cfg) {
    if (sigma_grid.empty()) throw std::invalid_argument("sigma grid is empty");
    std::vector<CrossoverPoint> out;
    out.reserve(sigma_grid.size());
    for (std::size_t i = 0; i < sigma_grid.size(); ++i) {
        SimConfig point_cfg = cfg;
        point_cfg.seed = derive_stream_seed(cfg.seed, i);
        const auto spec = DriveSpec::box_noise(sigma_grid[i], flux_F0, sb, p.omega_m());
        const SimTrace trace = integrate(p, spec, point_cfg);
        const TraceStats stats = occupancy_from_trace(trace, cfg.transient_skip);
        CrossoverPoint pt;
        pt.sigma = sigma_grid[i];
        pt.mean_n_m = stats.mean;
        pt.std_error = stats.std_error;
        pt.seed = point_cfg.seed;
        out.push_back(pt);
    }
    return out;
}

}  // namespace omnoise
