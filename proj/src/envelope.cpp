#include "omnoise/envelope.hpp"

#include <cmath>
#include <iostream>
#include <numbers>
#include <stdexcept>

#include "omnoise/fft.hpp"
#include "omnoise/rng.hpp"

namespace omnoise {

namespace {

std::size_t sample_count(double duration, double dt) {
    if (!std::isfinite(dt) || dt <= 0.0) throw std::invalid_argument("dt must be > 0");
    if (!std::isfinite(duration) || duration <= 0.0)
        throw std::invalid_argument("duration must be > 0");
    const auto n = static_cast<std::size_t>(std::llround(duration / dt));
    if (n < 2) throw std::invalid_argument("envelope must hold at least 2 samples");
    return n;
}

}  // namespace

double Envelope::mean_power() const {
    double acc = 0.0;
    for (const auto& s : samples) acc += std::norm(s);
    return samples.empty() ? 0.0 : acc / static_cast<double>(samples.size());
}

double sample_rayleigh_amplitude(double flux_F0, double u) {
    if (!std::isfinite(flux_F0) || flux_F0 <= 0.0)
        throw std::invalid_argument("flux_F0 must be > 0");
    if (!(u >= 0.0) || u >= 1.0)
        throw std::invalid_argument("u must lie in [0, 1); u = 1 maps to infinite amplitude");
    return std::sqrt(-flux_F0 * std::log1p(-u));
}

Envelope box_noise_envelope(const DriveSpec& spec, double duration, double dt,
                            std::uint64_t seed) {
    if (!spec.is_box_noise()) throw std::invalid_argument("drive variant is not box noise");
    const auto& box = std::get<BoxNoise>(spec.shape);
    const std::size_t n = sample_count(duration, dt);

    // Nyquist: band edge sigma/2 must stay below pi/dt.
    if (box.sigma / 2.0 > std::numbers::pi / dt)
        throw std::invalid_argument("box-noise band exceeds Nyquist (sigma/2 > pi/dt)");
    // Envelope must resolve the noise correlation time.
    if (box.sigma * dt > 0.1)
        throw std::invalid_argument("box noise requires sigma*dt <= 0.1 (envelope resolved)");
    if (duration * box.sigma < 10.0)
        std::cerr << "omnoise: warning: duration*sigma = " << duration * box.sigma
                  << " < 10; envelope statistics poorly converged\n";

    Envelope env;
    env.dt = dt;
    env.spec = spec;
    env.seed = seed;
    env.samples.assign(n, {0.0, 0.0});
    if (box.flux_F0 == 0.0) return env;

    // Fill in-band bins with unit circular Gaussians, count them, then
    // backward-DFT and scale so E|r|^2 = F0 exactly.
    auto rng = Xoshiro256pp(seed);
    const double dw = two_pi / (dt * static_cast<double>(n));
    std::size_t in_band = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double wk = dw * (k <= n / 2 ? static_cast<double>(k)
                                           : static_cast<double>(k) - static_cast<double>(n));
        if (std::abs(wk) <= box.sigma / 2.0) {
            env.samples[k] = rng.complex_normal(1.0);
            ++in_band;
        }
    }
    fft_inplace(env.samples, +1);
    const double scale = std::sqrt(box.flux_F0 / static_cast<double>(in_band));
    for (auto& s : env.samples) s *= scale;
    return env;
}

Envelope two_tone_envelope(const DriveSpec& spec, double duration, double dt) {
    if (!spec.is_two_tone()) throw std::invalid_argument("drive variant is not two-tone");
    const auto& tt = std::get<TwoTone>(spec.shape);
    const std::size_t n = sample_count(duration, dt);
    if (tt.delta * dt > 0.1)
        throw std::invalid_argument("two-tone envelope requires delta*dt <= 0.1");

    Envelope env;
    env.dt = dt;
    env.spec = spec;
    env.samples.resize(n);
    // half-spacing phase so `delta` is the tone spacing
    for (std::size_t j = 0; j < n; ++j) {
        const double t = dt * static_cast<double>(j);
        env.samples[j] = {2.0 * tt.alpha_in * std::cos(0.5 * tt.delta * t), 0.0};
    }
    return env;
}

Envelope coherent_envelope(const DriveSpec& spec, const PhysParams& p, double duration,
                           double dt) {
    if (!spec.is_coherent()) throw std::invalid_argument("drive variant is not coherent");
    const auto& tone = std::get<CoherentTone>(spec.shape);
    const std::size_t n = sample_count(duration, dt);

    Envelope env;
    env.dt = dt;
    env.spec = spec;
    const double amp = std::sqrt(tone.n0 * p.omega_m() * p.omega_m() / p.kappa());
    env.samples.assign(n, {amp, 0.0});
    return env;
}

Envelope synthesize_envelope(const PhysParams& p, const DriveSpec& spec, double duration,
                             double dt, std::uint64_t seed) {
    if (spec.is_box_noise()) return box_noise_envelope(spec, duration, dt, seed);
    if (spec.is_two_tone()) return two_tone_envelope(spec, duration, dt);
    return coherent_envelope(spec, p, duration, dt);
}

}  // namespace omnoise
