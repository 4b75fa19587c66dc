#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "omnoise/params.hpp"

namespace omnoise {

// Slowly-varying complex drive amplitude r(t) in sqrt(photons/s), sampled
// on a uniform grid. For box noise the time-average of |r|^2 converges to
// the flux F0.
struct Envelope {
    std::vector<std::complex<double>> samples;
    double dt = 0.0;            // s
    DriveSpec spec;             // what generated it
    std::uint64_t seed = 0;     // 0 for deterministic envelopes

    double duration() const { return dt * static_cast<double>(samples.size()); }
    double mean_power() const;  // time average of |r|^2
};

// Inverse-transform Rayleigh draw r = sqrt(-F0 ln(1-u)), the amplitude
// statistics of narrowband noise. u must lie in [0, 1); u = 1 would map to
// an infinite amplitude.
double sample_rayleigh_amplitude(double flux_F0, double u);

// Band-limited complex Gaussian noise: independent circular Gaussian
// variates on the in-band frequency bins (|omega| <= sigma/2), zero
// elsewhere, inverse DFT, scaled so E|r|^2 = F0. Exact box spectrum,
// deterministic per (spec, seed).
Envelope box_noise_envelope(const DriveSpec& spec, double duration, double dt,
                            std::uint64_t seed);

// Two tones of spacing delta about the sideband: baseband envelope
// 2 alpha_in cos(delta t / 2). The carrier is absorbed into the rotating
// frame; deterministic.
Envelope two_tone_envelope(const DriveSpec& spec, double duration, double dt);

// Constant envelope with kappa r^2 / omega_m^2 = n0.
Envelope coherent_envelope(const DriveSpec& spec, const PhysParams& p, double duration,
                           double dt);

// Dispatch on the drive variant.
Envelope synthesize_envelope(const PhysParams& p, const DriveSpec& spec, double duration,
                             double dt, std::uint64_t seed);

}  // namespace omnoise
