#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "omnoise/envelope.hpp"
#include "omnoise/params.hpp"

namespace omnoise {

// Time-domain integrator for the linearized rotating-frame equations:
// the classical intracavity envelope alpha follows the drive through the
// detuned cavity response, the fluctuation fields a and b couple through
// the beam-splitter (red) or parametric (blue) interaction, and both see
// their vacuum/thermal noise. Exponential (exact linear drift) stepping
// with additive noise per step.
struct SimConfig {
    double dt = 0.0;             // s; dt*kappa <= 0.1 required
    double duration = 0.0;       // s
    double transient_skip = 0.0; // s, discarded by the occupancy estimators
    std::uint64_t seed = 0;
    enum class Saturation { None, NonlinearDamping } saturation = Saturation::None;
    std::size_t store_stride = 0;  // 0 = auto (bounded stored-sample count)
};

struct SimTrace {
    std::vector<std::complex<double>> b;      // mechanical amplitude, sqrt(phonons)
    std::vector<std::complex<double>> a;      // cavity fluctuation, sqrt(photons)
    std::vector<std::complex<double>> alpha;  // classical intracavity envelope
    double dt = 0.0;                          // spacing of stored samples
    std::size_t stride = 1;                   // steps per stored sample
    std::uint64_t seed = 0;
    DriveSpec spec;

    std::vector<double> occupancy() const;  // |b|^2 series
    double duration() const { return dt * static_cast<double>(b.size()); }
};

// Thrown when the parametric gain outruns the damping with saturation off.
class divergence_error : public std::runtime_error {
public:
    divergence_error(const std::string& what, double time)
        : std::runtime_error(what), time_(time) {}
    double time() const { return time_; }

private:
    double time_;
};

// Integrate under a pre-synthesized envelope. The envelope may be sampled
// coarser than cfg.dt; it is linearly interpolated (it must be resolved by
// construction). env.duration() must cover cfg.duration.
SimTrace integrate(const PhysParams& p, const Envelope& env, const SimConfig& cfg);

// Convenience overload: synthesizes the envelope for the drive first
// (envelope and dynamics use independent substreams of cfg.seed).
SimTrace integrate(const PhysParams& p, const DriveSpec& spec, const SimConfig& cfg);

struct TraceStats {
    double mean = 0.0;
    double std_error = 0.0;  // block-mean error bar; autocorrelation-aware
    std::size_t n_used = 0;
    double n_eff = 0.0;      // variance-ratio effective sample count
    std::string warning;     // non-empty when the averaging span looks short
};

// Time average of |b|^2 after `skip` seconds.
TraceStats occupancy_from_trace(const SimTrace& trace, double skip);

struct CrossoverPoint {
    double sigma = 0.0;
    double mean_n_m = 0.0;
    double std_error = 0.0;
    std::uint64_t seed = 0;
};

// Occupancy versus noise bandwidth at fixed flux; fresh substream per
// grid point. Reproduces the QNA plateau and the narrowband rise.
std::vector<CrossoverPoint> bandwidth_crossover_scan(const PhysParams& p, Sideband sb,
                                                     double flux_F0,
                                                     const std::vector<double>& sigma_grid,
                                                     const SimConfig& cfg);

// Columnar export (channels b, a, alpha) in the same container format as
// envelopes; downsample > 1 trades time resolution for disk economy.
void write_trace(const std::string& path, const SimTrace& trace, std::size_t downsample = 1);

SimTrace read_trace(const std::string& path, const DriveSpec& spec);

}  // namespace omnoise
