#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include "omnoise/units.hpp"

namespace omnoise {

// Device constants of one optomechanical mode pair. Immutable after
// construction; all rates angular (rad/s).
class PhysParams {
public:
    PhysParams(double omega_m, double gamma, double kappa, double g0,
               double n_th, std::optional<double> n_ba, double n_max);

    double omega_m() const { return omega_m_; }
    double gamma() const { return gamma_; }
    double kappa() const { return kappa_; }
    double g0() const { return g0_; }
    double n_th() const { return n_th_; }
    double n_ba() const { return n_ba_; }
    double n_max() const { return n_max_; }

    // kappa < omega_m; required by the analytic layer.
    bool resolved_sideband() const { return omega_m_ > kappa_; }
    void require_resolved_sideband() const;

private:
    double omega_m_, gamma_, kappa_, g0_, n_th_, n_ba_, n_max_;
};

enum class Sideband { Red, Blue };

inline double sideband_sign(Sideband sb) { return sb == Sideband::Red ? +1.0 : -1.0; }
std::string to_string(Sideband sb);
Sideband sideband_from_string(const std::string& s);

// Single tone at omega_c +/- omega_m, named by its steady intracavity photons.
struct CoherentTone {
    double n0 = 0.0;  // intracavity photons
};

// Flat-top noise of full bandwidth sigma centered on the sideband,
// total flux flux_F0 photons/s.
struct BoxNoise {
    double sigma = 0.0;    // rad/s
    double flux_F0 = 0.0;  // photons/s
};

// Two equal tones symmetric about the sideband, spacing delta.
struct TwoTone {
    double delta = 0.0;     // rad/s
    double alpha_in = 0.0;  // sqrt(photons/s)
};

struct DriveSpec {
    std::variant<CoherentTone, BoxNoise, TwoTone> shape;
    Sideband sideband = Sideband::Red;

    static DriveSpec coherent(double n0, Sideband sb);
    static DriveSpec box_noise(double sigma, double flux_F0, Sideband sb, double omega_m);
    static DriveSpec two_tone(double delta, double alpha_in, Sideband sb);

    bool is_coherent() const { return std::holds_alternative<CoherentTone>(shape); }
    bool is_box_noise() const { return std::holds_alternative<BoxNoise>(shape); }
    bool is_two_tone() const { return std::holds_alternative<TwoTone>(shape); }

    // Canonical one-line encoding; hashed into exported file headers.
    std::string canonical_string() const;
    std::uint64_t digest() const;
};

struct DerivedScalars {
    double nbar0 = 0.0;      // mean intracavity photons
    double gamma_opt = 0.0;  // rad/s, >= 0 (magnitude of the flux-based damping)
    double q = 0.0;          // signed transduction coefficient, s
};

// nbar0 = kappa F0 / omega_m^2
double nbar0_from_flux(const PhysParams& p, double flux_F0);

// q = +-4 g0^2 / (gamma omega_m^2); + red, - blue
double q_parameter(const PhysParams& p, Sideband sb);

// gamma_opt = 4 g0^2 nbar0 / kappa
double gamma_opt_bar(const PhysParams& p, double nbar0);

DerivedScalars derived_scalars(const PhysParams& p, Sideband sb, double flux_F0);

}  // namespace omnoise
