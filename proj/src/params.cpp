#include "omnoise/params.hpp"

#include <cmath>
#include <cstdio>

namespace omnoise {

namespace {

void require_finite_nonneg(double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0)
        throw std::invalid_argument(std::string(name) + " must be finite and >= 0");
}

void require_finite_pos(double v, const char* name) {
    if (!std::isfinite(v) || v <= 0.0)
        throw std::invalid_argument(std::string(name) + " must be finite and > 0");
}

}  // namespace

PhysParams::PhysParams(double omega_m, double gamma, double kappa, double g0,
                       double n_th, std::optional<double> n_ba, double n_max)
    : omega_m_(omega_m), gamma_(gamma), kappa_(kappa), g0_(g0), n_th_(n_th), n_max_(n_max) {
    require_finite_pos(omega_m, "omega_m");
    // gamma = 0 would make the transduction coefficient q undefined.
    require_finite_pos(gamma, "gamma");
    require_finite_pos(kappa, "kappa");
    // g0 = 0 is the valid undriven/uncoupled limit.
    require_finite_nonneg(g0, "g0");
    require_finite_nonneg(n_th, "n_th");
    require_finite_pos(n_max, "n_max");
    if (n_ba) {
        require_finite_nonneg(*n_ba, "n_ba");
        n_ba_ = *n_ba;
    } else {
        // Finite-sideband-resolution correction, kappa^2/(16 omega_m^2).
        n_ba_ = kappa_ * kappa_ / (16.0 * omega_m_ * omega_m_);
    }
}

void PhysParams::require_resolved_sideband() const {
    if (!resolved_sideband())
        throw std::invalid_argument("resolved-sideband regime required (omega_m > kappa)");
}

std::string to_string(Sideband sb) { return sb == Sideband::Red ? "red" : "blue"; }

Sideband sideband_from_string(const std::string& s) {
    if (s == "red" || s == "Red") return Sideband::Red;
    if (s == "blue" || s == "Blue") return Sideband::Blue;
    throw std::invalid_argument("unknown sideband '" + s + "' (expected red|blue)");
}

DriveSpec DriveSpec::coherent(double n0, Sideband sb) {
    if (!std::isfinite(n0) || n0 < 0.0) throw std::invalid_argument("n0 must be >= 0");
    return DriveSpec{CoherentTone{n0}, sb};
}

DriveSpec DriveSpec::box_noise(double sigma, double flux_F0, Sideband sb, double omega_m) {
    if (!std::isfinite(sigma) || sigma <= 0.0) throw std::invalid_argument("sigma must be > 0");
    if (!std::isfinite(flux_F0) || flux_F0 < 0.0) throw std::invalid_argument("flux_F0 must be >= 0");
    // Band [center - sigma/2, center + sigma/2] must stay clear of the carrier.
    if (sigma / 2.0 >= omega_m)
        throw std::invalid_argument("box-noise band overlaps the carrier (sigma/2 >= omega_m)");
    return DriveSpec{BoxNoise{sigma, flux_F0}, sb};
}

DriveSpec DriveSpec::two_tone(double delta, double alpha_in, Sideband sb) {
    if (!std::isfinite(delta) || delta < 0.0) throw std::invalid_argument("delta must be >= 0");
    if (!std::isfinite(alpha_in) || alpha_in < 0.0) throw std::invalid_argument("alpha_in must be >= 0");
    return DriveSpec{TwoTone{delta, alpha_in}, sb};
}

std::string DriveSpec::canonical_string() const {
    char buf[160];
    const char* sb = sideband == Sideband::Red ? "red" : "blue";
    if (auto* c = std::get_if<CoherentTone>(&shape)) {
        std::snprintf(buf, sizeof buf, "coherent|%s|n0=%.17g", sb, c->n0);
    } else if (auto* b = std::get_if<BoxNoise>(&shape)) {
        std::snprintf(buf, sizeof buf, "box|%s|sigma=%.17g|F0=%.17g", sb, b->sigma, b->flux_F0);
    } else {
        auto& t = std::get<TwoTone>(shape);
        std::snprintf(buf, sizeof buf, "twotone|%s|delta=%.17g|alpha_in=%.17g", sb, t.delta, t.alpha_in);
    }
    return buf;
}

std::uint64_t DriveSpec::digest() const {
    // FNV-1a 64 over the canonical encoding.
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : canonical_string()) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

double nbar0_from_flux(const PhysParams& p, double flux_F0) {
    if (!std::isfinite(flux_F0) || flux_F0 < 0.0) throw std::invalid_argument("flux_F0 must be >= 0");
    return p.kappa() * flux_F0 / (p.omega_m() * p.omega_m());
}

double q_parameter(const PhysParams& p, Sideband sb) {
    const double mag = 4.0 * p.g0() * p.g0() / (p.gamma() * p.omega_m() * p.omega_m());
    return sideband_sign(sb) * mag;
}

double gamma_opt_bar(const PhysParams& p, double nbar0) {
    if (!std::isfinite(nbar0) || nbar0 < 0.0) throw std::invalid_argument("nbar0 must be >= 0");
    return 4.0 * p.g0() * p.g0() * nbar0 / p.kappa();
}

DerivedScalars derived_scalars(const PhysParams& p, Sideband sb, double flux_F0) {
    DerivedScalars d;
    d.nbar0 = nbar0_from_flux(p, flux_F0);
    d.gamma_opt = gamma_opt_bar(p, d.nbar0);
    d.q = q_parameter(p, sb);
    return d;
}

}  // namespace omnoise
