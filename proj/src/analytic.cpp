#include "omnoise/analytic.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "omnoise/expint.hpp"

namespace omnoise {

std::string to_string(ModelTag tag) {
    switch (tag) {
        case ModelTag::Coherent: return "coherent";
        case ModelTag::QNA: return "qna";
        case ModelTag::BlueNoiseNarrow: return "blue_noise_narrow";
        case ModelTag::TwoToneNarrow: return "two_tone_narrow";
        case ModelTag::QuasistaticClosedForm: return "quasistatic_closed_form";
    }
    return "unknown";
}

double backaction_damping_coherent(const PhysParams& p, Sideband sb, double n0) {
    if (!std::isfinite(n0) || n0 < 0.0) throw std::invalid_argument("n0 must be >= 0");
    p.require_resolved_sideband();
    return sideband_sign(sb) * 4.0 * p.g0() * p.g0() * n0 / p.kappa();
}

OccupancyPrediction occupancy_coherent(const PhysParams& p, double gamma_opt_signed) {
    OccupancyPrediction out;
    out.model_tag = ModelTag::Coherent;
    out.gamma_eff = p.gamma() + gamma_opt_signed;
    out.stable = out.gamma_eff > 0.0;
    if (!out.stable) {
        out.n_m = p.n_max();
        return out;
    }
    const double num = p.gamma() * p.n_th() + gamma_opt_signed * p.n_ba();
    out.n_m = std::max(0.0, num / out.gamma_eff);
    return out;
}

double noise_damping_qna(const PhysParams& p, Sideband sb, double flux_F0, double sigma) {
    if (!std::isfinite(sigma) || sigma <= 0.0) throw std::invalid_argument("sigma must be > 0");
    if (!std::isfinite(flux_F0) || flux_F0 < 0.0) throw std::invalid_argument("flux_F0 must be >= 0");
    p.require_resolved_sideband();
    const double base = 4.0 * p.g0() * p.g0() * flux_F0 / (p.omega_m() * p.omega_m());
    const double band = (p.kappa() / sigma) * std::atan(sigma / p.kappa());
    return sideband_sign(sb) * base * band;
}

OccupancyPrediction occupancy_noise_qna(const PhysParams& p, Sideband sb, double flux_F0,
                                        double sigma) {
    OccupancyPrediction out = occupancy_coherent(p, noise_damping_qna(p, sb, flux_F0, sigma));
    out.model_tag = ModelTag::QNA;
    return out;
}

double unstable_probability(const PhysParams& p, double flux_F0) {
    if (!std::isfinite(flux_F0) || flux_F0 < 0.0) throw std::invalid_argument("flux_F0 must be >= 0");
    p.require_resolved_sideband();
    if (flux_F0 == 0.0 || p.g0() == 0.0) return 0.0;
    const double gamma_opt = 4.0 * p.g0() * p.g0() * flux_F0 / (p.omega_m() * p.omega_m());
    return std::exp(-p.gamma() / gamma_opt);
}

OccupancyPrediction occupancy_blue_noise_narrow(const PhysParams& p, double flux_F0) {
    OccupancyPrediction out;
    out.model_tag = ModelTag::BlueNoiseNarrow;
    const double gamma_opt = (flux_F0 > 0.0 && p.g0() > 0.0)
                                 ? 4.0 * p.g0() * p.g0() * flux_F0 / (p.omega_m() * p.omega_m())
                                 : 0.0;
    out.gamma_eff = p.gamma() - gamma_opt;
    out.stable = out.gamma_eff > 0.0;
    out.n_m = p.n_th() + p.n_max() * unstable_probability(p, flux_F0);
    return out;
}

OccupancyPrediction occupancy_two_tone_narrow(const PhysParams& p, Sideband sb, double nbar0) {
    if (!std::isfinite(nbar0) || nbar0 < 0.0) throw std::invalid_argument("nbar0 must be >= 0");
    p.require_resolved_sideband();
    OccupancyPrediction out;
    out.model_tag = ModelTag::TwoToneNarrow;
    const double gk = p.gamma() * p.kappa();
    const double x = 8.0 * p.g0() * p.g0() * nbar0;  // = 2 gamma_opt * kappa
    const double arg = sb == Sideband::Red ? gk + x : gk - x;
    out.gamma_eff = arg / p.kappa();
    out.stable = arg > 0.0;
    if (!out.stable) {
        out.n_m = p.n_max();
        return out;
    }
    out.n_m = p.gamma() * p.n_th() * p.kappa() / std::sqrt(gk * arg);
    return out;
}

double occupancy_two_tone_red_strong_damping(const PhysParams& p, double nbar0) {
    if (!std::isfinite(nbar0) || nbar0 <= 0.0)
        throw std::invalid_argument("strong-damping form requires nbar0 > 0");
    p.require_resolved_sideband();
    const double gamma_opt = gamma_opt_bar(p, nbar0);
    if (gamma_opt <= 0.0) throw std::invalid_argument("strong-damping form requires g0 > 0");
    return p.n_th() * std::sqrt(p.gamma() / (2.0 * gamma_opt));
}

double quasistatic_occupancy_closed_form(const PhysParams& p, double q, double flux_F0) {
    if (!std::isfinite(flux_F0) || flux_F0 < 0.0) throw std::invalid_argument("flux_F0 must be >= 0");
    if (!(q > 0.0))
        throw std::invalid_argument(
            "closed form requires q > 0 (red side); the blue-side average diverges, "
            "use the capped Monte-Carlo evaluation instead");
    p.require_resolved_sideband();
    const double qF0 = q * flux_F0;
    if (qF0 == 0.0) return p.n_th();
    const double a = 1.0 / qF0;
    return p.n_th() * a * expint_e1_scaled(a);
}

OccupancyPrediction two_tone_envelope_average(const PhysParams& p, Sideband sb, double alpha_in) {
    if (!std::isfinite(alpha_in) || alpha_in < 0.0)
        throw std::invalid_argument("alpha_in must be >= 0");
    p.require_resolved_sideband();
    OccupancyPrediction out;
    out.model_tag = ModelTag::TwoToneNarrow;
    // <1/(1 + 4 q alpha^2 cos^2)> over one period = 1/sqrt(1 + 4 q alpha^2).
    const double arg = 1.0 + 4.0 * q_parameter(p, sb) * alpha_in * alpha_in;
    out.gamma_eff = p.gamma() * arg;
    out.stable = arg > 0.0;
    out.n_m = out.stable ? p.n_th() / std::sqrt(arg) : p.n_max();
    return out;
}

TwoToneCrossCheck two_tone_convention_crosscheck(const PhysParams& p, Sideband sb,
                                                 double alpha_in) {
    TwoToneCrossCheck cc;
    const double nbar0_single = p.kappa() * alpha_in * alpha_in / (p.omega_m() * p.omega_m());
    cc.n_printed = occupancy_two_tone_narrow(p, sb, nbar0_single).n_m;
    cc.n_envelope_avg = two_tone_envelope_average(p, sb, alpha_in).n_m;
    cc.nbar0_scale = 2.0;
    return cc;
}

double self_oscillation_threshold_photons(const PhysParams& p) {
    p.require_resolved_sideband();
    if (p.g0() == 0.0) return std::numeric_limits<double>::infinity();
    return p.gamma() * p.kappa() / (4.0 * p.g0() * p.g0());
}

}  // namespace omnoise
