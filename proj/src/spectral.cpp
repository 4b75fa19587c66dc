#include "omnoise/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "json.hpp"
#include "omnoise/fft.hpp"

namespace omnoise {

namespace {

constexpr double kTwoPi = 6.283185307179586477;

std::vector<double> make_window(WindowTag tag, std::size_t n) {
    std::vector<double> w(n, 1.0);
    if (tag == WindowTag::Hann) {
        // Periodic Hann, the standard choice for averaged periodograms.
        for (std::size_t i = 0; i < n; ++i)
            w[i] = 0.5 * (1.0 - std::cos(kTwoPi * static_cast<double>(i) / static_cast<double>(n)));
    }
    return w;
}

struct LorentzParams {
    // theta = (center, fwhm, area, baseline)
    std::array<double, 4> theta{};
};

double model_value(const std::array<double, 4>& th, double f) {
    const double u = f - th[0];
    const double hw = 0.5 * th[1];
    return th[3] + (th[2] / 3.14159265358979323846) * hw / (u * u + hw * hw);
}

double ssr_of(const std::array<double, 4>& th, const PSD& psd) {
    double s = 0.0;
    for (std::size_t k = 0; k < psd.values.size(); ++k) {
        const double r = psd.values[k] - model_value(th, psd.frequencies[k]);
        s += r * r;
    }
    return s;
}

// Solve the 4x4 system A x = b by Gaussian elimination with partial
// pivoting; A is symmetric positive (semi)definite here.
bool solve4(std::array<std::array<double, 4>, 4> a, std::array<double, 4> b,
            std::array<double, 4>& x) {
    for (int col = 0; col < 4; ++col) {
        int piv = col;
        for (int r = col + 1; r < 4; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (a[piv][col] == 0.0) return false;
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        for (int r = col + 1; r < 4; ++r) {
            const double m = a[r][col] / a[col][col];
            for (int c = col; c < 4; ++c) a[r][c] -= m * a[col][c];
            b[r] -= m * b[col];
        }
    }
    for (int r = 3; r >= 0; --r) {
        double acc = b[r];
        for (int c = r + 1; c < 4; ++c) acc -= a[r][c] * x[c];
        x[r] = acc / a[r][r];
    }
    return std::isfinite(x[0]) && std::isfinite(x[1]) && std::isfinite(x[2]) &&
           std::isfinite(x[3]);
}

LorentzianInit auto_init(const PSD& psd) {
    const auto& y = psd.values;
    const auto& f = psd.frequencies;
    const std::size_t n = y.size();
    const double df = psd.df();

    const std::size_t i_max =
        static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());

    std::vector<double> sorted(y);
    std::sort(sorted.begin(), sorted.end());
    const double baseline = sorted[n / 4];  // lower quartile, robust to the peak
    const double h = y[i_max] - baseline;

    // Half-power width: walk outward from the peak.
    std::size_t lo = i_max, hi = i_max;
    while (lo > 0 && y[lo] - baseline > 0.5 * h) --lo;
    while (hi + 1 < n && y[hi] - baseline > 0.5 * h) ++hi;
    const double fwhm = std::max(static_cast<double>(hi - lo) * df, df);

    double area = 0.0;
    for (std::size_t k = 0; k < n; ++k) area += std::max(0.0, y[k] - baseline) * df;
    if (!(area > 0.0)) area = h * (3.14159265358979323846 * fwhm / 2.0);

    return LorentzianInit{f[i_max], fwhm, area, baseline};
}

}  // namespace

double PSD::df() const {
    if (frequencies.size() < 2) throw std::logic_error("PSD has fewer than two bins");
    return frequencies[1] - frequencies[0];
}

double PSD::integrated_power() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s * df();
}

PSD welch_psd(const std::vector<std::complex<double>>& series, double dt,
              std::size_t segment_length, double overlap, WindowTag window) {
    if (!(dt > 0.0)) throw std::invalid_argument("welch_psd: dt must be > 0");
    if (segment_length < 2) throw std::invalid_argument("welch_psd: segment_length must be >= 2");
    if (series.size() < segment_length)
        throw std::invalid_argument("welch_psd: series shorter than one segment");
    if (!(overlap >= 0.0 && overlap <= 0.9))
        throw std::invalid_argument("welch_psd: overlap must lie in [0, 0.9]");

    const std::size_t L = segment_length;
    const auto hop = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(static_cast<double>(L) * (1.0 - overlap))));
    const std::vector<double> w = make_window(window, L);
    double wpow = 0.0;
    for (double v : w) wpow += v * v;

    std::vector<double> acc(L, 0.0);
    std::vector<std::complex<double>> buf(L);
    std::size_t m = 0;
    for (std::size_t start = 0; start + L <= series.size(); start += hop) {
        for (std::size_t i = 0; i < L; ++i) buf[i] = series[start + i] * w[i];
        fft_inplace(buf, -1);
        for (std::size_t k = 0; k < L; ++k) acc[k] += std::norm(buf[k]);
        ++m;
    }

    PSD psd;
    psd.segment_count = m;
    psd.window_tag = window;
    psd.frequencies.resize(L);
    psd.values.resize(L);
    const double df = 1.0 / (static_cast<double>(L) * dt);
    const double norm = dt / (wpow * static_cast<double>(m));
    const std::size_t half = L / 2;
    const std::size_t offset = (L + 1) / 2;  // first source bin after fftshift
    for (std::size_t i = 0; i < L; ++i) {
        const std::size_t k = (i + offset) % L;
        psd.frequencies[i] = (static_cast<double>(i) - static_cast<double>(half)) * df;
        psd.values[i] = acc[k] * norm;
    }
    return psd;
}

SpectrumFit lorentzian_fit(const PSD& psd) { return lorentzian_fit(psd, auto_init(psd)); }

SpectrumFit lorentzian_fit(const PSD& psd, const LorentzianInit& init) {
    const std::size_t n = psd.values.size();
    if (n < 10) throw std::invalid_argument("lorentzian_fit: need at least 10 points");
    const auto [min_it, max_it] = std::minmax_element(psd.values.begin(), psd.values.end());
    if (*max_it == *min_it)
        throw std::invalid_argument("lorentzian_fit: degenerate flat spectrum");
    if (!(init.fwhm > 0.0) || !(init.area > 0.0))
        throw std::invalid_argument("lorentzian_fit: init requires fwhm > 0 and area > 0");

    const double df = psd.df();
    std::array<double, 4> th{init.center, init.fwhm, init.area, init.baseline};
    const double peak = *max_it - init.baseline;
    auto scales = [&](const std::array<double, 4>& t) {
        return std::array<double, 4>{std::max(std::abs(t[0]), t[1]), std::max(t[1], 1e-3 * df),
                                     t[2], std::max(std::abs(t[3]), 1e-3 * std::abs(peak))};
    };

    double ssr = ssr_of(th, psd);
    double lambda = 1e-3;
    SpectrumFit fit;
    int iter = 0;
    bool converged = false;
    for (; iter < 200; ++iter) {
        // Normal equations with analytic Jacobian.
        std::array<std::array<double, 4>, 4> jtj{};
        std::array<double, 4> jtr{};
        for (std::size_t k = 0; k < n; ++k) {
            const double u = psd.frequencies[k] - th[0];
            const double hw = 0.5 * th[1];
            const double denom = u * u + hw * hw;
            const double inv = 1.0 / denom;
            const double inv2 = inv * inv;
            const double api = th[2] / 3.14159265358979323846;
            std::array<double, 4> j{
                api * hw * 2.0 * u * inv2,                  // d/d center
                0.5 * api * (u * u - hw * hw) * inv2,       // d/d fwhm (chain: hw = fwhm/2)
                (1.0 / 3.14159265358979323846) * hw * inv,  // d/d area
                1.0};
            const double r = psd.values[k] - (th[3] + api * hw * inv);
            for (int a = 0; a < 4; ++a) {
                jtr[a] += j[a] * r;
                for (int b = a; b < 4; ++b) jtj[a][b] += j[a] * j[b];
            }
        }
        for (int a = 1; a < 4; ++a)
            for (int b = 0; b < a; ++b) jtj[a][b] = jtj[b][a];

        bool stepped = false;
        for (int tries = 0; tries < 40; ++tries) {
            auto damped = jtj;
            for (int a = 0; a < 4; ++a) damped[a][a] += lambda * jtj[a][a];
            std::array<double, 4> delta{};
            if (solve4(damped, jtr, delta)) {
                std::array<double, 4> cand{th[0] + delta[0], th[1] + delta[1], th[2] + delta[2],
                                           th[3] + delta[3]};
                if (cand[1] > 0.0 && cand[2] > 0.0) {
                    const double cand_ssr = ssr_of(cand, psd);
                    if (cand_ssr <= ssr) {
                        const auto sc = scales(th);
                        bool small = true;
                        for (int a = 0; a < 4; ++a)
                            if (std::abs(delta[a]) > 1e-8 * sc[a]) small = false;
                        th = cand;
                        ssr = cand_ssr;
                        lambda = std::max(lambda * 0.3, 1e-12);
                        stepped = true;
                        if (small) converged = true;
                        break;
                    }
                }
            }
            lambda *= 10.0;
            if (lambda > 1e14) break;
        }
        if (converged || !stepped) break;
    }

    fit.center = th[0];
    fit.fwhm = th[1];
    fit.area = th[2];
    fit.baseline = th[3];
    fit.residual_norm = std::sqrt(ssr / static_cast<double>(n));
    fit.converged = converged;
    fit.iterations = iter + 1;
    return fit;
}

double lorentzian_model(const SpectrumFit& fit, double f_hz) {
    return model_value({fit.center, fit.fwhm, fit.area, fit.baseline}, f_hz);
}

LineshapeDiagnostics lineshape_diagnostics(const PSD& psd, const SpectrumFit& fit) {
    if (!fit.converged)
        throw std::invalid_argument("lineshape_diagnostics: fit did not converge");
    const double m_segments = static_cast<double>(std::max<std::size_t>(1, psd.segment_count));
    const double peak_model = lorentzian_model(fit, fit.center);

    // Restrict the residual sum to the line core; distant baseline bins
    // agree with any fit and would wash the statistic out.
    const double half_window = 3.0 * fit.fwhm;
    double chi2 = 0.0;
    std::size_t n_core = 0;
    for (std::size_t k = 0; k < psd.values.size(); ++k) {
        if (std::abs(psd.frequencies[k] - fit.center) > half_window) continue;
        const double m = lorentzian_model(fit, psd.frequencies[k]);
        const double sigma = std::max(m, 1e-9 * peak_model) / std::sqrt(m_segments);
        const double z = (psd.values[k] - m) / sigma;
        chi2 += z * z;
        ++n_core;
    }
    if (n_core < 16) {  // too few bins across the line: fall back to everything
        chi2 = 0.0;
        n_core = psd.values.size();
        for (std::size_t k = 0; k < psd.values.size(); ++k) {
            const double m = lorentzian_model(fit, psd.frequencies[k]);
            const double sigma = std::max(m, 1e-9 * peak_model) / std::sqrt(m_segments);
            const double z = (psd.values[k] - m) / sigma;
            chi2 += z * z;
        }
    }

    LineshapeDiagnostics d;
    d.chi2_per_point = chi2 / static_cast<double>(n_core);
    const double obs_peak =
        *std::max_element(psd.values.begin(), psd.values.end()) - fit.baseline;
    // Peakedness relative to a Lorentzian of the fitted width and area:
    // 1 on shape match, < 1 for flat-topped or split peaks.
    d.shape_index = obs_peak * 3.14159265358979323846 * fit.fwhm / (2.0 * fit.area);
    d.score = d.chi2_per_point;
    d.distorted = d.score > 3.0 || std::abs(d.shape_index - 1.0) > 0.5;
    return d;
}

void write_psd_csv(std::ostream& os, const PSD& psd) {
    os << "freq_hz,psd\n";
    char buf[80];
    for (std::size_t k = 0; k < psd.values.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", psd.frequencies[k], psd.values[k]);
        os << buf;
    }
}

std::string fit_to_json(const SpectrumFit& fit) {
    nlohmann::json j{{"center_hz", fit.center},   {"fwhm_hz", fit.fwhm},
                     {"area", fit.area},          {"baseline", fit.baseline},
                     {"residual_norm", fit.residual_norm}, {"converged", fit.converged},
                     {"iterations", fit.iterations}};
    return j.dump(2);
}

std::string fit_to_json(const SpectrumFit& fit, const LineshapeDiagnostics& diag) {
    nlohmann::json j = nlohmann::json::parse(fit_to_json(fit));
    j["chi2_per_point"] = diag.chi2_per_point;
    j["shape_index"] = diag.shape_index;
    j["score"] = diag.score;
    j["distorted"] = diag.distorted;
    return j.dump(2);
}

}  // namespace omnoise
