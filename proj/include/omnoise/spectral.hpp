#pragma once

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace omnoise {

enum class WindowTag { Hann, Rectangular };

// Two-sided power spectral density of a complex series, baseband,
// frequencies in Hz ascending. Density normalization: sum(values) * df
// equals the mean power of the series (window-compensated).
struct PSD {
    std::vector<double> frequencies;  // Hz
    std::vector<double> values;       // power per Hz
    std::size_t segment_count = 0;
    WindowTag window_tag = WindowTag::Hann;

    double df() const;  // grid spacing, Hz
    double integrated_power() const;
};

// Averaged modified periodogram (Welch). overlap is the fractional segment
// overlap in [0, 0.9]; the series must hold at least one full segment.
PSD welch_psd(const std::vector<std::complex<double>>& series, double dt,
              std::size_t segment_length, double overlap, WindowTag window = WindowTag::Hann);

struct SpectrumFit {
    double center = 0.0;         // Hz
    double fwhm = 0.0;           // Hz
    double area = 0.0;           // equals occupancy for |b|^2-normalized traces
    double baseline = 0.0;
    double residual_norm = 0.0;  // RMS residual
    bool converged = false;
    int iterations = 0;
};

// Lorentzian model: baseline + (area/pi) * (fwhm/2) / ((f-center)^2 + (fwhm/2)^2).
struct LorentzianInit {
    double center = 0.0;
    double fwhm = 0.0;
    double area = 0.0;
    double baseline = 0.0;
};

// Damped least squares (Levenberg-Marquardt with Marquardt scaling,
// analytic Jacobian). Auto-init from argmax / half-power width / numerical
// area unless an explicit init is given. Flat input is rejected.
SpectrumFit lorentzian_fit(const PSD& psd);
SpectrumFit lorentzian_fit(const PSD& psd, const LorentzianInit& init);

double lorentzian_model(const SpectrumFit& fit, double f_hz);

struct LineshapeDiagnostics {
    double chi2_per_point = 0.0;  // against segment-count-based variance
    double shape_index = 1.0;     // peak-height * pi * fwhm / (2 * area); 1 for Lorentzian
    double score = 0.0;           // chi2_per_point; headline non-Lorentzian metric
    bool distorted = false;
};

// Residual metrics of a converged fit. The expected per-point standard
// deviation of an M-segment Welch estimate is model/sqrt(M).
LineshapeDiagnostics lineshape_diagnostics(const PSD& psd, const SpectrumFit& fit);

// CSV: "freq_hz,psd" rows. JSON: fit parameters and optional diagnostics.
void write_psd_csv(std::ostream& os, const PSD& psd);
std::string fit_to_json(const SpectrumFit& fit);
std::string fit_to_json(const SpectrumFit& fit, const LineshapeDiagnostics& diag);

}  // namespace omnoise
