#include "omnoise/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace omnoise {

namespace {
// FFTW planning is not thread-safe; executing distinct plans is.
std::mutex plan_mutex;
}  // namespace

void fft_inplace(std::vector<std::complex<double>>& x, int sign) {
    if (x.empty()) throw std::invalid_argument("fft_inplace: empty input");
    if (sign != 1 && sign != -1) throw std::invalid_argument("fft_inplace: sign must be +-1");
    auto* data = reinterpret_cast<fftw_complex*>(x.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(plan_mutex);
        plan = fftw_plan_dft_1d(static_cast<int>(x.size()), data, data,
                                sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    if (!plan) throw std::runtime_error("fft_inplace: fftw plan creation failed");
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(plan_mutex);
        fftw_destroy_plan(plan);
    }
}

}  // namespace omnoise
