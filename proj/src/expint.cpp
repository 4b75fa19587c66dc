#include "omnoise/expint.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace omnoise {

namespace {

constexpr double euler_gamma = 0.57721566490153286060651209;

// E1(x) = -gamma - ln x + sum_{k>=1} (-1)^{k+1} x^k / (k k!), converges fast for x <= 1.
double e1_series(double x) {
    double sum = 0.0;
    double term = 1.0;  // x^k / k!
    for (int k = 1; k <= 60; ++k) {
        term *= x / k;
        const double add = (k % 2 ? term : -term) / k;
        sum += add;
        if (std::abs(add) < 1e-17 * std::abs(sum)) break;
    }
    return -euler_gamma - std::log(x) + sum;
}

// exp(x) E1(x) = 1/(x+1 - 1/(x+3 - 4/(x+5 - 9/(x+7 - ...)))), for x > 1.
// Evaluated with the modified Lentz algorithm.
double e1_cf_scaled(double x) {
    const double tiny = 1e-300;
    double b = x + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 200; ++i) {
        const double a = -static_cast<double>(i) * i;
        b += 2.0;
        d = a * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + a / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-15) return h;
    }
    throw std::runtime_error("expint_e1: continued fraction failed to converge");
}

}  // namespace

double expint_e1(double x) {
    if (!(x > 0.0)) throw std::invalid_argument("expint_e1 requires x > 0");
    if (x <= 1.0) return e1_series(x);
    if (x > 700.0) return 0.0;  // exp(-x) underflows
    return std::exp(-x) * e1_cf_scaled(x);
}

double expint_e1_scaled(double x) {
    if (!(x > 0.0)) throw std::invalid_argument("expint_e1_scaled requires x > 0");
    if (x <= 1.0) return std::exp(x) * e1_series(x);
    return e1_cf_scaled(x);
}

}  // namespace omnoise
