#pragma once

namespace omnoise {

// Exponential integral E1(x) = int_x^inf exp(-t)/t dt, x > 0.
// Power series for x <= 1, modified Lentz continued fraction above;
// relative accuracy ~1e-13 across the positive axis.
double expint_e1(double x);

// exp(x) * E1(x); stays finite for large x where E1 alone underflows.
double expint_e1_scaled(double x);

}  // namespace omnoise
