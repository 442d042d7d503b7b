// special.hpp — exponential integral on the positive real axis

#pragma once

namespace bcfkit::special {

// Ei(x) = -∫_{-x}^∞ e^{-t}/t dt for x > 0 (principal value). Relative accuracy ~1e-14.
double expint_ei(double x);

// e^{-x} Ei(x), finite for all x > 0 (Ei itself overflows past x ≈ 716).
double scaled_expint_ei(double x);

} // namespace bcfkit::special
