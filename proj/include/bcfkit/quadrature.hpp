// quadrature.hpp — adaptive Gauss–Kronrod integration, semi-infinite ranges and
// half-sided Fourier integrals of smooth, decaying integrands.

#pragma once

#include <complex>
#include <functional>

namespace bcfkit::quad {

using RealFn = std::function<double(double)>;
using ComplexFn = std::function<std::complex<double>(double)>;

struct Options {
    double rel_tol = 1e-10;
    double abs_tol = 0.0;
    int max_intervals = 400;      // per gauss_kronrod call
    long max_panels = 4'000'000;  // oscillatory panels in half_fourier
};

struct Result {
    double value = 0.0;
    double error = 0.0;
    bool converged = true;
};

struct ComplexResult {
    std::complex<double> value{};
    double error = 0.0;
    bool converged = true;
};

// Globally adaptive 21-point Gauss–Kronrod on a finite interval [a, b].
Result gauss_kronrod(const RealFn& f, double a, double b, const Options& opts = {});
ComplexResult gauss_kronrod_complex(const ComplexFn& f, double a, double b, const Options& opts = {});

// ∫_0^∞ f(ω) dω, integrated in log ω in unit-width chunks around `scale` and
// extended outwards until the chunks decay geometrically; the remaining tails are
// summed as geometric series. Throws Divergence if either end fails to decay.
Result semi_infinite(const RealFn& f, double scale, const Options& opts = {});

// ∫_lower^∞ f(ω) dω, same strategy as semi_infinite but one-sided.
Result upper_tail(const RealFn& f, double lower, const Options& opts = {});

// Half-sided Fourier integral for t > 0:
//   one_minus == false:  ∫_0^∞ f(ω) e^{-iωt} dω
//   one_minus == true:   ∫_0^∞ f(ω) (1 - e^{-iωt}) dω
// Panels of width π/t are integrated until |f(W)|/t drops below opts.abs_tol
// (which must be positive); the remainder is added from an integration-by-parts
// expansion (plus the non-oscillatory tail for one_minus).
// real_only drops the sine part (returned imaginary part is 0); use it when that
// part is not needed and may not exist, e.g. f ~ 1/ω² at 0.
ComplexResult half_fourier(const RealFn& f, double t, double scale, const Options& opts,
                           bool one_minus = false, bool real_only = false);

} // namespace bcfkit::quad
