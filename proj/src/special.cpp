#include "bcfkit/special.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "bcfkit/error.hpp"

namespace bcfkit::special {

namespace {

constexpr double kSeriesLimit = 40.0;

// γ + ln x + Σ x^k/(k·k!); all terms positive for x > 0, so no cancellation.
double ei_series(double x) {
    double term = 1.0;
    double sum = 0.0;
    for (int k = 1; k < 500; ++k) {
        term *= x / k;
        const double add = term / k;
        sum += add;
        if (add < std::numeric_limits<double>::epsilon() * 0.1 * sum) break;
    }
    return std::numbers::egamma + std::log(x) + sum;
}

// Σ k!/x^{k+1}, truncated at the smallest term; equals e^{-x} Ei(x) asymptotically.
double scaled_ei_asymptotic(double x) {
    double term = 1.0 / x;
    double sum = term;
    for (int k = 1; k < 200; ++k) {
        const double next = term * k / x;
        if (next >= term) break;
        term = next;
        sum += term;
        if (term < std::numeric_limits<double>::epsilon() * 0.1 * sum) break;
    }
    return sum;
}

void check_domain(double x) {
    if (!(x > 0.0)) throw DomainError("Ei: argument must be positive");
}

} // namespace

double expint_ei(double x) {
    check_domain(x);
    if (x <= kSeriesLimit) return ei_series(x);
    return std::exp(x) * scaled_ei_asymptotic(x);
}

double scaled_expint_ei(double x) {
    check_domain(x);
    if (x <= kSeriesLimit) return std::exp(-x) * ei_series(x);
    return scaled_ei_asymptotic(x);
}

} // namespace bcfkit::special
