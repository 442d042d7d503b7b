// lineshape.hpp — lineshape function g(t) = ∫_0^t ds ∫_0^s dτ α(τ)

#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "bcfkit/bcf.hpp"
#include "bcfkit/specdens.hpp"

namespace bcfkit {

enum class LineshapeSource { Analytic, Quadrature, Fft };

// g holds the full lineshape function, including its -iE_λt drift; E_lambda is
// stored separately so spectra can centre the zero-phonon line.
struct LineshapeSeries {
    std::vector<double> t;
    std::vector<cplx> g;
    double E_lambda = 0.0;
    LineshapeSource source = LineshapeSource::Analytic;
};

// E_λ implied by the linear-in-t drift of the closed form: -Im Σ_m i p_m/ω_m.
double exponential_reorganization_energy(const ExponentialBCF& bcf);

// Closed-form double integral of each exponential. If E_lambda_quadrature is given
// it is used for centring and must agree with the closed-form drift to 1e-6 relative
// (NumericalError otherwise).
LineshapeSeries g_from_exponential(const ExponentialBCF& bcf, const std::vector<double>& t_grid,
                                   std::optional<double> E_lambda_quadrature = std::nullopt);
cplx g_exponential_at(const std::vector<Mode>& modes, double t);

// Oscillatory quadrature of
//   g(t) = (1/π) ∫ J/ω² [coth(ω/2T)(1 - cos ωt) + i sin ωt] dω - i E_λ t.
LineshapeSeries g_from_sd_quadrature(const SDView& sd, double T_kelvin, const std::vector<double>& t_grid,
                                     double rel_tol = 1e-8);

// Same integral on the uniform grid t_k = k·dt, k < count, by one FFT over a
// trapezoid frequency grid of spacing π/(count·dt) reaching 2π/dt. Requires
// J/ω² · coth(ω/2T) integrable at 0 (low-frequency exponent ≥ 3, or ≥ 2 at T = 0).
LineshapeSeries g_from_sd_fft(const SDView& sd, double T_kelvin, double dt, std::size_t count);

template <class SD>
LineshapeSeries g_from_sd_quadrature(const SD& sd, double T_kelvin, const std::vector<double>& t_grid) {
    return g_from_sd_quadrature(view(sd), T_kelvin, t_grid);
}

} // namespace bcfkit
