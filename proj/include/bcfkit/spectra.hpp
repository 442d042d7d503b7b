// spectra.hpp — linear absorption from g(t), weak-coupling T = 0 limit, comparisons

#pragma once

#include <cstddef>
#include <vector>

#include "bcfkit/lineshape.hpp"
#include "bcfkit/specdens.hpp"

namespace bcfkit {

// Uniform grid ω_i = omega0 + i·domega (cm⁻¹), zero-phonon line at 0.
// Contract: trapz(values) + 2π·delta_weight = 2π.
struct Spectrum {
    double omega0 = 0.0;
    double domega = 1.0;
    std::vector<double> values;
    double delta_weight = 0.0;
    double normalization = 1.0;  // factor applied to the raw transform
    bool under_resolved = false; // min < -1e-3·max

    std::size_t size() const noexcept { return values.size(); }
    double omega(std::size_t i) const noexcept { return omega0 + double(i) * domega; }
    double area() const;  // trapz(values) + 2π·delta_weight
    double at(double w) const;  // linear interpolation, 0 outside
};

enum class Window { None, Hann };

struct FftOptions {
    std::size_t n_points = std::size_t(1) << 20;  // time samples
    double dt = 0.0;                               // 0 → π/(8·max(Ω_max, 2000))
    Window window = Window::None;
    double gamma_add = 1.0;                        // cm⁻¹
    std::size_t zero_pad = 4;
    // Split e^{-g̃(t)} into its long-time plateau (reported as delta_weight) and a
    // decaying remainder that is transformed. Needs gamma_add = 0.
    bool separate_zpl = false;
};

// Default time step for an SD whose largest feature sits at omega_max.
double default_dt(double omega_max);

// A(ω) = (1/π) Re ∫_0^∞ e^{iωt} e^{-g̃(t) - γ_add t} dt, g̃ = g + iE_λt.
// The lineshape must be sampled at t_k = k·dt starting at 0.
Spectrum absorption(const LineshapeSeries& g, const FftOptions& fft);

// T = 0, weak coupling: (1 - X)δ(ω) + J(ω)/(πω²), scaled to total mass 2π.
Spectrum t0_weak_coupling_spectrum(const SDView& sd, double omega0, double domega, std::size_t count);

struct SpectrumDistance {
    double l1 = 0.0;
    double linf = 0.0;
    double peak_shift = 0.0;  // argmax(b) - argmax(a), cm⁻¹
};

// b is resampled onto a's grid by linear interpolation.
SpectrumDistance compare_spectra(const Spectrum& a, const Spectrum& b);

// Restrict to [lo, hi] and resample with step `step` (linear interpolation).
Spectrum resample(const Spectrum& s, double lo, double hi, double step);

} // namespace bcfkit
