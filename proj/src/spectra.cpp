#include "bcfkit/spectra.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "bcfkit/error.hpp"

namespace bcfkit {

namespace {

constexpr double kPi = std::numbers::pi;

std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

double trapz(const std::vector<double>& v, double h) {
    if (v.size() < 2) return 0.0;
    double s = 0.5 * (v.front() + v.back());
    for (std::size_t i = 1; i + 1 < v.size(); ++i) s += v[i];
    return s * h;
}

void flag_negative(Spectrum& s) {
    if (s.values.empty()) return;
    const auto [mn, mx] = std::minmax_element(s.values.begin(), s.values.end());
    s.under_resolved = *mn < -1e-3 * *mx;
}

// Peak position with a parabola through the maximum and its neighbours.
double peak_position(const Spectrum& s) {
    if (s.values.empty()) return 0.0;
    const std::size_t i = std::size_t(std::max_element(s.values.begin(), s.values.end()) - s.values.begin());
    if (i == 0 || i + 1 >= s.values.size()) return s.omega(i);
    const double y0 = s.values[i - 1], y1 = s.values[i], y2 = s.values[i + 1];
    const double den = y0 - 2.0 * y1 + y2;
    const double off = den != 0.0 ? 0.5 * (y0 - y2) / den : 0.0;
    return s.omega(i) + off * s.domega;
}

} // namespace

double Spectrum::area() const { return trapz(values, domega) + 2.0 * kPi * delta_weight; }

double Spectrum::at(double w) const {
    if (values.empty()) return 0.0;
    const double x = (w - omega0) / domega;
    if (x < 0.0 || x > double(values.size() - 1)) return 0.0;
    const std::size_t i = std::min(std::size_t(x), values.size() - 2);
    const double f = x - double(i);
    return values[i] + f * (values[i + 1] - values[i]);
}

double default_dt(double omega_max) { return kPi / (8.0 * std::max(omega_max, 2000.0)); }

Spectrum absorption(const LineshapeSeries& g, const FftOptions& fft) {
    const std::size_t N = g.g.size();
    if (N < 2 || g.t.size() != N) throw ValidationError("absorption: lineshape needs at least two samples");
    const double dt = g.t[1] - g.t[0];
    if (!(dt > 0.0) || g.t[0] != 0.0) throw ValidationError("absorption: lineshape grid must start at 0 with dt > 0");
    for (std::size_t k = 1; k < N; ++k)
        if (std::abs(g.t[k] - double(k) * dt) > 1e-9 * double(k) * dt)
            throw ValidationError("absorption: lineshape grid must be uniform");
    if (fft.gamma_add < 0.0) throw ValidationError("absorption: gamma_add must be >= 0");
    if (fft.zero_pad < 1) throw ValidationError("absorption: zero_pad must be >= 1");
    if (fft.separate_zpl && fft.gamma_add != 0.0)
        throw ValidationError("absorption: separate_zpl requires gamma_add = 0");

    const cplx I(0.0, 1.0);
    std::vector<cplx> s(N);
    for (std::size_t k = 0; k < N; ++k) {
        const double t = g.t[k];
        s[k] = std::exp(-(g.g[k] + I * g.E_lambda * t) - fft.gamma_add * t);
    }
    const double t_max = g.t.back();

    Spectrum out;
    if (fft.separate_zpl) {
        // The plateau of e^{-g̃} is the zero-phonon weight; require it to be settled.
        const cplx plateau = s.back();
        const cplx earlier = s[N - 1 - N / 10];
        if (std::abs(plateau - earlier) > 1e-6)
            throw UnresolvedSpectrum("absorption: e^{-g(t)} has not reached a plateau by t_max = " +
                                     std::to_string(t_max));
        out.delta_weight = plateau.real();
        for (auto& v : s) v -= plateau;
    } else if (fft.window == Window::None) {
        const double tail = std::abs(s.back());
        if (tail > 1e-6)
            throw UnresolvedSpectrum("absorption: |e^{-g(t_max)}| = " + std::to_string(tail) +
                                     " > 1e-6; increase gamma_add, the time window, or use a window function");
    }
    if (fft.window == Window::Hann)
        for (std::size_t k = 0; k < N; ++k) {
            const double c = std::cos(0.5 * kPi * g.t[k] / t_max);
            s[k] *= c * c;
        }

    // Trapezoid weights, then zero pad to P samples: A_j ∝ Re Σ_k s_k e^{+2πi jk/P}.
    const std::size_t P = N * fft.zero_pad;
    fftw_complex* buf = fftw_alloc_complex(P);
    fftw_plan plan;
    {
        std::lock_guard lock(plan_mutex());
        plan = fftw_plan_dft_1d(int(P), buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    for (std::size_t k = 0; k < P; ++k) {
        const cplx v = k < N ? s[k] * (k == 0 ? 0.5 : 1.0) : cplx(0.0);
        buf[k][0] = v.real();
        buf[k][1] = v.imag();
    }
    fftw_execute(plan);

    const double dw = 2.0 * kPi / (double(P) * dt);
    out.domega = dw;
    out.omega0 = -double(P / 2) * dw;
    out.values.resize(P);
    for (std::size_t i = 0; i < P; ++i) {
        // output index i ↔ frequency bin j = i - P/2
        const std::size_t j = (i + P - P / 2) % P;
        out.values[i] = dt * buf[j][0] / kPi;
    }
    {
        std::lock_guard lock(plan_mutex());
        fftw_destroy_plan(plan);
    }
    fftw_free(buf);

    const double raw = trapz(out.values, dw);
    const double target = 2.0 * kPi * (1.0 - out.delta_weight);
    if (!(std::abs(raw) > 0.0)) throw NumericalError("absorption: spectrum has zero area");
    out.normalization = target / raw;
    for (double& v : out.values) v *= out.normalization;
    flag_negative(out);
    return out;
}

Spectrum t0_weak_coupling_spectrum(const SDView& sd, double omega0, double domega, std::size_t count) {
    if (!(domega > 0.0) || count < 2) throw ValidationError("t0_weak_coupling_spectrum: bad grid");
    const double X = huang_rhys(sd);
    if (X >= 1.0)
        throw ValidationError("t0_weak_coupling_spectrum: Huang-Rhys factor X = " + std::to_string(X) +
                              " >= 1 is outside the weak-coupling regime");
    Spectrum out;
    out.omega0 = omega0;
    out.domega = domega;
    out.delta_weight = 1.0 - X;
    out.normalization = 2.0 * kPi;
    out.values.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double w = out.omega(i);
        out.values[i] = w > 0.0 ? out.normalization * sd.J(w) / (kPi * w * w) : 0.0;
    }
    return out;
}

SpectrumDistance compare_spectra(const Spectrum& a, const Spectrum& b) {
    SpectrumDistance d;
    if (a.values.empty()) return d;
    std::vector<double> diff(a.size());
    double amax = 0.0, dmax = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        diff[i] = std::abs(a.values[i] - b.at(a.omega(i)));
        amax = std::max(amax, std::abs(a.values[i]));
        dmax = std::max(dmax, diff[i]);
    }
    d.l1 = (trapz(diff, a.domega) + 2.0 * kPi * std::abs(a.delta_weight - b.delta_weight)) / (2.0 * kPi);
    d.linf = amax > 0.0 ? dmax / amax : dmax;
    d.peak_shift = peak_position(b) - peak_position(a);
    return d;
}

Spectrum resample(const Spectrum& s, double lo, double hi, double step) {
    if (!(hi > lo) || !(step > 0.0)) throw ValidationError("resample: need lo < hi and step > 0");
    Spectrum out;
    out.omega0 = lo;
    out.domega = step;
    out.delta_weight = s.delta_weight;
    out.normalization = s.normalization;
    out.under_resolved = s.under_resolved;
    const std::size_t count = std::size_t(std::floor((hi - lo) / step + 1e-9)) + 1;
    out.values.resize(count);
    for (std::size_t i = 0; i < count; ++i) out.values[i] = s.at(out.omega(i));
    return out;
}

} // namespace bcfkit
