#include "bcfkit/lineshape.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include "bcfkit/error.hpp"
#include "bcfkit/parallel.hpp"
#include "bcfkit/quadrature.hpp"
#include "bcfkit/units.hpp"

namespace bcfkit {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx I(0.0, 1.0);

// FFTW's planner is not reentrant.
std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

// (e^z - 1 - z)/z², accurate for small |z|.
cplx phi2(cplx z) {
    if (std::abs(z) < 0.5) {
        cplx term = 0.5;
        cplx sum = term;
        for (int k = 3; k < 30; ++k) {
            term *= z / double(k);
            sum += term;
            if (std::abs(term) < 1e-17 * std::abs(sum)) break;
        }
        return sum;
    }
    return (std::exp(z) - 1.0 - z) / (z * z);
}

} // namespace

double exponential_reorganization_energy(const ExponentialBCF& bcf) {
    cplx s = 0.0;
    for (const auto& m : bcf.modes) s += I * m.p / m.w;
    return -s.imag();
}

cplx g_exponential_at(const std::vector<Mode>& modes, double t) {
    // p[(e^{iωt}-1)/(iω)² - t/(iω)] = p t² φ2(iωt)
    cplx g = 0.0;
    for (const auto& m : modes) g += m.p * t * t * phi2(I * m.w * t);
    return g;
}

LineshapeSeries g_from_exponential(const ExponentialBCF& bcf, const std::vector<double>& t_grid,
                                   std::optional<double> E_lambda_quadrature) {
    LineshapeSeries out;
    out.source = LineshapeSource::Analytic;
    out.t = t_grid;
    const double drift = exponential_reorganization_energy(bcf);
    out.E_lambda = drift;
    if (E_lambda_quadrature) {
        const double q = *E_lambda_quadrature;
        if (std::abs(q - drift) > 1e-6 * std::abs(q))
            throw NumericalError("reorganization energy mismatch: quadrature " + std::to_string(q) +
                                 " vs exponential drift " + std::to_string(drift));
        out.E_lambda = q;
    }
    out.g.resize(t_grid.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (t_grid[i] < 0.0) throw ValidationError("g_from_exponential: t must be >= 0");
        out.g[i] = g_exponential_at(bcf.modes, t_grid[i]);
    }
    return out;
}

LineshapeSeries g_from_sd_quadrature(const SDView& sd, double T_kelvin, const std::vector<double>& t_grid,
                                     double rel_tol) {
    if (!std::isfinite(T_kelvin) || T_kelvin < 0.0) throw InvalidTemperature("temperature must be >= 0 K");
    const double T = units::kelvin_to_invcm(T_kelvin);
    const auto& J = sd.J;
    const std::function<double(double)> j = [J](double w) { return J(w) / (w * w); };
    std::function<double(double)> h = j;
    if (T > 0.0) h = [J, T](double w) { return J(w) / (w * w * std::tanh(w / (2.0 * T))); };

    LineshapeSeries out;
    out.source = LineshapeSource::Quadrature;
    out.t = t_grid;
    out.E_lambda = reorganization_energy(sd);
    out.g.assign(t_grid.size(), 0.0);
    const double E = out.E_lambda;
    const double t_ref = 1.0 / sd.scale;
    parallel_for(t_grid.size(), [&](std::size_t i) {
        const double t = t_grid[i];
        if (t < 0.0) throw ValidationError("g_from_sd_quadrature: t must be >= 0");
        if (t == 0.0) return;
        quad::Options opts;
        opts.abs_tol = rel_tol * kPi * E * std::max(t, t_ref);
        const auto re = quad::half_fourier(h, t, sd.scale, opts, true, true);
        const auto im = quad::half_fourier(j, t, sd.scale, opts, true);
        out.g[i] = cplx(re.value.real() / kPi, im.value.imag() / kPi - E * t);
    });
    return out;
}

LineshapeSeries g_from_sd_fft(const SDView& sd, double T_kelvin, double dt, std::size_t count) {
    if (!std::isfinite(T_kelvin) || T_kelvin < 0.0) throw InvalidTemperature("temperature must be >= 0 K");
    if (!(dt > 0.0) || count < 2) throw ValidationError("g_from_sd_fft: need dt > 0 and count >= 2");
    const double T = units::kelvin_to_invcm(T_kelvin);
    const double needed = T > 0.0 ? 3.0 : 2.0;
    if (sd.low_exponent < needed)
        throw NotSupported("FFT lineshape needs J/omega^2*coth integrable at omega = 0 (low-frequency exponent >= " +
                           std::to_string(int(needed)) + "); use the exponential route for this density");

    // Frequency grid ω_m = m·dω with dω·dt = 2π/K; K = 2·count keeps the periodic
    // images of the time signal away from the requested window.
    const std::size_t K = 2 * count;
    const double dw = 2.0 * kPi / (double(K) * dt);
    const auto& J = sd.J;

    // h = J coth/ω², j = J/ω²; the ω = 0 sample uses the limit from a tiny ω.
    auto sample = [&](double w, double& h, double& j) {
        const double ww = w > 0.0 ? w : 1e-6 * dw;
        const double Jw = J(ww);
        j = Jw / (ww * ww);
        h = T > 0.0 ? j / std::tanh(ww / (2.0 * T)) : j;
        if (w == 0.0) j = 0.0;  // j is odd: contributes nothing to the sine transform
    };

    std::vector<double> hs(K), js(K);
    parallel_for(K, [&](std::size_t m) {
        double h, j;
        sample(double(m) * dw, h, j);
        const double wgt = m == 0 ? 0.5 : 1.0;
        hs[m] = wgt * h;
        js[m] = wgt * j;
    });

    const std::size_t nc = K / 2 + 1;
    fftw_complex* H = fftw_alloc_complex(nc);
    fftw_complex* Jc = fftw_alloc_complex(nc);
    fftw_plan ph, pj;
    {
        std::lock_guard lock(fftw_mutex());
        ph = fftw_plan_dft_r2c_1d(int(K), hs.data(), H, FFTW_ESTIMATE);
        pj = fftw_plan_dft_r2c_1d(int(K), js.data(), Jc, FFTW_ESTIMATE);
    }
    // r2c plans with ESTIMATE may scribble on the inputs; take what we need first.
    double H0 = 0.0;
    for (double v : hs) H0 += v;
    fftw_execute(ph);
    fftw_execute(pj);

    LineshapeSeries out;
    out.source = LineshapeSource::Fft;
    out.E_lambda = reorganization_energy(sd);
    out.t.resize(count);
    out.g.resize(count);
    for (std::size_t k = 0; k < count; ++k) {
        const double t = double(k) * dt;
        // Σ f_m e^{-iω_m t_k}: real part → ∫ f cos, minus imaginary part → ∫ f sin.
        const double cos_h = H[k][0];
        const double sin_j = -Jc[k][1];
        out.t[k] = t;
        out.g[k] = cplx(dw * (H0 - cos_h) / kPi, dw * sin_j / kPi - out.E_lambda * t);
    }
    {
        std::lock_guard lock(fftw_mutex());
        fftw_destroy_plan(ph);
        fftw_destroy_plan(pj);
    }
    fftw_free(H);
    fftw_free(Jc);
    return out;
}

} // namespace bcfkit
