#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bcfkit/bcf.hpp"
#include "bcfkit/error.hpp"
#include "bcfkit/fitting.hpp"
#include "bcfkit/spectra.hpp"

using namespace bcfkit;

namespace {

constexpr double kPi = std::numbers::pi;

LineshapeSeries zero_g(double dt, std::size_t n) {
    LineshapeSeries g;
    g.t.resize(n);
    g.g.assign(n, cplx(0.0));
    for (std::size_t k = 0; k < n; ++k) g.t[k] = dt * double(k);
    return g;
}

// Spectrum of an exponential BCF against the FFT-route spectrum of the reference SD.
double fit_vs_exact_l1(const FitSDModel& fit, const ReferenceSD& ref, double T, int L) {
    FftOptions o;
    o.n_points = std::size_t(1) << 18;
    o.dt = default_dt(std::max(fit.scale(), view(ref).scale));
    std::vector<double> t(o.n_points);
    for (std::size_t k = 0; k < t.size(); ++k) t[k] = o.dt * double(k);
    const auto exact = absorption(g_from_sd_fft(view(ref), T, o.dt, o.n_points), o);
    const auto approx = absorption(g_from_exponential(decompose(fit, pade(L), T), t), o);
    CHECK(approx.area() == doctest::Approx(2.0 * kPi).epsilon(1e-3));
    return compare_spectra(exact, approx).l1;
}

} // namespace

TEST_SUITE("spectra") {
    TEST_CASE("g = 0 gives a Lorentzian of half width gamma_add") {
        FftOptions o;
        o.gamma_add = 10.0;
        const auto s = absorption(zero_g(1e-3, 1 << 14), o);
        CHECK(s.area() == doctest::Approx(2.0 * kPi).epsilon(1e-12));
        CHECK(s.normalization == doctest::Approx(2.0 * kPi).epsilon(1e-3));
        CHECK(s.delta_weight == 0.0);
        CHECK_FALSE(s.under_resolved);
        // 2π · (1/π) γ/(γ² + ω²)
        for (double w : {0.0, 5.0, 10.0, 30.0, -20.0}) {
            const double ref = 2.0 * 10.0 / (100.0 + w * w);
            CHECK(s.at(w) == doctest::Approx(ref).epsilon(2e-3));
        }
        CHECK(s.at(10.0) == doctest::Approx(0.5 * s.at(0.0)).epsilon(2e-3));
    }

    TEST_CASE("reorganization energy shifts nothing once folded into g") {
        // g = -iE t (pure drift) is removed by centring: the line stays at 0
        auto g = zero_g(1e-3, 1 << 14);
        g.E_lambda = 50.0;
        for (std::size_t k = 0; k < g.t.size(); ++k) g.g[k] = cplx(0.0, -g.E_lambda * g.t[k]);
        FftOptions o;
        o.gamma_add = 10.0;
        const auto s = absorption(g, o);
        const auto ref = absorption(zero_g(1e-3, 1 << 14), o);
        const auto d = compare_spectra(ref, s);
        CHECK(d.l1 <= 1e-12);
        CHECK(std::abs(d.peak_shift) <= 1e-9);
    }

    TEST_CASE("a frequency offset moves the peak") {
        auto g = zero_g(1e-3, 1 << 14);
        for (std::size_t k = 0; k < g.t.size(); ++k) g.g[k] = cplx(0.0, 25.0 * g.t[k]);  // e^{-g} = e^{-25it}: line at +25
        FftOptions o;
        o.gamma_add = 10.0;
        const auto s = absorption(g, o), ref = absorption(zero_g(1e-3, 1 << 14), o);
        const auto d = compare_spectra(ref, s);
        CHECK(d.peak_shift == doctest::Approx(25.0).epsilon(1e-3));
        CHECK(d.l1 > 0.1);
        CHECK(compare_spectra(ref, ref).l1 <= 1e-12);
        CHECK(compare_spectra(ref, ref).linf <= 1e-12);
        CHECK(compare_spectra(ref, ref).peak_shift == 0.0);
    }

    TEST_CASE("truncated signal is rejected unless windowed") {
        FftOptions o;
        o.gamma_add = 0.1;
        const auto g = zero_g(1e-3, 1 << 12);
        CHECK_THROWS_AS(absorption(g, o), UnresolvedSpectrum);
        o.window = Window::Hann;
        const auto s = absorption(g, o);
        CHECK(s.area() == doctest::Approx(2.0 * kPi).epsilon(1e-12));
        FftOptions z;
        z.gamma_add = 1.0;
        z.separate_zpl = true;
        CHECK_THROWS_AS(absorption(g, z), ValidationError);
    }

    TEST_CASE("zero-phonon separation") {
        // g = X(1 - e^{-ct}): plateau e^{-X}
        auto g = zero_g(1e-3, 1 << 15);
        const double X = 0.2, c = 40.0;
        for (std::size_t k = 0; k < g.t.size(); ++k) g.g[k] = X * -std::expm1(-c * g.t[k]);
        FftOptions o;
        o.gamma_add = 0.0;
        o.separate_zpl = true;
        const auto s = absorption(g, o);
        CHECK(s.delta_weight == doctest::Approx(std::exp(-X)).epsilon(1e-12));
        CHECK(s.area() == doctest::Approx(2.0 * kPi).epsilon(1e-12));
    }

    TEST_CASE("weak-coupling T = 0 spectrum") {
        const ReferenceSD ln(LogNormal{0.3, 0.7, 38.0});
        const auto s = t0_weak_coupling_spectrum(view(ln), -100.0, 0.5, 20001);
        CHECK(s.delta_weight == doctest::Approx(0.7).epsilon(1e-8));
        CHECK(s.area() == doctest::Approx(2.0 * kPi).epsilon(1e-4));
        CHECK(s.at(-10.0) == 0.0);
        CHECK_THROWS_AS(t0_weak_coupling_spectrum(view(ReferenceSD(LogNormal{1.5, 0.7, 38.0})), 0.0, 1.0, 10),
                        ValidationError);
    }

    TEST_CASE("resampling") {
        Spectrum s;
        s.omega0 = 0.0;
        s.domega = 1.0;
        s.values = {0.0, 1.0, 2.0, 3.0};
        const auto r = resample(s, 0.5, 2.5, 0.5);
        REQUIRE(r.size() == 5);
        CHECK(r.values[0] == doctest::Approx(0.5));
        CHECK(r.values[4] == doctest::Approx(2.5));
        CHECK(s.at(5.0) == 0.0);
        CHECK_THROWS_AS(resample(s, 1.0, 0.0, 0.1), ValidationError);
        CHECK(default_dt(100.0) == doctest::Approx(kPi / 16000.0));
    }

    TEST_CASE("damped-mode fits reproduce the exact spectrum at 77 K") {
        const ReferenceSD dv(DampedVibration{0.3, 100.0, 180.0, 0.03});
        const FitSDModel published(5, {PoleTerm{1.27e4, {{183, 9.17}, {67.6, 178}, {1.76, 11.1}}}});
        CHECK(fit_vs_exact_l1(published, dv, 77.0, 2) <= 0.02);
        FitConfig cfg;
        cfg.n = 3;
        cfg.poles_per_term = {3};
        CHECK(fit_vs_exact_l1(fit_sd(dv, cfg).model, dv, 77.0, 2) <= 0.02);
    }

    TEST_CASE("ohmic fit of the log-normal SD misses the spectrum") {
        const ReferenceSD ln(LogNormal{0.3, 0.7, 38.0});
        FitConfig c1;
        c1.n = 1;
        c1.poles_per_term = {2, 2, 2, 2};
        FitConfig c5;
        c5.n = 5;
        c5.poles_per_term = {3};
        const auto f1 = fit_sd(ln, c1).model, f5 = fit_sd(ln, c5).model;
        CHECK(fit_vs_exact_l1(f1, ln, 4.0, 11) > fit_vs_exact_l1(f5, ln, 4.0, 15));
        CHECK(fit_vs_exact_l1(f1, ln, 77.0, 2) > 0.1);
    }
}

TEST_SUITE("spectra_high_temperature") {
    TEST_CASE("ohmic fit of the log-normal SD misses the 300 K spectrum") {
        const ReferenceSD ln(LogNormal{0.3, 0.7, 38.0});
        FitConfig c1;
        c1.n = 1;
        c1.poles_per_term = {2, 2, 2, 2};
        CHECK(fit_vs_exact_l1(fit_sd(ln, c1).model, ln, 300.0, 1) > 0.1);
    }
}
