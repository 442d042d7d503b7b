#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bcfkit/bcf.hpp"
#include "bcfkit/error.hpp"
#include "bcfkit/units.hpp"

using namespace bcfkit;
using std::numbers::pi;

namespace {

FitSDModel damped_mode_fit() { return FitSDModel(5, {PoleTerm{1.27e4, {{183, 9.17}, {67.6, 178}, {1.76, 11.1}}}}); }

FitSDModel random_small_model(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> nd(0, 2);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const int n = 1 + 2 * nd(rng);
    const int kmin = (n + 1) / 2 + 1;  // keeps J ~ ω^{-3} or faster
    const int k = std::min(3, kmin + int(U(rng) * (4 - kmin)));
    PoleTerm t;
    t.p = 1.0 + 100.0 * U(rng);
    for (int j = 0; j < k; ++j) t.poles.emplace_back(20.0 + 300.0 * U(rng), 10.0 + 100.0 * U(rng));
    return FitSDModel(n, {t});
}

} // namespace

TEST_SUITE("bcf") {
    TEST_CASE("single Lorentzian: b(t) closed form") {
        std::mt19937_64 rng(1);
        std::uniform_real_distribution<double> U(0.0, 1.0);
        for (int i = 0; i < 100; ++i) {
            const double Om = 1.0 + 500.0 * U(rng), ga = 1.0 + 200.0 * U(rng), p = 0.1 + 1000.0 * U(rng);
            const double t = 0.05 * U(rng);
            const auto bcf = decompose(FitSDModel(1, {PoleTerm{p, {{Om, ga}}}}), zero_temperature(), 0.0);
            const double ref = -(p / ga) * std::sin(Om * t) * std::exp(-ga * t);
            CHECK(std::abs(eval_exponential(bcf, t).imag() - ref) <= 1e-12 * std::max(1.0, p / ga));
        }
    }

    TEST_CASE("single Lorentzian: b(t) against the quadrature oracle") {
        const FitSDModel m(1, {PoleTerm{50.0, {{120.0, 30.0}}}});
        const auto bcf = decompose(m, zero_temperature(), 0.0);
        for (double t : {0.0, 0.003, 0.02, 0.07}) {
            const auto ex = exact_bcf(m, 0.0, t);
            CHECK(eval_exponential(bcf, t).imag() == doctest::Approx(ex.imag()).epsilon(1e-6).scale(1.0));
        }
    }

    TEST_CASE("coth-pole weight carries the 2T residue factor") {
        // Without the 2T factor the damped-mode model misses the oracle by ~3% at 77 K.
        const auto m = damped_mode_fit();
        const auto bcf = decompose(m, pade(2), 77.0);
        const auto ex0 = exact_bcf(m, 77.0, 0.0);
        CHECK(std::abs(eval_exponential(bcf, 0.0) - ex0) <= 1e-3 * std::abs(ex0));
    }

    TEST_CASE("mode counts M = 2κ + L") {
        const auto m = damped_mode_fit();
        CHECK(decompose(m, pade(11), 4.0).size() == 17);
        CHECK(decompose(m, pade(2), 77.0).size() == 8);
        CHECK(decompose(m, pade(1), 300.0).size() == 7);
        CHECK(decompose(m, matsubara(4), 300.0).size() == 10);
        CHECK(decompose(m, zero_temperature(), 0.0).size() == 6);
    }

    TEST_CASE("every mode decays; zero-temperature modes at +ω_j vanish") {
        const auto m = damped_mode_fit();
        for (const auto& bcf : {decompose(m, pade(11), 4.0), decompose(m, matsubara(3), 300.0)})
            for (const auto& md : bcf.modes) CHECK(md.w.imag() > 0.0);
        const auto z = decompose(m, zero_temperature(), 0.0);
        for (std::size_t i = 0; i < z.modes.size(); i += 2) CHECK(std::abs(z.modes[i].p) == 0.0);
    }

    TEST_CASE("alpha(0) = sum of prefactors matches the oracle") {
        const auto m = damped_mode_fit();
        for (auto [T, L] : {std::pair{4.0, 11}, {77.0, 2}, {300.0, 1}}) {
            const auto bcf = decompose(m, pade(L), T);
            std::complex<double> sum = 0.0;
            for (const auto& md : bcf.modes) sum += md.p;
            CHECK(std::abs(sum - eval_exponential(bcf, 0.0)) < 1e-12 * std::abs(sum));
            const auto ex = exact_bcf(m, T, 0.0);
            CHECK(std::abs(sum - ex) <= 1e-3 * std::abs(ex));
        }
    }

    TEST_CASE("exponential evaluation basics") {
        ExponentialBCF one;
        one.modes.push_back({1.0, {0.0, 1.0}});
        CHECK(std::abs(eval_exponential(one, 1.0) - std::exp(-1.0)) < 1e-15);
        CHECK(std::abs(eval_exponential(one, 200.0)) < 1e-80);
        CHECK_THROWS_AS(eval_exponential(one, -1.0), ValidationError);
        const auto bcf = decompose(damped_mode_fit(), pade(2), 77.0);
        for (double t : {0.01, 0.1, 1.3}) {
            const auto a = extend_negative_time(bcf, t), b = extend_negative_time(bcf, -t);
            CHECK(b == std::conj(a));
        }
    }

    TEST_CASE("exact BCF: Im alpha(0) = 0 and the classical limit") {
        // High temperature: coth(x) → 1/x, so α(0) → (1/π)∫ J·2T/ω = 2T·E_λ.
        // (The Drude–Lorentz tail J ~ 1/ω makes ∫J coth diverge, so the exponential cutoff is used.)
        const ReferenceSD oe(OhmicExp{0.3, 100.0});
        const double T_kelvin = 50.0 * 100.0 / units::kBoltzmannInvCmPerKelvin;
        const double T = units::kelvin_to_invcm(T_kelvin);
        const auto a0 = exact_bcf(view(oe), T_kelvin, 0.0);
        CHECK(a0.imag() == 0.0);
        CHECK(a0.real() == doctest::Approx(2.0 * T * reorganization_energy(oe)).epsilon(2e-3));
        const auto a1 = exact_bcf(view(oe), T_kelvin, 0.01), a2 = exact_bcf(view(oe), T_kelvin, -0.01);
        CHECK(std::abs(a2 - std::conj(a1)) < 1e-12 * std::abs(a1));
        CHECK_THROWS_AS(exact_bcf(view(ReferenceSD(DrudeLorentz{35.0, 53.0})), 300.0, 0.0), Divergence);
    }

    TEST_CASE("b(t) does not depend on the coth expansion") {
        std::mt19937_64 rng(21);
        for (int i = 0; i < 10; ++i) {
            const auto m = random_small_model(rng);
            const auto ref = decompose(m, matsubara(3), 300.0);
            for (const auto& other : {decompose(m, pade(1), 300.0), decompose(m, pade(9), 77.0),
                                      decompose(m, matsubara(20), 4.0), decompose(m, zero_temperature(), 0.0)}) {
                for (double t : {0.0, 0.004, 0.03, 0.2}) {
                    const double a = eval_exponential(ref, t).imag(), b = eval_exponential(other, t).imag();
                    CHECK(std::abs(a - b) <= 1e-10 * std::max(1.0, std::abs(a)));
                }
            }
        }
    }

    TEST_CASE("components are real") {
        std::mt19937_64 rng(8);
        for (int i = 0; i < 10; ++i) {
            const auto m = random_small_model(rng);
            const auto c = decompose_components(m, pade(4), 77.0);
            for (double t : {0.0, 0.01, 0.1}) {
                const auto a = eval_modes(c.a_modes, t), b = eval_modes(c.b_modes, t);
                CHECK(std::abs(a.imag()) <= 1e-10 * std::max(1e-300, std::abs(a.real())) + 1e-300);
                CHECK(std::abs(b.imag()) <= 1e-10 * std::max(1e-300, std::abs(b.real())) + 1e-300);
            }
        }
    }

    TEST_CASE("decay bound") {
        const auto bcf = decompose(damped_mode_fit(), pade(11), 4.0);
        double sum = 0.0;
        for (const auto& md : bcf.modes) sum += std::abs(md.p);
        for (double t = 0.0; t < 2.0; t += 0.01)
            CHECK(std::abs(eval_exponential(bcf, t)) <= sum * std::exp(-bcf.min_decay() * t) * (1.0 + 1e-12));
    }

    TEST_CASE("oracle equivalence for random small models") {
        std::mt19937_64 rng(99);
        const std::pair<double, int> points[] = {{4.0, 11}, {77.0, 2}, {300.0, 1}};
        std::vector<double> ts;
        for (int i = 0; i <= 40; ++i) ts.push_back(0.2 * i / 40);
        for (int i = 0; i < 20; ++i) {
            const auto m = random_small_model(rng);
            const auto [T, L] = points[i % 3];
            const auto bcf = decompose(m, pade(L), T);
            const auto ex = exact_bcf(view(m), T, ts);
            double worst = 0.0;
            for (std::size_t k = 0; k < ts.size(); ++k)
                worst = std::max(worst, std::abs(eval_exponential(bcf, ts[k]) - ex[k]));
            CHECK(worst / std::abs(ex[0]) <= 1e-2);
        }
    }

    TEST_CASE("error paths") {
        const auto m = damped_mode_fit();
        CHECK_THROWS_AS(decompose(m, pade(2), 0.0), InvalidTemperature);
        CHECK_THROWS_AS(decompose(m, pade(2), -5.0), InvalidTemperature);
        const auto warm = decompose(m, zero_temperature(), 300.0);
        CHECK(!warm.warnings.empty());
        CHECK(!decompose(m, pade(2), 0.5).warnings.empty());  // 2πT below the narrowest pole
        // SD pole placed on the first Matsubara pole 2T·iπ
        const double T = units::kelvin_to_invcm(1.0);
        const FitSDModel bad(1, {PoleTerm{1.0, {{1e-9, 2.0 * pi * T}}}});
        CHECK_THROWS_AS(decompose(bad, matsubara(2), 1.0), PoleCollision);
    }
}
