#include "bcfkit/cothexp.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "bcfkit/error.hpp"
#include "bcfkit/tridiag.hpp"

namespace bcfkit {

std::string to_string(CothScheme s) {
    switch (s) {
    case CothScheme::Matsubara: return "matsubara";
    case CothScheme::Pade: return "pade";
    case CothScheme::ZeroTemperature: return "zero";
    case CothScheme::CroySaalmann: return "croy_saalmann";
    }
    return "unknown";
}

CothScheme parse_coth_scheme(const std::string& name) {
    if (name == "matsubara") return CothScheme::Matsubara;
    if (name == "pade") return CothScheme::Pade;
    if (name == "zero" || name == "zero_temperature") return CothScheme::ZeroTemperature;
    if (name == "croy_saalmann") return CothScheme::CroySaalmann;
    throw ValidationError("unknown coth scheme '" + name + "' (expected pade, matsubara or zero)");
}

CothExpansion matsubara(int L) {
    if (L < 1) throw ValidationError("matsubara: L must be >= 1");
    CothExpansion c{CothScheme::Matsubara, {}, true};
    for (int l = 1; l <= L; ++l) c.terms.push_back({{0.0, std::numbers::pi * l}, 1.0});
    return c;
}

namespace {

// The `count` largest eigenvalues (descending) of the zero-diagonal tridiagonal
// matrix with off-diagonal 1/sqrt((2j+offset)(2j+offset+2)), j = 1..dim-1. The
// spectrum is symmetric about 0 (plus an exact 0 for odd dim), so these are the
// positive ones.
std::vector<double> positive_eigenvalues(int dim, int offset, int count) {
    if (dim <= 1 || count <= 0) return {};
    std::vector<double> off(dim - 1);
    for (int j = 1; j < dim; ++j) off[j - 1] = 1.0 / std::sqrt(double(2 * j + offset) * double(2 * j + offset + 2));
    auto ev = tridiag::eigenvalues(std::vector<double>(dim, 0.0), off);
    std::sort(ev.rbegin(), ev.rend());
    ev.resize(count);
    if (ev.back() <= 0.0) throw NumericalError("pade: expected positive eigenvalues");
    return ev;
}

} // namespace

CothExpansion pade(int L) {
    if (L < 1) throw ValidationError("pade: L must be >= 1");
    // Eigenvalues come in ± pairs; ξ = i/λ for λ > 0 (largest λ → pole nearest the origin).
    const auto lam = positive_eigenvalues(2 * L, 1, L);
    const auto lam_t = positive_eigenvalues(2 * L - 1, 3, L - 1);
    if (static_cast<int>(lam.size()) != L || static_cast<int>(lam_t.size()) != L - 1)
        throw NumericalError("pade: unexpected eigenvalue count");

    // With ξ_j = i·s_j (s_j = 1/λ_j) and ζ_i = 1/λ̃_i:
    //   ζ_i² + ξ_j² = ζ_i² - s_j²,   ξ_j² - ξ_i² = s_i² - s_j².
    std::vector<double> s(L), z(L - 1);
    for (int j = 0; j < L; ++j) s[j] = 1.0 / lam[j];
    for (int i = 0; i < L - 1; ++i) z[i] = 1.0 / lam_t[i];

    CothExpansion c{CothScheme::Pade, {}, true};
    const double pref = 0.5 * L * (2.0 * L + 3.0);
    const bool log_space = L > 12;
    for (int j = 0; j < L; ++j) {
        double eta;
        if (log_space) {
            double log_mag = std::log(pref);
            int sign = 1;
            for (int i = 0; i < L - 1; ++i) {
                const double f = z[i] * z[i] - s[j] * s[j];
                log_mag += std::log(std::abs(f));
                if (f < 0) sign = -sign;
            }
            for (int i = 0; i < L; ++i) {
                if (i == j) continue;
                const double f = s[i] * s[i] - s[j] * s[j];
                log_mag -= std::log(std::abs(f));
                if (f < 0) sign = -sign;
            }
            eta = sign * std::exp(log_mag);
        } else {
            double num = 1.0, den = 1.0;
            for (int i = 0; i < L - 1; ++i) num *= z[i] * z[i] - s[j] * s[j];
            for (int i = 0; i < L; ++i)
                if (i != j) den *= s[i] * s[i] - s[j] * s[j];
            eta = pref * num / den;
        }
        if (!(eta > 0.0)) throw NumericalError("pade: non-positive residue encountered");
        c.terms.push_back({{0.0, s[j]}, eta});
    }
    std::sort(c.terms.begin(), c.terms.end(), [](const CothPole& a, const CothPole& b) { return a.xi.imag() < b.xi.imag(); });
    return c;
}

CothExpansion zero_temperature() { return CothExpansion{CothScheme::ZeroTemperature, {}, false}; }

CothExpansion make_expansion(CothScheme scheme, int L) {
    switch (scheme) {
    case CothScheme::Matsubara: return matsubara(L);
    case CothScheme::Pade: return pade(L);
    case CothScheme::ZeroTemperature: return zero_temperature();
    case CothScheme::CroySaalmann:
        throw NotSupported("croy_saalmann: the partial-fraction scheme needs high-precision root finding and "
                           "has no constructive formula here; use pade or matsubara");
    }
    throw ValidationError("unknown coth scheme");
}

std::complex<double> eval_expansion(const CothExpansion& c, std::complex<double> x) {
    if (c.scheme == CothScheme::ZeroTemperature) return 1.0;
    if (c.has_head && std::abs(x) <= 1e-12) throw PoleCollision("eval_expansion: argument at the pole x = 0");
    std::complex<double> sum = c.has_head ? 1.0 / x : 0.0;
    for (const auto& t : c.terms) {
        if (std::abs(x - t.xi) <= 1e-12 || std::abs(x - std::conj(t.xi)) <= 1e-12)
            throw PoleCollision("eval_expansion: argument coincides with an expansion pole");
        sum += t.eta * (1.0 / (x - t.xi) + 1.0 / (x - std::conj(t.xi)));
    }
    return sum;
}

double expansion_error(const CothExpansion& c, double x_lo, double x_hi) {
    if (!(x_lo > 0.0) || !(x_hi > x_lo)) throw ValidationError("expansion_error: need 0 < x_lo < x_hi");
    constexpr int kPoints = 10000;
    const double a = std::log(x_lo), b = std::log(x_hi);
    double worst = 0.0;
    for (int i = 0; i < kPoints; ++i) {
        const double x = std::exp(a + (b - a) * i / (kPoints - 1));
        const double exact = 1.0 / std::tanh(x);
        const double approx = eval_expansion(c, x).real();
        worst = std::max(worst, std::abs(approx - exact) / exact);
    }
    return worst;
}

} // namespace bcfkit
