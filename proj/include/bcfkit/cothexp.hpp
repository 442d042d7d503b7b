// cothexp.hpp — finite pole expansions of coth(x)
//
//   C(x) = [1/x] + Σ_ℓ η_ℓ (1/(x - ξ_ℓ) + 1/(x - ξ_ℓ*)),   Im ξ_ℓ > 0.

#pragma once

#include <complex>
#include <string>
#include <vector>

namespace bcfkit {

enum class CothScheme { Matsubara, Pade, ZeroTemperature, CroySaalmann };

std::string to_string(CothScheme s);
CothScheme parse_coth_scheme(const std::string& name);  // "matsubara" | "pade" | "zero"

struct CothPole {
    std::complex<double> xi;
    double eta;
};

struct CothExpansion {
    CothScheme scheme = CothScheme::ZeroTemperature;
    std::vector<CothPole> terms;
    bool has_head = false;

    int L() const noexcept { return static_cast<int>(terms.size()); }
};

CothExpansion matsubara(int L);
CothExpansion pade(int L);
CothExpansion zero_temperature();
// Builds the requested scheme; L is ignored for ZeroTemperature.
CothExpansion make_expansion(CothScheme scheme, int L);

// ZeroTemperature evaluates to 1 (the x > 0 branch of coth ≈ 1).
std::complex<double> eval_expansion(const CothExpansion& c, std::complex<double> x);

// max |C(x) - coth(x)| / coth(x) over a 10^4-point log grid on [x_lo, x_hi].
double expansion_error(const CothExpansion& c, double x_lo, double x_hi);

} // namespace bcfkit
