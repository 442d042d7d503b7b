// bcf.hpp — bath correlation function: exponential decomposition and quadrature oracle
//
//   α(t) = (1/π) ∫_0^∞ J(ω) [coth(ω/2T) cos ωt - i sin ωt] dω = a(t) + i b(t)

#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "bcfkit/cothexp.hpp"
#include "bcfkit/specdens.hpp"

namespace bcfkit {

// One term p·e^{iωt}; Im ω > 0 so every term decays.
struct Mode {
    cplx p;
    cplx w;
};

struct BCFSource {
    std::uint64_t model_hash = 0;
    CothScheme scheme = CothScheme::ZeroTemperature;
    int L = 0;
};

struct ExponentialBCF {
    std::vector<Mode> modes;
    double T_kelvin = 0.0;
    BCFSource source;
    std::vector<std::string> warnings;

    std::size_t size() const noexcept { return modes.size(); }
    double min_decay() const;  // min Im ω_m
};

// Real-valued parts: a(t) = Σ a_modes p e^{iωt} and b(t) likewise, each real for real t.
struct BCFComponents {
    std::vector<Mode> a_modes;
    std::vector<Mode> b_modes;
    std::vector<std::string> warnings;
};

std::uint64_t model_hash(const FitSDModel& model);

BCFComponents decompose_components(const FitSDModel& model, const CothExpansion& coth, double T_kelvin);

// Modes in the order: for each term and each SD pole ω_j, the pair (ω_j, -ω_j*);
// then one mode per coth pole. M = 2κ_total + L.
ExponentialBCF decompose(const FitSDModel& model, const CothExpansion& coth, double T_kelvin);

// Σ p_m e^{iω_m t} for t ≥ 0.
cplx eval_exponential(const ExponentialBCF& bcf, double t);
cplx eval_modes(const std::vector<Mode>& modes, double t);
// α(t) for any real t using α(-t) = α(t)*.
cplx extend_negative_time(const ExponentialBCF& bcf, double t);

// Direct quadrature of the defining integral (T = 0 replaces coth by 1).
// Absolute target rel_tol·|α(0)|.
cplx exact_bcf(const SDView& sd, double T_kelvin, double t, double rel_tol = 1e-9);
std::vector<cplx> exact_bcf(const SDView& sd, double T_kelvin, const std::vector<double>& ts, double rel_tol = 1e-9);

template <class SD>
cplx exact_bcf(const SD& sd, double T_kelvin, double t) {
    return exact_bcf(view(sd), T_kelvin, t);
}

} // namespace bcfkit
