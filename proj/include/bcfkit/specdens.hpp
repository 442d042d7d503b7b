// specdens.hpp — spectral densities: the simple-pole fit family and analytic references

#pragma once

#include <complex>
#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace bcfkit {

using cplx = std::complex<double>;

// One weighted product of simple poles, ω_j = Ω_j + iγ_j with Ω_j, γ_j > 0.
struct PoleTerm {
    double p = 1.0;
    std::vector<cplx> poles;
};

// J(ω) = ω^{n-1} Σ_k p_k (J_k(ω) - J_k(-ω)),  J_k(ω) = Π_j 1/((ω-ω_j)(ω-ω_j*)).
class FitSDModel {
public:
    FitSDModel(int n, std::vector<PoleTerm> terms);

    int n() const noexcept { return n_; }
    const std::vector<PoleTerm>& terms() const noexcept { return terms_; }

    double operator()(double w) const;
    // Analytic continuation of J to complex frequency (same formula).
    cplx operator()(cplx z) const;

    int total_poles() const noexcept;
    int min_poles() const noexcept;
    double scale() const noexcept;  // largest |ω_j|
    double min_gamma() const noexcept;
    FitSDModel scaled(double c) const;

private:
    int n_;
    std::vector<PoleTerm> terms_;
};

double eval_fit_sd(const FitSDModel& model, double w);

// (low, high): J ~ ω^low near 0 and ~ ω^high as ω → ∞.
std::pair<int, int> tail_exponents(const FitSDModel& model);

struct DrudeLorentz {
    double lambda, gamma;
};
struct OhmicExp {
    double eta, Lambda;
};
struct LogNormal {
    double S, sigma, omega_c;
};
struct DampedVibration {
    double eta, Lambda, Omega, X;
};
// Sampled SD on an increasing grid; linear interpolation inside, zero outside.
struct Tabulated {
    std::vector<double> omega, J;
};

class ReferenceSD;
struct SumSD {
    std::vector<ReferenceSD> parts;
};

class ReferenceSD {
public:
    using Variant = std::variant<DrudeLorentz, OhmicExp, LogNormal, DampedVibration, Tabulated, SumSD>;

    ReferenceSD(Variant v);

    const Variant& variant() const noexcept { return v_; }
    std::string kind() const;

    // Value for ω > 0; odd continuation for ω ≤ 0 except LogNormal/Tabulated,
    // which throw DomainError for ω ≤ 0.
    double operator()(double w) const;

    // Power of ω at the origin (infinity for log-normal and tabulated data).
    double low_frequency_exponent() const;
    double scale() const;
    ReferenceSD scaled(double c) const;

private:
    Variant v_;
};

double eval_reference_sd(const ReferenceSD& sd, double w);

// Uniform view used by the integral-based routines: J on ω > 0 (0 for ω ≤ 0),
// its low-frequency exponent and a characteristic frequency.
struct SDView {
    std::function<double(double)> J;
    double low_exponent = 1.0;
    double scale = 1.0;
};

SDView view(const FitSDModel& model);
SDView view(const ReferenceSD& sd);

// E_λ = (1/π) ∫_0^∞ J(ω)/ω dω.
double reorganization_energy(const SDView& sd);
// X = (1/π) ∫_0^∞ J(ω)/ω² dω; Divergence for ohmic (exponent 1) densities.
double huang_rhys(const SDView& sd);

template <class SD>
double reorganization_energy(const SD& sd) {
    return reorganization_energy(view(sd));
}
template <class SD>
double huang_rhys(const SD& sd) {
    return huang_rhys(view(sd));
}

} // namespace bcfkit
