#include "bcfkit/specdens.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "bcfkit/error.hpp"
#include "bcfkit/quadrature.hpp"
#include "bcfkit/special.hpp"

namespace bcfkit {

namespace {

constexpr double kPi = std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError(std::string(what) + " must be positive and finite");
}

// J_k(ω) - J_k(-ω) for real ω. With a_j = D_j(-ω), b_j = D_j(ω) and
// D_j(x) = (x-Ω_j)² + γ_j², telescoping Π b - Π a gives
//   Σ_j 4ωΩ_j / (Π_{i≥j} a_i · Π_{i≤j} b_i),
// so a_j - b_j = 4ωΩ_j appears explicitly and nothing cancels near ω = 0.
// Working with reciprocals means large ω underflows instead of overflowing.
double antisym_term(const PoleTerm& term, double w) {
    const std::size_t k = term.poles.size();
    std::vector<double> inv_a(k), inv_b(k);
    for (std::size_t j = 0; j < k; ++j) {
        const double om = term.poles[j].real(), ga = term.poles[j].imag();
        inv_a[j] = 1.0 / ((w + om) * (w + om) + ga * ga);
        inv_b[j] = 1.0 / ((w - om) * (w - om) + ga * ga);
    }
    // suffix products of inv_a
    std::vector<double> tail_a(k + 1, 1.0);
    for (std::size_t j = k; j-- > 0;) tail_a[j] = tail_a[j + 1] * inv_a[j];
    double sum = 0.0;
    double head_b = 1.0;
    for (std::size_t j = 0; j < k; ++j) {
        head_b *= inv_b[j];
        sum += 4.0 * w * term.poles[j].real() * tail_a[j] * head_b;
    }
    return sum;
}

cplx pole_product(const PoleTerm& term, cplx z) {
    cplx prod = 1.0;
    for (const cplx& wj : term.poles) prod *= (z - wj) * (z - std::conj(wj));
    return 1.0 / prod;
}

} // namespace

FitSDModel::FitSDModel(int n, std::vector<PoleTerm> terms) : n_(n), terms_(std::move(terms)) {
    if (n_ < 1) throw ValidationError("n must be a positive odd integer");
    if (n_ % 2 == 0)
        throw ValidationError("n must be odd: for even n the correlation function involves exponential "
                              "integrals and has no finite exponential form");
    if (terms_.empty()) throw ValidationError("model needs at least one term");
    for (std::size_t k = 0; k < terms_.size(); ++k) {
        const auto& t = terms_[k];
        const std::string where = "terms[" + std::to_string(k) + "]";
        if (!(t.p > 0.0) || !std::isfinite(t.p)) throw ValidationError(where + ".p must be positive");
        if (t.poles.empty()) throw ValidationError(where + " has no poles");
        for (std::size_t j = 0; j < t.poles.size(); ++j) {
            const cplx w = t.poles[j];
            if (!(w.real() > 0.0) || !(w.imag() > 0.0) || !std::isfinite(w.real()) || !std::isfinite(w.imag()))
                throw ValidationError(where + ".poles[" + std::to_string(j) +
                                      "] must have positive real and imaginary parts");
            for (std::size_t i = 0; i < j; ++i)
                if (std::abs(t.poles[i] - w) <= 1e-12 * std::abs(w))
                    throw ValidationError(where + " has repeated poles (only simple poles are allowed)");
        }
        const int high = n_ - 2 * static_cast<int>(t.poles.size()) - 2;
        if (high >= 0)
            throw ValidationError(where + ": n - 2*poles - 2 = " + std::to_string(high) +
                                  " must be negative so that J vanishes at high frequency");
    }
}

double FitSDModel::operator()(double w) const {
    double sum = 0.0;
    for (const auto& t : terms_) sum += t.p * antisym_term(t, w);
    return sum == 0.0 ? 0.0 : std::pow(w, n_ - 1) * sum;
}

cplx FitSDModel::operator()(cplx z) const {
    cplx sum = 0.0;
    for (const auto& t : terms_) sum += t.p * (pole_product(t, z) - pole_product(t, -z));
    return std::pow(z, n_ - 1) * sum;
}

int FitSDModel::total_poles() const noexcept {
    int total = 0;
    for (const auto& t : terms_) total += static_cast<int>(t.poles.size());
    return total;
}

int FitSDModel::min_poles() const noexcept {
    int m = std::numeric_limits<int>::max();
    for (const auto& t : terms_) m = std::min(m, static_cast<int>(t.poles.size()));
    return m;
}

double FitSDModel::scale() const noexcept {
    double s = 0.0;
    for (const auto& t : terms_)
        for (const cplx& w : t.poles) s = std::max(s, std::abs(w));
    return s;
}

double FitSDModel::min_gamma() const noexcept {
    double g = std::numeric_limits<double>::infinity();
    for (const auto& t : terms_)
        for (const cplx& w : t.poles) g = std::min(g, w.imag());
    return g;
}

FitSDModel FitSDModel::scaled(double c) const {
    auto terms = terms_;
    for (auto& t : terms) t.p *= c;
    return FitSDModel(n_, std::move(terms));
}

double eval_fit_sd(const FitSDModel& model, double w) { return model(w); }

std::pair<int, int> tail_exponents(const FitSDModel& model) {
    return {model.n(), model.n() - 2 * model.min_poles() - 2};
}

// ---------------------------------------------------------------------------

ReferenceSD::ReferenceSD(Variant v) : v_(std::move(v)) {
    std::visit(overloaded{
                   [](const DrudeLorentz& s) {
                       require_positive(s.lambda, "drude_lorentz.lambda");
                       require_positive(s.gamma, "drude_lorentz.gamma");
                   },
                   [](const OhmicExp& s) {
                       require_positive(s.eta, "ohmic_exp.eta");
                       require_positive(s.Lambda, "ohmic_exp.Lambda");
                   },
                   [](const LogNormal& s) {
                       require_positive(s.S, "log_normal.S");
                       require_positive(s.sigma, "log_normal.sigma");
                       require_positive(s.omega_c, "log_normal.omega_c");
                   },
                   [](const DampedVibration& s) {
                       require_positive(s.eta, "damped_vibration.eta");
                       require_positive(s.Lambda, "damped_vibration.Lambda");
                       require_positive(s.Omega, "damped_vibration.Omega");
                       require_positive(s.X, "damped_vibration.X");
                   },
                   [](const Tabulated& s) {
                       if (s.omega.size() < 2 || s.omega.size() != s.J.size())
                           throw ValidationError("tabulated: omega and J need equal length >= 2");
                       for (std::size_t i = 0; i < s.omega.size(); ++i) {
                           if (!(s.omega[i] > 0.0)) throw ValidationError("tabulated: omega must be positive");
                           if (i > 0 && !(s.omega[i] > s.omega[i - 1]))
                               throw ValidationError("tabulated: omega must be strictly increasing");
                           if (!std::isfinite(s.J[i])) throw ValidationError("tabulated: J must be finite");
                       }
                   },
                   [](const SumSD& s) {
                       if (s.parts.empty()) throw ValidationError("sum: parts must be nonempty");
                   },
               },
               v_);
}

std::string ReferenceSD::kind() const {
    return std::visit(overloaded{
                          [](const DrudeLorentz&) { return std::string("drude_lorentz"); },
                          [](const OhmicExp&) { return std::string("ohmic_exp"); },
                          [](const LogNormal&) { return std::string("log_normal"); },
                          [](const DampedVibration&) { return std::string("damped_vibration"); },
                          [](const Tabulated&) { return std::string("tabulated"); },
                          [](const SumSD&) { return std::string("sum"); },
                      },
                      v_);
}

double ReferenceSD::operator()(double w) const {
    return std::visit(
        overloaded{
            [w](const DrudeLorentz& s) { return 2.0 * kPi * s.lambda * w * s.gamma / (w * w + s.gamma * s.gamma); },
            [w](const OhmicExp& s) { return s.eta * w * std::exp(-std::abs(w) / s.Lambda); },
            [w](const LogNormal& s) {
                if (!(w > 0.0)) throw DomainError("log_normal SD is defined for omega > 0 only");
                const double l = std::log(w / s.omega_c);
                return kPi * s.S * w / (std::sqrt(2.0 * kPi) * s.sigma) * std::exp(-l * l / (2.0 * s.sigma * s.sigma));
            },
            [w](const DampedVibration& s) {
                if (w == 0.0) return 0.0;
                const double x = std::abs(w);
                const double ohm = s.eta * x * std::exp(-x / s.Lambda);
                // J_ohm·Ei(x/Λ) = ηx·e^{-x/Λ}Ei(x/Λ), evaluated without overflow.
                const double g = s.Omega - s.eta * s.Lambda / kPi +
                                 s.eta * x * special::scaled_expint_ei(x / s.Lambda) / kPi;
                const double val = s.X * x * x * ohm / ((x - g) * (x - g) + ohm * ohm);
                return w > 0.0 ? val : -val;
            },
            [w](const Tabulated& s) {
                if (!(w > 0.0)) throw DomainError("tabulated SD is defined for omega > 0 only");
                if (w < s.omega.front() || w > s.omega.back()) return 0.0;
                const auto it = std::upper_bound(s.omega.begin(), s.omega.end(), w);
                if (it == s.omega.end()) return s.J.back();
                const std::size_t i = static_cast<std::size_t>(it - s.omega.begin());
                const double f = (w - s.omega[i - 1]) / (s.omega[i] - s.omega[i - 1]);
                return s.J[i - 1] + f * (s.J[i] - s.J[i - 1]);
            },
            [w](const SumSD& s) {
                double sum = 0.0;
                for (const auto& part : s.parts) sum += part(w);
                return sum;
            },
        },
        v_);
}

double ReferenceSD::low_frequency_exponent() const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return std::visit(overloaded{
                          [](const DrudeLorentz&) { return 1.0; },
                          [](const OhmicExp&) { return 1.0; },
                          [](const LogNormal&) { return inf; },
                          [](const DampedVibration&) { return 3.0; },
                          [](const Tabulated&) { return inf; },
                          [](const SumSD& s) {
                              double m = inf;
                              for (const auto& part : s.parts) m = std::min(m, part.low_frequency_exponent());
                              return m;
                          },
                      },
                      v_);
}

double ReferenceSD::scale() const {
    return std::visit(overloaded{
                          [](const DrudeLorentz& s) { return s.gamma; },
                          [](const OhmicExp& s) { return s.Lambda; },
                          [](const LogNormal& s) { return s.omega_c * std::exp(s.sigma * s.sigma); },
                          [](const DampedVibration& s) { return s.Omega; },
                          [](const Tabulated& s) {
                              const auto it = std::max_element(s.J.begin(), s.J.end());
                              return s.omega[static_cast<std::size_t>(it - s.J.begin())];
                          },
                          [](const SumSD& s) {
                              double m = 0.0;
                              for (const auto& part : s.parts) m = std::max(m, part.scale());
                              return m;
                          },
                      },
                      v_);
}

ReferenceSD ReferenceSD::scaled(double c) const {
    require_positive(c, "scale factor");
    return std::visit(overloaded{
                          [c](DrudeLorentz s) { s.lambda *= c; return ReferenceSD(s); },
                          [c](OhmicExp s) { s.eta *= c; return ReferenceSD(s); },
                          [c](LogNormal s) { s.S *= c; return ReferenceSD(s); },
                          // J_vib is not linear in η; X is the overall strength.
                          [c](DampedVibration s) { s.X *= c; return ReferenceSD(s); },
                          [c](Tabulated s) {
                              for (double& j : s.J) j *= c;
                              return ReferenceSD(s);
                          },
                          [c](SumSD s) {
                              for (auto& part : s.parts) part = part.scaled(c);
                              return ReferenceSD(s);
                          },
                      },
                      v_);
}

double eval_reference_sd(const ReferenceSD& sd, double w) { return sd(w); }

SDView view(const FitSDModel& model) {
    return {[model](double w) { return w > 0.0 ? model(w) : 0.0; }, static_cast<double>(model.n()), model.scale()};
}

SDView view(const ReferenceSD& sd) {
    return {[sd](double w) { return w > 0.0 ? sd(w) : 0.0; }, sd.low_frequency_exponent(), sd.scale()};
}

double reorganization_energy(const SDView& sd) {
    quad::Options opts;
    opts.rel_tol = 1e-10;
    const auto& J = sd.J;
    const auto r = quad::semi_infinite([&J](double w) { return J(w) / w; }, sd.scale, opts);
    if (!r.converged && r.error > 1e-8 * std::abs(r.value))
        throw NoConvergence("reorganization energy quadrature", r.error);
    return r.value / kPi;
}

double huang_rhys(const SDView& sd) {
    if (sd.low_exponent < 2.0)
        throw Divergence("Huang-Rhys factor diverges: J/omega^2 is not integrable at omega -> 0 for an SD "
                         "with low-frequency exponent " +
                         std::to_string(static_cast<int>(sd.low_exponent)));
    quad::Options opts;
    opts.rel_tol = 1e-10;
    const auto& J = sd.J;
    const auto r = quad::semi_infinite([&J](double w) { return J(w) / (w * w); }, sd.scale, opts);
    if (!r.converged && r.error > 1e-8 * std::abs(r.value))
        throw NoConvergence("Huang-Rhys quadrature", r.error);
    return r.value / kPi;
}

} // namespace bcfkit
