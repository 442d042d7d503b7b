#include "bcfkit/bcf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "bcfkit/error.hpp"
#include "bcfkit/hash.hpp"
#include "bcfkit/parallel.hpp"
#include "bcfkit/quadrature.hpp"
#include "bcfkit/units.hpp"

namespace bcfkit {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx I(0.0, 1.0);

// coth(z) for Re z > 0 via e^{-2z}, which stays bounded.
cplx coth_right_half(cplx z) {
    const cplx e = std::exp(-2.0 * z);
    const cplx den = 1.0 - e;
    if (std::abs(den) < 1e-8)
        throw PoleCollision("coth(omega_j/2T) is evaluated next to one of its poles i*pi*m");
    return (1.0 + e) / den;
}

// Residue factor 1/(ω_j-ω_j*) Π_{i≠j} 1/((ω_j-ω_i)(ω_j-ω_i*)).
cplx residue(const PoleTerm& term, std::size_t j) {
    const cplx wj = term.poles[j];
    cplx r = 1.0 / (wj - std::conj(wj));
    for (std::size_t i = 0; i < term.poles.size(); ++i) {
        if (i == j) continue;
        r /= (wj - term.poles[i]) * (wj - std::conj(term.poles[i]));
    }
    return r;
}

} // namespace

double ExponentialBCF::min_decay() const {
    double g = std::numeric_limits<double>::infinity();
    for (const auto& m : modes) g = std::min(g, m.w.imag());
    return g;
}

std::uint64_t model_hash(const FitSDModel& model) {
    std::uint64_t h = fnv1a_value(model.n(), 0xcbf29ce484222325ULL);
    for (const auto& t : model.terms()) {
        h = fnv1a_value(t.p, h);
        for (const cplx& w : t.poles) {
            h = fnv1a_value(w.real(), h);
            h = fnv1a_value(w.imag(), h);
        }
    }
    return h;
}

BCFComponents decompose_components(const FitSDModel& model, const CothExpansion& coth, double T_kelvin) {
    BCFComponents out;
    const bool zero = coth.scheme == CothScheme::ZeroTemperature;
    if (coth.scheme == CothScheme::CroySaalmann) make_expansion(CothScheme::CroySaalmann, 0);  // throws NotSupported
    if (!std::isfinite(T_kelvin) || T_kelvin < 0.0) throw InvalidTemperature("temperature must be >= 0 K");
    if (!zero && !(T_kelvin > 0.0))
        throw InvalidTemperature("T = 0 requires the zero-temperature scheme (finite-T expansions need T > 0)");
    if (zero && T_kelvin > 0.0)
        out.warnings.push_back("zero-temperature scheme used at T > 0: coth(omega/2T) is replaced by 1");

    const double T = units::kelvin_to_invcm(T_kelvin);
    if (!zero && 2.0 * kPi * T < model.min_gamma()) {
        std::ostringstream os;
        os << "2*pi*T = " << 2.0 * kPi * T << " cm^-1 is below the smallest pole width " << model.min_gamma()
           << " cm^-1; large L may be needed";
        out.warnings.push_back(os.str());
    }

    if (!zero) {
        const double eps = 1e-6 * 2.0 * kPi * T;
        for (const auto& term : model.terms())
            for (const cplx& wj : term.poles)
                for (const auto& cp : coth.terms)
                    if (std::abs(wj - 2.0 * T * cp.xi) < eps)
                        throw PoleCollision("an SD pole coincides with a coth-expansion pole 2T*xi");
    }

    const int n = model.n();
    for (const auto& term : model.terms()) {
        for (std::size_t j = 0; j < term.poles.size(); ++j) {
            const cplx wj = term.poles[j];
            const cplx bp = -term.p * std::pow(wj, n - 1) * residue(term, j);
            const cplx ct = zero ? cplx(1.0) : coth_right_half(wj / (2.0 * T));
            const cplx ap = -I * bp * ct;
            out.b_modes.push_back({bp, wj});
            out.b_modes.push_back({std::conj(bp), -std::conj(wj)});
            out.a_modes.push_back({ap, wj});
            out.a_modes.push_back({std::conj(ap), -std::conj(wj)});
        }
    }
    // Residue of C(ω/2T) at ω = 2Tξ_ℓ is 2T·η_ℓ; the 1/x head is cancelled by J(0) = 0.
    for (const auto& cp : coth.terms) {
        const cplx wl = 2.0 * T * cp.xi;
        const cplx coeff = I * model(wl) * (2.0 * T * cp.eta);
        out.a_modes.push_back({cplx(coeff.real(), 0.0), wl});
    }
    return out;
}

ExponentialBCF decompose(const FitSDModel& model, const CothExpansion& coth, double T_kelvin) {
    const BCFComponents comp = decompose_components(model, coth, T_kelvin);
    ExponentialBCF bcf;
    bcf.T_kelvin = T_kelvin;
    bcf.source = {model_hash(model), coth.scheme, coth.L()};
    bcf.warnings = comp.warnings;
    // a- and b-modes share frequencies for the SD poles; merge them as a + i b.
    const std::size_t sd_modes = comp.b_modes.size();
    for (std::size_t m = 0; m < sd_modes; ++m)
        bcf.modes.push_back({comp.a_modes[m].p + I * comp.b_modes[m].p, comp.b_modes[m].w});
    for (std::size_t m = sd_modes; m < comp.a_modes.size(); ++m) bcf.modes.push_back(comp.a_modes[m]);
    return bcf;
}

cplx eval_modes(const std::vector<Mode>& modes, double t) {
    cplx sum = 0.0;
    for (const auto& m : modes) sum += m.p * std::exp(I * m.w * t);
    return sum;
}

cplx eval_exponential(const ExponentialBCF& bcf, double t) {
    if (t < 0.0) throw ValidationError("eval_exponential: t must be >= 0 (use extend_negative_time)");
    return eval_modes(bcf.modes, t);
}

cplx extend_negative_time(const ExponentialBCF& bcf, double t) {
    return t >= 0.0 ? eval_modes(bcf.modes, t) : std::conj(eval_modes(bcf.modes, -t));
}

namespace {

struct OracleSetup {
    std::function<double(double)> Jcoth;
    double re0;  // ∫ J coth
    double abs_tol;
};

OracleSetup oracle_setup(const SDView& sd, double T_kelvin, double rel_tol) {
    if (!std::isfinite(T_kelvin) || T_kelvin < 0.0) throw InvalidTemperature("temperature must be >= 0 K");
    const double T = units::kelvin_to_invcm(T_kelvin);
    OracleSetup s;
    const auto& J = sd.J;
    if (T > 0.0) {
        s.Jcoth = [J, T](double w) {
            const double x = w / (2.0 * T);
            return J(w) / std::tanh(x);
        };
    } else {
        s.Jcoth = J;
    }
    quad::Options opts;
    opts.rel_tol = std::min(1e-11, 0.01 * rel_tol);
    const auto r = quad::semi_infinite(s.Jcoth, sd.scale, opts);
    s.re0 = r.value;
    s.abs_tol = rel_tol * std::abs(r.value);
    return s;
}

cplx exact_with(const SDView& sd, const OracleSetup& s, double t) {
    if (t == 0.0) return s.re0 / kPi;
    const double tt = std::abs(t);
    quad::Options opts;
    opts.abs_tol = s.abs_tol;
    const auto cos_part = quad::half_fourier(s.Jcoth, tt, sd.scale, opts);
    const auto sin_part = quad::half_fourier(sd.J, tt, sd.scale, opts);
    // ∫ f e^{-iωt} = ∫ f cos - i ∫ f sin
    const cplx val(cos_part.value.real() / kPi, sin_part.value.imag() / kPi);
    return t > 0.0 ? val : std::conj(val);
}

} // namespace

cplx exact_bcf(const SDView& sd, double T_kelvin, double t, double rel_tol) {
    const auto s = oracle_setup(sd, T_kelvin, rel_tol);
    return exact_with(sd, s, t);
}

std::vector<cplx> exact_bcf(const SDView& sd, double T_kelvin, const std::vector<double>& ts, double rel_tol) {
    const auto s = oracle_setup(sd, T_kelvin, rel_tol);
    std::vector<cplx> out(ts.size());
    parallel_for(ts.size(), [&](std::size_t i) { out[i] = exact_with(sd, s, ts[i]); });
    return out;
}

} // namespace bcfkit
