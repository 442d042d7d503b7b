#include "bcfkit/json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "bcfkit/error.hpp"

namespace bcfkit::io {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw ValidationError(path + ": " + msg);
}

const json& field(const json& j, const std::string& path, const char* key) {
    if (!j.is_object()) fail(path, "expected an object");
    const auto it = j.find(key);
    if (it == j.end()) fail(path, std::string("missing required field '") + key + "'");
    return *it;
}

double number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(path, "must be finite");
    return v;
}

double positive(const json& j, const std::string& path, const char* key) {
    const double v = number(field(j, path, key), path + "." + key);
    if (!(v > 0.0)) fail(path + "." + key, "must be positive");
    return v;
}

int integer(const json& j, const std::string& path) {
    if (!j.is_number_integer()) fail(path, "expected an integer");
    return j.get<int>();
}

void only_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : keys) known = known || it.key() == k;
        if (!known) fail(path + "." + it.key(), "unknown field");
    }
}

std::vector<double> number_array(const json& j, const std::string& path) {
    if (!j.is_array()) fail(path, "expected an array of numbers");
    std::vector<double> v;
    for (std::size_t i = 0; i < j.size(); ++i) v.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
    return v;
}

json complex_pair(cplx z) { return json::array({z.real(), z.imag()}); }

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

ReferenceSD parse_reference_at(const json& j, const std::string& path) {
    const json& kind_j = field(j, path, "kind");
    if (!kind_j.is_string()) fail(path + ".kind", "expected a string");
    const std::string kind = kind_j.get<std::string>();
    try {
        if (kind == "drude_lorentz") {
            only_keys(j, path, {"kind", "lambda", "gamma"});
            return ReferenceSD(DrudeLorentz{positive(j, path, "lambda"), positive(j, path, "gamma")});
        }
        if (kind == "ohmic_exp") {
            only_keys(j, path, {"kind", "eta", "Lambda"});
            return ReferenceSD(OhmicExp{positive(j, path, "eta"), positive(j, path, "Lambda")});
        }
        if (kind == "log_normal") {
            only_keys(j, path, {"kind", "S", "sigma", "omega_c"});
            return ReferenceSD(
                LogNormal{positive(j, path, "S"), positive(j, path, "sigma"), positive(j, path, "omega_c")});
        }
        if (kind == "damped_vibration") {
            only_keys(j, path, {"kind", "eta", "Lambda", "Omega", "X"});
            return ReferenceSD(DampedVibration{positive(j, path, "eta"), positive(j, path, "Lambda"),
                                               positive(j, path, "Omega"), positive(j, path, "X")});
        }
        if (kind == "tabulated") {
            only_keys(j, path, {"kind", "omega", "J"});
            return ReferenceSD(Tabulated{number_array(field(j, path, "omega"), path + ".omega"),
                                         number_array(field(j, path, "J"), path + ".J")});
        }
        if (kind == "sum") {
            only_keys(j, path, {"kind", "parts"});
            const json& parts = field(j, path, "parts");
            if (!parts.is_array() || parts.empty()) fail(path + ".parts", "expected a nonempty array");
            SumSD s;
            for (std::size_t i = 0; i < parts.size(); ++i)
                s.parts.push_back(parse_reference_at(parts[i], path + ".parts[" + std::to_string(i) + "]"));
            return ReferenceSD(std::move(s));
        }
    } catch (const ValidationError& e) {
        const std::string what = e.what();
        if (what.rfind(path, 0) == 0) throw;
        fail(path, what);
    }
    fail(path + ".kind", "unknown kind '" + kind +
                             "' (expected drude_lorentz, ohmic_exp, log_normal, damped_vibration, tabulated, sum)");
}

} // namespace

json parse_json_text(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        // Translate the byte offset into line/column.
        std::size_t line = 1, col = 1;
        const std::size_t stop = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
        for (std::size_t i = 0; i < stop; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ValidationError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) +
                              ": JSON syntax error: " + e.what());
    }
}

json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("error reading '" + path.string() + "'");
    return parse_json_text(ss.str(), path.string());
}

FitSDModel parse_model(const json& j) {
    const std::string root = "model";
    if (!j.is_object()) fail(root, "expected an object");
    only_keys(j, root, {"n", "terms"});
    const int n = integer(field(j, root, "n"), root + ".n");
    if (n < 1) fail(root + ".n", "must be a positive odd integer");
    if (n % 2 == 0)
        fail(root + ".n", "even n is not supported: the correlation function then involves exponential "
                          "integrals and has no finite sum-of-exponentials form");
    const json& terms_j = field(j, root, "terms");
    if (!terms_j.is_array() || terms_j.empty()) fail(root + ".terms", "expected a nonempty array");
    std::vector<PoleTerm> terms;
    for (std::size_t k = 0; k < terms_j.size(); ++k) {
        const std::string tp = root + ".terms[" + std::to_string(k) + "]";
        const json& t = terms_j[k];
        if (!t.is_object()) fail(tp, "expected an object");
        only_keys(t, tp, {"p", "poles"});
        PoleTerm term;
        term.p = positive(t, tp, "p");
        const json& poles = field(t, tp, "poles");
        if (!poles.is_array() || poles.empty()) fail(tp + ".poles", "expected a nonempty array of [Omega, gamma]");
        for (std::size_t i = 0; i < poles.size(); ++i) {
            const std::string pp = tp + ".poles[" + std::to_string(i) + "]";
            if (!poles[i].is_array() || poles[i].size() != 2) fail(pp, "expected [Omega, gamma]");
            const double om = number(poles[i][0], pp + "[0]");
            const double ga = number(poles[i][1], pp + "[1]");
            if (!(om > 0.0)) fail(pp + "[0]", "Omega must be positive");
            if (!(ga > 0.0)) fail(pp + "[1]", "gamma must be positive");
            term.poles.emplace_back(om, ga);
        }
        terms.push_back(std::move(term));
    }
    try {
        return FitSDModel(n, std::move(terms));
    } catch (const ValidationError& e) {
        fail(root, e.what());
    }
}

json model_to_json(const FitSDModel& m) {
    json terms = json::array();
    for (const auto& t : m.terms()) {
        json poles = json::array();
        for (const cplx& w : t.poles) poles.push_back(complex_pair(w));
        terms.push_back({{"p", t.p}, {"poles", poles}});
    }
    return {{"n", m.n()}, {"terms", terms}};
}

ReferenceSD parse_reference(const json& j) { return parse_reference_at(j, "sd"); }

json reference_to_json(const ReferenceSD& sd) {
    return std::visit(overloaded{
                          [](const DrudeLorentz& s) {
                              return json{{"kind", "drude_lorentz"}, {"lambda", s.lambda}, {"gamma", s.gamma}};
                          },
                          [](const OhmicExp& s) { return json{{"kind", "ohmic_exp"}, {"eta", s.eta}, {"Lambda", s.Lambda}}; },
                          [](const LogNormal& s) {
                              return json{{"kind", "log_normal"}, {"S", s.S}, {"sigma", s.sigma}, {"omega_c", s.omega_c}};
                          },
                          [](const DampedVibration& s) {
                              return json{{"kind", "damped_vibration"}, {"eta", s.eta}, {"Lambda", s.Lambda},
                                          {"Omega", s.Omega}, {"X", s.X}};
                          },
                          [](const Tabulated& s) { return json{{"kind", "tabulated"}, {"omega", s.omega}, {"J", s.J}}; },
                          [](const SumSD& s) {
                              json parts = json::array();
                              for (const auto& p : s.parts) parts.push_back(reference_to_json(p));
                              return json{{"kind", "sum"}, {"parts", parts}};
                          },
                      },
                      sd.variant());
}

AnySD parse_any_sd(const json& j) {
    if (j.is_object() && j.contains("kind")) return parse_reference(j);
    if (j.is_object() && j.contains("n")) return parse_model(j);
    // a fit result file carries its model under "model"
    if (j.is_object() && j.contains("model") && j.contains("residual_J")) return parse_model(j["model"]);
    throw ValidationError("input: expected a fit model ({\"n\", \"terms\"}) or a reference SD ({\"kind\", ...})");
}

SDView view(const AnySD& sd) {
    return std::visit([](const auto& s) { return bcfkit::view(s); }, sd);
}

FitConfig parse_fit_config(const json& j) {
    const std::string root = "config";
    if (!j.is_object()) fail(root, "expected an object");
    only_keys(j, root, {"n", "poles_per_term", "weight_J", "weight_Jw2", "grid", "multistarts", "seed", "max_iter", "tol"});
    FitConfig c;
    c.n = integer(field(j, root, "n"), root + ".n");
    if (c.n % 2 == 0)
        fail(root + ".n", "even n is not supported: the correlation function then involves exponential "
                          "integrals and has no finite sum-of-exponentials form");
    const json& ppt = field(j, root, "poles_per_term");
    if (!ppt.is_array() || ppt.empty()) fail(root + ".poles_per_term", "expected a nonempty array of integers");
    c.poles_per_term.clear();
    for (std::size_t i = 0; i < ppt.size(); ++i)
        c.poles_per_term.push_back(integer(ppt[i], root + ".poles_per_term[" + std::to_string(i) + "]"));
    if (j.contains("weight_J")) c.weight_J = number(j["weight_J"], root + ".weight_J");
    if (j.contains("weight_Jw2")) c.weight_Jw2 = number(j["weight_Jw2"], root + ".weight_Jw2");
    if (j.contains("grid")) {
        const json& g = j["grid"];
        const std::string gp = root + ".grid";
        if (!g.is_object()) fail(gp, "expected an object");
        only_keys(g, gp, {"omega_min", "omega_max", "count", "spacing"});
        if (g.contains("omega_min")) c.grid.omega_min = number(g["omega_min"], gp + ".omega_min");
        if (g.contains("omega_max")) c.grid.omega_max = number(g["omega_max"], gp + ".omega_max");
        if (g.contains("count")) c.grid.count = integer(g["count"], gp + ".count");
        if (g.contains("spacing")) {
            if (!g["spacing"].is_string()) fail(gp + ".spacing", "expected \"linear\" or \"log\"");
            const std::string s = g["spacing"].get<std::string>();
            if (s == "linear") c.grid.spacing = GridSpacing::Linear;
            else if (s == "log") c.grid.spacing = GridSpacing::Log;
            else fail(gp + ".spacing", "expected \"linear\" or \"log\"");
        }
    }
    if (j.contains("multistarts")) c.multistarts = integer(j["multistarts"], root + ".multistarts");
    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned()) fail(root + ".seed", "expected a nonnegative integer");
        c.seed = j["seed"].get<std::uint64_t>();
    }
    if (j.contains("max_iter")) c.max_iter = integer(j["max_iter"], root + ".max_iter");
    if (j.contains("tol")) c.tol = number(j["tol"], root + ".tol");
    try {
        return resolve_config(c);
    } catch (const ValidationError& e) {
        fail(root, e.what());
    }
}

json fit_config_to_json(const FitConfig& c) {
    return {{"n", c.n},
            {"poles_per_term", c.poles_per_term},
            {"weight_J", c.weight_J},
            {"weight_Jw2", c.weight_Jw2},
            {"grid",
             {{"omega_min", c.grid.omega_min},
              {"omega_max", c.grid.omega_max},
              {"count", c.grid.count},
              {"spacing", c.grid.spacing == GridSpacing::Log ? "log" : "linear"}}},
            {"multistarts", c.multistarts},
            {"seed", c.seed},
            {"max_iter", c.max_iter},
            {"tol", c.tol}};
}

json fit_result_to_json(const FitResult& r) {
    return {{"model", model_to_json(r.model)},
            {"residual_J", r.residual_J},
            {"residual_Jw2", r.residual_Jw2},
            {"iterations", r.iterations},
            {"converged", r.converged},
            {"start_index", r.start_index}};
}

json bcf_to_json(const ExponentialBCF& bcf) {
    json modes = json::array();
    for (const auto& m : bcf.modes) modes.push_back({{"p", complex_pair(m.p)}, {"w", complex_pair(m.w)}});
    std::ostringstream hash;
    hash << std::hex << bcf.source.model_hash;
    return {{"modes", modes},
            {"T_kelvin", bcf.T_kelvin},
            {"scheme", to_string(bcf.source.scheme)},
            {"L", bcf.source.L},
            {"M", bcf.modes.size()},
            {"model_hash", hash.str()},
            {"warnings", bcf.warnings}};
}

} // namespace bcfkit::io
