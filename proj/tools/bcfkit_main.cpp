// bcfkit — command-line front end: fit, decompose, spectrum, coth

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>

#include "bcfkit/bcf.hpp"
#include "bcfkit/cothexp.hpp"
#include "bcfkit/error.hpp"
#include "bcfkit/fitting.hpp"
#include "bcfkit/hash.hpp"
#include "bcfkit/json_io.hpp"
#include "bcfkit/lineshape.hpp"
#include "bcfkit/spectra.hpp"
#include "bcfkit/units.hpp"

namespace fs = std::filesystem;
using namespace bcfkit;
using io::json;

namespace {

constexpr const char* kVersion = "0.3.0";

struct Run {
    std::string command;
    std::vector<std::string> inputs;
    std::vector<std::string> args;  // canonical argument list, hashed into config_hash
    std::uint64_t seed = 0;
    fs::path out_dir;
};

std::string hex64(std::uint64_t h) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

std::string read_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot open '" + p.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory '" + dir.string() + "'");
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw IoError("cannot open '" + p.string() + "' for writing");
    out << text;
    if (!out) throw IoError("error writing '" + p.string() + "'");
}

// Every output except the manifest itself points back to it.
void write_json(const fs::path& p, json j) {
    if (p.filename() != "manifest.json" && j.is_object()) j["manifest"] = "manifest.json";
    write_text(p, j.dump(2) + "\n");
}

void write_manifest(const Run& run) {
    json inputs = json::array();
    for (const auto& in : run.inputs) inputs.push_back({{"path", in}, {"fnv1a", hex64(fnv1a(read_bytes(in)))}});
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& a : run.args) h = fnv1a(a + '\0', h);
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    write_json(run.out_dir / "manifest.json", {{"command", run.command},
                                               {"inputs", inputs},
                                               {"args", run.args},
                                               {"config_hash", hex64(h)},
                                               {"seed", run.seed},
                                               {"tool_version", kVersion},
                                               {"timestamp", stamp}});
}

// CSV with 17 significant digits (round-trip exact) and a manifest back-reference.
class Csv {
public:
    Csv(const fs::path& p, const std::vector<std::string>& columns) : path_(p) {
        os_ << std::setprecision(17);
        os_ << "# manifest=manifest.json\n";
        for (std::size_t i = 0; i < columns.size(); ++i) os_ << (i ? "," : "") << columns[i];
        os_ << "\n";
    }
    template <class... Ts>
    void row(const Ts&... vals) {
        bool first = true;
        ((os_ << (first ? "" : ",") << vals, first = false), ...);
        os_ << "\n";
    }
    void close() { write_text(path_, os_.str()); }

private:
    fs::path path_;
    std::ostringstream os_;
};

void warn(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

// ---------------------------------------------------------------------------

struct FitArgs {
    std::string target, config, out;
};

int cmd_fit(const FitArgs& a) {
    const json target_j = io::load_json_file(a.target);
    const json config_j = io::load_json_file(a.config);
    const ReferenceSD target = io::parse_reference(target_j);
    const FitConfig cfg = io::parse_fit_config(config_j);

    std::vector<double> omega;
    if (const auto* tab = std::get_if<Tabulated>(&target.variant()); tab && cfg.grid.omega_min <= 0.0)
        omega = tab->omega;
    else
        omega = fit_grid(target, cfg);
    std::vector<double> J(omega.size());
    for (std::size_t i = 0; i < omega.size(); ++i) J[i] = target(omega[i]);

    const FitResult res = fit_sd(omega, J, cfg);

    Run run{"fit", {a.target, a.config}, {"fit", target_j.dump(), io::fit_config_to_json(cfg).dump()}, cfg.seed, a.out};
    ensure_dir(run.out_dir);
    json out = io::fit_result_to_json(res);
    out["config"] = io::fit_config_to_json(cfg);
    out["target"] = io::reference_to_json(target);
    write_json(run.out_dir / "fit_result.json", out);
    Csv csv(run.out_dir / "fit_overlay.csv", {"omega_invcm", "target", "fit", "diff"});
    for (std::size_t i = 0; i < omega.size(); ++i) {
        const double f = res.model(omega[i]);
        csv.row(fmt(omega[i]), fmt(J[i]), fmt(f), fmt(f - J[i]));
    }
    csv.close();
    write_manifest(run);
    if (!res.converged) {
        std::cerr << "warning: no start reached the tolerance; best-so-far model written\n";
    }
    std::cout << "fit: residual_J=" << res.residual_J << " residual_Jw2=" << res.residual_Jw2
              << " iterations=" << res.iterations << (res.converged ? "" : " (not converged)") << "\n";
    return 0;
}

// ---------------------------------------------------------------------------

struct DecomposeArgs {
    std::string model, out, scheme = "pade";
    double T = -1.0;
    int L = 0;
    bool oracle = false;
    double t_max = 0.2;
    int t_count = 201;
};

int cmd_decompose(const DecomposeArgs& a) {
    const json model_j = io::load_json_file(a.model);
    const io::AnySD any = io::parse_any_sd(model_j);
    const auto* model_p = std::get_if<FitSDModel>(&any);
    if (!model_p) throw ValidationError("decompose needs a fit model (run 'fit' first for a reference SD)");
    const FitSDModel& model = *model_p;
    const CothScheme scheme = parse_coth_scheme(a.scheme);
    if (scheme != CothScheme::ZeroTemperature && a.L < 1)
        throw ValidationError("--L must be >= 1 for the " + a.scheme + " scheme");
    if (a.t_count < 2 || !(a.t_max > 0.0)) throw ValidationError("--t-max must be > 0 and --t-count >= 2");
    const CothExpansion coth = make_expansion(scheme, a.L);
    const ExponentialBCF bcf = decompose(model, coth, a.T);
    warn(bcf.warnings);

    Run run{"decompose", {a.model},
            {"decompose", model_j.dump(), fmt(a.T), a.scheme, std::to_string(a.L), a.oracle ? "oracle" : "",
             fmt(a.t_max), std::to_string(a.t_count)},
            0, a.out};
    ensure_dir(run.out_dir);
    write_json(run.out_dir / "bcf.json", io::bcf_to_json(bcf));

    std::vector<double> ts(a.t_count);
    for (int i = 0; i < a.t_count; ++i) ts[i] = a.t_max * i / (a.t_count - 1);
    std::vector<cplx> exact;
    if (a.oracle) exact = exact_bcf(bcfkit::view(model), a.T, ts);
    std::vector<std::string> cols{"t_invcm", "t_fs", "re_alpha", "im_alpha"};
    if (a.oracle) cols.insert(cols.end(), {"re_exact", "im_exact", "abs_err"});
    Csv csv(run.out_dir / "bcf.csv", cols);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const cplx al = eval_exponential(bcf, ts[i]);
        if (a.oracle)
            csv.row(fmt(ts[i]), fmt(units::time_to_fs(ts[i])), fmt(al.real()), fmt(al.imag()), fmt(exact[i].real()),
                    fmt(exact[i].imag()), fmt(std::abs(al - exact[i])));
        else
            csv.row(fmt(ts[i]), fmt(units::time_to_fs(ts[i])), fmt(al.real()), fmt(al.imag()));
    }
    csv.close();
    write_manifest(run);
    std::cout << "decompose: M=" << bcf.size() << " modes (scheme " << to_string(scheme) << ", L=" << coth.L()
              << ")\n";
    return 0;
}

// ---------------------------------------------------------------------------

struct SpectrumArgs {
    std::string input, out, reference, scheme, window = "none";
    double T = -1.0;
    int L = 10;
    bool exact = false;
    double gamma_add = 1.0;
    int log2_points = 20;
    double dt = 0.0;
    int zero_pad = 4;
    double omega_min = -1000.0, omega_max = 3000.0, omega_step = 0.5;
};

void write_spectrum(const fs::path& dir, const std::string& stem, const Spectrum& s, const SpectrumArgs& a,
                    const FftOptions& fft, double dt, const std::string& route) {
    const Spectrum out = resample(s, a.omega_min, a.omega_max, a.omega_step);
    Csv csv(dir / (stem + ".csv"), {"omega_invcm", "A"});
    for (std::size_t i = 0; i < out.size(); ++i) csv.row(fmt(out.omega(i)), fmt(out.values[i]));
    csv.close();
    write_json(dir / (stem + ".json"), {{"dt", dt},
                                        {"dt_fs", units::time_to_fs(dt)},
                                        {"n_points", fft.n_points},
                                        {"zero_pad", fft.zero_pad},
                                        {"gamma_add", fft.gamma_add},
                                        {"window", a.window},
                                        {"area", s.area()},
                                        {"delta_weight", s.delta_weight},
                                        {"normalization", s.normalization},
                                        {"under_resolved", s.under_resolved},
                                        {"domega_native", s.domega},
                                        {"route", route}});
}

Spectrum exact_spectrum(const SDView& sd, double T, const FftOptions& fft, double dt) {
    const LineshapeSeries g = g_from_sd_fft(sd, T, dt, fft.n_points);
    return absorption(g, fft);
}

int cmd_spectrum(const SpectrumArgs& a) {
    const json in_j = io::load_json_file(a.input);
    const io::AnySD sd = io::parse_any_sd(in_j);
    if (a.log2_points < 4 || a.log2_points > 26) throw ValidationError("--log2-points must be in [4, 26]");
    FftOptions fft;
    fft.n_points = std::size_t(1) << a.log2_points;
    fft.gamma_add = a.gamma_add;
    fft.zero_pad = std::size_t(a.zero_pad);
    if (a.window == "hann") fft.window = Window::Hann;
    else if (a.window != "none") throw ValidationError("--window must be none or hann");
    if (a.omega_step <= 0.0 || a.omega_max <= a.omega_min) throw ValidationError("bad --omega-* range");

    const SDView v = io::view(sd);
    const double dt = a.dt > 0.0 ? a.dt : default_dt(v.scale);
    fft.dt = dt;

    Spectrum spec;
    std::string route;
    std::vector<std::string> warnings;
    if (a.exact) {
        spec = exact_spectrum(v, a.T, fft, dt);
        route = "exact";
    } else {
        const auto* model = std::get_if<FitSDModel>(&sd);
        if (!model) throw ValidationError("a reference SD input needs --exact (or fit it first)");
        std::string scheme_name = a.scheme.empty() ? (a.T == 0.0 ? "zero" : "pade") : a.scheme;
        const CothScheme scheme = parse_coth_scheme(scheme_name);
        const CothExpansion coth = make_expansion(scheme, a.L);
        const ExponentialBCF bcf = decompose(*model, coth, a.T);
        warnings = bcf.warnings;
        std::vector<double> ts(fft.n_points);
        for (std::size_t k = 0; k < ts.size(); ++k) ts[k] = double(k) * dt;
        const LineshapeSeries g = g_from_exponential(bcf, ts, reorganization_energy(*model));
        spec = absorption(g, fft);
        route = "exponential:" + to_string(scheme) + ":L=" + std::to_string(coth.L());
    }
    warn(warnings);
    if (spec.under_resolved)
        std::cerr << "warning: spectrum has negative excursions below -1e-3*max (expansion under-resolved)\n";

    Run run{"spectrum", {a.input},
            {"spectrum", in_j.dump(), fmt(a.T), a.scheme, std::to_string(a.L), a.exact ? "exact" : "", fmt(a.gamma_add),
             std::to_string(a.log2_points), fmt(dt), a.window, std::to_string(a.zero_pad), fmt(a.omega_min),
             fmt(a.omega_max), fmt(a.omega_step)},
            0, a.out};
    if (!a.reference.empty()) {
        run.inputs.push_back(a.reference);
        run.args.push_back(read_bytes(a.reference));
    }
    ensure_dir(run.out_dir);
    write_spectrum(run.out_dir, "spectrum", spec, a, fft, dt, route);

    if (!a.reference.empty()) {
        const io::AnySD ref = io::parse_any_sd(io::load_json_file(a.reference));
        const Spectrum ref_spec = exact_spectrum(io::view(ref), a.T, fft, dt);
        write_spectrum(run.out_dir, "reference_spectrum", ref_spec, a, fft, dt, "exact");
        const SpectrumDistance d = compare_spectra(ref_spec, spec);
        write_json(run.out_dir / "compare.json", {{"l1", d.l1}, {"linf", d.linf}, {"peak_shift", d.peak_shift}});
        std::cout << "compare: l1=" << d.l1 << " linf=" << d.linf << " peak_shift=" << d.peak_shift << "\n";
    }
    write_manifest(run);
    std::cout << "spectrum: area=" << spec.area() << " (" << route << ")\n";
    return 0;
}

// ---------------------------------------------------------------------------

struct CothArgs {
    std::string scheme = "pade", out;
    int L = 1;
    std::vector<double> range{0.1, 10.0};
    int points = 200;
};

int cmd_coth(const CothArgs& a) {
    const CothScheme scheme = parse_coth_scheme(a.scheme);
    const CothExpansion c = make_expansion(scheme, a.L);
    if (a.range.size() != 2 || !(a.range[0] > 0.0) || !(a.range[1] > a.range[0]))
        throw ValidationError("--range needs 0 < a < b");
    if (a.points < 2) throw ValidationError("--points must be >= 2");
    Run run{"coth", {}, {"coth", a.scheme, std::to_string(a.L), fmt(a.range[0]), fmt(a.range[1]), std::to_string(a.points)},
            0, a.out};
    ensure_dir(run.out_dir);
    Csv tab(run.out_dir / "coth_expansion.csv", {"ell", "im_xi", "eta"});
    for (int l = 0; l < c.L(); ++l) tab.row(l + 1, fmt(c.terms[l].xi.imag()), fmt(c.terms[l].eta));
    tab.close();
    Csv err(run.out_dir / "coth_error.csv", {"x", "exact", "approx", "rel_err"});
    const double la = std::log(a.range[0]), lb = std::log(a.range[1]);
    for (int i = 0; i < a.points; ++i) {
        const double x = std::exp(la + (lb - la) * i / (a.points - 1));
        const double ex = 1.0 / std::tanh(x);
        const double ap = eval_expansion(c, x).real();
        err.row(fmt(x), fmt(ex), fmt(ap), fmt(std::abs(ap - ex) / ex));
    }
    err.close();
    write_manifest(run);
    std::cout << "coth: " << to_string(scheme) << " L=" << c.L()
              << " max rel err on range = " << expansion_error(c, a.range[0], a.range[1]) << "\n";
    return 0;
}

int exit_code(const Error& e) {
    switch (e.kind()) {
    case ErrorKind::Validation:
    case ErrorKind::NotSupported: return 2;
    case ErrorKind::Numerical: return 3;
    case ErrorKind::Io: return 4;
    }
    return 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"bcfkit: spectral-density fits, exponential bath correlation functions and absorption spectra"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    FitArgs fa;
    auto* fit = app.add_subcommand("fit", "fit the simple-pole family to a target spectral density");
    fit->add_option("target", fa.target, "target SD JSON")->required();
    fit->add_option("config", fa.config, "fit configuration JSON")->required();
    fit->add_option("-o,--out", fa.out, "output directory")->required();

    DecomposeArgs da;
    auto* dec = app.add_subcommand("decompose", "exponential decomposition of the bath correlation function");
    dec->add_option("model", da.model, "fit model JSON")->required();
    dec->add_option("-T,--temp-kelvin", da.T, "temperature in K")->required();
    dec->add_option("--scheme", da.scheme, "coth expansion: pade | matsubara | zero")->capture_default_str();
    dec->add_option("--L", da.L, "number of coth poles");
    dec->add_flag("--oracle", da.oracle, "add quadrature columns (slow)");
    dec->add_option("--t-max", da.t_max, "last time point (internal units; 1 = 5308.8 fs)")->capture_default_str();
    dec->add_option("--t-count", da.t_count, "number of time points")->capture_default_str();
    dec->add_option("-o,--out", da.out, "output directory")->required();

    SpectrumArgs sa;
    auto* spc = app.add_subcommand("spectrum", "linear absorption spectrum");
    spc->add_option("input", sa.input, "fit model or reference SD JSON")->required();
    spc->add_option("-T,--temp-kelvin", sa.T, "temperature in K")->required();
    spc->add_option("--scheme", sa.scheme, "coth expansion for models (default: zero at T=0, else pade)");
    spc->add_option("--L", sa.L, "number of coth poles")->capture_default_str();
    spc->add_flag("--exact", sa.exact, "use the lineshape of the SD itself (no exponential fit)");
    spc->add_option("--reference", sa.reference, "reference SD JSON; adds its exact spectrum and a comparison");
    spc->add_option("--gamma-add", sa.gamma_add, "artificial broadening in cm^-1")->capture_default_str();
    spc->add_option("--log2-points", sa.log2_points, "log2 of the time-sample count")->capture_default_str();
    spc->add_option("--dt", sa.dt, "time step (internal units); default pi/(8*max(scale, 2000))");
    spc->add_option("--window", sa.window, "none | hann")->capture_default_str();
    spc->add_option("--zero-pad", sa.zero_pad, "zero-padding factor")->capture_default_str();
    spc->add_option("--omega-min", sa.omega_min, "output range start (cm^-1)")->capture_default_str();
    spc->add_option("--omega-max", sa.omega_max, "output range end (cm^-1)")->capture_default_str();
    spc->add_option("--omega-step", sa.omega_step, "output spacing (cm^-1)")->capture_default_str();
    spc->add_option("-o,--out", sa.out, "output directory")->required();

    CothArgs ca;
    auto* cth = app.add_subcommand("coth", "inspect a coth pole expansion");
    cth->add_option("--scheme", ca.scheme, "pade | matsubara | zero")->capture_default_str();
    cth->add_option("--L", ca.L, "number of poles")->capture_default_str();
    cth->add_option("--range", ca.range, "x range for the error sweep")->expected(2)->capture_default_str();
    cth->add_option("--points", ca.points, "sweep points")->capture_default_str();
    cth->add_option("-o,--out", ca.out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*fit) return cmd_fit(fa);
        if (*dec) return cmd_decompose(da);
        if (*spc) return cmd_spectrum(sa);
        if (*cth) return cmd_coth(ca);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
