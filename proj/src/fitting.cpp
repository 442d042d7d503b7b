#include "bcfkit/fitting.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <random>

#include "bcfkit/error.hpp"
#include "bcfkit/parallel.hpp"

namespace bcfkit {

namespace {

struct Scales {
    double J = 1.0;  // max |J_target|
    double j = 1.0;  // max |J_target/ω²|
};

Scales target_scales(const std::vector<double>& omega, const std::vector<double>& J) {
    Scales s{0.0, 0.0};
    for (std::size_t i = 0; i < omega.size(); ++i) {
        s.J = std::max(s.J, std::abs(J[i]));
        s.j = std::max(s.j, std::abs(J[i]) / (omega[i] * omega[i]));
    }
    if (!(s.J > 0.0)) throw ValidationError("fit target is identically zero on the grid");
    return s;
}

double peak_location(const ReferenceSD& target) {
    const double s = target.scale();
    double best_w = s, best = -1.0;
    constexpr int kScan = 4000;
    for (int i = 0; i < kScan; ++i) {
        const double w = s * std::pow(10.0, -3.0 + 6.0 * i / (kScan - 1));
        const double v = target(w);
        if (v > best) {
            best = v;
            best_w = w;
        }
    }
    return best_w;
}

struct Peak {
    double omega, height, hwhm;
};

// Local maxima with prominence ≥ 1% of the global maximum, tallest first.
std::vector<Peak> find_peaks(const std::vector<double>& w, const std::vector<double>& J) {
    std::vector<Peak> peaks;
    const std::size_t n = J.size();
    if (n < 3) return peaks;
    const double jmax = *std::max_element(J.begin(), J.end());
    for (std::size_t i = 0; i < n; ++i) {
        const bool left_ok = i == 0 || J[i] > J[i - 1];
        const bool right_ok = i + 1 == n || J[i] >= J[i + 1];
        if (!left_ok || !right_ok) continue;
        // prominence: height above the higher of the two flanking minima
        double lmin = J[i], rmin = J[i];
        std::size_t l = i, r = i;
        while (l > 0 && J[l - 1] <= J[i]) lmin = std::min(lmin, J[--l]);
        while (r + 1 < n && J[r + 1] <= J[i]) rmin = std::min(rmin, J[++r]);
        const double prominence = J[i] - std::max(lmin, rmin);
        const bool edge = i == 0 || i + 1 == n;
        if (edge || prominence < 0.01 * jmax) continue;
        // half width at half maximum, from the nearer side that crosses
        const double half = 0.5 * J[i];
        double hw = std::numeric_limits<double>::infinity();
        for (std::size_t k = i; k-- > 0;)
            if (J[k] < half) {
                hw = std::min(hw, w[i] - w[k]);
                break;
            }
        for (std::size_t k = i + 1; k < n; ++k)
            if (J[k] < half) {
                hw = std::min(hw, w[k] - w[i]);
                break;
            }
        if (!std::isfinite(hw)) hw = 0.5 * w[i];
        peaks.push_back({w[i], J[i], hw});
    }
    std::sort(peaks.begin(), peaks.end(), [](const Peak& a, const Peak& b) { return a.height > b.height; });
    return peaks;
}

// Best positive prefactors for fixed poles (linear least squares, clipped).
FitSDModel fit_prefactors(FitSDModel model, const std::vector<double>& omega, const std::vector<double>& J,
                          const FitConfig& cfg) {
    const auto& terms = model.terms();
    const std::size_t K = terms.size();
    const Scales sc = target_scales(omega, J);
    const std::size_t N = omega.size();
    const double sJ = std::sqrt(cfg.weight_J) / sc.J, sj = std::sqrt(cfg.weight_Jw2) / sc.j;
    Eigen::MatrixXd A(2 * N, K);
    Eigen::VectorXd b(2 * N);
    for (std::size_t k = 0; k < K; ++k) {
        PoleTerm unit = terms[k];
        unit.p = 1.0;
        const FitSDModel basis(model.n(), {unit});
        for (std::size_t i = 0; i < N; ++i) {
            const double v = basis(omega[i]);
            A(i, k) = sJ * v;
            A(N + i, k) = sj * v / (omega[i] * omega[i]);
        }
    }
    for (std::size_t i = 0; i < N; ++i) {
        b(i) = sJ * J[i];
        b(N + i) = sj * J[i] / (omega[i] * omega[i]);
    }
    const Eigen::VectorXd p = A.colPivHouseholderQr().solve(b);
    std::vector<PoleTerm> out = terms;
    const double fallback = std::abs(p.maxCoeff()) > 0.0 ? std::abs(p.maxCoeff()) * 1e-3 : 1.0;
    for (std::size_t k = 0; k < K; ++k) out[k].p = (p(k) > 0.0 && std::isfinite(p(k))) ? p(k) : fallback;
    return FitSDModel(model.n(), std::move(out));
}

// Poles must stay pairwise distinct; nudge exact duplicates produced by random draws.
std::vector<cplx> distinct(std::vector<cplx> poles) {
    for (std::size_t j = 0; j < poles.size(); ++j)
        for (std::size_t i = 0; i < j; ++i)
            if (std::abs(poles[i] - poles[j]) <= 1e-9 * std::abs(poles[j])) poles[j] *= 1.0 + 1e-6 * double(j + 1);
    return poles;
}

bool better(const FitResult& a, const FitResult& b, double cost_a, double cost_b) {
    const double tol = 1e-9 * std::max(cost_a, cost_b);
    if (cost_a < cost_b - tol) return true;
    if (cost_b < cost_a - tol) return false;
    if (a.iterations != b.iterations) return a.iterations < b.iterations;
    auto maxp = [](const FitResult& r) {
        double m = 0.0;
        for (const auto& t : r.model.terms()) m = std::max(m, t.p);
        return m;
    };
    return maxp(a) < maxp(b);
}

} // namespace

FitConfig resolve_config(FitConfig cfg) {
    if (cfg.n < 1 || cfg.n % 2 == 0)
        throw ValidationError("fit config: n must be a positive odd integer (even n has no exponential "
                              "correlation function)");
    if (cfg.poles_per_term.empty()) throw ValidationError("fit config: poles_per_term must be nonempty");
    for (int k : cfg.poles_per_term) {
        if (k < 1) throw ValidationError("fit config: every term needs at least one pole");
        if (cfg.n - 2 * k - 2 >= 0)
            throw ValidationError("fit config: n - 2*poles - 2 must be negative for every term");
    }
    if (cfg.weight_J < 0.0 && cfg.weight_Jw2 < 0.0) {
        cfg.weight_J = 1.0;
        cfg.weight_Jw2 = cfg.n >= 3 ? 1.0 : 0.0;
    } else {
        if (cfg.weight_J < 0.0) cfg.weight_J = 0.0;
        if (cfg.weight_Jw2 < 0.0) cfg.weight_Jw2 = 0.0;
    }
    if (!(cfg.weight_J > 0.0) && !(cfg.weight_Jw2 > 0.0))
        throw ValidationError("fit config: at least one of weight_J, weight_Jw2 must be positive");
    if (cfg.weight_Jw2 > 0.0 && cfg.n < 3)
        throw ValidationError("fit config: weight_Jw2 > 0 needs n >= 3 (J/omega^2 of an n = 1 fit diverges at 0)");
    if (cfg.grid.count < 3) throw ValidationError("fit config: grid.count must be >= 3");
    if (cfg.multistarts < 1) throw ValidationError("fit config: multistarts must be >= 1");
    if (cfg.max_iter < 1) throw ValidationError("fit config: max_iter must be >= 1");
    if (!(cfg.tol > 0.0)) throw ValidationError("fit config: tol must be positive");
    return cfg;
}

std::vector<double> fit_grid(const ReferenceSD& target, const FitConfig& cfg) {
    double lo = cfg.grid.omega_min, hi = cfg.grid.omega_max;
    if (!(lo > 0.0) || !(hi > 0.0)) {
        const double peak = peak_location(target);
        lo = peak / 100.0;
        hi = 20.0 * peak;
    }
    if (!(hi > lo)) throw ValidationError("fit grid: omega_max must exceed omega_min");
    std::vector<double> w(cfg.grid.count);
    for (int i = 0; i < cfg.grid.count; ++i) {
        const double f = double(i) / (cfg.grid.count - 1);
        w[i] = cfg.grid.spacing == GridSpacing::Log ? lo * std::pow(hi / lo, f) : lo + (hi - lo) * f;
    }
    return w;
}

std::vector<double> pack_parameters(const FitSDModel& model) {
    std::vector<double> theta;
    for (const auto& t : model.terms()) {
        theta.push_back(std::log(t.p));
        for (const cplx& w : t.poles) {
            theta.push_back(std::log(w.real()));
            theta.push_back(std::log(w.imag()));
        }
    }
    return theta;
}

FitSDModel unpack_parameters(int n, const std::vector<int>& ppt, const std::vector<double>& theta) {
    std::vector<PoleTerm> terms;
    std::size_t idx = 0;
    for (int k : ppt) {
        PoleTerm t;
        t.p = std::exp(theta.at(idx++));
        for (int j = 0; j < k; ++j) {
            const double om = std::exp(theta.at(idx));
            const double ga = std::exp(theta.at(idx + 1));
            idx += 2;
            t.poles.emplace_back(om, ga);
        }
        terms.push_back(std::move(t));
    }
    return FitSDModel(n, std::move(terms));
}

void fit_residuals(const FitSDModel& model, const std::vector<double>& omega, const std::vector<double>& J,
                   const FitConfig& cfg, std::vector<double>& r, std::vector<double>* jac) {
    const std::size_t N = omega.size();
    const Scales sc = target_scales(omega, J);
    const double sJ = std::sqrt(cfg.weight_J) / sc.J, sj = std::sqrt(cfg.weight_Jw2) / sc.j;
    std::size_t P = 0;
    for (const auto& t : model.terms()) P += 1 + 2 * t.poles.size();
    r.assign(2 * N, 0.0);
    if (jac) jac->assign(2 * N * P, 0.0);
    const int n = model.n();

    for (std::size_t i = 0; i < N; ++i) {
        const double w = omega[i];
        const double wn = std::pow(w, n - 1);
        double Jf = 0.0;
        std::size_t col = 0;
        for (const auto& t : model.terms()) {
            const std::size_t k = t.poles.size();
            // P(±ω) = Π 1/D_j(±ω), D_j(x) = (x-Ω_j)² + γ_j²
            double Pp = 1.0, Pm = 1.0;
            std::vector<double> Dp(k), Dm(k);
            for (std::size_t j = 0; j < k; ++j) {
                const double om = t.poles[j].real(), ga = t.poles[j].imag();
                Dp[j] = (w - om) * (w - om) + ga * ga;
                Dm[j] = (w + om) * (w + om) + ga * ga;
                Pp /= Dp[j];
                Pm /= Dm[j];
            }
            const double term = t.p * wn * (Pp - Pm);
            Jf += term;
            if (jac) {
                const double dJ_dlogp = term;
                (*jac)[(i)*P + col] = sJ * dJ_dlogp;
                (*jac)[(N + i) * P + col] = sj * dJ_dlogp / (w * w);
                for (std::size_t j = 0; j < k; ++j) {
                    const double om = t.poles[j].real(), ga = t.poles[j].imag();
                    // ∂P(x)/∂Ω = P(x)·2(x-Ω)/D(x);  at x = -ω: -2(ω+Ω)/D(-ω)
                    const double dP_dom = Pp * 2.0 * (w - om) / Dp[j] - Pm * (-2.0 * (w + om)) / Dm[j];
                    const double dP_dga = Pp * (-2.0 * ga) / Dp[j] - Pm * (-2.0 * ga) / Dm[j];
                    const double dJ_dlogom = t.p * wn * dP_dom * om;
                    const double dJ_dlogga = t.p * wn * dP_dga * ga;
                    const std::size_t c1 = col + 1 + 2 * j, c2 = c1 + 1;
                    (*jac)[i * P + c1] = sJ * dJ_dlogom;
                    (*jac)[i * P + c2] = sJ * dJ_dlogga;
                    (*jac)[(N + i) * P + c1] = sj * dJ_dlogom / (w * w);
                    (*jac)[(N + i) * P + c2] = sj * dJ_dlogga / (w * w);
                }
            }
            col += 1 + 2 * k;
        }
        r[i] = sJ * (Jf - J[i]);
        r[N + i] = sj * (Jf - J[i]) / (w * w);
    }
}

namespace {

double half_sq(const std::vector<double>& r) {
    double s = 0.0;
    for (double v : r) s += v * v;
    return 0.5 * s;
}

void relative_residuals(FitResult& res, const std::vector<double>& omega, const std::vector<double>& J) {
    double nJ = 0.0, dJ = 0.0, nj = 0.0, dj = 0.0;
    for (std::size_t i = 0; i < omega.size(); ++i) {
        const double f = res.model(omega[i]);
        const double w2 = omega[i] * omega[i];
        dJ += (f - J[i]) * (f - J[i]);
        nJ += J[i] * J[i];
        dj += (f - J[i]) * (f - J[i]) / (w2 * w2);
        nj += J[i] * J[i] / (w2 * w2);
    }
    res.residual_J = nJ > 0.0 ? std::sqrt(dJ / nJ) : std::sqrt(dJ);
    res.residual_Jw2 = nj > 0.0 ? std::sqrt(dj / nj) : std::sqrt(dj);
}

} // namespace

FitResult refine(const FitSDModel& start, const std::vector<double>& omega, const std::vector<double>& J,
                 const FitConfig& cfg_in, std::vector<double>* cost_history) {
    const FitConfig cfg = resolve_config(cfg_in);
    std::vector<int> ppt;
    for (const auto& t : start.terms()) ppt.push_back(int(t.poles.size()));
    const int n = start.n();

    const double wlo = *std::min_element(omega.begin(), omega.end());
    const double whi = *std::max_element(omega.begin(), omega.end());
    const double log_lo = std::log(wlo * 1e-3), log_hi = std::log(whi * 1e3);

    std::vector<double> theta = pack_parameters(start);
    const std::size_t P = theta.size();
    std::vector<double> r, jac;
    FitSDModel model = start;
    fit_residuals(model, omega, J, cfg, r, &jac);
    double cost = half_sq(r);
    if (cost_history) cost_history->push_back(cost);

    const std::size_t M = r.size();
    double mu = -1.0, nu = 2.0;
    int it = 0;
    bool converged = false;
    for (; it < cfg.max_iter; ++it) {
        Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> Jm(jac.data(), M, P);
        Eigen::Map<const Eigen::VectorXd> rv(r.data(), M);
        const Eigen::MatrixXd A = Jm.transpose() * Jm;
        const Eigen::VectorXd g = Jm.transpose() * rv;
        if (g.lpNorm<Eigen::Infinity>() <= cfg.tol * std::max(1.0, cost)) {
            converged = true;
            break;
        }
        Eigen::VectorXd D = A.diagonal().cwiseMax(1e-12 * std::max(1.0, A.diagonal().maxCoeff()));
        if (mu < 0.0) mu = 1e-3;  // relative to the Marquardt scaling D
        bool accepted = false;
        for (int tries = 0; tries < 60 && !accepted; ++tries) {
            Eigen::MatrixXd Aa = A;
            Aa.diagonal() += mu * D;
            const Eigen::VectorXd h = Aa.ldlt().solve(-g);
            if (!h.allFinite()) {
                mu *= nu;
                nu *= 2.0;
                continue;
            }
            std::vector<double> trial(P);
            bool ok = true;
            for (std::size_t q = 0; q < P; ++q) {
                trial[q] = theta[q] + h(q);
                if (!std::isfinite(trial[q])) ok = false;
            }
            // keep poles within a generous band around the grid
            std::size_t idx = 0;
            for (int k : ppt) {
                trial[idx] = std::clamp(trial[idx], -700.0, 700.0);
                ++idx;
                for (int j = 0; j < k; ++j, idx += 2) {
                    trial[idx] = std::clamp(trial[idx], log_lo, log_hi);
                    trial[idx + 1] = std::clamp(trial[idx + 1], log_lo, log_hi);
                }
            }
            std::vector<double> rt;
            double cost_t = std::numeric_limits<double>::infinity();
            FitSDModel trial_model = model;
            if (ok) {
                try {
                    trial_model = unpack_parameters(n, ppt, trial);
                    fit_residuals(trial_model, omega, J, cfg, rt, nullptr);
                    cost_t = half_sq(rt);
                } catch (const ValidationError&) {
                    cost_t = std::numeric_limits<double>::infinity();
                }
            }
            const double predicted = 0.5 * h.dot(mu * D.cwiseProduct(h) - g);
            const double rho = (std::isfinite(cost_t) && predicted > 0.0) ? (cost - cost_t) / predicted : -1.0;
            if (rho > 0.0 && cost_t <= cost) {
                const double rel_drop = (cost - cost_t) / std::max(cost, 1e-300);
                double step = 0.0, size = 0.0;
                for (std::size_t q = 0; q < P; ++q) {
                    step = std::max(step, std::abs(trial[q] - theta[q]));
                    size = std::max(size, std::abs(theta[q]));
                }
                theta = trial;
                model = trial_model;
                cost = cost_t;
                fit_residuals(model, omega, J, cfg, r, &jac);
                if (cost_history) cost_history->push_back(cost);
                mu *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3));
                nu = 2.0;
                accepted = true;
                if (step <= cfg.tol * (size + cfg.tol) || rel_drop <= cfg.tol || cost <= 1e-30) converged = true;
            } else {
                mu *= nu;
                nu *= 2.0;
            }
        }
        if (!accepted) {
            // No descent direction left at any damping: a (local) minimum.
            converged = true;
            ++it;
            break;
        }
        if (converged) {
            ++it;
            break;
        }
    }
    FitResult res{model, 0.0, 0.0, it, converged, 0};
    relative_residuals(res, omega, J);
    return res;
}

std::vector<FitSDModel> multistart_init(const std::vector<double>& omega, const std::vector<double>& J,
                                        const FitConfig& cfg_in) {
    const FitConfig cfg = resolve_config(cfg_in);
    if (omega.size() < 3 || omega.size() != J.size())
        throw ValidationError("multistart_init: need at least 3 samples");
    const double lo = *std::min_element(omega.begin(), omega.end());
    const double hi = *std::max_element(omega.begin(), omega.end());
    const auto peaks = find_peaks(omega, J);

    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    auto log_uniform = [&](double a, double b) { return a * std::pow(b / a, U(rng)); };

    std::vector<FitSDModel> starts;
    for (int s = 0; s < cfg.multistarts; ++s) {
        std::size_t next_peak = 0;
        std::vector<PoleTerm> terms;
        for (int k : cfg.poles_per_term) {
            PoleTerm t;
            t.p = 1.0;
            for (int j = 0; j < k; ++j) {
                if (s == 0 && next_peak < peaks.size()) {
                    const Peak& pk = peaks[next_peak++];
                    t.poles.emplace_back(pk.omega, std::max(pk.hwhm, 1e-6 * pk.omega));
                } else {
                    t.poles.emplace_back(log_uniform(lo, hi), log_uniform(lo, hi));
                }
            }
            t.poles = distinct(std::move(t.poles));
            terms.push_back(std::move(t));
        }
        starts.push_back(fit_prefactors(FitSDModel(cfg.n, std::move(terms)), omega, J, cfg));
    }
    return starts;
}

FitResult fit_sd(const std::vector<double>& omega, const std::vector<double>& J, const FitConfig& cfg_in) {
    const FitConfig cfg = resolve_config(cfg_in);
    if (omega.size() != J.size() || omega.size() < 3) throw ValidationError("fit_sd: need >= 3 (omega, J) samples");
    for (std::size_t i = 0; i < omega.size(); ++i) {
        if (!(omega[i] > 0.0)) throw ValidationError("fit_sd: frequencies must be positive");
        if (!(J[i] >= 0.0) || !std::isfinite(J[i])) throw ValidationError("fit_sd: target must be nonnegative");
    }
    const auto starts = multistart_init(omega, J, cfg);
    std::vector<std::optional<FitResult>> results(starts.size());
    std::vector<double> costs(starts.size(), std::numeric_limits<double>::infinity());
    parallel_for(starts.size(), [&](std::size_t s) {
        try {
            FitResult r = refine(starts[s], omega, J, cfg);
            r.start_index = int(s);
            std::vector<double> res;
            fit_residuals(r.model, omega, J, cfg, res, nullptr);
            costs[s] = half_sq(res);
            results[s] = std::move(r);
        } catch (const NumericalError&) {
        }
    });
    std::size_t best = starts.size();
    for (std::size_t s = 0; s < starts.size(); ++s) {
        if (!results[s]) continue;
        if (best == starts.size() || better(*results[s], *results[best], costs[s], costs[best])) best = s;
    }
    if (best == starts.size()) throw NumericalError("fit_sd: every start failed");
    return *results[best];
}

FitResult fit_sd(const ReferenceSD& target, const FitConfig& cfg_in) {
    const FitConfig cfg = resolve_config(cfg_in);
    std::vector<double> omega = fit_grid(target, cfg);
    std::vector<double> J(omega.size());
    for (std::size_t i = 0; i < omega.size(); ++i) J[i] = target(omega[i]);
    return fit_sd(omega, J, cfg);
}

} // namespace bcfkit
