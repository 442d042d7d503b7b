// fitting.hpp — least-squares fits of the simple-pole family to a target SD

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bcfkit/specdens.hpp"

namespace bcfkit {

enum class GridSpacing { Linear, Log };

// omega_min/omega_max ≤ 0 → [ω_peak/100, 20·ω_peak].
struct FrequencyGrid {
    double omega_min = 0.0;
    double omega_max = 0.0;
    int count = 400;
    GridSpacing spacing = GridSpacing::Log;
};

struct FitConfig {
    int n = 5;
    std::vector<int> poles_per_term{3};
    // Negative → default: equal weights for n ≥ 3, J only for n = 1.
    double weight_J = -1.0;
    double weight_Jw2 = -1.0;
    FrequencyGrid grid;
    int multistarts = 16;
    std::uint64_t seed = 1;
    int max_iter = 2000;
    double tol = 1e-12;
};

struct FitResult {
    FitSDModel model;
    double residual_J = 0.0;    // relative RMS of J_fit - J_target on the grid
    double residual_Jw2 = 0.0;  // same for J/ω²
    int iterations = 0;
    bool converged = false;
    int start_index = 0;
};

// Fills defaulted weights and validates; throws ValidationError.
FitConfig resolve_config(FitConfig cfg);

// Frequency samples used for a reference target.
std::vector<double> fit_grid(const ReferenceSD& target, const FitConfig& cfg);

std::vector<FitSDModel> multistart_init(const std::vector<double>& omega, const std::vector<double>& J,
                                        const FitConfig& cfg);

FitResult fit_sd(const std::vector<double>& omega, const std::vector<double>& J, const FitConfig& cfg);
FitResult fit_sd(const ReferenceSD& target, const FitConfig& cfg);

// Single Levenberg–Marquardt refinement from `start`; exposed for testing.
// `cost_history` (if non-null) receives the objective after every accepted step.
FitResult refine(const FitSDModel& start, const std::vector<double>& omega, const std::vector<double>& J,
                 const FitConfig& cfg, std::vector<double>* cost_history = nullptr);

// Residual vector and its Jacobian with respect to the log-parameters
// (per term: log p, then log Ω_j, log γ_j for each pole). Row-major Jacobian.
void fit_residuals(const FitSDModel& model, const std::vector<double>& omega, const std::vector<double>& J,
                   const FitConfig& cfg, std::vector<double>& r, std::vector<double>* jac);

std::vector<double> pack_parameters(const FitSDModel& model);
FitSDModel unpack_parameters(int n, const std::vector<int>& poles_per_term, const std::vector<double>& theta);

} // namespace bcfkit
