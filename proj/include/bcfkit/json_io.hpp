// json_io.hpp — JSON (de)serialisation with field-level validation messages

#pragma once

#include <filesystem>
#include <string>
#include <variant>

#include <json.hpp>

#include "bcfkit/bcf.hpp"
#include "bcfkit/fitting.hpp"
#include "bcfkit/specdens.hpp"

namespace bcfkit::io {

using json = nlohmann::json;

// Reads and parses a file. IoError if unreadable; ValidationError with
// line/column on syntax errors.
json load_json_file(const std::filesystem::path& path);
json parse_json_text(const std::string& text, const std::string& origin = "<input>");

// {"n": int, "terms": [{"p": float, "poles": [[Omega, gamma], ...]}]}
FitSDModel parse_model(const json& j);
json model_to_json(const FitSDModel& m);

// {"kind": "drude_lorentz" | "ohmic_exp" | "log_normal" | "damped_vibration" | "tabulated" | "sum", ...}
ReferenceSD parse_reference(const json& j);
json reference_to_json(const ReferenceSD& sd);

// A file holding a fit model, a fit result (its "model") or a reference SD.
using AnySD = std::variant<FitSDModel, ReferenceSD>;
AnySD parse_any_sd(const json& j);
SDView view(const AnySD& sd);

FitConfig parse_fit_config(const json& j);
json fit_config_to_json(const FitConfig& c);

json fit_result_to_json(const FitResult& r);
json bcf_to_json(const ExponentialBCF& bcf);

} // namespace bcfkit::io
