#pragma once

#include <string>
#include <vector>

#include "ara/bath.hpp"
#include "ara/equilibrium.hpp"
#include "ara/meanfield.hpp"
#include "ara/phasemap.hpp"
#include "ara/spin_dynamics.hpp"

namespace ara::config {

enum class Format { Csv, Json };

// Runtime values either in model units or in units of 1/eta.
struct TauSpec {
    std::vector<double> values{1.0};
    bool eta_units{true};

    double resolve(double value, const bath::BathSpec& bath) const;
};

struct OutputSpec {
    std::string path{"ara_out"};
    Format format{Format::Csv};
    int precision{17};
    int stride{1};  // trajectory rows every `stride` steps; the final step is always kept
};

struct ScanSpec {
    phasemap::Resolution grid{};
    double threshold{0.05};
    double tc_tolerance{1e-3};
    int coarse_samples{8};
};

// Fully resolved run description. Sweepable quantities (temperature, c, tau) are lists; the
// commands iterate over them. Every field has a default, so "{}" is a valid config.
struct RunConfig {
    meanfield::ModelSpec model{};
    bath::BathSpec bath{};  // bath.temperature is ignored in favour of `temperatures`
    std::vector<double> temperatures{0.0};
    std::vector<double> c_values{0.9};
    std::vector<meanfield::ControlPoint> path{{0.0, 0.0, 0.0}, {1.0, 1.0, 1.0}};
    TauSpec tau{};
    double dt{0.1};
    spin::StepOptions step{};
    int equilibrium_samples{1001};
    ScanSpec scan{};
    OutputSpec output{};
    int threads{1};

    // Throws ConfigError on the first out-of-range value.
    void validate() const;

    bath::BathSpec bath_at(double temperature) const;
    meanfield::Protocol protocol_at(double tau_value) const;
    phasemap::ScanOptions scan_options() const;
};

// Parses JSON text. Unknown keys, wrong types and invalid values raise ConfigError.
RunConfig parse(const std::string& text);
RunConfig load(const std::string& path);

// Canonical JSON for a resolved config; parse(to_json(c)) reproduces c exactly except for
// `threads`, which is left out because outputs do not depend on it.
std::string to_json(const RunConfig& config);

// "201x201" -> {201, 201}.
phasemap::Resolution parse_grid(const std::string& text);

std::string to_string(Format format);

}  // namespace ara::config
