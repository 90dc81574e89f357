#pragma once

#include <optional>

#include "ratebound/io.hpp"

namespace ratebound {

struct BatterySpec {
    int count = 12;
    double min_norm = 0.5;
    double max_norm = 10.0;

    std::vector<Vec> build(int n, std::uint64_t seed) const {
        return make_battery(n, count, min_norm, max_norm, seed);
    }
};

/// Named systems used across the verification suites.
Mat preset_integrator_chain(int n);
Mat preset_oscillator(double omega);
Mat preset_mixed_4d();
Vec last_basis_vector(int n);

/// Two-input reduced form: oscillator block + double-integrator block with a
/// small upper coupling.
ReducedForm preset_two_block();

struct Scenario {
    std::string name = "scenario";
    // single-input path
    Mat A;
    Vec b;
    // multi-input path
    std::optional<ReducedForm> reduced;
    int multi_exponent_offset = 1;  // denominator power p + offset

    BoundSpec bounds = BoundSpec(1, {1.0, 1.0});
    BatterySpec tuning_battery{12, 0.5, 10.0};
    BatterySpec verify_battery{50, 0.1, 100.0};
    bool force_boundary_points = true;  // pin a few battery norms at max_norm

    bool run_siss = true;
    double siss_delta = 0.0;  // 0 selects a scale from the tuned loop
    double siss_horizon = 300.0;

    std::uint64_t seed = 1;
    TuningOptions tuning;
    int samples_csv = 2001;  // grid for exported trajectories

    bool is_multi() const { return reduced.has_value(); }
};

Scenario scenario_from_json(const Json& config);
Scenario make_preset_scenario(const std::string& preset, const Json& params);

struct ScenarioResult {
    bool pass = false;
    std::string summary;
    Json report;
    std::vector<std::string> artifacts;
    FeedbackDescriptor feedback;
};

/// synthesis -> tuning -> battery verification -> SISS; artifacts written
/// under out_dir when it is non-empty.
ScenarioResult run_scenario(const Scenario& scenario, const std::filesystem::path& out_dir,
                            bool dump_canonical = false);

/// Builds the scenario from a JSON config file ("preset" or inline system).
ScenarioResult run_scenario_file(const std::filesystem::path& config_path,
                                 const std::filesystem::path& out_dir, bool dump_canonical = false);

}  // namespace ratebound
