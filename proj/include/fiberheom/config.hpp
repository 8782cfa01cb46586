// config.hpp — run configuration: JSON parsing with strict schema checking,
// defaults, and serialization of the resolved configuration for metadata
// sidecars.

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fiberheom/control.hpp"
#include "fiberheom/heom.hpp"
#include "fiberheom/model.hpp"

namespace fiberheom::io {

inline constexpr const char* kVersion = "1.0.0";

enum class Experiment { Decay, Map, DD, DDMap, Validate };

struct ScheduleSpec {
    control::SequenceKind kind = control::SequenceKind::CPMG;
    int n_pulses = 100;
    control::PulseMode mode = control::PulseMode::Ideal;
    double tau_p = 1e-3;  // us, used in finite mode
};

struct SweepSpec {
    std::vector<double> eta_values;
    std::vector<double> lc_values_km;
};

struct RunConfig {
    model::ModelConfig model_cfg;
    heom::IntegratorConfig integrator;
    Experiment experiment = Experiment::Decay;
    std::optional<ScheduleSpec> schedule;
    std::optional<SweepSpec> sweep;  // resolved: present iff experiment is a map
    double total_distance_km = 5.0;
    double threshold = 0.1;
    std::string output_path;
    int workers = 0;  // 0 = available parallelism
};

// Parses and fully validates a JSON configuration document. Unknown keys are
// rejected; every error message names the offending key and constraint.
RunConfig parse_config(const std::string& text);

// Convenience: read a file and parse it.
RunConfig load_config_file(const std::string& path);

// Resolved configuration as a JSON string (for the metadata sidecar).
std::string config_to_json(const RunConfig& cfg);

const char* experiment_name(Experiment e);

// Default log-spaced sweep grids: eta in [0.01, 0.2], L_c in [10 m, 1 km],
// six points each.
SweepSpec default_sweep();

}  // namespace fiberheom::io
