// config.cpp — strict JSON configuration parsing.

#include "fiberheom/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace fiberheom::io {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& key, const std::string& constraint) {
    throw std::invalid_argument("config: key '" + key + "': " + constraint);
}

void check_keys(const json& obj, const std::string& scope, const std::set<std::string>& allowed) {
    for (const auto& item : obj.items()) {
        if (!allowed.count(item.key())) {
            fail(scope.empty() ? item.key() : scope + "." + item.key(),
                 "unknown key (schema rejects unrecognized keys)");
        }
    }
}

double get_number(const json& obj, const std::string& scope, const std::string& key,
                  double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) fail(scope + "." + key, "must be a number");
    return obj[key].get<double>();
}

int get_int(const json& obj, const std::string& scope, const std::string& key, int fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number_integer()) fail(scope + "." + key, "must be an integer");
    return obj[key].get<int>();
}

std::string get_string(const json& obj, const std::string& scope, const std::string& key,
                       const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_string()) fail(scope + "." + key, "must be a string");
    return obj[key].get<std::string>();
}

model::FiberParams parse_fiber(const json& obj) {
    check_keys(obj, "fiber",
               {"wavelength_nm", "mean_birefringence", "birefringence_std",
                "correlation_length_km", "group_index"});
    model::FiberParams f;
    f.wavelength_nm = get_number(obj, "fiber", "wavelength_nm", f.wavelength_nm);
    f.mean_birefringence = get_number(obj, "fiber", "mean_birefringence", f.mean_birefringence);
    f.birefringence_std = get_number(obj, "fiber", "birefringence_std", f.birefringence_std);
    f.correlation_length_km =
        get_number(obj, "fiber", "correlation_length_km", f.correlation_length_km);
    f.group_index = get_number(obj, "fiber", "group_index", f.group_index);
    try {
        f.validate();
    } catch (const std::invalid_argument& e) {
        throw std::invalid_argument(std::string("config: ") + e.what());
    }
    return f;
}

void parse_model(const json& obj, model::ModelConfig& cfg) {
    check_keys(obj, "model", {"topology", "initial_state", "omega1", "omega2", "exponents"});
    const std::string topology = get_string(obj, "model", "topology", "independent");
    if (topology == "independent") {
        cfg.topology = model::Topology::IndependentPerQubit;
    } else if (topology == "collective") {
        cfg.topology = model::Topology::CollectiveShared;
    } else {
        fail("model.topology", "must be 'independent' or 'collective'");
    }
    const std::string state = get_string(obj, "model", "initial_state", "phi_plus");
    if (state == "phi_plus") cfg.initial_state = model::BellState::PhiPlus;
    else if (state == "phi_minus") cfg.initial_state = model::BellState::PhiMinus;
    else if (state == "psi_plus") cfg.initial_state = model::BellState::PsiPlus;
    else if (state == "psi_minus") cfg.initial_state = model::BellState::PsiMinus;
    else fail("model.initial_state", "must be one of phi_plus, phi_minus, psi_plus, psi_minus");

    if (obj.contains("omega1")) cfg.omega1 = get_number(obj, "model", "omega1", 0.0);
    if (obj.contains("omega2")) cfg.omega2 = get_number(obj, "model", "omega2", 0.0);

    if (obj.contains("exponents")) {
        if (!obj["exponents"].is_array() || obj["exponents"].empty()) {
            fail("model.exponents", "must be a non-empty array");
        }
        for (const json& term : obj["exponents"]) {
            if (!term.is_object()) fail("model.exponents", "entries must be objects");
            check_keys(term, "model.exponents[]", {"c_re", "c_im", "nu_re", "nu_im"});
            model::ExponentTerm t;
            t.c = {get_number(term, "model.exponents[]", "c_re", 0.0),
                   get_number(term, "model.exponents[]", "c_im", 0.0)};
            t.nu = {get_number(term, "model.exponents[]", "nu_re", 0.0),
                    get_number(term, "model.exponents[]", "nu_im", 0.0)};
            if (!(t.nu.real() > 0.0)) {
                fail("model.exponents[].nu_re", "must be > 0 (correlation must decay)");
            }
            cfg.exponent_override.push_back(t);
        }
    }
}

heom::IntegratorConfig parse_integrator(const json& obj) {
    check_keys(obj, "integrator", {"dt", "sample_every", "n_c", "pulse_substep"});
    heom::IntegratorConfig icfg;
    icfg.dt = get_number(obj, "integrator", "dt", icfg.dt);
    if (!(icfg.dt > 0.0)) fail("integrator.dt", "must be > 0");
    icfg.sample_every = get_int(obj, "integrator", "sample_every", icfg.sample_every);
    if (icfg.sample_every < 0) fail("integrator.sample_every", "must be >= 0 (0 = automatic)");
    icfg.n_c = get_int(obj, "integrator", "n_c", icfg.n_c);
    if (icfg.n_c < 0) fail("integrator.n_c", "must be >= 0");
    icfg.pulse_substep = get_number(obj, "integrator", "pulse_substep", icfg.pulse_substep);
    if (icfg.pulse_substep < 0.0) fail("integrator.pulse_substep", "must be >= 0 (0 = automatic)");
    if (icfg.pulse_substep > icfg.dt) fail("integrator.pulse_substep", "must be <= dt");
    return icfg;
}

ScheduleSpec parse_schedule(const json& obj) {
    check_keys(obj, "schedule", {"kind", "pulses", "mode", "tau_p"});
    ScheduleSpec s;
    const std::string kind = get_string(obj, "schedule", "kind", "cpmg");
    if (kind == "cpmg") s.kind = control::SequenceKind::CPMG;
    else if (kind == "udd") s.kind = control::SequenceKind::UDD;
    else fail("schedule.kind", "must be 'cpmg' or 'udd'");
    s.n_pulses = get_int(obj, "schedule", "pulses", s.n_pulses);
    if (s.n_pulses < 1) fail("schedule.pulses", "must be >= 1");
    const std::string mode = get_string(obj, "schedule", "mode", "ideal");
    if (mode == "ideal") s.mode = control::PulseMode::Ideal;
    else if (mode == "finite") s.mode = control::PulseMode::Finite;
    else fail("schedule.mode", "must be 'ideal' or 'finite'");
    s.tau_p = get_number(obj, "schedule", "tau_p", s.tau_p);
    if (!(s.tau_p > 0.0)) fail("schedule.tau_p", "must be > 0");
    return s;
}

std::vector<double> parse_positive_array(const json& arr, const std::string& scope) {
    if (!arr.is_array() || arr.size() < 2) fail(scope, "must be an array of at least 2 numbers");
    std::vector<double> out;
    for (const json& v : arr) {
        if (!v.is_number()) fail(scope, "entries must be numbers");
        out.push_back(v.get<double>());
        if (!(out.back() > 0.0)) fail(scope, "entries must be > 0");
    }
    return out;
}

SweepSpec parse_sweep(const json& obj) {
    check_keys(obj, "sweep", {"eta", "lc_km"});
    SweepSpec s = default_sweep();
    if (obj.contains("eta")) {
        s.eta_values = parse_positive_array(obj["eta"], "sweep.eta");
        for (double e : s.eta_values) {
            if (e > 1.0) fail("sweep.eta", "coupling ratio eta must be <= 1");
        }
    }
    if (obj.contains("lc_km")) {
        s.lc_values_km = parse_positive_array(obj["lc_km"], "sweep.lc_km");
    }
    return s;
}

Experiment parse_experiment(const std::string& name) {
    if (name == "decay") return Experiment::Decay;
    if (name == "map") return Experiment::Map;
    if (name == "dd") return Experiment::DD;
    if (name == "dd_map" || name == "dd-map") return Experiment::DDMap;
    if (name == "validate") return Experiment::Validate;
    fail("experiment", "must be one of decay, map, dd, dd_map, validate");
}

}  // namespace

SweepSpec default_sweep() {
    SweepSpec s;
    const int n = 6;
    for (int i = 0; i < n; ++i) {
        s.eta_values.push_back(0.01 * std::pow(0.2 / 0.01, i / double(n - 1)));
        s.lc_values_km.push_back(0.01 * std::pow(1.0 / 0.01, i / double(n - 1)));
    }
    return s;
}

const char* experiment_name(Experiment e) {
    switch (e) {
        case Experiment::Decay: return "decay";
        case Experiment::Map: return "map";
        case Experiment::DD: return "dd";
        case Experiment::DDMap: return "dd_map";
        case Experiment::Validate: return "validate";
    }
    return "unknown";
}

RunConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: JSON syntax error: ") + e.what());
    }
    if (!root.is_object()) throw std::invalid_argument("config: top level must be a JSON object");

    check_keys(root, "",
               {"fiber", "model", "integrator", "experiment", "schedule", "sweep",
                "total_distance_km", "threshold", "output_path", "workers"});

    RunConfig cfg;
    if (root.contains("fiber")) {
        if (!root["fiber"].is_object()) fail("fiber", "must be an object");
        cfg.model_cfg.fiber = parse_fiber(root["fiber"]);
    } else {
        cfg.model_cfg.fiber.validate();
    }
    if (root.contains("model")) {
        if (!root["model"].is_object()) fail("model", "must be an object");
        parse_model(root["model"], cfg.model_cfg);
    }
    if (root.contains("integrator")) {
        if (!root["integrator"].is_object()) fail("integrator", "must be an object");
        cfg.integrator = parse_integrator(root["integrator"]);
    }

    cfg.experiment = parse_experiment(get_string(root, "", "experiment", "decay"));

    if (root.contains("schedule")) {
        if (!root["schedule"].is_object()) fail("schedule", "must be an object");
        cfg.schedule = parse_schedule(root["schedule"]);
    }
    const bool is_map = cfg.experiment == Experiment::Map || cfg.experiment == Experiment::DDMap;
    if (root.contains("sweep")) {
        if (!is_map) fail("sweep", "only allowed for map and dd_map experiments");
        if (!root["sweep"].is_object()) fail("sweep", "must be an object");
        cfg.sweep = parse_sweep(root["sweep"]);
    } else if (is_map) {
        cfg.sweep = default_sweep();
    }
    if (cfg.experiment == Experiment::DD && !cfg.schedule) {
        fail("schedule", "required for the dd experiment");
    }
    if (cfg.experiment == Experiment::DDMap && !cfg.schedule) {
        cfg.schedule = ScheduleSpec{};  // N = 100, ideal
    }

    cfg.total_distance_km = get_number(root, "", "total_distance_km", cfg.total_distance_km);
    if (!(cfg.total_distance_km > 0.0)) fail("total_distance_km", "must be > 0");
    cfg.threshold = get_number(root, "", "threshold", cfg.threshold);
    if (!(cfg.threshold > 0.0 && cfg.threshold < 1.0)) fail("threshold", "must be in (0, 1)");
    cfg.output_path = get_string(root, "", "output_path", "");
    cfg.workers = get_int(root, "", "workers", 0);
    if (cfg.workers < 0) fail("workers", "must be >= 0 (0 = available parallelism)");
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

std::string config_to_json(const RunConfig& cfg) {
    json j;
    const model::FiberParams& f = cfg.model_cfg.fiber;
    j["fiber"] = {{"wavelength_nm", f.wavelength_nm},
                  {"mean_birefringence", f.mean_birefringence},
                  {"birefringence_std", f.birefringence_std},
                  {"correlation_length_km", f.correlation_length_km},
                  {"group_index", f.group_index}};
    json jm;
    jm["topology"] = cfg.model_cfg.topology == model::Topology::IndependentPerQubit
                         ? "independent"
                         : "collective";
    switch (cfg.model_cfg.initial_state) {
        case model::BellState::PhiPlus: jm["initial_state"] = "phi_plus"; break;
        case model::BellState::PhiMinus: jm["initial_state"] = "phi_minus"; break;
        case model::BellState::PsiPlus: jm["initial_state"] = "psi_plus"; break;
        case model::BellState::PsiMinus: jm["initial_state"] = "psi_minus"; break;
    }
    if (cfg.model_cfg.omega1) jm["omega1"] = *cfg.model_cfg.omega1;
    if (cfg.model_cfg.omega2) jm["omega2"] = *cfg.model_cfg.omega2;
    if (!cfg.model_cfg.exponent_override.empty()) {
        json arr = json::array();
        for (const model::ExponentTerm& t : cfg.model_cfg.exponent_override) {
            arr.push_back({{"c_re", t.c.real()},
                           {"c_im", t.c.imag()},
                           {"nu_re", t.nu.real()},
                           {"nu_im", t.nu.imag()}});
        }
        jm["exponents"] = arr;
    }
    j["model"] = jm;
    j["integrator"] = {{"dt", cfg.integrator.dt},
                       {"sample_every", cfg.integrator.sample_every},
                       {"n_c", cfg.integrator.n_c},
                       {"pulse_substep", cfg.integrator.pulse_substep}};
    j["experiment"] = experiment_name(cfg.experiment);
    if (cfg.schedule) {
        j["schedule"] = {
            {"kind", cfg.schedule->kind == control::SequenceKind::CPMG ? "cpmg" : "udd"},
            {"pulses", cfg.schedule->n_pulses},
            {"mode", cfg.schedule->mode == control::PulseMode::Ideal ? "ideal" : "finite"},
            {"tau_p", cfg.schedule->tau_p}};
    }
    if (cfg.sweep) {
        j["sweep"] = {{"eta", cfg.sweep->eta_values}, {"lc_km", cfg.sweep->lc_values_km}};
    }
    j["total_distance_km"] = cfg.total_distance_km;
    j["threshold"] = cfg.threshold;
    j["output_path"] = cfg.output_path;
    j["workers"] = cfg.workers;
    return j.dump(2);
}

}  // namespace fiberheom::io
