// Unit tests for the JSON configuration layer.

#include <doctest.h>

#include <string>

#include "fiberheom/config.hpp"
#include "fiberheom/control.hpp"
#include "fiberheom/model.hpp"

using namespace fiberheom;

namespace {

const char* kMinimal = R"({
  "fiber": {"wavelength_nm": 1550.0, "mean_birefringence": 1e-7,
            "birefringence_std": 1e-8, "correlation_length_km": 0.1,
            "group_index": 1.5},
  "experiment": "decay"
})";

}  // namespace

TEST_CASE("minimal config resolves the documented defaults") {
    const io::RunConfig cfg = io::parse_config(kMinimal);
    CHECK(cfg.experiment == io::Experiment::Decay);
    CHECK(cfg.integrator.n_c == 10);
    CHECK(cfg.integrator.dt == 1e-3);
    CHECK(cfg.model_cfg.initial_state == model::BellState::PhiPlus);
    CHECK(cfg.model_cfg.topology == model::Topology::IndependentPerQubit);
    CHECK(cfg.total_distance_km == 5.0);
    CHECK(cfg.threshold == 0.1);
    CHECK(cfg.workers == 0);
    CHECK(!cfg.schedule.has_value());
    CHECK(!cfg.sweep.has_value());
}

TEST_CASE("unknown keys are rejected by name") {
    CHECK_THROWS_WITH_AS(io::parse_config(R"({"bogus_key": 1})"),
                         doctest::Contains("bogus_key"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(io::parse_config(R"({"fiber": {"wavelenght_nm": 1550}})"),
                         doctest::Contains("fiber.wavelenght_nm"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(io::parse_config(R"({"schedule": {"n": 5}})"),
                         doctest::Contains("schedule.n"), std::invalid_argument);
}

TEST_CASE("physics constraints are enforced with the offending key named") {
    const std::string bad = R"({
      "fiber": {"mean_birefringence": 1e-7, "birefringence_std": 2e-7}
    })";
    CHECK_THROWS_WITH_AS(io::parse_config(bad), doctest::Contains("birefringence_std"),
                         std::invalid_argument);
}

TEST_CASE("syntax errors are reported as such") {
    CHECK_THROWS_WITH_AS(io::parse_config("{ not json"), doctest::Contains("syntax"),
                         std::invalid_argument);
}

TEST_CASE("a 100-pulse CPMG schedule over 5 km has 50 m spacing") {
    const std::string text = R"({
      "experiment": "dd",
      "schedule": {"kind": "cpmg", "pulses": 100, "mode": "ideal"}
    })";
    const io::RunConfig cfg = io::parse_config(text);
    REQUIRE(cfg.schedule.has_value());
    const model::DerivedParams d = model::derive_params(cfg.model_cfg.fiber);
    const double total_time = model::distance_to_time(cfg.total_distance_km, d.v_f);
    const auto seq = control::make_sequence(cfg.schedule->kind, cfg.schedule->n_pulses,
                                            total_time, cfg.schedule->mode);
    REQUIRE(seq.times.size() == 100);
    const double spacing_km = model::time_to_distance(seq.times[1] - seq.times[0], d.v_f);
    CHECK(spacing_km == doctest::Approx(0.05).epsilon(1e-9));
}

TEST_CASE("experiment/schedule/sweep cross-field rules") {
    CHECK_THROWS_WITH_AS(io::parse_config(R"({"experiment": "dd"})"),
                         doctest::Contains("schedule"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(io::parse_config(R"({"experiment": "decay", "sweep": {}})"),
                         doctest::Contains("sweep"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(io::parse_config(R"({"experiment": "nonsense"})"),
                         doctest::Contains("experiment"), std::invalid_argument);

    // map without sweep applies the default 6x6 log grids
    const io::RunConfig map_cfg = io::parse_config(R"({"experiment": "map"})");
    REQUIRE(map_cfg.sweep.has_value());
    REQUIRE(map_cfg.sweep->eta_values.size() == 6);
    REQUIRE(map_cfg.sweep->lc_values_km.size() == 6);
    CHECK(map_cfg.sweep->eta_values.front() == doctest::Approx(0.01));
    CHECK(map_cfg.sweep->eta_values.back() == doctest::Approx(0.2));
    CHECK(map_cfg.sweep->lc_values_km.front() == doctest::Approx(0.01));
    CHECK(map_cfg.sweep->lc_values_km.back() == doctest::Approx(1.0));

    // dd-map alias and implicit default schedule
    const io::RunConfig ddm = io::parse_config(R"({"experiment": "dd-map"})");
    CHECK(ddm.experiment == io::Experiment::DDMap);
    REQUIRE(ddm.schedule.has_value());
    CHECK(ddm.schedule->n_pulses == 100);
    CHECK(ddm.schedule->mode == control::PulseMode::Ideal);
}

TEST_CASE("sweep entries are validated") {
    CHECK_THROWS_WITH_AS(
        io::parse_config(R"({"experiment": "map", "sweep": {"eta": [0.1]}})"),
        doctest::Contains("sweep.eta"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(
        io::parse_config(R"({"experiment": "map", "sweep": {"eta": [0.1, 1.5]}})"),
        doctest::Contains("eta"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(
        io::parse_config(R"({"experiment": "map", "sweep": {"lc_km": [0.1, -0.2]}})"),
        doctest::Contains("lc_km"), std::invalid_argument);
}

TEST_CASE("integrator constraints") {
    CHECK_THROWS_WITH_AS(io::parse_config(R"({"integrator": {"dt": 0.0}})"),
                         doctest::Contains("integrator.dt"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(
        io::parse_config(R"({"integrator": {"dt": 1e-3, "pulse_substep": 2e-3}})"),
        doctest::Contains("pulse_substep"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(io::parse_config(R"({"integrator": {"n_c": -2}})"),
                         doctest::Contains("n_c"), std::invalid_argument);
}

TEST_CASE("exponent overrides parse into the model config") {
    const std::string text = R"({
      "model": {"exponents": [{"c_re": 0.1, "nu_re": 2.0},
                              {"c_re": 0.05, "c_im": 0.01, "nu_re": 4.0, "nu_im": -0.5}]}
    })";
    const io::RunConfig cfg = io::parse_config(text);
    REQUIRE(cfg.model_cfg.exponent_override.size() == 2);
    CHECK(cfg.model_cfg.exponent_override[1].c.imag() == doctest::Approx(0.01));
    CHECK(cfg.model_cfg.exponent_override[1].nu.imag() == doctest::Approx(-0.5));

    CHECK_THROWS_WITH_AS(
        io::parse_config(R"({"model": {"exponents": [{"c_re": 0.1, "nu_re": -1.0}]}})"),
        doctest::Contains("nu_re"), std::invalid_argument);
}

TEST_CASE("resolved config serializes and re-parses to the same settings") {
    const io::RunConfig cfg = io::parse_config(R"({
      "experiment": "map",
      "sweep": {"eta": [0.02, 0.08], "lc_km": [0.05, 0.5]},
      "threshold": 0.2,
      "workers": 3
    })");
    const io::RunConfig back = io::parse_config(io::config_to_json(cfg));
    CHECK(back.experiment == io::Experiment::Map);
    REQUIRE(back.sweep.has_value());
    CHECK(back.sweep->eta_values == cfg.sweep->eta_values);
    CHECK(back.sweep->lc_values_km == cfg.sweep->lc_values_km);
    CHECK(back.threshold == cfg.threshold);
    CHECK(back.workers == 3);
}
