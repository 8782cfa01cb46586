// runners.hpp — experiment drivers: single decay / DD trajectories, the
// (eta, L_c) sweep maps with parallel cell execution, and the engine-vs-oracle
// validation harness. All CSV output is byte-deterministic for a fixed
// configuration; a JSON sidecar records the resolved config and timings.

#pragma once

#include <iosfwd>
#include <string>

#include "fiberheom/config.hpp"

namespace fiberheom::io {

// Absolute tolerance for the engine-vs-oracle validation verdict.
inline constexpr double kOracleTolerance = 1e-3;

// Header: distance_km,time_us,concurrence
void run_decay(const RunConfig& cfg, const std::string& out_path);

// Header: distance_km,time_us,concurrence,pulses_applied
void run_dd(const RunConfig& cfg, const std::string& out_path);

// Header: eta,lc_km,distance_to_threshold_km,non_markovianity,error
// distance column prints "inf" when the threshold is never reached; per-cell
// failures land in the error column and the run continues.
void run_map(const RunConfig& cfg, const std::string& out_path);

// Header: eta,lc_km,c_nodd,c_cpmg,c_udd,dd_advantage,error
void run_dd_map(const RunConfig& cfg, const std::string& out_path);

// Runs the hierarchy engine against the closed-form dephasing solution on the
// validation grid, prints one line per cell plus an overall PASS/FAIL verdict,
// and returns the process exit code (0 pass, 1 fail). out_path may be empty.
int run_validate(const RunConfig& cfg, std::ostream& report, const std::string& out_path);

// Runs cfg.experiment with the resolved output path; returns the exit code.
int dispatch(const RunConfig& cfg, std::ostream& report);

// Output path resolution: explicit path, else cfg.output_path, else
// "fiberheom_<experiment>.csv".
std::string resolve_output_path(const RunConfig& cfg, const std::string& cli_override);

}  // namespace fiberheom::io
