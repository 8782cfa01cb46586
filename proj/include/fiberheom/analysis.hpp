// analysis.hpp — Entanglement and non-Markovianity metrics, threshold and
// DD-comparison statistics, and the closed-form dephasing solution used to
// validate the hierarchy engine.

#pragma once

#include <optional>
#include <vector>

#include "fiberheom/linalg.hpp"
#include "fiberheom/model.hpp"

namespace fiberheom::analysis {

struct Trajectory {
    std::vector<double> times;         // us, strictly increasing
    std::vector<double> distances;     // km, = v_f * times
    std::vector<double> concurrences;  // clamped to [0, 1]
    std::vector<lin::CMatrix> rdms;    // reduced density matrix at each sample
    std::vector<int> pulses_applied;   // cumulative pulse count at each sample
    double v_f = 0.0;                  // km/us
};

struct SweepCell {
    double distance_to_threshold_km = 0.0;  // +inf when never reached
    double residual_concurrence = 0.0;
    double non_markovianity = 0.0;
};

struct SweepResult {
    std::vector<double> eta_values;
    std::vector<double> lc_values_km;
    std::vector<SweepCell> cells;  // row-major over (eta, lc)
};

// Wootters concurrence. rho must be 4x4, Hermitian to 1e-8, trace 1 +- 1e-6,
// with eigenvalues >= -1e-6 (small negatives from integration noise are
// clamped internally; anything worse is a precondition violation).
double concurrence(const lin::CMatrix& rho);

// Revival measure: total variation of the concurrence samples minus the net
// decrease, clamped to >= 0. Zero for monotone decay.
double non_markovianity(const Trajectory& traj);

// First distance at which the concurrence crosses the threshold, linearly
// interpolated between samples. Empty when the trajectory never crosses.
std::optional<double> distance_to_threshold(const Trajectory& traj, double threshold = 0.1);

// Relative residual-concurrence difference (c_cpmg - c_udd) / c_cpmg.
// Empty (NOT_DEFINED) when c_cpmg <= 0.
std::optional<double> dd_advantage(double c_cpmg, double c_udd);

// Exact pure-dephasing concurrence for the single-exponential bath
// C(t) = eta * exp(-gamma t):
//
//   C(t) = exp(-K * eta * (gamma t - 1 + e^{-gamma t}) / gamma^2)
//
// The second-order cumulant expansion is exact for this Gaussian noise; the
// prefactor K counts the squared coupling-eigenvalue gap of the stored
// coherence, summed over baths:
//   independent baths:            K = 8  (all four Bell states)
//   collective bath, Phi+/Phi-:   K = 16
//   collective bath, Psi+/Psi-:   K = 0  (decoherence-free pair)
double dephasing_oracle(double eta, double gamma, double t,
                        model::Topology topology = model::Topology::IndependentPerQubit,
                        model::BellState state = model::BellState::PhiPlus);

// The cumulant integral Gamma(t) = (gamma t - 1 + e^{-gamma t}) / gamma^2,
// evaluated without cancellation for small gamma t.
double dephasing_cumulant(double gamma, double t);

// Coherence-gap prefactor K described above.
int dephasing_gap_factor(model::Topology topology, model::BellState state);

}  // namespace fiberheom::analysis
