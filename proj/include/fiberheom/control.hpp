// control.hpp — CPMG and UDD pulse schedules, the rectangular control
// envelope, and the ideal (instantaneous) pulse applied to a full hierarchy.

#pragma once

#include <vector>

#include "fiberheom/linalg.hpp"

namespace fiberheom::heom {
struct HierarchyState;  // defined in heom.hpp
}

namespace fiberheom::control {

enum class SequenceKind { CPMG, UDD };
enum class PulseMode { Ideal, Finite };

// A train of N joint pi pulses (sx (x) sx) over [0, T]. In Finite mode each
// pulse is a rectangle of width tau_p and amplitude amplitude with
// tau_p * amplitude = pi/2; Ideal mode applies the zero-width limit.
struct PulseSequence {
    SequenceKind kind = SequenceKind::CPMG;
    int n_pulses = 0;
    double total_time = 0.0;  // us
    double tau_p = 0.0;       // us, pulse width (Finite mode)
    double amplitude = 0.0;   // rad/us (Finite mode)
    PulseMode mode = PulseMode::Ideal;
    std::vector<double> times;  // pulse centers, strictly increasing
};

// t_j = (j - 1/2) T / N, j = 1..N.
std::vector<double> cpmg_times(int n, double total_time);

// t_j = T sin^2(j pi / (2 (N+1))), j = 1..N.
std::vector<double> udd_times(int n, double total_time);

// Builds and validates a schedule. Finite mode sets amplitude = pi / (2 tau_p)
// and requires every pulse support to fit inside (0, T) without overlap.
PulseSequence make_sequence(SequenceKind kind, int n, double total_time,
                            PulseMode mode = PulseMode::Ideal, double tau_p = 1e-3);

// Rectangle-train amplitude h(t): amplitude inside any pulse support, else 0.
double envelope(const PulseSequence& seq, double t);

// The control operator sx (x) sx.
lin::CMatrix control_operator();

// Conjugates every auxiliary matrix by sx (x) sx. An instantaneous system
// unitary leaves the bath-index structure untouched, so the whole hierarchy
// transforms covariantly.
void apply_ideal_pulse(heom::HierarchyState& state);

}  // namespace fiberheom::control
