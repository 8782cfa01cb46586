// control.cpp — pulse schedule construction and pulse application.

#include "fiberheom/control.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "fiberheom/heom.hpp"

namespace fiberheom::control {

std::vector<double> cpmg_times(int n, double total_time) {
    if (n < 1) throw std::invalid_argument("cpmg_times: need at least one pulse");
    if (!(total_time > 0.0)) throw std::invalid_argument("cpmg_times: total_time must be > 0");
    std::vector<double> times(n);
    for (int j = 1; j <= n; ++j) {
        times[j - 1] = (j - 0.5) * total_time / n;
    }
    return times;
}

std::vector<double> udd_times(int n, double total_time) {
    if (n < 1) throw std::invalid_argument("udd_times: need at least one pulse");
    if (!(total_time > 0.0)) throw std::invalid_argument("udd_times: total_time must be > 0");
    std::vector<double> times(n);
    for (int j = 1; j <= n; ++j) {
        const double s = std::sin(j * std::numbers::pi / (2.0 * (n + 1)));
        times[j - 1] = total_time * s * s;
    }
    return times;
}

PulseSequence make_sequence(SequenceKind kind, int n, double total_time, PulseMode mode,
                            double tau_p) {
    PulseSequence seq;
    seq.kind = kind;
    seq.n_pulses = n;
    seq.total_time = total_time;
    seq.mode = mode;
    seq.times = kind == SequenceKind::CPMG ? cpmg_times(n, total_time)
                                           : udd_times(n, total_time);
    if (mode == PulseMode::Finite) {
        if (!(tau_p > 0.0)) throw std::invalid_argument("make_sequence: tau_p must be > 0");
        seq.tau_p = tau_p;
        seq.amplitude = std::numbers::pi / (2.0 * tau_p);  // tau_p * A_p = pi/2
        double prev_end = 0.0;
        for (double tc : seq.times) {
            const double lo = tc - 0.5 * tau_p;
            const double hi = tc + 0.5 * tau_p;
            if (lo <= prev_end) {
                throw std::invalid_argument(
                    "make_sequence: pulse supports overlap or touch the interval edge near t = " +
                    std::to_string(tc) + " us; reduce tau_p or the pulse count");
            }
            if (hi >= total_time) {
                throw std::invalid_argument(
                    "make_sequence: pulse support extends past total_time near t = " +
                    std::to_string(tc) + " us");
            }
            prev_end = hi;
        }
    } else {
        seq.tau_p = 0.0;
        seq.amplitude = 0.0;
    }
    return seq;
}

double envelope(const PulseSequence& seq, double t) {
    if (seq.mode != PulseMode::Finite) {
        throw std::invalid_argument("envelope: only defined for finite-width sequences");
    }
    for (double tc : seq.times) {
        if (t >= tc - 0.5 * seq.tau_p && t <= tc + 0.5 * seq.tau_p) return seq.amplitude;
    }
    return 0.0;
}

lin::CMatrix control_operator() { return lin::kron(lin::pauli_x(), lin::pauli_x()); }

void apply_ideal_pulse(heom::HierarchyState& state) {
    // sx (x) sx is the anti-identity: conjugation reverses both indices.
    for (std::size_t p = 0; p < state.layout->size(); ++p) {
        lin::cplx* block = state.adm(p);
        lin::cplx rotated[16];
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) rotated[4 * i + j] = block[4 * (3 - i) + (3 - j)];
        for (int e = 0; e < 16; ++e) block[e] = rotated[e];
    }
}

}  // namespace fiberheom::control
