// model.hpp — Physical fiber description and its mapping onto the two-qubit
// dephasing model: system Hamiltonian, bath coupling topology, correlation
// exponents, and distance/time unit conversions.
//
// Units throughout: time in us, distance in km, rates and frequencies in
// 1/us and rad/us. hbar = 1.

#pragma once

#include <optional>
#include <vector>

#include "fiberheom/linalg.hpp"

namespace fiberheom::model {

using lin::cplx;

// Speed of light in vacuum, km/us.
constexpr double kSpeedOfLightKmPerUs = 0.299792458;

struct FiberParams {
    double wavelength_nm = 1550.0;        // > 0
    double mean_birefringence = 1e-7;     // > 0, dimensionless
    double birefringence_std = 1e-8;      // >= 0, <= mean_birefringence
    double correlation_length_km = 0.1;   // > 0
    double group_index = 1.5;             // > 1

    void validate() const;  // throws std::invalid_argument naming the field
};

struct DerivedParams {
    double v_f = 0.0;           // light speed in fiber, km/us
    double omega = 0.0;         // optical carrier frequency, rad/us
    double big_omega = 0.0;     // qubit (TLS) frequency Omega = omega * mean_birefringence
    double eta = 0.0;           // coupling ratio sigma / mean
    double gamma = 0.0;         // bath decay rate 1/tau_c, 1/us
    double tau_c = 0.0;         // bath correlation time, us
    double beat_length_m = 0.0; // wavelength / mean_birefringence, meters
};

DerivedParams derive_params(const FiberParams& fiber);

enum class Topology { IndependentPerQubit, CollectiveShared };
enum class BellState { PhiPlus, PhiMinus, PsiPlus, PsiMinus };

// One term of the bath correlation function C(t) = sum_k c_k exp(-nu_k t).
struct ExponentTerm {
    cplx c;   // amplitude, 1/us^2
    cplx nu;  // decay rate, 1/us; Re(nu) > 0
};

struct BathSpec {
    lin::CMatrix coupling;               // 4x4 Hermitian operator
    std::vector<ExponentTerm> exponents;

    void validate() const;
};

struct ModelConfig {
    FiberParams fiber;
    Topology topology = Topology::IndependentPerQubit;
    BellState initial_state = BellState::PhiPlus;
    std::optional<double> omega1;  // rad/us; defaults to derived Omega
    std::optional<double> omega2;
    // Optional override of the per-bath correlation expansion; empty means the
    // single term (c = eta, nu = gamma) from the fiber parameters.
    std::vector<ExponentTerm> exponent_override;
};

// H_S = (Omega1 sz (x) I + Omega2 I (x) sz) / 2, diagonal in the HH,HV,VH,VV basis.
lin::CMatrix build_system_hamiltonian(const ModelConfig& cfg);

// Two baths with Q1 = sz (x) I, Q2 = I (x) sz for the independent topology,
// one bath with Q = sz (x) I + I (x) sz for the collective one.
std::vector<BathSpec> build_baths(const ModelConfig& cfg);

// Rank-1 projector of the chosen Bell state.
lin::CMatrix bell_state(BellState kind);

inline double distance_to_time(double d_km, double v_f) { return d_km / v_f; }
inline double time_to_distance(double t_us, double v_f) { return t_us * v_f; }

}  // namespace fiberheom::model
