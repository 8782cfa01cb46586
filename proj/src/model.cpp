// model.cpp — fiber-to-model parameter mapping and operator construction.

#include "fiberheom/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fiberheom::model {

void FiberParams::validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("fiber: " + msg); };
    if (!(wavelength_nm > 0.0)) fail("wavelength_nm must be > 0");
    if (!(mean_birefringence > 0.0)) fail("mean_birefringence must be > 0");
    if (!(birefringence_std >= 0.0)) fail("birefringence_std must be >= 0");
    if (birefringence_std > mean_birefringence) {
        fail("birefringence_std must be <= mean_birefringence (coupling ratio eta <= 1)");
    }
    if (!(correlation_length_km > 0.0)) fail("correlation_length_km must be > 0");
    if (!(group_index > 1.0)) fail("group_index must be > 1");
}

DerivedParams derive_params(const FiberParams& fiber) {
    fiber.validate();
    DerivedParams d;
    d.v_f = kSpeedOfLightKmPerUs / fiber.group_index;
    const double wavelength_km = fiber.wavelength_nm * 1e-12;
    // Optical carrier frequency in the convention used for the qubit frequency
    // Omega = omega * mean_birefringence (omega = c/lambda, ~1e8 1/us at 1550 nm).
    d.omega = kSpeedOfLightKmPerUs / wavelength_km;
    d.big_omega = d.omega * fiber.mean_birefringence;
    d.eta = fiber.birefringence_std / fiber.mean_birefringence;
    d.tau_c = fiber.correlation_length_km / d.v_f;
    d.gamma = 1.0 / d.tau_c;
    d.beat_length_m = fiber.wavelength_nm * 1e-9 / fiber.mean_birefringence;
    return d;
}

void BathSpec::validate() const {
    if (coupling.dim() != 4) {
        throw std::invalid_argument("bath: coupling operator must be 4x4");
    }
    if (!coupling.is_hermitian(1e-12)) {
        throw std::invalid_argument("bath: coupling operator must be Hermitian to 1e-12");
    }
    if (exponents.empty()) {
        throw std::invalid_argument("bath: at least one correlation exponent required");
    }
    for (const ExponentTerm& term : exponents) {
        if (!(term.nu.real() > 0.0)) {
            throw std::invalid_argument(
                "bath: every correlation exponent needs Re(nu) > 0, got " +
                std::to_string(term.nu.real()));
        }
    }
}

lin::CMatrix build_system_hamiltonian(const ModelConfig& cfg) {
    const DerivedParams d = derive_params(cfg.fiber);
    const double w1 = cfg.omega1.value_or(d.big_omega);
    const double w2 = cfg.omega2.value_or(d.big_omega);
    const lin::CMatrix sz = lin::pauli_z();
    const lin::CMatrix id = lin::identity2();
    lin::CMatrix h = 0.5 * w1 * lin::kron(sz, id);
    h += 0.5 * w2 * lin::kron(id, sz);
    return h;
}

std::vector<BathSpec> build_baths(const ModelConfig& cfg) {
    const DerivedParams d = derive_params(cfg.fiber);
    std::vector<ExponentTerm> terms = cfg.exponent_override;
    if (terms.empty()) {
        terms.push_back({cplx(d.eta, 0.0), cplx(d.gamma, 0.0)});
    }
    const lin::CMatrix sz = lin::pauli_z();
    const lin::CMatrix id = lin::identity2();

    std::vector<BathSpec> baths;
    if (cfg.topology == Topology::IndependentPerQubit) {
        baths.push_back({lin::kron(sz, id), terms});
        baths.push_back({lin::kron(id, sz), terms});
    } else {
        baths.push_back({lin::kron(sz, id) + lin::kron(id, sz), terms});
    }
    for (const BathSpec& b : baths) b.validate();
    return baths;
}

lin::CMatrix bell_state(BellState kind) {
    // basis order: HH, HV, VH, VV
    int a = 0, b = 0;
    double sign = 1.0;
    switch (kind) {
        case BellState::PhiPlus:  a = 0; b = 3; sign = +1.0; break;
        case BellState::PhiMinus: a = 0; b = 3; sign = -1.0; break;
        case BellState::PsiPlus:  a = 1; b = 2; sign = +1.0; break;
        case BellState::PsiMinus: a = 1; b = 2; sign = -1.0; break;
    }
    lin::CMatrix rho(4);
    rho(a, a) = 0.5;
    rho(b, b) = 0.5;
    rho(a, b) = 0.5 * sign;
    rho(b, a) = 0.5 * sign;
    return rho;
}

}  // namespace fiberheom::model
